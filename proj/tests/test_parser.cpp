#include <gtest/gtest.h>

#include "gts/parser.hpp"
#include "gts/random.hpp"
#include "gts/selftest.hpp"
#include "gts/tmcompile.hpp"

using namespace gts;

namespace {

Vocabulary sigma_pr() {
  Vocabulary s;
  s.add({"P", 1});
  s.add({"R", 2});
  return s;
}

VariableId v(const char* n) { return VariableId{n}; }

}  // namespace

TEST(ParseFormula, LabeledDisjunction) {
  const auto parsed = parse_formula("#1{ (P(x) | #1) }", sigma_pr());
  ASSERT_TRUE(parsed) << parsed.diagnostic().to_string();
  const Formula expected = Formula::labeled(
      LoopLabel{1}, Formula::negation(Formula::conjunction(Formula::negation(Formula::relation_atom("P", {v("x")})),
                                                           Formula::negation(Formula::loop_atom(LoopLabel{1})))));
  EXPECT_EQ(parsed.value(), expected);
}

TEST(ParseFormula, ExistsEquality) {
  const auto parsed = parse_formula("exists x x = x", Vocabulary{});
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed.value(), Formula::exists(v("x"), Formula::equality(v("x"), v("x"))));
  EXPECT_TRUE(is_sentence(parsed.value()));
}

TEST(ParseFormula, NonStandardJumpIsRejected) {
  const auto parsed = parse_formula("(#1 & exists x #1{P(x)})", sigma_pr());
  ASSERT_FALSE(parsed);
  EXPECT_NE(parsed.diagnostic().message.find("non-standard jump"), std::string::npos);
}

TEST(ParseFormula, ArityAndUndeclaredSymbols) {
  EXPECT_FALSE(parse_formula("P(x, y)", sigma_pr()));
  EXPECT_FALSE(parse_formula("S(x)", sigma_pr()));
  EXPECT_FALSE(parse_formula("($X(x) & $X(x, y))", sigma_pr()));
}

TEST(ParseFormula, DiagnosticHasPosition) {
  const auto parsed = parse_formula("exists x\n  (P(x) & )", sigma_pr());
  ASSERT_FALSE(parsed);
  EXPECT_EQ(parsed.diagnostic().span.line, 2u);
}

TEST(ParseFormula, QuantifiersNeedRegistry) {
  EXPECT_FALSE(parse_formula("Q<even> x P(x)", sigma_pr()));
  const QuantifierRegistry q = builtin_quantifiers();
  const auto parsed = parse_formula("Q<even> x P(x)", sigma_pr(), &q);
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed.value().kind(), FormulaKind::Quantified);
  EXPECT_FALSE(parse_formula("Q<odd> x P(x)", sigma_pr(), &q));
}

TEST(ParseFormula, OperatorsAndComments) {
  const auto parsed = parse_formula(
      "// every point can be deleted from R\n"
      "forall x (ins R(x,x) R(x,x) -> new y del R(x,y) ~R(x,y))",
      sigma_pr());
  ASSERT_TRUE(parsed) << parsed.diagnostic().to_string();
  EXPECT_TRUE(is_sentence(parsed.value()));
}

TEST(ParseModel, WordModelOfAbbaa) {
  const auto parsed = parse_model(
      "domain 6\nrel Succ/2 = (0,1)(1,2)(2,3)(3,4)(4,5)\nrel Pa/1 = (1)(4)(5)\nrel Pb/1 = (2)(3)");
  ASSERT_TRUE(parsed) << parsed.diagnostic().to_string();
  const Structure expected = word_model(WordSpec{{"a", "b"}, {"a", "b", "b", "a", "a"}});
  EXPECT_EQ(parsed.value().structure, expected);
  EXPECT_EQ(parsed.value().vocabulary, word_vocabulary({"a", "b"}));
}

TEST(ParseModel, OneElementEmptyVocabulary) {
  const auto parsed = parse_model("domain 1");
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed.value().structure.size(), 1u);
  EXPECT_EQ(parsed.value().vocabulary.size(), 0u);
}

TEST(ParseModel, EmptyDomainIsRejected) { EXPECT_FALSE(parse_model("domain 0")); }

TEST(ParseModel, TupleOutsideDomainIsRejected) { EXPECT_FALSE(parse_model("domain 2\nrel R/2 = (0,2)")); }

TEST(ParseModel, FormatRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const Structure s = random_structure(rng, 1 + i % 4, {{"P", 1}, {"R", 2}});
    const auto back = parse_model(format_model(s));
    ASSERT_TRUE(back) << format_model(s);
    EXPECT_EQ(back.value().structure, s);
  }
}

TEST(ParseTm, EvenAMachine) {
  const auto parsed = parse_tm(kEvenAMachine);
  ASSERT_TRUE(parsed) << parsed.diagnostic().to_string();
  const TuringMachine& tm = parsed.value();
  EXPECT_EQ(tm.input_alphabet, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(tm.start, "init");
  EXPECT_EQ(simulate(tm, {"a", "a"}, 100).outcome, RunOutcome::Accept);
  EXPECT_EQ(simulate(tm, {"a"}, 100).outcome, RunOutcome::Reject);
}

TEST(ParseTm, OverlappingAlphabetsAreRejected) {
  const auto parsed = parse_tm("states q\nstart q\ninput_alphabet a\ntape_alphabet a X\n");
  ASSERT_FALSE(parsed);
  EXPECT_NE(parsed.diagnostic().message.find("both"), std::string::npos);
}

TEST(ParseTm, AcceptingStartWithoutTransitions) {
  const auto parsed = parse_tm("states q\nstart q\naccept q\ninput_alphabet a\n");
  ASSERT_TRUE(parsed) << parsed.diagnostic().to_string();
  EXPECT_EQ(simulate(parsed.value(), {"a", "a"}, 10).outcome, RunOutcome::Accept);
  EXPECT_EQ(simulate(parsed.value(), {"a", "a"}, 10).steps, 0u);
}

TEST(ParseTm, DuplicateTransitionIsRejected) {
  EXPECT_FALSE(parse_tm("states q r\nstart q\naccept r\ninput_alphabet a\n"
                        "trans q,a -> r,a,R\ntrans q,a -> q,a,L\n"));
}

TEST(PrettyPrint, RoundTripsExamples) {
  for (const char* text : {"#1{ (P(x) | #1) }", "exists x x = x", "ins R(x,y) del $X(x) new z ~R(z,z)"}) {
    const Formula phi = parse_formula(text, sigma_pr()).value();
    const auto back = parse_formula(pretty_print(phi), sigma_pr());
    ASSERT_TRUE(back) << pretty_print(phi);
    EXPECT_EQ(back.value(), phi);
  }
}

TEST(PrettyPrint, RoundTripsCompiledMachines) {
  for (const char* src : {kEvenAMachine, kRightForeverMachine}) {
    const TuringMachine tm = parse_tm(src).value();
    const Formula phi = compile(tm);
    const auto back = parse_formula(pretty_print(phi), tm_vocabulary(tm));
    ASSERT_TRUE(back) << back.diagnostic().to_string();
    EXPECT_EQ(back.value(), phi);
  }
}

TEST(PrettyPrint, RoundTripsRandomFormulas) {
  const QuantifierRegistry q = builtin_quantifiers();
  std::size_t n = 0;
  for (auto family : {SentenceFamily::FirstOrder, SentenceFamily::WithQuantifiers, SentenceFamily::WithLoops}) {
    RandomSentences gen(17 + static_cast<int>(family), SentenceShape{family});
    for (int i = 0; i < 400; ++i, ++n) {
      const Formula phi = gen.next();
      const auto back = parse_formula(pretty_print(phi), sigma_pr(), &q);
      ASSERT_TRUE(back) << pretty_print(phi) << ": " << back.diagnostic().to_string();
      ASSERT_EQ(back.value(), phi) << pretty_print(phi);
    }
  }
  EXPECT_GE(n, 1000u);
}
