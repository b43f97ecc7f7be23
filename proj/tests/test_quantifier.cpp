#include <gtest/gtest.h>

#include "gts/game.hpp"
#include "gts/parser.hpp"
#include "gts/random.hpp"
#include "gts/solver.hpp"
#include "gts/tarski.hpp"

using namespace gts;

namespace {

using Sets = std::vector<std::vector<ElementId>>;

ElementId e(std::uint32_t i) { return ElementId{i}; }

Vocabulary sigma_p() {
  Vocabulary s;
  s.add({"P", 1});
  return s;
}

const QuantifierRegistry& registry() {
  static const QuantifierRegistry r = builtin_quantifiers();
  return r;
}

Formula parse(const char* text) { return parse_formula(text, sigma_p(), &registry()).value(); }

Structure with_p(std::size_t n, std::vector<std::uint32_t> in_p) {
  Structure a(n);
  a.declare({"P", 1});
  for (auto i : in_p) a.add_tuple("P", make_tuple({i}));
  return a;
}

}  // namespace

TEST(QInterpretation, EvenOnTwoElements) {
  EXPECT_EQ(q_interpretation(registry().at("even"), Structure(2)), (Sets{{}, {e(0), e(1)}}));
}

TEST(QInterpretation, ExistsOnOneElement) {
  EXPECT_EQ(q_interpretation(registry().at("exists"), Structure(1)), (Sets{{e(0)}}));
}

TEST(QInterpretation, EmptyMembershipGivesNoSets) {
  const QuantifierDef never{"never", [](std::size_t, std::size_t) { return false; }};
  EXPECT_TRUE(q_interpretation(never, Structure(3)).empty());
}

TEST(QInterpretation, SizesMatchMembership) {
  for (std::size_t n = 1; n <= 5; ++n)
    for (const auto& name : registry().names()) {
      const auto& q = registry().at(name);
      std::size_t expected = 0;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
        if (q.membership(n, static_cast<std::size_t>(__builtin_popcount(mask)))) ++expected;
      EXPECT_EQ(q_interpretation(q, Structure(n)).size(), expected) << name << " n=" << n;
    }
}

TEST(QInterpretation, CapIsEnforced) {
  EXPECT_THROW(q_interpretation(registry().at("even"), Structure(5), 4), QuantifierCapError);
}

TEST(QuantifierGame, EmptyInterpretationLosesImmediately) {
  QuantifierRegistry r = builtin_quantifiers();
  r.add({"never", [](std::size_t, std::size_t) { return false; }});
  const Formula phi = parse_formula("Q<never> x P(x)", sigma_p(), &r).value();
  const Game g(phi, GameOptions{&r});
  EXPECT_EQ(g.terminal_status(g.initial_position(with_p(2, {0, 1}), {}, Sign::Plus)).winner, Player::Falsifier);
  EXPECT_EQ(g.terminal_status(g.initial_position(with_p(2, {0, 1}), {}, Sign::Minus)).winner, Player::Verifier);
}

TEST(QuantifierGame, ForallWitnessLeavesOnlyInsidePoints) {
  const Game g(parse("Q<forall> x P(x)"), GameOptions{&registry()});
  const Position p = g.initial_position(with_p(2, {0}), {}, Sign::Plus);
  EXPECT_EQ(g.mover(p), Player::Verifier);
  const auto sets = g.legal_moves(p);
  ASSERT_EQ(sets.size(), 1u);
  const Position q = g.apply_move(p, sets[0]);
  EXPECT_EQ(g.mover(q), Player::Falsifier);
  const auto points = g.legal_moves(q);
  ASSERT_EQ(points.size(), 2u);
  for (const auto& m : points) {
    EXPECT_TRUE(std::get<move::PickPoint>(m).inside);
    EXPECT_EQ(g.apply_move(q, m).sign, Sign::Plus);
  }
}

TEST(QuantifierGame, OutsidePointFlipsSign) {
  const Game g(parse("Q<exists> x P(x)"), GameOptions{&registry()});
  const Position p = g.initial_position(with_p(2, {}), {}, Sign::Minus);
  EXPECT_EQ(g.mover(p), Player::Falsifier);
  const Position q = g.apply_move(p, move::PickWitnessSet{{e(0)}});
  EXPECT_EQ(g.mover(q), Player::Verifier);
  const Position out = g.apply_move(q, move::PickPoint{e(1), false});
  EXPECT_EQ(out.sign, Sign::Plus);
  EXPECT_EQ(out.assignment.get(VariableId{"x"}), e(1));
  const Position in = g.apply_move(q, move::PickPoint{e(0), true});
  EXPECT_EQ(in.sign, Sign::Minus);
  EXPECT_THROW(g.apply_move(q, move::PickPoint{e(0), false}), std::invalid_argument);
}

TEST(TarskiQ, EvenOnTwoAndThree) {
  const Formula phi = parse("Q<even> x x = x");
  EXPECT_TRUE(tarski_q_eval(Structure(2), {}, phi, registry()));
  EXPECT_FALSE(tarski_q_eval(Structure(3), {}, phi, registry()));
}

TEST(TarskiQ, ExistsOverEmptyPredicate) {
  EXPECT_FALSE(tarski_q_eval(with_p(3, {}), {}, parse("Q<exists> x P(x)"), registry()));
  EXPECT_TRUE(tarski_q_eval(with_p(3, {2}), {}, parse("Q<exists> x P(x)"), registry()));
}

TEST(TarskiQ, MajorityCountsSatisfiers) {
  const Formula phi = parse("Q<majority> x P(x)");
  EXPECT_FALSE(tarski_q_eval(with_p(4, {0, 1}), {}, phi, registry()));
  EXPECT_TRUE(tarski_q_eval(with_p(4, {0, 1, 3}), {}, phi, registry()));
}

TEST(Builtins, FourQuantifiers) {
  EXPECT_EQ(registry().size(), 4u);
  EXPECT_EQ(registry().names(), (std::set<std::string>{"even", "exists", "forall", "majority"}));
  EXPECT_FALSE(registry().at("majority").membership(4, 2));
  EXPECT_TRUE(registry().at("majority").membership(4, 3));
}

TEST(Builtins, DuplicateNameThrows) {
  QuantifierRegistry r = builtin_quantifiers();
  EXPECT_THROW(r.add({"even", [](std::size_t, std::size_t) { return true; }}), std::invalid_argument);
}

TEST(QuantifierTable, LoadsPairs) {
  QuantifierRegistry r;
  const auto d = load_quantifier_table("# one of two\nquant OneOfTwo: 2 1 -> 1\nquant OneOfTwo: 2 2 -> 0\n", r);
  ASSERT_FALSE(d) << d->to_string();
  const auto& q = r.at("OneOfTwo");
  EXPECT_TRUE(q.membership(2, 1));
  EXPECT_FALSE(q.membership(2, 2));
  EXPECT_FALSE(q.membership(3, 1));
}

TEST(QuantifierTable, MalformedLine) {
  QuantifierRegistry r;
  EXPECT_TRUE(load_quantifier_table("quant Bad 2 1 -> 1\n", r));
  EXPECT_TRUE(load_quantifier_table("quant Bad: 2 3 -> 1\n", r));
}

TEST(QuantifierGame, AgreesWithTarskiOnAllSmallModels) {
  RandomSentences gen(21, SentenceShape{SentenceFamily::WithQuantifiers, 3, {{"P", 1}}});
  const auto models = all_structures(3, {{"P", 1}});
  for (int i = 0; i < 40; ++i) {
    const Formula phi = gen.next();
    const Game g(phi, GameOptions{&registry()});
    for (const auto& a : models) {
      Solver s(g);
      const bool truth = tarski_q_eval(a, {}, phi, registry());
      const Verdict v = s.evaluate(g.initial_position(a, {}, Sign::Plus), 100);
      ASSERT_EQ(v.kind, truth ? VerdictKind::ProvenTrue : VerdictKind::ProvenFalse) << pretty_print(phi);
    }
  }
}
