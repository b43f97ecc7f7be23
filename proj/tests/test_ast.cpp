#include <gtest/gtest.h>

#include "gts/ast.hpp"
#include "gts/parser.hpp"
#include "gts/tmcompile.hpp"
#include "gts/selftest.hpp"

using namespace gts;

namespace {

VariableId v(const char* n) { return VariableId{n}; }
Formula P(const char* x) { return Formula::relation_atom("P", {v(x)}); }
Formula loop(std::uint64_t k) { return Formula::loop_atom(LoopLabel{k}); }

Vocabulary unary_p() {
  Vocabulary sigma;
  sigma.add({"P", 1});
  return sigma;
}

}  // namespace

TEST(FreeVariables, LoopAtomHasNone) { EXPECT_TRUE(free_variables(loop(3)).empty()); }

TEST(FreeVariables, EqualityHasBothSides) {
  const FreeSet expected = {v("x"), v("y")};
  EXPECT_EQ(free_variables(Formula::equality(v("x"), v("y"))), expected);
}

TEST(FreeVariables, InsertVariableBindsRelationAndTuple) {
  const Formula phi = Formula::insert_variable("X", {v("x")}, Formula::variable_atom("X", {v("x")}));
  EXPECT_TRUE(free_variables(phi).empty());
  const FreeSet body = {v("x"), RelationVariable{"X", 1}};
  EXPECT_EQ(free_variables(phi.child()), body);
}

TEST(FreeVariables, ExistsRemovesBoundVariable) {
  const Formula phi = Formula::exists(v("x"), Formula::equality(v("x"), v("y")));
  const FreeSet expected = {v("y")};
  EXPECT_EQ(free_variables(phi), expected);
}

TEST(Subformulae, InstancesAreDistinct) {
  const auto subs = subformulae(Formula::conjunction(P("x"), P("x")));
  ASSERT_EQ(subs.size(), 3u);
  EXPECT_NE(subs[1].first, subs[2].first);
  EXPECT_EQ(subs[1].second, subs[2].second);
}

TEST(Subformulae, AtomIsItsOnlySubformula) { EXPECT_EQ(subformulae(P("x")).size(), 1u); }

TEST(Subformulae, LabeledConjunctionHasFour) {
  const Formula phi = Formula::labeled(LoopLabel{1}, Formula::conjunction(P("x"), loop(1)));
  const auto subs = subformulae(phi);
  ASSERT_EQ(subs.size(), 4u);
  EXPECT_EQ(subs[0].second.kind(), FormulaKind::Labeled);
  EXPECT_EQ(subs[1].second.kind(), FormulaKind::And);
  EXPECT_EQ(subs[2].second.kind(), FormulaKind::RelationAtom);
  EXPECT_EQ(subs[3].second.kind(), FormulaKind::LoopAtom);
  for (const auto& [path, f] : subs) EXPECT_EQ(phi.at(path), f);
}

TEST(NonStandardJump, TwoSiblingLabelsOfTheSameName) {
  const Formula k = Formula::labeled(LoopLabel{2}, Formula::conjunction(P("x"), loop(2)));
  EXPECT_TRUE(has_non_standard_jump(Formula::conjunction(k, k)));
}

TEST(NonStandardJump, AtomOutsideItsLabel) {
  const Formula phi =
      Formula::conjunction(loop(2), Formula::exists(v("x"), Formula::labeled(LoopLabel{2}, P("x"))));
  EXPECT_TRUE(has_non_standard_jump(phi));
}

TEST(NonStandardJump, AtomInsideItsLabel) {
  EXPECT_FALSE(has_non_standard_jump(Formula::labeled(LoopLabel{1}, Formula::conjunction(P("x"), loop(1)))));
}

TEST(NonStandardJump, AtomWithoutAnyLabelIsStandard) { EXPECT_FALSE(has_non_standard_jump(loop(7))); }

TEST(Validate, AcceptsSentence) {
  EXPECT_FALSE(validate(Formula::exists(v("x"), Formula::equality(v("x"), v("x"))), Vocabulary{}));
}

TEST(Validate, ReportsNonStandardJump) {
  const Formula phi =
      Formula::conjunction(loop(2), Formula::exists(v("x"), Formula::labeled(LoopLabel{2}, P("x"))));
  const auto issue = validate(phi, unary_p());
  ASSERT_TRUE(issue);
  EXPECT_EQ(issue->rule, "non-standard-jump");
}

TEST(Validate, ReportsArity) {
  const auto issue = validate(Formula::relation_atom("P", {v("x"), v("y")}), unary_p());
  ASSERT_TRUE(issue);
  EXPECT_EQ(issue->rule, "arity");
}

TEST(Validate, ReportsUndeclaredSymbol) {
  const auto issue = validate(Formula::relation_atom("R", {v("x")}), unary_p());
  ASSERT_TRUE(issue);
  EXPECT_EQ(issue->rule, "undeclared-symbol");
}

TEST(Desugar, TopIsClosedDoubleNegation) {
  const Formula top = desugar(ExtendedFormula::top());
  EXPECT_TRUE(is_sentence(top));
  ASSERT_EQ(top.kind(), FormulaKind::Not);
  ASSERT_EQ(top.child().kind(), FormulaKind::Exists);
  EXPECT_EQ(top.child().child().kind(), FormulaKind::Not);
  EXPECT_EQ(top.child().child().child().kind(), FormulaKind::Equality);
}

TEST(Desugar, DisjunctionIsDeMorgan) {
  using E = ExtendedFormula;
  const Formula a = P("x"), b = Formula::equality(v("x"), v("y"));
  const Formula got = desugar(E::disjunction(E::core(a), E::core(b)));
  EXPECT_EQ(got, Formula::negation(Formula::conjunction(Formula::negation(a), Formula::negation(b))));
}

TEST(Desugar, ForallIsNotExistsNot) {
  using E = ExtendedFormula;
  const Formula got = desugar(E::forall(v("x"), E::core(P("x"))));
  EXPECT_EQ(got, Formula::negation(Formula::exists(v("x"), Formula::negation(P("x")))));
}

TEST(Desugar, ImplicationIsNotAndNot) {
  using E = ExtendedFormula;
  const Formula a = P("x"), b = P("y");
  const Formula got = desugar(E::implication(E::core(a), E::core(b)));
  EXPECT_EQ(got, Formula::negation(Formula::conjunction(a, Formula::negation(b))));
}

TEST(IsSentence, Examples) {
  EXPECT_TRUE(is_sentence(Formula::exists(v("x"), Formula::equality(v("x"), v("x")))));
  EXPECT_FALSE(is_sentence(P("x")));
}

TEST(IsSentence, CompiledMachinesAreSentences) {
  for (const char* src : {kEvenAMachine, kRightForeverMachine}) {
    const Formula phi = compile(parse_tm(src).value());
    EXPECT_TRUE(is_sentence(phi));
    EXPECT_FALSE(has_non_standard_jump(phi));
  }
}

TEST(FormulaPath, ProperPrefix) {
  const FormulaPath root;
  const FormulaPath c = root.child(0).child(1);
  EXPECT_TRUE(root.is_proper_prefix_of(c));
  EXPECT_FALSE(c.is_proper_prefix_of(c));
  EXPECT_FALSE(root.child(1).is_proper_prefix_of(c));
}
