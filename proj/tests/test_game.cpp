#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "gts/game.hpp"
#include "gts/parser.hpp"
#include "gts/random.hpp"

using namespace gts;

namespace {

VariableId v(const char* n) { return VariableId{n}; }
Formula P(const char* x) { return Formula::relation_atom("P", {v(x)}); }

Vocabulary sigma_pr() {
  Vocabulary s;
  s.add({"P", 1});
  s.add({"R", 2});
  return s;
}

Formula loop_or_p() { return parse_formula("#1{ (P(x) | #1) }", sigma_pr()).value(); }

Structure one_point(bool in_p) {
  Structure a(1);
  a.declare({"P", 1});
  if (in_p) a.add_tuple("P", make_tuple({0}));
  return a;
}

Assignment x_is(std::uint32_t i) {
  Assignment f;
  f.set(v("x"), ElementId{i});
  return f;
}

Position at(const Game& g, const Position& root, FormulaPath path) {
  Position p = root;
  p.at = g.find(path).value();
  return p;
}

FormulaPath path(std::initializer_list<std::uint32_t> steps) { return FormulaPath{steps}; }

// Plain bounded minimax straight from the play rules, no shortcuts.
bool brute_wins(const Game& g, const Position& p, Player who, std::size_t d) {
  const auto status = g.terminal_status(p);
  if (!status.ongoing()) return *status.winner == who;
  if (d == 0) return false;
  const auto mover = g.mover(p);
  const bool mine = !mover || *mover == who;
  for (const auto& m : g.legal_moves(p)) {
    const bool w = brute_wins(g, g.apply_move(p, m), who, d - 1);
    if (mine && w) return true;
    if (!mine && !w) return false;
  }
  return !mine;
}

}  // namespace

TEST(InitialPosition, SentenceWithEmptyAssignment) {
  const Game g(Formula::exists(v("x"), P("x")));
  const Position p = g.initial_position(one_point(true), Assignment{}, Sign::Plus);
  EXPECT_EQ(p.at, 0u);
  EXPECT_EQ(p.sign, Sign::Plus);
}

TEST(InitialPosition, OpenFormulaWithAssignment) {
  const Game g(P("x"));
  EXPECT_EQ(g.initial_position(one_point(true), x_is(0), Sign::Minus).at, 0u);
}

TEST(InitialPosition, MissingBindingThrows) {
  const Game g(P("x"));
  EXPECT_THROW(g.initial_position(one_point(true), Assignment{}, Sign::Plus), EvalError);
  EXPECT_THROW(g.initial_position(one_point(true), x_is(4), Sign::Plus), EvalError);
}

TEST(Mover, ConjunctionUnderPlusIsFalsifier) {
  const Game g(Formula::conjunction(P("x"), P("x")));
  EXPECT_EQ(g.mover(g.initial_position(one_point(true), x_is(0), Sign::Plus)), Player::Falsifier);
  EXPECT_EQ(g.mover(g.initial_position(one_point(true), x_is(0), Sign::Minus)), Player::Verifier);
}

TEST(Mover, ExistsUnderMinusIsFalsifier) {
  const Game g(Formula::exists(v("x"), P("x")));
  EXPECT_EQ(g.mover(g.initial_position(one_point(true), Assignment{}, Sign::Minus)), Player::Falsifier);
}

TEST(Mover, InsertPointIsForced) {
  const Game g(Formula::insert_point(v("x"), P("x")));
  EXPECT_FALSE(g.mover(g.initial_position(one_point(true), Assignment{}, Sign::Plus)));
}

TEST(LegalMoves, ExistsOverThreeElements) {
  const Game g(Formula::exists(v("x"), Formula::equality(v("x"), v("x"))));
  EXPECT_EQ(g.legal_moves(g.initial_position(Structure(3), Assignment{}, Sign::Plus)).size(), 3u);
}

TEST(LegalMoves, InsertBinaryTupleOverTwoElements) {
  Structure a(2);
  a.declare({"R", 2});
  const Game g(Formula::insert_relation("R", {v("x"), v("y")}, Formula::relation_atom("R", {v("x"), v("y")})));
  const auto moves = g.legal_moves(g.initial_position(a, Assignment{}, Sign::Plus));
  EXPECT_EQ(moves.size(), 4u);
  for (const auto& m : moves) EXPECT_TRUE(std::holds_alternative<move::PickTuple>(m));
}

TEST(LegalMoves, LoopAtomHasOneJump) {
  const Game g(loop_or_p());
  const Position root = g.initial_position(one_point(false), x_is(0), Sign::Plus);
  const auto moves = g.legal_moves(at(g, root, path({0, 0, 1, 0})));
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(std::get<move::JumpTo>(moves[0]).target, 0u);
}

TEST(LegalMoves, TerminalHasNone) {
  const Game g(P("x"));
  EXPECT_TRUE(g.legal_moves(g.initial_position(one_point(true), x_is(0), Sign::Plus)).empty());
}

TEST(ApplyMove, NegationFlipsSign) {
  const Game g(Formula::negation(P("x")));
  const Position p = g.initial_position(one_point(true), x_is(0), Sign::Plus);
  const Position q = g.apply_move(p, move::Forced{});
  EXPECT_EQ(q.sign, Sign::Minus);
  EXPECT_EQ(g.formula_at(q.at), P("x"));
}

TEST(ApplyMove, InsertPointAddsFreshElement) {
  const Game g(Formula::insert_point(v("x"), P("x")));
  const Position q = g.apply_move(g.initial_position(one_point(true), Assignment{}, Sign::Plus), move::Forced{});
  EXPECT_EQ(q.structure.domain(), (std::vector<ElementId>{ElementId{0}, ElementId{1}}));
  EXPECT_EQ(q.assignment.get(v("x")), ElementId{1});
  EXPECT_EQ(q.sign, Sign::Plus);
}

TEST(ApplyMove, JumpReturnsToLabelWithSameAssignment) {
  const Game g(loop_or_p());
  const Position root = g.initial_position(one_point(false), x_is(0), Sign::Plus);
  Position p = at(g, root, path({0, 0, 1, 0}));
  p.sign = Sign::Plus;
  const Position q = g.apply_move(p, move::JumpTo{0});
  EXPECT_EQ(q.at, 0u);
  EXPECT_EQ(q.assignment, root.assignment);
  EXPECT_EQ(q.structure, root.structure);
}

TEST(ApplyMove, IllegalMoveThrows) {
  const Game g(Formula::exists(v("x"), P("x")));
  const Position p = g.initial_position(one_point(true), Assignment{}, Sign::Plus);
  EXPECT_THROW(g.apply_move(p, move::PickElement{ElementId{5}}), std::invalid_argument);
  EXPECT_THROW(g.apply_move(p, move::PickConjunct{0}), std::invalid_argument);
}

TEST(ApplyMove, InsertVariableStartsFromEmptyRelation) {
  const Formula phi = Formula::insert_variable("X", {v("x")}, Formula::variable_atom("X", {v("x")}));
  const Game g(phi);
  const Position p = g.initial_position(Structure(2), Assignment{}, Sign::Plus);
  const Position q = g.apply_move(p, move::PickTuple{make_tuple({1})});
  const Relation* X = q.assignment.get(RelationVariable{"X", 1});
  ASSERT_NE(X, nullptr);
  EXPECT_EQ(X->tuples(), (std::vector<Tuple>{make_tuple({1})}));
  EXPECT_EQ(g.terminal_status(q).winner, Player::Verifier);
}

TEST(TerminalStatus, AtomUnderPlus) {
  const Game g(P("x"));
  EXPECT_EQ(g.terminal_status(g.initial_position(one_point(true), x_is(0), Sign::Plus)).winner, Player::Verifier);
  EXPECT_EQ(g.terminal_status(g.initial_position(one_point(false), x_is(0), Sign::Plus)).winner, Player::Falsifier);
}

TEST(TerminalStatus, AtomUnderMinus) {
  const Game g(P("x"));
  EXPECT_EQ(g.terminal_status(g.initial_position(one_point(true), x_is(0), Sign::Minus)).winner, Player::Falsifier);
}

TEST(TerminalStatus, UnmatchedLoopAtom) {
  const Game g(Formula::loop_atom(LoopLabel{7}));
  EXPECT_EQ(g.terminal_status(g.initial_position(Structure(1), Assignment{}, Sign::Plus)).winner, Player::Falsifier);
  EXPECT_EQ(g.terminal_status(g.initial_position(Structure(1), Assignment{}, Sign::Minus)).winner, Player::Verifier);
}

TEST(TerminalStatus, InnerNodesAreOngoing) {
  const Game g(loop_or_p());
  EXPECT_TRUE(g.terminal_status(g.initial_position(one_point(false), x_is(0), Sign::Plus)).ongoing());
}

TEST(AtomicEval, Equality) {
  Assignment f = x_is(0);
  f.set(v("y"), ElementId{0});
  EXPECT_TRUE(atomic_eval(Structure(1), f, Formula::equality(v("x"), v("y"))));
}

TEST(AtomicEval, UnassignedRelationVariableIsEmpty) {
  EXPECT_FALSE(atomic_eval(Structure(1), x_is(0), Formula::variable_atom("X", {v("x")})));
}

TEST(AtomicEval, MissingTuple) {
  Structure a(2);
  a.declare({"R", 2});
  a.add_tuple("R", make_tuple({1, 0}));
  Assignment f = x_is(0);
  f.set(v("y"), ElementId{1});
  EXPECT_FALSE(atomic_eval(a, f, Formula::relation_atom("R", {v("x"), v("y")})));
  EXPECT_TRUE(atomic_eval(a, f, Formula::relation_atom("R", {v("y"), v("x")})));
}

TEST(Canonical, DistinguishesPositions) {
  const Game g(Formula::exists(v("x"), P("x")));
  const Position p = g.initial_position(Structure(2), Assignment{}, Sign::Plus);
  const auto moves = g.legal_moves(p);
  const Position a = g.apply_move(p, moves[0]), b = g.apply_move(p, moves[1]);
  EXPECT_NE(g.canonical(a), g.canonical(b));
  EXPECT_NE(g.canonical(p), g.canonical(a));
  Position flipped = p;
  flipped.sign = Sign::Minus;
  EXPECT_NE(g.canonical(p), g.canonical(flipped));
  EXPECT_EQ(g.canonical(p), g.canonical(g.initial_position(Structure(2), Assignment{}, Sign::Plus)));
}

TEST(GameInvariants, ReachablePositionsAreConsistent) {
  RandomSentences gen(41, SentenceShape{SentenceFamily::WithLoops});
  std::mt19937_64 rng(42);
  for (int i = 0; i < 60; ++i) {
    const Game g(gen.next());
    std::deque<Position> todo{g.initial_position(random_structure(rng, 2, {{"P", 1}, {"R", 2}}), {}, Sign::Plus)};
    std::set<std::string> seen;
    while (!todo.empty() && seen.size() < 400) {
      const Position p = todo.front();
      todo.pop_front();
      if (!seen.insert(g.canonical(p)).second) continue;
      const auto moves = g.legal_moves(p);
      const bool terminal = !g.terminal_status(p).ongoing();
      ASSERT_EQ(moves.empty(), terminal) << g.canonical(p);
      if (!g.mover(p)) ASSERT_LE(moves.size(), 1u);
      for (const auto& m : moves) {
        const Position q = g.apply_move(p, m);
        ASSERT_TRUE(q.structure.size() >= p.structure.size());
        todo.push_back(q);
      }
    }
  }
}

TEST(StaticOutcome, ClaimsAreBackedByBruteForce) {
  RandomSentences gen(43, SentenceShape{SentenceFamily::WithLoops});
  std::mt19937_64 rng(44);
  std::size_t claims = 0;
  for (int i = 0; i < 80; ++i) {
    const Game g(gen.next());
    for (Sign sign : {Sign::Plus, Sign::Minus}) {
      std::deque<Position> todo{
          g.initial_position(random_structure(rng, 1 + i % 2, {{"P", 1}, {"R", 2}}), {}, sign)};
      std::set<std::string> seen;
      while (!todo.empty() && seen.size() < 60) {
        const Position p = todo.front();
        todo.pop_front();
        if (!seen.insert(g.canonical(p)).second) continue;
        const StaticOutcome s = g.static_outcome(p);
        for (Player who : {Player::Verifier, Player::Falsifier})
          if (auto n = s.for_player(who); n && *n <= 10) {
            ++claims;
            ASSERT_TRUE(brute_wins(g, p, who, *n)) << g.canonical(p) << " claimed " << *n;
          }
        for (const auto& m : g.legal_moves(p)) todo.push_back(g.apply_move(p, m));
      }
    }
  }
  EXPECT_GT(claims, 100u);
}
