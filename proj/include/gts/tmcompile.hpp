#pragma once

// Compiles a Turing machine TM over Σ into a sentence φ_TM of 𝓛(𝓜(Σ)) whose
// semantic game on a word model replays the run of TM, and turns halting
// runs into checkable winning strategies.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gts/ast.hpp"
#include "gts/game.hpp"
#include "gts/solver.hpp"
#include "gts/structure.hpp"
#include "gts/tm.hpp"

namespace gts {

namespace tmvars {
inline const VariableId kState{"ystate"};
inline const VariableId kHead1{"xhead1"};
inline const VariableId kHead2{"xhead2"};
inline const VariableId kHead{"yhead"};
inline const VariableId kHeadTag1{"yhead1"};
inline const VariableId kHeadTag2{"yhead2"};
inline VariableId state_var(const std::string& q) { return {"xq_" + q}; }
/// Compiler temporaries live in the `_g` namespace so they never capture the
/// fixed variables above.
inline VariableId temp(int i) { return {"_g" + std::to_string(i)}; }
}  // namespace tmvars

inline constexpr std::uint64_t kTmLoopLabel = 1;

/// Name of the unary relation variable standing for work symbol s ∉ Σ.
inline std::string tape_variable(const std::string& symbol) { return "X" + symbol; }

/// φ_TM. Throws std::invalid_argument when tm.check() fails.
Formula compile(const TuringMachine& tm);

/// Σ with one letter predicate per input symbol and Succ.
inline Vocabulary tm_vocabulary(const TuringMachine& tm) {
  return word_vocabulary(tm.input_alphabet);
}

inline Structure tm_word_model(const TuringMachine& tm, const std::vector<std::string>& word) {
  return word_model(WordSpec{tm.input_alphabet, word});
}

struct Certificate {
  Strategy strategy;
  Sign sign = Sign::Plus;
  std::size_t bound = 0;
  RunResult run;
  VerifyResult verification;
};

struct CertificateOptions {
  std::size_t horizon = 24;  // look-ahead used to rank the owner's moves
  std::size_t run_budget = 10000;
};

/// Builds a strategy for the owner in the game on 𝓜(w) with the given sign
/// by steering along the run of TM and answering every opponent move, then
/// replays it with verify_strategy. Returns nullopt when exploration exceeds
/// `max_rounds` or runs into a position without an acceptable move.
std::optional<Certificate> build_certificate(const TuringMachine& tm, const Formula& phi,
                                             const std::vector<std::string>& word, Sign sign,
                                             std::size_t max_rounds,
                                             const CertificateOptions& options = {});

/// Simulates first; on Accept certifies sign +, on Reject sign −, both with
/// ∃ as owner. nullopt on ExhaustedBudget or when certification fails.
std::optional<Certificate> emit_certificate(const TuringMachine& tm,
                                            const std::vector<std::string>& word,
                                            std::size_t budget,
                                            const CertificateOptions& options = {});

/// Round bound used for certificates of runs of `steps` transitions.
std::size_t certificate_round_bound(const TuringMachine& tm, std::size_t steps);

/// Runs tm on enc(s) under the given orders. tm must read {0,1}.
RunResult classify(const TuringMachine& tm, const Structure& s,
                   const std::vector<ElementId>& element_order,
                   const std::vector<std::string>& symbol_order, std::size_t budget);

/// Splits "a,b,b" into letters, or "abb" into one letter per character.
inline std::vector<std::string> split_word(const std::string& text) {
  std::vector<std::string> out;
  if (text.find(',') != std::string::npos) {
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  }
  for (char c : text) out.emplace_back(1, c);
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

inline Formula conj(std::vector<Formula> parts) {
  Formula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Formula::conjunction(parts[i], acc);
  return acc;
}

inline Formula eq(const VariableId& a, const VariableId& b) { return Formula::equality(a, b); }

class TmCompiler {
 public:
  explicit TmCompiler(const TuringMachine& tm) : tm_(tm) {}

  Formula build() const {
    using namespace tmvars;
    Formula body = tm_.is_final(tm_.start)
                       ? (tm_.accepting.contains(tm_.start) ? top_formula() : bottom_formula())
                       : instructions();
    // The starting cell is the Succ-minimal element of the word model. The
    // points inserted by the prefix are Succ-minimal as well, so they are
    // excluded by name.
    std::vector<Formula> start = {eq(kState, state_var(tm_.start)), eq(kHead, kHeadTag1),
                                  Formula::negation(Formula::exists(
                                      temp(0), Formula::relation_atom(kSuccessor, {temp(0), kHead1})))};
    start.push_back(Formula::negation(eq(kHead1, kHeadTag1)));
    start.push_back(Formula::negation(eq(kHead1, kHeadTag2)));
    for (const auto& q : tm_.states) start.push_back(Formula::negation(eq(kHead1, state_var(q))));
    Formula initial = conj(std::move(start));
    Formula phi = Formula::conjunction(initial, Formula::labeled(LoopLabel{kTmLoopLabel}, body));
    for (const auto& v : {kState, kHead2, kHead1, kHead}) phi = Formula::exists(v, phi);
    for (auto it = tm_.states.rbegin(); it != tm_.states.rend(); ++it)
      phi = Formula::insert_point(state_var(*it), phi);
    phi = Formula::insert_point(kHeadTag2, phi);
    phi = Formula::insert_point(kHeadTag1, phi);
    for (auto it = tm_.tape_alphabet.rbegin(); it != tm_.tape_alphabet.rend(); ++it)
      phi = Formula::delete_variable(tape_variable(*it), {temp(6)}, phi);
    return phi;
  }

 private:
  bool is_blank(const std::string& s) const { return s == tm_.blank; }

  // The atom saying that cell v holds symbol s.
  Formula symbol_atom(const std::string& s, const VariableId& v) const {
    if (tm_.is_input_symbol(s)) return Formula::relation_atom(letter_predicate(s), {v});
    return Formula::variable_atom(tape_variable(s), {v});
  }

  Formula symbol_holds(const std::string& s, const VariableId& v) const {
    if (!is_blank(s)) return symbol_atom(s, v);
    std::vector<Formula> none;
    for (const auto& t : tm_.input_alphabet) none.push_back(Formula::negation(symbol_atom(t, v)));
    for (const auto& t : tm_.tape_alphabet) none.push_back(Formula::negation(symbol_atom(t, v)));
    return conj(std::move(none));
  }

  Formula instructions() const {
    std::vector<Formula> parts;
    for (const auto& q : tm_.states) {
      if (tm_.is_final(q)) continue;
      for (const auto& s : tm_.all_symbols()) {
        const Transition* t = tm_.find(q, s);
        parts.push_back(t ? instruction(q, s, *t) : stuck(q, s));
      }
    }
    return conj(std::move(parts));
  }

  Formula guard(const std::string& q, const std::string& s) const {
    using namespace tmvars;
    return Formula::conjunction(
        eq(kState, state_var(q)),
        Formula::conjunction(implication(eq(kHead, kHeadTag1), symbol_holds(s, kHead1)),
                             implication(eq(kHead, kHeadTag2), symbol_holds(s, kHead2))));
  }

  // A non-final state with no transition for s halts and rejects.
  Formula stuck(const std::string& q, const std::string& s) const {
    return implication(guard(q, s), bottom_formula());
  }

  Formula instruction(const std::string& q, const std::string& s, const Transition& t) const {
    using namespace tmvars;
    Formula beta =
        Formula::conjunction(implication(eq(kHead, kHeadTag1), chi(1, s, t)),
                             implication(eq(kHead, kHeadTag2), chi(2, s, t)));
    return implication(guard(q, s), beta);
  }

  Formula continuation(const std::string& next) const {
    if (tm_.accepting.contains(next)) return top_formula();
    if (tm_.rejecting.contains(next)) return bottom_formula();
    return Formula::loop_atom(LoopLabel{kTmLoopLabel});
  }

  // χ_h: the head is tracked by xhead_h; the new head position goes to the
  // other head variable.
  Formula chi(int h, const std::string& s, const Transition& t) const {
    using namespace tmvars;
    const VariableId& here = h == 1 ? kHead1 : kHead2;
    const VariableId& there = h == 1 ? kHead2 : kHead1;
    const VariableId& there_tag = h == 1 ? kHeadTag2 : kHeadTag1;
    const VariableId x = temp(1), y = temp(2), z = temp(3), u = temp(4), v = temp(5);
    const bool right = t.move == Direction::Right;

    auto step = [&](std::vector<Formula> extra, bool grow) {
      std::vector<Formula> parts;
      if (!is_blank(s)) parts.push_back(eq(x, here));
      if (!is_blank(t.write)) parts.push_back(eq(y, here));
      parts.push_back(eq(kHead, there_tag));
      parts.push_back(eq(kState, state_var(t.next)));
      for (auto& f : extra) parts.push_back(std::move(f));
      parts.push_back(continuation(t.next));
      Formula f = conj(std::move(parts));
      for (const auto& w : {kState, kHead, there}) f = Formula::exists(w, f);
      if (grow) {
        f = Formula::insert_relation(kSuccessor, {u, v}, f);
        f = Formula::insert_point(z, f);
      }
      if (!is_blank(t.write)) f = write(t.write, y, true, f);
      if (!is_blank(s)) f = write(s, x, false, f);
      return f;
    };

    const Formula alpha =
        right ? Formula::exists(temp(0), Formula::relation_atom(kSuccessor, {here, temp(0)}))
              : Formula::exists(temp(0), Formula::relation_atom(kSuccessor, {temp(0), here}));
    const Formula near =
        right ? step({Formula::relation_atom(kSuccessor, {here, there})}, false)
              : step({Formula::relation_atom(kSuccessor, {there, here})}, false);
    // Without a successor a fresh cell is appended; without a predecessor
    // the head stays on cell 0.
    const Formula far =
        right ? step({Formula::relation_atom(kSuccessor, {here, there}), eq(u, here), eq(v, z)},
                     true)
              : step({eq(there, here)}, false);
    return Formula::conjunction(implication(alpha, near),
                                implication(Formula::negation(alpha), far));
  }

  Formula write(const std::string& symbol, const VariableId& v, bool insert, Formula body) const {
    if (tm_.is_input_symbol(symbol)) {
      return insert ? Formula::insert_relation(letter_predicate(symbol), {v}, body)
                    : Formula::delete_relation(letter_predicate(symbol), {v}, body);
    }
    return insert ? Formula::insert_variable(tape_variable(symbol), {v}, body)
                  : Formula::delete_variable(tape_variable(symbol), {v}, body);
  }

  const TuringMachine& tm_;
};

}  // namespace detail

inline Formula compile(const TuringMachine& tm) {
  if (auto problem = tm.check()) throw std::invalid_argument("invalid machine: " + *problem);
  return detail::TmCompiler(tm).build();
}

inline std::size_t certificate_round_bound(const TuringMachine& tm, std::size_t steps) {
  const std::size_t per_step = 2 * tm.states.size() * tm.all_symbols().size() + 96;
  return (steps + 2) * per_step + 64;
}

inline std::optional<Certificate> build_certificate(const TuringMachine& tm, const Formula& phi,
                                                    const std::vector<std::string>& word,
                                                    Sign sign, std::size_t max_rounds,
                                                    const CertificateOptions& options) {
  const Player owner = Player::Verifier;
  Game game(phi);
  Solver solver(game);
  const Position start = game.initial_position(tm_word_model(tm, word), Assignment{}, sign);

  // Owner's choice: a statically won child, else a child the opponent cannot
  // beat within the horizon, preferring one the owner provably wins.
  auto choose = [&](const Position& p) -> std::optional<Move> {
    auto moves = game.legal_moves(p);
    std::optional<Move> fallback;
    for (const auto& m : moves) {
      auto child = game.apply_move(p, m);
      auto status = game.terminal_status(child);
      if (!status.ongoing()) {
        if (*status.winner == owner) return m;
        continue;
      }
      auto s = game.static_outcome(child);
      if (s.for_player(owner)) return m;
    }
    for (const auto& m : moves) {
      auto child = game.apply_move(p, m);
      auto status = game.terminal_status(child);
      if (!status.ongoing()) continue;
      if (game.static_outcome(child).for_player(opponent(owner))) continue;
      if (solver.wins(child, opponent(owner), options.horizon)) continue;
      if (solver.wins(child, owner, options.horizon)) return m;
      if (!fallback) fallback = m;
    }
    return fallback;
  };

  Certificate cert;
  cert.sign = sign;
  cert.strategy.owner = owner;
  std::unordered_set<std::string> seen;
  std::vector<std::pair<Position, std::size_t>> work{{start, 0}};
  while (!work.empty()) {
    auto [p, rounds] = std::move(work.back());
    work.pop_back();
    if (!game.terminal_status(p).ongoing()) continue;
    if (rounds >= max_rounds) return std::nullopt;
    if (game.static_outcome(p).for_player(owner)) continue;
    auto key = game.canonical(p);
    if (!seen.insert(key).second) continue;
    if (game.mover(p) == owner) {
      auto m = choose(p);
      if (!m) return std::nullopt;
      work.emplace_back(game.apply_move(p, *m), rounds + 1);
      cert.strategy.moves.emplace(std::move(key), std::move(*m));
    } else {
      for (const auto& m : game.legal_moves(p)) work.emplace_back(game.apply_move(p, m), rounds + 1);
    }
  }
  cert.verification = verify_strategy(game, start, cert.strategy, max_rounds, true);
  cert.bound = cert.verification.bound;
  return cert;
}

inline std::optional<Certificate> emit_certificate(const TuringMachine& tm,
                                                   const std::vector<std::string>& word,
                                                   std::size_t budget,
                                                   const CertificateOptions& options) {
  RunResult run = simulate(tm, word, budget);
  if (run.outcome == RunOutcome::ExhaustedBudget) return std::nullopt;
  const Sign sign = run.outcome == RunOutcome::Accept ? Sign::Plus : Sign::Minus;
  auto cert = build_certificate(tm, compile(tm), word, sign,
                                certificate_round_bound(tm, run.steps), options);
  if (!cert || !cert->verification.verified) return std::nullopt;
  cert->run = std::move(run);
  return cert;
}

inline RunResult classify(const TuringMachine& tm, const Structure& s,
                          const std::vector<ElementId>& element_order,
                          const std::vector<std::string>& symbol_order, std::size_t budget) {
  std::vector<std::string> word;
  for (char c : encode(s, element_order, symbol_order)) word.emplace_back(1, c);
  return simulate(tm, word, budget);
}

}  // namespace gts
