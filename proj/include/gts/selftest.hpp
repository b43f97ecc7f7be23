#pragma once

// The acceptance suites. Each check is self-contained and deterministic for
// a given seed; `gts selftest` and the acceptance test binary both run them.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gts/parser.hpp"
#include "gts/quantifier.hpp"
#include "gts/random.hpp"
#include "gts/solver.hpp"
#include "gts/structure.hpp"
#include "gts/tarski.hpp"
#include "gts/tmcompile.hpp"

namespace gts {

inline const char* const kEvenAMachine = R"(# even number of a's over {a,b}
states init even odd acc rej
start init
accept acc
reject rej
input_alphabet a b
tape_alphabet
blank _
trans init,_ -> even,_,R
trans init,a -> rej,a,R
trans init,b -> rej,b,R
trans even,a -> odd,a,R
trans even,b -> even,b,R
trans even,_ -> acc,_,R
trans odd,a -> even,a,R
trans odd,b -> odd,b,R
trans odd,_ -> rej,_,R
)";

inline const char* const kRightForeverMachine = R"(# walks right forever
states go
start go
input_alphabet a b
blank _
trans go,a -> go,a,R
trans go,b -> go,b,R
trans go,_ -> go,_,R
)";

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct SelftestConfig {
  std::uint64_t seed = 20240601;
  std::size_t fo_sentences = 500;
  std::size_t q_sentences = 200;
  std::size_t loop_sentences = 200;
  std::size_t structures = 200;
};

/// All words over `alphabet` of length at most `max_length`, shortest first.
inline std::vector<std::vector<std::string>> all_words(const std::vector<std::string>& alphabet,
                                                       std::size_t max_length) {
  std::vector<std::vector<std::string>> out{{}};
  std::size_t layer_begin = 0;
  for (std::size_t len = 1; len <= max_length; ++len) {
    const std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i)
      for (const auto& a : alphabet) {
        auto w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    layer_begin = layer_end;
  }
  return out;
}

inline std::string word_text(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& a : w) out += a;
  return out.empty() ? "ε" : out;
}

namespace detail {

inline const std::vector<RelationSymbol>& test_symbols() {
  static const std::vector<RelationSymbol> s = {{"P", 1}, {"R", 2}};
  return s;
}

inline Verdict evaluate_sentence(const Formula& phi, const Structure& a, Sign sign,
                                 std::size_t budget, const QuantifierRegistry* q = nullptr) {
  Game game(phi, GameOptions{q, kDefaultQuantifierCap});
  Solver solver(game);
  return solver.evaluate(game.initial_position(a, Assignment{}, sign), budget);
}

inline CriterionResult run_criterion(int id, std::string name,
                                     const std::function<std::string()>& body) {
  CriterionResult r{id, std::move(name), false, "", 0};
  const auto started = std::chrono::steady_clock::now();
  try {
    r.detail = body();
    r.passed = r.detail.rfind("ok", 0) == 0;
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

// The corpus shared by criteria 1 and 2: each sentence with two random
// models of every size 1..3.
struct FoCase {
  Formula phi;
  Structure model;
};

inline std::vector<FoCase> fo_corpus(const SelftestConfig& cfg) {
  RandomSentences gen(cfg.seed, SentenceShape{SentenceFamily::FirstOrder});
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<FoCase> out;
  for (std::size_t i = 0; i < cfg.fo_sentences; ++i) {
    Formula phi = gen.next();
    for (std::size_t n = 1; n <= 3; ++n)
      for (int k = 0; k < 2; ++k) out.push_back({phi, random_structure(rng, n, test_symbols())});
  }
  return out;
}

}  // namespace detail

inline CriterionResult criterion_fo_agreement(const SelftestConfig& cfg) {
  return detail::run_criterion(1, "FO/Tarski agreement", [&]() -> std::string {
    std::size_t checked = 0;
    for (const auto& c : detail::fo_corpus(cfg)) {
      const bool truth = eval_fo_tarski(c.model, Assignment{}, c.phi);
      const Verdict v = detail::evaluate_sentence(c.phi, c.model, Sign::Plus, 200);
      const auto expected = truth ? VerdictKind::ProvenTrue : VerdictKind::ProvenFalse;
      if (v.kind != expected)
        return "mismatch on " + pretty_print(c.phi) + ": game " + v.to_string() + ", Tarski " +
               (truth ? "true" : "false");
      ++checked;
    }
    return "ok: " + std::to_string(checked) + " sentence/model pairs agree";
  });
}

inline CriterionResult criterion_determinacy(const SelftestConfig& cfg) {
  return detail::run_criterion(2, "Determinacy and duality", [&]() -> std::string {
    std::size_t checked = 0;
    for (const auto& c : detail::fo_corpus(cfg)) {
      Game game(c.phi);
      Solver solver(game);
      const Position plus = game.initial_position(c.model, Assignment{}, Sign::Plus);
      const Position minus = game.initial_position(c.model, Assignment{}, Sign::Minus);
      const bool holds_plus = solver.evaluate(plus, 200).kind == VerdictKind::ProvenTrue;
      const bool holds_minus = solver.evaluate(minus, 200).kind == VerdictKind::ProvenTrue;
      if (holds_plus == holds_minus)
        return "not exactly one of the two turnstiles holds for " + pretty_print(c.phi);
      for (std::size_t d = 0; d <= 10; ++d) {
        auto lhs = solver.bounded_value(minus, Player::Verifier, d);
        auto rhs = solver.bounded_value(plus, Player::Falsifier, d);
        if (lhs != rhs) return "duality fails at depth " + std::to_string(d) + " for " + pretty_print(c.phi);
      }
      ++checked;
    }
    return "ok: " + std::to_string(checked) + " pairs determined, duality at depths 0..10";
  });
}

inline CriterionResult criterion_tm_equivalence(const SelftestConfig&) {
  return detail::run_criterion(3, "Turing machine equivalence", [&]() -> std::string {
    const TuringMachine tm = parse_tm(kEvenAMachine).value();
    const Formula phi = compile(tm);
    std::size_t words = 0;
    for (const auto& w : all_words(tm.input_alphabet, 4)) {
      const RunResult run = simulate(tm, w, 1000);
      if (run.outcome == RunOutcome::ExhaustedBudget) return "even-a machine diverged on " + word_text(w);
      const std::size_t rounds = certificate_round_bound(tm, run.steps);
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        auto cert = build_certificate(tm, phi, w, sign, rounds);
        const bool verified = cert && cert->verification.verified;
        const bool expected = (sign == Sign::Plus) == (run.outcome == RunOutcome::Accept);
        if (verified != expected)
          return std::string("certificate for sign ") + sign_char(sign) + " on " + word_text(w) +
                 (verified ? " verified" : " did not verify") + " but the run was " +
                 outcome_name(run.outcome);
      }
      if (w.size() <= 1) {
        const Verdict v = detail::evaluate_sentence(phi, tm_word_model(tm, w), Sign::Plus, 10000);
        const auto expected = run.outcome == RunOutcome::Accept ? VerdictKind::ProvenTrue
                                                                : VerdictKind::ProvenFalse;
        if (v.kind != expected)
          return "evaluate on " + word_text(w) + " gave " + v.to_string() + " for a run that " +
                 outcome_name(run.outcome) + "s";
      }
      ++words;
    }
    return "ok: " + std::to_string(words) + " words, certificates match runs";
  });
}

inline CriterionResult criterion_divergence(const SelftestConfig&) {
  return detail::run_criterion(4, "Divergence correspondence", [&]() -> std::string {
    const TuringMachine tm = parse_tm(kRightForeverMachine).value();
    const Formula phi = compile(tm);
    std::size_t words = 0;
    for (const auto& w : all_words(tm.input_alphabet, 2)) {
      if (simulate(tm, w, 1000).outcome != RunOutcome::ExhaustedBudget)
        return "right-forever machine halted on " + word_text(w);
      for (Sign sign : {Sign::Plus, Sign::Minus}) {
        const Verdict v = detail::evaluate_sentence(phi, tm_word_model(tm, w), sign, 500);
        if (v != Verdict::unknown(500))
          return "evaluate on " + word_text(w) + " with sign " + sign_char(sign) + " gave " + v.to_string();
      }
      ++words;
    }
    return "ok: " + std::to_string(words) + " words stay Unknown(500)";
  });
}

inline CriterionResult criterion_loop_witness(const SelftestConfig&) {
  return detail::run_criterion(5, "Indeterminate loop witness", [&]() -> std::string {
    Vocabulary sigma;
    sigma.add({"P", 1});
    const Formula phi = parse_formula("#1{ (P(x) | #1) }", sigma).value();
    Assignment f;
    f.set(VariableId{"x"}, ElementId{0});
    std::string out = "ok:";
    for (bool in_p : {false, true}) {
      Structure a(1);
      a.declare({"P", 1});
      if (in_p) a.add_tuple("P", make_tuple({0}));
      Game game(phi);
      Solver solver(game);
      const Verdict plus = solver.evaluate(game.initial_position(a, f, Sign::Plus), 100);
      const Verdict minus = solver.evaluate(game.initial_position(a, f, Sign::Minus), 100);
      const auto want_plus = in_p ? VerdictKind::ProvenTrue : VerdictKind::Unknown;
      const auto want_minus = in_p ? VerdictKind::ProvenFalse : VerdictKind::Unknown;
      if (plus.kind != want_plus || minus.kind != want_minus)
        return std::string("P ") + (in_p ? "= {a}" : "empty") + ": got " + plus.to_string() + " / " +
               minus.to_string();
      out += std::string(" P ") + (in_p ? "= {a}" : "empty") + " -> " + plus.to_string() + " / " +
             minus.to_string() + ";";
    }
    return out;
  });
}

inline CriterionResult criterion_encoding(const SelftestConfig& cfg) {
  return detail::run_criterion(6, "Encoding properties", [&]() -> std::string {
    std::mt19937_64 rng(cfg.seed + 6);
    for (std::size_t i = 0; i < cfg.structures; ++i) {
      const std::size_t n = 1 + rng() % 4;
      std::vector<RelationSymbol> symbols;
      const std::size_t p = rng() % 3;
      for (std::size_t j = 0; j < p; ++j)
        symbols.push_back({"S" + std::to_string(j), 1 + static_cast<std::size_t>(rng() % 2)});
      const Structure s = random_structure(rng, n, symbols);
      std::vector<ElementId> order = s.domain();
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::string> names;
      for (const auto& sym : symbols) names.push_back(sym.name);
      std::shuffle(names.begin(), names.end(), rng);

      const std::string bits = encode(s, order, names);
      std::size_t expected = n + 1;
      for (const auto& sym : symbols) expected += sym.arity == 1 ? n : n * n;
      if (bits.size() != expected) return "length " + std::to_string(bits.size()) + " != " + std::to_string(expected);

      // decode numbers elements by their position in `order`.
      std::vector<RelationSymbol> ordered;
      for (const auto& name : names)
        for (const auto& sym : symbols)
          if (sym.name == name) ordered.push_back(sym);
      const Structure back = decode(bits, ordered);
      Structure relabeled(n);
      for (const auto& sym : symbols) relabeled.declare(sym);
      for (const auto& sym : symbols)
        for (const auto& t : s.relation(sym.name).tuples()) {
          Tuple u;
          for (auto e : t)
            u.emplace_back(static_cast<std::uint32_t>(std::find(order.begin(), order.end(), e) - order.begin()));
          relabeled.add_tuple(sym.name, u);
        }
      if (!(back == relabeled)) return "decode(encode(s)) differs from s for structure " + std::to_string(i);
    }
    return "ok: " + std::to_string(cfg.structures) + " structures round-trip";
  });
}

inline CriterionResult criterion_quantifiers(const SelftestConfig& cfg) {
  return detail::run_criterion(7, "Quantifier game/Tarski equivalence", [&]() -> std::string {
    const QuantifierRegistry registry = builtin_quantifiers();
    RandomSentences gen(cfg.seed + 7, SentenceShape{SentenceFamily::WithQuantifiers});
    std::mt19937_64 rng(cfg.seed + 77);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < cfg.q_sentences; ++i) {
      const Formula phi = gen.next();
      for (std::size_t n = 1; n <= 4; ++n) {
        const Structure a = random_structure(rng, n, detail::test_symbols());
        const bool truth = tarski_q_eval(a, Assignment{}, phi, registry);
        const Verdict v = detail::evaluate_sentence(phi, a, Sign::Plus, 200, &registry);
        const auto expected = truth ? VerdictKind::ProvenTrue : VerdictKind::ProvenFalse;
        if (v.kind != expected)
          return "mismatch on " + pretty_print(phi) + " (|A| = " + std::to_string(n) + "): game " +
                 v.to_string() + ", Tarski " + (truth ? "true" : "false");
        ++checked;
      }
    }
    return "ok: " + std::to_string(checked) + " sentence/model pairs agree";
  });
}

inline CriterionResult criterion_monotonicity(const SelftestConfig& cfg) {
  return detail::run_criterion(8, "Depth monotonicity", [&]() -> std::string {
    RandomSentences gen(cfg.seed + 8, SentenceShape{SentenceFamily::WithLoops});
    std::mt19937_64 rng(cfg.seed + 88);
    std::size_t decided = 0;
    for (std::size_t i = 0; i < cfg.loop_sentences; ++i) {
      const Formula phi = gen.next();
      for (std::size_t n = 1; n <= 2; ++n) {
        const Structure a = random_structure(rng, n, detail::test_symbols());
        Game game(phi);
        for (Sign sign : {Sign::Plus, Sign::Minus}) {
          const Position p = game.initial_position(a, Assignment{}, sign);
          for (Player who : {Player::Verifier, Player::Falsifier}) {
            Solver solver(game, SearchOptions{.memo = false});
            BoundedValue previous = BoundedValue::Unknown;
            for (std::size_t d = 1; d <= 12; ++d) {
              const BoundedValue v = solver.bounded_value(p, who, d);
              if (previous != BoundedValue::Unknown && v != previous)
                return "value changed at depth " + std::to_string(d) + " for " + pretty_print(phi);
              if (v != BoundedValue::Unknown && previous == BoundedValue::Unknown) ++decided;
              previous = v;
            }
          }
        }
      }
    }
    return "ok: no downgrade over depths 1..12 (" + std::to_string(decided) + " decided queries)";
  });
}

inline std::vector<CriterionResult> run_selftest(const SelftestConfig& cfg = {}) {
  return {criterion_fo_agreement(cfg), criterion_determinacy(cfg), criterion_tm_equivalence(cfg),
          criterion_divergence(cfg),   criterion_loop_witness(cfg), criterion_encoding(cfg),
          criterion_quantifiers(cfg),  criterion_monotonicity(cfg)};
}

inline std::string format_result(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2fs", r.seconds);
  return std::string(r.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" +
         r.name + ", " + secs + "): " + r.detail;
}

}  // namespace gts
