#pragma once

// Seeded generators for property tests: random sentences of the first-order
// fragment, with generalized quantifiers, or with one loop label, and random
// finite structures.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gts/ast.hpp"
#include "gts/structure.hpp"

namespace gts {

enum class SentenceFamily { FirstOrder, WithQuantifiers, WithLoops };

struct SentenceShape {
  SentenceFamily family = SentenceFamily::FirstOrder;
  std::size_t max_depth = 3;
  std::vector<RelationSymbol> symbols = {{"P", 1}, {"R", 2}};
  std::vector<std::string> quantifiers = {"exists", "forall", "even", "majority"};
  std::size_t variables = 3;
};

class RandomSentences {
 public:
  explicit RandomSentences(std::uint64_t seed, SentenceShape shape = {})
      : rng_(seed), shape_(std::move(shape)) {}

  Formula next() {
    labeled_open_ = false;
    label_used_ = false;
    return desugar(gen(shape_.max_depth, {}));
  }

 private:
  using E = ExtendedFormula;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  VariableId fresh_name() { return VariableId{"x" + std::to_string(pick(shape_.variables))}; }

  E atom(const std::vector<VariableId>& scope) {
    if (shape_.family == SentenceFamily::WithLoops && labeled_open_ && coin(0.25))
      return E::core(Formula::loop_atom(LoopLabel{1}));
    const std::size_t choice = pick(shape_.symbols.size() + 1);
    if (choice == shape_.symbols.size())
      return E::core(Formula::equality(scope[pick(scope.size())], scope[pick(scope.size())]));
    const auto& sym = shape_.symbols[choice];
    std::vector<VariableId> args;
    for (std::size_t i = 0; i < sym.arity; ++i) args.push_back(scope[pick(scope.size())]);
    return E::core(Formula::relation_atom(sym.name, args));
  }

  E gen(std::size_t depth, std::vector<VariableId> scope) {
    if (depth == 0) {
      if (scope.empty()) return coin(0.5) ? E::top() : E::bottom();
      return atom(scope);
    }
    if (!scope.empty() && coin(0.2)) return atom(scope);
    std::vector<int> ops = {0, 1, 2, 3, 4, 5, 6};  // ¬ ∧ ∨ → ∃ ∀ and a family extra
    if (scope.empty()) ops = {4, 5, 6};
    const int op = ops[pick(ops.size())];
    switch (op) {
      case 0: return E::negation(gen(depth - 1, scope));
      case 1: return E::conjunction(gen(depth - 1, scope), gen(depth - 1, scope));
      case 2: return E::disjunction(gen(depth - 1, scope), gen(depth - 1, scope));
      case 3: return E::implication(gen(depth - 1, scope), gen(depth - 1, scope));
      case 4:
      case 5: {
        VariableId x = fresh_name();
        scope.push_back(x);
        E body = gen(depth - 1, scope);
        return op == 4 ? E::binder(Formula::exists(x, placeholder()), body) : E::forall(x, body);
      }
      default: return extra(depth, scope);
    }
  }

  E extra(std::size_t depth, std::vector<VariableId> scope) {
    switch (shape_.family) {
      case SentenceFamily::FirstOrder: {
        VariableId x = fresh_name();
        scope.push_back(x);
        return E::binder(Formula::exists(x, placeholder()), gen(depth - 1, scope));
      }
      case SentenceFamily::WithQuantifiers: {
        VariableId x = fresh_name();
        scope.push_back(x);
        const auto& q = shape_.quantifiers[pick(shape_.quantifiers.size())];
        return E::binder(Formula::quantified(q, x, placeholder()), gen(depth - 1, scope));
      }
      case SentenceFamily::WithLoops: break;
    }
    if (!label_used_) {
      label_used_ = true;
      labeled_open_ = true;
      E body = gen(depth - 1, scope);
      labeled_open_ = false;
      return E::binder(Formula::labeled(LoopLabel{1}, placeholder()), body);
    }
    VariableId x = fresh_name();
    scope.push_back(x);
    const auto& sym = shape_.symbols[pick(shape_.symbols.size())];
    switch (pick(3)) {
      case 0:
        return E::binder(Formula::insert_point(x, placeholder()), gen(depth - 1, scope));
      case 1: {
        std::vector<VariableId> args(sym.arity, x);
        if (sym.arity > 1) args[0] = scope[pick(scope.size())];
        for (const auto& a : args)
          if (std::find(scope.begin(), scope.end(), a) == scope.end()) scope.push_back(a);
        return E::binder(Formula::insert_relation(sym.name, args, placeholder()),
                         gen(depth - 1, scope));
      }
      default: {
        std::vector<VariableId> args(sym.arity, x);
        return E::binder(Formula::delete_relation(sym.name, args, placeholder()),
                         gen(depth - 1, scope));
      }
    }
  }

  static Formula placeholder() {
    static const Formula f = Formula::equality(VariableId{"_"}, VariableId{"_"});
    return f;
  }

  std::mt19937_64 rng_;
  SentenceShape shape_;
  bool labeled_open_ = false;
  bool label_used_ = false;
};

/// A structure with domain 0..n-1 over `symbols`, each tuple present with
/// probability 1/2.
inline Structure random_structure(std::mt19937_64& rng, std::size_t n,
                                  const std::vector<RelationSymbol>& symbols) {
  Structure s(n);
  std::bernoulli_distribution coin(0.5);
  for (const auto& sym : symbols) {
    s.declare(sym);
    std::vector<Tuple> tuples;
    detail::for_each_tuple(s.domain(), sym.arity, [&](const Tuple& t) {
      if (coin(rng)) tuples.push_back(t);
    });
    s.set_relation(sym.name, Relation(sym.arity, std::move(tuples)));
  }
  return s;
}

/// Every structure with domain 0..n-1 over `symbols`, in a fixed order.
/// Feasible only for tiny n and arities.
inline std::vector<Structure> all_structures(std::size_t n, const std::vector<RelationSymbol>& symbols) {
  std::vector<std::size_t> sizes;
  std::size_t bits = 0;
  for (const auto& sym : symbols) {
    std::size_t k = 1;
    for (std::size_t i = 0; i < sym.arity; ++i) k *= n;
    sizes.push_back(k);
    bits += k;
  }
  std::vector<Structure> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    Structure s(n);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < symbols.size(); ++j) {
      s.declare(symbols[j]);
      std::vector<Tuple> tuples;
      std::size_t idx = 0;
      detail::for_each_tuple(s.domain(), symbols[j].arity, [&](const Tuple& t) {
        if (mask & (std::uint64_t{1} << (offset + idx))) tuples.push_back(t);
        ++idx;
      });
      offset += sizes[j];
      s.set_relation(symbols[j].name, Relation(symbols[j].arity, std::move(tuples)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gts
