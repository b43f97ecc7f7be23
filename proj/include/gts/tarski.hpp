#pragma once

// Classical Tarski evaluation for the first-order fragment (atoms other than
// loop atoms, ¬, ∧, ∃) and its extension by generalized quantifiers. This
// code shares nothing with the game engine and serves as its oracle.

#include <string>

#include "gts/ast.hpp"
#include "gts/quantifier.hpp"
#include "gts/structure.hpp"

namespace gts {

class NotFirstOrderError : public EvalError {
 public:
  using EvalError::EvalError;
};

/// 𝔄, f ⊨ φ for φ in the first-order fragment.
bool eval_fo_tarski(const Structure& a, const Assignment& f, const Formula& phi);

/// 𝔄, f ⊨ φ for first-order formulas extended by Q̂x φ.
bool tarski_q_eval(const Structure& a, const Assignment& f, const Formula& phi,
                   const QuantifierRegistry& registry, std::size_t cap = kDefaultQuantifierCap);

// ---------------------------------------------------------------------------

namespace detail {

inline ElementId tarski_lookup(const Assignment& f, const VariableId& x) {
  auto v = f.get(x);
  if (!v) throw EvalError("variable " + x.name + " is unassigned");
  return *v;
}

inline bool tarski(const Structure& a, const Assignment& f, const Formula& phi,
                   const QuantifierRegistry* registry, std::size_t cap) {
  switch (phi.kind()) {
    case FormulaKind::RelationAtom: {
      Tuple t;
      for (const auto& x : phi.variables()) t.push_back(tarski_lookup(f, x));
      return a.relation(phi.name()).contains(t);
    }
    case FormulaKind::VariableAtom: {
      Tuple t;
      for (const auto& x : phi.variables()) t.push_back(tarski_lookup(f, x));
      const Relation* value = f.get(phi.relation_variable());
      return value && value->contains(t);
    }
    case FormulaKind::Equality:
      return tarski_lookup(f, phi.variables()[0]) == tarski_lookup(f, phi.variables()[1]);
    case FormulaKind::Not:
      return !tarski(a, f, phi.child(), registry, cap);
    case FormulaKind::And:
      return tarski(a, f, phi.child(0), registry, cap) && tarski(a, f, phi.child(1), registry, cap);
    case FormulaKind::Exists:
      for (auto e : a.domain())
        if (tarski(a, f.with(phi.variable(), e), phi.child(), registry, cap)) return true;
      return false;
    case FormulaKind::Quantified: {
      if (!registry) break;
      const auto& q = registry->at(phi.name());
      if (a.size() > cap)
        throw QuantifierCapError("domain of size " + std::to_string(a.size()) +
                                 " exceeds the quantifier cap");
      std::size_t witnesses = 0;
      for (auto e : a.domain())
        if (tarski(a, f.with(phi.variable(), e), phi.child(), registry, cap)) ++witnesses;
      return q.membership(a.size(), witnesses);
    }
    default:
      break;
  }
  throw NotFirstOrderError(std::string("not in the first-order fragment: ") +
                           kind_name(phi.kind()));
}

}  // namespace detail

inline bool eval_fo_tarski(const Structure& a, const Assignment& f, const Formula& phi) {
  return detail::tarski(a, f, phi, nullptr, 0);
}

inline bool tarski_q_eval(const Structure& a, const Assignment& f, const Formula& phi,
                          const QuantifierRegistry& registry, std::size_t cap) {
  return detail::tarski(a, f, phi, &registry, cap);
}

}  // namespace gts
