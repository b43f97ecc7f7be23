#pragma once

// Abstract syntax of the looping logic: the thirteen core constructors plus
// the width-one generalized quantifier node, instance-distinct subformula
// addressing, free variables, and the non-standard-jump check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gts {

struct VariableId {
  std::string name;
  friend auto operator<=>(const VariableId&, const VariableId&) = default;
};

struct RelationSymbol {
  std::string name;
  std::size_t arity = 1;
  friend auto operator<=>(const RelationSymbol&, const RelationSymbol&) = default;
};

/// Written `$Name` in concrete syntax. Lives in a namespace disjoint from
/// relation symbols.
struct RelationVariable {
  std::string name;
  std::size_t arity = 1;
  friend auto operator<=>(const RelationVariable&, const RelationVariable&) = default;
};

struct LoopLabel {
  std::uint64_t value = 0;
  friend auto operator<=>(const LoopLabel&, const LoopLabel&) = default;
};

enum class FormulaKind : std::uint8_t {
  RelationAtom,    // R(x1..xk)
  VariableAtom,    // X(x1..xk)
  Equality,        // x = y
  LoopAtom,        // k
  Not,             // ¬φ
  And,             // (φ ∧ ψ)
  Exists,          // ∃x φ
  InsertPoint,     // Ix φ
  InsertRelation,  // I_{R x1..xk} φ
  InsertVariable,  // I_{X x1..xk} φ
  DeleteRelation,  // D_{R x1..xk} φ
  DeleteVariable,  // D_{X x1..xk} φ
  Labeled,         // k φ
  Quantified,      // Q̂x φ  (generalized quantifier extension)
};

const char* kind_name(FormulaKind k);

/// Child indices from the root. Syntactically equal subformulas at different
/// places have different paths.
struct FormulaPath {
  std::vector<std::uint32_t> steps;

  FormulaPath child(std::uint32_t i) const {
    FormulaPath p = *this;
    p.steps.push_back(i);
    return p;
  }
  /// True when `other` lies strictly below this path.
  bool is_proper_prefix_of(const FormulaPath& other) const {
    return steps.size() < other.steps.size() &&
           std::equal(steps.begin(), steps.end(), other.steps.begin());
  }
  std::string to_string() const;

  friend auto operator<=>(const FormulaPath&, const FormulaPath&) = default;
};

/// Immutable formula tree with shared subtrees. Copying is cheap.
class Formula {
 public:
  static Formula relation_atom(std::string symbol, std::vector<VariableId> args);
  static Formula variable_atom(std::string relvar, std::vector<VariableId> args);
  static Formula equality(VariableId lhs, VariableId rhs);
  static Formula loop_atom(LoopLabel label);
  static Formula negation(Formula body);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula exists(VariableId x, Formula body);
  static Formula insert_point(VariableId x, Formula body);
  static Formula insert_relation(std::string symbol, std::vector<VariableId> args, Formula body);
  static Formula insert_variable(std::string relvar, std::vector<VariableId> args, Formula body);
  static Formula delete_relation(std::string symbol, std::vector<VariableId> args, Formula body);
  static Formula delete_variable(std::string relvar, std::vector<VariableId> args, Formula body);
  static Formula labeled(LoopLabel label, Formula body);
  static Formula quantified(std::string quantifier, VariableId x, Formula body);

  FormulaKind kind() const { return node_->kind; }
  /// Relation symbol, relation variable (without `$`) or quantifier name.
  const std::string& name() const { return node_->name; }
  /// Atom arguments, the bound variable of ∃/I/Q̂, or the tuple variables of
  /// insertion and deletion operators.
  const std::vector<VariableId>& variables() const { return node_->vars; }
  const VariableId& variable() const { return node_->vars.front(); }
  LoopLabel label() const { return LoopLabel{node_->label}; }
  const std::vector<Formula>& children() const { return node_->children; }
  const Formula& child(std::size_t i = 0) const { return node_->children.at(i); }

  RelationSymbol relation_symbol() const { return {node_->name, node_->vars.size()}; }
  RelationVariable relation_variable() const { return {node_->name, node_->vars.size()}; }

  bool is_atomic() const {
    auto k = kind();
    return k == FormulaKind::RelationAtom || k == FormulaKind::VariableAtom ||
           k == FormulaKind::Equality || k == FormulaKind::LoopAtom;
  }
  bool uses_relation_symbol() const {
    auto k = kind();
    return k == FormulaKind::RelationAtom || k == FormulaKind::InsertRelation ||
           k == FormulaKind::DeleteRelation;
  }
  bool uses_relation_variable() const {
    auto k = kind();
    return k == FormulaKind::VariableAtom || k == FormulaKind::InsertVariable ||
           k == FormulaKind::DeleteVariable;
  }

  /// Address of the subformula at `path`; throws std::out_of_range.
  const Formula& at(const FormulaPath& path) const;

  std::size_t node_count() const;

  /// Pointer identity of the shared node.
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    FormulaKind kind;
    std::string name;
    std::vector<VariableId> vars;
    std::uint64_t label = 0;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(FormulaKind k, std::string name, std::vector<VariableId> vars,
                      std::uint64_t label, std::vector<Formula> children);

  std::shared_ptr<const Node> node_;
};

using FreeSymbol = std::variant<VariableId, RelationVariable>;
using FreeSet = std::set<FreeSymbol>;

FreeSet free_variables(const Formula& phi);
bool is_sentence(const Formula& phi);

/// Preorder enumeration of every subformula instance with its path.
std::vector<std::pair<FormulaPath, Formula>> subformulae(const Formula& phi);

bool has_non_standard_jump(const Formula& phi);

/// A finite relational vocabulary σ.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<RelationSymbol> symbols);

  /// Returns false when a symbol of that name already exists.
  bool add(RelationSymbol symbol);
  std::optional<RelationSymbol> find(const std::string& name) const;
  const std::vector<RelationSymbol>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<RelationSymbol> symbols_;  // sorted by name
};

struct ValidationIssue {
  FormulaPath path;
  std::string rule;  // "arity", "undeclared-symbol", "non-standard-jump", ...
  std::string message;
};

struct ValidateOptions {
  /// When set, quantifier nodes must name one of these.
  const std::set<std::string>* quantifiers = nullptr;
};

/// nullopt when φ ∈ 𝓛(σ); otherwise the first problem found.
std::optional<ValidationIssue> validate(const Formula& phi, const Vocabulary& sigma,
                                        const ValidateOptions& options = {});

/// Surface syntax with ∨, →, ∀, ⊤, ⊥ on top of the core constructors.
class ExtendedFormula {
 public:
  enum class Kind : std::uint8_t { Core, Not, And, Or, Implies, Forall, Top, Bottom, Binder };

  /// Wraps a core formula (leaf of the extended tree).
  static ExtendedFormula core(Formula f);
  static ExtendedFormula negation(ExtendedFormula f);
  static ExtendedFormula conjunction(ExtendedFormula a, ExtendedFormula b);
  static ExtendedFormula disjunction(ExtendedFormula a, ExtendedFormula b);
  static ExtendedFormula implication(ExtendedFormula a, ExtendedFormula b);
  static ExtendedFormula forall(VariableId x, ExtendedFormula body);
  static ExtendedFormula top();
  static ExtendedFormula bottom();
  /// Any unary core operator (∃, I, D, labeled, Q̂) applied to an extended
  /// body. `shape` supplies kind and parameters; its own child is ignored.
  static ExtendedFormula binder(const Formula& shape, ExtendedFormula body);

  /// Right-nested conjunction; the list must be nonempty.
  static ExtendedFormula conjunction(std::vector<ExtendedFormula> parts);

  Kind kind() const { return node_->kind; }
  const std::vector<ExtendedFormula>& children() const { return node_->children; }
  const Formula& core_formula() const { return *node_->core; }
  const VariableId& variable() const { return node_->var; }

 private:
  struct Node {
    Kind kind;
    std::optional<Formula> core;  // leaf formula, or binder shape
    VariableId var;
    std::vector<ExtendedFormula> children;
  };
  explicit ExtendedFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Name of the bound variable used when expanding ⊤.
inline const VariableId kTopVariable{"_t"};

Formula desugar(const ExtendedFormula& extended);

/// Core renderings of the derived connectives.
Formula top_formula();
Formula bottom_formula();
Formula disjunction(Formula a, Formula b);
Formula implication(Formula a, Formula b);
Formula forall(VariableId x, Formula body);

// ---------------------------------------------------------------------------

inline const char* kind_name(FormulaKind k) {
  switch (k) {
    case FormulaKind::RelationAtom: return "relation atom";
    case FormulaKind::VariableAtom: return "relation-variable atom";
    case FormulaKind::Equality: return "equality";
    case FormulaKind::LoopAtom: return "loop atom";
    case FormulaKind::Not: return "negation";
    case FormulaKind::And: return "conjunction";
    case FormulaKind::Exists: return "existential";
    case FormulaKind::InsertPoint: return "point insertion";
    case FormulaKind::InsertRelation: return "tuple insertion";
    case FormulaKind::InsertVariable: return "relation-variable insertion";
    case FormulaKind::DeleteRelation: return "tuple deletion";
    case FormulaKind::DeleteVariable: return "relation-variable deletion";
    case FormulaKind::Labeled: return "labeled formula";
    case FormulaKind::Quantified: return "generalized quantifier";
  }
  return "?";
}

inline std::string FormulaPath::to_string() const {
  if (steps.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(steps[i]);
  }
  return out;
}

inline Formula Formula::make(FormulaKind k, std::string name, std::vector<VariableId> vars,
                             std::uint64_t label, std::vector<Formula> children) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->name = std::move(name);
  n->vars = std::move(vars);
  n->label = label;
  n->children = std::move(children);
  return Formula(std::move(n));
}

inline Formula Formula::relation_atom(std::string symbol, std::vector<VariableId> args) {
  return make(FormulaKind::RelationAtom, std::move(symbol), std::move(args), 0, {});
}
inline Formula Formula::variable_atom(std::string relvar, std::vector<VariableId> args) {
  return make(FormulaKind::VariableAtom, std::move(relvar), std::move(args), 0, {});
}
inline Formula Formula::equality(VariableId lhs, VariableId rhs) {
  return make(FormulaKind::Equality, {}, {std::move(lhs), std::move(rhs)}, 0, {});
}
inline Formula Formula::loop_atom(LoopLabel label) {
  return make(FormulaKind::LoopAtom, {}, {}, label.value, {});
}
inline Formula Formula::negation(Formula body) {
  return make(FormulaKind::Not, {}, {}, 0, {std::move(body)});
}
inline Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(FormulaKind::And, {}, {}, 0, {std::move(lhs), std::move(rhs)});
}
inline Formula Formula::exists(VariableId x, Formula body) {
  return make(FormulaKind::Exists, {}, {std::move(x)}, 0, {std::move(body)});
}
inline Formula Formula::insert_point(VariableId x, Formula body) {
  return make(FormulaKind::InsertPoint, {}, {std::move(x)}, 0, {std::move(body)});
}
inline Formula Formula::insert_relation(std::string symbol, std::vector<VariableId> args,
                                        Formula body) {
  return make(FormulaKind::InsertRelation, std::move(symbol), std::move(args), 0,
              {std::move(body)});
}
inline Formula Formula::insert_variable(std::string relvar, std::vector<VariableId> args,
                                        Formula body) {
  return make(FormulaKind::InsertVariable, std::move(relvar), std::move(args), 0,
              {std::move(body)});
}
inline Formula Formula::delete_relation(std::string symbol, std::vector<VariableId> args,
                                        Formula body) {
  return make(FormulaKind::DeleteRelation, std::move(symbol), std::move(args), 0,
              {std::move(body)});
}
inline Formula Formula::delete_variable(std::string relvar, std::vector<VariableId> args,
                                        Formula body) {
  return make(FormulaKind::DeleteVariable, std::move(relvar), std::move(args), 0,
              {std::move(body)});
}
inline Formula Formula::labeled(LoopLabel label, Formula body) {
  return make(FormulaKind::Labeled, {}, {}, label.value, {std::move(body)});
}
inline Formula Formula::quantified(std::string quantifier, VariableId x, Formula body) {
  return make(FormulaKind::Quantified, std::move(quantifier), {std::move(x)}, 0,
              {std::move(body)});
}

inline const Formula& Formula::at(const FormulaPath& path) const {
  const Formula* cur = this;
  for (auto step : path.steps) cur = &cur->child(step);
  return *cur;
}

inline std::size_t Formula::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children()) n += c.node_count();
  return n;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.name == y.name && x.vars == y.vars && x.label == y.label &&
         x.children == y.children;
}

inline FreeSet free_variables(const Formula& phi) {
  FreeSet out;
  switch (phi.kind()) {
    case FormulaKind::RelationAtom:
    case FormulaKind::Equality:
      for (const auto& v : phi.variables()) out.insert(v);
      return out;
    case FormulaKind::VariableAtom:
      out.insert(phi.relation_variable());
      for (const auto& v : phi.variables()) out.insert(v);
      return out;
    case FormulaKind::LoopAtom:
      return out;
    case FormulaKind::Not:
    case FormulaKind::Labeled:
      return free_variables(phi.child());
    case FormulaKind::And: {
      out = free_variables(phi.child(0));
      auto rhs = free_variables(phi.child(1));
      out.insert(rhs.begin(), rhs.end());
      return out;
    }
    case FormulaKind::Exists:
    case FormulaKind::InsertPoint:
    case FormulaKind::Quantified:
    case FormulaKind::InsertRelation:
    case FormulaKind::DeleteRelation:
      out = free_variables(phi.child());
      for (const auto& v : phi.variables()) out.erase(v);
      return out;
    case FormulaKind::InsertVariable:
    case FormulaKind::DeleteVariable:
      out = free_variables(phi.child());
      out.erase(phi.relation_variable());
      for (const auto& v : phi.variables()) out.erase(v);
      return out;
  }
  return out;
}

inline bool is_sentence(const Formula& phi) { return free_variables(phi).empty(); }

namespace detail {
inline void collect_subformulae(const Formula& phi, FormulaPath& path,
                                std::vector<std::pair<FormulaPath, Formula>>& out) {
  out.emplace_back(path, phi);
  for (std::uint32_t i = 0; i < phi.children().size(); ++i) {
    path.steps.push_back(i);
    collect_subformulae(phi.child(i), path, out);
    path.steps.pop_back();
  }
}
}  // namespace detail

inline std::vector<std::pair<FormulaPath, Formula>> subformulae(const Formula& phi) {
  std::vector<std::pair<FormulaPath, Formula>> out;
  FormulaPath path;
  detail::collect_subformulae(phi, path, out);
  return out;
}

namespace detail {
/// First loop atom lying outside some labeled node with its label.
inline std::optional<FormulaPath> find_non_standard_jump(const Formula& phi) {
  std::map<std::uint64_t, std::vector<FormulaPath>> atoms, labeled;
  for (const auto& [path, sub] : subformulae(phi)) {
    if (sub.kind() == FormulaKind::LoopAtom) atoms[sub.label().value].push_back(path);
    if (sub.kind() == FormulaKind::Labeled) labeled[sub.label().value].push_back(path);
  }
  for (const auto& [k, nodes] : labeled) {
    auto it = atoms.find(k);
    if (it == atoms.end()) continue;
    for (const auto& atom : it->second)
      for (const auto& node : nodes)
        if (!node.is_proper_prefix_of(atom)) return atom;
  }
  return std::nullopt;
}
}  // namespace detail

inline bool has_non_standard_jump(const Formula& phi) {
  return detail::find_non_standard_jump(phi).has_value();
}

inline Vocabulary::Vocabulary(std::vector<RelationSymbol> symbols) {
  for (auto& s : symbols) add(std::move(s));
}

inline bool Vocabulary::add(RelationSymbol symbol) {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol.name,
                             [](const RelationSymbol& s, const std::string& n) { return s.name < n; });
  if (it != symbols_.end() && it->name == symbol.name) return false;
  symbols_.insert(it, std::move(symbol));
  return true;
}

inline std::optional<RelationSymbol> Vocabulary::find(const std::string& name) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), name,
                             [](const RelationSymbol& s, const std::string& n) { return s.name < n; });
  if (it == symbols_.end() || it->name != name) return std::nullopt;
  return *it;
}

inline std::optional<ValidationIssue> validate(const Formula& phi, const Vocabulary& sigma,
                                               const ValidateOptions& options) {
  std::map<std::string, std::size_t> relvar_arity;
  for (const auto& [path, sub] : subformulae(phi)) {
    if (sub.uses_relation_symbol()) {
      auto declared = sigma.find(sub.name());
      if (!declared)
        return ValidationIssue{path, "undeclared-symbol",
                               "relation symbol " + sub.name() + " is not in the vocabulary"};
      if (declared->arity != sub.variables().size())
        return ValidationIssue{path, "arity",
                               sub.name() + " has arity " + std::to_string(declared->arity) +
                                   " but is used with " + std::to_string(sub.variables().size()) +
                                   " argument(s)"};
    }
    if (sub.uses_relation_variable()) {
      if (sub.variables().empty())
        return ValidationIssue{path, "arity", "relation variable $" + sub.name() + " needs arguments"};
      auto [it, fresh] = relvar_arity.emplace(sub.name(), sub.variables().size());
      if (!fresh && it->second != sub.variables().size())
        return ValidationIssue{path, "arity",
                               "relation variable $" + sub.name() + " used with arity " +
                                   std::to_string(sub.variables().size()) + " after arity " +
                                   std::to_string(it->second)};
    }
    if (sub.kind() == FormulaKind::Quantified && options.quantifiers &&
        !options.quantifiers->contains(sub.name()))
      return ValidationIssue{path, "unknown-quantifier", "unknown quantifier " + sub.name()};
  }
  if (auto jump = detail::find_non_standard_jump(phi))
    return ValidationIssue{*jump, "non-standard-jump",
                           "loop atom at " + jump->to_string() +
                               " lies outside a labeled subformula with the same label"};
  return std::nullopt;
}

// --- extended syntax -------------------------------------------------------

inline ExtendedFormula ExtendedFormula::core(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Core;
  n->core = std::move(f);
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::negation(ExtendedFormula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->children = {std::move(f)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::conjunction(ExtendedFormula a, ExtendedFormula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->children = {std::move(a), std::move(b)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::disjunction(ExtendedFormula a, ExtendedFormula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->children = {std::move(a), std::move(b)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::implication(ExtendedFormula a, ExtendedFormula b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Implies;
  n->children = {std::move(a), std::move(b)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::forall(VariableId x, ExtendedFormula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->var = std::move(x);
  n->children = {std::move(body)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::top() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Top;
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::bottom() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bottom;
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::binder(const Formula& shape, ExtendedFormula body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binder;
  n->core = shape;
  n->children = {std::move(body)};
  return ExtendedFormula(std::move(n));
}

inline ExtendedFormula ExtendedFormula::conjunction(std::vector<ExtendedFormula> parts) {
  ExtendedFormula acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = conjunction(parts[i], acc);
  return acc;
}

inline Formula top_formula() {
  return Formula::negation(Formula::exists(
      kTopVariable, Formula::negation(Formula::equality(kTopVariable, kTopVariable))));
}

inline Formula bottom_formula() { return Formula::negation(top_formula()); }

inline Formula disjunction(Formula a, Formula b) {
  return Formula::negation(
      Formula::conjunction(Formula::negation(std::move(a)), Formula::negation(std::move(b))));
}

inline Formula implication(Formula a, Formula b) {
  return Formula::negation(Formula::conjunction(std::move(a), Formula::negation(std::move(b))));
}

inline Formula forall(VariableId x, Formula body) {
  return Formula::negation(Formula::exists(std::move(x), Formula::negation(std::move(body))));
}

namespace detail {
inline Formula rebuild_unary(const Formula& shape, Formula body) {
  switch (shape.kind()) {
    case FormulaKind::Not: return Formula::negation(std::move(body));
    case FormulaKind::Exists: return Formula::exists(shape.variable(), std::move(body));
    case FormulaKind::InsertPoint: return Formula::insert_point(shape.variable(), std::move(body));
    case FormulaKind::InsertRelation:
      return Formula::insert_relation(shape.name(), shape.variables(), std::move(body));
    case FormulaKind::InsertVariable:
      return Formula::insert_variable(shape.name(), shape.variables(), std::move(body));
    case FormulaKind::DeleteRelation:
      return Formula::delete_relation(shape.name(), shape.variables(), std::move(body));
    case FormulaKind::DeleteVariable:
      return Formula::delete_variable(shape.name(), shape.variables(), std::move(body));
    case FormulaKind::Labeled: return Formula::labeled(shape.label(), std::move(body));
    case FormulaKind::Quantified:
      return Formula::quantified(shape.name(), shape.variable(), std::move(body));
    default: throw std::invalid_argument("binder shape must be a unary operator");
  }
}
}  // namespace detail

inline Formula desugar(const ExtendedFormula& e) {
  using K = ExtendedFormula::Kind;
  switch (e.kind()) {
    case K::Core: return e.core_formula();
    case K::Not: return Formula::negation(desugar(e.children()[0]));
    case K::And: return Formula::conjunction(desugar(e.children()[0]), desugar(e.children()[1]));
    case K::Or: return disjunction(desugar(e.children()[0]), desugar(e.children()[1]));
    case K::Implies: return implication(desugar(e.children()[0]), desugar(e.children()[1]));
    case K::Forall: return forall(e.variable(), desugar(e.children()[0]));
    case K::Top: return top_formula();
    case K::Bottom: return bottom_formula();
    case K::Binder: return detail::rebuild_unary(e.core_formula(), desugar(e.children()[0]));
  }
  throw std::logic_error("unreachable");
}

}  // namespace gts
