#pragma once

// The semantic game G(𝔄, f, #, φ) as an explicit state machine. A Game is
// built once per root formula; positions are immutable values pointing at a
// node of that root by preorder index.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gts/ast.hpp"
#include "gts/core.hpp"
#include "gts/quantifier.hpp"
#include "gts/structure.hpp"

namespace gts {

using NodeId = std::uint32_t;

struct Position {
  Structure structure;
  Assignment assignment;
  Sign sign = Sign::Plus;
  NodeId at = 0;
  /// Set between the two stages of a generalized-quantifier node: the
  /// witness set chosen in the first stage.
  std::optional<std::vector<ElementId>> witness_set;

  friend bool operator==(const Position&, const Position&) = default;
};

namespace move {
struct PickConjunct {
  std::uint8_t side = 0;  // 0 left, 1 right
  friend bool operator==(const PickConjunct&, const PickConjunct&) = default;
};
struct PickElement {
  ElementId element;
  friend bool operator==(const PickElement&, const PickElement&) = default;
};
struct PickTuple {
  Tuple tuple;
  friend bool operator==(const PickTuple&, const PickTuple&) = default;
};
struct JumpTo {
  NodeId target = 0;  // a labeled node
  friend bool operator==(const JumpTo&, const JumpTo&) = default;
};
struct PickWitnessSet {
  std::vector<ElementId> set;
  friend bool operator==(const PickWitnessSet&, const PickWitnessSet&) = default;
};
struct PickPoint {
  ElementId element;
  bool inside = true;
  friend bool operator==(const PickPoint&, const PickPoint&) = default;
};
struct Forced {
  friend bool operator==(const Forced&, const Forced&) = default;
};
}  // namespace move

using Move = std::variant<move::PickConjunct, move::PickElement, move::PickTuple, move::JumpTo,
                          move::PickWitnessSet, move::PickPoint, move::Forced>;

/// nullopt while the play goes on.
struct TerminalStatus {
  std::optional<Player> winner;
  bool ongoing() const { return !winner.has_value(); }
};

struct GameOptions {
  const QuantifierRegistry* quantifiers = nullptr;
  std::size_t quantifier_cap = kDefaultQuantifierCap;
};

/// Shortest forced wins found by looking down the formula from a position
/// for atoms that one player can steer the play into.
struct StaticOutcome {
  std::optional<std::size_t> verifier;   // ∃ wins in at most this many rounds
  std::optional<std::size_t> falsifier;  // ∀ wins in at most this many rounds

  std::optional<std::size_t> for_player(Player p) const {
    return p == Player::Verifier ? verifier : falsifier;
  }
};

/// Truth of R(x̄), X(x̄) or x = y under 𝔅, g. Unassigned relation variables
/// read as ∅; unassigned individual variables raise EvalError.
bool atomic_eval(const Structure& s, const Assignment& g, const Formula& atom);

class Game {
 public:
  explicit Game(Formula root, GameOptions options = {});

  const Formula& root() const { return root_; }
  const GameOptions& options() const { return options_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Formula& formula_at(NodeId id) const { return nodes_.at(id).formula; }
  const FormulaPath& path(NodeId id) const { return nodes_.at(id).path; }
  std::optional<NodeId> find(const FormulaPath& path) const;
  const std::vector<NodeId>& children(NodeId id) const { return nodes_.at(id).children; }
  /// Labeled nodes carrying `label`, in preorder.
  std::vector<NodeId> labeled_nodes(LoopLabel label) const;

  /// Throws EvalError when a free symbol of the root is unassigned or an
  /// assigned value leaves the domain.
  Position initial_position(Structure a, Assignment f, Sign sign) const;

  /// The player to move, or nullopt for forced transitions.
  std::optional<Player> mover(const Position& p) const;
  std::vector<Move> legal_moves(const Position& p) const;
  /// Throws std::invalid_argument for a move that is not legal at p.
  Position apply_move(const Position& p, const Move& m) const;
  TerminalStatus terminal_status(const Position& p) const;

  /// Deterministic single-line text: sorted domain, sorted tuples per
  /// symbol, sorted assignment entries, sign, path (and witness set).
  std::string canonical(const Position& p) const;
  std::string move_text(const Move& m) const;

  StaticOutcome static_outcome(const Position& p) const;

 private:
  struct ForcingEntry {
    NodeId atom;
    std::uint16_t length;
    std::int8_t and_parity;  // -1 when the path crosses no conjunction
    std::uint8_t atom_parity;
  };
  struct NodeInfo {
    Formula formula;
    FormulaPath path;
    std::vector<NodeId> children;
    std::vector<ForcingEntry> forcing;
  };

  NodeId index(const Formula& f, FormulaPath path);
  void compute_forcing(NodeId id);

  const Formula& node(const Position& p) const { return nodes_.at(p.at).formula; }
  const QuantifierDef& quantifier(const Formula& f) const;
  std::vector<std::vector<ElementId>> witness_sets(const Position& p) const;

  Formula root_;
  GameOptions options_;
  std::vector<NodeInfo> nodes_;
  std::map<std::uint64_t, std::vector<NodeId>> labels_;
};

// ---------------------------------------------------------------------------

inline bool atomic_eval(const Structure& s, const Assignment& g, const Formula& atom) {
  auto value = [&](const VariableId& x) {
    auto v = g.get(x);
    if (!v) throw EvalError("variable " + x.name + " is unassigned at an atomic position");
    return *v;
  };
  switch (atom.kind()) {
    case FormulaKind::Equality:
      return value(atom.variables()[0]) == value(atom.variables()[1]);
    case FormulaKind::RelationAtom:
    case FormulaKind::VariableAtom: {
      Tuple t;
      t.reserve(atom.variables().size());
      for (const auto& x : atom.variables()) t.push_back(value(x));
      if (atom.kind() == FormulaKind::RelationAtom) return s.relation(atom.name()).contains(t);
      const Relation* r = g.get(atom.relation_variable());
      return r != nullptr && r->contains(t);
    }
    default:
      throw std::invalid_argument("atomic_eval needs R(x..), X(x..) or x = y");
  }
}

inline Game::Game(Formula root, GameOptions options)
    : root_(std::move(root)), options_(options) {
  index(root_, FormulaPath{});
  for (NodeId id = 0; id < nodes_.size(); ++id) compute_forcing(id);
}

inline NodeId Game::index(const Formula& f, FormulaPath path) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(NodeInfo{f, path, {}, {}});
  if (f.kind() == FormulaKind::Labeled) labels_[f.label().value].push_back(id);
  std::vector<NodeId> kids;
  for (std::uint32_t i = 0; i < f.children().size(); ++i)
    kids.push_back(index(f.child(i), path.child(i)));
  nodes_[id].children = std::move(kids);
  return id;
}

inline std::optional<NodeId> Game::find(const FormulaPath& path) const {
  NodeId cur = 0;
  for (auto step : path.steps) {
    const auto& kids = nodes_[cur].children;
    if (step >= kids.size()) return std::nullopt;
    cur = kids[step];
  }
  return cur;
}

inline std::vector<NodeId> Game::labeled_nodes(LoopLabel label) const {
  auto it = labels_.find(label.value);
  return it == labels_.end() ? std::vector<NodeId>{} : it->second;
}

// Paths along which one player alone chooses at every conjunction, and no
// binder on the way rebinds a variable or mutates a relation the atom reads.
// Whoever controls those conjunctions can steer the play into the atom.
inline void Game::compute_forcing(NodeId start) {
  constexpr std::size_t kMaxLength = 48;
  constexpr std::size_t kMaxEntries = 256;
  auto& out = nodes_[start].forcing;
  std::vector<std::string> bound, mutated_symbols, mutated_relvars;

  auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };

  auto visit = [&](auto&& self, NodeId id, std::size_t len, int and_parity, int parity) -> void {
    if (len > kMaxLength || out.size() >= kMaxEntries) return;
    const auto& f = nodes_[id].formula;
    const auto& kids = nodes_[id].children;
    switch (f.kind()) {
      case FormulaKind::RelationAtom:
      case FormulaKind::VariableAtom:
      case FormulaKind::Equality: {
        for (const auto& x : f.variables())
          if (contains(bound, x.name)) return;
        if (f.kind() == FormulaKind::RelationAtom && contains(mutated_symbols, f.name())) return;
        if (f.kind() == FormulaKind::VariableAtom && contains(mutated_relvars, f.name())) return;
        out.push_back({id, static_cast<std::uint16_t>(len), static_cast<std::int8_t>(and_parity),
                       static_cast<std::uint8_t>(parity)});
        return;
      }
      case FormulaKind::LoopAtom:
      case FormulaKind::Quantified:
        return;
      case FormulaKind::Not:
        self(self, kids[0], len + 1, and_parity, parity ^ 1);
        return;
      case FormulaKind::Labeled:
        self(self, kids[0], len + 1, and_parity, parity);
        return;
      case FormulaKind::And:
        if (and_parity != -1 && and_parity != parity) return;
        self(self, kids[0], len + 1, parity, parity);
        self(self, kids[1], len + 1, parity, parity);
        return;
      default: {
        const auto mark = bound.size();
        for (const auto& x : f.variables()) bound.push_back(x.name);
        std::vector<std::string>* mutated = nullptr;
        if (f.kind() == FormulaKind::InsertRelation || f.kind() == FormulaKind::DeleteRelation)
          mutated = &mutated_symbols;
        if (f.kind() == FormulaKind::InsertVariable || f.kind() == FormulaKind::DeleteVariable)
          mutated = &mutated_relvars;
        if (mutated) mutated->push_back(f.name());
        self(self, kids[0], len + 1, and_parity, parity);
        if (mutated) mutated->pop_back();
        bound.resize(mark);
        return;
      }
    }
  };
  visit(visit, start, 0, -1, 0);
}

inline Position Game::initial_position(Structure a, Assignment f, Sign sign) const {
  for (const auto& sym : free_variables(root_)) {
    if (const auto* x = std::get_if<VariableId>(&sym)) {
      auto v = f.get(*x);
      if (!v) throw EvalError("free variable " + x->name + " is unassigned");
      if (!a.contains(*v)) throw EvalError("value of " + x->name + " is not in the domain");
    } else {
      const auto& X = std::get<RelationVariable>(sym);
      if (!f.get(X)) throw EvalError("free relation variable $" + X.name + " is unassigned");
    }
  }
  return Position{std::move(a), std::move(f), sign, 0, std::nullopt};
}

inline const QuantifierDef& Game::quantifier(const Formula& f) const {
  if (!options_.quantifiers) throw EvalError("no quantifier registry for " + f.name());
  return options_.quantifiers->at(f.name());
}

inline std::vector<std::vector<ElementId>> Game::witness_sets(const Position& p) const {
  return q_interpretation(quantifier(node(p)), p.structure, options_.quantifier_cap);
}

inline std::optional<Player> Game::mover(const Position& p) const {
  const auto& f = node(p);
  switch (f.kind()) {
    case FormulaKind::And:
      return conjunction_chooser(p.sign);
    case FormulaKind::Exists:
    case FormulaKind::InsertRelation:
    case FormulaKind::InsertVariable:
    case FormulaKind::DeleteRelation:
    case FormulaKind::DeleteVariable:
    case FormulaKind::LoopAtom:
      return existential_chooser(p.sign);
    case FormulaKind::Quantified:
      return p.witness_set ? conjunction_chooser(p.sign) : existential_chooser(p.sign);
    default:
      return std::nullopt;
  }
}

inline TerminalStatus Game::terminal_status(const Position& p) const {
  const auto& f = node(p);
  switch (f.kind()) {
    case FormulaKind::RelationAtom:
    case FormulaKind::VariableAtom:
    case FormulaKind::Equality: {
      bool holds = atomic_eval(p.structure, p.assignment, f);
      bool verifier_wins = (p.sign == Sign::Plus) == holds;
      return {verifier_wins ? Player::Verifier : Player::Falsifier};
    }
    case FormulaKind::LoopAtom:
      if (labeled_nodes(f.label()).empty())
        return {p.sign == Sign::Minus ? Player::Verifier : Player::Falsifier};
      return {};
    case FormulaKind::Quantified:
      // Q^𝔄 = ∅: the player who should pick a set loses.
      if (!p.witness_set && witness_sets(p).empty()) return {opponent(existential_chooser(p.sign))};
      return {};
    default:
      return {};
  }
}


namespace detail {
inline std::vector<Tuple> all_tuples(const Structure& s, std::size_t k) {
  std::vector<Tuple> out;
  for_each_tuple(s.domain(), k, [&](const Tuple& t) { out.push_back(t); });
  return out;
}
}  // namespace detail

inline std::vector<Move> Game::legal_moves(const Position& p) const {
  if (!terminal_status(p).ongoing()) return {};
  const auto& f = node(p);
  std::vector<Move> out;
  switch (f.kind()) {
    case FormulaKind::And:
      out.push_back(move::PickConjunct{0});
      out.push_back(move::PickConjunct{1});
      break;
    case FormulaKind::Exists:
      for (auto e : p.structure.domain()) out.push_back(move::PickElement{e});
      break;
    case FormulaKind::InsertRelation:
    case FormulaKind::InsertVariable:
    case FormulaKind::DeleteRelation:
    case FormulaKind::DeleteVariable:
      for (auto& t : detail::all_tuples(p.structure, f.variables().size()))
        out.push_back(move::PickTuple{std::move(t)});
      break;
    case FormulaKind::LoopAtom:
      for (auto target : labeled_nodes(f.label())) out.push_back(move::JumpTo{target});
      break;
    case FormulaKind::Quantified:
      if (!p.witness_set) {
        for (auto& s : witness_sets(p)) out.push_back(move::PickWitnessSet{std::move(s)});
      } else {
        for (auto e : p.structure.domain()) {
          bool inside = std::binary_search(p.witness_set->begin(), p.witness_set->end(), e);
          out.push_back(move::PickPoint{e, inside});
        }
      }
      break;
    default:
      out.push_back(move::Forced{});
      break;
  }
  return out;
}

inline Position Game::apply_move(const Position& p, const Move& m) const {
  const auto& f = node(p);
  const auto& kids = nodes_.at(p.at).children;
  auto illegal = [&]() -> std::invalid_argument {
    return std::invalid_argument("illegal move " + move_text(m) + " at " + kind_name(f.kind()));
  };
  if (!terminal_status(p).ongoing()) throw illegal();
  Position next{p.structure, p.assignment, p.sign, 0, std::nullopt};

  auto take_tuple = [&]() -> const Tuple& {
    const auto* pick = std::get_if<move::PickTuple>(&m);
    if (!pick || pick->tuple.size() != f.variables().size()) throw illegal();
    for (auto e : pick->tuple)
      if (!p.structure.contains(e)) throw illegal();
    return pick->tuple;
  };
  auto bind_tuple = [&](const Tuple& t) {
    for (std::size_t i = 0; i < t.size(); ++i) next.assignment.set(f.variables()[i], t[i]);
  };

  switch (f.kind()) {
    case FormulaKind::Not:
      if (!std::holds_alternative<move::Forced>(m)) throw illegal();
      next.sign = flip(p.sign);
      next.at = kids[0];
      return next;
    case FormulaKind::Labeled:
      if (!std::holds_alternative<move::Forced>(m)) throw illegal();
      next.at = kids[0];
      return next;
    case FormulaKind::InsertPoint: {
      if (!std::holds_alternative<move::Forced>(m)) throw illegal();
      auto [grown, fresh] = add_fresh_point(p.structure);
      next.structure = std::move(grown);
      next.assignment.set(f.variable(), fresh);
      next.at = kids[0];
      return next;
    }
    case FormulaKind::And: {
      const auto* pick = std::get_if<move::PickConjunct>(&m);
      if (!pick || pick->side > 1) throw illegal();
      next.at = kids[pick->side];
      return next;
    }
    case FormulaKind::Exists: {
      const auto* pick = std::get_if<move::PickElement>(&m);
      if (!pick || !p.structure.contains(pick->element)) throw illegal();
      next.assignment.set(f.variable(), pick->element);
      next.at = kids[0];
      return next;
    }
    case FormulaKind::InsertRelation:
    case FormulaKind::DeleteRelation: {
      const auto& t = take_tuple();
      next.structure = f.kind() == FormulaKind::InsertRelation
                           ? insert_tuple(p.structure, f.relation_symbol(), t)
                           : delete_tuple(p.structure, f.relation_symbol(), t);
      bind_tuple(t);
      next.at = kids[0];
      return next;
    }
    case FormulaKind::InsertVariable:
    case FormulaKind::DeleteVariable: {
      const auto& t = take_tuple();
      const auto X = f.relation_variable();
      const Relation* current = p.assignment.get(X);
      Relation value = current ? *current : Relation(X.arity);
      if (f.kind() == FormulaKind::InsertVariable)
        value.insert(t);
      else
        value.erase(t);
      bind_tuple(t);
      next.assignment.set(X, std::move(value));
      next.at = kids[0];
      return next;
    }
    case FormulaKind::LoopAtom: {
      const auto* jump = std::get_if<move::JumpTo>(&m);
      if (!jump) throw illegal();
      auto targets = labeled_nodes(f.label());
      if (std::find(targets.begin(), targets.end(), jump->target) == targets.end()) throw illegal();
      next.at = jump->target;
      return next;
    }
    case FormulaKind::Quantified: {
      if (!p.witness_set) {
        const auto* pick = std::get_if<move::PickWitnessSet>(&m);
        if (!pick) throw illegal();
        auto sets = witness_sets(p);
        if (std::find(sets.begin(), sets.end(), pick->set) == sets.end()) throw illegal();
        next.at = p.at;
        next.witness_set = pick->set;
        return next;
      }
      const auto* pick = std::get_if<move::PickPoint>(&m);
      if (!pick || !p.structure.contains(pick->element)) throw illegal();
      bool inside =
          std::binary_search(p.witness_set->begin(), p.witness_set->end(), pick->element);
      if (inside != pick->inside) throw illegal();
      next.assignment.set(f.variable(), pick->element);
      if (!inside) next.sign = flip(p.sign);
      next.at = kids[0];
      return next;
    }
    default:
      throw illegal();
  }
}

inline std::string Game::canonical(const Position& p) const {
  std::string out;
  out.reserve(128);
  out += "D{";
  for (std::size_t i = 0; i < p.structure.domain().size(); ++i) {
    if (i) out += ',';
    out += std::to_string(p.structure.domain()[i].value);
  }
  out += "}|";
  for (std::size_t i = 0; i < p.structure.symbols().size(); ++i) {
    if (i) out += ';';
    out += p.structure.symbols()[i].name;
    out += p.structure.relation_at(i).to_string();
  }
  out += '|';
  bool first = true;
  for (const auto& [name, e] : p.assignment.individuals()) {
    if (!first) out += ',';
    first = false;
    out += name;
    out += '=';
    out += std::to_string(e.value);
  }
  for (const auto& [name, r] : p.assignment.relations()) {
    if (!first) out += ',';
    first = false;
    out += '$';
    out += name;
    out += '=';
    out += r.to_string();
  }
  out += '|';
  out += sign_char(p.sign);
  out += "|@";
  out += nodes_.at(p.at).path.to_string();
  if (p.witness_set) {
    out += "|S{";
    for (std::size_t i = 0; i < p.witness_set->size(); ++i) {
      if (i) out += ',';
      out += std::to_string((*p.witness_set)[i].value);
    }
    out += '}';
  }
  return out;
}

inline std::string Game::move_text(const Move& m) const {
  struct Visitor {
    const Game* game;
    std::string operator()(const move::PickConjunct& c) const {
      return c.side == 0 ? "left" : "right";
    }
    std::string operator()(const move::PickElement& e) const {
      return "element " + std::to_string(e.element.value);
    }
    std::string operator()(const move::PickTuple& t) const { return "tuple " + tuple_text(t.tuple); }
    std::string operator()(const move::JumpTo& j) const {
      return "jump " + (j.target < game->nodes_.size() ? game->nodes_[j.target].path.to_string()
                                                       : std::string("?"));
    }
    std::string operator()(const move::PickWitnessSet& s) const {
      std::string out = "set {";
      for (std::size_t i = 0; i < s.set.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s.set[i].value);
      }
      return out + "}";
    }
    std::string operator()(const move::PickPoint& pt) const {
      return std::string("point ") + std::to_string(pt.element.value) +
             (pt.inside ? " in" : " out");
    }
    std::string operator()(const move::Forced&) const { return "forced"; }
  };
  return std::visit(Visitor{this}, m);
}

inline StaticOutcome Game::static_outcome(const Position& p) const {
  StaticOutcome out;
  if (p.witness_set) return out;
  for (const auto& entry : nodes_.at(p.at).forcing) {
    const auto& atom = nodes_[entry.atom].formula;
    bool assigned = true;
    for (const auto& x : atom.variables())
      if (!p.assignment.defines(x)) {
        assigned = false;
        break;
      }
    if (!assigned) continue;
    const bool holds = atomic_eval(p.structure, p.assignment, atom);
    const Sign at_atom = entry.atom_parity ? flip(p.sign) : p.sign;
    const Player winner = ((at_atom == Sign::Plus) == holds) ? Player::Verifier : Player::Falsifier;
    if (entry.and_parity >= 0) {
      const Sign at_and = entry.and_parity ? flip(p.sign) : p.sign;
      if (conjunction_chooser(at_and) != winner) continue;
    }
    auto& slot = winner == Player::Verifier ? out.verifier : out.falsifier;
    if (!slot || *slot > entry.length) slot = entry.length;
  }
  return out;
}

}  // namespace gts
