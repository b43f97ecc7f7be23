#pragma once

// Finite relational structures and assignments as persistent values, the
// model mutations used by the game (fresh points, tuple insertion/deletion),
// word models, and the bitstring encoding enc(𝔄).

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gts/ast.hpp"
#include "gts/core.hpp"

namespace gts {

/// A finite set of k-tuples kept sorted, so equality is structural.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t arity) : arity_(arity) {}
  Relation(std::size_t arity, std::vector<Tuple> tuples);

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  bool contains(const Tuple& t) const {
    return std::binary_search(tuples_.begin(), tuples_.end(), t);
  }

  /// Returns false if already present.
  bool insert(Tuple t);
  /// Returns false if absent.
  bool erase(const Tuple& t);

  std::string to_string() const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t arity_ = 1;
  std::vector<Tuple> tuples_;
};

class Structure {
 public:
  /// Domain {0..n-1}, empty vocabulary. n must be positive.
  explicit Structure(std::size_t n);
  /// Arbitrary nonempty domain (duplicates rejected).
  explicit Structure(std::vector<ElementId> domain);

  const std::vector<ElementId>& domain() const { return domain_; }
  std::size_t size() const { return domain_.size(); }
  bool contains(ElementId e) const {
    return std::binary_search(domain_.begin(), domain_.end(), e);
  }
  ElementId max_element() const { return domain_.back(); }

  /// Adds an empty relation for a new symbol. Throws if the name is taken.
  void declare(const RelationSymbol& symbol);
  Vocabulary vocabulary() const;
  const std::vector<RelationSymbol>& symbols() const { return symbols_; }
  std::optional<std::size_t> symbol_index(const std::string& name) const;
  const Relation& relation(const std::string& name) const;
  const Relation& relation_at(std::size_t index) const { return *relations_[index]; }

  /// In-place builder used while loading; the persistent operations below
  /// never modify their argument.
  void add_tuple(const std::string& name, Tuple t);
  void set_relation(const std::string& name, Relation r);

  friend bool operator==(const Structure& a, const Structure& b);

 private:
  friend std::pair<Structure, ElementId> add_fresh_point(const Structure& s);
  friend Structure insert_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t);
  friend Structure delete_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t);

  std::size_t require_index(const std::string& name) const;
  void check_tuple(const RelationSymbol& sym, const Tuple& t) const;

  std::vector<ElementId> domain_;                       // sorted
  std::vector<RelationSymbol> symbols_;                 // sorted by name
  std::vector<std::shared_ptr<const Relation>> relations_;  // parallel to symbols_
};

/// Fresh isolated point max(domain)+1; interpretations unchanged.
std::pair<Structure, ElementId> add_fresh_point(const Structure& s);
Structure insert_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t);
Structure delete_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t);

/// Individual and relational values of variables. Unlisted relation
/// variables read as ∅.
class Assignment {
 public:
  Assignment() = default;

  std::optional<ElementId> get(const VariableId& x) const;
  const Relation* get(const RelationVariable& X) const;
  bool defines(const VariableId& x) const { return get(x).has_value(); }

  /// f[x↦a]
  Assignment with(const VariableId& x, ElementId a) const;
  /// f[X↦S]
  Assignment with(const RelationVariable& X, Relation value) const;

  void set(const VariableId& x, ElementId a);
  void set(const RelationVariable& X, Relation value);

  const std::vector<std::pair<std::string, ElementId>>& individuals() const { return individuals_; }
  const std::vector<std::pair<std::string, Relation>>& relations() const { return relations_; }

  /// Copy keeping only the listed symbols.
  Assignment restricted_to(const FreeSet& keep) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::pair<std::string, ElementId>> individuals_;  // sorted by name
  std::vector<std::pair<std::string, Relation>> relations_;     // sorted by name
};

/// Simultaneous update f[x1↦b1,...,xk↦bk, X↦S].
struct Bindings {
  std::vector<std::pair<VariableId, ElementId>> individuals;
  std::vector<std::pair<RelationVariable, Relation>> relations;
};

/// Throws std::invalid_argument when a value lies outside `s` or a relation
/// value has the wrong arity.
Assignment update_assignment(const Assignment& f, const Bindings& bindings, const Structure& s);

/// A word over a finite alphabet. Letters are identifier strings.
struct WordSpec {
  std::vector<std::string> alphabet;
  std::vector<std::string> word;
};

inline const std::string kSuccessor = "Succ";
inline std::string letter_predicate(const std::string& letter) { return "P" + letter; }

/// Vocabulary {Succ} ∪ {P_a | a ∈ Σ}.
Vocabulary word_vocabulary(const std::vector<std::string>& alphabet);
Structure word_model(const WordSpec& input);

/// enc(𝔄) as an ASCII '0'/'1' string. `element_order` lists every domain
/// element once, smallest first; `symbol_order` lists every symbol once.
std::string encode(const Structure& s, const std::vector<ElementId>& element_order,
                   const std::vector<std::string>& symbol_order);
/// Natural element order and alphabetical symbol order.
std::string encode(const Structure& s);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverse of encode: domain {0..n-1} where i stands for the i-th element of
/// the encoding order. Symbols default to R1..Rp when only arities are given.
Structure decode(const std::string& bits, const std::vector<RelationSymbol>& symbols);
Structure decode(const std::string& bits, const std::vector<std::size_t>& arities);

// ---------------------------------------------------------------------------

inline Relation::Relation(std::size_t arity, std::vector<Tuple> tuples)
    : arity_(arity), tuples_(std::move(tuples)) {
  for (const auto& t : tuples_)
    if (t.size() != arity_) throw std::invalid_argument("tuple length does not match arity");
  std::sort(tuples_.begin(), tuples_.end());
  tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
}

inline bool Relation::insert(Tuple t) {
  if (t.size() != arity_) throw std::invalid_argument("tuple length does not match arity");
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
  if (it != tuples_.end() && *it == t) return false;
  tuples_.insert(it, std::move(t));
  return true;
}

inline bool Relation::erase(const Tuple& t) {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
  if (it == tuples_.end() || *it != t) return false;
  tuples_.erase(it);
  return true;
}

inline std::string Relation::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < tuples_.size(); ++i) {
    if (i) out += ',';
    out += tuple_text(tuples_[i]);
  }
  return out + "}";
}

inline Structure::Structure(std::size_t n) {
  if (n == 0) throw std::invalid_argument("structures have a nonempty domain");
  domain_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) domain_.emplace_back(static_cast<std::uint32_t>(i));
}

inline Structure::Structure(std::vector<ElementId> domain) : domain_(std::move(domain)) {
  if (domain_.empty()) throw std::invalid_argument("structures have a nonempty domain");
  std::sort(domain_.begin(), domain_.end());
  if (std::adjacent_find(domain_.begin(), domain_.end()) != domain_.end())
    throw std::invalid_argument("duplicate domain element");
}

inline void Structure::declare(const RelationSymbol& symbol) {
  if (symbol.arity == 0) throw std::invalid_argument("relation arity must be positive");
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol.name,
                             [](const RelationSymbol& s, const std::string& n) { return s.name < n; });
  if (it != symbols_.end() && it->name == symbol.name)
    throw std::invalid_argument("relation " + symbol.name + " declared twice");
  auto pos = it - symbols_.begin();
  symbols_.insert(it, symbol);
  relations_.insert(relations_.begin() + pos, std::make_shared<const Relation>(symbol.arity));
}

inline Vocabulary Structure::vocabulary() const { return Vocabulary(symbols_); }

inline std::optional<std::size_t> Structure::symbol_index(const std::string& name) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), name,
                             [](const RelationSymbol& s, const std::string& n) { return s.name < n; });
  if (it == symbols_.end() || it->name != name) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

inline std::size_t Structure::require_index(const std::string& name) const {
  auto idx = symbol_index(name);
  if (!idx) throw std::invalid_argument("relation " + name + " is not in the vocabulary");
  return *idx;
}

inline const Relation& Structure::relation(const std::string& name) const {
  return *relations_[require_index(name)];
}

inline void Structure::check_tuple(const RelationSymbol& sym, const Tuple& t) const {
  if (t.size() != sym.arity)
    throw std::invalid_argument("tuple " + tuple_text(t) + " does not have arity " +
                                std::to_string(sym.arity) + " of " + sym.name);
  for (auto e : t)
    if (!contains(e))
      throw std::invalid_argument("tuple " + tuple_text(t) + " leaves the domain");
}

inline void Structure::add_tuple(const std::string& name, Tuple t) {
  auto idx = require_index(name);
  check_tuple(symbols_[idx], t);
  auto copy = std::make_shared<Relation>(*relations_[idx]);
  copy->insert(std::move(t));
  relations_[idx] = std::move(copy);
}

inline void Structure::set_relation(const std::string& name, Relation r) {
  auto idx = require_index(name);
  if (r.arity() != symbols_[idx].arity) throw std::invalid_argument("arity mismatch for " + name);
  for (const auto& t : r.tuples()) check_tuple(symbols_[idx], t);
  relations_[idx] = std::make_shared<const Relation>(std::move(r));
}

inline bool operator==(const Structure& a, const Structure& b) {
  if (a.domain_ != b.domain_ || a.symbols_ != b.symbols_) return false;
  for (std::size_t i = 0; i < a.relations_.size(); ++i)
    if (a.relations_[i] != b.relations_[i] && *a.relations_[i] != *b.relations_[i]) return false;
  return true;
}

inline std::pair<Structure, ElementId> add_fresh_point(const Structure& s) {
  Structure out = s;
  ElementId fresh{s.max_element().value + 1};
  out.domain_.push_back(fresh);
  return {std::move(out), fresh};
}

inline Structure insert_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t) {
  auto idx = s.require_index(r.name);
  s.check_tuple(s.symbols_[idx], t);
  if (s.relations_[idx]->contains(t)) return s;
  Structure out = s;
  auto copy = std::make_shared<Relation>(*s.relations_[idx]);
  copy->insert(t);
  out.relations_[idx] = std::move(copy);
  return out;
}

inline Structure delete_tuple(const Structure& s, const RelationSymbol& r, const Tuple& t) {
  auto idx = s.require_index(r.name);
  s.check_tuple(s.symbols_[idx], t);
  if (!s.relations_[idx]->contains(t)) return s;
  Structure out = s;
  auto copy = std::make_shared<Relation>(*s.relations_[idx]);
  copy->erase(t);
  out.relations_[idx] = std::move(copy);
  return out;
}

namespace detail {
template <class V>
auto find_by_name(std::vector<std::pair<std::string, V>>& v, const std::string& name) {
  return std::lower_bound(v.begin(), v.end(), name,
                          [](const auto& p, const std::string& n) { return p.first < n; });
}
template <class V>
auto find_by_name(const std::vector<std::pair<std::string, V>>& v, const std::string& name) {
  return std::lower_bound(v.begin(), v.end(), name,
                          [](const auto& p, const std::string& n) { return p.first < n; });
}
}  // namespace detail

inline std::optional<ElementId> Assignment::get(const VariableId& x) const {
  auto it = detail::find_by_name(individuals_, x.name);
  if (it == individuals_.end() || it->first != x.name) return std::nullopt;
  return it->second;
}

inline const Relation* Assignment::get(const RelationVariable& X) const {
  auto it = detail::find_by_name(relations_, X.name);
  if (it == relations_.end() || it->first != X.name) return nullptr;
  return &it->second;
}

inline void Assignment::set(const VariableId& x, ElementId a) {
  auto it = detail::find_by_name(individuals_, x.name);
  if (it != individuals_.end() && it->first == x.name)
    it->second = a;
  else
    individuals_.insert(it, {x.name, a});
}

inline void Assignment::set(const RelationVariable& X, Relation value) {
  if (value.arity() != X.arity)
    throw std::invalid_argument("value of $" + X.name + " has the wrong arity");
  auto it = detail::find_by_name(relations_, X.name);
  if (it != relations_.end() && it->first == X.name)
    it->second = std::move(value);
  else
    relations_.insert(it, {X.name, std::move(value)});
}

inline Assignment Assignment::with(const VariableId& x, ElementId a) const {
  Assignment out = *this;
  out.set(x, a);
  return out;
}

inline Assignment Assignment::with(const RelationVariable& X, Relation value) const {
  Assignment out = *this;
  out.set(X, std::move(value));
  return out;
}

inline Assignment Assignment::restricted_to(const FreeSet& keep) const {
  Assignment out;
  for (const auto& [name, e] : individuals_)
    if (keep.contains(FreeSymbol{VariableId{name}})) out.individuals_.emplace_back(name, e);
  for (const auto& [name, r] : relations_)
    if (keep.contains(FreeSymbol{RelationVariable{name, r.arity()}}))
      out.relations_.emplace_back(name, r);
  return out;
}

inline Assignment update_assignment(const Assignment& f, const Bindings& bindings,
                                    const Structure& s) {
  Assignment out = f;
  for (const auto& [x, a] : bindings.individuals) {
    if (!s.contains(a))
      throw std::invalid_argument("element " + std::to_string(a.value) + " is not in the domain");
    out.set(x, a);
  }
  for (const auto& [X, value] : bindings.relations) {
    if (value.arity() != X.arity)
      throw std::invalid_argument("value of $" + X.name + " has the wrong arity");
    for (const auto& t : value.tuples())
      for (auto e : t)
        if (!s.contains(e))
          throw std::invalid_argument("value of $" + X.name + " leaves the domain");
    out.set(X, value);
  }
  return out;
}

inline Vocabulary word_vocabulary(const std::vector<std::string>& alphabet) {
  Vocabulary v;
  v.add({kSuccessor, 2});
  for (const auto& a : alphabet) v.add({letter_predicate(a), 1});
  return v;
}

inline Structure word_model(const WordSpec& input) {
  if (input.alphabet.empty()) throw std::invalid_argument("alphabet must be nonempty");
  Structure m(input.word.size() + 1);
  const Vocabulary sigma = word_vocabulary(input.alphabet);
  for (const auto& sym : sigma.symbols()) m.declare(sym);
  for (std::uint32_t i = 0; i < input.word.size(); ++i) {
    m.add_tuple(kSuccessor, {ElementId{i}, ElementId{i + 1}});
    const auto& letter = input.word[i];
    if (std::find(input.alphabet.begin(), input.alphabet.end(), letter) == input.alphabet.end())
      throw std::invalid_argument("letter " + letter + " is not in the alphabet");
    m.add_tuple(letter_predicate(letter), {ElementId{i + 1}});
  }
  return m;
}

namespace detail {
/// Calls fn on every k-tuple over `order` in lexicographic order.
template <class Fn>
void for_each_tuple(const std::vector<ElementId>& order, std::size_t k, Fn&& fn) {
  const std::size_t n = order.size();
  std::vector<std::size_t> idx(k, 0);
  Tuple t(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) t[i] = order[idx[i]];
    fn(t);
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (k == 0) return;
  }
}
}  // namespace detail

inline std::string encode(const Structure& s, const std::vector<ElementId>& element_order,
                          const std::vector<std::string>& symbol_order) {
  {
    auto sorted = element_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != s.domain())
      throw std::invalid_argument("element order must list every domain element exactly once");
    auto names = symbol_order;
    std::sort(names.begin(), names.end());
    std::vector<std::string> expected;
    for (const auto& sym : s.symbols()) expected.push_back(sym.name);
    if (names != expected)
      throw std::invalid_argument("symbol order must list every relation symbol exactly once");
  }
  std::string bits(s.size(), '0');
  bits += '1';
  for (const auto& name : symbol_order) {
    const auto& rel = s.relation(name);
    detail::for_each_tuple(element_order, rel.arity(),
                           [&](const Tuple& t) { bits += rel.contains(t) ? '1' : '0'; });
  }
  return bits;
}

inline std::string encode(const Structure& s) {
  std::vector<std::string> names;
  for (const auto& sym : s.symbols()) names.push_back(sym.name);
  return encode(s, s.domain(), names);
}

inline Structure decode(const std::string& bits, const std::vector<RelationSymbol>& symbols) {
  auto one = bits.find('1');
  if (one == std::string::npos) throw DecodeError("missing separator bit");
  for (std::size_t i = 0; i < one; ++i)
    if (bits[i] != '0') throw DecodeError("malformed domain prefix");
  const std::size_t n = one;
  if (n == 0) throw DecodeError("empty domain");
  std::size_t expected = n + 1;
  for (const auto& sym : symbols) {
    std::size_t block = 1;
    for (std::size_t i = 0; i < sym.arity; ++i) block *= n;
    expected += block;
  }
  if (bits.size() != expected)
    throw DecodeError("payload length " + std::to_string(bits.size() - n - 1) + ", expected " +
                      std::to_string(expected - n - 1));
  Structure s(n);
  for (const auto& sym : symbols) s.declare(sym);
  std::size_t pos = n + 1;
  for (const auto& sym : symbols) {
    std::vector<Tuple> tuples;
    detail::for_each_tuple(s.domain(), sym.arity, [&](const Tuple& t) {
      char c = bits[pos++];
      if (c == '1')
        tuples.push_back(t);
      else if (c != '0')
        throw DecodeError("non-binary character in payload");
    });
    s.set_relation(sym.name, Relation(sym.arity, std::move(tuples)));
  }
  return s;
}

inline Structure decode(const std::string& bits, const std::vector<std::size_t>& arities) {
  std::vector<RelationSymbol> symbols;
  for (std::size_t i = 0; i < arities.size(); ++i)
    symbols.push_back({"R" + std::to_string(i + 1), arities[i]});
  return decode(bits, symbols);
}

}  // namespace gts
