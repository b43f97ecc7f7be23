#pragma once

// Unary width-one generalized quantifiers. A quantifier is closed under
// isomorphism, so on a structure (A, B) it only sees |A| and |B|; we store it
// as a membership predicate on that pair.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gts/core.hpp"
#include "gts/diagnostic.hpp"
#include "gts/structure.hpp"

namespace gts {

struct QuantifierDef {
  std::string name;
  /// membership(domain size n, witness-set size m), m ≤ n.
  std::function<bool(std::size_t, std::size_t)> membership;
};

/// Thrown when Q^𝔄 would have to enumerate more than 2^cap subsets.
class QuantifierCapError : public EvalError {
 public:
  using EvalError::EvalError;
};

inline constexpr std::size_t kDefaultQuantifierCap = 12;

class QuantifierRegistry {
 public:
  /// Throws std::invalid_argument on a duplicate name.
  void add(QuantifierDef q);
  const QuantifierDef* find(const std::string& name) const;
  const QuantifierDef& at(const std::string& name) const;
  std::set<std::string> names() const;
  std::size_t size() const { return defs_.size(); }

 private:
  std::map<std::string, QuantifierDef> defs_;
};

/// exists (m ≥ 1), forall (m = n), even (m even), majority (2m > n).
QuantifierRegistry builtin_quantifiers();

/// Q^𝔄: every S ⊆ A whose size passes the membership test, each sorted, in
/// increasing bitmask order over the sorted domain.
std::vector<std::vector<ElementId>> q_interpretation(const QuantifierDef& q, const Structure& s,
                                                     std::size_t cap = kDefaultQuantifierCap);

/// Reads `quant Name: n m -> 0|1` lines (comments start with '#'). Pairs not
/// listed are outside the quantifier. Definitions are added to `into`.
std::optional<Diagnostic> load_quantifier_table(const std::string& text,
                                                QuantifierRegistry& into);

// ---------------------------------------------------------------------------

inline void QuantifierRegistry::add(QuantifierDef q) {
  if (defs_.contains(q.name)) throw std::invalid_argument("duplicate quantifier " + q.name);
  auto name = q.name;
  defs_.emplace(std::move(name), std::move(q));
}

inline const QuantifierDef* QuantifierRegistry::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

inline const QuantifierDef& QuantifierRegistry::at(const std::string& name) const {
  if (auto* q = find(name)) return *q;
  throw EvalError("unknown quantifier " + name);
}

inline std::set<std::string> QuantifierRegistry::names() const {
  std::set<std::string> out;
  for (const auto& [name, _] : defs_) out.insert(name);
  return out;
}

inline QuantifierRegistry builtin_quantifiers() {
  QuantifierRegistry r;
  r.add({"exists", [](std::size_t, std::size_t m) { return m >= 1; }});
  r.add({"forall", [](std::size_t n, std::size_t m) { return m == n; }});
  r.add({"even", [](std::size_t, std::size_t m) { return m % 2 == 0; }});
  r.add({"majority", [](std::size_t n, std::size_t m) { return 2 * m > n; }});
  return r;
}

inline std::vector<std::vector<ElementId>> q_interpretation(const QuantifierDef& q,
                                                            const Structure& s, std::size_t cap) {
  const std::size_t n = s.size();
  if (n > cap || n >= 63)
    throw QuantifierCapError("quantifier " + q.name + ": domain of size " + std::to_string(n) +
                             " exceeds the enumeration cap " + std::to_string(cap));
  std::vector<std::vector<ElementId>> out;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < limit; ++mask) {
    std::size_t m = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (!q.membership(n, m)) continue;
    std::vector<ElementId> subset;
    subset.reserve(m);
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) subset.push_back(s.domain()[i]);
    out.push_back(std::move(subset));
  }
  return out;
}

inline std::optional<Diagnostic> load_quantifier_table(const std::string& text,
                                                       QuantifierRegistry& into) {
  std::map<std::string, std::set<std::pair<std::size_t, std::size_t>>> tables;
  std::vector<std::string> order;
  std::size_t offset = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t line_begin = offset;
    offset += line.size() + 1;
    auto content = line.substr(0, line.find('#'));
    if (content.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& msg) {
      return Diagnostic{span_at(text, line_begin, line_begin + line.size()), msg};
    };
    std::istringstream ls(content);
    std::string kw, name;
    ls >> kw >> name;
    if (kw != "quant" || name.size() < 2 || name.back() != ':')
      return fail("expected `quant Name: n m -> 0|1`");
    name.pop_back();
    long long n = -1, m = -1;
    std::string arrow;
    int bit = -1;
    if (!(ls >> n >> m >> arrow >> bit) || arrow != "->" || (bit != 0 && bit != 1))
      return fail("expected `quant Name: n m -> 0|1`");
    std::string rest;
    if (ls >> rest) return fail("trailing text after quantifier entry");
    if (n < 1 || m < 0 || m > n) return fail("need 1 <= n and 0 <= m <= n");
    if (!tables.contains(name)) order.push_back(name);
    auto& table = tables[name];
    if (bit == 1) table.insert({static_cast<std::size_t>(n), static_cast<std::size_t>(m)});
  }
  for (const auto& name : order) {
    if (into.find(name)) return Diagnostic{span_at(text, 0, 0), "duplicate quantifier " + name};
    auto table = tables[name];
    into.add({name, [table](std::size_t n, std::size_t m) { return table.contains({n, m}); }});
  }
  return std::nullopt;
}

}  // namespace gts
