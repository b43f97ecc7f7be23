#pragma once

// Small vocabulary types shared by every module.

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gts {

/// A domain element. Files use 0..N-1; the game may add fresh points above
/// the current maximum.
struct ElementId {
  std::uint32_t value = 0;

  constexpr ElementId() = default;
  constexpr explicit ElementId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(ElementId, ElementId) = default;
};

inline std::ostream& operator<<(std::ostream& os, ElementId e) {
  return os << e.value;
}

using Tuple = std::vector<ElementId>;

inline Tuple make_tuple(std::initializer_list<std::uint32_t> values) {
  Tuple t;
  t.reserve(values.size());
  for (auto v : values) t.emplace_back(v);
  return t;
}

/// Raised when evaluation hits a state the semantics leaves undefined, such
/// as an atom whose individual variable was never bound.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sign : std::uint8_t { Plus, Minus };

constexpr Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
constexpr char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

/// The two players. Verifier is written ∃, Falsifier ∀.
enum class Player : std::uint8_t { Verifier, Falsifier };

constexpr Player opponent(Player p) {
  return p == Player::Verifier ? Player::Falsifier : Player::Verifier;
}

inline const char* player_name(Player p) {
  return p == Player::Verifier ? "E" : "A";
}

/// The player who chooses at a "positive" choice point (∃x, insertions,
/// deletions, loop atoms) under the given sign. Conjunctions use the opposite.
constexpr Player existential_chooser(Sign s) {
  return s == Sign::Plus ? Player::Verifier : Player::Falsifier;
}
constexpr Player conjunction_chooser(Sign s) {
  return s == Sign::Plus ? Player::Falsifier : Player::Verifier;
}

inline std::string tuple_text(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(t[i].value);
  }
  out += ')';
  return out;
}

}  // namespace gts

template <>
struct std::hash<gts::ElementId> {
  std::size_t operator()(gts::ElementId e) const noexcept {
    return std::hash<std::uint32_t>{}(e.value);
  }
};
