#pragma once

// Bounded game search. wins(p, X, d) asks whether player X has a strategy
// from p that wins every play within d transitions. The predicate is
// monotone in d, which the memo table and evaluate() rely on.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gts/game.hpp"
#include "gts/tarski.hpp"

namespace gts {

enum class VerdictKind { ProvenTrue, ProvenFalse, Unknown };

/// ProvenTrue(n): ∃ wins within n rounds. ProvenFalse(n): ∀ does.
/// Unknown(b): neither within the budget b.
struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::size_t bound = 0;

  static Verdict proven_true(std::size_t n) { return {VerdictKind::ProvenTrue, n}; }
  static Verdict proven_false(std::size_t n) { return {VerdictKind::ProvenFalse, n}; }
  static Verdict unknown(std::size_t budget) { return {VerdictKind::Unknown, budget}; }

  std::string to_string() const {
    switch (kind) {
      case VerdictKind::ProvenTrue: return "ProvenTrue(" + std::to_string(bound) + ")";
      case VerdictKind::ProvenFalse: return "ProvenFalse(" + std::to_string(bound) + ")";
      case VerdictKind::Unknown: break;
    }
    return "Unknown(" + std::to_string(bound) + ")";
  }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class BoundedValue { Win, Lose, Unknown };

struct SearchOptions {
  bool memo = true;
  /// Use the static forcing tables of the game as cutoffs.
  bool static_cutoffs = true;
  /// Iterative deepening schedule: multiples of `step`, or powers of two.
  std::size_t step = 1;
  bool geometric = false;
  /// One line per expanded position when set.
  std::ostream* trace = nullptr;
  /// The memo is cleared when it grows past this many entries.
  std::size_t memo_limit = 4'000'000;
};

struct SearchStats {
  std::uint64_t expanded = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t static_cutoffs = 0;
  std::size_t max_depth = 0;  // deepest ply expanded below a queried position
  double elapsed_seconds = 0;
};

/// A positional strategy for one player, keyed by canonical position text.
struct Strategy {
  Player owner = Player::Verifier;
  std::map<std::string, Move> moves;

  const Move* lookup(const std::string& canonical) const {
    auto it = moves.find(canonical);
    return it == moves.end() ? nullptr : &it->second;
  }
};

struct PlayStep {
  std::string position;
  std::string move;  // empty at the final position
};

/// Either every play consistent with the strategy is won by its owner within
/// `bound` rounds, or `counterexample` is a play showing otherwise.
struct VerifyResult {
  bool verified = false;
  std::size_t bound = 0;
  std::vector<PlayStep> counterexample;
  std::string reason;
};

class Solver {
 public:
  explicit Solver(const Game& game, SearchOptions options = {})
      : game_(game), options_(options) {}

  bool wins(const Position& p, Player who, std::size_t depth);
  BoundedValue bounded_value(const Position& p, Player who, std::size_t depth);
  Verdict evaluate(const Position& p, std::size_t budget);
  /// A strategy for `who` winning within `depth`, or nullopt when none exists.
  std::optional<Strategy> extract_strategy(const Position& p, Player who, std::size_t depth);

  const SearchStats& stats() const { return stats_; }
  void clear_memo() {
    memo_[0].clear();
    memo_[1].clear();
  }

 private:
  struct MemoEntry {
    std::size_t true_from = std::numeric_limits<std::size_t>::max();
    std::size_t false_upto = 0;
    bool has_false = false;
  };
  struct Frame {
    std::string key;
    std::size_t depth;
    bool any;  // who moves here: one winning child suffices
    std::vector<Position> children;
    std::size_t next = 0;
  };

  std::unordered_map<std::string, MemoEntry>& memo(Player who) {
    return memo_[who == Player::Verifier ? 0 : 1];
  }
  std::optional<bool> quick(const Position& p, const std::string& key, Player who,
                            std::size_t depth);
  void record(const std::string& key, Player who, std::size_t depth, bool value);
  std::vector<Position> successors(const Position& p);

  const Game& game_;
  SearchOptions options_;
  SearchStats stats_;
  std::unordered_map<std::string, MemoEntry> memo_[2];
};

/// Checks the strategy against every opponent reply, up to `max_rounds`.
/// With `accept_static_wins`, a position where the game's forcing tables
/// show that the owner can steer into a won atom counts as a won leaf; the
/// length of that forcing path enters the bound.
VerifyResult verify_strategy(const Game& game, const Position& start, const Strategy& strategy,
                             std::size_t max_rounds, bool accept_static_wins = false);

// ---------------------------------------------------------------------------

inline std::vector<Position> Solver::successors(const Position& p) {
  std::vector<Position> out;
  for (const auto& m : game_.legal_moves(p)) out.push_back(game_.apply_move(p, m));
  return out;
}

inline void Solver::record(const std::string& key, Player who, std::size_t depth, bool value) {
  if (!options_.memo) return;
  auto& table = memo(who);
  if (table.size() >= options_.memo_limit) table.clear();
  auto& e = table[key];
  if (value) {
    e.true_from = std::min(e.true_from, depth);
  } else if (!e.has_false || e.false_upto < depth) {
    e.false_upto = depth;
    e.has_false = true;
  }
}

// Answers without expanding p when the memo, the terminal status or the
// static tables already decide it.
inline std::optional<bool> Solver::quick(const Position& p, const std::string& key, Player who,
                                         std::size_t depth) {
  if (options_.memo) {
    auto& table = memo(who);
    auto it = table.find(key);
    if (it != table.end()) {
      if (depth >= it->second.true_from) {
        ++stats_.memo_hits;
        return true;
      }
      if (it->second.has_false && depth <= it->second.false_upto) {
        ++stats_.memo_hits;
        return false;
      }
    }
  }
  auto status = game_.terminal_status(p);
  if (!status.ongoing()) return *status.winner == who;
  if (depth == 0) return false;
  if (options_.static_cutoffs) {
    auto s = game_.static_outcome(p);
    if (s.for_player(opponent(who))) {
      ++stats_.static_cutoffs;
      record(key, who, std::numeric_limits<std::size_t>::max(), false);
      return false;
    }
    if (auto len = s.for_player(who); len && *len <= depth) {
      ++stats_.static_cutoffs;
      record(key, who, *len, true);
      return true;
    }
  }
  return std::nullopt;
}

inline bool Solver::wins(const Position& root, Player who, std::size_t depth) {
  const std::string root_key = game_.canonical(root);
  if (auto r = quick(root, root_key, who, depth)) return *r;

  std::vector<Frame> stack;
  auto open = [&](const Position& p, std::string key, std::size_t d) {
    ++stats_.expanded;
    stats_.max_depth = std::max(stats_.max_depth, depth - d);
    if (options_.trace) {
      auto m = game_.mover(p);
      *options_.trace << "[" << d << "] " << (m ? player_name(*m) : "-") << " " << key << "\n";
    }
    Frame f{std::move(key), d, game_.mover(p) == who, successors(p), 0};
    stack.push_back(std::move(f));
  };
  open(root, root_key, depth);

  std::optional<bool> pending;
  while (true) {
    Frame& f = stack.back();
    bool done = false;
    bool value = false;
    if (pending) {
      bool r = *pending;
      pending.reset();
      if (r == f.any) {
        done = true;
        value = r;
      }
    }
    if (!done) {
      if (f.next < f.children.size()) {
        const Position& child = f.children[f.next++];
        std::string key = game_.canonical(child);
        if (auto r = quick(child, key, who, f.depth - 1))
          pending = r;
        else
          open(child, std::move(key), f.depth - 1);
        continue;
      }
      done = true;
      value = !f.any;
    }
    record(f.key, who, f.depth, value);
    stack.pop_back();
    if (stack.empty()) return value;
    pending = value;
  }
}

inline BoundedValue Solver::bounded_value(const Position& p, Player who, std::size_t depth) {
  if (wins(p, who, depth)) return BoundedValue::Win;
  if (wins(p, opponent(who), depth)) return BoundedValue::Lose;
  return BoundedValue::Unknown;
}

inline Verdict Solver::evaluate(const Position& p, std::size_t budget) {
  const auto started = std::chrono::steady_clock::now();
  struct Timer {
    SearchStats& stats;
    std::chrono::steady_clock::time_point started;
    ~Timer() {
      stats.elapsed_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
  } timer{stats_, started};
  std::optional<Player> winner;
  for (Player who : {Player::Verifier, Player::Falsifier})
    if (wins(p, who, budget)) {
      winner = who;
      break;
    }
  if (!winner) return Verdict::unknown(budget);

  auto decided = [&](std::size_t n) {
    return *winner == Player::Verifier ? Verdict::proven_true(n) : Verdict::proven_false(n);
  };
  if (options_.geometric) {
    for (std::size_t d = 1; d < budget; d *= 2)
      if (wins(p, *winner, d)) return decided(d);
    return decided(budget);
  }
  // Least multiple of the step that decides; wins() is monotone in the depth,
  // so a bisection over the schedule finds the same level as scanning it.
  const std::size_t step = std::max<std::size_t>(options_.step, 1);
  std::size_t lo = 0, hi = (budget + step - 1) / step;  // level hi*step is known to win
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (wins(p, *winner, std::min(mid * step, budget)))
      hi = mid;
    else
      lo = mid;
  }
  if (hi == 1 && wins(p, *winner, 0)) return decided(0);
  return decided(std::min(hi * step, budget));
}

inline std::optional<Strategy> Solver::extract_strategy(const Position& p, Player who,
                                                        std::size_t depth) {
  if (!wins(p, who, depth)) return std::nullopt;
  Strategy strategy{who, {}};
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::pair<Position, std::size_t>> work{{p, depth}};
  while (!work.empty()) {
    auto [pos, d] = std::move(work.back());
    work.pop_back();
    if (!game_.terminal_status(pos).ongoing()) continue;
    auto key = game_.canonical(pos);
    auto it = seen.find(key);
    if (it != seen.end() && it->second <= d) continue;
    seen[key] = d;
    auto moves = game_.legal_moves(pos);
    if (game_.mover(pos) == who) {
      bool found = false;
      for (const auto& m : moves) {
        auto child = game_.apply_move(pos, m);
        if (wins(child, who, d - 1)) {
          strategy.moves.insert_or_assign(key, m);
          work.emplace_back(std::move(child), d - 1);
          found = true;
          break;
        }
      }
      if (!found) throw std::logic_error("winning position without a winning move");
    } else {
      for (const auto& m : moves) work.emplace_back(game_.apply_move(pos, m), d - 1);
    }
  }
  return strategy;
}

// Post-order walk over the plays allowed by the strategy. A position met
// again on the current play is a cycle, hence a play the owner never wins.
inline VerifyResult verify_strategy(const Game& game, const Position& start,
                                    const Strategy& strategy, std::size_t max_rounds,
                                    bool accept_static_wins) {
  struct Node {
    Position pos;
    std::string key;
    std::vector<std::pair<Move, Position>> children;
    std::size_t next = 0;
    std::size_t height = 0;
  };
  VerifyResult result;
  std::unordered_map<std::string, std::size_t> height;  // finished positions
  std::set<std::string> on_path;
  std::vector<Node> stack;

  auto fail = [&](const std::string& reason) {
    result.verified = false;
    result.reason = reason;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      std::string mv;
      if (i + 1 < stack.size() && stack[i].next > 0)
        mv = game.move_text(stack[i].children[stack[i].next - 1].first);
      result.counterexample.push_back({stack[i].key, mv});
    }
    return result;
  };

  // Returns false when the position cannot be opened (failure recorded).
  auto open = [&](Position pos) -> std::optional<std::string> {
    Node n{std::move(pos), {}, {}, 0, 0};
    n.key = game.canonical(n.pos);
    auto status = game.terminal_status(n.pos);
    stack.push_back(std::move(n));
    Node& top = stack.back();
    if (!status.ongoing()) {
      if (*status.winner != strategy.owner) return std::string("play lost by the strategy owner");
      return std::nullopt;
    }
    if (accept_static_wins) {
      if (auto len = game.static_outcome(top.pos).for_player(strategy.owner)) {
        top.height = *len;
        if (stack.size() - 1 + *len > max_rounds)
          return std::string("play exceeds the round bound");
        return std::nullopt;
      }
    }
    if (stack.size() > max_rounds) return std::string("play exceeds the round bound");
    if (on_path.contains(top.key)) return std::string("play revisits a position");
    on_path.insert(top.key);
    if (game.mover(top.pos) == strategy.owner) {
      const Move* m = strategy.lookup(top.key);
      if (!m) return std::string("strategy has no move here");
      auto legal = game.legal_moves(top.pos);
      if (std::find(legal.begin(), legal.end(), *m) == legal.end())
        return std::string("strategy move is not legal here");
      top.children.emplace_back(*m, game.apply_move(top.pos, *m));
    } else {
      for (auto& m : game.legal_moves(top.pos)) {
        auto child = game.apply_move(top.pos, m);
        top.children.emplace_back(std::move(m), std::move(child));
      }
    }
    return std::nullopt;
  };

  if (auto err = open(start)) return fail(*err);
  std::size_t last = 0;
  bool returning = false;
  while (!stack.empty()) {
    Node& top = stack.back();
    if (returning) {
      top.height = std::max(top.height, last + 1);
      returning = false;
    }
    if (top.next < top.children.size()) {
      const auto& [mv, child] = top.children[top.next++];
      auto key = game.canonical(child);
      auto done = height.find(key);
      if (done != height.end() && !on_path.contains(key) &&
          stack.size() + done->second <= max_rounds) {
        top.height = std::max(top.height, done->second + 1);
        continue;
      }
      if (auto err = open(child)) return fail(*err);
      continue;
    }
    last = top.height;
    on_path.erase(top.key);
    height[top.key] = top.height;
    stack.pop_back();
    returning = true;
  }
  result.verified = true;
  result.bound = last;
  return result;
}

}  // namespace gts
