#pragma once

// Deterministic single-tape Turing machines over a one-way infinite tape.
// Cell 0 is a blank boundary, the input sits in cells 1..|w| and the head
// starts on cell 0, matching the word models used by the compiler.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gts {

enum class Direction { Left, Right };

struct Transition {
  std::string next;
  std::string write;
  Direction move = Direction::Right;
  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TuringMachine {
  std::vector<std::string> states;
  std::string start;
  std::set<std::string> accepting;
  std::set<std::string> rejecting;
  std::vector<std::string> input_alphabet;  // Σ
  std::vector<std::string> tape_alphabet;   // extra work symbols, disjoint from Σ
  std::string blank = "_";
  std::map<std::pair<std::string, std::string>, Transition> transitions;

  bool is_final(const std::string& q) const {
    return accepting.contains(q) || rejecting.contains(q);
  }
  bool is_input_symbol(const std::string& s) const {
    return std::find(input_alphabet.begin(), input_alphabet.end(), s) != input_alphabet.end();
  }
  bool is_tape_symbol(const std::string& s) const {
    return std::find(tape_alphabet.begin(), tape_alphabet.end(), s) != tape_alphabet.end();
  }
  /// Every symbol the tape can hold: Σ, the work symbols and the blank.
  std::vector<std::string> all_symbols() const {
    std::vector<std::string> out = input_alphabet;
    out.insert(out.end(), tape_alphabet.begin(), tape_alphabet.end());
    out.push_back(blank);
    return out;
  }
  const Transition* find(const std::string& q, const std::string& s) const {
    auto it = transitions.find({q, s});
    return it == transitions.end() ? nullptr : &it->second;
  }

  /// First violated well-formedness condition, if any.
  std::optional<std::string> check() const;
};

enum class RunOutcome { Accept, Reject, ExhaustedBudget };

struct RunResult {
  RunOutcome outcome = RunOutcome::ExhaustedBudget;
  std::size_t steps = 0;
  std::string state;                // state when the run stopped
  std::vector<std::string> tape;    // cells 0.. up to the last visited one
  std::size_t head = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

inline const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Accept: return "Accept";
    case RunOutcome::Reject: return "Reject";
    case RunOutcome::ExhaustedBudget: break;
  }
  return "ExhaustedBudget";
}

/// Runs at most `budget` transitions. A missing transition on a non-final
/// state rejects. Throws std::invalid_argument for a letter outside Σ.
RunResult simulate(const TuringMachine& tm, const std::vector<std::string>& word,
                   std::size_t budget);

// ---------------------------------------------------------------------------

inline std::optional<std::string> TuringMachine::check() const {
  std::set<std::string> qs(states.begin(), states.end());
  if (qs.size() != states.size()) return "duplicate state";
  if (!qs.contains(start)) return "start state " + start + " is not declared";
  for (const auto& q : accepting)
    if (!qs.contains(q)) return "accepting state " + q + " is not declared";
  for (const auto& q : rejecting) {
    if (!qs.contains(q)) return "rejecting state " + q + " is not declared";
    if (accepting.contains(q)) return "state " + q + " is both accepting and rejecting";
  }
  std::set<std::string> sigma(input_alphabet.begin(), input_alphabet.end());
  std::set<std::string> gamma(tape_alphabet.begin(), tape_alphabet.end());
  if (sigma.size() != input_alphabet.size()) return "duplicate input symbol";
  if (gamma.size() != tape_alphabet.size()) return "duplicate tape symbol";
  for (const auto& s : gamma)
    if (sigma.contains(s)) return "symbol " + s + " is in both the input and the tape alphabet";
  if (sigma.contains(blank) || gamma.contains(blank)) return "blank must not be an alphabet symbol";
  auto known = [&](const std::string& s) { return s == blank || sigma.contains(s) || gamma.contains(s); };
  for (const auto& [key, t] : transitions) {
    const auto& [q, s] = key;
    if (!qs.contains(q)) return "transition from undeclared state " + q;
    if (is_final(q)) return "transition out of final state " + q;
    if (!known(s)) return "transition reads unknown symbol " + s;
    if (!qs.contains(t.next)) return "transition targets undeclared state " + t.next;
    if (!known(t.write)) return "transition writes unknown symbol " + t.write;
  }
  return std::nullopt;
}

inline RunResult simulate(const TuringMachine& tm, const std::vector<std::string>& word,
                          std::size_t budget) {
  for (const auto& letter : word)
    if (!tm.is_input_symbol(letter))
      throw std::invalid_argument("letter " + letter + " is not in the input alphabet");
  RunResult r;
  r.tape.push_back(tm.blank);
  r.tape.insert(r.tape.end(), word.begin(), word.end());
  r.state = tm.start;
  while (true) {
    if (tm.accepting.contains(r.state)) {
      r.outcome = RunOutcome::Accept;
      return r;
    }
    if (tm.rejecting.contains(r.state)) {
      r.outcome = RunOutcome::Reject;
      return r;
    }
    if (r.steps >= budget) {
      r.outcome = RunOutcome::ExhaustedBudget;
      return r;
    }
    const Transition* t = tm.find(r.state, r.tape[r.head]);
    ++r.steps;
    if (!t) {
      r.outcome = RunOutcome::Reject;
      return r;
    }
    r.tape[r.head] = t->write;
    r.state = t->next;
    if (t->move == Direction::Right) {
      ++r.head;
      if (r.head == r.tape.size()) r.tape.push_back(tm.blank);
    } else if (r.head > 0) {
      --r.head;
    }
  }
}

}  // namespace gts
