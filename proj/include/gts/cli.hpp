#pragma once

// The `gts` command line. run_cli takes its streams as parameters so the
// commands can be driven in-process.
//
// Exit codes: 0 proven true / accept, 1 proven false / reject, 2 unknown or
// budget exhausted, 64 usage error, 65 malformed input, 66 missing file,
// 70 internal failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gts/parser.hpp"
#include "gts/quantifier.hpp"
#include "gts/selftest.hpp"
#include "gts/solver.hpp"
#include "gts/tmcompile.hpp"

namespace gts {

namespace exit_code {
inline constexpr int kTrue = 0;
inline constexpr int kFalse = 1;
inline constexpr int kUnknown = 2;
inline constexpr int kUsage = 64;
inline constexpr int kData = 65;
inline constexpr int kNoInput = 66;
inline constexpr int kSoftware = 70;
}  // namespace exit_code

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

// ---------------------------------------------------------------------------

namespace cli {

struct Failure {
  int code;
  std::string message;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{exit_code::kNoInput, "cannot open " + path};
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

template <class T>
T take(Parsed<T> parsed, const std::string& source) {
  if (!parsed) throw Failure{exit_code::kData, source + ":" + parsed.diagnostic().to_string()};
  return std::move(parsed).value();
}

inline int verdict_code(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::ProvenTrue: return exit_code::kTrue;
    case VerdictKind::ProvenFalse: return exit_code::kFalse;
    case VerdictKind::Unknown: break;
  }
  return exit_code::kUnknown;
}

inline int run_code(RunOutcome o) {
  switch (o) {
    case RunOutcome::Accept: return exit_code::kTrue;
    case RunOutcome::Reject: return exit_code::kFalse;
    case RunOutcome::ExhaustedBudget: break;
  }
  return exit_code::kUnknown;
}

inline Sign parse_sign(const std::string& s) {
  if (s == "+") return Sign::Plus;
  if (s == "-") return Sign::Minus;
  throw Failure{exit_code::kUsage, "--sign takes + or -"};
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

inline std::uint32_t parse_element(const std::string& text, const Structure& a) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw Failure{exit_code::kUsage, "not an element: " + text};
  if (!a.contains(ElementId{static_cast<std::uint32_t>(v)}))
    throw Failure{exit_code::kUsage, "element " + text + " is not in the domain"};
  return static_cast<std::uint32_t>(v);
}

// `x=3;y=0;$X=(0,1)(1,1)`: element variables take a domain element,
// relation variables a list of tuples.
inline Assignment parse_assignment(const std::string& text, const Formula& phi, const Structure& a) {
  Assignment f;
  if (text.empty()) return f;
  const FreeSet free = free_variables(phi);
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Failure{exit_code::kUsage, "expected name=value in --assign: " + item};
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (name.starts_with("$")) {
      const RelationVariable* var = nullptr;
      for (const auto& s : free)
        if (auto* r = std::get_if<RelationVariable>(&s); r && r->name == name.substr(1)) var = r;
      if (!var) throw Failure{exit_code::kUsage, name + " is not a free relation variable"};
      std::vector<Tuple> tuples;
      std::size_t i = 0;
      while ((i = value.find('(', i)) != std::string::npos) {
        const auto close = value.find(')', i);
        if (close == std::string::npos) throw Failure{exit_code::kUsage, "unclosed tuple in " + item};
        Tuple t;
        for (const auto& e : split(value.substr(i + 1, close - i - 1), ',')) t.emplace_back(parse_element(e, a));
        if (t.size() != var->arity)
          throw Failure{exit_code::kUsage, "tuple of wrong arity for " + name};
        tuples.push_back(std::move(t));
        i = close + 1;
      }
      f.set(*var, Relation(var->arity, std::move(tuples)));
    } else {
      f.set(VariableId{name}, ElementId{parse_element(value, a)});
    }
  }
  return f;
}

inline void require_assigned(const Formula& phi, const Assignment& f) {
  for (const auto& s : free_variables(phi)) {
    if (auto* x = std::get_if<VariableId>(&s); x && !f.get(*x))
      throw Failure{exit_code::kUsage, "free variable " + x->name + " needs a value (use --assign)"};
    if (auto* r = std::get_if<RelationVariable>(&s); r && !f.get(*r))
      throw Failure{exit_code::kUsage, "free relation variable $" + r->name + " needs a value (use --assign)"};
  }
}

inline void print_stats(std::ostream& out, const SearchStats& s) {
  out << "expanded " << s.expanded << ", memo hits " << s.memo_hits << ", static cutoffs "
      << s.static_cutoffs << ", max depth " << s.max_depth << ", " << s.elapsed_seconds << "s\n";
}

struct SearchFlags {
  std::string sign = "+";
  std::size_t budget = 10000;
  std::size_t step = 1;
  bool geometric = false;
  bool trace = false;
  bool no_memo = false;
  std::size_t quantifier_cap = kDefaultQuantifierCap;

  SearchOptions options(std::ostream& trace_to) const {
    SearchOptions o;
    o.memo = !no_memo;
    o.step = step;
    o.geometric = geometric;
    o.trace = trace ? &trace_to : nullptr;
    return o;
  }
};

inline void add_search_flags(CLI::App* cmd, SearchFlags& f) {
  cmd->add_option("--sign", f.sign, "Sign of the game: + or -")->check(CLI::IsMember({"+", "-"}));
  cmd->add_option("--budget", f.budget, "Round budget")->check(CLI::PositiveNumber);
  cmd->add_option("--step", f.step, "Deepening step")->check(CLI::PositiveNumber);
  cmd->add_flag("--geometric", f.geometric, "Double the depth on each deepening step");
  cmd->add_flag("--trace", f.trace, "Print every expanded position to stderr");
  cmd->add_flag("--no-memo", f.no_memo, "Disable the transposition table");
  cmd->add_option("--quantifier-cap", f.quantifier_cap, "Largest domain for quantifier games");
}

// The model, formula and assignment a game starts from.
struct GameInput {
  Formula phi;
  Structure model;
  Assignment f;
};

struct GameSources {
  std::string model_file;
  std::string formula_file;
  std::string expression;
  std::string machine_file;
  std::string word;
  std::string assign;
  std::string quantifier_file;
};

inline void add_game_sources(CLI::App* cmd, GameSources& s) {
  cmd->add_option("model", s.model_file, "Structure in .model format");
  cmd->add_option("formula", s.formula_file, "Formula in .lform format");
  cmd->add_option("-e,--expr", s.expression, "Formula text instead of a formula file");
  cmd->add_option("--tm", s.machine_file, "Use the compiled sentence of this machine");
  cmd->add_option("--word", s.word, "Input word for --tm");
  cmd->add_option("--assign", s.assign, "Values for free variables: x=3;$X=(0,1)");
  cmd->add_option("--quantifiers", s.quantifier_file, "Extra quantifier table");
}

inline GameInput load_game(const GameSources& s, const QuantifierRegistry& registry) {
  if (!s.machine_file.empty()) {
    if (!s.model_file.empty() || !s.formula_file.empty() || !s.expression.empty())
      throw Failure{exit_code::kUsage, "--tm replaces the model and formula arguments"};
    const TuringMachine tm = take(parse_tm(read_file(s.machine_file)), s.machine_file);
    const auto word = split_word(s.word);
    for (const auto& letter : word)
      if (!tm.is_input_symbol(letter)) throw Failure{exit_code::kUsage, "letter " + letter + " is not in the input alphabet"};
    return {compile(tm), tm_word_model(tm, word), Assignment{}};
  }
  if (s.model_file.empty()) throw Failure{exit_code::kUsage, "a model file is required"};
  if (s.formula_file.empty() == s.expression.empty())
    throw Failure{exit_code::kUsage, "give exactly one of a formula file or --expr"};
  const ParsedModel m = take(parse_model(read_file(s.model_file)), s.model_file);
  const std::string text = s.expression.empty() ? read_file(s.formula_file) : s.expression;
  const std::string source = s.expression.empty() ? s.formula_file : "<expr>";
  Formula phi = take(parse_formula(text, m.vocabulary, &registry), source);
  Assignment f = parse_assignment(s.assign, phi, m.structure);
  require_assigned(phi, f);
  return {std::move(phi), m.structure, std::move(f)};
}

inline QuantifierRegistry load_registry(const std::string& path) {
  QuantifierRegistry registry = builtin_quantifiers();
  if (!path.empty())
    if (auto d = load_quantifier_table(read_file(path), registry))
      throw Failure{exit_code::kData, path + ":" + d->to_string()};
  return registry;
}

inline int cmd_eval(const GameSources& src, const SearchFlags& flags, std::ostream& out,
                    std::ostream& err) {
  const QuantifierRegistry registry = load_registry(src.quantifier_file);
  const GameInput input = load_game(src, registry);
  Game game(input.phi, GameOptions{&registry, flags.quantifier_cap});
  Solver solver(game, flags.options(err));
  const Verdict v = solver.evaluate(game.initial_position(input.model, input.f, parse_sign(flags.sign)),
                                    flags.budget);
  out << v.to_string() << "\n";
  print_stats(out, solver.stats());
  return verdict_code(v);
}

inline int cmd_run_tm(const std::string& machine, const std::string& word, std::size_t budget,
                      std::ostream& out) {
  const TuringMachine tm = take(parse_tm(read_file(machine)), machine);
  RunResult r;
  try {
    r = simulate(tm, split_word(word), budget);
  } catch (const std::invalid_argument& e) {
    throw Failure{exit_code::kUsage, e.what()};
  }
  out << outcome_name(r.outcome) << " after " << r.steps << " steps in state " << r.state << "\n";
  out << "tape:";
  for (std::size_t i = 0; i < r.tape.size(); ++i) out << (i == r.head ? " [" : " ") << r.tape[i] << (i == r.head ? "]" : "");
  out << "\n";
  return run_code(r.outcome);
}

inline int cmd_compile_tm(const std::string& machine, std::ostream& out) {
  const TuringMachine tm = take(parse_tm(read_file(machine)), machine);
  out << pretty_print(compile(tm)) << "\n";
  return exit_code::kTrue;
}

inline int cmd_certify(const std::string& machine, const std::string& word, std::size_t budget,
                       const std::string& output, std::ostream& out) {
  const TuringMachine tm = take(parse_tm(read_file(machine)), machine);
  const auto letters = split_word(word);
  RunResult run;
  try {
    run = simulate(tm, letters, budget);
  } catch (const std::invalid_argument& e) {
    throw Failure{exit_code::kUsage, e.what()};
  }
  out << "run: " << outcome_name(run.outcome) << " after " << run.steps << " steps\n";
  if (run.outcome == RunOutcome::ExhaustedBudget) {
    out << "no certificate: the run did not halt within " << budget << " steps\n";
    return exit_code::kUnknown;
  }
  const auto cert = emit_certificate(tm, letters, budget);
  if (!cert) throw Failure{exit_code::kSoftware, "certificate construction failed"};
  const Formula phi = compile(tm);
  Game game(phi);
  std::ostringstream lines;
  for (const auto& [key, move] : cert->strategy.moves) lines << key << " -> " << game.move_text(move) << "\n";
  if (output.empty()) {
    out << lines.str();
  } else {
    std::ofstream f(output);
    if (!f) throw Failure{exit_code::kNoInput, "cannot write " + output};
    f << lines.str();
  }
  out << "certificate: sign " << sign_char(cert->sign) << ", " << cert->strategy.moves.size()
      << " positions, " << (cert->verification.verified ? "verified" : "NOT verified") << " within "
      << cert->verification.bound << " rounds\n";
  if (!cert->verification.verified) throw Failure{exit_code::kSoftware, cert->verification.reason};
  return run_code(run.outcome);
}

inline int cmd_encode(const std::string& model_file, const std::string& order,
                      const std::string& symbols, std::ostream& out) {
  const ParsedModel m = take(parse_model(read_file(model_file)), model_file);
  std::vector<ElementId> elements = m.structure.domain();
  if (!order.empty()) {
    elements.clear();
    for (const auto& e : split(order, ',')) elements.push_back(ElementId{parse_element(e, m.structure)});
  }
  std::vector<std::string> names;
  for (const auto& sym : m.vocabulary.symbols()) names.push_back(sym.name);
  if (!symbols.empty()) names = split(symbols, ',');
  try {
    out << encode(m.structure, elements, names) << "\n";
  } catch (const std::invalid_argument& e) {
    throw Failure{exit_code::kUsage, e.what()};
  }
  return exit_code::kTrue;
}

inline std::string role_name(Player p) { return p == Player::Verifier ? "verifier" : "falsifier"; }

// Smallest d ≤ budget with wins(p, who, d), if any.
inline std::optional<std::size_t> winning_depth(Solver& solver, const Position& p, Player who,
                                                std::size_t budget) {
  if (!solver.wins(p, who, budget)) return std::nullopt;
  std::size_t lo = 0, hi = budget;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (solver.wins(p, who, mid) ? hi : lo) = mid;
  }
  return solver.wins(p, who, lo) ? lo : hi;
}

inline int cmd_play(const GameSources& src, const SearchFlags& flags, const std::string& role,
                    std::istream& in, std::ostream& out, std::ostream& err) {
  const QuantifierRegistry registry = load_registry(src.quantifier_file);
  const GameInput input = load_game(src, registry);
  Game game(input.phi, GameOptions{&registry, flags.quantifier_cap});
  Solver solver(game, flags.options(err));
  const Player human = role == "verifier" ? Player::Verifier : Player::Falsifier;
  const Player engine = opponent(human);
  Position p = game.initial_position(input.model, input.f, parse_sign(flags.sign));
  out << "you play the " << role_name(human) << "; enter a move number or q to quit\n";
  for (std::size_t round = 1;; ++round) {
    const TerminalStatus status = game.terminal_status(p);
    if (!status.ongoing()) {
      out << "position " << game.canonical(p) << "\n";
      out << (*status.winner == Player::Verifier ? "∃ wins" : "∀ wins") << "\n";
      return *status.winner == Player::Verifier ? exit_code::kTrue : exit_code::kFalse;
    }
    const auto moves = game.legal_moves(p);
    const auto mover = game.mover(p);
    out << "round " << round << ": " << game.canonical(p) << "\n";
    if (!mover) {
      out << "forced: " << game.move_text(moves.front()) << "\n";
      p = game.apply_move(p, moves.front());
      continue;
    }
    if (*mover == engine) {
      std::size_t pick = 0;
      if (auto d = winning_depth(solver, p, engine, flags.budget); d && *d > 0) {
        for (std::size_t i = 0; i < moves.size(); ++i)
          if (solver.wins(game.apply_move(p, moves[i]), engine, *d - 1)) {
            pick = i;
            break;
          }
      }
      out << "engine (" << role_name(engine) << ") plays " << game.move_text(moves[pick]) << "\n";
      p = game.apply_move(p, moves[pick]);
      continue;
    }
    for (std::size_t i = 0; i < moves.size(); ++i) out << "  " << i << ") " << game.move_text(moves[i]) << "\n";
    while (true) {
      out << "> " << std::flush;
      std::string line;
      if (!std::getline(in, line) || line == "q" || line == "quit") {
        out << "session ended without a winner\n";
        return exit_code::kUnknown;
      }
      std::size_t used = 0;
      std::size_t index = moves.size();
      try {
        index = std::stoul(line, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == line.size() && used > 0 && index < moves.size()) {
        p = game.apply_move(p, moves[index]);
        break;
      }
      out << "enter a number between 0 and " << moves.size() - 1 << "\n";
    }
  }
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Game-theoretic evaluation of logic with loops and tape operations", "gts"};
  app.require_subcommand(1);

  cli::SearchFlags search;
  cli::GameSources sources;
  std::string machine, word, output, order, symbols, role = "verifier";
  std::size_t run_budget = 10000;
  std::uint64_t seed = SelftestConfig{}.seed;

  auto* eval = app.add_subcommand("eval", "Decide who wins the semantic game");
  cli::add_game_sources(eval, sources);
  cli::add_search_flags(eval, search);

  auto* run_tm = app.add_subcommand("run-tm", "Simulate a Turing machine on a word");
  run_tm->add_option("machine", machine, "Machine in .tm format")->required();
  run_tm->add_option("word", word, "Input word, one letter per character or comma separated");
  run_tm->add_option("--budget", run_budget, "Step budget")->check(CLI::PositiveNumber);

  auto* compile_tm = app.add_subcommand("compile-tm", "Print the sentence simulating a machine");
  compile_tm->add_option("machine", machine, "Machine in .tm format")->required();

  auto* certify = app.add_subcommand("certify", "Emit and check a winning strategy from a halting run");
  certify->add_option("machine", machine, "Machine in .tm format")->required();
  certify->add_option("word", word, "Input word");
  certify->add_option("--budget", run_budget, "Step budget for the run")->check(CLI::PositiveNumber);
  certify->add_option("-o,--output", output, "Write the strategy here instead of stdout");

  auto* encode_cmd = app.add_subcommand("encode", "Print the bitstring encoding of a structure");
  encode_cmd->add_option("model", sources.model_file, "Structure in .model format")->required();
  encode_cmd->add_option("--order", order, "Element order, e.g. 1,0,2");
  encode_cmd->add_option("--symbols", symbols, "Symbol order, e.g. R,P");

  auto* play = app.add_subcommand("play", "Play the semantic game against the engine");
  cli::add_game_sources(play, sources);
  cli::add_search_flags(play, search);
  play->add_option("--as", role, "Your role")->check(CLI::IsMember({"verifier", "falsifier"}));

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suites");
  selftest->add_option("--seed", seed, "Seed for the random corpora");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code::kUsage;
  }

  try {
    if (*eval) return cli::cmd_eval(sources, search, out, err);
    if (*run_tm) return cli::cmd_run_tm(machine, word, run_budget, out);
    if (*compile_tm) return cli::cmd_compile_tm(machine, out);
    if (*certify) return cli::cmd_certify(machine, word, run_budget, output, out);
    if (*encode_cmd) return cli::cmd_encode(sources.model_file, order, symbols, out);
    if (*play) return cli::cmd_play(sources, search, role, in, out, err);
    if (*selftest) {
      SelftestConfig cfg;
      cfg.seed = seed;
      bool all = true;
      for (const auto& r : run_selftest(cfg)) {
        out << format_result(r) << "\n";
        all = all && r.passed;
      }
      return all ? exit_code::kTrue : exit_code::kFalse;
    }
  } catch (const cli::Failure& f) {
    err << "gts: " << f.message << "\n";
    return f.code;
  } catch (const EvalError& e) {
    err << "gts: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "gts: " << e.what() << "\n";
    return exit_code::kSoftware;
  }
  return exit_code::kUsage;
}

}  // namespace gts
