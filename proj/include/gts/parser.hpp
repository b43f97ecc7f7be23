#pragma once

// Text formats: `.lform` formulas, `.model` structures and `.tm` machines,
// plus a printer whose output parses back to the same core formula.
//
//   formula := "~" formula | "(" formula ("&" | "|" | "->") formula ")"
//            | ("exists" | "forall" | "new") var formula
//            | ("ins" | "del") relatom formula
//            | "#" nat "{" formula "}" | "#" nat
//            | "Q<" name ">" var formula
//            | relatom | var "=" var | "T" | "F"
//   relatom := (Rel | "$" Rel) "(" var ("," var)* ")"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gts/ast.hpp"
#include "gts/diagnostic.hpp"
#include "gts/quantifier.hpp"
#include "gts/structure.hpp"
#include "gts/tm.hpp"

namespace gts {

/// Parses, desugars and validates against σ. Quantifier nodes are accepted
/// only when `quantifiers` is given and knows the name.
Parsed<Formula> parse_formula(const std::string& text, const Vocabulary& sigma,
                              const QuantifierRegistry* quantifiers = nullptr);

struct ParsedModel {
  Vocabulary vocabulary;
  Structure structure;
};
Parsed<ParsedModel> parse_model(const std::string& text);

Parsed<TuringMachine> parse_tm(const std::string& text);

/// Core formula in `.lform` syntax using only ~, &, binders and atoms.
std::string pretty_print(const Formula& phi);

/// `.model` text for a structure whose domain is 0..n-1.
std::string format_model(const Structure& s);

// ---------------------------------------------------------------------------

namespace detail {

enum class Tok {
  End,
  Var,      // lowercase or '_' led identifier
  Rel,      // uppercase led identifier
  RelVar,   // $Name
  Nat,
  Quant,    // Q<name>
  Tilde,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Amp,
  Bar,
  Arrow,
  Hash,
  Comma,
  Equals,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t begin;
  std::size_t end;
};

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const Vocabulary& sigma, const QuantifierRegistry* q)
      : text_(text), sigma_(sigma), quantifiers_(q) {}

  Parsed<Formula> run() {
    try {
      lex();
      ExtendedFormula e = formula();
      if (peek().kind != Tok::End) fail(peek(), "unexpected input after formula");
      check_jumps();
      Formula core = desugar(e);
      ValidateOptions opts;
      std::set<std::string> names;
      if (quantifiers_) {
        names = quantifiers_->names();
        opts.quantifiers = &names;
      }
      if (auto issue = validate(core, sigma_, opts))
        return Diagnostic{span_at(text_, 0, text_.size()), issue->rule + ": " + issue->message};
      return core;
    } catch (const Failure& f) {
      return f.diagnostic;
    }
  }

 private:
  struct Failure {
    Diagnostic diagnostic;
  };
  struct LoopUse {
    std::uint64_t label;
    std::vector<std::size_t> enclosing;  // ids of enclosing labeled nodes
    std::size_t begin, end;
  };

  [[noreturn]] void fail(std::size_t begin, std::size_t end, const std::string& msg) const {
    throw Failure{Diagnostic{span_at(text_, begin, end), msg}};
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    fail(t.begin, t.end, msg);
  }

  void lex() {
    std::size_t i = 0;
    const std::size_t n = text_.size();
    auto ident_char = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    while (i < n) {
      char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < n && text_[i + 1] == '/') {
        while (i < n && text_[i] != '\n') ++i;
        continue;
      }
      const std::size_t b = i;
      auto push = [&](Tok k, std::size_t len) {
        tokens_.push_back({k, text_.substr(b, len), b, b + len});
        i = b + len;
      };
      switch (c) {
        case '~': push(Tok::Tilde, 1); continue;
        case '(': push(Tok::LParen, 1); continue;
        case ')': push(Tok::RParen, 1); continue;
        case '{': push(Tok::LBrace, 1); continue;
        case '}': push(Tok::RBrace, 1); continue;
        case '&': push(Tok::Amp, 1); continue;
        case '|': push(Tok::Bar, 1); continue;
        case '#': push(Tok::Hash, 1); continue;
        case ',': push(Tok::Comma, 1); continue;
        case '=': push(Tok::Equals, 1); continue;
        case '-':
          if (i + 1 < n && text_[i + 1] == '>') {
            push(Tok::Arrow, 2);
            continue;
          }
          fail(b, b + 1, "expected '->'");
        default: break;
      }
      if (c == 'Q' && i + 1 < n && text_[i + 1] == '<') {
        std::size_t j = i + 2;
        while (j < n && ident_char(text_[j])) ++j;
        if (j == i + 2 || j >= n || text_[j] != '>') fail(b, j, "expected Q<name>");
        tokens_.push_back({Tok::Quant, text_.substr(i + 2, j - i - 2), b, j + 1});
        i = j + 1;
        continue;
      }
      if (c == '$') {
        std::size_t j = i + 1;
        if (j >= n || !std::isupper(static_cast<unsigned char>(text_[j])))
          fail(b, j, "relation variable names start with '$' and a capital letter");
        while (j < n && ident_char(text_[j])) ++j;
        tokens_.push_back({Tok::RelVar, text_.substr(i + 1, j - i - 1), b, j});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < n && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        push(Tok::Nat, j - i);
        continue;
      }
      if (ident_char(c)) {
        std::size_t j = i;
        while (j < n && ident_char(text_[j])) ++j;
        push(std::isupper(static_cast<unsigned char>(c)) ? Tok::Rel : Tok::Var, j - i);
        continue;
      }
      fail(b, b + 1, std::string("unexpected character '") + c + "'");
    }
    tokens_.push_back({Tok::End, "", n, n});
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return take();
  }

  static bool is_keyword(const std::string& s) {
    return s == "exists" || s == "forall" || s == "new" || s == "ins" || s == "del";
  }

  VariableId variable() {
    const Token& t = peek();
    if (t.kind != Tok::Var || is_keyword(t.text)) fail(t, "expected a variable");
    take();
    return VariableId{t.text};
  }

  struct AtomSyntax {
    std::string name;
    bool relvar;
    std::vector<VariableId> args;
  };

  AtomSyntax relatom() {
    const Token& head = peek();
    if (head.kind != Tok::Rel && head.kind != Tok::RelVar)
      fail(head, "expected a relation symbol or relation variable");
    take();
    AtomSyntax a{head.text, head.kind == Tok::RelVar, {}};
    expect(Tok::LParen, "'('");
    a.args.push_back(variable());
    while (peek().kind == Tok::Comma) {
      take();
      a.args.push_back(variable());
    }
    const Token& close = expect(Tok::RParen, "')'");
    check_atom(a, head.begin, close.end);
    return a;
  }

  void check_atom(const AtomSyntax& a, std::size_t begin, std::size_t end) {
    if (a.relvar) {
      auto [it, fresh] = relvar_arity_.emplace(a.name, a.args.size());
      if (!fresh && it->second != a.args.size())
        fail(begin, end,
             "relation variable $" + a.name + " used with arity " + std::to_string(a.args.size()) +
                 " after arity " + std::to_string(it->second));
      return;
    }
    auto sym = sigma_.find(a.name);
    if (!sym) fail(begin, end, "relation symbol " + a.name + " is not in the vocabulary");
    if (sym->arity != a.args.size())
      fail(begin, end,
           a.name + " has arity " + std::to_string(sym->arity) + " but is used with " +
               std::to_string(a.args.size()) + " argument(s)");
  }

  std::uint64_t label(const Token& t) {
    try {
      return std::stoull(t.text);
    } catch (...) {
      fail(t, "label out of range");
    }
  }

  ExtendedFormula formula() {
    const Token& t = peek();
    using E = ExtendedFormula;
    switch (t.kind) {
      case Tok::Tilde:
        take();
        return E::negation(formula());
      case Tok::LParen: {
        take();
        E lhs = formula();
        const Token& op = take();
        E rhs = formula();
        expect(Tok::RParen, "')' closing a binary formula");
        if (op.kind == Tok::Amp) return E::conjunction(lhs, rhs);
        if (op.kind == Tok::Bar) return E::disjunction(lhs, rhs);
        if (op.kind == Tok::Arrow) return E::implication(lhs, rhs);
        fail(op, "expected '&', '|' or '->'");
      }
      case Tok::Hash: {
        take();
        const Token& num = expect(Tok::Nat, "a loop label");
        const std::uint64_t k = label(num);
        if (peek().kind != Tok::LBrace) {
          loops_.push_back({k, open_labels_, t.begin, num.end});
          return E::core(Formula::loop_atom(LoopLabel{k}));
        }
        take();
        const std::size_t id = labeled_count_++;
        labeled_[k].push_back(id);
        open_labels_.push_back(id);
        E body = formula();
        open_labels_.pop_back();
        expect(Tok::RBrace, "'}' closing a labeled formula");
        return E::binder(Formula::labeled(LoopLabel{k}, placeholder()), body);
      }
      case Tok::Quant: {
        take();
        if (!quantifiers_ || !quantifiers_->find(t.text)) fail(t, "unknown quantifier " + t.text);
        VariableId x = variable();
        return E::binder(Formula::quantified(t.text, x, placeholder()), formula());
      }
      case Tok::Rel:
        if (peek(1).kind != Tok::LParen && (t.text == "T" || t.text == "F")) {
          take();
          return t.text == "T" ? E::top() : E::bottom();
        }
        return atom_formula();
      case Tok::RelVar:
        return atom_formula();
      case Tok::Var: {
        if (t.text == "exists" || t.text == "forall" || t.text == "new") {
          take();
          VariableId x = variable();
          if (t.text == "forall") return E::forall(x, formula());
          Formula shape = t.text == "exists" ? Formula::exists(x, placeholder())
                                             : Formula::insert_point(x, placeholder());
          return E::binder(shape, formula());
        }
        if (t.text == "ins" || t.text == "del") {
          take();
          AtomSyntax a = relatom();
          const bool ins = t.text == "ins";
          Formula shape =
              a.relvar ? (ins ? Formula::insert_variable(a.name, a.args, placeholder())
                              : Formula::delete_variable(a.name, a.args, placeholder()))
                       : (ins ? Formula::insert_relation(a.name, a.args, placeholder())
                              : Formula::delete_relation(a.name, a.args, placeholder()));
          return E::binder(shape, formula());
        }
        VariableId lhs = variable();
        expect(Tok::Equals, "'=' after a variable");
        VariableId rhs = variable();
        return E::core(Formula::equality(lhs, rhs));
      }
      default:
        fail(t, t.kind == Tok::End ? "unexpected end of input" : "expected a formula");
    }
  }

  ExtendedFormula atom_formula() {
    AtomSyntax a = relatom();
    return ExtendedFormula::core(a.relvar ? Formula::variable_atom(a.name, a.args)
                                          : Formula::relation_atom(a.name, a.args));
  }

  static Formula placeholder() {
    static const Formula f = Formula::equality(VariableId{"_"}, VariableId{"_"});
    return f;
  }

  // A loop atom must lie inside every labeled subformula carrying its label.
  void check_jumps() const {
    for (const auto& use : loops_) {
      auto it = labeled_.find(use.label);
      if (it == labeled_.end()) continue;
      for (auto id : it->second)
        if (std::find(use.enclosing.begin(), use.enclosing.end(), id) == use.enclosing.end())
          fail(use.begin, use.end,
               "non-standard jump: loop atom #" + std::to_string(use.label) +
                   " lies outside a labeled subformula with the same label");
    }
  }

  const std::string& text_;
  const Vocabulary& sigma_;
  const QuantifierRegistry* quantifiers_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> relvar_arity_;
  std::map<std::uint64_t, std::vector<std::size_t>> labeled_;
  std::vector<std::size_t> open_labels_;
  std::size_t labeled_count_ = 0;
  std::vector<LoopUse> loops_;
};

struct Line {
  std::string content;  // comment stripped
  std::size_t begin;    // offset of the line in the text
  std::size_t length;
};

inline std::vector<Line> lines_of(const std::string& text) {
  std::vector<Line> out;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t nl = text.find('\n', offset);
    if (nl == std::string::npos) nl = text.size();
    std::string raw = text.substr(offset, nl - offset);
    std::string content = raw.substr(0, raw.find('#'));
    if (content.find_first_not_of(" \t\r") != std::string::npos)
      out.push_back({content, offset, raw.size()});
    offset = nl + 1;
  }
  return out;
}

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline void print(const Formula& f, std::string& out) {
  auto args = [&](const Formula& g) {
    out += '(';
    for (std::size_t i = 0; i < g.variables().size(); ++i) {
      if (i) out += ',';
      out += g.variables()[i].name;
    }
    out += ')';
  };
  auto relation = [&](const Formula& g) {
    if (g.uses_relation_variable()) out += '$';
    out += g.name();
    args(g);
  };
  switch (f.kind()) {
    case FormulaKind::RelationAtom:
    case FormulaKind::VariableAtom:
      relation(f);
      return;
    case FormulaKind::Equality:
      out += f.variables()[0].name + " = " + f.variables()[1].name;
      return;
    case FormulaKind::LoopAtom:
      out += "#" + std::to_string(f.label().value);
      return;
    case FormulaKind::Not:
      out += '~';
      print(f.child(), out);
      return;
    case FormulaKind::And:
      out += '(';
      print(f.child(0), out);
      out += " & ";
      print(f.child(1), out);
      out += ')';
      return;
    case FormulaKind::Exists:
      out += "exists " + f.variable().name + " ";
      break;
    case FormulaKind::InsertPoint:
      out += "new " + f.variable().name + " ";
      break;
    case FormulaKind::InsertRelation:
    case FormulaKind::InsertVariable:
      out += "ins ";
      relation(f);
      out += ' ';
      break;
    case FormulaKind::DeleteRelation:
    case FormulaKind::DeleteVariable:
      out += "del ";
      relation(f);
      out += ' ';
      break;
    case FormulaKind::Labeled:
      out += "#" + std::to_string(f.label().value) + "{";
      print(f.child(), out);
      out += '}';
      return;
    case FormulaKind::Quantified:
      out += "Q<" + f.name() + "> " + f.variable().name + " ";
      break;
  }
  print(f.child(), out);
}

}  // namespace detail

inline Parsed<Formula> parse_formula(const std::string& text, const Vocabulary& sigma,
                                     const QuantifierRegistry* quantifiers) {
  return detail::FormulaParser(text, sigma, quantifiers).run();
}

inline std::string pretty_print(const Formula& phi) {
  std::string out;
  detail::print(phi, out);
  return out;
}

inline Parsed<ParsedModel> parse_model(const std::string& text) {
  std::optional<std::size_t> domain;
  std::vector<std::pair<RelationSymbol, std::vector<Tuple>>> rels;
  for (const auto& line : detail::lines_of(text)) {
    auto fail = [&](const std::string& msg) {
      return Diagnostic{span_at(text, line.begin, line.begin + line.length), msg};
    };
    std::istringstream in(line.content);
    std::string kw;
    in >> kw;
    if (kw == "domain") {
      if (domain) return fail("domain declared twice");
      long long n = -1;
      std::string rest;
      if (!(in >> n) || (in >> rest)) return fail("expected `domain N`");
      if (n < 1) return fail("domain must be nonempty");
      domain = static_cast<std::size_t>(n);
      continue;
    }
    if (kw != "rel") return fail("expected `domain N` or `rel Name/k = (...)`");
    if (!domain) return fail("`rel` before `domain`");
    std::string rest;
    std::getline(in, rest);
    auto eq = rest.find('=');
    if (eq == std::string::npos) return fail("expected `rel Name/k = (...)`");
    auto head = detail::words(rest.substr(0, eq));
    if (head.size() != 1) return fail("expected `rel Name/k = (...)`");
    auto slash = head[0].find('/');
    if (slash == std::string::npos) return fail("expected Name/arity");
    RelationSymbol sym{head[0].substr(0, slash), 0};
    if (!detail::is_identifier(sym.name) || !std::isupper(static_cast<unsigned char>(sym.name[0])))
      return fail("relation names start with a capital letter");
    try {
      std::size_t used = 0;
      const std::string k = head[0].substr(slash + 1);
      sym.arity = std::stoul(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (...) {
      return fail("bad arity");
    }
    if (sym.arity < 1) return fail("arity must be positive");
    for (const auto& [other, _] : rels)
      if (other.name == sym.name) return fail("relation " + sym.name + " declared twice");
    std::vector<Tuple> tuples;
    std::string body = rest.substr(eq + 1);
    std::size_t i = 0;
    while (true) {
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i >= body.size()) break;
      if (body[i] != '(') return fail("expected '(' starting a tuple");
      auto close = body.find(')', i);
      if (close == std::string::npos) return fail("unclosed tuple");
      Tuple t;
      for (const auto& item : detail::words(body.substr(i + 1, close - i - 1))) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
          v = std::stoul(item, &used);
        } catch (...) {
          used = 0;
        }
        if (used != item.size() || item.empty()) return fail("bad element '" + item + "'");
        if (v >= *domain)
          return fail("element " + item + " is outside the domain 0.." +
                      std::to_string(*domain - 1));
        t.emplace_back(static_cast<std::uint32_t>(v));
      }
      if (t.size() != sym.arity)
        return fail("tuple of length " + std::to_string(t.size()) + " in relation of arity " +
                    std::to_string(sym.arity));
      if (std::find(tuples.begin(), tuples.end(), t) != tuples.end())
        return fail("duplicate tuple " + tuple_text(t));
      tuples.push_back(std::move(t));
      i = close + 1;
    }
    rels.emplace_back(sym, std::move(tuples));
  }
  if (!domain) return Diagnostic{span_at(text, 0, text.size()), "missing `domain N`"};
  Structure s(*domain);
  Vocabulary sigma;
  for (auto& [sym, tuples] : rels) {
    s.declare(sym);
    sigma.add(sym);
    s.set_relation(sym.name, Relation(sym.arity, std::move(tuples)));
  }
  return ParsedModel{std::move(sigma), std::move(s)};
}

inline std::string format_model(const Structure& s) {
  std::string out = "domain " + std::to_string(s.size()) + "\n";
  for (std::size_t i = 0; i < s.symbols().size(); ++i) {
    const auto& sym = s.symbols()[i];
    out += "rel " + sym.name + "/" + std::to_string(sym.arity) + " =";
    for (const auto& t : s.relation_at(i).tuples()) out += " " + tuple_text(t);
    out += "\n";
  }
  return out;
}

inline Parsed<TuringMachine> parse_tm(const std::string& text) {
  TuringMachine tm;
  std::set<std::string> seen_sections;
  std::optional<detail::Line> first_line;
  std::map<std::pair<std::string, std::string>, detail::Line> trans_lines;
  for (const auto& line : detail::lines_of(text)) {
    if (!first_line) first_line = line;
    auto fail = [&](const std::string& msg) {
      return Diagnostic{span_at(text, line.begin, line.begin + line.length), msg};
    };
    std::istringstream in(line.content);
    std::string kw;
    in >> kw;
    std::string rest;
    std::getline(in, rest);
    if (kw == "trans") {
      auto arrow = rest.find("->");
      if (arrow == std::string::npos) return fail("expected `trans q,s -> q',t,L|R`");
      auto lhs = detail::words(rest.substr(0, arrow));
      auto rhs = detail::words(rest.substr(arrow + 2));
      if (lhs.size() != 2 || rhs.size() != 3) return fail("expected `trans q,s -> q',t,L|R`");
      for (const auto& w : {lhs[0], lhs[1], rhs[0], rhs[1]})
        if (!detail::is_identifier(w)) return fail("bad name '" + w + "'");
      if (rhs[2] != "L" && rhs[2] != "R") return fail("direction must be L or R");
      Transition t{rhs[0], rhs[1], rhs[2] == "L" ? Direction::Left : Direction::Right};
      auto key = std::make_pair(lhs[0], lhs[1]);
      if (tm.transitions.contains(key))
        return fail("second transition for (" + lhs[0] + "," + lhs[1] + ")");
      tm.transitions.emplace(key, t);
      trans_lines.emplace(key, line);
      continue;
    }
    static const std::set<std::string> sections = {"states",         "start",          "accept",
                                                   "reject",         "input_alphabet", "tape_alphabet",
                                                   "blank"};
    if (!sections.contains(kw)) return fail("unknown line `" + kw + "`");
    if (!seen_sections.insert(kw).second) return fail("section `" + kw + "` repeated");
    auto items = detail::words(rest);
    for (const auto& w : items)
      if (!detail::is_identifier(w)) return fail("bad name '" + w + "'");
    if (kw == "states") {
      tm.states = items;
    } else if (kw == "start") {
      if (items.size() != 1) return fail("expected one start state");
      tm.start = items[0];
    } else if (kw == "accept") {
      tm.accepting.insert(items.begin(), items.end());
    } else if (kw == "reject") {
      tm.rejecting.insert(items.begin(), items.end());
    } else if (kw == "input_alphabet") {
      if (items.empty()) return fail("input alphabet must be nonempty");
      tm.input_alphabet = items;
    } else if (kw == "tape_alphabet") {
      tm.tape_alphabet = items;
    } else {
      if (items.size() != 1) return fail("expected one blank symbol");
      tm.blank = items[0];
    }
  }
  const SourceSpan whole = span_at(text, 0, text.size());
  for (const char* required : {"states", "start", "input_alphabet"})
    if (!seen_sections.contains(required))
      return Diagnostic{whole, std::string("missing `") + required + "` line"};
  // Report transition problems at their own line.
  {
    TuringMachine shell = tm;
    shell.transitions.clear();
    if (auto problem = shell.check()) return Diagnostic{whole, *problem};
    for (const auto& [key, line] : trans_lines) {
      TuringMachine one = shell;
      one.transitions.emplace(key, tm.transitions.at(key));
      if (auto problem = one.check())
        return Diagnostic{span_at(text, line.begin, line.begin + line.length), *problem};
    }
  }
  return tm;
}

}  // namespace gts
