#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asmcat {

enum class TermKind : std::uint8_t { K, S, Atom, App };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Applicative terms over the combinators K and S plus opaque atoms.
// Atoms whose name is entirely decimal digits print as bare numerals.
class Term {
public:
  static const TermPtr& k() {
    static const TermPtr t(new Term(TermKind::K));
    return t;
  }
  static const TermPtr& s() {
    static const TermPtr t(new Term(TermKind::S));
    return t;
  }
  static TermPtr atom(std::string name) {
    if (name.empty()) throw std::invalid_argument("atom name must be nonempty");
    return TermPtr(new Term(std::move(name)));
  }
  static TermPtr app(TermPtr fn, TermPtr arg) {
    if (!fn || !arg) throw std::invalid_argument("app of null term");
    return TermPtr(new Term(std::move(fn), std::move(arg)));
  }

  TermKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const TermPtr& fn() const { return fn_; }
  const TermPtr& arg() const { return arg_; }
  // Number of leaves; the size component of the canonical ordering.
  int size() const { return size_; }

private:
  explicit Term(TermKind k) : kind_(k), size_(1) {}
  explicit Term(std::string name)
      : kind_(TermKind::Atom), name_(std::move(name)), size_(1) {}
  Term(TermPtr fn, TermPtr arg)
      : kind_(TermKind::App),
        fn_(std::move(fn)),
        arg_(std::move(arg)),
        size_(fn_->size() + arg_->size()) {}

  TermKind kind_;
  std::string name_;
  TermPtr fn_, arg_;
  int size_;
};

inline bool term_eq(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case TermKind::K:
    case TermKind::S:
      return true;
    case TermKind::Atom:
      return a.name() == b.name();
    case TermKind::App:
      return term_eq(*a.fn(), *b.fn()) && term_eq(*a.arg(), *b.arg());
  }
  return false;
}

inline bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return a == b;
  return term_eq(*a, *b);
}

// Structural order ignoring size: K < S < Atom (by name) < App (fn, then arg).
inline std::strong_ordering term_cmp_structural(const Term& a, const Term& b) {
  auto rank = [](TermKind k) { return static_cast<int>(k); };
  if (auto c = rank(a.kind()) <=> rank(b.kind()); c != 0) return c;
  switch (a.kind()) {
    case TermKind::K:
    case TermKind::S:
      return std::strong_ordering::equal;
    case TermKind::Atom:
      return a.name() <=> b.name();
    case TermKind::App: {
      if (auto c = term_cmp_structural(*a.fn(), *b.fn()); c != 0) return c;
      return term_cmp_structural(*a.arg(), *b.arg());
    }
  }
  return std::strong_ordering::equal;
}

// Canonical enumeration order: smaller terms first, ties broken structurally.
inline std::strong_ordering term_cmp(const Term& a, const Term& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return term_cmp_structural(a, b);
}

inline bool term_less(const TermPtr& a, const TermPtr& b) {
  return term_cmp(*a, *b) < 0;
}

inline bool is_numeral_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char ch) { return std::isdigit(ch); });
}

namespace detail {
inline void print_term_rec(const Term& t, std::string& out, bool arg_pos) {
  switch (t.kind()) {
    case TermKind::K:
      out += 'K';
      return;
    case TermKind::S:
      out += 'S';
      return;
    case TermKind::Atom:
      if (!is_numeral_name(t.name())) out += '#';
      out += t.name();
      return;
    case TermKind::App:
      if (arg_pos) out += '(';
      print_term_rec(*t.fn(), out, false);
      out += ' ';
      print_term_rec(*t.arg(), out, true);
      if (arg_pos) out += ')';
      return;
  }
}
}  // namespace detail

// Juxtaposition associates to the left; parentheses only where required.
inline std::string print_term(const Term& t) {
  std::string out;
  detail::print_term_rec(t, out, false);
  return out;
}
inline std::string print_term(const TermPtr& t) { return print_term(*t); }

struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " at position " + std::to_string(at)),
        pos(at) {}
};

namespace detail {
struct TermParser {
  const std::string& src;
  std::size_t i = 0;

  void skip_ws() {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i])))
      ++i;
  }
  bool at_end() {
    skip_ws();
    return i >= src.size();
  }

  TermPtr parse_leaf() {
    skip_ws();
    if (i >= src.size()) throw ParseError("unexpected end of term", i);
    char c = src[i];
    if (c == '(') {
      std::size_t open = i;
      ++i;
      TermPtr t = parse_app();
      skip_ws();
      if (i >= src.size() || src[i] != ')')
        throw ParseError("unmatched '('", open);
      ++i;
      return t;
    }
    if (c == 'K') {
      ++i;
      return Term::k();
    }
    if (c == 'S') {
      ++i;
      return Term::s();
    }
    if (c == '#') {
      std::size_t start = ++i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '_' || src[i] == '\'' || src[i] == '-'))
        ++i;
      if (i == start) throw ParseError("expected atom name after '#'", start);
      return Term::atom(src.substr(start, i - start));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
        ++i;
      return Term::atom(src.substr(start, i - start));
    }
    throw ParseError(std::string("unexpected character '") + c + "'", i);
  }

  bool leaf_ahead() {
    skip_ws();
    if (i >= src.size()) return false;
    char c = src[i];
    return c == '(' || c == 'K' || c == 'S' || c == '#' ||
           std::isdigit(static_cast<unsigned char>(c));
  }

  TermPtr parse_app() {
    TermPtr t = parse_leaf();
    while (leaf_ahead()) t = Term::app(t, parse_leaf());
    return t;
  }
};
}  // namespace detail

inline TermPtr parse_term(const std::string& src) {
  detail::TermParser p{src};
  TermPtr t = p.parse_app();
  p.skip_ws();
  if (p.i < src.size()) throw ParseError("trailing input", p.i);
  return t;
}

// Head of the application spine plus arguments, left to right.
inline std::pair<TermPtr, std::vector<TermPtr>> spine(TermPtr t) {
  std::vector<TermPtr> args;
  while (t->kind() == TermKind::App) {
    args.push_back(t->arg());
    t = t->fn();
  }
  std::reverse(args.begin(), args.end());
  return {t, std::move(args)};
}

// A term is a value when no head contraction can ever fire inside it:
// K carries at most one argument, S at most two, atoms are inert, and all
// arguments are themselves values.
inline bool is_value(const Term& t) {
  if (t.kind() != TermKind::App) return true;
  const Term* head = &t;
  int nargs = 0;
  while (head->kind() == TermKind::App) {
    if (!is_value(*head->arg())) return false;
    head = head->fn().get();
    ++nargs;
  }
  switch (head->kind()) {
    case TermKind::K:
      return nargs <= 1;
    case TermKind::S:
      return nargs <= 2;
    case TermKind::Atom:
      return true;
    default:
      return false;
  }
}
inline bool is_value(const TermPtr& t) { return is_value(*t); }

inline std::vector<TermPtr> sorted_unique(std::vector<TermPtr> ts) {
  std::sort(ts.begin(), ts.end(), term_less);
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](const TermPtr& a, const TermPtr& b) {
                         return term_eq(a, b);
                       }),
           ts.end());
  return ts;
}

inline bool contains_term(const std::vector<TermPtr>& ts, const TermPtr& t) {
  for (const auto& u : ts)
    if (term_eq(u, t)) return true;
  return false;
}

}  // namespace asmcat
