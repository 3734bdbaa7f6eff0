#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/pca.hpp"
#include "asmcat/term.hpp"

namespace asmcat {

enum class LamKind : std::uint8_t { Var, App, Abs, Con };

class LambdaTerm;
using LamPtr = std::shared_ptr<const LambdaTerm>;

// Lambda terms over variables, application, abstraction, and constants.
// A constant carries a finite set of combinator values; spliced single
// values are singleton constants.
class LambdaTerm {
public:
  static LamPtr var(std::string name) {
    auto t = std::make_shared<LambdaTerm>();
    t->kind_ = LamKind::Var;
    t->name_ = std::move(name);
    return t;
  }
  static LamPtr app(LamPtr fn, LamPtr arg) {
    auto t = std::make_shared<LambdaTerm>();
    t->kind_ = LamKind::App;
    t->fn_ = std::move(fn);
    t->arg_ = std::move(arg);
    return t;
  }
  static LamPtr abs(std::string binder, LamPtr body) {
    auto t = std::make_shared<LambdaTerm>();
    t->kind_ = LamKind::Abs;
    t->name_ = std::move(binder);
    t->body_ = std::move(body);
    return t;
  }
  static LamPtr con(std::string label, std::vector<TermPtr> values) {
    auto t = std::make_shared<LambdaTerm>();
    t->kind_ = LamKind::Con;
    t->name_ = std::move(label);
    t->con_values_ = sorted_unique(std::move(values));
    return t;
  }
  static LamPtr con_term(TermPtr v) {
    std::string label = print_term(v);
    return con(std::move(label), {std::move(v)});
  }

  LamKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const LamPtr& fn() const { return fn_; }
  const LamPtr& arg() const { return arg_; }
  const LamPtr& body() const { return body_; }
  const std::vector<TermPtr>& con_values() const { return con_values_; }
  bool con_singleton() const { return con_values_.size() == 1; }

private:
  LamKind kind_ = LamKind::Var;
  std::string name_;
  LamPtr fn_, arg_, body_;
  std::vector<TermPtr> con_values_;
};

inline void free_vars_rec(const LamPtr& t, std::set<std::string>& bound,
                          std::set<std::string>& out) {
  switch (t->kind()) {
    case LamKind::Var:
      if (!bound.count(t->name())) out.insert(t->name());
      return;
    case LamKind::App:
      free_vars_rec(t->fn(), bound, out);
      free_vars_rec(t->arg(), bound, out);
      return;
    case LamKind::Abs: {
      bool fresh = bound.insert(t->name()).second;
      free_vars_rec(t->body(), bound, out);
      if (fresh) bound.erase(t->name());
      return;
    }
    case LamKind::Con:
      return;
  }
}

inline std::set<std::string> free_vars(const LamPtr& t) {
  std::set<std::string> bound, out;
  free_vars_rec(t, bound, out);
  return out;
}

namespace detail {
inline std::string fresh_name(const std::string& base,
                              const std::set<std::string>& avoid) {
  std::string cand = base;
  while (avoid.count(cand)) cand += '\'';
  return cand;
}
}  // namespace detail

// Capture-avoiding substitution of `repl` for free occurrences of `name`.
inline LamPtr substitute(const LamPtr& t, const std::string& name,
                         const LamPtr& repl) {
  switch (t->kind()) {
    case LamKind::Var:
      return t->name() == name ? repl : t;
    case LamKind::Con:
      return t;
    case LamKind::App:
      return LambdaTerm::app(substitute(t->fn(), name, repl),
                             substitute(t->arg(), name, repl));
    case LamKind::Abs: {
      if (t->name() == name) return t;
      auto fv_body = free_vars(t->body());
      if (!fv_body.count(name)) return t;
      auto fv_repl = free_vars(repl);
      if (fv_repl.count(t->name())) {
        // Rename the binder away from the free variables of the replacement.
        std::set<std::string> avoid = fv_repl;
        avoid.insert(fv_body.begin(), fv_body.end());
        avoid.insert(name);
        std::string nb = detail::fresh_name(t->name(), avoid);
        LamPtr renamed =
            substitute(t->body(), t->name(), LambdaTerm::var(nb));
        return LambdaTerm::abs(nb, substitute(renamed, name, repl));
      }
      return LambdaTerm::abs(t->name(), substitute(t->body(), name, repl));
    }
  }
  return t;
}

// One leftmost-outermost beta step, if any redex exists.
inline std::optional<LamPtr> beta_step(const LamPtr& t) {
  switch (t->kind()) {
    case LamKind::Var:
    case LamKind::Con:
      return std::nullopt;
    case LamKind::App: {
      if (t->fn()->kind() == LamKind::Abs)
        return substitute(t->fn()->body(), t->fn()->name(), t->arg());
      if (auto f2 = beta_step(t->fn())) return LambdaTerm::app(*f2, t->arg());
      if (auto a2 = beta_step(t->arg())) return LambdaTerm::app(t->fn(), *a2);
      return std::nullopt;
    }
    case LamKind::Abs: {
      if (auto b2 = beta_step(t->body()))
        return LambdaTerm::abs(t->name(), *b2);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Beta normal form by leftmost-outermost reduction; nullopt when the fuel
// bound is exhausted first.
inline std::optional<LamPtr> normalize(LamPtr t, Fuel fuel) {
  for (std::uint32_t i = 0; i <= fuel.steps; ++i) {
    auto next = beta_step(t);
    if (!next) return t;
    if (i == fuel.steps) break;
    t = *next;
  }
  return std::nullopt;
}

inline bool alpha_eq_rec(const LamPtr& a, const LamPtr& b,
                         std::vector<std::pair<std::string, std::string>>& env) {
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case LamKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == a->name() || it->second == b->name())
          return it->first == a->name() && it->second == b->name();
      }
      return a->name() == b->name();
    }
    case LamKind::Con: {
      if (a->con_values().size() != b->con_values().size()) return false;
      for (size_t i = 0; i < a->con_values().size(); ++i)
        if (!term_eq(a->con_values()[i], b->con_values()[i])) return false;
      return true;
    }
    case LamKind::App:
      return alpha_eq_rec(a->fn(), b->fn(), env) &&
             alpha_eq_rec(a->arg(), b->arg(), env);
    case LamKind::Abs: {
      env.emplace_back(a->name(), b->name());
      bool r = alpha_eq_rec(a->body(), b->body(), env);
      env.pop_back();
      return r;
    }
  }
  return false;
}

inline bool alpha_eq(const LamPtr& a, const LamPtr& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return alpha_eq_rec(a, b, env);
}

// One leftmost-outermost eta contraction \x. M x -> M (x not free in M).
inline std::optional<LamPtr> eta_step(const LamPtr& t) {
  switch (t->kind()) {
    case LamKind::Var:
    case LamKind::Con:
      return std::nullopt;
    case LamKind::Abs: {
      const LamPtr& b = t->body();
      if (b->kind() == LamKind::App && b->arg()->kind() == LamKind::Var &&
          b->arg()->name() == t->name() &&
          !free_vars(b->fn()).count(t->name()))
        return b->fn();
      if (auto b2 = eta_step(b)) return LambdaTerm::abs(t->name(), *b2);
      return std::nullopt;
    }
    case LamKind::App: {
      if (auto f2 = eta_step(t->fn())) return LambdaTerm::app(*f2, t->arg());
      if (auto a2 = eta_step(t->arg())) return LambdaTerm::app(t->fn(), *a2);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Beta-eta normal form: normalize, then alternate eta contractions with
// re-normalization until no step applies.
inline std::optional<LamPtr> beta_eta_normalize(LamPtr t, Fuel fuel) {
  auto nf = normalize(std::move(t), fuel);
  if (!nf) return std::nullopt;
  for (std::uint32_t i = 0; i < fuel.steps; ++i) {
    auto e = eta_step(*nf);
    if (!e) return nf;
    nf = normalize(*e, fuel);
    if (!nf) return std::nullopt;
  }
  return std::nullopt;
}

// Convertibility under beta and eta. Equality of normal forms is decided up
// to renaming of binders; fuel exhaustion anywhere yields Unknown, so a
// definite answer is never wrong.
inline Tri converts(const LamPtr& a, const LamPtr& b, Fuel fuel) {
  auto na = beta_eta_normalize(a, fuel);
  auto nb = beta_eta_normalize(b, fuel);
  if (!na || !nb) return Tri::Unknown;
  return alpha_eq(*na, *nb) ? Tri::Yes : Tri::No;
}

// ---------------------------------------------------------------------------
// Printing and parsing.
// Grammar:  \x y. body   |   f a b   |   (t)   |   [library-name]   |   {K S}

namespace detail {
inline void print_lambda_rec(const LamPtr& t, std::string& out, bool arg_pos,
                             bool fn_pos) {
  switch (t->kind()) {
    case LamKind::Var:
      out += t->name();
      return;
    case LamKind::Con:
      if (t->con_singleton()) {
        out += '{';
        out += print_term(t->con_values()[0]);
        out += '}';
      } else {
        out += '[';
        out += t->name();
        out += ']';
      }
      return;
    case LamKind::App:
      if (arg_pos) out += '(';
      print_lambda_rec(t->fn(), out, false, true);
      out += ' ';
      print_lambda_rec(t->arg(), out, true, false);
      if (arg_pos) out += ')';
      return;
    case LamKind::Abs: {
      bool paren = arg_pos || fn_pos;
      if (paren) out += '(';
      out += '\\';
      const LambdaTerm* cur = t.get();
      out += cur->name();
      while (cur->body()->kind() == LamKind::Abs) {
        cur = cur->body().get();
        out += ' ';
        out += cur->name();
      }
      out += ". ";
      print_lambda_rec(cur->body(), out, false, false);
      if (paren) out += ')';
      return;
    }
  }
}
}  // namespace detail

inline std::string print_lambda(const LamPtr& t) {
  std::string out;
  detail::print_lambda_rec(t, out, false, false);
  return out;
}

const std::vector<std::pair<std::string, TermPtr>>& combinator_library();

namespace detail {
struct LambdaParser {
  const std::string& src;
  std::size_t i = 0;
  // When set, [name] splices resolve against this table instead of the
  // global library (used while the library itself is being built).
  const std::vector<std::pair<std::string, TermPtr>>* splice_table = nullptr;

  void skip_ws() {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i])))
      ++i;
  }
  bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string parse_ident() {
    skip_ws();
    if (i >= src.size() || !ident_start(src[i]))
      throw ParseError("expected identifier", i);
    std::size_t start = i;
    while (i < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[i])) ||
            src[i] == '_' || src[i] == '\''))
      ++i;
    return src.substr(start, i - start);
  }

  bool atom_ahead() {
    skip_ws();
    if (i >= src.size()) return false;
    char c = src[i];
    return c == '(' || c == '[' || c == '{' || c == '\\' || ident_start(c);
  }

  LamPtr parse_atom() {
    skip_ws();
    if (i >= src.size()) throw ParseError("unexpected end of term", i);
    char c = src[i];
    if (c == '\\') return parse_abs();
    if (c == '(') {
      std::size_t open = i;
      ++i;
      LamPtr t = parse_term_inner();
      skip_ws();
      if (i >= src.size() || src[i] != ')')
        throw ParseError("unmatched '('", open);
      ++i;
      return t;
    }
    if (c == '[') {
      std::size_t open = i;
      ++i;
      std::string name = parse_ident();
      skip_ws();
      if (i >= src.size() || src[i] != ']')
        throw ParseError("unmatched '['", open);
      ++i;
      const auto& table = splice_table ? *splice_table : combinator_library();
      for (const auto& [n, v] : table)
        if (n == name) return LambdaTerm::con(n, {v});
      throw ParseError("unknown library constant '" + name + "'", open);
    }
    if (c == '{') {
      std::size_t open = i;
      std::size_t close = src.find('}', i);
      if (close == std::string::npos) throw ParseError("unmatched '{'", open);
      std::string inner = src.substr(i + 1, close - i - 1);
      i = close + 1;
      TermPtr v;
      try {
        v = parse_term(inner);
      } catch (const ParseError& e) {
        throw ParseError(std::string("in spliced term: ") + e.what(),
                         open + 1 + e.pos);
      }
      if (!is_value(v))
        throw ParseError("spliced term is not a value", open);
      return LambdaTerm::con_term(v);
    }
    return LambdaTerm::var(parse_ident());
  }

  LamPtr parse_abs() {
    ++i;  // consume backslash
    std::vector<std::string> binders;
    binders.push_back(parse_ident());
    for (;;) {
      skip_ws();
      if (i < src.size() && src[i] == ',') {
        ++i;
        binders.push_back(parse_ident());
        continue;
      }
      if (i < src.size() && ident_start(src[i])) {
        binders.push_back(parse_ident());
        continue;
      }
      break;
    }
    skip_ws();
    if (i >= src.size() || src[i] != '.')
      throw ParseError("expected '.' after binders", i);
    ++i;
    LamPtr body = parse_term_inner();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      body = LambdaTerm::abs(*it, body);
    return body;
  }

  LamPtr parse_term_inner() {
    LamPtr t = parse_atom();
    while (atom_ahead()) t = LambdaTerm::app(t, parse_atom());
    return t;
  }
};
}  // namespace detail

inline LamPtr parse_lambda(const std::string& src) {
  detail::LambdaParser p{src};
  LamPtr t = p.parse_term_inner();
  p.skip_ws();
  if (p.i < src.size()) throw ParseError("trailing input", p.i);
  return t;
}

// ---------------------------------------------------------------------------
// Bracket abstraction: translate closed lambda terms (constants allowed) to
// applicative K/S terms. Identity is the canonical S K K. The eta shortcut
// is available behind a flag and off by default, keeping translations stable.

namespace detail {

inline LamPtr sk_con(const char* which) {
  if (which[0] == 'K') return LambdaTerm::con("K", {Term::k()});
  return LambdaTerm::con("S", {Term::s()});
}

inline LamPtr bracket_i() {
  return LambdaTerm::con_term(
      Term::app(Term::app(Term::s(), Term::k()), Term::k()));
}

// m contains no abstractions; eliminate the variable x.
inline LamPtr bracket_a(const std::string& x, const LamPtr& m, bool eta_opt) {
  if (m->kind() == LamKind::Var && m->name() == x) return bracket_i();
  if (!free_vars(m).count(x))
    return LambdaTerm::app(sk_con("K"), m);
  // x occurs free and m is an application.
  if (eta_opt && m->kind() == LamKind::App &&
      m->arg()->kind() == LamKind::Var && m->arg()->name() == x &&
      !free_vars(m->fn()).count(x))
    return m->fn();
  return LambdaTerm::app(
      LambdaTerm::app(sk_con("S"), bracket_a(x, m->fn(), eta_opt)),
      bracket_a(x, m->arg(), eta_opt));
}

inline LamPtr bracket_elim(const LamPtr& t, bool eta_opt) {
  switch (t->kind()) {
    case LamKind::Var:
    case LamKind::Con:
      return t;
    case LamKind::App:
      return LambdaTerm::app(bracket_elim(t->fn(), eta_opt),
                             bracket_elim(t->arg(), eta_opt));
    case LamKind::Abs:
      return bracket_a(t->name(), bracket_elim(t->body(), eta_opt), eta_opt);
  }
  return t;
}

inline TermPtr bracket_to_term(const LamPtr& t) {
  switch (t->kind()) {
    case LamKind::Con:
      if (!t->con_singleton())
        throw std::invalid_argument(
            "bracket abstraction requires single-valued constants");
      return t->con_values()[0];
    case LamKind::App:
      return Term::app(bracket_to_term(t->fn()), bracket_to_term(t->arg()));
    default:
      throw std::invalid_argument(
          "bracket abstraction requires a closed term");
  }
}

}  // namespace detail

inline TermPtr bracket_abstract(const LamPtr& t, bool eta_opt = false) {
  if (!free_vars(t).empty())
    throw std::invalid_argument("bracket abstraction requires a closed term");
  return detail::bracket_to_term(detail::bracket_elim(t, eta_opt));
}

// The compiled library of canonical combinator values, in the fixed order
// used by witness searches. Each entry is the bracket abstraction of the
// lambda source shown next to it.
inline const std::vector<std::pair<std::string, TermPtr>>&
combinator_library_impl() {
  static const std::vector<std::pair<std::string, TermPtr>> lib = [] {
    std::vector<std::pair<std::string, TermPtr>> out;
    auto add = [&out](const std::string& name, const std::string& src) {
      // Earlier entries are visible as [name] splices in later sources.
      detail::LambdaParser p{src};
      p.splice_table = &out;
      LamPtr t = p.parse_term_inner();
      out.emplace_back(name, bracket_abstract(t));
    };
    add("id", "\\x. x");
    add("tru", "\\x y. x");           // selects the first of two arguments
    add("fls", "\\x y. y");           // selects the second of two arguments
    add("pair", "\\x y p. p x y");
    add("fst", "\\x. x (\\y z. y)");
    add("snd", "\\x. x (\\y z. z)");
    add("inl", "\\x f g. f x");
    add("inr", "\\x f g. g x");
    add("compose", "\\f g x. f (g x)");
    add("flip_apply", "\\w x. x w");
    add("curry", "\\w x y. w ([pair] x y)");
    add("mkpair", "\\u v x. [pair] (u x) (v x)");
    add("case2", "\\u v x. x u v");
    add("drop2", "\\w c b. w c");
    add("appl", "\\x y z. (x y) z");
    return out;
  }();
  return lib;
}

inline const std::vector<std::pair<std::string, TermPtr>>&
combinator_library() {
  return combinator_library_impl();
}

inline const TermPtr& lib(const std::string& name) {
  for (const auto& [n, v] : combinator_library())
    if (n == name) return v;
  throw std::out_of_range("no library combinator named '" + name + "'");
}

// ---------------------------------------------------------------------------
// Subobject interpretation: does a candidate element lie in the set denoted
// by a lambda term with constants, at a tuple of argument elements?

struct DenotationQuery {
  LamPtr term;
  std::vector<TermPtr> args;  // values for the variables x0, x1, ...
  TermPtr candidate;
};

namespace detail {

struct DenoteCtx {
  const PcaInstance& pca;
  Fuel fuel;
  int enum_bound;
  std::vector<TermPtr> candidates;  // search pool for application witnesses
};

inline std::optional<std::size_t> var_index(
    const std::string& name, const std::vector<std::string>& binders,
    std::size_t nargs) {
  for (std::size_t j = binders.size(); j-- > 0;)
    if (binders[j] == name) return nargs - binders.size() + j;
  if (name.size() >= 2 && name[0] == 'x') {
    std::size_t idx = 0;
    for (std::size_t k = 1; k < name.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(name[k])))
        return std::nullopt;
      idx = idx * 10 + static_cast<std::size_t>(name[k] - '0');
    }
    if (idx < nargs - binders.size()) return idx;
  }
  return std::nullopt;
}

inline Tri denotes_rec(const LamPtr& t, std::vector<TermPtr>& args,
                       std::vector<std::string>& binders,
                       const TermPtr& candidate, DenoteCtx& ctx) {
  switch (t->kind()) {
    case LamKind::Var: {
      auto idx = var_index(t->name(), binders, args.size());
      if (!idx)
        throw std::invalid_argument("unbound variable '" + t->name() +
                                    "' in denotation query");
      return term_eq(args[*idx], candidate) ? Tri::Yes : Tri::No;
    }
    case LamKind::Con:
      return contains_term(t->con_values(), candidate) ? Tri::Yes : Tri::No;
    case LamKind::App: {
      // Some pair (b, c) with b in the function part and c in the argument
      // part must apply to the candidate.
      bool unknown = false;
      for (const auto& b : ctx.candidates) {
        Tri tb = denotes_rec(t->fn(), args, binders, b, ctx);
        if (tb == Tri::Unknown) unknown = true;
        if (tb != Tri::Yes) continue;
        for (const auto& c : ctx.candidates) {
          Tri tc = denotes_rec(t->arg(), args, binders, c, ctx);
          if (tc == Tri::Unknown) unknown = true;
          if (tc != Tri::Yes) continue;
          ApplyResult r = ctx.pca.apply(b, c, ctx.fuel);
          if (r.status == ApplyResult::Status::OutOfFuel) unknown = true;
          if (r.ok() && term_eq(r.value, candidate)) return Tri::Yes;
        }
      }
      return unknown ? Tri::Unknown : Tri::No;
    }
    case LamKind::Abs: {
      // The candidate must map every enumerated element it is defined on
      // into the body's denotation.
      bool unknown = false;
      for (const auto& c : ctx.pca.enumerate(ctx.enum_bound)) {
        ApplyResult r = ctx.pca.apply(candidate, c, ctx.fuel);
        if (r.status == ApplyResult::Status::OutOfFuel) {
          unknown = true;
          continue;
        }
        if (!r.ok()) continue;  // undefined application: vacuously fine
        args.push_back(c);
        binders.push_back(t->name());
        Tri tb = denotes_rec(t->body(), args, binders, r.value, ctx);
        binders.pop_back();
        args.pop_back();
        if (tb == Tri::No) return Tri::No;
        if (tb == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::Yes;
    }
  }
  return Tri::Unknown;
}

}  // namespace detail

inline Tri denotes(const DenotationQuery& q, const PcaInstance& pca, Fuel fuel,
                   int enum_bound) {
  detail::DenoteCtx ctx{pca, fuel, enum_bound, {}};
  std::vector<TermPtr> pool = pca.enumerate(enum_bound);
  if (pca.name == "sk")
    for (const auto& [n, v] : combinator_library()) pool.push_back(v);
  ctx.candidates = sorted_unique(std::move(pool));
  std::vector<TermPtr> args = q.args;
  std::vector<std::string> binders;
  return detail::denotes_rec(q.term, args, binders, q.candidate, ctx);
}

}  // namespace asmcat
