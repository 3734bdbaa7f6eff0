#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "asmcat/lambda.hpp"
#include "asmcat/pca.hpp"
#include "asmcat/term.hpp"

using namespace asmcat;

namespace {

// --- Independent oracle: de Bruijn terms with textbook shift/substitute ----
// Free variables and combinator constants are treated as opaque labels, so
// capture is impossible by construction. Agreement between this pipeline and
// the named-term pipeline exercises capture-avoiding substitution hard.

struct Db;
using DbPtr = std::shared_ptr<const Db>;
struct Db {
  int tag;  // 0 var, 1 app, 2 lam, 3 label
  int idx = -1;
  DbPtr a, b;
  std::string label;
};

DbPtr db_var(int i) {
  auto d = std::make_shared<Db>();
  d->tag = 0;
  d->idx = i;
  return d;
}
DbPtr db_app(DbPtr f, DbPtr x) {
  auto d = std::make_shared<Db>();
  d->tag = 1;
  d->a = std::move(f);
  d->b = std::move(x);
  return d;
}
DbPtr db_lam(DbPtr b) {
  auto d = std::make_shared<Db>();
  d->tag = 2;
  d->a = std::move(b);
  return d;
}
DbPtr db_label(std::string s) {
  auto d = std::make_shared<Db>();
  d->tag = 3;
  d->label = std::move(s);
  return d;
}

DbPtr db_of(const LamPtr& t, std::vector<std::string>& ctx) {
  switch (t->kind()) {
    case LamKind::Var: {
      for (std::size_t j = ctx.size(); j-- > 0;)
        if (ctx[j] == t->name())
          return db_var(static_cast<int>(ctx.size() - 1 - j));
      return db_label("fv:" + t->name());
    }
    case LamKind::App: {
      auto f = db_of(t->fn(), ctx);
      auto x = db_of(t->arg(), ctx);
      return db_app(std::move(f), std::move(x));
    }
    case LamKind::Abs: {
      ctx.push_back(t->name());
      auto b = db_of(t->body(), ctx);
      ctx.pop_back();
      return db_lam(std::move(b));
    }
    case LamKind::Con: {
      std::string s = "con:";
      for (const auto& v : t->con_values()) s += print_term(v) + ";";
      return db_label(std::move(s));
    }
  }
  return nullptr;
}

DbPtr db_of(const LamPtr& t) {
  std::vector<std::string> ctx;
  return db_of(t, ctx);
}

bool db_eq(const DbPtr& a, const DbPtr& b) {
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case 0: return a->idx == b->idx;
    case 1: return db_eq(a->a, b->a) && db_eq(a->b, b->b);
    case 2: return db_eq(a->a, b->a);
    default: return a->label == b->label;
  }
}

DbPtr db_shift(const DbPtr& t, int d, int cutoff) {
  switch (t->tag) {
    case 0: return t->idx >= cutoff ? db_var(t->idx + d) : t;
    case 1: return db_app(db_shift(t->a, d, cutoff), db_shift(t->b, d, cutoff));
    case 2: return db_lam(db_shift(t->a, d, cutoff + 1));
    default: return t;
  }
}

DbPtr db_subst(const DbPtr& t, int j, const DbPtr& s) {
  switch (t->tag) {
    case 0: return t->idx == j ? s : t;
    case 1: return db_app(db_subst(t->a, j, s), db_subst(t->b, j, s));
    case 2: return db_lam(db_subst(t->a, j + 1, db_shift(s, 1, 0)));
    default: return t;
  }
}

DbPtr db_beta_contract(const DbPtr& lam_body, const DbPtr& arg) {
  return db_shift(db_subst(lam_body, 0, db_shift(arg, 1, 0)), -1, 0);
}

DbPtr db_step(const DbPtr& t) {
  switch (t->tag) {
    case 1: {
      if (t->a->tag == 2) return db_beta_contract(t->a->a, t->b);
      if (auto f = db_step(t->a)) return db_app(f, t->b);
      if (auto x = db_step(t->b)) return db_app(t->a, x);
      return nullptr;
    }
    case 2: {
      if (auto b = db_step(t->a)) return db_lam(b);
      return nullptr;
    }
    default: return nullptr;
  }
}

DbPtr db_normalize(DbPtr t, int max_steps) {
  for (int i = 0; i <= max_steps; ++i) {
    auto n = db_step(t);
    if (!n) return t;
    if (i == max_steps) break;
    t = n;
  }
  return nullptr;
}

// Random named lambda terms over a small variable pool.
LamPtr gen_term(std::mt19937& rng, int depth, std::vector<std::string> scope) {
  static const std::vector<std::string> pool = {"x", "y", "z", "w"};
  std::uniform_int_distribution<int> pick(0, 99);
  int r = pick(rng);
  if (depth <= 0 || r < 30) {
    if (r < 8 || scope.empty()) {
      // Occasionally a combinator constant or a free variable.
      if (r < 4) return LambdaTerm::con_term(r % 2 ? Term::k() : Term::s());
      return LambdaTerm::var(pool[static_cast<std::size_t>(r) % pool.size()]);
    }
    return LambdaTerm::var(scope[static_cast<std::size_t>(r) % scope.size()]);
  }
  if (r < 62) {
    auto f = gen_term(rng, depth - 1, scope);
    auto x = gen_term(rng, depth - 1, scope);
    return LambdaTerm::app(std::move(f), std::move(x));
  }
  std::string b = pool[static_cast<std::size_t>(r) % pool.size()];
  scope.push_back(b);
  auto body = gen_term(rng, depth - 1, scope);
  return LambdaTerm::abs(b, std::move(body));
}

// Read an abstraction-free, variable-free lambda term back as a combinator
// term (the trivial embedding, independent of bracket abstraction).
TermPtr read_term(const LamPtr& t) {
  if (t->kind() == LamKind::Con) {
    REQUIRE(t->con_singleton());
    return t->con_values()[0];
  }
  REQUIRE(t->kind() == LamKind::App);
  return Term::app(read_term(t->fn()), read_term(t->arg()));
}

bool lambda_free(const LamPtr& t) {
  switch (t->kind()) {
    case LamKind::Var: return false;
    case LamKind::Con: return true;
    case LamKind::Abs: return false;
    case LamKind::App: return lambda_free(t->fn()) && lambda_free(t->arg());
  }
  return false;
}

LamPtr lam(const std::string& s) { return parse_lambda(s); }

}  // namespace

TEST_CASE("lambda printing uses minimal parentheses") {
  CHECK(print_lambda(lam("\\x. x")) == "\\x. x");
  CHECK(print_lambda(lam("\\x y. x")) == "\\x y. x");
  CHECK(print_lambda(lam("\\x. \\y. x")) == "\\x y. x");
  CHECK(print_lambda(lam("f a b")) == "f a b");
  CHECK(print_lambda(lam("f (a b)")) == "f (a b)");
  CHECK(print_lambda(lam("(\\x. x) a")) == "(\\x. x) a");
  CHECK(print_lambda(lam("f (\\x. x)")) == "f (\\x. x)");
  CHECK(print_lambda(lam("\\p. p {K} {S K}")) == "\\p. p {K} {S K}");
  CHECK(print_lambda(lam("[pair] a")) == "{" + print_term(lib("pair")) + "} a");
}

TEST_CASE("lambda parser roundtrips and accepts flexible binder syntax") {
  for (const std::string s :
       {"\\x. x", "\\x y z. x (y z)", "f a (b c) d", "\\p. p {K} {S}",
        "(\\x. x x) (\\x. x x)", "\\f. (\\x. f (x x)) (\\x. f (x x))"}) {
    LamPtr t = parse_lambda(s);
    LamPtr again = parse_lambda(print_lambda(t));
    CHECK(alpha_eq(t, again));
  }
  CHECK(alpha_eq(lam("\\x, y. x"), lam("\\x y. x")));
  CHECK(alpha_eq(lam("  \\x .  x  "), lam("\\x. x")));
}

TEST_CASE("lambda parser reports errors") {
  CHECK_THROWS_AS(parse_lambda("\\x."), ParseError);
  CHECK_THROWS_AS(parse_lambda("(a b"), ParseError);
  CHECK_THROWS_AS(parse_lambda("a b)"), ParseError);
  CHECK_THROWS_AS(parse_lambda("\\. x"), ParseError);
  CHECK_THROWS_AS(parse_lambda("[no_such_combinator]"), ParseError);
  CHECK_THROWS_AS(parse_lambda("{K S"), ParseError);
  CHECK_THROWS_AS(parse_lambda("{K K K}"), ParseError);  // spliced non-value
  CHECK_THROWS_AS(parse_lambda("{#a )}"), ParseError);  // bad inner syntax
  CHECK_THROWS_AS(parse_lambda(""), ParseError);
}

TEST_CASE("free variables and alpha equivalence") {
  CHECK(free_vars(lam("\\x. x y")) == std::set<std::string>{"y"});
  CHECK(free_vars(lam("\\x y. x")).empty());
  CHECK(free_vars(lam("x (\\x. x)")) == std::set<std::string>{"x"});
  CHECK(alpha_eq(lam("\\x. x"), lam("\\y. y")));
  CHECK(alpha_eq(lam("\\x y. x y"), lam("\\a b. a b")));
  CHECK_FALSE(alpha_eq(lam("\\x y. x"), lam("\\x y. y")));
  CHECK_FALSE(alpha_eq(lam("x"), lam("y")));
  // Bound occurrences never match free ones of the same spelling.
  CHECK_FALSE(alpha_eq(lam("\\x. x"), lam("\\x. y")));
}

TEST_CASE("substitution avoids capture") {
  // ((\x. \y. x) y) must not capture the free y.
  LamPtr t = lam("(\\x. \\y. x) y");
  auto nf = normalize(t, Fuel{10});
  REQUIRE(nf.has_value());
  CHECK(free_vars(*nf) == std::set<std::string>{"y"});
  CHECK((*nf)->kind() == LamKind::Abs);
  CHECK((*nf)->body()->kind() == LamKind::Var);
  CHECK((*nf)->body()->name() == "y");
  CHECK((*nf)->name() != "y");

  // Direct check through the index-based oracle: one named step equals one
  // de Bruijn step after conversion.
  std::mt19937 rng(424242);
  int checked = 0;
  for (int it = 0; it < 400; ++it) {
    LamPtr body = gen_term(rng, 4, {"x"});
    LamPtr repl = gen_term(rng, 3, {});
    LamPtr redex = LambdaTerm::app(LambdaTerm::abs("x", body), repl);
    LamPtr named = substitute(body, "x", repl);
    DbPtr via_db = db_beta_contract(db_of(LambdaTerm::abs("x", body))->a,
                                    db_of(repl));
    CHECK(db_eq(db_of(named), via_db));
    // The same contraction is what one leftmost step performs.
    auto stepped = beta_step(redex);
    REQUIRE(stepped.has_value());
    CHECK(db_eq(db_of(*stepped), via_db));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("normalization agrees with the de Bruijn oracle") {
  std::mt19937 rng(20260816);
  int agreed = 0;
  for (int it = 0; it < 600; ++it) {
    LamPtr t = gen_term(rng, 5, {});
    auto nf = normalize(t, Fuel{120});
    DbPtr dnf = db_normalize(db_of(t), 120);
    REQUIRE(nf.has_value() == (dnf != nullptr));  // same strategy, same fuel
    if (!nf) continue;
    CHECK(db_eq(db_of(*nf), dnf));
    ++agreed;
  }
  CHECK(agreed > 400);  // most random terms normalize quickly
}

TEST_CASE("normalization is leftmost-outermost and fuel-bounded") {
  // K-style discard reaches a normal form even with a diverging argument.
  LamPtr t = lam("(\\a b. a) z ((\\x. x x) (\\x. x x))");
  auto nf = normalize(t, Fuel{10});
  REQUIRE(nf.has_value());
  CHECK(print_lambda(*nf) == "z");

  LamPtr omega = lam("(\\x. x x) (\\x. x x)");
  CHECK_FALSE(normalize(omega, Fuel{50}).has_value());

  // Reduction under binders reaches full normal form.
  auto nf2 = normalize(lam("\\y. (\\x. x) y"), Fuel{10});
  REQUIRE(nf2.has_value());
  CHECK(print_lambda(*nf2) == "\\y. y");
}

TEST_CASE("convertibility decides beta-eta equality three-valued") {
  CHECK(converts(lam("\\x. f x"), lam("f"), Fuel{64}) == Tri::Yes);
  CHECK(converts(lam("\\x. x"), lam("\\y. y"), Fuel{64}) == Tri::Yes);
  CHECK(converts(lam("(\\x y. x) a"), lam("\\q. a"), Fuel{64}) == Tri::Yes);
  CHECK(converts(lam("\\x y. x"), lam("\\x y. y"), Fuel{64}) == Tri::No);
  CHECK(converts(lam("f"), lam("g"), Fuel{64}) == Tri::No);
  // Nested eta: \x. \y. f x y collapses to f in two rounds.
  CHECK(converts(lam("\\x y. f x y"), lam("f"), Fuel{64}) == Tri::Yes);
  // Divergence yields Unknown rather than a wrong verdict.
  LamPtr omega = lam("(\\x. x x) (\\x. x x)");
  CHECK(converts(omega, lam("\\x. x"), Fuel{20}) == Tri::Unknown);
  CHECK(converts(omega, omega, Fuel{20}) == Tri::Unknown);
}

TEST_CASE("bracket abstraction produces the canonical identity and values") {
  CHECK(print_term(bracket_abstract(lam("\\x. x"))) == "S K K");
  CHECK(print_term(bracket_abstract(lam("\\x y. x"))) == "S (K K) (S K K)");
  CHECK(print_term(bracket_abstract(lam("\\x y. y"))) == "K (S K K)");
  CHECK_THROWS_AS(bracket_abstract(lam("\\x. y")), std::invalid_argument);
  for (const auto& [name, v] : combinator_library()) {
    INFO(name);
    CHECK(is_value(v));
    CHECK(is_pure_ks(*v));
  }
  // The eta shortcut is off by default and changes the translation when on.
  LamPtr ap = lam("\\x. f x");
  // f free: close it over a constant first.
  LamPtr closed = substitute(ap, "f", LambdaTerm::con_term(Term::k()));
  CHECK(print_term(bracket_abstract(closed)) == "S (K K) (S K K)");
  CHECK(print_term(bracket_abstract(closed, true)) == "K");
}

TEST_CASE("compiled combinators simulate their lambda sources") {
  PcaInstance pca = sk_pca();
  Fuel fuel{512};
  struct Entry {
    std::string name;
    std::string src;
    int arity;
  };
  // Sources restated independently of the library construction.
  const std::vector<Entry> entries = {
      {"id", "\\x. x", 1},
      {"tru", "\\x y. x", 2},
      {"fls", "\\x y. y", 2},
      {"pair", "\\x y p. p x y", 3},
      {"fst", "\\x. x (\\y z. y)", 1},
      {"snd", "\\x. x (\\y z. z)", 1},
      {"inl", "\\x f g. f x", 3},
      {"inr", "\\x f g. g x", 3},
      {"compose", "\\f g x. f (g x)", 3},
      {"flip_apply", "\\w x. x w", 2},
      {"curry", "\\w x y. w ([pair] x y)", 3},
      {"mkpair", "\\u v x. [pair] (u x) (v x)", 3},
      {"case2", "\\u v x. x u v", 3},
      {"drop2", "\\w c b. w c", 3},
      {"appl", "\\x y z. (x y) z", 3},
  };
  std::vector<TermPtr> sample = pca.enumerate(2);
  std::mt19937 rng(777);
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  int covered = 0;
  for (const auto& e : entries) {
    TermPtr compiled = lib(e.name);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<TermPtr> args;
      LamPtr applied = parse_lambda(e.src);
      for (int k = 0; k < e.arity; ++k) {
        TermPtr a = sample[pick(rng)];
        args.push_back(a);
        applied = LambdaTerm::app(applied, LambdaTerm::con_term(a));
      }
      auto nf = normalize(applied, Fuel{400});
      if (!nf || !lambda_free(*nf)) continue;
      ApplyResult oracle = weak_normalize(read_term(*nf), fuel);
      ApplyResult engine = pca.apply_chain(compiled, args, fuel);
      if (!oracle.ok() || !engine.ok()) continue;
      INFO(e.name << " on " << args.size() << " args");
      CHECK(term_eq(oracle.value, engine.value));
      ++covered;
    }
  }
  CHECK(covered > 100);
}

TEST_CASE("library combinators compute their specifying equations") {
  PcaInstance pca = sk_pca();
  Fuel fuel{512};
  auto a = Term::atom("a");
  auto b = Term::atom("b");
  auto chain = [&](const TermPtr& f, std::vector<TermPtr> xs) {
    ApplyResult r = pca.apply_chain(f, xs, fuel);
    REQUIRE(r.ok());
    return r.value;
  };
  CHECK(term_eq(chain(lib("id"), {a}), a));
  CHECK(term_eq(chain(lib("tru"), {a, b}), a));
  CHECK(term_eq(chain(lib("fls"), {a, b}), b));

  TermPtr p = chain(lib("pair"), {a, b});
  CHECK(is_value(p));
  CHECK(term_eq(chain(lib("fst"), {p}), a));
  CHECK(term_eq(chain(lib("snd"), {p}), b));
  // Frozen shape of a constructed pair.
  CHECK(print_term(p) == "S (S (S K K) (K #a)) (K #b)");
  // Selector applied directly: a pair is itself a case analyser.
  CHECK(term_eq(chain(p, {lib("tru")}), a));
  CHECK(term_eq(chain(p, {lib("fls")}), b));

  TermPtr la = chain(lib("inl"), {a});
  TermPtr rb = chain(lib("inr"), {b});
  TermPtr u = Term::app(Term::k(), a);  // K a: sends anything to a
  TermPtr v = Term::app(Term::k(), b);
  CHECK(term_eq(chain(lib("case2"), {u, v, la}), a));
  CHECK(term_eq(chain(lib("case2"), {u, v, rb}), b));

  CHECK(term_eq(chain(lib("compose"), {lib("id"), lib("id"), a}), a));
  CHECK(term_eq(chain(lib("compose"), {u, lib("id"), b}), a));
  CHECK(term_eq(chain(lib("flip_apply"), {a, Term::k()}),
                Term::app(Term::k(), a)));
  CHECK(term_eq(chain(lib("curry"), {lib("fst"), a, b}), a));
  CHECK(term_eq(chain(lib("curry"), {lib("snd"), a, b}), b));
  TermPtr mk = chain(lib("mkpair"), {u, lib("id"), b});
  CHECK(term_eq(chain(lib("fst"), {mk}), a));
  CHECK(term_eq(chain(lib("snd"), {mk}), b));
  CHECK(term_eq(chain(lib("drop2"), {lib("id"), a, b}), a));
  CHECK(term_eq(chain(lib("appl"), {Term::k(), a, b}), a));
}

TEST_CASE("library entries are elements of the combinatory instances") {
  PcaInstance sk = sk_pca();
  for (const auto& [name, v] : combinator_library()) {
    INFO(name);
    CHECK(sk.is_element(v));
  }
  CHECK_THROWS_AS(lib("nonexistent"), std::out_of_range);
}

TEST_CASE("denotation of variables, constants, and applications") {
  PcaInstance pca = sk_pca();
  Fuel fuel{64};
  auto K = Term::k();
  auto S = Term::s();

  DenotationQuery q;
  q.term = lam("x0");
  q.args = {K};
  q.candidate = K;
  CHECK(denotes(q, pca, fuel, 2) == Tri::Yes);
  q.candidate = S;
  CHECK(denotes(q, pca, fuel, 2) == Tri::No);

  q.term = LambdaTerm::con("U", {K, S});
  q.candidate = S;
  CHECK(denotes(q, pca, fuel, 2) == Tri::Yes);
  q.candidate = Term::app(K, K);
  CHECK(denotes(q, pca, fuel, 2) == Tri::No);

  // Application: the candidate must arise as b c with b, c drawn from the
  // interpretations of the parts.
  q.term = lam("x0 x1");
  q.args = {K, K};
  q.candidate = Term::app(K, K);
  CHECK(denotes(q, pca, fuel, 2) == Tri::Yes);
  q.candidate = S;
  CHECK(denotes(q, pca, fuel, 2) == Tri::No);

  // Unbound variables are rejected.
  DenotationQuery bad;
  bad.term = lam("q");
  bad.candidate = K;
  CHECK_THROWS_AS(denotes(bad, pca, fuel, 2), std::invalid_argument);
  DenotationQuery oob;
  oob.term = lam("x1");
  oob.args = {K};
  oob.candidate = K;
  CHECK_THROWS_AS(denotes(oob, pca, fuel, 2), std::invalid_argument);
}

TEST_CASE("denotation of abstractions quantifies over enumerated elements") {
  PcaInstance pca = sk_pca();
  Fuel fuel{64};
  DenotationQuery q;
  q.term = lam("\\y. y");
  q.args = {};
  q.candidate = lib("id");
  CHECK(denotes(q, pca, fuel, 2) == Tri::Yes);
  q.candidate = Term::k();  // K c is a value but differs from c
  CHECK(denotes(q, pca, fuel, 2) == Tri::No);

  // Binders shadow the positional variables and indexing stays aligned.
  q.term = lam("\\y. x0");
  q.args = {Term::k()};
  q.candidate = Term::app(Term::k(), Term::k());  // K K c -> K always
  CHECK(denotes(q, pca, fuel, 2) == Tri::Yes);
  q.candidate = lib("id");
  CHECK(denotes(q, pca, fuel, 2) == Tri::No);

  // Interpretation is stable under beta-eta conversion of the query term.
  DenotationQuery q2;
  q2.term = lam("\\y. (\\z. z) y");
  for (const TermPtr& cand : {lib("id"), Term::k()}) {
    q.term = lam("\\y. y");
    q.args = {};
    q.candidate = cand;
    q2.args = {};
    q2.candidate = cand;
    CHECK(denotes(q, pca, fuel, 2) == denotes(q2, pca, fuel, 2));
  }
}
