#pragma once
// First-order internal language over assemblies. A formula is checked two
// ways: the clause-wise evidence relation (a value realizes a formula), and
// the truth-value semantics that interprets the formula through the
// subobject calculus. The agreement check compares a witness search for the
// first against a top-witness search for the second, at recorded bounds.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/sub.hpp"

namespace asmcat {

// Canonical selectors: evidence pairs answer them to reveal components.
inline TermPtr first_selector(const PcaInstance& pca) {
  return embed_sk(pca, lib("tru"));
}
inline TermPtr second_selector(const PcaInstance& pca) {
  return embed_sk(pca, lib("fls"));
}

// ---------------------------------------------------------------------------
// Terms of the language: variables and applications of tracked morphisms.

struct FTerm;
using FTermPtr = std::shared_ptr<const FTerm>;

struct FTerm {
  std::string var;                      // used when head is absent
  std::string head_name;                // display name of the applied map
  std::optional<TrackedMorphism> head;  // f(arg)
  FTermPtr arg;

  static FTermPtr mk_var(std::string name) {
    auto t = std::make_shared<FTerm>();
    t->var = std::move(name);
    return t;
  }
  static FTermPtr mk_app(std::string name, TrackedMorphism f, FTermPtr a) {
    auto t = std::make_shared<FTerm>();
    t->head_name = std::move(name);
    t->head = std::move(f);
    t->arg = std::move(a);
    return t;
  }
};

struct Binding {
  Assembly sort;
  std::string elem;
};
using Env = std::map<std::string, Binding>;

inline Binding eval_fterm(const FTermPtr& t, const Env& env) {
  if (!t->head) {
    auto it = env.find(t->var);
    if (it == env.end())
      throw std::invalid_argument("unbound variable '" + t->var + "'");
    return it->second;
  }
  Binding b = eval_fterm(t->arg, env);
  const TrackedMorphism& f = *t->head;
  if (!(f.map.src() == b.sort.carrier))
    throw std::invalid_argument("term applies a map outside its source");
  return Binding{f.dst, f.map.apply(b.elem)};
}

// ---------------------------------------------------------------------------
// Formulas.

enum class FormulaKind : std::uint8_t {
  Top, Bottom, Eq, And, Or, Implies, Exists, ForAllQ, Atom
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind;
  FTermPtr lhs, rhs;  // Eq
  FormulaPtr a, b;    // And / Or / Implies
  std::string var;    // quantifiers
  std::shared_ptr<const Assembly> sort;
  FormulaPtr body;
  std::string atom_name;  // Atom
  std::shared_ptr<const RealizerDatum> relation;
  std::vector<Assembly> arg_sorts;
  std::vector<FTermPtr> args;
};

namespace detail {
inline FormulaPtr f_node(FormulaKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
}  // namespace detail

inline FormulaPtr f_top() { return detail::f_node(FormulaKind::Top); }
inline FormulaPtr f_bot() { return detail::f_node(FormulaKind::Bottom); }

inline FormulaPtr f_eq(FTermPtr l, FTermPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Eq;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

inline FormulaPtr f_binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return f_binary(FormulaKind::And, std::move(a), std::move(b));
}
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return f_binary(FormulaKind::Or, std::move(a), std::move(b));
}
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_binary(FormulaKind::Implies, std::move(a), std::move(b));
}
inline FormulaPtr f_not(FormulaPtr a) {
  return f_implies(std::move(a), f_bot());
}

inline FormulaPtr f_quant(FormulaKind k, std::string var, Assembly sort,
                          FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = std::move(var);
  f->sort = std::make_shared<const Assembly>(std::move(sort));
  f->body = std::move(body);
  return f;
}
inline FormulaPtr f_exists(std::string v, Assembly s, FormulaPtr b) {
  return f_quant(FormulaKind::Exists, std::move(v), std::move(s),
                 std::move(b));
}
inline FormulaPtr f_forall(std::string v, Assembly s, FormulaPtr b) {
  return f_quant(FormulaKind::ForAllQ, std::move(v), std::move(s),
                 std::move(b));
}

// Carrier of a tuple of sorts: the point of the empty tuple, the carrier
// itself for one sort, left-nested pair names beyond.
inline FinObject sorts_carrier(const std::vector<Assembly>& sorts) {
  if (sorts.empty()) return terminal();
  FinObject acc = sorts[0].carrier;
  for (std::size_t i = 1; i < sorts.size(); ++i)
    acc = product(acc, sorts[i].carrier).obj;
  return acc;
}

inline FormulaPtr f_atom(std::string name, RealizerDatum relation,
                         std::vector<Assembly> arg_sorts,
                         std::vector<FTermPtr> args) {
  if (args.size() != arg_sorts.size())
    throw std::invalid_argument("atom argument count mismatch");
  if (!(relation.carrier == sorts_carrier(arg_sorts)))
    throw std::invalid_argument(
        "atom relation must live over the product of its argument sorts");
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Atom;
  f->atom_name = std::move(name);
  f->relation = std::make_shared<const RealizerDatum>(std::move(relation));
  f->arg_sorts = std::move(arg_sorts);
  f->args = std::move(args);
  return f;
}

// The relation-carrier point an atom's arguments pick out under env.
inline std::string atom_point(const Formula& f, const Env& env) {
  if (f.args.empty()) return "*";
  std::string acc;
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    Binding b = eval_fterm(f.args[i], env);
    if (!(b.sort.carrier == f.arg_sorts[i].carrier))
      throw std::invalid_argument("atom argument sort mismatch");
    acc = (i == 0) ? b.elem : pair_name(acc, b.elem);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// The evidence relation, clause by clause. Conjunction evidence answers the
// two selectors with component evidence; disjunction evidence answers the
// first with a selector naming the branch and the second with the branch's
// evidence; existential evidence pairs a realizer of the witness point with
// evidence for the body. Implication premises must be enumerable, so they
// are restricted to the table fragment; bounded-sort quantification runs
// over the finite realizer tables.

inline std::vector<TermPtr> enumerate_realizers(const PcaInstance& pca,
                                                const FormulaPtr& p,
                                                const Env& env, Fuel fuel);

inline Tri realizes(const PcaInstance& pca, const TermPtr& a,
                    const FormulaPtr& p, const Env& env, Fuel fuel) {
  switch (p->kind) {
    case FormulaKind::Top:
      return Tri::Yes;
    case FormulaKind::Bottom:
      return Tri::No;
    case FormulaKind::Eq: {
      Binding l = eval_fterm(p->lhs, env);
      Binding r = eval_fterm(p->rhs, env);
      if (!(l.sort.carrier == r.sort.carrier))
        throw std::invalid_argument("equation sides have different sorts");
      return l.elem == r.elem ? Tri::Yes : Tri::No;
    }
    case FormulaKind::Atom:
      return datum_member(*p->relation, pca, a, atom_point(*p, env), fuel);
    case FormulaKind::And: {
      ApplyResult l = pca.apply(a, first_selector(pca), fuel);
      ApplyResult r = pca.apply(a, second_selector(pca), fuel);
      if (l.status == ApplyResult::Status::Stuck ||
          r.status == ApplyResult::Status::Stuck)
        return Tri::No;
      if (l.status == ApplyResult::Status::OutOfFuel ||
          r.status == ApplyResult::Status::OutOfFuel)
        return Tri::Unknown;
      return tri_and(realizes(pca, l.value, p->a, env, fuel),
                     realizes(pca, r.value, p->b, env, fuel));
    }
    case FormulaKind::Or: {
      ApplyResult tag = pca.apply(a, first_selector(pca), fuel);
      ApplyResult pay = pca.apply(a, second_selector(pca), fuel);
      if (tag.status == ApplyResult::Status::Stuck ||
          pay.status == ApplyResult::Status::Stuck)
        return Tri::No;
      if (tag.status == ApplyResult::Status::OutOfFuel ||
          pay.status == ApplyResult::Status::OutOfFuel)
        return Tri::Unknown;
      if (term_eq(tag.value, first_selector(pca)))
        return realizes(pca, pay.value, p->a, env, fuel);
      if (term_eq(tag.value, second_selector(pca)))
        return realizes(pca, pay.value, p->b, env, fuel);
      return Tri::No;
    }
    case FormulaKind::Implies: {
      Tri acc = Tri::Yes;
      for (const auto& b : enumerate_realizers(pca, p->a, env, fuel)) {
        ApplyResult r = pca.apply(a, b, fuel);
        if (r.status == ApplyResult::Status::Stuck) return Tri::No;
        if (r.status == ApplyResult::Status::OutOfFuel) {
          acc = tri_and(acc, Tri::Unknown);
          continue;
        }
        acc = tri_and(acc, realizes(pca, r.value, p->b, env, fuel));
        if (acc == Tri::No) return Tri::No;
      }
      return acc;
    }
    case FormulaKind::Exists: {
      ApplyResult who = pca.apply(a, first_selector(pca), fuel);
      ApplyResult how = pca.apply(a, second_selector(pca), fuel);
      if (who.status == ApplyResult::Status::Stuck ||
          how.status == ApplyResult::Status::Stuck)
        return Tri::No;
      if (who.status == ApplyResult::Status::OutOfFuel ||
          how.status == ApplyResult::Status::OutOfFuel)
        return Tri::Unknown;
      Tri best = Tri::No;
      for (const auto& x : p->sort->carrier.elements()) {
        if (!contains_term(p->sort->realizers_of(x), who.value)) continue;
        Env inner = env;
        inner[p->var] = Binding{*p->sort, x};
        Tri t = realizes(pca, how.value, p->body, inner, fuel);
        if (t == Tri::Yes) return Tri::Yes;
        if (t == Tri::Unknown) best = Tri::Unknown;
      }
      return best;
    }
    case FormulaKind::ForAllQ: {
      Tri acc = Tri::Yes;
      for (const auto& x : p->sort->carrier.elements()) {
        Env inner = env;
        inner[p->var] = Binding{*p->sort, x};
        for (const auto& b : p->sort->realizers_of(x)) {
          ApplyResult r = pca.apply(a, b, fuel);
          if (r.status == ApplyResult::Status::Stuck) return Tri::No;
          if (r.status == ApplyResult::Status::OutOfFuel) {
            acc = tri_and(acc, Tri::Unknown);
            continue;
          }
          acc = tri_and(acc, realizes(pca, r.value, p->body, inner, fuel));
          if (acc == Tri::No) return Tri::No;
        }
      }
      return acc;
    }
  }
  return Tri::Unknown;
}

inline std::vector<TermPtr> enumerate_realizers(const PcaInstance& pca,
                                                const FormulaPtr& p,
                                                const Env& env, Fuel fuel) {
  switch (p->kind) {
    case FormulaKind::Bottom:
      return {};
    case FormulaKind::Atom: {
      if (p->relation->kind != DatumKind::Finitary)
        throw std::domain_error(
            "atom relation is not a finite table; its evidence set is not "
            "enumerable");
      return p->relation->table.at(atom_point(*p, env));
    }
    case FormulaKind::And: {
      std::vector<TermPtr> out;
      for (const auto& r : enumerate_realizers(pca, p->a, env, fuel))
        for (const auto& s : enumerate_realizers(pca, p->b, env, fuel))
          out.push_back(pair_values(pca, r, s, fuel));
      return sorted_unique(std::move(out));
    }
    case FormulaKind::Or: {
      std::vector<TermPtr> out;
      for (const auto& r : enumerate_realizers(pca, p->a, env, fuel))
        out.push_back(pair_values(pca, first_selector(pca), r, fuel));
      for (const auto& s : enumerate_realizers(pca, p->b, env, fuel))
        out.push_back(pair_values(pca, second_selector(pca), s, fuel));
      return sorted_unique(std::move(out));
    }
    case FormulaKind::Exists: {
      std::vector<TermPtr> out;
      for (const auto& x : p->sort->carrier.elements()) {
        Env inner = env;
        inner[p->var] = Binding{*p->sort, x};
        for (const auto& b : p->sort->realizers_of(x))
          for (const auto& r : enumerate_realizers(pca, p->body, inner, fuel))
            out.push_back(pair_values(pca, b, r, fuel));
      }
      return sorted_unique(std::move(out));
    }
    case FormulaKind::Top:
    case FormulaKind::Eq:
    case FormulaKind::Implies:
    case FormulaKind::ForAllQ:
      throw std::domain_error(
          "the formula's evidence set is not a finite table; it cannot sit "
          "in an enumerable position");
  }
  return {};
}

// ---------------------------------------------------------------------------
// Tabulated evidence: one realizer datum over the product of the free
// variables' sorts, agreeing with the evidence relation clause by clause.
// Table-fragment connectives tabulate outright; implication and bounded
// universals become membership tests over the same finite data the clauses
// quantify over.

using SortContext = std::vector<std::pair<std::string, Assembly>>;

namespace detail {

struct CtxPoint {
  std::string name;
  Env env;
};

inline FinObject ctx_carrier(const SortContext& ctx) {
  std::vector<Assembly> sorts;
  for (const auto& [v, a] : ctx) sorts.push_back(a);
  return sorts_carrier(sorts);
}

inline std::vector<CtxPoint> ctx_points(const SortContext& ctx) {
  std::vector<CtxPoint> pts = {{"*", {}}};
  bool first = true;
  for (const auto& [v, a] : ctx) {
    std::vector<CtxPoint> next;
    for (const auto& p : pts)
      for (const auto& e : a.carrier.elements()) {
        CtxPoint q = p;
        q.name = first ? e : pair_name(p.name, e);
        q.env[v] = Binding{a, e};
        next.push_back(q);
      }
    pts = std::move(next);
    first = false;
  }
  return pts;
}

// The map from the extended tuple carrier back down to the tuple carrier.
inline FinMap ctx_proj(const SortContext& ctx, const Assembly& sort) {
  FinObject base = ctx_carrier(ctx);
  if (ctx.empty()) return FinMap::constant(sort.carrier, base, "*");
  return product(base, sort.carrier).proj1;
}

}  // namespace detail

inline RealizerDatum realizer_datum(const PcaInstance& pca,
                                    const FormulaPtr& p, const SortContext& ctx,
                                    Fuel fuel) {
  FinObject carrier = detail::ctx_carrier(ctx);
  auto points = detail::ctx_points(ctx);
  switch (p->kind) {
    case FormulaKind::Top:
      return impl_datum(bottom_datum(carrier), bottom_datum(carrier));
    case FormulaKind::Bottom:
      return bottom_datum(carrier);
    case FormulaKind::Eq: {
      RealizerTable t;
      for (const auto& pt : points) {
        Binding l = eval_fterm(p->lhs, pt.env);
        Binding r = eval_fterm(p->rhs, pt.env);
        if (!(l.sort.carrier == r.sort.carrier))
          throw std::invalid_argument("equation sides have different sorts");
        t[pt.name] = l.elem == r.elem ? std::vector<TermPtr>{}
                                      : std::vector<TermPtr>{
                                            identity_witness(pca)};
      }
      return impl_datum(finitary_datum(carrier, std::move(t)),
                        bottom_datum(carrier));
    }
    case FormulaKind::Atom: {
      std::map<std::string, std::string> m;
      for (const auto& pt : points) m[pt.name] = atom_point(*p, pt.env);
      return reindex_datum(FinMap(carrier, p->relation->carrier, std::move(m)),
                           *p->relation);
    }
    case FormulaKind::And: {
      RealizerDatum da = realizer_datum(pca, p->a, ctx, fuel);
      RealizerDatum db = realizer_datum(pca, p->b, ctx, fuel);
      if (da.kind != DatumKind::Finitary || db.kind != DatumKind::Finitary)
        throw std::domain_error(
            "conjunct evidence is not a finite table; the conjunction cannot "
            "be tabulated");
      return meet_otimes(pca, da, db, fuel);
    }
    case FormulaKind::Or: {
      RealizerDatum da = realizer_datum(pca, p->a, ctx, fuel);
      RealizerDatum db = realizer_datum(pca, p->b, ctx, fuel);
      if (da.kind != DatumKind::Finitary || db.kind != DatumKind::Finitary)
        throw std::domain_error(
            "disjunct evidence is not a finite table; the disjunction cannot "
            "be tabulated");
      RealizerTable t;
      for (const auto& pt : points) {
        std::vector<TermPtr> cell;
        for (const auto& r : da.table.at(pt.name))
          cell.push_back(pair_values(pca, first_selector(pca), r, fuel));
        for (const auto& s : db.table.at(pt.name))
          cell.push_back(pair_values(pca, second_selector(pca), s, fuel));
        t[pt.name] = std::move(cell);
      }
      return finitary_datum(carrier, std::move(t));
    }
    case FormulaKind::Implies: {
      RealizerDatum da = realizer_datum(pca, p->a, ctx, fuel);
      if (da.kind != DatumKind::Finitary)
        throw std::domain_error(
            "premise evidence is not a finite table; the implication is not "
            "decidable");
      return impl_datum(da, realizer_datum(pca, p->b, ctx, fuel));
    }
    case FormulaKind::Exists: {
      SortContext inner = ctx;
      inner.emplace_back(p->var, *p->sort);
      RealizerDatum db = realizer_datum(pca, p->body, inner, fuel);
      if (db.kind != DatumKind::Finitary)
        throw std::domain_error(
            "existential body evidence is not a finite table");
      RealizerTable t;
      for (const auto& pt : points) t[pt.name] = {};
      for (const auto& pt : points)
        for (const auto& x : p->sort->carrier.elements()) {
          std::string ext =
              ctx.empty() ? x : pair_name(pt.name, x);
          for (const auto& b : p->sort->realizers_of(x))
            for (const auto& r : db.table.at(ext))
              t[pt.name].push_back(pair_values(pca, b, r, fuel));
        }
      return finitary_datum(carrier, std::move(t));
    }
    case FormulaKind::ForAllQ: {
      SortContext inner = ctx;
      inner.emplace_back(p->var, *p->sort);
      RealizerDatum db = realizer_datum(pca, p->body, inner, fuel);
      FinMap along = detail::ctx_proj(ctx, *p->sort);
      RealizerTable args;
      for (const auto& ext : along.src().elements()) args[ext] = {};
      for (const auto& pt : points)
        for (const auto& x : p->sort->carrier.elements()) {
          std::string ext = ctx.empty() ? x : pair_name(pt.name, x);
          args[ext] = p->sort->realizers_of(x);
        }
      return forall_datum(along, db, /*applicative=*/true, std::move(args));
    }
  }
  throw std::logic_error("unreachable formula kind");
}

// ---------------------------------------------------------------------------
// Witness search for closed formulas. The pool starts from the library,
// then terms collected from the formula's own tables, closed under pairing
// and tagging (evidence for the positive connectives has those shapes),
// plus constants and the instance enumeration. Deterministic first hit.

namespace detail {

inline void collect_formula_terms(const FormulaPtr& p,
                                  std::vector<TermPtr>& out) {
  switch (p->kind) {
    case FormulaKind::Atom:
      if (p->relation->kind == DatumKind::Finitary)
        for (const auto& [e, ts] : p->relation->table)
          for (const auto& t : ts) out.push_back(t);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      collect_formula_terms(p->a, out);
      collect_formula_terms(p->b, out);
      return;
    case FormulaKind::Exists:
    case FormulaKind::ForAllQ:
      for (const auto& e : p->sort->carrier.elements())
        for (const auto& t : p->sort->realizers_of(e)) out.push_back(t);
      collect_formula_terms(p->body, out);
      return;
    default:
      return;
  }
}

}  // namespace detail

inline std::vector<TermPtr> witness_pool(const PcaInstance& pca,
                                         const FormulaPtr& p, Fuel fuel,
                                         int search_bound,
                                         const std::vector<TermPtr>& extras) {
  std::vector<TermPtr> pool;
  std::set<std::string> seen;
  auto push = [&](const TermPtr& t) {
    if (!t) return;
    std::string key = print_term(t);
    if (seen.insert(key).second) pool.push_back(t);
  };
  for (const auto& t : extras) push(t);
  if (pca.name == "sk")
    for (const auto& [n, c] : combinator_library()) push(c);

  std::vector<TermPtr> seed;
  seed.push_back(first_selector(pca));
  seed.push_back(second_selector(pca));
  seed.push_back(identity_witness(pca));
  seed.push_back(pca.k_elem);
  detail::collect_formula_terms(p, seed);
  seed = sorted_unique(std::move(seed));
  if (seed.size() > 10) seed.resize(10);
  for (const auto& t : seed) push(t);

  std::vector<TermPtr> shaped;
  for (const auto& s : seed) {
    shaped.push_back(tag_left(pca, s, fuel));
    shaped.push_back(tag_right(pca, s, fuel));
    for (const auto& t : seed)
      shaped.push_back(pair_values(pca, s, t, fuel));
  }
  std::vector<TermPtr> nested;
  for (const auto& s : seed)
    for (const auto& q : shaped) {
      if (nested.size() >= 360) break;
      nested.push_back(pair_values(pca, s, q, fuel));
      nested.push_back(pair_values(pca, q, s, fuel));
    }
  for (const auto& t : shaped) push(t);
  for (const auto& t : nested) push(t);
  if (pca.name == "sk") {
    for (const auto& t : shaped) push(Term::app(Term::k(), t));
    for (const auto& t : seed) push(Term::app(Term::k(), t));
  }
  for (const auto& t : pca.first_elems(search_bound)) push(t);
  return pool;
}

inline std::optional<TermPtr> satisfies(const PcaInstance& pca,
                                        const FormulaPtr& p,
                                        const FilterPtr& filter, Fuel fuel,
                                        int search_bound,
                                        const std::vector<TermPtr>& extras = {}) {
  for (const auto& cand : witness_pool(pca, p, fuel, search_bound, extras)) {
    if (filter_member(filter, RealizerSet::finitary({cand}), fuel,
                      search_bound) != Tri::Yes)
      continue;
    if (realizes(pca, cand, p, {}, fuel) == Tri::Yes) return cand;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Truth-value semantics: interpret the formula as a datum over the tuple
// carrier via the subobject calculus — pair for meets, tag for joins,
// membership tests for implications, fiber operations for quantifiers.
// Positive connectives need finite tables, so membership-test operands are
// first reflected into a table by sampling a deterministic pool; the
// reflection is bound-relative and only ever shrinks the datum.

inline RealizerDatum reflect_finitary(const PcaInstance& pca,
                                      const RealizerDatum& d, Fuel fuel,
                                      int refl_bound) {
  if (d.kind == DatumKind::Finitary) return d;
  std::vector<TermPtr> pool;
  std::set<std::string> seen;
  auto push = [&](const TermPtr& t) {
    if (seen.insert(print_term(t)).second) pool.push_back(t);
  };
  if (pca.name == "sk")
    for (const auto& [n, c] : combinator_library()) push(c);
  for (const auto& t : pca.first_elems(refl_bound)) push(t);
  RealizerTable table;
  for (const auto& x : d.carrier.elements()) {
    std::vector<TermPtr> cell;
    for (const auto& t : pool)
      if (datum_member(d, pca, t, x, fuel) == Tri::Yes) cell.push_back(t);
    table[x] = std::move(cell);
  }
  return finitary_datum(d.carrier, std::move(table));
}

namespace detail {

inline RealizerDatum tarski_datum(const PcaInstance& pca, const FormulaPtr& p,
                                  const SortContext& ctx, const Assembly& prod,
                                  Fuel fuel, int refl_bound) {
  FinObject carrier = prod.carrier;
  auto points = ctx_points(ctx);
  auto table_of = [&](const RealizerDatum& d) {
    return reflect_finitary(pca, d, fuel, refl_bound);
  };
  switch (p->kind) {
    case FormulaKind::Top: {
      RealizerTable t;
      for (const auto& e : carrier.elements()) t[e] = prod.realizers_of(e);
      return finitary_datum(carrier, std::move(t));
    }
    case FormulaKind::Bottom:
      return bottom_datum(carrier);
    case FormulaKind::Eq: {
      RealizerTable t;
      for (const auto& pt : points) {
        Binding l = eval_fterm(p->lhs, pt.env);
        Binding r = eval_fterm(p->rhs, pt.env);
        if (!(l.sort.carrier == r.sort.carrier))
          throw std::invalid_argument("equation sides have different sorts");
        t[pt.name] = l.elem == r.elem ? prod.realizers_of(pt.name)
                                      : std::vector<TermPtr>{};
      }
      return finitary_datum(carrier, std::move(t));
    }
    case FormulaKind::Atom: {
      std::map<std::string, std::string> m;
      for (const auto& pt : points) m[pt.name] = atom_point(*p, pt.env);
      return reindex_datum(FinMap(carrier, p->relation->carrier, std::move(m)),
                           *p->relation);
    }
    case FormulaKind::And:
      return meet_otimes(
          pca, table_of(tarski_datum(pca, p->a, ctx, prod, fuel, refl_bound)),
          table_of(tarski_datum(pca, p->b, ctx, prod, fuel, refl_bound)),
          fuel);
    case FormulaKind::Or:
      return join_oplus(
          pca, table_of(tarski_datum(pca, p->a, ctx, prod, fuel, refl_bound)),
          table_of(tarski_datum(pca, p->b, ctx, prod, fuel, refl_bound)),
          fuel);
    case FormulaKind::Implies:
      return impl_datum(
          table_of(tarski_datum(pca, p->a, ctx, prod, fuel, refl_bound)),
          tarski_datum(pca, p->b, ctx, prod, fuel, refl_bound));
    case FormulaKind::Exists:
    case FormulaKind::ForAllQ: {
      SortContext inner = ctx;
      inner.emplace_back(p->var, *p->sort);
      Assembly ext = ctx.empty()
                         ? *p->sort
                         : asm_product(pca, prod, *p->sort, fuel).obj;
      FinMap along = ctx_proj(ctx, *p->sort);
      RealizerDatum body =
          tarski_datum(pca, p->body, inner, ext, fuel, refl_bound);
      if (p->kind == FormulaKind::Exists) {
        RealizerDatum fin = table_of(body);
        RealizerTable t;
        for (const auto& y : along.dst().elements()) t[y] = {};
        for (const auto& x : along.src().elements())
          for (const auto& b : fin.table.at(x)) t[along.apply(x)].push_back(b);
        return finitary_datum(along.dst(), std::move(t));
      }
      // The subobject-level universal feeds the quantified sort's realizers
      // to the witness, exactly as the evidence clause does; the bare fiber
      // intersection is the adjoint for plain carrier maps, not for the
      // quantifier over an assembly sort.
      RealizerTable args;
      for (const auto& pt : points)
        for (const auto& x : p->sort->carrier.elements()) {
          std::string extp = ctx.empty() ? x : pair_name(pt.name, x);
          args[extp] = p->sort->realizers_of(x);
        }
      return forall_datum(along, body, /*applicative=*/true, std::move(args));
    }
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace detail

// Truth value of a closed formula: a datum over the one-point carrier.
inline RealizerDatum tarski_truth(const PcaInstance& pca, const FormulaPtr& p,
                                  Fuel fuel, int refl_bound = 16) {
  return detail::tarski_datum(pca, p, {}, asm_terminal(pca), fuel, refl_bound);
}

// ---------------------------------------------------------------------------
// The agreement check: the truth value is top exactly when the formula has
// an admissible realizer. Both sides are bound-relative searches, so a
// mismatch is reported as unknown at the recorded bounds — a failure of the
// equivalence is never asserted from a missing witness.

struct AgreementReport {
  std::optional<TermPtr> satisfies_witness;
  std::optional<TermPtr> tarski_witness;
  std::string agreement;  // "agree" | "unknown"
  Fuel fuel{};
  int search_bound = 0;
  int refl_bound = 0;
};

inline AgreementReport abracadabra_check(const PcaInstance& pca,
                                         const FormulaPtr& p,
                                         const FilterPtr& filter, Fuel fuel,
                                         int search_bound,
                                         int refl_bound = 16) {
  AgreementReport rep;
  rep.fuel = fuel;
  rep.search_bound = search_bound;
  rep.refl_bound = refl_bound;
  RealizerDatum truth = tarski_truth(pca, p, fuel, refl_bound);
  RealizerTable top_cell;
  top_cell["*"] = {pca.k_elem};
  RealizerDatum top1 = finitary_datum(terminal(), std::move(top_cell));
  std::vector<TermPtr> extras = witness_pool(pca, p, fuel, search_bound, {});
  if (pca.name == "sk") {
    // The top-witness acts through two applications (once to reach the
    // truth-value cell, once inside a universal), so close the pool under
    // one more constant layer.
    std::size_t n = extras.size();
    for (std::size_t i = 0; i < n; ++i)
      extras.push_back(Term::app(Term::k(), extras[i]));
  }
  auto wt = rleq(pca, top1, truth, filter, fuel, search_bound, extras);
  if (wt) rep.tarski_witness = wt->realizer;
  rep.satisfies_witness = satisfies(pca, p, filter, fuel, search_bound);
  bool a = rep.satisfies_witness.has_value();
  bool b = rep.tarski_witness.has_value();
  rep.agreement = (a == b) ? "agree" : "unknown";
  return rep;
}

// ---------------------------------------------------------------------------
// Concrete syntax. Connectives: /\ \/ -> ~, constants top and bot, equality
// t = s, quantifiers `forall x:X. p` and `exists x:X. p` whose bodies extend
// as far right as possible; -> associates to the right and binds loosest,
// then \/, then /\. Atoms apply declared relation names to terms; terms are
// variables and applications f(t) of declared morphism names.

struct LogicContext {
  std::map<std::string, Assembly> sorts;
  struct Rel {
    RealizerDatum relation;
    std::vector<Assembly> arg_sorts;
  };
  std::map<std::string, Rel> relations;
  std::map<std::string, TrackedMorphism> morphisms;
};

namespace detail {

struct FormulaParser {
  const std::string& s;
  std::size_t i = 0;
  const LogicContext& ctx;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("formula parse error at offset " +
                                std::to_string(i) + ": " + msg);
  }
  void skip() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n'))
      ++i;
  }
  bool eat(const std::string& tok) {
    skip();
    if (s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      return true;
    }
    return false;
  }
  bool peek(const std::string& tok) {
    skip();
    return s.compare(i, tok.size(), tok) == 0;
  }
  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '\'';
  }
  std::string ident() {
    skip();
    std::size_t start = i;
    while (i < s.size() && ident_char(s[i])) ++i;
    if (i == start) fail("expected an identifier");
    return s.substr(start, i - start);
  }

  FTermPtr term() {
    std::string name = ident();
    auto mi = ctx.morphisms.find(name);
    if (mi != ctx.morphisms.end()) {
      if (!eat("(")) fail("morphism '" + name + "' needs an argument");
      FTermPtr inner = term();
      if (!eat(")")) fail("expected ')'");
      return FTerm::mk_app(name, mi->second, inner);
    }
    return FTerm::mk_var(name);
  }

  FormulaPtr formula() {
    FormulaPtr left = disjunction();
    if (eat("->")) return f_implies(left, formula());
    return left;
  }
  FormulaPtr disjunction() {
    FormulaPtr left = conjunction();
    while (true) {
      skip();
      if (s.compare(i, 2, "\\/") == 0) {
        i += 2;
        left = f_or(left, conjunction());
      } else {
        return left;
      }
    }
  }
  FormulaPtr conjunction() {
    FormulaPtr left = unary();
    while (true) {
      skip();
      if (s.compare(i, 2, "/\\") == 0) {
        i += 2;
        left = f_and(left, unary());
      } else {
        return left;
      }
    }
  }
  FormulaPtr quantifier(bool universal) {
    std::string v = ident();
    if (!eat(":")) fail("expected ':' after the bound variable");
    std::string sn = ident();
    auto si = ctx.sorts.find(sn);
    if (si == ctx.sorts.end()) fail("unknown sort '" + sn + "'");
    if (!eat(".")) fail("expected '.' after the quantifier sort");
    FormulaPtr body = formula();
    return universal ? f_forall(v, si->second, body)
                     : f_exists(v, si->second, body);
  }
  FormulaPtr unary() {
    skip();
    if (eat("~")) return f_not(unary());
    if (eat("(")) {
      FormulaPtr inner = formula();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    std::string name = ident();
    if (name == "top") return f_top();
    if (name == "bot") return f_bot();
    if (name == "forall") return quantifier(true);
    if (name == "exists") return quantifier(false);
    auto ri = ctx.relations.find(name);
    if (ri != ctx.relations.end()) {
      std::vector<FTermPtr> args;
      if (eat("(")) {
        args.push_back(term());
        while (eat(",")) args.push_back(term());
        if (!eat(")")) fail("expected ')'");
      }
      return f_atom(name, ri->second.relation, ri->second.arg_sorts,
                    std::move(args));
    }
    // Otherwise the identifier starts a term of an equation.
    FTermPtr lhs;
    auto mi = ctx.morphisms.find(name);
    if (mi != ctx.morphisms.end()) {
      if (!eat("(")) fail("morphism '" + name + "' needs an argument");
      FTermPtr inner = term();
      if (!eat(")")) fail("expected ')'");
      lhs = FTerm::mk_app(name, mi->second, inner);
    } else {
      lhs = FTerm::mk_var(name);
    }
    if (!eat("=")) fail("expected '=' after a term");
    return f_eq(lhs, term());
  }
};

}  // namespace detail

inline FormulaPtr parse_formula(const std::string& text,
                                const LogicContext& ctx) {
  detail::FormulaParser p{text, 0, ctx};
  FormulaPtr f = p.formula();
  p.skip();
  if (p.i != text.size()) p.fail("trailing input");
  return f;
}

inline std::string print_fterm(const FTermPtr& t) {
  if (!t->head) return t->var;
  return t->head_name + "(" + print_fterm(t->arg) + ")";
}

inline std::string print_formula(const FormulaPtr& p);

namespace detail {
// Quantifier bodies stretch maximally right, so a quantifier sitting as an
// operand of a binary connective needs its own parentheses.
inline std::string print_operand(const FormulaPtr& p) {
  std::string s = print_formula(p);
  if (p->kind == FormulaKind::Exists || p->kind == FormulaKind::ForAllQ)
    return "(" + s + ")";
  return s;
}
}  // namespace detail

inline std::string print_formula(const FormulaPtr& p) {
  switch (p->kind) {
    case FormulaKind::Top:
      return "top";
    case FormulaKind::Bottom:
      return "bot";
    case FormulaKind::Eq:
      return print_fterm(p->lhs) + " = " + print_fterm(p->rhs);
    case FormulaKind::Atom: {
      if (p->args.empty()) return p->atom_name;
      std::string out = p->atom_name + "(";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) out += ", ";
        out += print_fterm(p->args[i]);
      }
      return out + ")";
    }
    case FormulaKind::And:
      return "(" + detail::print_operand(p->a) + " /\\ " +
             detail::print_operand(p->b) + ")";
    case FormulaKind::Or:
      return "(" + detail::print_operand(p->a) + " \\/ " +
             detail::print_operand(p->b) + ")";
    case FormulaKind::Implies:
      if (p->b->kind == FormulaKind::Bottom)
        return "~" + detail::print_operand(p->a);
      return "(" + detail::print_operand(p->a) + " -> " +
             detail::print_operand(p->b) + ")";
    case FormulaKind::Exists:
      return "exists " + p->var + ":" + p->sort->name + ". " +
             print_formula(p->body);
    case FormulaKind::ForAllQ:
      return "forall " + p->var + ":" + p->sort->name + ". " +
             print_formula(p->body);
  }
  return "?";
}

}  // namespace asmcat
