#pragma once
// Realizer-indexed predicates over a finite carrier, ordered by computable
// evidence: U is below V when a single value maps every U-realizer at every
// point into V's cell at that point. Meets pair realizers, joins tag them,
// and implication is a fuel-bounded membership test, so the order carries
// Heyting structure with explicit combinator witnesses.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/assembly.hpp"

namespace asmcat {

// ---------------------------------------------------------------------------
// Realizer data: per-element sets of evidence values. Finitary data list
// their cells outright; implication and fiberwise-universal data only expose
// a decidable-with-fuel membership test.

enum class DatumKind : std::uint8_t { Finitary, Impl, ForAll };

struct RealizerDatum;
using DatumPtr = std::shared_ptr<const RealizerDatum>;

struct RealizerDatum {
  DatumKind kind = DatumKind::Finitary;
  FinObject carrier;

  // Finitary: element -> values; cells may be empty, every element present.
  RealizerTable table;

  // Impl: a belongs at x when a sends every lhs value at x into rhs at x.
  DatumPtr lhs, rhs;

  // ForAll: a belongs at y when it belongs to `body` at every preimage of y
  // under `along`; with `applicative` set, a is first applied to each of the
  // listed arguments at that preimage and the results must belong instead.
  FinMap along;  // body->carrier over along.src(), this datum over along.dst()
  DatumPtr body;
  bool applicative = false;
  RealizerTable args;  // applicative only: arguments per along.src() element
};

inline RealizerDatum finitary_datum(FinObject carrier, RealizerTable table) {
  RealizerDatum d;
  d.kind = DatumKind::Finitary;
  for (auto& [e, ts] : table) {
    if (!carrier.contains(e))
      throw std::invalid_argument("datum table names '" + e +
                                  "' outside the carrier");
    for (const auto& t : ts)
      if (!is_value(t))
        throw std::invalid_argument("datum cells may only contain values");
    ts = sorted_unique(std::move(ts));
  }
  for (const auto& e : carrier.elements())
    if (!table.count(e)) table[e] = {};
  d.carrier = std::move(carrier);
  d.table = std::move(table);
  return d;
}

inline RealizerDatum bottom_datum(const FinObject& carrier) {
  return finitary_datum(carrier, {});
}

inline RealizerDatum top_datum(const PcaInstance& pca,
                               const FinObject& carrier) {
  RealizerTable t;
  for (const auto& e : carrier.elements())
    t[e] = {identity_witness(pca)};
  return finitary_datum(carrier, std::move(t));
}

inline RealizerDatum impl_datum(const RealizerDatum& u,
                                const RealizerDatum& v) {
  if (!(u.carrier == v.carrier))
    throw std::invalid_argument("implication needs a shared carrier");
  RealizerDatum d;
  d.kind = DatumKind::Impl;
  d.carrier = u.carrier;
  d.lhs = std::make_shared<const RealizerDatum>(u);
  d.rhs = std::make_shared<const RealizerDatum>(v);
  return d;
}

// Fiberwise-universal datum over along.dst(); see RealizerDatum::along.
inline RealizerDatum forall_datum(const FinMap& along, const RealizerDatum& body,
                                  bool applicative = false,
                                  RealizerTable args = {}) {
  if (!(body.carrier == along.src()))
    throw std::invalid_argument(
        "universal datum body must live over the map's source");
  if (applicative) {
    for (const auto& e : along.src().elements()) {
      if (!args.count(e))
        throw std::invalid_argument(
            "applicative universal datum needs arguments at '" + e + "'");
      for (const auto& t : args.at(e))
        if (!is_value(t))
          throw std::invalid_argument("arguments must be values");
    }
  }
  RealizerDatum d;
  d.kind = DatumKind::ForAll;
  d.carrier = along.dst();
  d.along = along;
  d.body = std::make_shared<const RealizerDatum>(body);
  d.applicative = applicative;
  d.args = std::move(args);
  return d;
}

// ---------------------------------------------------------------------------
// Membership: exact on finitary cells; implication with a non-finitary left
// side can only refute or stay unknown (the premise set is not enumerable).

inline Tri datum_member(const RealizerDatum& d, const PcaInstance& pca,
                        const TermPtr& a, const std::string& x, Fuel fuel,
                        int sample_bound = 8) {
  if (!d.carrier.contains(x))
    throw std::invalid_argument("element '" + x +
                                "' is outside the datum carrier");
  switch (d.kind) {
    case DatumKind::Finitary:
      return contains_term(d.table.at(x), a) ? Tri::Yes : Tri::No;
    case DatumKind::Impl: {
      if (d.lhs->kind == DatumKind::Finitary) {
        Tri acc = Tri::Yes;
        for (const auto& b : d.lhs->table.at(x)) {
          ApplyResult r = pca.apply(a, b, fuel);
          if (r.status == ApplyResult::Status::Stuck) return Tri::No;
          if (r.status == ApplyResult::Status::OutOfFuel)
            acc = tri_and(acc, Tri::Unknown);
          else
            acc = tri_and(acc, datum_member(*d.rhs, pca, r.value, x, fuel,
                                            sample_bound));
          if (acc == Tri::No) return Tri::No;
        }
        return acc;
      }
      // Premises only testable: sample them; a pass is never conclusive.
      std::vector<TermPtr> pool;
      if (pca.name == "sk")
        for (const auto& [n, c] : combinator_library()) pool.push_back(c);
      for (const auto& b : pca.first_elems(sample_bound)) pool.push_back(b);
      for (const auto& b : pool) {
        if (datum_member(*d.lhs, pca, b, x, fuel, sample_bound) != Tri::Yes)
          continue;
        ApplyResult r = pca.apply(a, b, fuel);
        if (r.status == ApplyResult::Status::Stuck) return Tri::No;
        if (r.status == ApplyResult::Status::OutOfFuel) continue;
        if (datum_member(*d.rhs, pca, r.value, x, fuel, sample_bound) ==
            Tri::No)
          return Tri::No;
      }
      return Tri::Unknown;
    }
    case DatumKind::ForAll: {
      Tri acc = Tri::Yes;
      for (const auto& z : d.along.src().elements()) {
        if (d.along.apply(z) != x) continue;
        if (!d.applicative) {
          acc = tri_and(acc,
                        datum_member(*d.body, pca, a, z, fuel, sample_bound));
        } else {
          for (const auto& b : d.args.at(z)) {
            ApplyResult r = pca.apply(a, b, fuel);
            if (r.status == ApplyResult::Status::Stuck) return Tri::No;
            if (r.status == ApplyResult::Status::OutOfFuel)
              acc = tri_and(acc, Tri::Unknown);
            else
              acc = tri_and(acc, datum_member(*d.body, pca, r.value, z, fuel,
                                              sample_bound));
            if (acc == Tri::No) return Tri::No;
          }
        }
        if (acc == Tri::No) return Tri::No;
      }
      return acc;
    }
  }
  return Tri::Unknown;
}

// ---------------------------------------------------------------------------
// Subassemblies as data and back: a monic tracked inclusion pushes its
// realizer table forward (empty cells off the image); a finitary datum cuts
// out the assembly on its support with a freshly tracked inclusion.

inline RealizerDatum datum_of_mono(const TrackedMorphism& mono) {
  std::set<std::string> hit;
  for (const auto& u : mono.src.carrier.elements())
    if (!hit.insert(mono.map.apply(u)).second)
      throw std::invalid_argument(
          "the inclusion must be injective on carriers");
  RealizerTable t;
  for (const auto& u : mono.src.carrier.elements())
    t[mono.map.apply(u)] = mono.src.realizers_of(u);
  return finitary_datum(mono.dst.carrier, std::move(t));
}

inline TrackedMorphism mono_of_datum(const PcaInstance& pca,
                                     const RealizerDatum& d, const Assembly& x,
                                     Fuel fuel, int search_bound) {
  if (d.kind != DatumKind::Finitary)
    throw std::invalid_argument("only finitary data cut out subassemblies");
  if (!(d.carrier == x.carrier))
    throw std::invalid_argument("datum carrier must match the assembly");
  std::vector<std::string> support;
  RealizerTable t;
  for (const auto& e : d.carrier.elements())
    if (!d.table.at(e).empty()) {
      support.push_back(e);
      t[e] = d.table.at(e);
    }
  FinObject sc(support);
  Assembly sub = make_assembly(x.name + "|supp", sc, std::move(t));
  std::map<std::string, std::string> im;
  for (const auto& e : sc.elements()) im[e] = e;
  FinMap incl(sc, x.carrier, std::move(im));
  auto w = find_tracker(pca, incl, sub, x, Filter::inhabited(), search_bound,
                        fuel, {identity_witness(pca)});
  if (!w)
    throw std::runtime_error(
        "no tracker found for the support inclusion within bounds");
  return tracked(pca, sub, x, incl, *w, fuel);
}

// ---------------------------------------------------------------------------
// The evidence preorder. A witness a satisfies: for every point x and every
// value b in U's cell at x, a·b is defined and lands in V at x. The left
// side must be finitary so the check enumerates; the filter constrains which
// witnesses are admissible.

struct RleqWitness {
  TermPtr realizer;
  Fuel checked_at;
};

inline Tri evidence_checks(const PcaInstance& pca, const TermPtr& a,
                           const RealizerDatum& u, const RealizerDatum& v,
                           Fuel fuel, int sample_bound = 8) {
  if (u.kind != DatumKind::Finitary)
    throw std::invalid_argument(
        "the left side of the evidence preorder must be finitary");
  Tri acc = Tri::Yes;
  for (const auto& x : u.carrier.elements()) {
    for (const auto& b : u.table.at(x)) {
      ApplyResult r = pca.apply(a, b, fuel);
      if (r.status == ApplyResult::Status::Stuck) return Tri::No;
      if (r.status == ApplyResult::Status::OutOfFuel) {
        acc = tri_and(acc, Tri::Unknown);
        continue;
      }
      acc = tri_and(acc, datum_member(v, pca, r.value, x, fuel, sample_bound));
      if (acc == Tri::No) return Tri::No;
    }
  }
  return acc;
}

// Deterministic witness pool: context extras, then the combinator library,
// then constants onto cell values, then the instance enumeration.
inline std::vector<TermPtr> evidence_candidates(
    const PcaInstance& pca, const RealizerDatum& u, const RealizerDatum& v,
    int search_bound, const std::vector<TermPtr>& extras = {}) {
  std::vector<TermPtr> pool;
  std::set<std::string> seen;
  auto push = [&](const TermPtr& t) {
    if (!t) return;
    std::string key = print_term(t);
    if (seen.insert(key).second) pool.push_back(t);
  };
  for (const auto& t : extras) push(t);
  if (pca.name == "sk") {
    for (const auto& [n, c] : combinator_library()) push(c);
    for (const RealizerDatum* d : {&u, &v})
      if (d->kind == DatumKind::Finitary)
        for (const auto& [e, ts] : d->table)
          for (const auto& t : ts) push(Term::app(Term::k(), t));
  }
  for (const auto& t : pca.first_elems(search_bound)) push(t);
  return pool;
}

inline std::optional<RleqWitness> rleq(
    const PcaInstance& pca, const RealizerDatum& u, const RealizerDatum& v,
    const FilterPtr& filter, Fuel fuel, int search_bound,
    const std::vector<TermPtr>& extras = {}) {
  if (u.kind != DatumKind::Finitary)
    throw std::invalid_argument(
        "the left side of the evidence preorder must be finitary");
  if (!(u.carrier == v.carrier))
    throw std::invalid_argument("preorder sides need a shared carrier");
  for (const auto& cand : evidence_candidates(pca, u, v, search_bound, extras)) {
    if (filter_member(filter, RealizerSet::finitary({cand}), fuel,
                      search_bound) != Tri::Yes)
      continue;
    if (evidence_checks(pca, cand, u, v, fuel) == Tri::Yes)
      return RleqWitness{cand, fuel};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Heyting operations on finitary data: meet pairs cell values, join tags
// them left/right, implication defers to the membership test.

inline RealizerDatum meet_otimes(const PcaInstance& pca, const RealizerDatum& u,
                                 const RealizerDatum& v, Fuel fuel) {
  if (u.kind != DatumKind::Finitary || v.kind != DatumKind::Finitary)
    throw std::invalid_argument("meet needs finitary data");
  if (!(u.carrier == v.carrier))
    throw std::invalid_argument("meet needs a shared carrier");
  RealizerTable t;
  for (const auto& x : u.carrier.elements()) {
    std::vector<TermPtr> cell;
    for (const auto& b : u.table.at(x))
      for (const auto& c : v.table.at(x))
        cell.push_back(pair_values(pca, b, c, fuel));
    t[x] = std::move(cell);
  }
  return finitary_datum(u.carrier, std::move(t));
}

inline TermPtr tag_left(const PcaInstance& pca, const TermPtr& b, Fuel fuel) {
  ApplyResult r = pca.apply_chain(embed_sk(pca, lib("inl")), {b}, fuel);
  if (!r.ok()) throw std::runtime_error("ran out of fuel tagging a value");
  return r.value;
}

inline TermPtr tag_right(const PcaInstance& pca, const TermPtr& c, Fuel fuel) {
  ApplyResult r = pca.apply_chain(embed_sk(pca, lib("inr")), {c}, fuel);
  if (!r.ok()) throw std::runtime_error("ran out of fuel tagging a value");
  return r.value;
}

inline RealizerDatum join_oplus(const PcaInstance& pca, const RealizerDatum& u,
                                const RealizerDatum& v, Fuel fuel) {
  if (u.kind != DatumKind::Finitary || v.kind != DatumKind::Finitary)
    throw std::invalid_argument("join needs finitary data");
  if (!(u.carrier == v.carrier))
    throw std::invalid_argument("join needs a shared carrier");
  RealizerTable t;
  for (const auto& x : u.carrier.elements()) {
    std::vector<TermPtr> cell;
    for (const auto& b : u.table.at(x)) cell.push_back(tag_left(pca, b, fuel));
    for (const auto& c : v.table.at(x)) cell.push_back(tag_right(pca, c, fuel));
    t[x] = std::move(cell);
  }
  return finitary_datum(u.carrier, std::move(t));
}

// ---------------------------------------------------------------------------
// Change of carrier. Inverse image re-indexes along the map: tables and
// implication structurally, universal data by pulling the fiber map back.

inline RealizerDatum reindex_datum(const FinMap& f, const RealizerDatum& v) {
  if (!(v.carrier == f.dst()))
    throw std::invalid_argument("datum must live over the map's target");
  bool ident = f.src() == f.dst();
  if (ident)
    for (const auto& e : f.src().elements())
      if (f.apply(e) != e) ident = false;
  if (ident) return v;
  switch (v.kind) {
    case DatumKind::Finitary: {
      RealizerTable t;
      for (const auto& x : f.src().elements()) t[x] = v.table.at(f.apply(x));
      return finitary_datum(f.src(), std::move(t));
    }
    case DatumKind::Impl:
      return impl_datum(reindex_datum(f, *v.lhs), reindex_datum(f, *v.rhs));
    case DatumKind::ForAll: {
      PullbackResult p = pullback(f, v.along);
      RealizerDatum body = reindex_datum(p.leg2, *v.body);
      RealizerTable args;
      if (v.applicative)
        for (const auto& e : p.obj.elements())
          args[e] = v.args.at(p.leg2.apply(e));
      return forall_datum(p.leg1, body, v.applicative, std::move(args));
    }
  }
  throw std::logic_error("unreachable datum kind");
}

inline RealizerDatum inv_image_datum(const TrackedMorphism& f,
                                     const RealizerDatum& v) {
  return reindex_datum(f.map, v);
}

inline RealizerDatum exists_along(const TrackedMorphism& f,
                                  const RealizerDatum& u) {
  if (u.kind != DatumKind::Finitary)
    throw std::invalid_argument("direct image needs a finitary datum");
  if (!(u.carrier == f.map.src()))
    throw std::invalid_argument("datum must live over the map's source");
  RealizerTable t;
  for (const auto& y : f.map.dst().elements()) t[y] = {};
  for (const auto& x : f.map.src().elements())
    for (const auto& b : u.table.at(x)) t[f.map.apply(x)].push_back(b);
  return finitary_datum(f.map.dst(), std::move(t));
}

inline RealizerDatum forall_along(const TrackedMorphism& f,
                                  const RealizerDatum& u) {
  if (!(u.carrier == f.map.src()))
    throw std::invalid_argument("datum must live over the map's source");
  return forall_datum(f.map, u, /*applicative=*/false);
}

// ---------------------------------------------------------------------------
// Membership-test agreement on sampled values, pointwise over the carrier:
// the only workable notion of equality once implication data are involved.

inline Tri datum_tests_agree(const PcaInstance& pca, const RealizerDatum& a,
                             const RealizerDatum& b,
                             const std::vector<TermPtr>& sample, Fuel fuel) {
  if (!(a.carrier == b.carrier)) return Tri::No;
  Tri acc = Tri::Yes;
  for (const auto& x : a.carrier.elements())
    for (const auto& t : sample) {
      Tri ma = datum_member(a, pca, t, x, fuel);
      Tri mb = datum_member(b, pca, t, x, fuel);
      if (ma == Tri::Unknown || mb == Tri::Unknown)
        acc = tri_and(acc, Tri::Unknown);
      else if (ma != mb)
        return Tri::No;
    }
  return acc;
}

}  // namespace asmcat
