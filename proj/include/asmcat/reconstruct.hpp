#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/assembly.hpp"
#include "asmcat/base.hpp"
#include "asmcat/lambda.hpp"
#include "asmcat/pca.hpp"

namespace asmcat {

// ===========================================================================
// Reconstruction harness. Given a category of assemblies presented through
// an adjoint pair (constants functor F against the carrier functor U) and a
// chosen object C of applicative values, the checks below verify the three
// structural properties that pin the category down:
//
//   separation  - F is right adjoint to U, the unit is a natural mono, the
//                 counit a natural iso, and both functors are regular;
//   genericity  - every object is covered by a span whose first leg is a
//                 prone map into C and whose second leg is a regular epi;
//   tracking    - carrier maps out of prone probes are computed by values,
//                 uniformly, through a composition witness.
//
// From a situation that passes them, the harness rebuilds each object from
// its span (H), cuts the constants functor down to the realized part (G),
// and exhibits the equivalence between the two presentations as pairs of
// tracked isomorphisms. Every check is bound-relative: reports carry the
// truncation bound, the search bound, and the fuel they were run at.
// ===========================================================================

// ---------------------------------------------------------------------------
// The value object: a finite truncation of the applicative structure that
// realizes itself, each element witnessed by exactly its own value. The
// truncation takes the first `count` values of the canonical enumeration.

inline Assembly value_truncation(const PcaInstance& pca, int count) {
  std::vector<std::string> names;
  RealizerTable t;
  for (const auto& v : pca.first_elems(count)) {
    std::string n = print_term(v);
    names.push_back(n);
    t[n] = {v};
  }
  return make_assembly("values", FinObject(std::move(names)), std::move(t));
}

// ---------------------------------------------------------------------------
// A situation bundles the two functors, the (co)unit, and the value object.
// The functor parts are plugged in as callables so that deliberately broken
// variants can be checked against the same machinery as the honest one.

struct RealizabilitySituation {
  std::string label;
  PcaInstance pca;
  int bound;        // how many values the truncation C keeps
  int search;       // witness search bound
  Fuel fuel;
  int nabla_size;   // enumeration size bound backing the constants functor
  Assembly C;       // the value object

  std::function<Assembly(const FinObject&)> F_obj;
  std::function<TrackedMorphism(const FinMap&)> F_arr;
  std::function<FinObject(const Assembly&)> U_obj;
  std::function<FinMap(const TrackedMorphism&)> U_arr;
  std::function<TrackedMorphism(const Assembly&)> unit;  // X -> F(U X)
  std::function<FinMap(const FinObject&)> counit;        // U(F S) -> S

  // The carrier of C doubles as the underlying set of values.
  const FinObject& values_carrier() const { return C.carrier; }

  std::vector<TermPtr> values() const {
    std::vector<TermPtr> out;
    for (const auto& e : C.carrier.elements())
      for (const auto& v : C.realizers_of(e)) out.push_back(v);
    return sorted_unique(std::move(out));
  }

  bool within_values(const TermPtr& t) const {
    return C.carrier.contains(print_term(t));
  }
};

namespace detail {
// Smallest enumeration size bound whose value list covers `count` values,
// so the constants functor's cells always contain the whole truncation.
inline int size_bound_for(const PcaInstance& pca, int count) {
  for (int s = 1; s <= 8; ++s)
    if (static_cast<int>(pca.enumerate(s).size()) >= count) return s;
  return 8;
}
}  // namespace detail

// The honest situation over a given instance: F sends a finite set to the
// constant assembly on it, U takes carriers, and C keeps `bound` values.
inline RealizabilitySituation self_situation(const PcaInstance& pca, int bound,
                                             int search, Fuel fuel) {
  RealizabilitySituation sit;
  sit.label = "self";
  sit.pca = pca;
  sit.bound = bound;
  sit.search = search;
  sit.fuel = fuel;
  sit.nabla_size = detail::size_bound_for(pca, bound);
  sit.C = value_truncation(pca, bound);
  int nb = sit.nabla_size;
  sit.F_obj = [pca, nb](const FinObject& s) { return nabla(pca, s, nb); };
  sit.F_arr = [pca, nb, fuel](const FinMap& m) {
    Assembly src = nabla(pca, m.src(), nb);
    Assembly dst = nabla(pca, m.dst(), nb);
    return tracked(pca, src, dst, m, identity_witness(pca), fuel);
  };
  sit.U_obj = [](const Assembly& x) { return x.carrier; };
  sit.U_arr = [](const TrackedMorphism& f) { return f.map; };
  sit.unit = [pca, nb, fuel](const Assembly& x) {
    return unit_eta(pca, x, nb, fuel);
  };
  sit.counit = [](const FinObject& s) { return FinMap::identity(s); };
  return sit;
}

// Negative control: a "constants" functor that collapses every set to a
// point. The unit stops being injective on carriers of size two or more.
inline RealizabilitySituation collapsing_functor_situation(
    const PcaInstance& pca, int bound, int search, Fuel fuel) {
  RealizabilitySituation sit = self_situation(pca, bound, search, fuel);
  sit.label = "collapsing";
  int nb = sit.nabla_size;
  sit.F_obj = [pca, nb](const FinObject&) {
    return nabla(pca, terminal(), nb);
  };
  sit.F_arr = [pca, nb, fuel](const FinMap&) {
    Assembly pt = nabla(pca, terminal(), nb);
    return tracked(pca, pt, pt, FinMap::identity(terminal()),
                   identity_witness(pca), fuel);
  };
  sit.unit = [pca, nb, fuel](const Assembly& x) {
    Assembly pt = nabla(pca, terminal(), nb);
    FinMap to_pt = FinMap::constant(x.carrier, terminal(), "*");
    TermPtr w = Term::app(Term::k(), embed_sk(pca, pca.k_elem));
    if (pca.name != "sk") w = pca.k_elem;
    return tracked(pca, x, pt, to_pt, w, fuel);
  };
  sit.counit = [](const FinObject& s) {
    return FinMap::constant(terminal(), s, s.elements().front());
  };
  return sit;
}

// Negative control: a value object too small to cover the fixtures. Span
// construction demands a larger bound as soon as a realizer falls outside.
inline RealizabilitySituation starved_truncation_situation(
    const PcaInstance& pca, int bound, int search, Fuel fuel, int keep = 1) {
  RealizabilitySituation sit = self_situation(pca, bound, search, fuel);
  sit.label = "starved";
  sit.bound = keep;
  sit.C = value_truncation(pca, keep);
  return sit;
}

// ---------------------------------------------------------------------------
// The filter induced by the value object: a realizer set is large enough
// exactly when it meets C's values.

inline FilterPtr filter_from(const Assembly& c) {
  std::vector<TermPtr> vals;
  for (const auto& e : c.carrier.elements())
    for (const auto& v : c.realizers_of(e)) vals.push_back(v);
  vals = sorted_unique(std::move(vals));
  auto member = [vals](const TermPtr& t, Fuel) {
    return contains_term(vals, t) ? Tri::Yes : Tri::No;
  };
  auto enumerate = [vals](int n) {
    std::vector<TermPtr> out(
        vals.begin(),
        vals.begin() + std::min<std::size_t>(vals.size(), std::max(n, 0)));
    return out;
  };
  return Filter::relative(member, enumerate, c.name);
}

inline FilterPtr filter_from(const RealizabilitySituation& sit) {
  return filter_from(sit.C);
}

// ---------------------------------------------------------------------------
// Reports: named three-valued check items plus the bounds they ran at.

struct CheckItem {
  std::string name;
  Tri ok{Tri::Unknown};
  std::string note;
};

inline Tri all_items(const std::vector<CheckItem>& items) {
  Tri acc = Tri::Yes;
  for (const auto& it : items) acc = tri_and(acc, it.ok);
  return acc;
}

struct SeparabilityReport {
  std::vector<CheckItem> items;
  int bound{};
  int search{};
  Fuel fuel{};
  Tri ok() const { return all_items(items); }
};

// ---------------------------------------------------------------------------
// Isomorphisms over a shared carrier, witnessed in both directions.

struct IsoPair {
  TrackedMorphism fwd, bwd;
};

inline std::optional<IsoPair> identity_carrier_iso(
    const PcaInstance& pca, const Assembly& a, const Assembly& b, int search,
    Fuel fuel, const std::vector<TermPtr>& extras = {}) {
  if (!(a.carrier == b.carrier)) return std::nullopt;
  FinMap id = FinMap::identity(a.carrier);
  auto f = find_tracker(pca, id, a, b, Filter::inhabited(), search, fuel,
                        extras);
  if (!f) return std::nullopt;
  auto g = find_tracker(pca, id, b, a, Filter::inhabited(), search, fuel,
                        extras);
  if (!g) return std::nullopt;
  return IsoPair{TrackedMorphism{a, b, id, *f, fuel},
                 TrackedMorphism{b, a, id, *g, fuel}};
}

namespace detail {
// All total maps between two finite sets, in a deterministic order.
inline std::vector<FinMap> all_maps(const FinObject& src,
                                    const FinObject& dst) {
  std::vector<FinMap> out;
  if (dst.size() == 0) {
    if (src.size() == 0) out.push_back(FinMap(src, dst, {}));
    return out;
  }
  const auto& se = src.elements();
  const auto& de = dst.elements();
  std::vector<std::size_t> idx(se.size(), 0);
  while (true) {
    std::map<std::string, std::string> table;
    for (std::size_t i = 0; i < se.size(); ++i) table[se[i]] = de[idx[i]];
    out.push_back(FinMap(src, dst, std::move(table)));
    std::size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < de.size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  return out;
}

inline std::string arrow_label(const TrackedMorphism& f) {
  return f.src.name + "->" + f.dst.name;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Separation: unit a tracked mono, counit an iso, both natural, adjunction
// bijective on sampled hom-sets, and both functors regular on samples.

inline SeparabilityReport check_separability(
    const RealizabilitySituation& sit, const std::vector<Assembly>& objects,
    const std::vector<TrackedMorphism>& maps) {
  SeparabilityReport rep;
  rep.bound = sit.bound;
  rep.search = sit.search;
  rep.fuel = sit.fuel;
  auto add = [&rep](std::string name, Tri ok, std::string note = "") {
    rep.items.push_back(CheckItem{std::move(name), ok, std::move(note)});
  };

  for (const auto& x : objects) {
    TrackedMorphism eta = sit.unit(x);
    add("unit monic at " + x.name,
        eta.map.injective() ? Tri::Yes : Tri::No);
    add("unit tracked at " + x.name,
        verify_tracks(sit.pca, eta.tracker, eta.map, eta.src, eta.dst,
                      sit.fuel));
    FinObject s = sit.U_obj(x);
    FinMap eps = sit.counit(s);
    bool typed = eps.src() == sit.U_obj(sit.F_obj(s)) && eps.dst() == s;
    add("counit iso at " + x.name,
        typed && eps.bijective() ? Tri::Yes : Tri::No);
  }

  // Adjunction: carrier maps into a set correspond exactly to tracked maps
  // into its constant assembly. Exhaustive on small sampled hom-sets.
  for (const auto& x : objects) {
    for (const auto& y : objects) {
      FinObject s = sit.U_obj(y);
      double homs = 1;
      for (std::size_t i = 0; i < sit.U_obj(x).size(); ++i) homs *= s.size();
      if (homs > 64) {
        add("transpose " + x.name + "|" + y.name, Tri::Unknown,
            "hom-set too large to exhaust");
        continue;
      }
      Assembly fs = sit.F_obj(s);
      if (!(sit.U_obj(fs) == s)) {
        add("transpose " + x.name + "|" + y.name, Tri::No,
            "constants assembly does not restore the carrier");
        continue;
      }
      Tri ok = Tri::Yes;
      for (const auto& g : detail::all_maps(sit.U_obj(x), s)) {
        auto w = find_tracker(sit.pca, g, x, fs, Filter::inhabited(),
                              sit.search, sit.fuel);
        if (!w) {
          ok = Tri::Unknown;
          break;
        }
        TrackedMorphism t{x, fs, g, *w, sit.fuel};
        if (!(sit.U_arr(t) == g)) {
          ok = Tri::No;
          break;
        }
      }
      add("transpose " + x.name + "|" + y.name, ok);
    }
  }

  for (const auto& f : maps) {
    TrackedMorphism eta_src = sit.unit(f.src);
    TrackedMorphism eta_dst = sit.unit(f.dst);
    TrackedMorphism fuf = sit.F_arr(sit.U_arr(f));
    bool commutes =
        compose(fuf.map, eta_src.map) == compose(eta_dst.map, f.map);
    add("unit natural along " + detail::arrow_label(f),
        commutes ? Tri::Yes : Tri::No);

    FinMap m = sit.U_arr(f);
    FinMap lhs = compose(sit.counit(m.dst()), sit.U_arr(sit.F_arr(m)));
    FinMap rhs = compose(m, sit.counit(m.src()));
    add("counit natural along " + detail::arrow_label(f),
        lhs == rhs ? Tri::Yes : Tri::No);
  }

  // Regularity of U: products of assemblies sit over products of carriers,
  // and covers stay surjective after taking carriers.
  if (objects.size() >= 2) {
    const Assembly& x = objects[0];
    const Assembly& y = objects[1];
    AsmProductResult pr = asm_product(sit.pca, x, y, sit.fuel);
    ProductResult bp = product(sit.U_obj(x), sit.U_obj(y));
    bool match = pr.obj.carrier == bp.obj &&
                 sit.U_arr(pr.proj1) == bp.proj1 &&
                 sit.U_arr(pr.proj2) == bp.proj2;
    add("carriers preserve products", match ? Tri::Yes : Tri::No);

    Assembly fs = sit.F_obj(sit.U_obj(x));
    Assembly ft = sit.F_obj(sit.U_obj(y));
    Assembly fprod = sit.F_obj(bp.obj);
    AsmProductResult fpr = asm_product(sit.pca, fs, ft, sit.fuel);
    auto iso = identity_carrier_iso(sit.pca, fprod, fpr.obj, sit.search,
                                    sit.fuel);
    add("constants preserve products", iso ? Tri::Yes : Tri::Unknown,
        iso ? "" : "no isomorphism witness at these bounds");
  }
  for (const auto& f : maps) {
    Tri re = is_regular_epi(sit.pca, f, Filter::inhabited(), sit.search,
                            sit.fuel);
    if (re != Tri::Yes) continue;
    add("carriers preserve covers along " + detail::arrow_label(f),
        sit.U_arr(f).surjective() ? Tri::Yes : Tri::No);
  }
  if (!objects.empty()) {
    FinObject s = sit.U_obj(objects[0]);
    if (s.size() >= 1) {
      FinMap fold = FinMap::constant(s, terminal(), "*");
      Tri re = is_regular_epi(sit.pca, sit.F_arr(fold), Filter::inhabited(),
                              sit.search, sit.fuel);
      add("constants preserve covers", re);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Prone maps. A map is prone when its unit-naturality square is a pullback;
// the certificate packages the square and the invertible comparison.

struct ProneCertificate {
  TrackedMorphism morphism;
  TrackedMorphism unit_src, unit_dst, image;  // the square around morphism
  TrackedMorphism comparison, comparison_inverse;
};

inline std::optional<ProneCertificate> prone_check(
    const TrackedMorphism& f, const RealizabilitySituation& sit) {
  try {
    TrackedMorphism eta_src = sit.unit(f.src);
    TrackedMorphism eta_dst = sit.unit(f.dst);
    TrackedMorphism fuf = sit.F_arr(sit.U_arr(f));
    if (!(compose(fuf.map, eta_src.map) == compose(eta_dst.map, f.map)))
      return std::nullopt;
    AsmPullbackResult pb =
        asm_pullback(sit.pca, eta_dst, fuf, sit.fuel);
    TrackedMorphism cmp = pb.mediate(f, eta_src);
    if (!cmp.map.bijective()) return std::nullopt;
    std::map<std::string, std::string> inv_table;
    for (const auto& e : f.src.carrier.elements())
      inv_table[cmp.map.apply(e)] = e;
    FinMap inv(pb.obj.carrier, f.src.carrier, std::move(inv_table));
    std::vector<TermPtr> extras = {embed_sk(sit.pca, lib("fst")),
                                   embed_sk(sit.pca, lib("snd")),
                                   f.tracker, identity_witness(sit.pca)};
    auto w = find_tracker(sit.pca, inv, pb.obj, f.src, Filter::inhabited(),
                          sit.search, sit.fuel, extras);
    if (!w) return std::nullopt;
    return ProneCertificate{
        f,   eta_src, eta_dst, fuf, cmp,
        TrackedMorphism{pb.obj, f.src, inv, *w, sit.fuel}};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// The canonical prone map: reindex an assembly along a carrier map and
// project back. Realizers are inherited on the nose, so the identity value
// tracks the projection.
inline TrackedMorphism reindex_projection(const PcaInstance& pca,
                                          const FinMap& f, const Assembly& y,
                                          Fuel fuel) {
  Assembly src = pullback_assembly(f, y);
  return tracked(pca, src, y, f, identity_witness(pca), fuel);
}

// ---------------------------------------------------------------------------
// Weak genericity: cover any object by a span out of the graph of its
// realizer relation - first leg prone into the value object, second leg a
// regular epi onto the object.

struct GenericitySpan {
  Assembly obj;                // carrier: (value, element) pairs
  TrackedMorphism to_values;   // first projection, prone
  TrackedMorphism cover;       // second projection, regular epi
  std::optional<ProneCertificate> prone_cert;
  Tri cover_regular_epi{Tri::Unknown};
  bool jointly_monic{false};
};

inline GenericitySpan weak_genericity_span(const Assembly& x,
                                           const RealizabilitySituation& sit) {
  std::vector<std::string> names;
  RealizerTable table;
  std::map<std::string, std::string> to_val, to_elem;
  for (const auto& e : x.carrier.elements()) {
    for (const auto& r : x.realizers_of(e)) {
      std::string vn = print_term(r);
      if (!sit.C.carrier.contains(vn))
        throw std::runtime_error(
            "realizer '" + vn + "' of element '" + e +
            "' lies beyond the value truncation; raise the bound");
      std::string n = pair_name(vn, e);
      names.push_back(n);
      table[n] = {r};
      to_val[n] = vn;
      to_elem[n] = e;
    }
  }
  Assembly obj = make_assembly("span(" + x.name + ")", FinObject(names),
                               std::move(table));
  FinMap pm(obj.carrier, sit.C.carrier, std::move(to_val));
  FinMap em(obj.carrier, x.carrier, std::move(to_elem));
  TrackedMorphism p =
      tracked(sit.pca, obj, sit.C, pm, identity_witness(sit.pca), sit.fuel);
  TrackedMorphism e =
      tracked(sit.pca, obj, x, em, identity_witness(sit.pca), sit.fuel);
  GenericitySpan span;
  span.obj = std::move(obj);
  span.to_values = p;
  span.cover = e;
  span.prone_cert = prone_check(p, sit);
  span.cover_regular_epi =
      is_regular_epi(sit.pca, e, Filter::inhabited(), sit.search, sit.fuel);
  std::set<std::pair<std::string, std::string>> seen;
  span.jointly_monic = true;
  for (const auto& n : span.obj.carrier.elements())
    if (!seen.insert({pm.apply(n), em.apply(n)}).second)
      span.jointly_monic = false;
  return span;
}

// ---------------------------------------------------------------------------
// Tracking: out of a prone probe, any carrier map into a covered object is
// computed by a value, obtained by composing a tracker of the map with a
// tracker of the span's value leg.

struct TrackingInstance {
  Assembly relation;    // jointly monic span object Y
  FinMap leg_values;    // Y -> values carrier (monic jointly with leg_target)
  FinMap leg_target;    // Y -> target carrier, the regular-epi side
  Assembly probe;       // P, realizers all within the value object
  FinMap probe_values;  // P -> values carrier
  FinMap probe_map;     // P -> target carrier, the map to be computed
  Assembly target;      // X
};

inline TrackingInstance instance_from_span(const GenericitySpan& span,
                                           const Assembly& target) {
  return TrackingInstance{span.obj,       span.to_values.map, span.cover.map,
                          span.obj,       span.to_values.map, span.cover.map,
                          target};
}

struct TrackingReport {
  std::vector<CheckItem> items;
  std::optional<TermPtr> map_tracker;       // computes probe_map
  std::optional<TermPtr> leg_tracker;       // computes leg_values
  std::optional<TermPtr> composite;         // the induced uniform value
  std::optional<TermPtr> truncated_witness; // an equivalent value inside C
  std::optional<TermPtr> factor_tracker;    // tracks the factorization map
  int bound{};
  int search{};
  Fuel fuel{};
  // The composite living inside the truncation window is reported but not
  // aggregated: it depends only on how much of the structure C keeps.
  Tri ok() const {
    Tri acc = Tri::Yes;
    for (const auto& it : items)
      if (it.name != "composite within truncation")
        acc = tri_and(acc, it.ok);
    return acc;
  }
};

namespace detail {
// Value applying a paired input to the two selectors and then to itself:
// m |-> (m first)(m second). Tracks maps out of a paired assembly whose
// target realizers are exactly "first component applied to second".
inline TermPtr apply_projections_witness() {
  using L = LambdaTerm;
  LamPtr m = L::var("m");
  LamPtr body = L::app(L::app(m, L::con_term(lib("tru"))),
                       L::app(m, L::con_term(lib("fls"))));
  return bracket_abstract(L::abs("m", body));
}
}  // namespace detail

inline TrackingReport tracking_axiom_check(const TrackingInstance& inst,
                                           const RealizabilitySituation& sit) {
  TrackingReport rep;
  rep.bound = sit.bound;
  rep.search = sit.search;
  rep.fuel = sit.fuel;
  auto add = [&rep](std::string name, Tri ok, std::string note = "") {
    rep.items.push_back(CheckItem{std::move(name), ok, std::move(note)});
  };

  bool typed = inst.leg_values.src() == inst.relation.carrier &&
               inst.leg_values.dst() == sit.C.carrier &&
               inst.leg_target.src() == inst.relation.carrier &&
               inst.leg_target.dst() == inst.target.carrier &&
               inst.probe_values.src() == inst.probe.carrier &&
               inst.probe_values.dst() == sit.C.carrier &&
               inst.probe_map.src() == inst.probe.carrier &&
               inst.probe_map.dst() == inst.target.carrier;
  std::set<std::pair<std::string, std::string>> seen;
  bool monic = true;
  for (const auto& y : inst.relation.carrier.elements())
    if (!seen.insert({inst.leg_values.apply(y), inst.leg_target.apply(y)})
             .second)
      monic = false;
  add("instance well-formed",
      typed && monic && inst.leg_target.surjective() ? Tri::Yes : Tri::No);
  if (!typed) return rep;

  rep.map_tracker =
      find_tracker(sit.pca, inst.probe_map, inst.probe, inst.target,
                   Filter::inhabited(), sit.search, sit.fuel);
  add("map tracker found", rep.map_tracker ? Tri::Yes : Tri::Unknown,
      rep.map_tracker ? print_term(*rep.map_tracker)
                      : "no witness at these bounds");
  rep.leg_tracker =
      find_tracker(sit.pca, inst.leg_values, inst.relation, sit.C,
                   Filter::inhabited(), sit.search, sit.fuel);
  add("leg tracker found", rep.leg_tracker ? Tri::Yes : Tri::Unknown,
      rep.leg_tracker ? print_term(*rep.leg_tracker)
                      : "no witness at these bounds");
  if (!rep.map_tracker || !rep.leg_tracker) return rep;

  ApplyResult comp = sit.pca.apply_chain(
      embed_sk(sit.pca, lib("compose")), {*rep.leg_tracker, *rep.map_tracker},
      sit.fuel);
  if (!comp.ok()) {
    add("composite defined", Tri::Unknown, "composition ran out of fuel");
    return rep;
  }
  rep.composite = comp.value;
  add("composite defined", Tri::Yes, print_term(*rep.composite));

  // Pointwise: at every probe point, every realizer is sent to a value
  // naming a relation row over the probe's image.
  auto factors_via = [&](const TermPtr& r,
                         std::map<std::string, std::string>* rows) -> Tri {
    Tri acc = Tri::Yes;
    for (const auto& z : inst.probe.carrier.elements()) {
      for (const auto& u : inst.probe.realizers_of(z)) {
        ApplyResult ra = sit.pca.apply(r, u, sit.fuel);
        if (ra.status == ApplyResult::Status::OutOfFuel)
          return Tri::Unknown;
        if (!ra.ok()) return Tri::No;
        std::string vn = print_term(ra.value);
        if (!sit.C.carrier.contains(vn)) return Tri::Unknown;
        std::optional<std::string> row;
        for (const auto& y : inst.relation.carrier.elements())
          if (inst.leg_values.apply(y) == vn &&
              inst.leg_target.apply(y) == inst.probe_map.apply(z))
            row = y;
        if (!row) return Tri::No;
        if (rows) (*rows)[z] = *row;
      }
    }
    return acc;
  };

  std::map<std::string, std::string> rows;
  Tri factored = factors_via(*rep.composite, &rows);
  add("factors through the relation", factored,
      factored == Tri::Yes ? "" : "some probe point fails at these bounds");

  Tri in_c = sit.within_values(*rep.composite) ? Tri::Yes : Tri::Unknown;
  if (in_c == Tri::Yes) rep.truncated_witness = rep.composite;
  if (!rep.truncated_witness) {
    for (const auto& v : sit.values()) {
      if (factors_via(v, nullptr) == Tri::Yes) {
        rep.truncated_witness = v;
        in_c = Tri::Yes;
        break;
      }
    }
  }
  add("composite within truncation", in_c,
      rep.truncated_witness
          ? print_term(*rep.truncated_witness)
          : "no equivalent value inside the window; raise the bound");

  if (factored == Tri::Yes) {
    // The factorization is itself a map out of the paired probe: build the
    // one-point value assembly for the composite and track the induced map.
    TermPtr r = *rep.composite;
    Assembly rasm = make_assembly("uniform", FinObject({print_term(r)}),
                                  {{print_term(r), {r}}});
    AsmProductResult prod =
        asm_product(sit.pca, rasm, inst.probe, sit.fuel);
    std::map<std::string, std::string> htab;
    for (const auto& z : inst.probe.carrier.elements())
      htab[pair_name(print_term(r), z)] = rows[z];
    FinMap h(prod.obj.carrier, inst.relation.carrier, std::move(htab));
    std::vector<TermPtr> extras;
    if (sit.pca.name == "sk")
      extras.push_back(detail::apply_projections_witness());
    extras.push_back(embed_sk(sit.pca, lib("snd")));
    rep.factor_tracker =
        find_tracker(sit.pca, h, prod.obj, inst.relation,
                     Filter::inhabited(), sit.search, sit.fuel, extras);
    add("factorization tracked",
        rep.factor_tracker ? Tri::Yes : Tri::Unknown,
        rep.factor_tracker ? print_term(*rep.factor_tracker)
                           : "no witness at these bounds");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The filter agrees with inhabitation of the intersection with the value
// object: a realizer set is accepted exactly when some value lies in it.

struct InhabitationReport {
  std::vector<CheckItem> items;
  Tri intersection_inhabited{Tri::Unknown};
  Tri filter_member_result{Tri::Unknown};
  int bound{};
  int search{};
  Fuel fuel{};
  Tri ok() const { return all_items(items); }
};

inline InhabitationReport filter_inhabitation_check(
    const RealizerSet& i, const RealizabilitySituation& sit) {
  InhabitationReport rep;
  rep.bound = sit.bound;
  rep.search = sit.search;
  rep.fuel = sit.fuel;

  Tri lhs = Tri::No;
  for (const auto& v : sit.values()) {
    Tri m = i.member(v, sit.fuel);
    if (m == Tri::Yes) {
      lhs = Tri::Yes;
      break;
    }
    if (m == Tri::Unknown) lhs = Tri::Unknown;
  }
  rep.intersection_inhabited = lhs;
  rep.items.push_back(
      CheckItem{"intersection with values inhabited", lhs, ""});

  Tri rhs = filter_member(filter_from(sit), i, sit.fuel, sit.search);
  rep.filter_member_result = rhs;
  rep.items.push_back(CheckItem{"accepted by the filter", rhs, ""});

  std::string note;
  if (i.is_finitary() && !i.finite->empty()) {
    bool any_inside = false;
    for (const auto& t : *i.finite)
      if (sit.within_values(t)) any_inside = true;
    if (!any_inside)
      note = "every candidate lies beyond the truncation window";
  }
  rep.items.push_back(CheckItem{
      "both sides agree", lhs == rhs ? Tri::Yes : Tri::No, note});
  return rep;
}

// ---------------------------------------------------------------------------
// The reconstruction functor G and the span-based rebuild H. G cuts each
// constant assembly down to the points with a realizer among the values,
// keeping exactly those realizers; H reads an object off its genericity
// span. On situations that pass the axioms, both are inverse equivalences.

inline FinSubset xi(const Assembly& x, const RealizabilitySituation& sit) {
  std::vector<std::string> members;
  for (const auto& e : x.carrier.elements())
    for (const auto& r : x.realizers_of(e))
      if (sit.within_values(r)) {
        members.push_back(e);
        break;
      }
  return FinSubset(x.carrier, std::move(members));
}

inline Assembly G_object(const Assembly& x,
                         const RealizabilitySituation& sit) {
  FinSubset supp = xi(x, sit);
  RealizerTable t;
  for (const auto& e : supp.members()) {
    std::vector<TermPtr> cell;
    for (const auto& r : x.realizers_of(e))
      if (sit.within_values(r)) cell.push_back(r);
    t[e] = std::move(cell);
  }
  return make_assembly("G(" + x.name + ")", FinObject(supp.members()),
                       std::move(t));
}

inline TrackedMorphism G_arrow(const TrackedMorphism& f,
                               const RealizabilitySituation& sit) {
  Assembly gx = G_object(f.src, sit);
  Assembly gy = G_object(f.dst, sit);
  std::map<std::string, std::string> table;
  for (const auto& e : gx.carrier.elements()) {
    std::string v = f.map.apply(e);
    if (!gy.carrier.contains(v))
      throw std::runtime_error(
          "image point '" + v +
          "' has no realizer within the value truncation; raise the bound");
    table[e] = v;
  }
  FinMap m(gx.carrier, gy.carrier, std::move(table));
  auto w = find_tracker(sit.pca, m, gx, gy, Filter::inhabited(), sit.search,
                        sit.fuel, {f.tracker});
  if (!w)
    throw std::runtime_error(
        "no witness for the restricted map at these bounds");
  return TrackedMorphism{gx, gy, m, *w, sit.fuel};
}

inline Assembly H_object(const Assembly& y,
                         const RealizabilitySituation& sit) {
  GenericitySpan span = weak_genericity_span(y, sit);
  RealizerTable t;
  for (const auto& e : y.carrier.elements()) t[e] = {};
  for (const auto& n : span.obj.carrier.elements()) {
    std::string e = span.cover.map.apply(n);
    std::string vn = span.to_values.map.apply(n);
    for (const auto& v : sit.C.realizers_of(vn)) t[e].push_back(v);
  }
  return make_assembly("H(" + y.name + ")", y.carrier, std::move(t));
}

struct EquivalenceReport {
  bool aborted{false};
  std::string failing_axiom;
  std::vector<CheckItem> items;
  int bound{};
  int search{};
  Fuel fuel{};
  Tri ok() const {
    if (aborted) return Tri::No;
    return all_items(items);
  }
};

inline EquivalenceReport equivalence_check(
    const RealizabilitySituation& sit, const std::vector<Assembly>& samples,
    const std::vector<TrackedMorphism>& maps) {
  EquivalenceReport rep;
  rep.bound = sit.bound;
  rep.search = sit.search;
  rep.fuel = sit.fuel;
  auto add = [&rep](std::string name, Tri ok, std::string note = "") {
    rep.items.push_back(CheckItem{std::move(name), ok, std::move(note)});
  };
  auto abort_with = [&rep](std::string axiom, std::string note) {
    rep.aborted = true;
    rep.failing_axiom = std::move(axiom);
    rep.items.push_back(
        CheckItem{"axiom precondition", Tri::No, std::move(note)});
    return rep;
  };

  // The axioms gate everything; a failure names the culprit and stops.
  SeparabilityReport sep = check_separability(sit, samples, maps);
  if (sep.ok() != Tri::Yes)
    return abort_with("separation", "separation checks did not all pass");
  std::vector<GenericitySpan> spans;
  for (const auto& x : samples) {
    try {
      GenericitySpan span = weak_genericity_span(x, sit);
      if (!span.prone_cert || span.cover_regular_epi != Tri::Yes ||
          !span.jointly_monic)
        return abort_with("weak genericity",
                          "span checks failed at " + x.name);
      spans.push_back(std::move(span));
    } catch (const std::exception& ex) {
      return abort_with("weak genericity", ex.what());
    }
  }
  if (!samples.empty()) {
    TrackingReport tr = tracking_axiom_check(
        instance_from_span(spans.front(), samples.front()), sit);
    if (tr.ok() != Tri::Yes)
      return abort_with("tracking", "tracking check did not pass");
  }

  std::vector<TermPtr> extras = {identity_witness(sit.pca)};
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Assembly& x = samples[k];
    add("support full at " + x.name,
        xi(x, sit) == FinSubset::full(x.carrier) ? Tri::Yes : Tri::No);

    Assembly gx = G_object(x, sit);
    auto giso =
        identity_carrier_iso(sit.pca, x, gx, sit.search, sit.fuel, extras);
    add("restriction matches " + x.name, giso ? Tri::Yes : Tri::Unknown);

    Assembly hx = H_object(x, sit);
    auto hiso =
        identity_carrier_iso(sit.pca, x, hx, sit.search, sit.fuel, extras);
    add("rebuild matches " + x.name, hiso ? Tri::Yes : Tri::Unknown);

    auto gh = identity_carrier_iso(sit.pca, G_object(hx, sit), x, sit.search,
                                   sit.fuel, extras);
    add("restrict after rebuild at " + x.name, gh ? Tri::Yes : Tri::Unknown);
    auto hg = identity_carrier_iso(sit.pca, H_object(gx, sit), x, sit.search,
                                   sit.fuel, extras);
    add("rebuild after restrict at " + x.name, hg ? Tri::Yes : Tri::Unknown);

    add("carrier transpose at " + x.name,
        sit.U_obj(gx) == sit.U_obj(x) ? Tri::Yes : Tri::No);
  }

  for (const auto& f : maps) {
    try {
      TrackedMorphism gf = G_arrow(f, sit);
      bool faithful = gf.map == f.map && sit.U_arr(gf) == sit.U_arr(f);
      add("arrows restrict along " + detail::arrow_label(f),
          faithful ? Tri::Yes : Tri::No);
    } catch (const std::exception& ex) {
      add("arrows restrict along " + detail::arrow_label(f), Tri::Unknown,
          ex.what());
    }
  }

  // Fullness on a sampled constant map between the first two objects: any
  // witnessed map between restrictions is the restriction of a witnessed
  // map.
  if (samples.size() >= 2) {
    const Assembly& x = samples[0];
    const Assembly& y = samples[1];
    FinMap cm = FinMap::constant(x.carrier, y.carrier,
                                 y.carrier.elements().front());
    Assembly gx = G_object(x, sit);
    Assembly gy = G_object(y, sit);
    FinMap gm = FinMap::constant(gx.carrier, gy.carrier,
                                 gy.carrier.elements().front());
    auto down = find_tracker(sit.pca, gm, gx, gy, Filter::inhabited(),
                             sit.search, sit.fuel);
    auto up = find_tracker(sit.pca, cm, x, y, Filter::inhabited(), sit.search,
                           sit.fuel);
    Tri full = Tri::Unknown;
    if (down && up) {
      TrackedMorphism lifted{x, y, cm, *up, sit.fuel};
      full = G_arrow(lifted, sit).map == gm ? Tri::Yes : Tri::No;
    }
    add("sampled map lifts", full);
  }

  // The two canonical comparisons: restricting a constant assembly is
  // isomorphic to it, and restricting the value object gives it back.
  if (!samples.empty()) {
    FinObject s = sit.U_obj(samples.front());
    Assembly fs = sit.F_obj(s);
    auto niso = identity_carrier_iso(sit.pca, G_object(fs, sit), fs,
                                     sit.search, sit.fuel, extras);
    add("restricted constants match constants",
        niso ? Tri::Yes : Tri::Unknown);
  }
  auto ciso = identity_carrier_iso(sit.pca, G_object(sit.C, sit), sit.C,
                                   sit.search, sit.fuel, extras);
  add("restricted values match values", ciso ? Tri::Yes : Tri::Unknown);
  return rep;
}

// ---------------------------------------------------------------------------
// Over the one-value instance, taking carriers is an equivalence onto the
// base: exhaustively checkable on small carriers.

struct TrivialEquivalenceReport {
  std::vector<CheckItem> items;
  int max_carrier{};
  Fuel fuel{};
  Tri ok() const { return all_items(items); }
};

inline TrivialEquivalenceReport trivial_equivalence_check(int max_carrier,
                                                          Fuel fuel) {
  PcaInstance triv = trivial_pca();
  TrivialEquivalenceReport rep;
  rep.max_carrier = max_carrier;
  rep.fuel = fuel;
  auto add = [&rep](std::string name, Tri ok, std::string note = "") {
    rep.items.push_back(CheckItem{std::move(name), ok, std::move(note)});
  };

  std::vector<FinObject> sets;
  std::vector<std::string> pool = {"e0", "e1", "e2"};
  for (int n = 1; n <= max_carrier && n <= 3; ++n)
    sets.push_back(FinObject(
        std::vector<std::string>(pool.begin(), pool.begin() + n)));

  std::vector<Assembly> lifts;
  Tri eso = Tri::Yes;
  for (const auto& s : sets) {
    Assembly x = nabla(triv, s, 1);
    if (!(gamma(x) == s)) eso = Tri::No;
    lifts.push_back(std::move(x));
  }
  add("every carrier lifts", eso);

  Tri full = Tri::Yes;
  Tri faithful = Tri::Yes;
  for (const auto& x : lifts) {
    for (const auto& y : lifts) {
      std::set<std::string> images;
      for (const auto& g : detail::all_maps(x.carrier, y.carrier)) {
        auto w = find_tracker(triv, g, x, y, Filter::inhabited(), 4, fuel);
        if (!w) {
          full = Tri::Unknown;
          continue;
        }
        std::string key;
        for (const auto& e : x.carrier.elements()) key += g.apply(e) + ";";
        if (!images.insert(key).second) faithful = Tri::No;
      }
      std::size_t expected = 1;
      for (std::size_t i = 0; i < x.carrier.size(); ++i)
        expected *= y.carrier.size();
      if (images.size() != expected) faithful = Tri::No;
    }
  }
  add("every carrier map is witnessed", full);
  add("witnessed maps are determined by carriers", faithful);
  return rep;
}

}  // namespace asmcat
