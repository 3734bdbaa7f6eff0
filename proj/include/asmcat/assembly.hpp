#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/base.hpp"
#include "asmcat/lambda.hpp"
#include "asmcat/pca.hpp"
#include "asmcat/term.hpp"

namespace asmcat {

// ---------------------------------------------------------------------------
// Assemblies: finite carriers where every element owns a nonempty finite set
// of realizing values, and morphisms are carrier maps witnessed by a single
// value that computes them on realizers.

using RealizerTable = std::map<std::string, std::vector<TermPtr>>;

struct Assembly {
  std::string name;
  FinObject carrier;
  RealizerTable realizers;

  const std::vector<TermPtr>& realizers_of(const std::string& e) const {
    auto it = realizers.find(e);
    if (it == realizers.end())
      throw std::invalid_argument("element '" + e +
                                  "' is not in the assembly carrier");
    return it->second;
  }
};

inline Assembly make_assembly(std::string name, FinObject carrier,
                              RealizerTable table) {
  if (table.size() != carrier.size())
    throw std::invalid_argument(
        "realizer table must cover the carrier exactly");
  for (auto& [e, ts] : table) {
    if (!carrier.contains(e))
      throw std::invalid_argument("realizer table key '" + e +
                                  "' is not in the carrier");
    if (ts.empty())
      throw std::invalid_argument("element '" + e +
                                  "' has an empty realizer set");
    for (const auto& t : ts)
      if (!is_value(t))
        throw std::invalid_argument("realizer for '" + e +
                                    "' is not a value");
    ts = sorted_unique(std::move(ts));
  }
  return Assembly{std::move(name), std::move(carrier), std::move(table)};
}

inline bool assembly_eq(const Assembly& a, const Assembly& b) {
  if (!(a.carrier == b.carrier)) return false;
  for (const auto& e : a.carrier.elements()) {
    const auto& ra = a.realizers_of(e);
    const auto& rb = b.realizers_of(e);
    if (ra.size() != rb.size()) return false;
    for (std::size_t i = 0; i < ra.size(); ++i)
      if (!term_eq(ra[i], rb[i])) return false;
  }
  return true;
}

// Transport a canonical combinator value into the given instance: the
// numeric instance takes its code, the one-point instance collapses it.
inline TermPtr embed_sk(const PcaInstance& pca, const TermPtr& v) {
  if (pca.name == "numeric") {
    auto c = encode_value(v);
    if (!c) throw std::invalid_argument("value has no code in this instance");
    return numeral(*c);
  }
  if (pca.name == "trivial") return pca.k_elem;
  return v;
}

// Does the value r compute the carrier map f on realizers? Yes means: for
// every x and every b realizing x, r·b is defined and realizes f(x). A fuel
// exhaustion anywhere downgrades a would-be yes to unknown.
inline Tri verify_tracks(const PcaInstance& pca, const TermPtr& r,
                         const FinMap& f, const Assembly& src,
                         const Assembly& dst, Fuel fuel) {
  if (!(f.src() == src.carrier) || !(f.dst() == dst.carrier))
    throw std::invalid_argument("carrier map endpoints do not match");
  bool unknown = false;
  for (const auto& x : src.carrier.elements()) {
    const auto& target = dst.realizers_of(f.apply(x));
    for (const auto& b : src.realizers_of(x)) {
      ApplyResult res = pca.apply(r, b, fuel);
      if (res.status == ApplyResult::Status::OutOfFuel) {
        unknown = true;
        continue;
      }
      if (!res.ok()) return Tri::No;
      if (!contains_term(target, res.value)) return Tri::No;
    }
  }
  return unknown ? Tri::Unknown : Tri::Yes;
}

// Deterministic candidate pool for tracker searches: context-supplied
// extras, then the combinator library, then constant maps onto target
// realizers, then the instance enumeration. Duplicates keep first position.
inline std::vector<TermPtr> tracker_candidates(
    const PcaInstance& pca, const Assembly& dst, int search_bound,
    const std::vector<TermPtr>& extras = {}) {
  std::vector<TermPtr> pool;
  std::set<std::string> seen;
  auto push = [&](const TermPtr& t) {
    if (!t) return;
    std::string key = print_term(t);
    if (seen.insert(key).second) pool.push_back(t);
  };
  for (const auto& t : extras) push(t);
  if (pca.name == "sk") {
    for (const auto& [n, v] : combinator_library()) push(v);
    for (const auto& e : dst.carrier.elements())
      for (const auto& t : dst.realizers_of(e))
        push(Term::app(Term::k(), t));
  }
  for (const auto& t : pca.first_elems(search_bound)) push(t);
  return pool;
}

// First candidate in pool order that tracks f and is accepted by the filter.
inline std::optional<TermPtr> find_tracker(
    const PcaInstance& pca, const FinMap& f, const Assembly& src,
    const Assembly& dst, const FilterPtr& filter, int search_bound, Fuel fuel,
    const std::vector<TermPtr>& extras = {}) {
  for (const auto& cand : tracker_candidates(pca, dst, search_bound, extras)) {
    if (filter_member(filter, RealizerSet::finitary({cand}), fuel,
                      search_bound) != Tri::Yes)
      continue;
    if (verify_tracks(pca, cand, f, src, dst, fuel) == Tri::Yes) return cand;
  }
  return std::nullopt;
}

struct TrackedMorphism {
  Assembly src, dst;
  FinMap map;
  TermPtr tracker;
  Fuel fuel_used{};
};

// Build a morphism, insisting the tracker verifies outright.
inline TrackedMorphism tracked(const PcaInstance& pca, const Assembly& src,
                               const Assembly& dst, const FinMap& map,
                               const TermPtr& tracker, Fuel fuel) {
  Tri ok = verify_tracks(pca, tracker, map, src, dst, fuel);
  if (ok == Tri::No)
    throw std::invalid_argument("the given value does not track the map");
  if (ok == Tri::Unknown)
    throw std::runtime_error(
        "tracking verification ran out of fuel; raise the fuel bound");
  return TrackedMorphism{src, dst, map, tracker, fuel};
}

// The canonical value computing the identity in each instance.
inline TermPtr identity_witness(const PcaInstance& pca) {
  return embed_sk(pca, lib("id"));
}

inline TrackedMorphism asm_identity(const PcaInstance& pca, const Assembly& x,
                                    Fuel fuel) {
  return tracked(pca, x, x, FinMap::identity(x.carrier),
                 identity_witness(pca), fuel);
}

// Composite morphism: carrier maps compose, and the witness is the compiled
// composition combinator applied to both trackers.
inline TrackedMorphism asm_compose(const PcaInstance& pca,
                                   const TrackedMorphism& g,
                                   const TrackedMorphism& f, Fuel fuel) {
  if (!(f.map.dst() == g.map.src()))
    throw std::invalid_argument("morphism endpoints do not match");
  TermPtr t;
  if (pca.name == "sk" || pca.name == "numeric") {
    ApplyResult r = pca.apply_chain(embed_sk(pca, lib("compose")),
                                    {g.tracker, f.tracker}, fuel);
    if (!r.ok())
      throw std::runtime_error(
          "composite tracker construction ran out of fuel");
    t = r.value;
  } else {
    // In instances without the library, search for a composite witness.
    auto found = find_tracker(pca, compose(g.map, f.map), f.src, g.dst,
                              Filter::inhabited(), 64, fuel,
                              {g.tracker, f.tracker});
    if (!found)
      throw std::runtime_error("no composite tracker found; raise bounds");
    t = *found;
  }
  return tracked(pca, f.src, g.dst, compose(g.map, f.map), t, fuel);
}

// ---------------------------------------------------------------------------
// The constant-assembly embedding and its left adjoint.

inline Assembly nabla(const PcaInstance& pca, const FinObject& x, int bound) {
  std::vector<TermPtr> all = pca.enumerate(bound);
  if (all.empty()) throw std::invalid_argument("enumeration bound too small");
  RealizerTable t;
  for (const auto& e : x.elements()) t[e] = all;
  return make_assembly("nabla", x, std::move(t));
}

inline FinObject gamma(const Assembly& x) { return x.carrier; }

// Unit of the adjunction at X: the identity carrier map into the constant
// assembly on the carrier. The identity combinator witnesses it whenever
// X's realizers all appear within the enumeration bound; otherwise fall
// back to a search (a constant witness always exists).
inline TrackedMorphism unit_eta(const PcaInstance& pca, const Assembly& x,
                                int bound, Fuel fuel) {
  Assembly nx = nabla(pca, x.carrier, bound);
  FinMap id = FinMap::identity(x.carrier);
  TermPtr id_w = identity_witness(pca);
  if (verify_tracks(pca, id_w, id, x, nx, fuel) == Tri::Yes)
    return TrackedMorphism{x, nx, id, id_w, fuel};
  auto found =
      find_tracker(pca, id, x, nx, Filter::inhabited(), bound, fuel);
  if (!found)
    throw std::runtime_error("no witness for the unit at this bound");
  return TrackedMorphism{x, nx, id, *found, fuel};
}

// ---------------------------------------------------------------------------
// Reindexing along carrier maps: pull realizers back, push them forward.

inline Assembly pullback_assembly(const FinMap& f, const Assembly& y) {
  if (!(f.dst() == y.carrier))
    throw std::invalid_argument(
        "reindexing map must target the assembly carrier");
  RealizerTable t;
  for (const auto& w : f.src().elements()) t[w] = y.realizers_of(f.apply(w));
  return make_assembly("pb(" + y.name + ")", f.src(), std::move(t));
}

inline Assembly pushforward_assembly(const FinMap& e, const Assembly& x) {
  if (!(e.src() == x.carrier))
    throw std::invalid_argument(
        "pushforward map must start at the assembly carrier");
  if (!e.surjective())
    throw std::invalid_argument("pushforward requires a surjective map");
  RealizerTable t;
  for (const auto& y : e.dst().elements()) t[y] = {};
  for (const auto& x_el : x.carrier.elements()) {
    auto& dst_set = t[e.apply(x_el)];
    for (const auto& r : x.realizers_of(x_el)) dst_set.push_back(r);
  }
  return make_assembly("pf(" + x.name + ")", e.dst(), std::move(t));
}

// ---------------------------------------------------------------------------
// Pairing of realizer structures over one carrier, realized by canonical
// pairs. Projections are identity carrier maps witnessed by the selectors.

inline TermPtr pair_values(const PcaInstance& pca, const TermPtr& u,
                           const TermPtr& v, Fuel fuel) {
  if (pca.name == "trivial") return pca.k_elem;
  ApplyResult r =
      pca.apply_chain(embed_sk(pca, lib("pair")), {u, v}, fuel);
  if (!r.ok())
    throw std::runtime_error("pair construction ran out of fuel");
  return r.value;
}

struct OtimesResult {
  Assembly obj;
  TrackedMorphism proj1, proj2;  // identity carrier maps to each factor
};

inline OtimesResult otimes(const PcaInstance& pca, const Assembly& y1,
                           const Assembly& y2, Fuel fuel) {
  if (!(y1.carrier == y2.carrier))
    throw std::invalid_argument("both structures must share one carrier");
  RealizerTable t;
  for (const auto& e : y1.carrier.elements()) {
    std::vector<TermPtr> cell;
    for (const auto& u : y1.realizers_of(e))
      for (const auto& v : y2.realizers_of(e))
        cell.push_back(pair_values(pca, u, v, fuel));
    t[e] = std::move(cell);
  }
  Assembly obj = make_assembly("(" + y1.name + ")x(" + y2.name + ")",
                               y1.carrier, std::move(t));
  FinMap id = FinMap::identity(y1.carrier);
  TrackedMorphism p1 =
      tracked(pca, obj, y1, id, embed_sk(pca, lib("fst")), fuel);
  TrackedMorphism p2 =
      tracked(pca, obj, y2, id, embed_sk(pca, lib("snd")), fuel);
  return OtimesResult{std::move(obj), std::move(p1), std::move(p2)};
}

// Witness for the map into a paired structure induced by two tracked maps
// with the same carrier map: feed the input realizer to both trackers.
inline TermPtr pairing_tracker(const PcaInstance& pca, const TermPtr& u,
                               const TermPtr& v, Fuel fuel) {
  if (pca.name == "trivial") return pca.k_elem;
  ApplyResult r =
      pca.apply_chain(embed_sk(pca, lib("mkpair")), {u, v}, fuel);
  if (!r.ok())
    throw std::runtime_error("pairing tracker construction ran out of fuel");
  return r.value;
}

// ---------------------------------------------------------------------------
// Finite limits, built by the standard recipe: take the base-category limit
// of carriers, then reindex and pair realizer structures.

inline Assembly asm_terminal(const PcaInstance& pca) {
  RealizerTable t;
  t["*"] = {pca.k_elem};
  return make_assembly("1", terminal(), std::move(t));
}

inline TrackedMorphism asm_bang(const PcaInstance& pca, const Assembly& x,
                                Fuel fuel) {
  Assembly one = asm_terminal(pca);
  // A witness sending every input to the canonical point of the instance.
  TermPtr w;
  if (pca.name == "sk") {
    w = Term::app(Term::k(), pca.k_elem);
  } else if (pca.name == "numeric") {
    auto code = encode_value(Term::app(Term::k(), Term::k()));
    if (!code) throw std::runtime_error("constant witness not encodable");
    w = numeral(*code);
  } else {
    w = pca.k_elem;
  }
  return tracked(pca, x, one, bang(x.carrier), w, fuel);
}

struct AsmProductResult {
  PcaInstance pca;
  Fuel fuel;
  Assembly obj;
  TrackedMorphism proj1, proj2;
  ProductResult base;

  TrackedMorphism mediate(const TrackedMorphism& f,
                          const TrackedMorphism& g) const {
    FinMap m = base.mediate(f.map, g.map);
    TermPtr t = pairing_tracker(pca, f.tracker, g.tracker, fuel);
    return tracked(pca, f.src, obj, m, t, fuel);
  }
};

inline AsmProductResult asm_product(const PcaInstance& pca, const Assembly& x,
                                    const Assembly& y, Fuel fuel) {
  ProductResult bp = product(x.carrier, y.carrier);
  RealizerTable t;
  for (const auto& e : bp.obj.elements()) {
    const auto& ux = x.realizers_of(bp.proj1.apply(e));
    const auto& vy = y.realizers_of(bp.proj2.apply(e));
    std::vector<TermPtr> cell;
    for (const auto& u : ux)
      for (const auto& v : vy) cell.push_back(pair_values(pca, u, v, fuel));
    t[e] = std::move(cell);
  }
  Assembly obj = make_assembly("(" + x.name + ")*(" + y.name + ")", bp.obj,
                               std::move(t));
  TrackedMorphism p1 =
      tracked(pca, obj, x, bp.proj1, embed_sk(pca, lib("fst")), fuel);
  TrackedMorphism p2 =
      tracked(pca, obj, y, bp.proj2, embed_sk(pca, lib("snd")), fuel);
  return AsmProductResult{pca,           fuel, std::move(obj), std::move(p1),
                          std::move(p2), bp};
}

struct AsmPullbackResult {
  PcaInstance pca;
  Fuel fuel;
  Assembly obj;
  TrackedMorphism leg1, leg2;
  PullbackResult base;

  TrackedMorphism mediate(const TrackedMorphism& p,
                          const TrackedMorphism& q) const {
    FinMap m = base.mediate(p.map, q.map);
    TermPtr t = pairing_tracker(pca, p.tracker, q.tracker, fuel);
    return tracked(pca, p.src, obj, m, t, fuel);
  }
};

inline AsmPullbackResult asm_pullback(const PcaInstance& pca,
                                      const TrackedMorphism& f,
                                      const TrackedMorphism& g, Fuel fuel) {
  if (!(f.map.dst() == g.map.dst()))
    throw std::invalid_argument("pullback needs a common target");
  PullbackResult bp = pullback(f.map, g.map);
  RealizerTable t;
  for (const auto& e : bp.obj.elements()) {
    const auto& ux = f.src.realizers_of(bp.leg1.apply(e));
    const auto& vy = g.src.realizers_of(bp.leg2.apply(e));
    std::vector<TermPtr> cell;
    for (const auto& u : ux)
      for (const auto& v : vy) cell.push_back(pair_values(pca, u, v, fuel));
    t[e] = std::move(cell);
  }
  Assembly obj =
      make_assembly("pullback(" + f.src.name + "," + g.src.name + ")", bp.obj,
                    std::move(t));
  TrackedMorphism l1 =
      tracked(pca, obj, f.src, bp.leg1, embed_sk(pca, lib("fst")), fuel);
  TrackedMorphism l2 =
      tracked(pca, obj, g.src, bp.leg2, embed_sk(pca, lib("snd")), fuel);
  return AsmPullbackResult{pca,           fuel, std::move(obj), std::move(l1),
                           std::move(l2), bp};
}

struct AsmEqualizerResult {
  PcaInstance pca;
  Fuel fuel;
  Assembly obj;
  TrackedMorphism include;
  EqualizerResult base;

  TrackedMorphism mediate(const TrackedMorphism& h) const {
    FinMap m = base.mediate(h.map);
    return tracked(pca, h.src, obj, m, h.tracker, fuel);
  }
};

inline AsmEqualizerResult asm_equalizer(const PcaInstance& pca,
                                        const TrackedMorphism& f,
                                        const TrackedMorphism& g, Fuel fuel) {
  if (!(f.map.src() == g.map.src()) || !(f.map.dst() == g.map.dst()))
    throw std::invalid_argument("equalizer needs a parallel pair");
  EqualizerResult be = equalizer(f.map, g.map);
  Assembly obj = pullback_assembly(be.include, f.src);
  obj.name = "equalizer(" + f.src.name + ")";
  TrackedMorphism inc =
      tracked(pca, obj, f.src, be.include, identity_witness(pca), fuel);
  return AsmEqualizerResult{pca, fuel, std::move(obj), std::move(inc), be};
}

// ---------------------------------------------------------------------------
// Regular structure: images and coequalizers of kernel pairs arise from the
// base factorization followed by a realizer pushforward.

struct AsmImageFactorization {
  TrackedMorphism epi;   // source onto the image assembly
  TrackedMorphism mono;  // image assembly into the target
};

inline AsmImageFactorization image_factorize(const PcaInstance& pca,
                                             const TrackedMorphism& f,
                                             Fuel fuel) {
  ImageFactorization bi = image_factorization(f.map);
  Assembly img = pushforward_assembly(bi.epi, f.src);
  img.name = "im(" + f.src.name + ")";
  TrackedMorphism e =
      tracked(pca, f.src, img, bi.epi, identity_witness(pca), fuel);
  TrackedMorphism m = tracked(pca, img, f.dst, bi.mono, f.tracker, fuel);
  return AsmImageFactorization{std::move(e), std::move(m)};
}

// Coequalizer of the kernel pair of f: the canonical quotient the map factors
// through, namely the image carrier with pushed-forward realizers.
inline TrackedMorphism coeq_of_kernel_pair(const PcaInstance& pca,
                                           const TrackedMorphism& f,
                                           Fuel fuel) {
  return image_factorize(pca, f, fuel).epi;
}

// A morphism is a regular epi exactly when its carrier map is surjective and
// its target is isomorphic to the realizer pushforward of its source, with
// both directions of the isomorphism witnessed.
inline Tri is_regular_epi(const PcaInstance& pca, const TrackedMorphism& f,
                          const FilterPtr& filter, int search_bound,
                          Fuel fuel) {
  if (!f.map.surjective()) return Tri::No;
  Assembly pushed = pushforward_assembly(f.map, f.src);
  FinMap id = FinMap::identity(f.dst.carrier);
  TermPtr id_w = identity_witness(pca);
  auto fwd = find_tracker(pca, id, pushed, f.dst, filter, search_bound, fuel,
                          {f.tracker, id_w});
  if (!fwd) return Tri::Unknown;
  auto bwd = find_tracker(pca, id, f.dst, pushed, filter, search_bound, fuel,
                          {f.tracker, id_w});
  if (!bwd) return Tri::Unknown;
  return Tri::Yes;
}

// ---------------------------------------------------------------------------
// The diagonal assembly: a truncation of the applicative structure realizing
// itself, each element witnessed by exactly its own value.

inline Assembly diagonal_assembly(const PcaInstance& pca, int bound) {
  std::vector<std::string> names;
  RealizerTable t;
  for (const auto& v : pca.enumerate(bound)) {
    std::string n = print_term(v);
    names.push_back(n);
    t[n] = {v};
  }
  return make_assembly("diag", FinObject(std::move(names)), std::move(t));
}

}  // namespace asmcat
