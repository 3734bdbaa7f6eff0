#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asmcat/pca.hpp"

namespace asmcat {

// ---------------------------------------------------------------------------
// Finite sets, total functions, and subsets: the base category. Subobject
// lattices here are Boolean, and every universal property is checkable by
// exhaustion.

class FinObject {
public:
  FinObject() = default;
  explicit FinObject(std::vector<std::string> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    elements_ = std::move(elems);
  }

  const std::vector<std::string>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(const std::string& e) const {
    return std::binary_search(elements_.begin(), elements_.end(), e);
  }
  friend bool operator==(const FinObject& a, const FinObject& b) {
    return a.elements_ == b.elements_;
  }
  friend bool operator!=(const FinObject& a, const FinObject& b) {
    return !(a == b);
  }

private:
  std::vector<std::string> elements_;
};

class FinMap {
public:
  FinMap() = default;
  FinMap(FinObject src, FinObject dst, std::map<std::string, std::string> table)
      : src_(std::move(src)), dst_(std::move(dst)), table_(std::move(table)) {
    if (table_.size() != src_.size())
      throw std::invalid_argument("map table must cover the source exactly");
    for (const auto& [k, v] : table_) {
      if (!src_.contains(k))
        throw std::invalid_argument("map table key '" + k +
                                    "' is not in the source");
      if (!dst_.contains(v))
        throw std::invalid_argument("map value '" + v +
                                    "' is not in the target");
    }
  }

  static FinMap identity(const FinObject& x) {
    std::map<std::string, std::string> t;
    for (const auto& e : x.elements()) t[e] = e;
    return FinMap(x, x, std::move(t));
  }
  static FinMap constant(const FinObject& src, const FinObject& dst,
                         const std::string& value) {
    std::map<std::string, std::string> t;
    for (const auto& e : src.elements()) t[e] = value;
    return FinMap(src, dst, std::move(t));
  }

  const FinObject& src() const { return src_; }
  const FinObject& dst() const { return dst_; }
  const std::map<std::string, std::string>& table() const { return table_; }

  const std::string& apply(const std::string& e) const {
    auto it = table_.find(e);
    if (it == table_.end())
      throw std::invalid_argument("element '" + e + "' is not in the source");
    return it->second;
  }

  bool injective() const {
    std::vector<std::string> seen;
    for (const auto& [k, v] : table_) seen.push_back(v);
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
  }
  bool surjective() const {
    std::vector<std::string> seen;
    for (const auto& [k, v] : table_) seen.push_back(v);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    return seen.size() == dst_.size();
  }
  bool bijective() const { return injective() && surjective(); }

  friend bool operator==(const FinMap& a, const FinMap& b) {
    return a.src_ == b.src_ && a.dst_ == b.dst_ && a.table_ == b.table_;
  }

private:
  FinObject src_, dst_;
  std::map<std::string, std::string> table_;
};

inline FinMap compose(const FinMap& g, const FinMap& f) {
  if (!(f.dst() == g.src()))
    throw std::invalid_argument("composition requires matching middle object");
  std::map<std::string, std::string> t;
  for (const auto& e : f.src().elements()) t[e] = g.apply(f.apply(e));
  return FinMap(f.src(), g.dst(), std::move(t));
}

class FinSubset {
public:
  FinSubset() = default;
  FinSubset(FinObject of, std::vector<std::string> members)
      : of_(std::move(of)) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (const auto& m : members)
      if (!of_.contains(m))
        throw std::invalid_argument("subset member '" + m +
                                    "' is not in the carrier");
    members_ = std::move(members);
  }

  static FinSubset full(const FinObject& x) {
    return FinSubset(x, x.elements());
  }
  static FinSubset empty(const FinObject& x) { return FinSubset(x, {}); }

  const FinObject& of() const { return of_; }
  const std::vector<std::string>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const std::string& e) const {
    return std::binary_search(members_.begin(), members_.end(), e);
  }
  friend bool operator==(const FinSubset& a, const FinSubset& b) {
    return a.of_ == b.of_ && a.members_ == b.members_;
  }
  friend bool operator!=(const FinSubset& a, const FinSubset& b) {
    return !(a == b);
  }

private:
  FinObject of_;
  std::vector<std::string> members_;
};

namespace detail {
inline void require_same_carrier(const FinSubset& u, const FinSubset& v) {
  if (!(u.of() == v.of()))
    throw std::invalid_argument("subsets live over different carriers");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Subobject lattice: Boolean operations and the quantifier adjoints.

inline bool sub_leq(const FinSubset& u, const FinSubset& v) {
  detail::require_same_carrier(u, v);
  return std::includes(v.members().begin(), v.members().end(),
                       u.members().begin(), u.members().end());
}

inline FinSubset sub_meet(const FinSubset& u, const FinSubset& v) {
  detail::require_same_carrier(u, v);
  std::vector<std::string> out;
  std::set_intersection(u.members().begin(), u.members().end(),
                        v.members().begin(), v.members().end(),
                        std::back_inserter(out));
  return FinSubset(u.of(), std::move(out));
}

inline FinSubset sub_join(const FinSubset& u, const FinSubset& v) {
  detail::require_same_carrier(u, v);
  std::vector<std::string> out;
  std::set_union(u.members().begin(), u.members().end(), v.members().begin(),
                 v.members().end(), std::back_inserter(out));
  return FinSubset(u.of(), std::move(out));
}

inline FinSubset sub_complement(const FinSubset& u) {
  std::vector<std::string> out;
  for (const auto& e : u.of().elements())
    if (!u.contains(e)) out.push_back(e);
  return FinSubset(u.of(), std::move(out));
}

// Heyting implication; over finite sets this is the Boolean (-u) ∪ v.
inline FinSubset sub_impl(const FinSubset& u, const FinSubset& v) {
  detail::require_same_carrier(u, v);
  return sub_join(sub_complement(u), v);
}

inline FinSubset sub_top(const FinObject& x) { return FinSubset::full(x); }
inline FinSubset sub_bottom(const FinObject& x) { return FinSubset::empty(x); }

inline FinSubset inv_image(const FinMap& f, const FinSubset& v) {
  if (!(v.of() == f.dst()))
    throw std::invalid_argument("inverse image needs a subset of the target");
  std::vector<std::string> out;
  for (const auto& e : f.src().elements())
    if (v.contains(f.apply(e))) out.push_back(e);
  return FinSubset(f.src(), std::move(out));
}

inline FinSubset exists_f(const FinMap& f, const FinSubset& u) {
  if (!(u.of() == f.src()))
    throw std::invalid_argument("direct image needs a subset of the source");
  std::vector<std::string> out;
  for (const auto& e : u.members()) out.push_back(f.apply(e));
  return FinSubset(f.dst(), std::move(out));
}

inline FinSubset forall_f(const FinMap& f, const FinSubset& u) {
  if (!(u.of() == f.src()))
    throw std::invalid_argument(
        "universal image needs a subset of the source");
  std::vector<std::string> out;
  for (const auto& y : f.dst().elements()) {
    bool all_in = true;
    for (const auto& x : f.src().elements())
      if (f.apply(x) == y && !u.contains(x)) {
        all_in = false;
        break;
      }
    if (all_in) out.push_back(y);
  }
  return FinSubset(f.dst(), std::move(out));
}

// Every subset of a carrier, in a canonical order (carriers of size <= 20).
inline std::vector<FinSubset> all_subsets(const FinObject& x) {
  if (x.size() > 20)
    throw std::invalid_argument("carrier too large to enumerate subsets");
  std::vector<FinSubset> out;
  const auto& es = x.elements();
  for (std::size_t mask = 0; mask < (std::size_t{1} << es.size()); ++mask) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < es.size(); ++i)
      if (mask & (std::size_t{1} << i)) members.push_back(es[i]);
    out.emplace_back(x, std::move(members));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite limits with mediating maps, and image factorization.

inline std::string pair_name(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

struct ProductResult {
  FinObject obj;
  FinMap proj1, proj2;

  // The unique map into the product induced by a cone (p, q).
  FinMap mediate(const FinMap& p, const FinMap& q) const {
    if (!(p.src() == q.src()))
      throw std::invalid_argument("cone legs must share a source");
    if (!(p.dst() == proj1.dst()) || !(q.dst() == proj2.dst()))
      throw std::invalid_argument("cone legs must target the factors");
    std::map<std::string, std::string> t;
    for (const auto& w : p.src().elements())
      t[w] = pair_name(p.apply(w), q.apply(w));
    return FinMap(p.src(), obj, std::move(t));
  }
};

inline ProductResult product(const FinObject& x, const FinObject& y) {
  std::vector<std::string> elems;
  std::map<std::string, std::string> t1, t2;
  for (const auto& a : x.elements())
    for (const auto& b : y.elements()) {
      std::string n = pair_name(a, b);
      elems.push_back(n);
      t1[n] = a;
      t2[n] = b;
    }
  FinObject p(std::move(elems));
  return ProductResult{p, FinMap(p, x, std::move(t1)),
                       FinMap(p, y, std::move(t2))};
}

struct PullbackResult {
  FinObject obj;
  FinMap leg1, leg2;  // to src(f) and src(g)

  FinMap mediate(const FinMap& p, const FinMap& q) const {
    if (!(p.src() == q.src()))
      throw std::invalid_argument("cone legs must share a source");
    if (!(p.dst() == leg1.dst()) || !(q.dst() == leg2.dst()))
      throw std::invalid_argument("cone legs must target the span feet");
    std::map<std::string, std::string> t;
    for (const auto& w : p.src().elements()) {
      std::string n = pair_name(p.apply(w), q.apply(w));
      if (!obj.contains(n))
        throw std::invalid_argument(
            "cone does not commute with the span at '" + w + "'");
      t[w] = n;
    }
    return FinMap(p.src(), obj, std::move(t));
  }
};

inline PullbackResult pullback(const FinMap& f, const FinMap& g) {
  if (!(f.dst() == g.dst()))
    throw std::invalid_argument("pullback needs a common target");
  std::vector<std::string> elems;
  std::map<std::string, std::string> t1, t2;
  for (const auto& a : f.src().elements())
    for (const auto& b : g.src().elements())
      if (f.apply(a) == g.apply(b)) {
        std::string n = pair_name(a, b);
        elems.push_back(n);
        t1[n] = a;
        t2[n] = b;
      }
  FinObject p(std::move(elems));
  return PullbackResult{p, FinMap(p, f.src(), std::move(t1)),
                        FinMap(p, g.src(), std::move(t2))};
}

struct EqualizerResult {
  FinObject obj;
  FinMap include;

  FinMap mediate(const FinMap& h) const {
    if (!(h.dst() == include.dst()))
      throw std::invalid_argument("cone must target the parallel pair source");
    std::map<std::string, std::string> t;
    for (const auto& w : h.src().elements()) {
      const std::string& v = h.apply(w);
      if (!obj.contains(v))
        throw std::invalid_argument("cone does not equalize at '" + w + "'");
      t[w] = v;
    }
    return FinMap(h.src(), obj, std::move(t));
  }
};

inline EqualizerResult equalizer(const FinMap& f, const FinMap& g) {
  if (!(f.src() == g.src()) || !(f.dst() == g.dst()))
    throw std::invalid_argument("equalizer needs a parallel pair");
  std::vector<std::string> elems;
  for (const auto& e : f.src().elements())
    if (f.apply(e) == g.apply(e)) elems.push_back(e);
  FinObject obj(std::move(elems));
  std::map<std::string, std::string> t;
  for (const auto& e : obj.elements()) t[e] = e;
  return EqualizerResult{obj, FinMap(obj, f.src(), std::move(t))};
}

inline FinObject terminal() { return FinObject({"*"}); }

inline FinMap bang(const FinObject& x) {
  return FinMap::constant(x, terminal(), "*");
}

struct ImageFactorization {
  FinObject image;   // named by the target elements that are hit
  FinMap epi;        // source onto image
  FinMap mono;       // image into target, the canonical inclusion
};

inline ImageFactorization image_factorization(const FinMap& f) {
  std::vector<std::string> hit;
  for (const auto& [k, v] : f.table()) hit.push_back(v);
  FinObject img(std::move(hit));
  std::map<std::string, std::string> te, tm;
  for (const auto& [k, v] : f.table()) te[k] = v;
  for (const auto& e : img.elements()) tm[e] = e;
  return ImageFactorization{img, FinMap(f.src(), img, std::move(te)),
                            FinMap(img, f.dst(), std::move(tm))};
}

// ---------------------------------------------------------------------------
// Beck-Chevalley: in a pullback square
//
//        P --f2--> Y
//        |g2       |g
//        v         v
//        X --f---> Z
//
// direct and universal images commute with reindexing across the square:
// exists_{g2} ∘ inv_image(f2) = inv_image(f) ∘ exists_g, and the same with
// forall. Checked on every subset of Y.

struct BeckChevalleySquare {
  FinMap f;   // X -> Z
  FinMap g;   // Y -> Z
  FinMap f2;  // P -> Y (parallel to f)
  FinMap g2;  // P -> X (parallel to g)
};

inline CheckReport beck_chevalley_check(const BeckChevalleySquare& sq) {
  if (!(sq.g2.src() == sq.f2.src()) || !(sq.g2.dst() == sq.f.src()) ||
      !(sq.f2.dst() == sq.g.src()) || !(sq.f.dst() == sq.g.dst()))
    throw std::invalid_argument("square boundary objects do not match");
  for (const auto& p : sq.f2.src().elements())
    if (sq.f.apply(sq.g2.apply(p)) != sq.g.apply(sq.f2.apply(p)))
      throw std::domain_error("square does not commute at '" + p + "'");

  // The square must be a pullback: comparing with the canonical pullback,
  // the induced map must be a bijection.
  PullbackResult canon = pullback(sq.f, sq.g);
  FinMap cmp = canon.mediate(sq.g2, sq.f2);
  if (!cmp.bijective()) throw std::domain_error("square is not a pullback");

  CheckReport report;
  std::size_t checked = 0, exists_ok = 0, forall_ok = 0;
  for (const FinSubset& u : all_subsets(sq.g.src())) {
    ++checked;
    FinSubset lhs_e = exists_f(sq.g2, inv_image(sq.f2, u));
    FinSubset rhs_e = inv_image(sq.f, exists_f(sq.g, u));
    if (lhs_e == rhs_e) ++exists_ok;
    FinSubset lhs_a = forall_f(sq.g2, inv_image(sq.f2, u));
    FinSubset rhs_a = inv_image(sq.f, forall_f(sq.g, u));
    if (lhs_a == rhs_a) ++forall_ok;
  }
  auto line = [&](const char* name, std::size_t ok) {
    report.lines.push_back(CheckLine{
        name, ok == checked ? Tri::Yes : Tri::No,
        std::to_string(ok) + "/" + std::to_string(checked) + " subsets"});
  };
  line("exists-square", exists_ok);
  line("forall-square", forall_ok);
  return report;
}

}  // namespace asmcat
