#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asmcat/term.hpp"

namespace asmcat {

// Three-valued answers for fuel- and bound-limited checks.
enum class Tri : std::uint8_t { Yes, No, Unknown };

inline const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "unknown";
  }
}

// Conjunction that keeps Unknown only when no definite No occurs.
inline Tri tri_and(Tri a, Tri b) {
  if (a == Tri::No || b == Tri::No) return Tri::No;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::Yes;
}

struct Fuel {
  std::uint32_t steps = 64;
};

struct ApplyResult {
  enum class Status : std::uint8_t { Defined, OutOfFuel, Stuck };
  Status status;
  TermPtr value;  // set iff Defined

  static ApplyResult defined(TermPtr v) {
    return {Status::Defined, std::move(v)};
  }
  static ApplyResult out_of_fuel() { return {Status::OutOfFuel, nullptr}; }
  static ApplyResult stuck() { return {Status::Stuck, nullptr}; }
  bool ok() const { return status == Status::Defined; }
};

namespace detail {

// Call-by-value weak application of one value to another. Each K or S
// contraction costs one unit of fuel; arguments of a value stay values, so
// the only redexes ever created sit at spine heads.
inline ApplyResult weak_apply(const TermPtr& f, const TermPtr& x,
                              std::uint32_t& fuel) {
  // f = K a  =>  a
  if (f->kind() == TermKind::App && f->fn()->kind() == TermKind::K) {
    if (fuel == 0) return ApplyResult::out_of_fuel();
    --fuel;
    return ApplyResult::defined(f->arg());
  }
  // f = S a b  =>  (a x) (b x)
  if (f->kind() == TermKind::App && f->fn()->kind() == TermKind::App &&
      f->fn()->fn()->kind() == TermKind::S) {
    if (fuel == 0) return ApplyResult::out_of_fuel();
    --fuel;
    const TermPtr& a = f->fn()->arg();
    const TermPtr& b = f->arg();
    ApplyResult left = weak_apply(a, x, fuel);
    if (!left.ok()) return left;
    ApplyResult right = weak_apply(b, x, fuel);
    if (!right.ok()) return right;
    return weak_apply(left.value, right.value, fuel);
  }
  // Underapplied K/S or an atom-headed spine: the application is a value.
  return ApplyResult::defined(Term::app(f, x));
}

}  // namespace detail

// Evaluates an arbitrary (possibly non-value) applicative term to a value.
inline ApplyResult weak_normalize_term(const TermPtr& t, std::uint32_t& fuel) {
  if (t->kind() != TermKind::App) return ApplyResult::defined(t);
  ApplyResult f = weak_normalize_term(t->fn(), fuel);
  if (!f.ok()) return f;
  ApplyResult x = weak_normalize_term(t->arg(), fuel);
  if (!x.ok()) return x;
  return detail::weak_apply(f.value, x.value, fuel);
}

inline ApplyResult weak_normalize(const TermPtr& t, Fuel fuel) {
  std::uint32_t budget = fuel.steps;
  return weak_normalize_term(t, budget);
}

// ---------------------------------------------------------------------------
// Goedel coding of pure K/S values: K -> 0, S -> 1, an application pairs the
// codes of its parts. Only value-state terms are codes; decoding a number
// whose tree shape is reducible fails.

inline std::optional<std::uint64_t> term_code(const TermPtr& t) {
  switch (t->kind()) {
    case TermKind::K: return 0;
    case TermKind::S: return 1;
    case TermKind::Atom: return std::nullopt;
    case TermKind::App: {
      auto a = term_code(t->fn());
      auto b = term_code(t->arg());
      if (!a || !b) return std::nullopt;
      unsigned __int128 sum = static_cast<unsigned __int128>(*a) + *b;
      unsigned __int128 pair = sum * (sum + 1) / 2 + *b;
      unsigned __int128 code = pair + 2;
      if (code > UINT64_MAX) throw std::overflow_error("term code overflow");
      return static_cast<std::uint64_t>(code);
    }
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> encode_value(const TermPtr& t) {
  if (!is_value(t)) return std::nullopt;
  return term_code(t);
}

inline std::optional<TermPtr> decode_value(std::uint64_t n) {
  if (n == 0) return Term::k();
  if (n == 1) return Term::s();
  std::uint64_t z = n - 2;
  // Invert the pairing: find w with w(w+1)/2 <= z < (w+1)(w+2)/2.
  std::uint64_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= z) ++w;
  std::uint64_t b = z - w * (w + 1) / 2;
  std::uint64_t a = w - b;
  auto fn = decode_value(a);
  auto arg = decode_value(b);
  if (!fn || !arg) return std::nullopt;
  TermPtr t = Term::app(*fn, *arg);
  if (!is_value(t)) return std::nullopt;
  return t;
}

inline TermPtr numeral(std::uint64_t n) { return Term::atom(std::to_string(n)); }

inline std::optional<std::uint64_t> numeral_of(const TermPtr& t) {
  if (t->kind() != TermKind::Atom || !is_numeral_name(t->name()))
    return std::nullopt;
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(t->name().c_str(), &end, 10);
  if (errno != 0 || end != t->name().c_str() + t->name().size())
    return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------------------
// Enumeration of pure K/S values in canonical size-then-structure order.
// Values have the grammar  V ::= K | S | K V | S V | S V V.

namespace detail {
inline const std::vector<TermPtr>& values_of_size(int n) {
  static std::vector<std::vector<TermPtr>> by_size;  // by_size[i] = size i+1
  if (n < 1) throw std::invalid_argument("value size must be positive");
  while (static_cast<int>(by_size.size()) < n) {
    int sz = static_cast<int>(by_size.size()) + 1;
    std::vector<TermPtr> out;
    if (sz == 1) {
      out = {Term::k(), Term::s()};
    } else {
      for (const auto& v : by_size[sz - 2]) {
        out.push_back(Term::app(Term::k(), v));
        out.push_back(Term::app(Term::s(), v));
      }
      for (int i = 1; i + 1 <= sz - 1; ++i) {
        int j = sz - 1 - i;
        for (const auto& v : by_size[i - 1])
          for (const auto& w : by_size[j - 1])
            out.push_back(
                Term::app(Term::app(Term::s(), v), w));
      }
      std::sort(out.begin(), out.end(), term_less);
    }
    by_size.push_back(std::move(out));
  }
  return by_size[n - 1];
}
}  // namespace detail

// All pure K/S values with at most `size_bound` leaves, canonical order.
inline std::vector<TermPtr> enumerate_values(int size_bound) {
  std::vector<TermPtr> out;
  for (int sz = 1; sz <= size_bound; ++sz) {
    const auto& layer = detail::values_of_size(sz);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

// The first `count` values of the canonical enumeration; used as the finite
// truncation standing in for "all of A".
inline std::vector<TermPtr> first_values(int count) {
  std::vector<TermPtr> out;
  for (int sz = 1; static_cast<int>(out.size()) < count; ++sz) {
    const auto& layer = detail::values_of_size(sz);
    for (const auto& t : layer) {
      if (static_cast<int>(out.size()) >= count) break;
      out.push_back(t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partial applicative structures.

struct PcaInstance {
  std::string name;
  std::function<ApplyResult(const TermPtr&, const TermPtr&, Fuel)> apply;
  std::function<bool(const TermPtr&)> is_element;  // value-state elements
  TermPtr k_elem;
  TermPtr s_elem;
  std::function<std::vector<TermPtr>(int)> enumerate;     // by size bound
  std::function<std::vector<TermPtr>(int)> first_elems;   // by count

  // Left-nested application; each step gets the full fuel budget.
  ApplyResult apply_chain(TermPtr f, const std::vector<TermPtr>& args,
                          Fuel fuel) const {
    if (args.empty())
      throw std::invalid_argument("apply_chain requires at least one argument");
    TermPtr acc = std::move(f);
    for (const auto& a : args) {
      ApplyResult r = apply(acc, a, fuel);
      if (!r.ok()) return r;
      acc = r.value;
    }
    return ApplyResult::defined(acc);
  }
};

inline PcaInstance sk_pca() {
  PcaInstance p;
  p.name = "sk";
  p.apply = [](const TermPtr& f, const TermPtr& x, Fuel fuel) {
    if (!is_value(f) || !is_value(x))
      throw std::invalid_argument("apply expects value-state terms");
    std::uint32_t budget = fuel.steps;
    return detail::weak_apply(f, x, budget);
  };
  p.is_element = [](const TermPtr& t) { return is_value(t); };
  p.k_elem = Term::k();
  p.s_elem = Term::s();
  p.enumerate = enumerate_values;
  p.first_elems = first_values;
  return p;
}

inline PcaInstance numeric_pca() {
  PcaInstance p;
  p.name = "numeric";
  p.apply = [](const TermPtr& f, const TermPtr& x, Fuel fuel) {
    auto fn = numeral_of(f);
    auto xn = numeral_of(x);
    if (!fn || !xn) return ApplyResult::stuck();
    auto ft = decode_value(*fn);
    auto xt = decode_value(*xn);
    if (!ft || !xt) return ApplyResult::stuck();
    std::uint32_t budget = fuel.steps;
    ApplyResult r = detail::weak_apply(*ft, *xt, budget);
    if (!r.ok()) return r;
    auto code = encode_value(r.value);
    if (!code) return ApplyResult::stuck();
    return ApplyResult::defined(numeral(*code));
  };
  p.is_element = [](const TermPtr& t) {
    auto n = numeral_of(t);
    return n && decode_value(*n).has_value();
  };
  p.k_elem = numeral(*encode_value(Term::k()));
  p.s_elem = numeral(*encode_value(Term::s()));
  auto encode_list = [](std::vector<TermPtr> vs) {
    std::vector<std::uint64_t> codes;
    codes.reserve(vs.size());
    for (const auto& v : vs) codes.push_back(*encode_value(v));
    std::sort(codes.begin(), codes.end());
    std::vector<TermPtr> out;
    out.reserve(codes.size());
    for (auto c : codes) out.push_back(numeral(c));
    return out;
  };
  p.enumerate = [encode_list](int size_bound) {
    return encode_list(enumerate_values(size_bound));
  };
  p.first_elems = [encode_list](int count) {
    return encode_list(first_values(count));
  };
  return p;
}

// One-point applicative structure: a single element applied to itself.
inline PcaInstance trivial_pca() {
  PcaInstance p;
  p.name = "trivial";
  TermPtr pt = Term::atom("pt");
  p.apply = [pt](const TermPtr& f, const TermPtr& x, Fuel) {
    if (term_eq(f, pt) && term_eq(x, pt)) return ApplyResult::defined(pt);
    return ApplyResult::stuck();
  };
  p.is_element = [pt](const TermPtr& t) { return term_eq(t, pt); };
  p.k_elem = pt;
  p.s_elem = pt;
  p.enumerate = [pt](int) { return std::vector<TermPtr>{pt}; };
  p.first_elems = [pt](int) { return std::vector<TermPtr>{pt}; };
  return p;
}

// ---------------------------------------------------------------------------
// Realizer sets: finite lists of values, or a named membership predicate with
// an enumerator for searches.

struct RealizerSet {
  std::optional<std::vector<TermPtr>> finite;  // sorted, deduplicated
  std::function<Tri(const TermPtr&, Fuel)> pred;
  std::function<std::vector<TermPtr>(int)> enumerator;
  std::string label;

  static RealizerSet finitary(std::vector<TermPtr> ts, std::string label = "") {
    RealizerSet r;
    r.finite = sorted_unique(std::move(ts));
    r.label = std::move(label);
    return r;
  }
  static RealizerSet predicate(std::function<Tri(const TermPtr&, Fuel)> p,
                               std::function<std::vector<TermPtr>(int)> en,
                               std::string label) {
    RealizerSet r;
    r.pred = std::move(p);
    r.enumerator = std::move(en);
    r.label = std::move(label);
    return r;
  }

  bool is_finitary() const { return finite.has_value(); }
  Tri member(const TermPtr& t, Fuel fuel) const {
    if (finite) return contains_term(*finite, t) ? Tri::Yes : Tri::No;
    return pred(t, fuel);
  }
};

// ---------------------------------------------------------------------------
// Filters: families of "large enough" realizer sets, membership three-valued.

struct Filter;
using FilterPtr = std::shared_ptr<const Filter>;

struct Filter {
  enum class Kind { Inhabited, Relative, Intersection, Trivial };
  Kind kind;
  // Relative: a sub-applicative-structure given by a decidable-with-fuel
  // membership predicate plus an enumerator of its elements.
  std::function<Tri(const TermPtr&, Fuel)> sub_member;
  std::function<std::vector<TermPtr>(int)> sub_enumerate;
  std::string label;
  std::vector<FilterPtr> parts;  // Intersection
  TermPtr trivial_point;         // Trivial

  static FilterPtr inhabited() {
    auto f = std::make_shared<Filter>();
    f->kind = Kind::Inhabited;
    f->label = "inh";
    return f;
  }
  static FilterPtr relative(std::function<Tri(const TermPtr&, Fuel)> member,
                            std::function<std::vector<TermPtr>(int)> enumerate,
                            std::string label) {
    auto f = std::make_shared<Filter>();
    f->kind = Kind::Relative;
    f->sub_member = std::move(member);
    f->sub_enumerate = std::move(enumerate);
    f->label = "rel:" + label;
    return f;
  }
  static FilterPtr intersection(std::vector<FilterPtr> parts) {
    auto f = std::make_shared<Filter>();
    f->kind = Kind::Intersection;
    f->parts = std::move(parts);
    f->label = "and";
    for (const auto& p : f->parts) f->label += ":" + p->label;
    return f;
  }
  static FilterPtr trivial(TermPtr point) {
    auto f = std::make_shared<Filter>();
    f->kind = Kind::Trivial;
    f->trivial_point = std::move(point);
    f->label = "trivial";
    return f;
  }
};

// Is the realizer set large enough to witness tracking, per the filter?
inline Tri filter_member(const Filter& f, const RealizerSet& s, Fuel fuel,
                         int search_bound) {
  switch (f.kind) {
    case Filter::Kind::Inhabited: {
      if (s.is_finitary()) return s.finite->empty() ? Tri::No : Tri::Yes;
      for (const auto& t : s.enumerator(search_bound))
        if (s.pred(t, fuel) == Tri::Yes) return Tri::Yes;
      return Tri::Unknown;
    }
    case Filter::Kind::Relative: {
      if (s.is_finitary()) {
        bool unknown = false;
        for (const auto& t : *s.finite) {
          Tri m = f.sub_member(t, fuel);
          if (m == Tri::Yes) return Tri::Yes;
          if (m == Tri::Unknown) unknown = true;
        }
        return unknown ? Tri::Unknown : Tri::No;
      }
      for (const auto& t : f.sub_enumerate(search_bound))
        if (s.pred(t, fuel) == Tri::Yes) return Tri::Yes;
      return Tri::Unknown;
    }
    case Filter::Kind::Intersection: {
      Tri acc = Tri::Yes;
      for (const auto& p : f.parts)
        acc = tri_and(acc, filter_member(*p, s, fuel, search_bound));
      return acc;
    }
    case Filter::Kind::Trivial: {
      if (s.is_finitary())
        return contains_term(*s.finite, f.trivial_point) ? Tri::Yes : Tri::No;
      return s.pred(f.trivial_point, fuel);
    }
  }
  return Tri::Unknown;
}

inline Tri filter_member(const FilterPtr& f, const RealizerSet& s, Fuel fuel,
                         int search_bound) {
  return filter_member(*f, s, fuel, search_bound);
}

inline bool is_pure_ks(const Term& t) {
  switch (t.kind()) {
    case TermKind::K:
    case TermKind::S:
      return true;
    case TermKind::Atom:
      return false;
    case TermKind::App:
      return is_pure_ks(*t.fn()) && is_pure_ks(*t.arg());
  }
  return false;
}

// The sub-structure generated by K and S inside the SK instance: all
// atom-free values. Membership is syntactic, hence decidable.
inline FilterPtr ks_closure_filter() {
  return Filter::relative(
      [](const TermPtr& t, Fuel) {
        return is_pure_ks(*t) && is_value(t) ? Tri::Yes : Tri::No;
      },
      [](int bound) { return first_values(bound); }, "ks");
}

inline bool is_pure_k(const Term& t) {
  switch (t.kind()) {
    case TermKind::K: return true;
    case TermKind::App: return is_pure_k(*t.fn()) && is_pure_k(*t.arg());
    default: return false;
  }
}

// Values built from K alone; excludes every S-representative.
inline FilterPtr k_only_filter() {
  return Filter::relative(
      [](const TermPtr& t, Fuel) {
        return is_pure_k(*t) && is_value(t) ? Tri::Yes : Tri::No;
      },
      [](int bound) {
        std::vector<TermPtr> out;
        for (const auto& t : first_values(bound))
          if (t->kind() == TermKind::K ||
              (t->kind() == TermKind::App && t->fn()->kind() == TermKind::K &&
               t->arg()->kind() == TermKind::K))
            out.push_back(t);
        return out;
      },
      "k-only");
}

// ---------------------------------------------------------------------------
// Combinatory completeness report: the filter must exhibit representatives of
// k and s whose defining laws hold on enumerated elements.

struct CheckLine {
  std::string name;
  Tri status;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  Tri overall() const {
    Tri acc = Tri::Yes;
    for (const auto& l : lines) acc = tri_and(acc, l.status);
    return acc;
  }
};

inline CheckReport check_combinatory_complete(const PcaInstance& pca,
                                              const FilterPtr& filter,
                                              Fuel fuel, int size_bound,
                                              int search_bound) {
  CheckReport rep;
  auto single = [&](const TermPtr& t) {
    return RealizerSet::finitary({t});
  };
  rep.lines.push_back({"k-representative-in-filter",
                       filter_member(filter, single(pca.k_elem), fuel,
                                     search_bound),
                       print_term(pca.k_elem)});
  rep.lines.push_back({"s-representative-in-filter",
                       filter_member(filter, single(pca.s_elem), fuel,
                                     search_bound),
                       print_term(pca.s_elem)});

  auto elems = pca.enumerate(size_bound);
  Tri k_law = Tri::Yes;
  std::string k_witness;
  for (const auto& x : elems) {
    for (const auto& y : elems) {
      ApplyResult kx = pca.apply(pca.k_elem, x, fuel);
      if (kx.status == ApplyResult::Status::OutOfFuel) {
        k_law = tri_and(k_law, Tri::Unknown);
        continue;
      }
      if (!kx.ok()) {
        k_law = Tri::No;
        k_witness = print_term(x);
        continue;
      }
      ApplyResult kxy = pca.apply(kx.value, y, fuel);
      if (kxy.status == ApplyResult::Status::OutOfFuel) {
        k_law = tri_and(k_law, Tri::Unknown);
        continue;
      }
      if (!kxy.ok() || !term_eq(kxy.value, x)) {
        k_law = Tri::No;
        k_witness = print_term(x) + " ; " + print_term(y);
      }
    }
  }
  rep.lines.push_back({"k-law", k_law, k_witness});

  Tri s_defined = Tri::Yes, s_law = Tri::Yes;
  std::string s_witness;
  for (const auto& x : elems) {
    for (const auto& y : elems) {
      ApplyResult sx = pca.apply(pca.s_elem, x, fuel);
      ApplyResult sxy = sx.ok() ? pca.apply(sx.value, y, fuel)
                                : sx;
      if (sxy.status == ApplyResult::Status::OutOfFuel) {
        s_defined = tri_and(s_defined, Tri::Unknown);
        continue;
      }
      if (!sxy.ok()) {
        s_defined = Tri::No;
        s_witness = print_term(x) + " ; " + print_term(y);
        continue;
      }
      for (const auto& z : elems) {
        // Right side (x z)(y z); when it is defined the left side must agree.
        ApplyResult xz = pca.apply(x, z, fuel);
        if (xz.status == ApplyResult::Status::OutOfFuel) {
          s_law = tri_and(s_law, Tri::Unknown);
          continue;
        }
        if (!xz.ok()) continue;
        ApplyResult yz = pca.apply(y, z, fuel);
        if (yz.status == ApplyResult::Status::OutOfFuel) {
          s_law = tri_and(s_law, Tri::Unknown);
          continue;
        }
        if (!yz.ok()) continue;
        ApplyResult rhs = pca.apply(xz.value, yz.value, fuel);
        if (rhs.status == ApplyResult::Status::OutOfFuel) {
          s_law = tri_and(s_law, Tri::Unknown);
          continue;
        }
        if (!rhs.ok()) continue;
        ApplyResult lhs = pca.apply(sxy.value, z, fuel);
        if (lhs.status == ApplyResult::Status::OutOfFuel) {
          s_law = tri_and(s_law, Tri::Unknown);
          continue;
        }
        if (!lhs.ok() || !term_eq(lhs.value, rhs.value)) {
          s_law = Tri::No;
          s_witness = print_term(x) + " ; " + print_term(y) + " ; " +
                      print_term(z);
        }
      }
    }
  }
  rep.lines.push_back({"s-application-defined", s_defined, s_witness});
  rep.lines.push_back({"s-law", s_law, s_witness});
  return rep;
}

}  // namespace asmcat
