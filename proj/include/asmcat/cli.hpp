#pragma once

// Command-line front end.  Every subcommand prints one JSON report to stdout
// and a one-line human summary to stderr (suppressed by --json), and returns
// an exit code: 0 pass, 1 fail, 2 unknown/not-found, 3 usage or load error.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"

namespace asmcat {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliOptions {
  std::vector<std::string> positional;
  std::optional<std::uint32_t> fuel;
  std::optional<int> search;
  std::optional<int> bound;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> filter_spec;
  std::optional<std::string> workspace_path;
  std::optional<std::string> pca_name;
  bool json_only = false;
};

namespace cli_detail {

inline long long flag_number(const std::string& flag, const std::string& value,
                             std::size_t pos) {
  try {
    std::size_t used = 0;
    long long n = std::stoll(value, &used);
    if (used != value.size() || n < 0) throw std::invalid_argument("");
    return n;
  } catch (const std::exception&) {
    throw UsageError("flag " + flag + " needs a non-negative number, got '" +
                     value + "' (argument " + std::to_string(pos) + ")");
  }
}

inline CliOptions parse_options(const std::vector<std::string>& args) {
  CliOptions o;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      o.positional.push_back(a);
      continue;
    }
    if (a == "--json") {
      o.json_only = true;
      continue;
    }
    auto value = [&](const char* what) -> const std::string& {
      if (i + 1 >= args.size())
        throw UsageError("flag " + a + " needs " + what + " (argument " +
                         std::to_string(i + 1) + ")");
      return args[++i];
    };
    if (a == "--fuel")
      o.fuel = static_cast<std::uint32_t>(
          flag_number(a, value("a step count"), i));
    else if (a == "--search")
      o.search = static_cast<int>(flag_number(a, value("a bound"), i));
    else if (a == "--bound")
      o.bound = static_cast<int>(flag_number(a, value("a bound"), i));
    else if (a == "--seed")
      o.seed = static_cast<std::uint64_t>(flag_number(a, value("a seed"), i));
    else if (a == "--filter")
      o.filter_spec = value("a filter spec");
    else if (a == "--workspace")
      o.workspace_path = value("a file path");
    else if (a == "--pca")
      o.pca_name = value("an instance name");
    else
      throw UsageError("unknown flag '" + a + "' (argument " +
                       std::to_string(i + 1) + ")");
  }
  return o;
}

inline FilterPtr make_filter(const std::string& spec, const PcaInstance& pca) {
  if (spec == "inh") return Filter::inhabited();
  if (spec == "trivial") return Filter::trivial(pca.k_elem);
  if (spec.rfind("rel:", 0) == 0) {
    std::string name = spec.substr(4);
    if (name == "ks") return ks_closure_filter();
    if (name == "k-only") return k_only_filter();
    throw UsageError("unknown relative filter '" + name +
                     "'; available: ks, k-only");
  }
  if (spec.rfind("and:", 0) == 0) {
    std::vector<FilterPtr> parts;
    std::string rest = spec.substr(4);
    std::size_t start = 0;
    while (start <= rest.size()) {
      std::size_t comma = rest.find(',', start);
      std::string part = rest.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start);
      if (part.empty())
        throw UsageError("empty part in filter '" + spec + "'");
      parts.push_back(make_filter(part, pca));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (parts.size() < 2)
      throw UsageError("filter 'and:' needs at least two parts");
    return Filter::intersection(std::move(parts));
  }
  throw UsageError("unknown filter '" + spec +
                   "'; expected inh, rel:<name>, and:<a>,<b>, or trivial");
}

// Settings for one invocation: the workspace (or defaults), with flags
// overriding the file's directives.
struct Effective {
  Workspace ws;
  bool has_ws = false;
  std::string ws_path;
  FilterPtr filter;
  std::string filter_label;

  const PcaInstance& pca() const { return ws.pca; }
  Fuel fuel() const { return ws.fuel; }
  int search() const { return ws.search; }
  int bound() const { return ws.bound; }

  Json params(bool with_filter = false) const {
    Json p;
    p["pca"] = ws.pca.name;
    p["fuel"] = ws.fuel.steps;
    p["search"] = ws.search;
    p["bound"] = ws.bound;
    p["seed"] = ws.seed;
    if (with_filter) p["filter"] = filter_label;
    if (has_ws) p["workspace"] = ws_path;
    return p;
  }
};

inline Effective settle(const CliOptions& o, int default_bound) {
  Effective e;
  if (o.workspace_path) {
    std::ifstream in(*o.workspace_path);
    if (!in)
      throw UsageError("cannot read workspace file '" + *o.workspace_path +
                       "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      e.ws = parse_workspace(buf.str());
    } catch (const std::exception& ex) {
      throw UsageError(std::string(ex.what()) + " (in '" + *o.workspace_path +
                       "')");
    }
    e.has_ws = true;
    e.ws_path = *o.workspace_path;
    if (o.pca_name && *o.pca_name != e.ws.pca.name)
      throw UsageError("the workspace fixes the instance '" + e.ws.pca.name +
                       "'; drop --pca");
  } else {
    e.ws.bound = default_bound;
    if (o.pca_name) {
      if (*o.pca_name == "sk")
        e.ws.pca = sk_pca();
      else if (*o.pca_name == "numeric")
        e.ws.pca = numeric_pca();
      else if (*o.pca_name == "trivial")
        e.ws.pca = trivial_pca();
      else
        throw UsageError("unknown instance '" + *o.pca_name +
                         "'; expected sk, numeric, or trivial");
    }
  }
  if (o.fuel) e.ws.fuel = Fuel{*o.fuel};
  if (o.search) e.ws.search = *o.search;
  if (o.bound) e.ws.bound = *o.bound;
  if (o.seed) e.ws.seed = *o.seed;
  e.filter_label = o.filter_spec.value_or("inh");
  e.filter = make_filter(e.filter_label, e.ws.pca);
  return e;
}

inline Json new_report(const std::string& command, const Effective& e,
                       bool with_filter = false) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["parameters"] = e.params(with_filter);
  return j;
}

inline int emit(std::ostream& out, std::ostream& err, const Json& body,
                const std::string& summary, bool json_only, int exit_code) {
  out << body.dump(2) << "\n";
  if (!json_only) err << summary << "\n";
  return exit_code;
}

inline const std::string& need_arg(const CliOptions& o, std::size_t idx,
                                   const std::string& what) {
  if (o.positional.size() <= idx)
    throw UsageError("missing argument: " + what);
  return o.positional[idx];
}

inline void no_extra_args(const CliOptions& o, std::size_t expected) {
  if (o.positional.size() > expected)
    throw UsageError("unexpected argument '" + o.positional[expected] + "'");
}

inline const Assembly& ws_assembly(const Effective& e, const std::string& n) {
  auto it = e.ws.assemblies.find(n);
  if (it == e.ws.assemblies.end())
    throw UsageError("unknown assembly '" + n + "' in the workspace");
  return it->second;
}

inline const TrackedMorphism& ws_morphism(const Effective& e,
                                          const std::string& n) {
  auto it = e.ws.morphisms.find(n);
  if (it == e.ws.morphisms.end())
    throw UsageError("unknown morphism '" + n + "' in the workspace");
  return it->second;
}

inline const RealizerDatum& ws_datum(const Effective& e,
                                     const std::string& n) {
  auto it = e.ws.data.find(n);
  if (it == e.ws.data.end())
    throw UsageError("unknown datum '" + n + "' in the workspace");
  return it->second;
}

// Evaluate an application tree over the instance, innermost first.
inline ApplyResult eval_tree(const PcaInstance& pca, const TermPtr& t,
                             Fuel fuel) {
  if (t->kind() != TermKind::App) return ApplyResult::defined(t);
  ApplyResult f = eval_tree(pca, t->fn(), fuel);
  if (!f.ok()) return f;
  ApplyResult a = eval_tree(pca, t->arg(), fuel);
  if (!a.ok()) return a;
  return pca.apply(f.value, a.value, fuel);
}

// A normal form whose leaves are all singleton constants can be read back
// and evaluated in the instance; a residual variable or abstraction cannot.
inline bool constant_grounded(const LamPtr& t) {
  switch (t->kind()) {
    case LamKind::Con:
      return t->con_singleton();
    case LamKind::App:
      return constant_grounded(t->fn()) && constant_grounded(t->arg());
    default:
      return false;
  }
}

inline TermPtr grounded_term(const LamPtr& t) {
  if (t->kind() == LamKind::Con) return t->con_values()[0];
  return Term::app(grounded_term(t->fn()), grounded_term(t->arg()));
}

// Compare a beta-reduced source application against the value the compiled
// combinator produced.  When the normal form is built from constants alone,
// read it back and evaluate it in the instance, then compare values exactly.
// Otherwise conversion treats embedded values as opaque atoms, so only a
// positive conversion verdict is conclusive.
inline Tri sample_agreement(const PcaInstance& pca, const LamPtr& source,
                            const TermPtr& engine_value, Fuel fuel) {
  std::optional<LamPtr> nf = normalize(source, fuel);
  if (nf && constant_grounded(*nf)) {
    ApplyResult oracle = eval_tree(pca, grounded_term(*nf), fuel);
    if (!oracle.ok()) return Tri::Unknown;
    return term_eq(oracle.value, engine_value) ? Tri::Yes : Tri::No;
  }
  Tri conv = converts(source, LambdaTerm::con_term(engine_value), fuel);
  return conv == Tri::Yes ? Tri::Yes : Tri::Unknown;
}

// ---------------------------------------------------------------------------
// Subcommands.

inline int cmd_eval(const CliOptions& o, std::ostream& out,
                    std::ostream& err) {
  Effective e = settle(o, 8);
  const std::string& text = need_arg(o, 0, "a term to evaluate");
  no_extra_args(o, 1);
  TermPtr t;
  try {
    t = parse_term(text);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("bad term: ") + ex.what());
  }
  ApplyResult r = eval_tree(e.pca(), t, e.fuel());
  Json j = new_report("eval", e);
  j["input"] = print_term(t);
  j["status"] = status_word(r.status);
  if (r.ok()) j["value"] = print_term(r.value);
  std::string summary = std::string("eval: ") + status_word(r.status) +
                        (r.ok() ? " " + print_term(r.value) : "");
  int code = r.status == ApplyResult::Status::Defined ? 0
             : r.status == ApplyResult::Status::Stuck ? 1
                                                      : 2;
  return emit(out, err, j, summary, o.json_only, code);
}

inline int cmd_compile(const CliOptions& o, std::ostream& out,
                       std::ostream& err) {
  Effective e = settle(o, 8);
  const std::string& text = need_arg(o, 0, "a lambda term to compile");
  no_extra_args(o, 1);
  LamPtr lam;
  TermPtr comb;
  try {
    lam = parse_lambda(text);
    comb = bracket_abstract(lam);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("bad lambda term: ") + ex.what());
  }
  int arity = 0;
  for (LamPtr b = lam; b->kind() == LamKind::Abs; b = b->body()) ++arity;

  Json samples = Json::array();
  Tri acc = Tri::Yes;
  const PcaInstance& pca = e.pca();
  Fuel fuel = e.fuel();
  if (arity == 0) {
    // A closed application: evaluate both the combinator and the source.
    ApplyResult r = eval_tree(pca, comb, fuel);
    Json s;
    s["arguments"] = Json::array();
    s["status"] = status_word(r.status);
    Tri ag = Tri::Unknown;
    if (r.ok()) {
      s["value"] = print_term(r.value);
      ag = sample_agreement(pca, lam, r.value, fuel);
    }
    s["agreement"] = tri_word(ag);
    acc = ag;
    samples.push_back(std::move(s));
  } else if (arity <= 3) {
    std::vector<TermPtr> pool = pca.enumerate(1);
    std::vector<std::vector<TermPtr>> tuples{{}};
    for (int k = 0; k < arity; ++k) {
      std::vector<std::vector<TermPtr>> next;
      for (const auto& tup : tuples)
        for (const auto& a : pool) {
          next.push_back(tup);
          next.back().push_back(a);
        }
      tuples = std::move(next);
    }
    for (const auto& tup : tuples) {
      ApplyResult r = pca.apply_chain(comb, tup, fuel);
      Json s;
      Json args = Json::array();
      LamPtr applied = lam;
      for (const auto& a : tup) {
        args.push_back(print_term(a));
        applied = LambdaTerm::app(applied, LambdaTerm::con_term(a));
      }
      s["arguments"] = std::move(args);
      s["status"] = status_word(r.status);
      Tri ag = Tri::Unknown;
      if (r.status == ApplyResult::Status::Stuck) {
        // The source must get stuck as well for the laws to agree; the
        // beta side cannot witness that, so report unknown.
        ag = Tri::Unknown;
      } else if (r.ok()) {
        s["value"] = print_term(r.value);
        ag = sample_agreement(pca, applied, r.value, fuel);
      }
      s["agreement"] = tri_word(ag);
      acc = tri_and(acc, ag);
      samples.push_back(std::move(s));
    }
  } else {
    acc = Tri::Unknown;
  }

  Json j = new_report("compile", e);
  j["input"] = print_lambda(lam);
  j["combinator"] = print_term(comb);
  j["arity"] = arity;
  j["samples"] = std::move(samples);
  if (arity > 3) j["note"] = "arity above the sampling depth";
  j["status"] = tri_word(acc);
  std::string summary = "compile: " + print_term(comb) + " (samples " +
                        tri_word(acc) + ")";
  return emit(out, err, j, summary, o.json_only, tri_exit(acc));
}

inline int cmd_pca_check(const CliOptions& o, std::ostream& out,
                         std::ostream& err) {
  Effective e = settle(o, 2);
  no_extra_args(o, 0);
  // The law check is cubic in the enumeration, so cap the size bound.
  int requested = e.bound();
  int size_bound = requested > 4 ? 4 : requested;
  CheckReport rep = check_combinatory_complete(e.pca(), e.filter, e.fuel(),
                                               size_bound, e.search());
  Json j = new_report("pca-check", e, true);
  j["parameters"]["bound"] = size_bound;
  if (size_bound != requested) j["parameters"]["bound_requested"] = requested;
  j["checks"] = check_report_json(rep);
  Tri overall = rep.overall();
  j["status"] = tri_word(overall);
  std::size_t ok = 0;
  for (const auto& l : rep.lines)
    if (l.status == Tri::Yes) ++ok;
  std::string summary = std::string("pca-check: ") + tri_word(overall) + " (" +
                        std::to_string(ok) + "/" +
                        std::to_string(rep.lines.size()) + " checks)";
  return emit(out, err, j, summary, o.json_only, tri_exit(overall));
}

inline int cmd_asm(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const std::string& verb = need_arg(o, 0, "one of: track, limits, factorize");
  Effective e = settle(o, 8);
  if (verb == "track") {
    const std::string& name = need_arg(o, 1, "a morphism name");
    no_extra_args(o, 2);
    const TrackedMorphism& f = ws_morphism(e, name);
    Tri ok = verify_tracks(e.pca(), f.tracker, f.map, f.src, f.dst, e.fuel());
    Json j = new_report("asm track", e);
    j["morphism"] = name;
    j["detail"] = morphism_json(f);
    j["status"] = tri_word(ok);
    std::string summary = "asm track: " + std::string(tri_word(ok)) +
                          " (tracker " + print_term(f.tracker) + ")";
    return emit(out, err, j, summary, o.json_only, tri_exit(ok));
  }
  if (verb == "limits") {
    const std::string& an = need_arg(o, 1, "an assembly name");
    const std::string& bn = need_arg(o, 2, "an assembly name");
    no_extra_args(o, 3);
    const Assembly& a = ws_assembly(e, an);
    const Assembly& b = ws_assembly(e, bn);
    Json j = new_report("asm limits", e);
    Tri status = Tri::Yes;
    try {
      Assembly one = asm_terminal(e.pca());
      TrackedMorphism bang = asm_bang(e.pca(), a, e.fuel());
      AsmProductResult prod = asm_product(e.pca(), a, b, e.fuel());
      j["terminal"] = assembly_json(one);
      j["bang"] = morphism_json(bang);
      Json p;
      p["object"] = assembly_json(prod.obj);
      p["proj1"] = morphism_json(prod.proj1);
      p["proj2"] = morphism_json(prod.proj2);
      j["product"] = std::move(p);
    } catch (const std::exception& ex) {
      status = Tri::No;
      j["error"] = ex.what();
    }
    j["status"] = tri_word(status);
    return emit(out, err, j,
                "asm limits: " + std::string(tri_word(status)), o.json_only,
                tri_exit(status));
  }
  if (verb == "factorize") {
    const std::string& name = need_arg(o, 1, "a morphism name");
    no_extra_args(o, 2);
    const TrackedMorphism& f = ws_morphism(e, name);
    Json j = new_report("asm factorize", e, true);
    j["morphism"] = name;
    Tri epi_status = Tri::Unknown;
    try {
      AsmImageFactorization fact = image_factorize(e.pca(), f, e.fuel());
      j["image"] = assembly_json(fact.epi.dst);
      j["epi"] = morphism_json(fact.epi);
      j["mono"] = morphism_json(fact.mono);
      epi_status =
          is_regular_epi(e.pca(), fact.epi, e.filter, e.search(), e.fuel());
      j["regular_epi"] = tri_word(epi_status);
    } catch (const std::exception& ex) {
      epi_status = Tri::No;
      j["error"] = ex.what();
    }
    j["status"] = tri_word(epi_status);
    return emit(out, err, j,
                "asm factorize: regular epi " +
                    std::string(tri_word(epi_status)),
                o.json_only, tri_exit(epi_status));
  }
  throw UsageError("unknown asm verb '" + verb +
                   "'; expected track, limits, or factorize");
}

inline int cmd_sub(const CliOptions& o, std::ostream& out, std::ostream& err) {
  const std::string& verb = need_arg(o, 0, "one of: meet, join, impl, rleq");
  Effective e = settle(o, 8);
  const std::string& un = need_arg(o, 1, "a datum name");
  const std::string& vn = need_arg(o, 2, "a datum name");
  no_extra_args(o, 3);
  const RealizerDatum& u = ws_datum(e, un);
  const RealizerDatum& v = ws_datum(e, vn);
  const PcaInstance& pca = e.pca();
  Fuel fuel = e.fuel();
  int sample = e.search();

  if (verb == "rleq") {
    auto w = rleq(pca, u, v, e.filter, fuel, e.search());
    Json j = new_report("sub rleq", e, true);
    j["left"] = un;
    j["right"] = vn;
    j["witness"] = w ? Json(print_term(w->realizer)) : Json(nullptr);
    j["status"] = w ? "pass" : "not-found";
    std::string summary =
        w ? "sub rleq: witness " + print_term(w->realizer)
          : std::string("sub rleq: NOT-FOUND");
    return emit(out, err, j, summary, o.json_only, w ? 0 : 2);
  }

  Json j;
  RealizerDatum result;
  if (verb == "meet") {
    j = new_report("sub meet", e);
    result = meet_otimes(pca, u, v, fuel);
  } else if (verb == "join") {
    j = new_report("sub join", e);
    result = join_oplus(pca, u, v, fuel);
  } else if (verb == "impl") {
    j = new_report("sub impl", e);
    result = impl_datum(u, v);
  } else {
    throw UsageError("unknown sub verb '" + verb +
                     "'; expected meet, join, impl, or rleq");
  }
  j["left"] = datum_json(pca, u, fuel, sample);
  j["right"] = datum_json(pca, v, fuel, sample);
  j["result"] = datum_json(pca, result, fuel, sample);
  j["status"] = "pass";
  return emit(out, err, j, "sub " + verb + ": pass", o.json_only, 0);
}

inline int cmd_realize(const CliOptions& o, std::ostream& out,
                       std::ostream& err) {
  Effective e = settle(o, 16);
  const std::string& text = need_arg(o, 0, "a formula or formula name");
  no_extra_args(o, 1);
  FormulaPtr p;
  auto named = e.ws.formulas.find(text);
  if (named != e.ws.formulas.end()) {
    p = named->second;
  } else {
    try {
      p = parse_formula(text, e.ws.logic);
    } catch (const std::exception& ex) {
      throw UsageError(std::string("bad formula: ") + ex.what());
    }
  }
  // Seed the search with the identity so the canonical witness of a trivial
  // formula is the identity combinator.
  AgreementReport rep;
  {
    const PcaInstance& pca = e.pca();
    RealizerDatum truth = tarski_truth(pca, p, e.fuel(), e.bound());
    RealizerTable top_cell;
    top_cell["*"] = {pca.k_elem};
    RealizerDatum top1 = finitary_datum(terminal(), std::move(top_cell));
    std::vector<TermPtr> extras = {identity_witness(pca)};
    for (const auto& t :
         witness_pool(pca, p, e.fuel(), e.search(), {}))
      extras.push_back(t);
    if (pca.name == "sk") {
      std::size_t n = extras.size();
      for (std::size_t i = 0; i < n; ++i)
        extras.push_back(Term::app(Term::k(), extras[i]));
    }
    rep.fuel = e.fuel();
    rep.search_bound = e.search();
    rep.refl_bound = e.bound();
    auto wt = rleq(pca, top1, truth, e.filter, e.fuel(), e.search(), extras);
    if (wt) rep.tarski_witness = wt->realizer;
    rep.satisfies_witness = satisfies(pca, p, e.filter, e.fuel(), e.search(),
                                      {identity_witness(pca)});
    bool a = rep.satisfies_witness.has_value();
    bool b = rep.tarski_witness.has_value();
    rep.agreement = (a == b) ? "agree" : "unknown";
  }
  Json j = new_report("realize", e, true);
  j["formula"] = print_formula(p);
  j["witness"] = rep.satisfies_witness
                     ? Json(print_term(*rep.satisfies_witness))
                     : Json(nullptr);
  j["tarski"] = rep.tarski_witness ? Json(print_term(*rep.tarski_witness))
                                   : Json(nullptr);
  j["agreement"] = rep.agreement;
  int code;
  std::string summary;
  if (rep.satisfies_witness) {
    code = 0;
    summary = "realize: witness " + print_term(*rep.satisfies_witness);
  } else if (rep.agreement == "agree") {
    code = 1;
    summary = "realize: no witness (agreement agree)";
  } else {
    code = 2;
    summary = "realize: no witness (agreement unknown)";
  }
  j["status"] = code == 0 ? "pass" : (code == 1 ? "fail" : "unknown");
  return emit(out, err, j, summary, o.json_only, code);
}

// Samples for the reconstruction commands: the workspace assemblies in
// declaration order, or the value object itself when none are declared.
inline std::vector<Assembly> situation_samples(
    const Effective& e, const RealizabilitySituation& sit) {
  std::vector<Assembly> out;
  for (const auto& n : e.ws.assembly_order)
    out.push_back(e.ws.assemblies.at(n));
  if (out.empty()) out.push_back(sit.C);
  return out;
}

inline std::vector<TrackedMorphism> situation_maps(const Effective& e) {
  std::vector<TrackedMorphism> out;
  for (const auto& n : e.ws.morphism_order)
    out.push_back(e.ws.morphisms.at(n));
  return out;
}

inline int cmd_axioms(const CliOptions& o, std::ostream& out,
                      std::ostream& err) {
  if (!o.workspace_path) throw UsageError("axioms needs --workspace");
  Effective e = settle(o, 8);
  no_extra_args(o, 0);
  RealizabilitySituation sit =
      self_situation(e.pca(), e.bound(), e.search(), e.fuel());
  std::vector<Assembly> samples = situation_samples(e, sit);
  std::vector<TrackedMorphism> maps = situation_maps(e);

  Json j = new_report("axioms", e);
  Tri overall = Tri::Yes;

  SeparabilityReport sep = check_separability(sit, samples, maps);
  {
    Json s;
    s["status"] = tri_word(sep.ok());
    s["items"] = items_json(sep.items);
    j["separation"] = std::move(s);
    overall = tri_and(overall, sep.ok());
  }

  std::optional<GenericitySpan> first_span;
  std::optional<Assembly> first_target;
  {
    Tri gen_all = Tri::Yes;
    Json objects = Json::array();
    for (const auto& x : samples) {
      Json entry;
      entry["object"] = x.name;
      std::vector<CheckItem> items;
      try {
        GenericitySpan span = weak_genericity_span(x, sit);
        items.push_back({"span constructed", Tri::Yes,
                         std::to_string(span.obj.carrier.size()) +
                             " relation points"});
        items.push_back({"prone certificate",
                         span.prone_cert ? Tri::Yes : Tri::No, ""});
        items.push_back({"cover regularly epic", span.cover_regular_epi, ""});
        items.push_back({"legs jointly monic",
                         span.jointly_monic ? Tri::Yes : Tri::No, ""});
        if (!first_span) {
          first_span = span;
          first_target = x;
        }
      } catch (const std::exception& ex) {
        items.push_back({"span constructed", Tri::No, ex.what()});
      }
      Tri t = all_items(items);
      entry["status"] = tri_word(t);
      entry["items"] = items_json(items);
      gen_all = tri_and(gen_all, t);
      objects.push_back(std::move(entry));
    }
    Json g;
    g["status"] = tri_word(gen_all);
    g["objects"] = std::move(objects);
    j["genericity"] = std::move(g);
    overall = tri_and(overall, gen_all);
  }

  {
    Json t;
    if (first_span) {
      TrackingInstance inst = instance_from_span(*first_span, *first_target);
      TrackingReport rep = tracking_axiom_check(inst, sit);
      t["status"] = tri_word(rep.ok());
      t["items"] = items_json(rep.items);
      Json w;
      if (rep.map_tracker) w["map_tracker"] = print_term(*rep.map_tracker);
      if (rep.leg_tracker) w["leg_tracker"] = print_term(*rep.leg_tracker);
      if (rep.composite) w["composite"] = print_term(*rep.composite);
      if (rep.truncated_witness)
        w["truncated_witness"] = print_term(*rep.truncated_witness);
      if (rep.factor_tracker)
        w["factor_tracker"] = print_term(*rep.factor_tracker);
      t["witnesses"] = std::move(w);
      overall = tri_and(overall, rep.ok());
    } else {
      t["status"] = tri_word(Tri::No);
      t["note"] = "no genericity span available to instantiate the axiom";
      overall = tri_and(overall, Tri::No);
    }
    j["tracking"] = std::move(t);
  }

  j["status"] = tri_word(overall);
  std::string summary =
      std::string("axioms: ") + tri_word(overall) + " (separation " +
      passed_of(sep.items) + ")";
  return emit(out, err, j, summary, o.json_only, tri_exit(overall));
}

inline int cmd_reconstruct(const CliOptions& o, std::ostream& out,
                           std::ostream& err) {
  if (!o.workspace_path) throw UsageError("reconstruct needs --workspace");
  Effective e = settle(o, 8);
  no_extra_args(o, 0);
  RealizabilitySituation sit =
      self_situation(e.pca(), e.bound(), e.search(), e.fuel());
  std::vector<Assembly> samples = situation_samples(e, sit);
  std::vector<TrackedMorphism> maps = situation_maps(e);
  EquivalenceReport rep = equivalence_check(sit, samples, maps);

  Json j = new_report("reconstruct", e);
  j["aborted"] = rep.aborted;
  if (rep.aborted) j["failing_axiom"] = rep.failing_axiom;
  j["items"] = items_json(rep.items);
  Tri t = rep.ok();
  j["status"] = tri_word(t);
  std::string summary =
      rep.aborted
          ? "reconstruct: fail (aborted at " + rep.failing_axiom + ")"
          : std::string("reconstruct: ") + tri_word(t) + " (" +
                passed_of(rep.items) + " checks)";
  return emit(out, err, j, summary, o.json_only, tri_exit(t));
}

inline const char* usage_text() {
  return "usage: asmcat <command> [args] [flags]\n"
         "commands:\n"
         "  eval <term>                  evaluate an application tree\n"
         "  compile <lambda>             bracket-abstract a lambda term\n"
         "  pca-check                    combinatory completeness report\n"
         "  asm track <f>                re-verify a workspace morphism\n"
         "  asm limits <X> <Y>           terminal and binary product\n"
         "  asm factorize <f>            image factorization of a morphism\n"
         "  sub meet|join|impl <U> <V>   Heyting operations on data\n"
         "  sub rleq <U> <V>             evidence preorder witness search\n"
         "  realize <formula>            realizability vs Tarski truth\n"
         "  axioms                       situation axioms over a workspace\n"
         "  reconstruct                  equivalence report over a workspace\n"
         "flags: --fuel N --search N --bound N --seed N\n"
         "       --filter inh|rel:<name>|and:<a>,<b>|trivial\n"
         "       --workspace FILE --pca sk|numeric|trivial --json\n";
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using namespace cli_detail;
  try {
    if (args.empty())
      throw UsageError("missing command");
    std::string cmd = args[0];
    CliOptions o =
        parse_options(std::vector<std::string>(args.begin() + 1, args.end()));
    if (cmd == "eval") return cmd_eval(o, out, err);
    if (cmd == "compile") return cmd_compile(o, out, err);
    if (cmd == "pca-check") return cmd_pca_check(o, out, err);
    if (cmd == "asm") return cmd_asm(o, out, err);
    if (cmd == "sub") return cmd_sub(o, out, err);
    if (cmd == "realize") return cmd_realize(o, out, err);
    if (cmd == "axioms") return cmd_axioms(o, out, err);
    if (cmd == "reconstruct") return cmd_reconstruct(o, out, err);
    throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << cli_detail::usage_text();
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out,
                   std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace asmcat
