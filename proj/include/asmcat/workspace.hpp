#pragma once

// Workspace files: a line-oriented declaration format naming the applicative
// instance, default bounds, and a dictionary of carriers, maps, assemblies,
// tracked morphisms, realizer data, relations, and formulas.  Loading
// resolves every cross-reference and re-verifies every declared tracker, so
// a workspace that loads is internally consistent.

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "logic.hpp"
#include "reconstruct.hpp"

namespace asmcat {

struct Workspace {
  PcaInstance pca = sk_pca();
  Fuel fuel{256};
  int search = 24;
  int bound = 8;
  std::uint64_t seed = 1;

  std::map<std::string, FinObject> objects;
  std::map<std::string, FinMap> maps;
  std::map<std::string, Assembly> assemblies;
  std::map<std::string, TrackedMorphism> morphisms;
  std::map<std::string, RealizerDatum> data;
  std::map<std::string, FormulaPtr> formulas;
  std::map<std::string, std::string> formula_text;

  // Declaration order, for reports that should follow the file.
  std::vector<std::string> object_order, map_order, assembly_order,
      morphism_order, datum_order, formula_order;

  // Formula-language view of the declarations above.
  LogicContext logic;
};

namespace detail {

// One pass over the file with line tracking.  A '#' starts a comment only
// when it stands alone: preceded by start-of-line or whitespace and followed
// by whitespace or end-of-line.  This keeps atom values such as `#a` usable
// inside realizer lists.
class WorkspaceParser {
 public:
  explicit WorkspaceParser(std::string text) : text_(std::move(text)) {}

  Workspace parse() {
    Workspace ws;
    skip();
    while (!at_end()) {
      statement(ws);
      skip();
    }
    return ws;
  }

 private:
  std::string text_;
  std::size_t i_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("workspace line " + std::to_string(line_) + ": " +
                             msg);
  }

  bool at_end() const { return i_ >= text_.size(); }
  char peek() const { return text_[i_]; }

  void advance() {
    if (text_[i_] == '\n') ++line_;
    ++i_;
  }

  bool comment_starts_here() const {
    if (text_[i_] != '#') return false;
    bool before_ok = i_ == 0 || text_[i_ - 1] == ' ' || text_[i_ - 1] == '\t' ||
                     text_[i_ - 1] == '\n';
    bool after_ok = i_ + 1 >= text_.size() || text_[i_ + 1] == ' ' ||
                    text_[i_ + 1] == '\t' || text_[i_ + 1] == '\n' ||
                    text_[i_ + 1] == '\r';
    return before_ok && after_ok;
  }

  void skip() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (comment_starts_here()) {
        while (!at_end() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  // Horizontal whitespace only: used where a construct must stay on one line.
  void skip_inline() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) advance();
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '\'' || c == '-';
  }

  std::string ident() {
    skip();
    std::size_t start = i_;
    while (!at_end() && ident_char(peek())) advance();
    if (i_ == start) fail("expected a name");
    return text_.substr(start, i_ - start);
  }

  void expect(char c) {
    skip();
    if (at_end() || peek() != c)
      fail(std::string("expected '") + c + "'");
    advance();
  }

  bool eat(char c) {
    skip();
    if (!at_end() && peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  bool eat_word(const std::string& w) {
    skip();
    if (text_.compare(i_, w.size(), w) == 0 &&
        (i_ + w.size() >= text_.size() || !ident_char(text_[i_ + w.size()]))) {
      for (std::size_t k = 0; k < w.size(); ++k) advance();
      return true;
    }
    return false;
  }

  void expect_word(const std::string& w) {
    if (!eat_word(w)) fail("expected '" + w + "'");
  }

  long long integer() {
    skip();
    std::size_t start = i_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
      advance();
    if (i_ == start) fail("expected a number");
    return std::stoll(text_.substr(start, i_ - start));
  }

  // An element name: either a balanced parenthesised pair name such as
  // `(a,0)`, the point `*`, or a plain identifier.
  std::string element() {
    skip();
    if (at_end()) fail("expected an element name");
    if (peek() == '*') {
      advance();
      return "*";
    }
    if (peek() == '(') {
      std::size_t start = i_;
      int depth = 0;
      while (!at_end()) {
        char c = peek();
        if (c == '(') ++depth;
        if (c == ')') {
          --depth;
          advance();
          if (depth == 0) return text_.substr(start, i_ - start);
          continue;
        }
        if (c == '\n') fail("unterminated '(' in an element name");
        advance();
      }
      fail("unterminated '(' in an element name");
    }
    return ident();
  }

  // Raw text up to a delimiter at paren depth zero; used for value terms.
  std::string raw_until(const std::string& delims) {
    skip();
    std::size_t start = i_;
    int depth = 0;
    while (!at_end()) {
      char c = peek();
      if (c == '\n') break;
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) break;  // an unmatched ')' belongs to the block
        --depth;
      }
      if (depth == 0 && delims.find(c) != std::string::npos) break;
      advance();
    }
    std::string out = text_.substr(start, i_ - start);
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t' ||
                            out.back() == '\r'))
      out.pop_back();
    return out;
  }

  std::string rest_of_line() {
    skip_inline();
    std::size_t start = i_;
    while (!at_end() && peek() != '\n') {
      if (comment_starts_here()) break;
      advance();
    }
    std::string out = text_.substr(start, i_ - start);
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t' ||
                            out.back() == '\r'))
      out.pop_back();
    return out;
  }

  TermPtr value_term(const std::string& raw) {
    if (raw.empty()) fail("expected a value term");
    try {
      return parse_term(raw);
    } catch (const std::exception& e) {
      fail("bad term '" + raw + "': " + e.what());
    }
  }

  // `{ a, b, c }` — possibly empty.
  std::vector<std::string> element_list() {
    expect('{');
    std::vector<std::string> out;
    if (eat('}')) return out;
    out.push_back(element());
    while (eat(',')) out.push_back(element());
    expect('}');
    return out;
  }

  // `{ a: u, b: v }` — possibly empty.
  std::map<std::string, std::string> pair_block() {
    expect('{');
    std::map<std::string, std::string> out;
    if (eat('}')) return out;
    while (true) {
      std::string key = element();
      expect(':');
      std::string val = element();
      if (!out.emplace(key, val).second)
        fail("duplicate entry for '" + key + "'");
      if (eat(',')) continue;
      expect('}');
      return out;
    }
  }

  // `{ a: [K, S K K], b: [] }` — realizer cells.
  RealizerTable cell_block() {
    expect('{');
    RealizerTable out;
    if (eat('}')) return out;
    while (true) {
      std::string key = element();
      expect(':');
      expect('[');
      std::vector<TermPtr> cell;
      skip();
      if (!eat(']')) {
        while (true) {
          cell.push_back(value_term(raw_until(",]")));
          if (eat(',')) continue;
          expect(']');
          break;
        }
      }
      if (!out.emplace(key, std::move(cell)).second)
        fail("duplicate cell for '" + key + "'");
      if (eat(',')) continue;
      expect('}');
      return out;
    }
  }

  const Assembly& assembly_ref(const Workspace& ws, const std::string& name) {
    auto it = ws.assemblies.find(name);
    if (it == ws.assemblies.end()) fail("unknown assembly '" + name + "'");
    return it->second;
  }

  void fresh_name(const Workspace& ws, const std::string& name) {
    if (ws.objects.count(name) || ws.maps.count(name) ||
        ws.assemblies.count(name) || ws.morphisms.count(name) ||
        ws.data.count(name) || ws.formulas.count(name) ||
        ws.logic.relations.count(name))
      fail("the name '" + name + "' is already declared");
  }

  void statement(Workspace& ws) {
    int at_line = line_;
    std::string kw = ident();
    try {
      if (kw == "pca") {
        std::string which = ident();
        if (which == "sk")
          ws.pca = sk_pca();
        else if (which == "numeric")
          ws.pca = numeric_pca();
        else if (which == "trivial")
          ws.pca = trivial_pca();
        else
          fail("unknown instance '" + which +
               "' (expected sk, numeric, or trivial)");
      } else if (kw == "fuel") {
        ws.fuel = Fuel{static_cast<std::uint32_t>(integer())};
      } else if (kw == "search") {
        ws.search = static_cast<int>(integer());
      } else if (kw == "bound") {
        ws.bound = static_cast<int>(integer());
      } else if (kw == "seed") {
        ws.seed = static_cast<std::uint64_t>(integer());
      } else if (kw == "object") {
        std::string name = ident();
        fresh_name(ws, name);
        expect('=');
        ws.objects.emplace(name, FinObject(element_list()));
        ws.object_order.push_back(name);
      } else if (kw == "map") {
        std::string name = ident();
        fresh_name(ws, name);
        expect(':');
        std::string sn = ident();
        expect('-');
        expect('>');
        std::string dn = ident();
        auto si = ws.objects.find(sn);
        if (si == ws.objects.end()) fail("unknown object '" + sn + "'");
        auto di = ws.objects.find(dn);
        if (di == ws.objects.end()) fail("unknown object '" + dn + "'");
        ws.maps.emplace(name,
                        FinMap(si->second, di->second, pair_block()));
        ws.map_order.push_back(name);
      } else if (kw == "assembly") {
        std::string name = ident();
        fresh_name(ws, name);
        expect_word("on");
        skip();
        FinObject carrier;
        if (!at_end() && peek() == '{') {
          carrier = FinObject(element_list());
        } else {
          std::string on = ident();
          auto oi = ws.objects.find(on);
          if (oi == ws.objects.end()) fail("unknown object '" + on + "'");
          carrier = oi->second;
        }
        Assembly a = make_assembly(name, std::move(carrier), cell_block());
        ws.logic.sorts.emplace(name, a);
        ws.assemblies.emplace(name, std::move(a));
        ws.assembly_order.push_back(name);
      } else if (kw == "morphism") {
        std::string name = ident();
        fresh_name(ws, name);
        expect(':');
        const Assembly& src = assembly_ref(ws, ident());
        expect('-');
        expect('>');
        const Assembly& dst = assembly_ref(ws, ident());
        expect_word("map");
        FinMap m(src.carrier, dst.carrier, pair_block());
        expect_word("tracker");
        skip();
        TermPtr tr;
        if (eat_word("auto")) {
          auto found = find_tracker(ws.pca, m, src, dst, Filter::inhabited(),
                                    ws.search, ws.fuel);
          if (!found)
            fail("no tracker found for morphism '" + name +
                 "' at search bound " + std::to_string(ws.search));
          tr = *found;
        } else {
          tr = value_term(rest_of_line());
        }
        TrackedMorphism f = tracked(ws.pca, src, dst, m, tr, ws.fuel);
        ws.logic.morphisms.emplace(name, f);
        ws.morphisms.emplace(name, std::move(f));
        ws.morphism_order.push_back(name);
      } else if (kw == "datum") {
        std::string name = ident();
        fresh_name(ws, name);
        expect_word("on");
        const Assembly& on = assembly_ref(ws, ident());
        ws.data.emplace(name, finitary_datum(on.carrier, cell_block()));
        ws.datum_order.push_back(name);
      } else if (kw == "relation") {
        std::string name = ident();
        fresh_name(ws, name);
        expect('(');
        std::vector<Assembly> sorts;
        if (!eat(')')) {
          sorts.push_back(assembly_ref(ws, ident()));
          while (eat(',')) sorts.push_back(assembly_ref(ws, ident()));
          expect(')');
        }
        RealizerDatum d =
            finitary_datum(sorts_carrier(sorts), cell_block());
        ws.logic.relations.emplace(name,
                                   LogicContext::Rel{std::move(d), sorts});
      } else if (kw == "formula") {
        std::string name = ident();
        fresh_name(ws, name);
        expect('=');
        std::string body = rest_of_line();
        if (body.empty()) fail("expected a formula body");
        ws.formulas.emplace(name, parse_formula(body, ws.logic));
        ws.formula_text.emplace(name, body);
        ws.formula_order.push_back(name);
      } else {
        fail("unknown declaration '" + kw + "'");
      }
    } catch (const std::invalid_argument& e) {
      // Re-anchor module validation errors to the declaration's line.
      throw std::runtime_error("workspace line " + std::to_string(at_line) +
                               ": " + e.what());
    }
  }
};

}  // namespace detail

inline Workspace parse_workspace(const std::string& text) {
  return detail::WorkspaceParser(text).parse();
}

}  // namespace asmcat
