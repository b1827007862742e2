#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "surfclass/atlas.hpp"
#include "surfclass/exhaustion.hpp"
#include "surfclass/moebius.hpp"
#include "surfclass/schoenflies.hpp"
#include "surfclass/simplicial.hpp"

namespace surfclass {

// Line-oriented text formats for every input kind the command-line tool
// accepts. Files open with a kind word (complex / recipe / atlas /
// boundarymap / moebius); bodies whose first line is unambiguous (complex,
// moebius) may omit it. '#' starts a comment, blank lines are ignored.

struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& expected)
      : Error("parse error at line " + std::to_string(line_) + ": expected " + expected),
        line(line_) {}
};

struct KindMismatch : Error {
  KindMismatch(const std::string& want, const std::string& got)
      : Error("kind mismatch: wanted '" + want + "', file declares '" + got + "'") {}
};

namespace detail {

struct Lines {
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line number + tokens
  size_t at = 0;

  explicit Lines(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int num = 0;
    while (std::getline(in, raw)) {
      ++num;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.resize(hash);
      std::istringstream ls(raw);
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (!toks.empty()) rows.push_back({num, std::move(toks)});
    }
  }
  bool done() const { return at >= rows.size(); }
  const std::vector<std::string>& peek() const { return rows[at].second; }
  int line() const { return done() ? (rows.empty() ? 1 : rows.back().first + 1) : rows[at].first; }
  const std::vector<std::string>& take() { return rows[at++].second; }
};

inline int parse_int(const std::string& tok, int line) {
  try {
    size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "an integer, got '" + tok + "'");
  }
}

inline Rat parse_rat(const std::string& tok, int line) {
  std::optional<Rat> r = rat_parse(tok);
  if (!r) throw ParseError(line, "a rational 'p/q', got '" + tok + "'");
  return *r;
}

inline double parse_double(const std::string& tok, int line) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "a decimal number, got '" + tok + "'");
  }
}

inline std::string dbl_str(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Complex body: V / E / F lines until a terminator keyword (or the end).
// Downward closure is applied, so F and E lines imply their faces.
inline FiniteComplex2 complex_body(Lines& in, const std::vector<std::string>& stops) {
  FiniteComplex2 K;
  auto is_stop = [&](const std::string& w) {
    for (const std::string& s : stops)
      if (w == s) return true;
    return false;
  };
  while (!in.done()) {
    const auto& toks = in.peek();
    int line = in.line();
    if (is_stop(toks[0])) break;
    if (toks[0] == "V" && toks.size() == 2) {
      K.vertices.insert(parse_int(toks[1], line));
    } else if (toks[0] == "E" && toks.size() == 3) {
      int a = parse_int(toks[1], line), b = parse_int(toks[2], line);
      if (a == b) throw ParseError(line, "an edge with distinct endpoints");
      K.edges.insert(mk_edge(a, b));
      K.vertices.insert(a);
      K.vertices.insert(b);
    } else if (toks[0] == "F" && toks.size() == 4) {
      int a = parse_int(toks[1], line), b = parse_int(toks[2], line), c = parse_int(toks[3], line);
      if (a == b || b == c || a == c) throw ParseError(line, "a face with distinct corners");
      Tri t = mk_tri(a, b, c);
      K.triangles.insert(t);
      for (int i = 0; i < 3; ++i) {
        K.edges.insert(mk_edge(t[size_t(i)], t[size_t((i + 1) % 3)]));
        K.vertices.insert(t[size_t(i)]);
      }
    } else {
      throw ParseError(line, "'V i', 'E i j', or 'F i j k'");
    }
    in.take();
  }
  return K;
}

inline std::vector<int> parse_cycle(const std::vector<std::string>& toks, size_t from, int line) {
  if (toks.size() <= from) throw ParseError(line, "a vertex cycle");
  std::vector<int> out;
  for (size_t i = from; i < toks.size(); ++i) out.push_back(parse_int(toks[i], line));
  return out;
}

inline void complex_lines(std::ostringstream& out, const FiniteComplex2& K) {
  for (int v : K.vertices) out << "V " << v << "\n";
  for (const Edge& e : K.edges) out << "E " << e.first << " " << e.second << "\n";
  for (const Tri& t : K.triangles) out << "F " << t[0] << " " << t[1] << " " << t[2] << "\n";
}

inline void expect_word(Lines& in, const std::string& word) {
  if (in.done() || in.peek()[0] != word) throw ParseError(in.line(), "'" + word + "'");
  in.take();
}

inline std::vector<Point2> parse_point_row(const std::vector<std::string>& toks, size_t from,
                                           int line) {
  if ((toks.size() - from) % 2 != 0 || toks.size() - from < 6)
    throw ParseError(line, "an even list of at least 6 coordinates");
  std::vector<Point2> pts;
  for (size_t i = from; i + 1 < toks.size(); i += 2)
    pts.push_back({parse_rat(toks[i], line), parse_rat(toks[i + 1], line)});
  return pts;
}

}  // namespace detail

// ---- kind detection ---------------------------------------------------------

inline const std::vector<std::string>& format_kinds() {
  static const std::vector<std::string> kinds = {"complex", "recipe", "atlas", "boundarymap",
                                                 "moebius"};
  return kinds;
}

// The declared kind of a document: the opening kind word if present, else
// inferred from the first line ("V"/"E"/"F" lines mean a bare complex, a row
// of eight decimals a bare matrix list).
inline std::string sniff_kind(const std::string& text) {
  detail::Lines in(text);
  if (in.done()) throw ParseError(1, "a nonempty document");
  const auto& toks = in.peek();
  for (const std::string& k : format_kinds())
    if (toks[0] == k) return k;
  if (toks[0] == "V" || toks[0] == "E" || toks[0] == "F") return "complex";
  if (toks.size() == 8) {
    try {
      detail::parse_double(toks[0], in.line());
      return "moebius";
    } catch (const ParseError&) {
    }
  }
  throw ParseError(in.line(), "a kind header (" + [] {
    std::string all;
    for (const std::string& k : format_kinds()) all += (all.empty() ? "" : ", ") + k;
    return all;
  }() + ")");
}

namespace detail {

// Consumes the kind header if present; bare bodies are allowed only for the
// kinds whose first line cannot be confused with anything else.
inline void take_header(Lines& in, const std::string& want) {
  if (in.done()) throw ParseError(1, "a nonempty document");
  const std::string& head = in.peek()[0];
  for (const std::string& k : format_kinds()) {
    if (head != k) continue;
    if (k != want) throw KindMismatch(want, k);
    in.take();
    return;
  }
  if (want == "complex" || want == "moebius") return;  // bare body allowed
  throw ParseError(in.line(), "header '" + want + "'");
}

}  // namespace detail

// ---- complex ----------------------------------------------------------------

inline std::string complex_str(const FiniteComplex2& K) {
  std::ostringstream out;
  out << "complex\n";
  detail::complex_lines(out, K);
  return out.str();
}

inline FiniteComplex2 parse_complex(const std::string& text) {
  detail::Lines in(text);
  detail::take_header(in, "complex");
  FiniteComplex2 K = detail::complex_body(in, {});
  if (!in.done()) throw ParseError(in.line(), "'V i', 'E i j', or 'F i j k'");
  return K;
}

// ---- recipe -----------------------------------------------------------------

inline std::string recipe_str(const SurfaceRecipe& r) {
  std::ostringstream out;
  out << "recipe\n";
  if (r.kind == SurfaceRecipe::Explicit) {
    out << "explicit\n";
    for (const FiniteComplex2& p : r.view.pieces) {
      out << "piece\n";
      detail::complex_lines(out, p);
      out << "end\n";
    }
    return out.str();
  }
  out << "periodic\n";
  out << "base\n";
  detail::complex_lines(out, r.base);
  out << "end\n";
  for (const auto& [circle, rule] : r.base_outputs) {
    out << "baseout " << rule << " :";
    for (int v : circle) out << " " << v;
    out << "\n";
  }
  for (const auto& [name, block] : r.rules) {
    out << "rule " << name << "\n";
    detail::complex_lines(out, block.K);
    out << "end\n";
    out << "input";
    for (int v : block.input) out << " " << v;
    out << "\n";
    for (const auto& [circle, orule] : block.outputs) {
      out << "out " << orule << " :";
      for (int v : circle) out << " " << v;
      out << "\n";
    }
    out << "endrule\n";
  }
  return out.str();
}

inline SurfaceRecipe parse_recipe(const std::string& text) {
  detail::Lines in(text);
  detail::take_header(in, "recipe");
  if (in.done()) throw ParseError(in.line(), "'explicit' or 'periodic'");
  SurfaceRecipe r;
  std::string mode = in.take()[0];
  if (mode == "explicit") {
    r.kind = SurfaceRecipe::Explicit;
    while (!in.done()) {
      detail::expect_word(in, "piece");
      r.view.pieces.push_back(detail::complex_body(in, {"end"}));
      detail::expect_word(in, "end");
    }
    if (r.view.pieces.empty()) throw ParseError(in.line(), "at least one 'piece' section");
    return r;
  }
  if (mode != "periodic") throw ParseError(in.line(), "'explicit' or 'periodic'");
  r.kind = SurfaceRecipe::Periodic;
  detail::expect_word(in, "base");
  r.base = detail::complex_body(in, {"end"});
  detail::expect_word(in, "end");
  while (!in.done() && in.peek()[0] == "baseout") {
    const auto& toks = in.peek();
    int line = in.line();
    if (toks.size() < 3 || toks[2] != ":") throw ParseError(line, "'baseout <rule> : v0 v1 ...'");
    r.base_outputs.push_back({detail::parse_cycle(toks, 3, line), toks[1]});
    in.take();
  }
  while (!in.done()) {
    const auto& head = in.peek();
    int hline = in.line();
    if (head[0] != "rule" || head.size() != 2) throw ParseError(hline, "'rule <name>'");
    std::string name = head[1];
    in.take();
    AttachmentBlock block;
    block.K = detail::complex_body(in, {"end"});
    detail::expect_word(in, "end");
    if (in.done() || in.peek()[0] != "input") throw ParseError(in.line(), "'input v0 v1 ...'");
    block.input = detail::parse_cycle(in.peek(), 1, in.line());
    in.take();
    while (!in.done() && in.peek()[0] == "out") {
      const auto& toks = in.peek();
      int line = in.line();
      if (toks.size() < 3 || toks[2] != ":") throw ParseError(line, "'out <rule> : v0 v1 ...'");
      block.outputs.push_back({detail::parse_cycle(toks, 3, line), toks[1]});
      in.take();
    }
    detail::expect_word(in, "endrule");
    r.rules[name] = std::move(block);
  }
  return r;
}

// ---- atlas ------------------------------------------------------------------

inline std::string atlas_str(const PLAtlas& a) {
  std::ostringstream out;
  out << "atlas\n";
  auto poly_row = [&](const char* tag, const SimplePolygon& p) {
    out << tag;
    for (const Point2& q : p.v) out << " " << rat_str(q.x) << " " << rat_str(q.y);
    out << "\n";
  };
  for (const PolygonalRegion& chart : a.charts) {
    out << "chart\n";
    poly_row("outer", chart.outer);
    for (const SimplePolygon& h : chart.holes) poly_row("hole", h);
    out << "endchart\n";
  }
  for (const ChartGlue& g : a.glues) {
    out << "overlap " << g.i << " " << g.j << "\n";
    out << "transition\n";
    for (size_t k = 0; k < g.map.domain.points.size(); ++k) {
      const Point2& p = g.map.domain.points[k];
      const Point2& q = g.map.images[k];
      out << "point " << rat_str(p.x) << " " << rat_str(p.y) << " " << rat_str(q.x) << " "
          << rat_str(q.y) << "\n";
    }
    for (const auto& t : g.map.domain.triangles)
      out << "tri " << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (const auto& cyc : g.map.domain.boundary) {
      out << "cycle";
      for (int v : cyc) out << " " << v;
      out << "\n";
    }
    out << "orient " << g.map.orient << "\n";
    out << "endoverlap\n";
  }
  return out.str();
}

inline PLAtlas parse_atlas(const std::string& text) {
  detail::Lines in(text);
  detail::take_header(in, "atlas");
  PLAtlas a;
  while (!in.done() && in.peek()[0] == "chart") {
    in.take();
    PolygonalRegion chart;
    if (in.done() || in.peek()[0] != "outer")
      throw ParseError(in.line(), "'outer x0 y0 x1 y1 ...'");
    chart.outer.v = detail::parse_point_row(in.peek(), 1, in.line());
    in.take();
    while (!in.done() && in.peek()[0] == "hole") {
      SimplePolygon h;
      h.v = detail::parse_point_row(in.peek(), 1, in.line());
      chart.holes.push_back(std::move(h));
      in.take();
    }
    detail::expect_word(in, "endchart");
    a.charts.push_back(std::move(chart));
  }
  while (!in.done()) {
    const auto& head = in.peek();
    int hline = in.line();
    if (head[0] != "overlap" || head.size() != 3)
      throw ParseError(hline, "'overlap i j' or 'chart'");
    ChartGlue g;
    g.i = detail::parse_int(head[1], hline);
    g.j = detail::parse_int(head[2], hline);
    in.take();
    detail::expect_word(in, "transition");
    while (!in.done() && in.peek()[0] == "point") {
      const auto& toks = in.peek();
      int line = in.line();
      if (toks.size() != 5) throw ParseError(line, "'point x y u v'");
      g.map.domain.points.push_back(
          {detail::parse_rat(toks[1], line), detail::parse_rat(toks[2], line)});
      g.map.images.push_back(
          {detail::parse_rat(toks[3], line), detail::parse_rat(toks[4], line)});
      in.take();
    }
    while (!in.done() && in.peek()[0] == "tri") {
      const auto& toks = in.peek();
      int line = in.line();
      if (toks.size() != 4) throw ParseError(line, "'tri a b c'");
      g.map.domain.triangles.push_back({detail::parse_int(toks[1], line),
                                        detail::parse_int(toks[2], line),
                                        detail::parse_int(toks[3], line)});
      in.take();
    }
    while (!in.done() && in.peek()[0] == "cycle") {
      g.map.domain.boundary.push_back(detail::parse_cycle(in.peek(), 1, in.line()));
      in.take();
    }
    if (in.done() || in.peek()[0] != "orient" || in.peek().size() != 2)
      throw ParseError(in.line(), "'orient +-1'");
    g.map.orient = detail::parse_int(in.peek()[1], in.line());
    in.take();
    detail::expect_word(in, "endoverlap");
    int nv = int(g.map.domain.points.size());
    for (const auto& t : g.map.domain.triangles)
      for (int i = 0; i < 3; ++i)
        if (t[size_t(i)] < 0 || t[size_t(i)] >= nv)
          throw ParseError(hline, "triangle indices within the point list");
    a.glues.push_back(std::move(g));
  }
  return a;
}

// ---- boundary map -----------------------------------------------------------

inline std::string boundary_map_str(const BoundaryMap& g) {
  std::ostringstream out;
  out << "boundarymap\n";
  for (size_t i = 0; i < g.params.size(); ++i)
    out << "pair " << rat_str(g.params[i]) << " " << point_str(g.target.v[i]) << "\n";
  return out.str();
}

inline BoundaryMap parse_boundary_map(const std::string& text) {
  detail::Lines in(text);
  detail::take_header(in, "boundarymap");
  BoundaryMap g;
  while (!in.done()) {
    const auto& toks = in.peek();
    int line = in.line();
    if (toks[0] != "pair" || toks.size() != 4) throw ParseError(line, "'pair t x y'");
    g.params.push_back(detail::parse_rat(toks[1], line));
    g.target.v.push_back({detail::parse_rat(toks[2], line), detail::parse_rat(toks[3], line)});
    in.take();
  }
  if (g.params.empty()) throw ParseError(in.line(), "at least one 'pair t x y'");
  return g;
}

// ---- matrix list ------------------------------------------------------------

inline std::string matrix_list_str(const std::vector<MoebiusElement>& gens) {
  std::ostringstream out;
  out << "moebius\n";
  for (const MoebiusElement& g : gens) {
    out << detail::dbl_str(g.a.real()) << " " << detail::dbl_str(g.a.imag()) << " "
        << detail::dbl_str(g.b.real()) << " " << detail::dbl_str(g.b.imag()) << " "
        << detail::dbl_str(g.c.real()) << " " << detail::dbl_str(g.c.imag()) << " "
        << detail::dbl_str(g.d.real()) << " " << detail::dbl_str(g.d.imag()) << "\n";
  }
  return out.str();
}

inline std::vector<MoebiusElement> parse_matrix_list(const std::string& text) {
  detail::Lines in(text);
  detail::take_header(in, "moebius");
  std::vector<MoebiusElement> out;
  while (!in.done()) {
    const auto& toks = in.peek();
    int line = in.line();
    if (toks.size() != 8) throw ParseError(line, "eight decimal fields per element");
    std::array<double, 8> f{};
    for (size_t i = 0; i < 8; ++i) f[i] = detail::parse_double(toks[i], line);
    out.push_back(moebius_element({f[0], f[1]}, {f[2], f[3]}, {f[4], f[5]}, {f[6], f[7]}));
    in.take();
  }
  if (out.empty()) throw ParseError(in.line(), "at least one matrix row");
  return out;
}

}  // namespace surfclass
