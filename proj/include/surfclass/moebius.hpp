#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "surfclass/rational.hpp"

namespace surfclass {

// The one floating-point corner of the library: fractional linear maps
// (az+b)/(cz+d) acting on the extended plane, with explicit tolerances
// instead of exact algebraic numbers. Square roots appear in eigenvalues,
// and every invariant computed here is continuous on its type class.
using Cpx = std::complex<double>;

inline constexpr double kDetEps = 1e-12;    // determinant normalization slack
inline constexpr double kClassifyEps = 1e-9;  // default classification tolerance

struct IsIdentity : Error {
  IsIdentity() : Error("moebius: the identity fixes every point") {}
};

struct NotElementaryCompatible : Error {
  explicit NotElementaryCompatible(const std::string& what)
      : Error("generators lack common fixed-point structure: " + what) {}
};

struct TorsionDetected : Error {
  explicit TorsionDetected(const std::string& what) : Error("torsion detected: " + what) {}
};

// Unit-determinant matrix with a deterministic sign: the first entry of
// (a,b,c,d) that is nonzero has argument in [0, pi). The two lifts of a
// fractional linear map to SL(2,C) differ by sign, so this picks one.
struct MoebiusElement {
  Cpx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
};

inline MoebiusElement moebius_element(Cpx a, Cpx b, Cpx c, Cpx d) {
  Cpx det = a * d - b * c;
  if (std::abs(det) < kDetEps) throw Error("moebius: matrix is singular");
  if (std::abs(det - 1.0) > kDetEps) {  // already unit: renormalizing is exact
    Cpx s = std::sqrt(det);
    a /= s; b /= s; c /= s; d /= s;
  }
  if (std::abs(a * d - b * c - 1.0) > 1e3 * kDetEps)
    throw Error("moebius: determinant normalization failed");
  for (Cpx e : {a, b, c, d}) {
    if (std::abs(e) <= kDetEps) continue;
    double arg = std::arg(e);
    if (!(arg >= 0.0 && arg < std::acos(-1.0))) { a = -a; b = -b; c = -c; d = -d; }
    break;
  }
  return {a, b, c, d};
}

inline MoebiusElement moebius_identity() { return {}; }

// z -> lambda z, as diag(sqrt(lambda), 1/sqrt(lambda)).
inline MoebiusElement moebius_scaling(Cpx lambda) {
  if (std::abs(lambda) < kDetEps) throw Error("moebius: scaling by zero");
  Cpx s = std::sqrt(lambda);
  return moebius_element(s, 0.0, 0.0, 1.0 / s);
}

// z -> z + tau.
inline MoebiusElement moebius_translation(Cpx tau) {
  return moebius_element(1.0, tau, 0.0, 1.0);
}

inline MoebiusElement moebius_compose(const MoebiusElement& g, const MoebiusElement& h) {
  return moebius_element(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                         g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

inline MoebiusElement moebius_inverse(const MoebiusElement& g) {
  return moebius_element(g.d, -g.b, -g.c, g.a);
}

inline Cpx moebius_trace2(const MoebiusElement& g) {
  Cpx t = g.a + g.d;
  return t * t;
}

// Point of the extended plane C u {inf}.
struct ExtPoint {
  bool infinite = false;
  Cpx z{0.0, 0.0};
};

inline ExtPoint ext_infinity() { return {true, {0.0, 0.0}}; }
inline ExtPoint ext_finite(Cpx z) { return {false, z}; }

// Distance on the sphere model: bounded, treats inf like any other point.
inline double chordal(const ExtPoint& p, const ExtPoint& q) {
  double np = p.infinite ? 0.0 : 1.0 / std::sqrt(1.0 + std::norm(p.z));
  double nq = q.infinite ? 0.0 : 1.0 / std::sqrt(1.0 + std::norm(q.z));
  Cpx zp = p.infinite ? Cpx(0.0) : p.z, zq = q.infinite ? Cpx(0.0) : q.z;
  if (p.infinite && q.infinite) return 0.0;
  if (p.infinite) return nq;
  if (q.infinite) return np;
  return std::abs(zp - zq) * np * nq;
}

inline ExtPoint moebius_apply(const MoebiusElement& g, const ExtPoint& p) {
  if (p.infinite) {
    if (std::abs(g.c) < kDetEps) return ext_infinity();
    return ext_finite(g.a / g.c);
  }
  Cpx den = g.c * p.z + g.d;
  if (std::abs(den) < kDetEps) return ext_infinity();
  return ext_finite((g.a * p.z + g.b) / den);
}

enum class ElementType { Identity, Parabolic, Elliptic, Loxodromic };

inline const char* element_type_str(ElementType t) {
  switch (t) {
    case ElementType::Identity: return "identity";
    case ElementType::Parabolic: return "parabolic";
    case ElementType::Elliptic: return "elliptic";
    default: return "loxodromic";
  }
}

// Classification result. `angle` is set for elliptic elements (rotation angle
// in (0, pi]), `lambda` for loxodromic ones (multiplier, |lambda| > 1).
// `boundary` marks a parabolic verdict reached by tolerance rather than by an
// exact trace: the loxodromic class is not closed, and an element this close
// to its boundary may be a degenerating loxodromic rather than a true
// parabolic.
struct ElementClass {
  ElementType type = ElementType::Identity;
  double angle = 0.0;
  Cpx lambda{0.0, 0.0};
  bool boundary = false;
};

// Trichotomy by the squared trace, which is well defined on the fractional
// linear map even though the trace itself flips with the matrix sign:
// tr^2 = 4 parabolic, tr^2 real in [0,4) elliptic, anything else loxodromic
// with multiplier lambda from the eigenvalue ratio, |lambda| > 1 branch.
// The multiplier satisfies lambda + 1/lambda + 2 = tr^2.
inline ElementClass classify_element(const MoebiusElement& g, double eps = kClassifyEps) {
  ElementClass out;
  if (std::abs(g.a - 1.0) <= eps && std::abs(g.b) <= eps && std::abs(g.c) <= eps &&
      std::abs(g.d - 1.0) <= eps) {
    out.type = ElementType::Identity;
    return out;
  }
  Cpx tr2 = moebius_trace2(g);
  if (std::abs(tr2 - 4.0) <= eps) {
    out.type = ElementType::Parabolic;
    out.boundary = !(tr2 == Cpx(4.0, 0.0));
    return out;
  }
  if (std::abs(tr2.imag()) <= eps && tr2.real() >= -eps && tr2.real() < 4.0) {
    out.type = ElementType::Elliptic;
    double t2 = std::min(std::max(tr2.real(), 0.0), 4.0);
    out.angle = 2.0 * std::acos(std::sqrt(t2) / 2.0);
    return out;
  }
  out.type = ElementType::Loxodromic;
  Cpx t = g.a + g.d;
  Cpx mu = (t + std::sqrt(tr2 - 4.0)) / 2.0;
  Cpx lambda = mu * mu;
  if (std::abs(lambda) < 1.0) lambda = 1.0 / lambda;
  out.lambda = lambda;
  return out;
}

// Fixed points on the extended plane: roots of c z^2 + (d - a) z - b = 0,
// with the c = 0 branch fixing inf. One point for parabolic elements, two
// otherwise. Throws for the identity, which fixes everything.
inline std::vector<ExtPoint> fixed_points(const MoebiusElement& g, double eps = kClassifyEps) {
  if (classify_element(g, eps).type == ElementType::Identity) throw IsIdentity();
  std::vector<ExtPoint> out;
  if (std::abs(g.c) <= eps) {
    if (std::abs(g.d - g.a) <= eps) {
      out.push_back(ext_infinity());  // translation: inf only
      return out;
    }
    out.push_back(ext_finite(g.b / (g.d - g.a)));
    out.push_back(ext_infinity());
    return out;
  }
  Cpx disc = (g.d - g.a) * (g.d - g.a) + 4.0 * g.b * g.c;  // equals tr^2 - 4
  if (std::abs(disc) <= eps) {
    out.push_back(ext_finite((g.a - g.d) / (2.0 * g.c)));
    return out;
  }
  Cpx s = std::sqrt(disc);
  out.push_back(ext_finite((g.a - g.d + s) / (2.0 * g.c)));
  out.push_back(ext_finite((g.a - g.d - s) / (2.0 * g.c)));
  return out;
}

// Complete invariant of an elementary torsion-free discrete group:
//   type 1, lambda: cyclic, a loxodromic generator conjugate to z -> lambda z
//                   with |lambda| > 1;
//   type 2, 0:      cyclic, a parabolic generator conjugate to z -> z + 1;
//   type 3, lambda: rank-2 abelian, conjugate to the group generated by
//                   z -> z + 1 and z -> z + lambda with Im(lambda) > 0,
//                   lambda reduced to the modular fundamental domain.
struct ElementaryInvariant {
  int type = 2;
  Cpx lambda{0.0, 0.0};
};

// Reduces lambda (upper half-plane) to the fundamental domain of the modular
// action: |lambda| >= 1, Re(lambda) in (-1/2, 1/2], with Re >= 0 chosen on
// the unit circle so the reduction is a function. Idempotent.
inline Cpx modular_reduce(Cpx lambda, double eps = 1e-12) {
  if (!(lambda.imag() > 0.0))
    throw Error("modular_reduce: argument must lie in the upper half-plane");
  for (int it = 0; it < 256; ++it) {
    double n = std::round(lambda.real());
    lambda -= n;
    if (std::norm(lambda) < 1.0 - eps) {
      lambda = -1.0 / lambda;
      continue;
    }
    break;
  }
  if (lambda.real() < -0.5 + eps) lambda += 1.0;
  if (std::abs(std::norm(lambda) - 1.0) <= eps && lambda.real() < 0.0) lambda = -1.0 / lambda;
  return lambda;
}

namespace detail {

// Rounds half away from zero toward +inf, so reduction coefficients cannot
// flip-flop on an exact half-projection tie.
inline double lat_round(double x) { return std::floor(x + 0.5); }

// Shortest-vector basis of the lattice the inputs generate, found by norm
// descent: repeatedly reduce every vector against the shorter reduced ones
// (integer combinations only) and drop what vanishes. Collinear inputs run
// the Euclidean algorithm along their line, so sublattice refinements are
// kept, and a configuration that never settles below three survivors does
// not span a discrete lattice.
inline std::vector<Cpx> lattice_basis(const std::vector<Cpx>& ts, double tol) {
  auto dot = [](Cpx x, Cpx y) { return x.real() * y.real() + x.imag() * y.imag(); };
  auto cross = [](Cpx x, Cpx y) { return x.real() * y.imag() - x.imag() * y.real(); };
  std::vector<Cpx> W;
  for (Cpx t : ts)
    if (std::abs(t) > tol) W.push_back(t);
  for (int round = 0; round < 512 && !W.empty(); ++round) {
    std::sort(W.begin(), W.end(), [](Cpx x, Cpx y) { return std::norm(x) < std::norm(y); });
    bool changed = false;
    std::vector<Cpx> keep;
    for (Cpx x : W) {
      if (keep.size() >= 2) {
        double dd = cross(keep[0], keep[1]);
        if (std::abs(dd) > tol * std::abs(keep[0]) * std::abs(keep[1])) {
          double ka = lat_round(cross(x, keep[1]) / dd);
          double kb = lat_round(cross(keep[0], x) / dd);
          Cpx x2 = x - ka * keep[0] - kb * keep[1];
          if (std::norm(x2) < std::norm(x)) x = x2;
        }
      }
      for (const Cpx& u : keep) {
        double k = lat_round(dot(x, u) / std::norm(u));
        if (k != 0.0) x -= k * u;
      }
      if (std::abs(x) <= tol) {
        changed = true;
        continue;
      }
      keep.push_back(x);
    }
    if (keep.size() != W.size()) changed = true;
    for (size_t i = 0; i < keep.size() && !changed; ++i)
      if (keep[i] != W[i]) changed = true;
    W = std::move(keep);
    if (!changed) break;
  }
  if (W.size() > 2)
    throw NotElementaryCompatible("translation parts do not span a discrete lattice");
  return W;
}

}  // namespace detail

// Conjugates every generator: g -> h g h^-1, renormalized.
inline std::vector<MoebiusElement> conjugate(const MoebiusElement& h,
                                             const std::vector<MoebiusElement>& gens) {
  MoebiusElement hinv = moebius_inverse(h);
  std::vector<MoebiusElement> out;
  out.reserve(gens.size());
  for (const MoebiusElement& g : gens)
    out.push_back(moebius_compose(moebius_compose(h, g), hinv));
  return out;
}

// Invariant of the elementary torsion-free discrete group the generators
// span. Discreteness and elementarity are the caller's responsibility; the
// checks here are limited to fixed-point compatibility of the generators
// themselves. Elliptic generators are rejected as torsion (in a discrete
// group every elliptic has finite order). The type-1 multiplier is taken
// from the supplied generator with minimal |log|lambda||; the whole group is
// not searched.
inline ElementaryInvariant elementary_invariant(const std::vector<MoebiusElement>& gens,
                                                double eps = kClassifyEps) {
  double ptol = std::max(1e3 * eps, 1e-7);  // fixed-point agreement slack
  std::vector<MoebiusElement> live;
  std::vector<ElementClass> cls;
  for (const MoebiusElement& g : gens) {
    ElementClass c = classify_element(g, eps);
    if (c.type == ElementType::Identity) continue;
    if (c.type == ElementType::Elliptic)
      throw TorsionDetected("elliptic generator with rotation angle " + std::to_string(c.angle));
    live.push_back(g);
    cls.push_back(c);
  }
  if (live.empty()) throw NotElementaryCompatible("no generator moves any point");
  bool any_par = false, any_lox = false;
  for (const ElementClass& c : cls) {
    any_par = any_par || c.type == ElementType::Parabolic;
    any_lox = any_lox || c.type == ElementType::Loxodromic;
  }
  if (any_par && any_lox)
    throw NotElementaryCompatible(
        "parabolic and loxodromic generators cannot share fixed points discretely");

  if (any_lox) {
    // One common axis: every generator fixes the same unordered point pair.
    std::vector<ExtPoint> fp0 = fixed_points(live[0], eps);
    for (size_t k = 1; k < live.size(); ++k) {
      std::vector<ExtPoint> fp = fixed_points(live[k], eps);
      if (fp.size() != 2) throw NotElementaryCompatible("loxodromic with one fixed point");
      bool straight = chordal(fp0[0], fp[0]) <= ptol && chordal(fp0[1], fp[1]) <= ptol;
      bool swapped = chordal(fp0[0], fp[1]) <= ptol && chordal(fp0[1], fp[0]) <= ptol;
      if (!straight && !swapped)
        throw NotElementaryCompatible("loxodromic generators with different axes");
    }
    ElementaryInvariant out;
    out.type = 1;
    double best = 0.0;
    bool first = true;
    for (const ElementClass& c : cls) {
      double len = std::abs(std::log(std::abs(c.lambda)));
      if (first || len < best) {
        best = len;
        out.lambda = c.lambda;
        first = false;
      }
    }
    return out;
  }

  // All parabolic: one common fixed point; conjugate it to inf and read off
  // the translation parts.
  ExtPoint p = fixed_points(live[0], eps)[0];
  for (size_t k = 1; k < live.size(); ++k) {
    ExtPoint q = fixed_points(live[k], eps)[0];
    if (chordal(p, q) > ptol)
      throw NotElementaryCompatible("parabolic generators with different fixed points");
  }
  MoebiusElement send = p.infinite ? moebius_identity()
                                   : moebius_element(0.0, 1.0, 1.0, -p.z);  // z -> 1/(z - p)
  std::vector<Cpx> taus;
  for (const MoebiusElement& g : conjugate(send, live)) {
    if (std::abs(g.c) > ptol * (1.0 + std::abs(g.b)))
      throw NotElementaryCompatible("conjugated generator does not fix infinity");
    taus.push_back(g.b / g.a);
  }
  double scale = 0.0;
  for (Cpx t : taus) scale = std::max(scale, std::abs(t));
  std::vector<Cpx> basis = detail::lattice_basis(taus, ptol * (1.0 + scale));
  if (basis.empty()) throw NotElementaryCompatible("translation parts all vanish");
  if (basis.size() == 1) return {2, Cpx(0.0, 0.0)};
  Cpx u = basis[0], v = basis[1];
  if (std::norm(u) > std::norm(v)) std::swap(u, v);
  Cpx lambda = v / u;
  if (lambda.imag() < 0.0) lambda = -lambda;
  return {3, modular_reduce(lambda)};
}

}  // namespace surfclass
