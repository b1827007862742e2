#pragma once

#include <array>
#include <set>
#include <vector>

#include "surfclass/triangulate.hpp"

namespace surfclass {

struct SingularSystem : Error {
  using Error::Error;
};

// Combinatorial triangulated disk: triangles over vertex ids 0..n-1 with a
// distinguished boundary cycle. Orientation of the triangles is coherent and
// counterclockwise relative to the boundary cycle.
struct AbstractDisk {
  int n_vertices = 0;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary;
};

// m points in strictly convex position, counterclockwise, with rational
// coordinates: the unit circle through the tangent half-angle parameter.
inline std::vector<Point2> convex_positions(size_t m) {
  if (m < 3) throw Error("convex_positions: need at least 3 points");
  std::vector<Point2> out;
  out.reserve(m);
  for (size_t k = 0; k < m; ++k) {
    Rat t = Rat(2 * BigInt(k) - BigInt(m - 1), 2);
    Rat t2 = t * t;
    out.push_back({(1 - t2) / (1 + t2), 2 * t / (1 + t2)});
  }
  return out;
}

namespace detail {

// Solves A x = B over the rationals by Gaussian elimination; B may hold
// several right-hand-side columns. Throws SingularSystem if A is singular.
inline std::vector<std::vector<Rat>> solve_rational(std::vector<std::vector<Rat>> A,
                                                    std::vector<std::vector<Rat>> B) {
  const size_t n = A.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw SingularSystem("linear system singular");
    std::swap(A[piv], A[col]);
    std::swap(B[piv], B[col]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      Rat f = A[r][col] / A[col][col];
      for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      for (size_t c = 0; c < B[r].size(); ++c) B[r][c] -= f * B[col][c];
    }
  }
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < B[r].size(); ++c) B[r][c] /= A[r][r];
  return B;
}

}  // namespace detail

// Straight-line embedding of a triangulated disk with its boundary pinned to
// the given convex positions. Interior vertices are placed at the unique
// solution of the barycentric system (each interior vertex the average of its
// neighbours), which yields a valid embedding exactly when the input is a
// triangulated disk with internally 3-connected structure; otherwise
// SingularSystem is thrown.
inline Triangulation2 convex_embed(const AbstractDisk& disk,
                                   const std::vector<Point2>& boundary_pos) {
  const size_t n = size_t(disk.n_vertices);
  if (disk.boundary.size() != boundary_pos.size())
    throw Error("convex_embed: boundary placement size mismatch");
  if (disk.boundary.size() < 3) throw Error("convex_embed: boundary too short");
  // The placement must be strictly convex and counterclockwise.
  for (size_t i = 0; i < boundary_pos.size(); ++i) {
    const Point2& a = boundary_pos[i];
    const Point2& b = boundary_pos[(i + 1) % boundary_pos.size()];
    const Point2& c = boundary_pos[(i + 2) % boundary_pos.size()];
    if (orientation(a, b, c) != 1) throw Error("convex_embed: placement not strictly convex ccw");
  }

  std::vector<char> on_boundary(n, 0);
  std::vector<Point2> pos(n, Point2{Rat(0), Rat(0)});
  for (size_t i = 0; i < disk.boundary.size(); ++i) {
    int v = disk.boundary[i];
    if (v < 0 || size_t(v) >= n) throw Error("convex_embed: boundary vertex out of range");
    if (on_boundary[v]) throw Error("convex_embed: repeated boundary vertex");
    on_boundary[v] = 1;
    pos[v] = boundary_pos[i];
  }
  std::vector<std::set<int>> nbr(n);
  for (const auto& t : disk.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a < 0 || size_t(a) >= n || b < 0 || size_t(b) >= n || a == b)
        throw Error("convex_embed: bad triangle");
      nbr[a].insert(b);
      nbr[b].insert(a);
    }

  std::vector<int> interior, row_of(n, -1);
  for (size_t v = 0; v < n; ++v)
    if (!on_boundary[v]) {
      row_of[v] = int(interior.size());
      interior.push_back(int(v));
    }
  if (!interior.empty()) {
    const size_t m = interior.size();
    std::vector<std::vector<Rat>> A(m, std::vector<Rat>(m, Rat(0)));
    std::vector<std::vector<Rat>> B(m, std::vector<Rat>(2, Rat(0)));
    for (size_t r = 0; r < m; ++r) {
      int v = interior[r];
      if (nbr[v].empty()) throw SingularSystem("isolated interior vertex");
      A[r][r] = Rat(BigInt(nbr[v].size()));
      for (int w : nbr[v]) {
        if (on_boundary[w]) {
          B[r][0] += pos[w].x;
          B[r][1] += pos[w].y;
        } else {
          A[r][row_of[w]] -= 1;
        }
      }
    }
    auto X = detail::solve_rational(std::move(A), std::move(B));
    for (size_t r = 0; r < m; ++r) pos[interior[r]] = {X[r][0], X[r][1]};
  }

  Triangulation2 out;
  out.points = std::move(pos);
  out.triangles = disk.triangles;
  out.boundary.push_back(disk.boundary);
  for (const auto& t : out.triangles)
    if (orientation(out.points[t[0]], out.points[t[1]], out.points[t[2]]) != 1)
      throw SingularSystem("embedding produced a non-positive triangle");
  return out;
}

}  // namespace surfclass
