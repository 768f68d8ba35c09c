#pragma once

#include <vector>

#include "gasket/extrapolate.hpp"
#include "gasket/graphfn.hpp"
#include "gasket/harmonic.hpp"
#include "gasket/linefn.hpp"

namespace gasket {

template <class S>
struct EnergyValue {
  int level = 0;
  S value{};
};

// E_m(u) = (5/3)^m sum over level-m cells of squared corner differences,
// unordered pairs. (The ordered-pair reading of the source sum doubles every
// identity uniformly; all downstream relations are scale invariant.)
template <class S>
EnergyValue<S> energy(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  S acc(0);
  for (const auto& cell : mesh.cells(u.level)) {
    const S& a = u.values[cell.v[0]];
    const S& b = u.values[cell.v[1]];
    const S& c = u.values[cell.v[2]];
    acc += (a - b) * (a - b) + (a - c) * (a - c) + (b - c) * (b - c);
  }
  return {u.level, ratio_pow<S>(5, 3, u.level) * acc};
}

template <class S>
S bilinear_energy(const GraphFunction<S>& u, const GraphFunction<S>& v) {
  if (u.level != v.level) throw ContractError("bilinear_energy: level mismatch");
  const Mesh& mesh = Mesh::at_least(u.level);
  S acc(0);
  for (const auto& cell : mesh.cells(u.level)) {
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      acc += (u.values[cell.v[i]] - u.values[cell.v[j]]) *
             (v.values[cell.v[i]] - v.values[cell.v[j]]);
    }
  }
  return ratio_pow<S>(5, 3, u.level) * acc;
}

namespace detail {
// Neighbor sums over the level-m graph (every edge lies in exactly one cell).
template <class S>
std::vector<S> neighbor_sums(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  std::vector<S> ns(u.values.size(), S(0));
  for (const auto& cell : mesh.cells(u.level)) {
    const S& a = u.values[cell.v[0]];
    const S& b = u.values[cell.v[1]];
    const S& c = u.values[cell.v[2]];
    ns[cell.v[0]] += b + c;
    ns[cell.v[1]] += a + c;
    ns[cell.v[2]] += a + b;
  }
  return ns;
}
}  // namespace detail

// Renormalized graph Laplacian (3/2) 5^m (sum of the 4 neighbor values - 4u).
template <class S>
S graph_laplacian(const GraphFunction<S>& u, const VertexId& x) {
  const Mesh& mesh = Mesh::at_least(u.level);
  Mesh::Index i = mesh.index_of(x);
  if (mesh.is_boundary(i)) throw ContractError("graph_laplacian at a boundary vertex");
  // The two level-m cells containing x, reached by descending toward the corner.
  S nbr(0);
  auto add_cell = [&](Word w, int corner) {
    while (w.size() < u.level) w = w.append(corner);
    CornerTriple<S> t;
    for (int c = 0; c < 3; ++c)
      t[c] = u.values[mesh.index_of(canonical_vertex(w, c))];
    for (int c = 0; c < 3; ++c)
      if (c != corner) nbr += t[c];
  };
  VertexId v = mesh.id_of(i);
  add_cell(v.word, v.corner);
  auto twin = twin_address(v);
  add_cell(twin->word, twin->corner);
  return fraction<S>(3, 2) * ratio_pow<S>(5, 1, u.level) * (nbr - S(4) * u.values[i]);
}

// Batch variant over all interior vertices; boundary entries are zero.
template <class S>
std::vector<S> graph_laplacian_all(const GraphFunction<S>& u) {
  auto ns = detail::neighbor_sums(u);
  S scale = fraction<S>(3, 2) * ratio_pow<S>(5, 1, u.level);
  std::vector<S> out(u.values.size(), S(0));
  for (size_t i = 3; i < out.size(); ++i) out[i] = scale * (ns[i] - S(4) * u.values[i]);
  return out;
}

// Measure of the level-m tent at a vertex: (2/3) 3^-m interior, (1/3) 3^-m at
// the three boundary vertices (the weights sum to 1). Piecewise-harmonic
// interpolants are integrated exactly by these weights.
template <class S>
S tent_measure(int level, bool boundary) {
  return (boundary ? fraction<S>(1, 3) : fraction<S>(2, 3)) * ratio_pow<S>(1, 3, level);
}

// Quadrature sum(w_x f(x)) against the self-similar measure.
template <class S>
S integrate(const GraphFunction<S>& u) {
  S w_int = tent_measure<S>(u.level, false);
  S w_bdy = tent_measure<S>(u.level, true);
  S acc(0);
  for (size_t i = 0; i < u.values.size(); ++i) acc += (i < 3 ? w_bdy : w_int) * u.values[i];
  return acc;
}

template <class S>
struct PoissonProblem {
  int level = 0;
  CornerTriple<S> boundary{};
  std::vector<S> rhs;  // target graph_laplacian values; boundary entries ignored

  static PoissonProblem constant_rhs(int level, const S& value,
                                     CornerTriple<S> boundary = {S(0), S(0), S(0)}) {
    const Mesh& mesh = Mesh::at_least(level);
    return PoissonProblem{level, boundary, std::vector<S>(mesh.vertex_count(level), value)};
  }
};

// Direct solve of the discrete Poisson problem by cell-tree Schur elimination.
// Eliminating the three midpoints of a cell renormalizes the corner graph's
// conductance by 3/5 and pushes (2,2,1)/5-weighted right-hand-side mass to the
// corners, so one downward accumulation followed by an upward back-substitution
// solves the system exactly.
template <class S>
GraphFunction<S> poisson_solve(const PoissonProblem<S>& p) {
  const int L = p.level;
  const Mesh& mesh = Mesh::at_least(L);
  if (Mesh::Index(p.rhs.size()) != mesh.vertex_count(L))
    throw ContractError("poisson rhs not total on V_m");

  std::vector<S> acc(mesh.vertex_count(L));
  S unit = fraction<S>(2, 3) * ratio_pow<S>(1, 5, L);
  for (Mesh::Index i = 0; i < mesh.vertex_count(L); ++i)
    acc[i] = mesh.is_boundary(i) ? S(0) : unit * p.rhs[i];

  for (int j = L; j >= 1; --j) {
    const auto& par = mesh.cells(j - 1);
    const auto& mids = mesh.mids(j);
    for (size_t c = 0; c < par.size(); ++c) {
      const S& bp = acc[mids[c].v[0]];
      const S& bq = acc[mids[c].v[1]];
      const S& br = acc[mids[c].v[2]];
      acc[par[c].v[0]] += (S(2) * (bp + bq) + br) / 5;
      acc[par[c].v[1]] += (S(2) * (bp + br) + bq) / 5;
      acc[par[c].v[2]] += (S(2) * (bq + br) + bp) / 5;
    }
  }

  std::vector<S> u(mesh.vertex_count(L), S(0));
  u[0] = p.boundary[0];
  u[1] = p.boundary[1];
  u[2] = p.boundary[2];
  for (int j = 1; j <= L; ++j) {
    S inv_g = ratio_pow<S>(5, 3, L - j);  // 1/conductance at level j
    const auto& par = mesh.cells(j - 1);
    const auto& mids = mesh.mids(j);
    for (size_t c = 0; c < par.size(); ++c) {
      const S& ua = u[par[c].v[0]];
      const S& ub = u[par[c].v[1]];
      const S& uc = u[par[c].v[2]];
      S bp = inv_g * acc[mids[c].v[0]];
      S bq = inv_g * acc[mids[c].v[1]];
      S br = inv_g * acc[mids[c].v[2]];
      S s = ua + ub + uc;
      u[mids[c].v[0]] = (s + ua + ub) / 5 - (S(3) * bp + bq + br) / 10;
      u[mids[c].v[1]] = (s + ua + uc) / 5 - (bp + S(3) * bq + br) / 10;
      u[mids[c].v[2]] = (s + ub + uc) / 5 - (bp + bq + S(3) * br) / 10;
    }
  }
  return GraphFunction<S>(L, std::move(u));
}

enum class Direction { Boundary, Up, Left, Right };

inline int direction_corner(Direction d) {
  switch (d) {
    case Direction::Up: return 0;
    case Direction::Left: return 1;   // into the cell on the right, samples above
    case Direction::Right: return 2;  // into the cell on the left, samples below
    default: return -1;
  }
}

template <class S>
struct DerivativeReading {
  VertexId vertex;
  Direction direction = Direction::Boundary;
  std::vector<S> terms;  // index j records (5/3)^(|w|+j) (2u - u(y_j) - u(z_j))
  TailFit<S> fit;
};

// Renormalized normal derivative reading at a vertex. For the localized
// directions the vertex must be a corner of the matching kind: q_0 corners for
// "up", q_1 for "left", q_2 for "right".
template <class S>
DerivativeReading<S> normal_derivative(const GraphFunction<S>& u, const VertexId& x,
                                       Direction dir) {
  const Mesh& mesh = Mesh::at_least(u.level);
  VertexId v = mesh.id_of(mesh.index_of(x));
  Word w;
  int corner;
  if (dir == Direction::Boundary) {
    if (!v.word.empty()) throw ContractError("boundary derivative at a non-boundary vertex");
    corner = v.corner;
  } else {
    corner = direction_corner(dir);
    auto twin = twin_address(v);
    if (v.corner == corner)
      w = v.word;
    else if (twin && twin->corner == corner)
      w = twin->word;
    else
      throw ContractError("direction not available at vertex " + v.str());
  }
  DerivativeReading<S> out{v, dir, {}, {}};
  S scale = ratio_pow<S>(5, 3, w.size());
  const S step = fraction<S>(5, 3);
  int other[2], t = 0;
  for (int c = 0; c < 3; ++c)
    if (c != corner) other[t++] = c;
  S ux = u.values[mesh.index_of(canonical_vertex(w, corner))];
  for (Word cw = w; cw.size() <= u.level; cw = cw.append(corner)) {
    S ya = u.values[mesh.index_of(canonical_vertex(cw, other[0]))];
    S yb = u.values[mesh.index_of(canonical_vertex(cw, other[1]))];
    out.terms.push_back(scale * (S(2) * ux - ya - yb));
    scale *= step;
  }
  if (out.terms.size() < 3) throw ContractError("insufficient depth for derivative reading");
  out.fit = geometric_tail_fit(out.terms);
  return out;
}

enum class Side { Left, Right };  // Right: samples below x; Left: samples above

// One-sided derivative from bottom-line samples only:
// (5/3)^m (4 f(x) - 5 f(x -+ 1/2^{m+1}) + f(x -+ 1/2^m)).
template <class S>
DerivativeReading<S> one_sided_derivative(const LineFunction<S>& f, const DyadicPoint& x,
                                        Side side) {
  DyadicPoint p = x.reduced();
  if (side == Side::Right && p.k == 0)
    throw ContractError("no samples below x = 0");
  if (side == Side::Left && p.k == (uint64_t(1) << p.n))
    throw ContractError("no samples above x = 1");
  DerivativeReading<S> out{vertex_of_dyadic(p),
                           side == Side::Right ? Direction::Right : Direction::Left,
                           {},
                           {}};
  const S& fx = f.at(p);
  S scale = ratio_pow<S>(5, 3, p.n);
  const S step = fraction<S>(5, 3);
  for (int m = p.n; m + 1 <= f.level; ++m) {
    uint64_t base = p.k << (f.level - p.n);   // index of x at sample resolution
    uint64_t h1 = uint64_t(1) << (f.level - m - 1);  // 1/2^{m+1}
    uint64_t h0 = h1 << 1;
    S near = side == Side::Right ? f.samples[base - h1] : f.samples[base + h1];
    S far = side == Side::Right ? f.samples[base - h0] : f.samples[base + h0];
    out.terms.push_back(scale * (S(4) * fx - S(5) * near + far));
    scale *= step;
  }
  if (out.terms.size() < 3) throw ContractError("insufficient depth for derivative reading");
  out.fit = geometric_tail_fit(out.terms);
  return out;
}

enum class RieszFunctional { Dtilde11, Dtilde12, D22 };

// Zero-boundary representer J with bilinear_energy(v, J) = -functional(v|_I)
// for every zero-boundary v on V_m. The functional's point masses become a
// Poisson right-hand side through the (2/3) 3^-m vertex measure.
template <class S>
GraphFunction<S> riesz_representer(int m, RieszFunctional which) {
  if (m < 2) throw ContractError("riesz_representer needs level >= 2");
  const Mesh& mesh = Mesh::at_least(m);
  PoissonProblem<S> p;
  p.level = m;
  p.boundary = {S(0), S(0), S(0)};
  p.rhs.assign(mesh.vertex_count(m), S(0));
  S unit = fraction<S>(3, 2) * ratio_pow<S>(3, 1, m);
  uint64_t half = uint64_t(1) << (m - 1);
  uint64_t quarter = uint64_t(1) << (m - 2);
  switch (which) {
    case RieszFunctional::Dtilde11:
      p.rhs[mesh.line_vertex(m, quarter)] = unit;
      p.rhs[mesh.line_vertex(m, half)] = -fraction<S>(4, 5) * unit;
      break;
    case RieszFunctional::Dtilde12:
      p.rhs[mesh.line_vertex(m, 3 * quarter)] = unit;
      p.rhs[mesh.line_vertex(m, half)] = -fraction<S>(4, 5) * unit;
      break;
    case RieszFunctional::D22:
      p.rhs[mesh.line_vertex(m, half)] = unit;
      p.rhs[mesh.line_vertex(m, quarter)] = -fraction<S>(5, 8) * unit;
      p.rhs[mesh.line_vertex(m, 3 * quarter)] = -fraction<S>(5, 8) * unit;
      break;
  }
  return poisson_solve(p);
}

}  // namespace gasket
