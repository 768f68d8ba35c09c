#pragma once

#include <vector>

#include "gasket/energy.hpp"
#include "gasket/traceops.hpp"

namespace gasket {

// Expansion u = h + sum_n sum_{x in ~V_n} c_x phi_x. Coefficients are stored
// per level against the mesh's contiguous ~V_n index range.
template <class S>
struct TentExpansion {
  HarmonicFunction<S> harmonic_part;
  std::vector<std::vector<S>> coefficients;  // coefficients[n-1][i] = c at index nv(n-1)+i
  int level = 0;

  const S& coefficient(const VertexId& x) const {
    const Mesh& mesh = Mesh::at_least(level);
    int n = x.level();
    if (n < 1 || n > level) throw ContractError("apex level out of range");
    return coefficients[n - 1][mesh.index_of(x) - mesh.vertex_count(n - 1)];
  }
};

// Peel the expansion level by level: phi_x is the unique function that is
// delta at x on V_n and cell-harmonic below, so c_x is the excess of u(x) over
// the harmonic prediction from the previous level.
template <class S>
TentExpansion<S> tent_coefficients(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  TentExpansion<S> e;
  e.level = u.level;
  e.harmonic_part =
      HarmonicFunction<S>{{u.values[0], u.values[1], u.values[2]}};
  for (int n = 1; n <= u.level; ++n) {
    const auto& par = mesh.cells(n - 1);
    const auto& mids = mesh.mids(n);
    std::vector<S> row(mesh.vertex_count(n) - mesh.vertex_count(n - 1));
    Mesh::Index base = mesh.vertex_count(n - 1);
    for (size_t c = 0; c < par.size(); ++c) {
      CornerTriple<S> t{u.values[par[c].v[0]], u.values[par[c].v[1]], u.values[par[c].v[2]]};
      auto mv = cell_midpoints(t);
      for (int i = 0; i < 3; ++i)
        row[mids[c].v[i] - base] = u.values[mids[c].v[i]] - mv[i];
    }
    e.coefficients.push_back(std::move(row));
  }
  return e;
}

// Rebuild the graph function; exact inverse of tent_coefficients.
template <class S>
GraphFunction<S> reconstruct(const TentExpansion<S>& e, int m) {
  if (m > e.level) throw ContractError("reconstruction level exceeds expansion");
  const Mesh& mesh = Mesh::at_least(m);
  GraphFunction<S> u(0, {e.harmonic_part.boundary[0], e.harmonic_part.boundary[1],
                         e.harmonic_part.boundary[2]});
  for (int n = 1; n <= m; ++n) {
    u = extend_once(u);
    Mesh::Index base = mesh.vertex_count(n - 1);
    const auto& row = e.coefficients[n - 1];
    for (size_t i = 0; i < row.size(); ++i) u.values[base + i] += row[i];
  }
  return u;
}

// Coefficient characterization of the Sobolev norm, valid for
// log3/log5 < sigma < 2 - log3/log5:
// value^2 = ||h||^2_{L^2} + sum_n sum_x 5^(n sigma) 3^-n |c_x|^2.
template <class S>
NormReport sobolev_norm(const TentExpansion<S>& e, double sigma) {
  const auto& cc = constants();
  if (!(sigma > cc.b1 && sigma < cc.two_minus_b1))
    throw DomainError("sobolev_norm: sigma outside (log3/log5, 2 - log3/log5)");
  NormReport r{NormSpace::SobolevCoefficient, sigma};
  auto h2 = map_values(to_graph(e.harmonic_part, e.level), [](const S& v) { return v * v; });
  r.base_term = to_double(integrate(h2));
  for (int n = 1; n <= e.level; ++n) {
    double sum = 0.0;
    for (const S& c : e.coefficients[n - 1]) {
      double d = to_double(c);
      sum += d * d;
    }
    r.levels.push_back(n);
    r.terms.push_back(std::pow(5.0, sigma * n) * std::pow(3.0, -n) * sum);
  }
  r.truncation_level = e.level;
  detail::finish_report(r);
  return r;
}

// The sigma = 2 endpoint: value^2 = ||u||^2_{L^2} + ||Laplacian||^2_{L^2} by
// quadrature. The supplied rhs must agree with graph_laplacian(u) (exactly in
// rational mode, relative residual <= 1e-9 in floating mode).
template <class S>
NormReport sigma2_norm(const GraphFunction<S>& u, const std::vector<S>& rhs) {
  if (rhs.size() != u.values.size()) throw ContractError("sigma2_norm: rhs size mismatch");
  auto lap = graph_laplacian_all(u);
  if constexpr (is_exact_v<S>) {
    for (size_t i = 3; i < rhs.size(); ++i)
      if (lap[i] != rhs[i]) throw ContractError("sigma2_norm: rhs inconsistent with u");
  } else {
    double scale = 0.0, worst = 0.0;
    for (size_t i = 3; i < rhs.size(); ++i) scale = std::max(scale, std::abs(rhs[i]));
    for (size_t i = 3; i < rhs.size(); ++i)
      worst = std::max(worst, std::abs(lap[i] - rhs[i]));
    if (worst > 1e-9 * std::max(scale, 1.0))
      throw ContractError("sigma2_norm: rhs inconsistent with u");
  }
  NormReport r{NormSpace::Sigma2, 2.0};
  auto u2 = map_values(u, [](const S& v) { return v * v; });
  r.base_term = to_double(integrate(u2));
  GraphFunction<S> lap_fn(u.level, std::move(lap));
  auto l2 = map_values(lap_fn, [](const S& v) { return v * v; });
  r.levels.push_back(u.level);
  r.terms.push_back(to_double(integrate(l2)));
  r.truncation_level = u.level;
  detail::finish_report(r);
  return r;
}

}  // namespace gasket
