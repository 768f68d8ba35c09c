#pragma once

#include <array>
#include <vector>

#include "gasket/energy.hpp"
#include "gasket/sobolev.hpp"
#include "gasket/traceops.hpp"

namespace gasket {

// Data of an extension: harmonic part interpolating f at {0, 1/2, 1} and tent
// coefficients c_{x(n,k)} = 5 D~f(n,k) for n below the sample level.
template <class S>
struct ExtensionPlan {
  enum class CorrectorKind { None, V0, V0AndV2 };

  LineFunction<S> source;
  HarmonicFunction<S> harmonic_part;
  DifferenceTable<S> dtable;  // D~ rows, n = 1..M-1
  CorrectorKind kind = CorrectorKind::None;

  S coefficient(int n, uint64_t k) const { return S(5) * dtable.row(n)[k - 1]; }
};

template <class S>
ExtensionPlan<S> make_plan(const LineFunction<S>& f) {
  if (f.level < 1)
    throw ContractError("extension requires the genuine f(1/2) sample (level >= 1)");
  ExtensionPlan<S> plan{f,
                        HarmonicFunction<S>::from_line_samples(
                            f.samples.front(), f.at(1, 1), f.samples.back()),
                        dtilde_table(f)};
  return plan;
}

// ~E f = h + sum_{n<M} sum_k c_{x(n,k)} phi_{x(n,k)}, evaluated on all of V_m
// by one extension sweep that deposits each coefficient at its apex.
template <class S>
GraphFunction<S> tilde_extend(const LineFunction<S>& f, int m) {
  if (m < f.level) throw ContractError("output level below sample level");
  require_level(m);
  auto plan = make_plan(f);
  const Mesh& mesh = Mesh::at_least(m);
  GraphFunction<S> u(0, {plan.harmonic_part.boundary[0], plan.harmonic_part.boundary[1],
                         plan.harmonic_part.boundary[2]});
  for (int n = 1; n <= m; ++n) {
    extend_in_place(u, n);
    if (n <= f.level - 1)
      for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k)
        u.values[mesh.apex_vertex_index(n, k)] += plan.coefficient(n, k);
  }
  return u;
}

// Bottom-line restriction of ~E f computed on the bottom strip alone (O(2^m)).
template <class S>
LineFunction<S> tilde_extend_trace(const LineFunction<S>& f, int m) {
  if (m < f.level) throw ContractError("output level below sample level");
  auto plan = make_plan(f);
  // Corner triples (apex, left, right) of the bottom cells, left to right.
  std::vector<CornerTriple<S>> strip{
      {plan.harmonic_part.boundary[0], plan.harmonic_part.boundary[1],
       plan.harmonic_part.boundary[2]}};
  for (int n = 1; n <= m; ++n) {
    strip = detail::refine_strip(strip);
    if (n <= f.level - 1)
      for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k)
        strip[k - 1][0] += plan.coefficient(n, k);
  }
  return detail::strip_to_line(strip, m);
}

enum class CorrectorRole { V0, V2 };

// Zero-boundary function with Kronecker normal-derivative data, realized as
// the biharmonic representative: poisson_solve against a harmonic right-hand
// side whose boundary triple is chosen so the achieved (extrapolated) readings
// hit the target.
template <class S>
struct Corrector {
  CorrectorRole role = CorrectorRole::V0;
  int level = 0;
  GraphFunction<S> values;
  CornerTriple<S> rhs_boundary{};           // boundary triple of the harmonic rhs
  std::array<S, 3> achieved{};              // extrapolated readings at q_0, q_1, q_2
  S gauss_green_gap{};                      // sum of achieved readings - integral of rhs
  S discrete_gauss_green_gap{};             // finest-level readings vs weighted rhs sum (exact 0)
};

namespace detail {
// Gaussian elimination on a 3x3 system; the derivative-targeting map is
// invertible (it is a perturbed harmonic mass matrix), so a vanishing pivot is
// an assembly bug.
template <class S>
std::array<S, 3> solve3(std::array<std::array<S, 3>, 3> a, std::array<S, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int piv = -1;
    for (int r = col; r < 3; ++r)
      if (a[r][col] != S(0)) {
        piv = r;
        break;
      }
    if (piv < 0) throw InternalError("singular derivative-targeting system");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      S factor = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  return {b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]};
}
}  // namespace detail

template <class S>
Corrector<S> build_corrector(CorrectorRole role, int m, int refine_passes = 1) {
  if (m < 4) throw ContractError("corrector needs level >= 4");

  std::array<GraphFunction<S>, 3> basis;
  std::array<std::array<S, 3>, 3> readings;  // readings[i][e] at q_i for basis e
  std::array<std::vector<S>, 3> basis_rhs;
  for (int e = 0; e < 3; ++e) {
    CornerTriple<S> tri{S(0), S(0), S(0)};
    tri[e] = S(1);
    auto h = to_graph(HarmonicFunction<S>{tri}, m);
    PoissonProblem<S> p{m, {S(0), S(0), S(0)}, h.values};
    basis[e] = poisson_solve(p);
    basis_rhs[e] = std::move(h.values);
    for (int i = 0; i < 3; ++i)
      readings[i][e] =
          normal_derivative(basis[e], VertexId{Word(), i}, Direction::Boundary).fit.limit;
  }

  std::array<S, 3> target{S(0), S(0), S(0)};
  target[role == CorrectorRole::V0 ? 0 : 2] = S(1);
  auto beta = detail::solve3<S>(readings, target);

  auto combine = [&](const std::array<S, 3>& w) {
    GraphFunction<S> v = GraphFunction<S>::zero(m);
    for (int e = 0; e < 3; ++e)
      for (size_t i = 0; i < v.values.size(); ++i) v.values[i] += w[e] * basis[e].values[i];
    return v;
  };
  auto measure = [&](const GraphFunction<S>& v) {
    std::array<S, 3> got;
    for (int i = 0; i < 3; ++i)
      got[i] = normal_derivative(v, VertexId{Word(), i}, Direction::Boundary).fit.limit;
    return got;
  };

  GraphFunction<S> v = combine(beta);
  std::array<S, 3> achieved = measure(v);
  for (int pass = 0; pass < refine_passes; ++pass) {
    std::array<S, 3> residual{target[0] - achieved[0], target[1] - achieved[1],
                              target[2] - achieved[2]};
    if (residual == std::array<S, 3>{S(0), S(0), S(0)}) break;
    auto delta = detail::solve3<S>(readings, residual);
    for (int e = 0; e < 3; ++e) beta[e] += delta[e];
    v = combine(beta);
    achieved = measure(v);
  }

  Corrector<S> out{role, m, std::move(v), {beta[0], beta[1], beta[2]}, achieved};

  // Checksums. The finest-level identity sum_i R_m(q_i) = sum_x w_x rhs(x) is
  // exact; the extrapolated sum is compared against the exact integral of the
  // harmonic rhs.
  GraphFunction<S> rhs_fn = GraphFunction<S>::zero(m);
  for (int e = 0; e < 3; ++e)
    for (size_t i = 0; i < rhs_fn.values.size(); ++i)
      rhs_fn.values[i] += beta[e] * basis_rhs[e][i];
  S level_readings(0), extrapolated(0);
  for (int i = 0; i < 3; ++i) {
    auto r = normal_derivative(out.values, VertexId{Word(), i}, Direction::Boundary);
    level_readings += r.terms.back();
    extrapolated += r.fit.limit;
  }
  S interior_mass(0);
  S w_int = tent_measure<S>(m, false);
  for (size_t i = 3; i < rhs_fn.values.size(); ++i) interior_mass += w_int * rhs_fn.values[i];
  out.discrete_gauss_green_gap = level_readings - interior_mass;
  out.gauss_green_gap = extrapolated - integrate(rhs_fn);
  return out;
}

namespace detail {
// out -= weight * (g composed with the inverse cell map), over the descendants
// of base_cell at base_level. g must vanish on V_0 so shared cell corners need
// no contribution.
template <class S>
void subtract_scaled_in_cell(GraphFunction<S>& out, Mesh::Index base_cell, int base_level,
                             const GraphFunction<S>& g, const S& weight) {
  int depth = out.level - base_level;
  if (g.level < depth) throw ContractError("insufficient corrector depth for requested level");
  if (g.values[0] != S(0) || g.values[1] != S(0) || g.values[2] != S(0))
    throw InternalError("cell correction requires zero boundary values");
  const Mesh& mesh = Mesh::at_least(out.level);
  Mesh::Index gbase = base_cell;  // base_cell * 3^(j-1): descendants stay contiguous
  Mesh::Index cells = 1;
  for (int j = 1; j <= depth; ++j) {
    const auto& local_mids = mesh.mids(j);
    const auto& global_mids = mesh.mids(base_level + j);
    for (Mesh::Index lc = 0; lc < cells; ++lc) {
      const auto& lm = local_mids[lc];
      const auto& gm = global_mids[gbase + lc];
      for (int t = 0; t < 3; ++t) out.values[gm.v[t]] -= weight * g.values[lm.v[t]];
    }
    gbase *= 3;
    cells *= 3;
  }
}
}  // namespace detail

// E f = ~E f - sum (12/5) c_{x(n,k)} v_0 placed in the cells F_{w(n,k)} F_0 SG.
// The corrections live strictly above the bottom line, so the restriction to I
// is untouched.
template <class S>
GraphFunction<S> full_extend(const LineFunction<S>& f, int m, const Corrector<S>& v0) {
  if (v0.role != CorrectorRole::V0) throw ContractError("full_extend needs a v0 corrector");
  auto out = tilde_extend(f, m);
  auto plan = make_plan(f);
  const Mesh& mesh = Mesh::at_least(m);
  const S w = fraction<S>(12, 5);
  for (int n = 1; n <= f.level - 1; ++n) {
    for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k) {
      S c = plan.coefficient(n, k);
      if (c == S(0)) continue;
      Mesh::Index base = mesh.bottom(n)[k - 1] * 3 + 0;  // cell F_{w(n,k)} F_0
      detail::subtract_scaled_in_cell(out, base, n + 1, v0.values, S(w * c));
    }
  }
  return out;
}

// Partial-sum scheme E_m: tents and v_0 layers up to level mt only, plus the
// v_2 layer with weights (24/5) Df(mt+1, 2k) over the cells F_{w(mt+1,2k)} SG,
// which repairs the matching condition at the level-mt line junctions.
template <class S>
GraphFunction<S> partial_extend(const LineFunction<S>& f, int mt, int m,
                                const Corrector<S>& v0, const Corrector<S>& v2) {
  if (mt >= f.level) throw ContractError("partial_extend needs truncation below sample level");
  if (mt < 1 || m < mt + 1) throw ContractError("partial_extend level ordering violated");
  if (v0.role != CorrectorRole::V0 || v2.role != CorrectorRole::V2)
    throw ContractError("partial_extend needs v0 and v2 correctors");
  require_level(m);
  auto plan = make_plan(f);
  const Mesh& mesh = Mesh::at_least(m);

  GraphFunction<S> out(0, {plan.harmonic_part.boundary[0], plan.harmonic_part.boundary[1],
                           plan.harmonic_part.boundary[2]});
  for (int n = 1; n <= m; ++n) {
    extend_in_place(out, n);
    if (n <= mt)
      for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k)
        out.values[mesh.apex_vertex_index(n, k)] += plan.coefficient(n, k);
  }
  const S w0 = fraction<S>(12, 5);
  for (int n = 1; n <= mt; ++n)
    for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k) {
      S c = plan.coefficient(n, k);
      if (c == S(0)) continue;
      detail::subtract_scaled_in_cell(out, mesh.bottom(n)[k - 1] * 3 + 0, n + 1, v0.values,
                                      S(w0 * c));
    }
  const S w2 = fraction<S>(24, 5);
  for (uint64_t k = 1; k < (uint64_t(1) << mt); ++k) {
    S d = diff_D(f, mt + 1, 2 * k);
    if (d == S(0)) continue;
    detail::subtract_scaled_in_cell(out, mesh.bottom(mt + 1)[2 * k - 1], mt + 1, v2.values,
                                    S(w2 * d));
  }
  return out;
}

}  // namespace gasket
