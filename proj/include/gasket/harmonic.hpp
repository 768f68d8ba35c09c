#pragma once

#include <array>

#include "gasket/graphfn.hpp"
#include "gasket/linefn_fwd.hpp"

namespace gasket {

// Corner values of a cell, in the order (F_w q0, F_w q1, F_w q2).
template <class S>
using CornerTriple = std::array<S, 3>;

// The "1/5 - 2/5" midpoint rule: each midpoint takes weight 2 from its two
// adjacent corners and weight 1 from the opposite one.
template <class S>
inline CornerTriple<S> cell_midpoints(const CornerTriple<S>& t) {
  const S& a = t[0];
  const S& b = t[1];
  const S& c = t[2];
  S s = a + b + c;
  return {(s + a + b) / 5, (s + a + c) / 5, (s + b + c) / 5};  // m01, m02, m12
}

// Corner values of the child cell F_{w d} from those of F_w.
template <class S>
inline CornerTriple<S> child_corners(const CornerTriple<S>& t, int d) {
  auto m = cell_midpoints(t);
  switch (d) {
    case 0: return {t[0], m[0], m[1]};
    case 1: return {m[0], t[1], m[2]};
    default: return {m[1], m[2], t[2]};
  }
}

// A harmonic function, determined by its boundary values (h(q0), h(q1), h(q2)).
template <class S>
struct HarmonicFunction {
  CornerTriple<S> boundary{};

  static HarmonicFunction from_line_samples(const S& f0, const S& fhalf, const S& f1) {
    // h(1/2) = (h(q0) + 2 h(q1) + 2 h(q2)) / 5
    return HarmonicFunction{{S(5) * fhalf - S(2) * f0 - S(2) * f1, f0, f1}};
  }

  CornerTriple<S> corners_at(const Word& w) const {
    CornerTriple<S> t = boundary;
    for (int i = 0; i < w.size(); ++i) t = child_corners(t, w.digit(i));
    return t;
  }

  // O(|w|) point evaluation along the address word; exact for rational data.
  S operator()(const VertexId& v) const { return corners_at(v.word)[v.corner]; }
};

// Harmonic extension sweep: values on V_m kept, each new midpoint receives the
// midpoint-rule weights from its cell's corners. Each sweep is the unique
// minimizer of the next-level energy among extensions of u.
template <class S>
void extend_in_place(GraphFunction<S>& u, int m) {
  const Mesh& mesh = Mesh::at_least(m);
  u.values.resize(mesh.vertex_count(m), S(0));
  for (int n = u.level + 1; n <= m; ++n) {
    const auto& par = mesh.cells(n - 1);
    const auto& mids = mesh.mids(n);
    for (size_t c = 0; c < par.size(); ++c) {
      CornerTriple<S> t{u.values[par[c].v[0]], u.values[par[c].v[1]], u.values[par[c].v[2]]};
      auto mv = cell_midpoints(t);
      u.values[mids[c].v[0]] = std::move(mv[0]);
      u.values[mids[c].v[1]] = std::move(mv[1]);
      u.values[mids[c].v[2]] = std::move(mv[2]);
    }
  }
  u.level = m;
}

template <class S>
GraphFunction<S> extend_once(const GraphFunction<S>& u) {
  GraphFunction<S> out = u;
  extend_in_place(out, u.level + 1);
  return out;
}

template <class S>
GraphFunction<S> extend_to(GraphFunction<S> u, int m) {
  extend_in_place(u, m);
  return u;
}

template <class S>
GraphFunction<S> to_graph(const HarmonicFunction<S>& h, int m) {
  GraphFunction<S> u(0, {h.boundary[0], h.boundary[1], h.boundary[2]});
  return extend_to(std::move(u), m);
}

// Tent function: 1 at the apex, 0 on the rest of V_m, harmonic below level m.
struct TentFunction {
  VertexId apex;
  int level = 0;

  explicit TentFunction(VertexId x) : apex(x), level(x.level()) {
    if (!is_canonical(x)) throw ContractError("tent apex must be canonical");
  }
};

namespace detail {
// Evaluate the harmonic delta-at-corner function inside a support cell.
template <class S>
S eval_in_cell(const Word& cell, int corner, const VertexId& v) {
  if (!cell.is_prefix_of(v.word)) return S(0);
  HarmonicFunction<S> h;
  h.boundary = CornerTriple<S>{S(0), S(0), S(0)};
  h.boundary[corner] = S(1);
  Word rest;
  for (int i = cell.size(); i < v.word.size(); ++i) rest = rest.append(v.word.digit(i));
  return h(VertexId{rest, v.corner});
}
}  // namespace detail

// Support is contained in the (at most two) level-m cells meeting the apex.
template <class S>
S tent_eval(const TentFunction& t, const VertexId& v) {
  if (!is_canonical(v)) throw ContractError("tent_eval expects a canonical vertex");
  if (v.level() <= t.level) return v == t.apex ? S(1) : S(0);
  S val = detail::eval_in_cell<S>(t.apex.word, t.apex.corner, v);
  if (auto twin = twin_address(t.apex)) {
    if (twin->word != t.apex.word)  // distinct support cell
      val += detail::eval_in_cell<S>(twin->word, twin->corner, v);
  }
  return val;
}

template <class S>
GraphFunction<S> to_graph(const TentFunction& t, int m) {
  if (m < t.level) throw ContractError("tent graph needs level >= apex level");
  const Mesh& mesh = Mesh::at_least(t.level);
  auto u = GraphFunction<S>::zero(t.level);
  u.values[mesh.index_of(t.apex)] = S(1);
  return extend_to(std::move(u), m);
}

// Midpoint prediction from the coarser dyadic samples: the value a harmonic
// function must take at (2k-1)/2^n given its level-(n-1) samples.
template <class S>
S midpoint_predict(const LineFunction<S>& f, int n, uint64_t k);

}  // namespace gasket
