#pragma once

#include <vector>

#include "gasket/mesh.hpp"
#include "gasket/scalar.hpp"

namespace gasket {

// Values on the level-m vertex set V_m, stored against the mesh's canonical
// vertex indexing. The scalar mode (exact vs floating) is the template type,
// so mixed-mode arithmetic is rejected at compile time.
template <class S>
struct GraphFunction {
  int level = 0;
  std::vector<S> values;

  GraphFunction() = default;
  GraphFunction(int level_, std::vector<S> values_) : level(level_), values(std::move(values_)) {
    if (Mesh::Index(values.size()) != Mesh::at_least(level).vertex_count(level))
      throw ContractError("graph function values not total on V_m");
  }

  static GraphFunction zero(int m) {
    return GraphFunction(m, std::vector<S>(Mesh::at_least(m).vertex_count(m), S(0)));
  }

  const S& at(const VertexId& v) const {
    return values[Mesh::at_least(level).index_of(v)];
  }

  // Restriction of the value table to a coarser vertex set (index prefix).
  GraphFunction truncated(int m) const {
    if (m > level) throw ContractError("cannot truncate upward");
    auto n = Mesh::at_least(m).vertex_count(m);
    return GraphFunction(m, std::vector<S>(values.begin(), values.begin() + n));
  }

  friend bool operator==(const GraphFunction&, const GraphFunction&) = default;
};

template <class S, class F>
GraphFunction<S> map_values(const GraphFunction<S>& u, F&& f) {
  GraphFunction<S> out = u;
  for (auto& v : out.values) v = f(v);
  return out;
}

template <class S>
GraphFunction<S> axpy(const S& alpha, const GraphFunction<S>& x, const GraphFunction<S>& y) {
  if (x.level != y.level) throw ContractError("level mismatch");
  GraphFunction<S> out = y;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += alpha * x.values[i];
  return out;
}

// The q0 <-> q2 reflection symmetry of the gasket, acting on value tables.
template <class S>
GraphFunction<S> reflect_q0q2(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  GraphFunction<S> out = GraphFunction<S>::zero(u.level);
  auto swap02 = [](int d) { return d == 0 ? 2 : d == 2 ? 0 : 1; };
  for (Mesh::Index i = 0; i < Mesh::Index(u.values.size()); ++i) {
    VertexId v = mesh.id_of(i);
    Word w;
    for (int j = 0; j < v.word.size(); ++j) w = w.append(swap02(v.word.digit(j)));
    VertexId rv = canonical_vertex(w, swap02(v.corner));
    out.values[mesh.index_of(rv)] = u.values[i];
  }
  return out;
}

}  // namespace gasket
