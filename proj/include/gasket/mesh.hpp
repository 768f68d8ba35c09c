#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "gasket/address.hpp"
#include "gasket/config.hpp"

namespace gasket {

// Level structure of SG. Vertices are indexed in creation order (q0,q1,q2,
// then the midpoints of each level, parents in word order), so the index set
// of V_m is a prefix of the index set of V_{m+1}. Cells at level j are stored
// in word order; the children of cell c are 3c+0, 3c+1, 3c+2.
class Mesh {
 public:
  using Index = int32_t;
  struct Cell {
    std::array<Index, 3> v;  // corners F_w q_0, F_w q_1, F_w q_2
  };

  // Shared instance grown on demand; references remain valid across growth.
  static const Mesh& at_least(int level) {
    require_level(level);
    static Mesh mesh;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    mesh.grow_to(level);
    return mesh;
  }

  int built_level() const { return int(cells_.size()) - 1; }
  Index vertex_count(int level) const { return nv_[level]; }
  static constexpr Index vertex_count_formula(int level) {
    Index c = 1;
    for (int i = 0; i <= level; ++i) c *= 3;
    return (c + 3) / 2;
  }

  const std::vector<Cell>& cells(int level) const { return cells_[level]; }
  // mids(j)[c] are the midpoint ids (m01, m02, m12) created inside level-(j-1) cell c.
  const std::vector<Cell>& mids(int level) const { return mids_[level]; }
  // line(j)[k] is the vertex at k/2^j.
  const std::vector<Index>& line(int level) const { return line_[level]; }
  // bottom(j)[k-1] is the cell index of F_{w(j,k)}.
  const std::vector<Index>& bottom(int level) const { return bottom_[level]; }

  Index line_vertex(int level, uint64_t k) const { return line_[level][k]; }
  // x_(n,k) = F_{w(n,k)} q_0.
  Index apex_vertex_index(int n, uint64_t k) const {
    return cells_[n][bottom_[n][k - 1]].v[0];
  }

  bool is_boundary(Index i) const { return i < 3; }
  int vertex_level(Index i) const {
    int j = 0;
    while (nv_[j] <= i) ++j;
    return j;
  }

  VertexId id_of(Index i) const { return unpack_vertex(addr_[i]); }

  Index index_of(const VertexId& v) const {
    auto it = index_.find(v.packed());
    if (it == index_.end()) throw DomainError("vertex " + v.str() + " not in built mesh");
    return it->second;
  }

  // Cell index of the word w at level |w|.
  Index cell_index(const Word& w) const {
    Index c = 0;
    for (int i = 0; i < w.size(); ++i) c = 3 * c + w.digit(i);
    return c;
  }

 private:
  Mesh() {
    cells_.reserve(kHardLevelCap + 1);
    mids_.reserve(kHardLevelCap + 1);
    line_.reserve(kHardLevelCap + 1);
    bottom_.reserve(kHardLevelCap + 1);
    nv_.reserve(kHardLevelCap + 1);
    cells_.push_back({Cell{{0, 1, 2}}});
    mids_.push_back({});
    line_.push_back({1, 2});
    bottom_.push_back({0});
    nv_.push_back(3);
    for (int c = 0; c < 3; ++c) {
      VertexId v{Word(), c};
      addr_.push_back(v.packed());
      index_.emplace(v.packed(), c);
    }
  }

  static VertexId unpack_vertex(uint64_t packed) {
    int corner = int(packed & 3u);
    uint64_t wp = packed >> 2;
    int len = int(wp >> 48);
    Word w;
    for (int i = 0; i < len; ++i) w = w.append(int((wp >> (2 * i)) & 3u));
    return VertexId{w, corner};
  }

  void grow_to(int level) {
    while (built_level() < level) {
      int j = built_level() + 1;
      const auto& par = cells_[j - 1];
      std::vector<Cell> mid(par.size());
      std::vector<Cell> child(par.size() * 3);
      Index n = nv_[j - 1];
      // Canonical address of the midpoint between corners i<j of cell w is (w.i, j).
      std::vector<Word> words = level_words(j - 1);
      for (size_t c = 0; c < par.size(); ++c) {
        const auto& [a, b, d] = par[c].v;
        Index m01 = n++, m02 = n++, m12 = n++;
        mid[c] = Cell{{m01, m02, m12}};
        child[3 * c + 0] = Cell{{a, m01, m02}};
        child[3 * c + 1] = Cell{{m01, b, m12}};
        child[3 * c + 2] = Cell{{m02, m12, d}};
        register_vertex(m01, VertexId{words[c].append(0), 1});
        register_vertex(m02, VertexId{words[c].append(0), 2});
        register_vertex(m12, VertexId{words[c].append(1), 2});
      }
      mids_.push_back(std::move(mid));
      cells_.push_back(std::move(child));
      nv_.push_back(n);

      const auto& pb = bottom_[j - 1];
      std::vector<Index> nb(pb.size() * 2);
      std::vector<Index> nl(line_[j - 1].size() * 2 - 1);
      for (size_t k = 0; k < pb.size(); ++k) {
        nb[2 * k] = 3 * pb[k] + 1;
        nb[2 * k + 1] = 3 * pb[k] + 2;
        nl[2 * k] = line_[j - 1][k];
        nl[2 * k + 1] = mids_[j][pb[k]].v[2];  // m12 lands on the line
      }
      nl.back() = line_[j - 1].back();
      bottom_.push_back(std::move(nb));
      line_.push_back(std::move(nl));
    }
  }

  void register_vertex(Index i, VertexId v) {
    addr_.push_back(v.packed());
    index_.emplace(v.packed(), i);
  }

  std::vector<Word> level_words(int level) const {
    std::vector<Word> out;
    out.reserve(cells_[level].size());
    Word w;
    build_words(w, level, out);
    return out;
  }

  static void build_words(Word w, int remaining, std::vector<Word>& out) {
    if (remaining == 0) {
      out.push_back(w);
      return;
    }
    for (int d = 0; d < 3; ++d) build_words(w.append(d), remaining - 1, out);
  }

  std::vector<std::vector<Cell>> cells_;
  std::vector<std::vector<Cell>> mids_;
  std::vector<std::vector<Index>> line_;
  std::vector<std::vector<Index>> bottom_;
  std::vector<Index> nv_;
  std::vector<uint64_t> addr_;
  std::unordered_map<uint64_t, Index> index_;
};

enum class VertexSet { V, Vtilde, U, NU };

// Vertex enumeration with the V_m / ~V_m / U_m / NU_m selectors.
inline std::vector<VertexId> enumerate_vertices(int m, VertexSet sel = VertexSet::V) {
  const Mesh& mesh = Mesh::at_least(m);
  std::vector<VertexId> out;
  switch (sel) {
    case VertexSet::V:
      for (Mesh::Index i = 0; i < mesh.vertex_count(m); ++i) out.push_back(mesh.id_of(i));
      break;
    case VertexSet::Vtilde: {
      Mesh::Index lo = m == 0 ? 0 : mesh.vertex_count(m - 1);
      for (Mesh::Index i = lo; i < mesh.vertex_count(m); ++i) out.push_back(mesh.id_of(i));
      break;
    }
    case VertexSet::U:
      for (auto i : mesh.line(m)) out.push_back(mesh.id_of(i));
      break;
    case VertexSet::NU:
      for (uint64_t k = 1; k <= (uint64_t(1) << m); ++k)
        out.push_back(mesh.id_of(mesh.apex_vertex_index(m, k)));
      break;
  }
  return out;
}

}  // namespace gasket
