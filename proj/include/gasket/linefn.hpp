#pragma once

#include <vector>

#include "gasket/graphfn.hpp"
#include "gasket/harmonic.hpp"

namespace gasket {

// Samples f(k/2^m), k = 0..2^m, on the bottom line I.
template <class S>
struct LineFunction {
  int level = 0;
  std::vector<S> samples;

  LineFunction() = default;
  LineFunction(int level_, std::vector<S> samples_)
      : level(level_), samples(std::move(samples_)) {
    require_level(level);
    if (samples.size() != (size_t(1) << level) + 1)
      throw ContractError("line function needs 2^m + 1 samples");
  }

  static LineFunction zero(int m) {
    return LineFunction(m, std::vector<S>((size_t(1) << m) + 1, S(0)));
  }

  uint64_t count() const { return (uint64_t(1) << level) + 1; }

  // f(k/2^n) for n <= level.
  const S& at(int n, uint64_t k) const {
    if (n > level || k > (uint64_t(1) << n))
      throw ContractError("line sample index out of range");
    return samples[k << (level - n)];
  }

  const S& at(const DyadicPoint& p) const { return at(p.n, p.k); }

  // Restriction to even indices; inverse of refinement.
  LineFunction downsample(int m) const {
    if (m > level) throw ContractError("cannot downsample upward");
    std::vector<S> out((size_t(1) << m) + 1);
    for (uint64_t k = 0; k < out.size(); ++k) out[k] = at(m, k);
    return LineFunction(m, std::move(out));
  }

  friend bool operator==(const LineFunction&, const LineFunction&) = default;
};

// Restriction map u -> u|_I: samples are the values at the bottom-line vertices.
template <class S>
LineFunction<S> restrict_to_line(const GraphFunction<S>& u) {
  const Mesh& mesh = Mesh::at_least(u.level);
  const auto& line = mesh.line(u.level);
  std::vector<S> samples(line.size());
  for (size_t k = 0; k < line.size(); ++k) samples[k] = u.values[line[k]];
  return LineFunction<S>(u.level, std::move(samples));
}

namespace detail {
// Refine corner triples of the bottom row of cells one level (O(2^m) total).
template <class S>
std::vector<CornerTriple<S>> refine_strip(const std::vector<CornerTriple<S>>& strip) {
  std::vector<CornerTriple<S>> next(strip.size() * 2);
  for (size_t c = 0; c < strip.size(); ++c) {
    auto mv = cell_midpoints(strip[c]);
    next[2 * c] = {mv[0], strip[c][1], mv[2]};
    next[2 * c + 1] = {mv[1], mv[2], strip[c][2]};
  }
  return next;
}

template <class S>
LineFunction<S> strip_to_line(const std::vector<CornerTriple<S>>& strip, int m) {
  std::vector<S> samples((size_t(1) << m) + 1);
  for (size_t c = 0; c < strip.size(); ++c) samples[c] = strip[c][1];
  samples.back() = strip.back()[2];
  return LineFunction<S>(m, std::move(samples));
}
}  // namespace detail

// Harmonic restrictions only need the bottom row of cells.
template <class S>
LineFunction<S> restrict_to_line(const HarmonicFunction<S>& h, int m) {
  std::vector<CornerTriple<S>> strip{h.boundary};
  for (int n = 1; n <= m; ++n) strip = detail::refine_strip(strip);
  return detail::strip_to_line(strip, m);
}

// Trace of a tent function. Each support cell meets I either in a whole
// subinterval (bottom cells) or in at most a vertex of V_m, where the tent
// vanishes anyway.
template <class S>
LineFunction<S> tent_trace(const TentFunction& t, int m) {
  if (m < t.level) throw ContractError("tent trace needs level >= apex level");
  auto f = LineFunction<S>::zero(m);
  auto add_cell = [&](const Word& w, int corner) {
    if (!w.all_in_12()) return;
    HarmonicFunction<S> h;
    h.boundary = CornerTriple<S>{S(0), S(0), S(0)};
    h.boundary[corner] = S(1);
    auto local = restrict_to_line(h, m - w.size());
    PairIndex cell = pair_of_word(w);
    uint64_t base = (cell.k - 1) << (m - w.size());
    for (uint64_t j = 0; j < local.count(); ++j) f.samples[base + j] = local.samples[j];
  };
  add_cell(t.apex.word, t.apex.corner);
  if (auto twin = twin_address(t.apex)) add_cell(twin->word, twin->corner);
  return f;
}

template <class S>
S midpoint_predict(const LineFunction<S>& f, int n, uint64_t k) {
  if (n < 2 || n > f.level || k < 1 || k > (uint64_t(1) << (n - 1)))
    throw ContractError("midpoint_predict index out of range");
  auto g = [&](uint64_t j) -> const S& { return f.at(n - 1, j); };
  if (k % 2 == 1)
    return (S(4) * g(k) + fraction<S>(8, 5) * g(k - 1) - fraction<S>(3, 5) * g(k + 1)) / 5;
  return (S(4) * g(k - 1) + fraction<S>(8, 5) * g(k) - fraction<S>(3, 5) * g(k - 2)) / 5;
}

}  // namespace gasket
