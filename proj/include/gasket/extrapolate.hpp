#pragma once

#include <cstddef>
#include <vector>

#include "gasket/scalar.hpp"

namespace gasket {

// Geometric tail fit c0 + c1 rho^m through the last three readings, with rho
// estimated from successive differences (Aitken form). Falls back to the last
// reading when the tail is constant or not contracting.
template <class S>
struct TailFit {
  S limit{};
  S ratio{};       // estimated rho; 0 when not fitted
  bool fitted = false;
};

template <class S>
inline TailFit<S> geometric_tail_fit(const std::vector<S>& seq) {
  TailFit<S> out;
  if (seq.empty()) return out;
  out.limit = seq.back();
  if (seq.size() < 3) return out;
  const S& r2 = seq[seq.size() - 1];
  const S& r1 = seq[seq.size() - 2];
  const S& r0 = seq[seq.size() - 3];
  S d1 = r2 - r1;
  S d0 = r1 - r0;
  if (d0 == 0 || d1 == 0) return out;  // constant tail: limit is the reading itself
  S rho = d1 / d0;
  bool contracting;
  if constexpr (is_exact_v<S>)
    contracting = (rho < 1 && rho > -1);
  else
    contracting = std::abs(to_double(rho)) < 1.0;
  if (!contracting) return out;
  out.limit = r2 + d1 * rho / (S(1) - rho);
  out.ratio = rho;
  out.fitted = true;
  return out;
}

}  // namespace gasket
