#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gasket/linefn.hpp"

namespace gasket {

// First differences A_n(f)_k = f(k/2^n) - f((k-1)/2^n), k = 1..2^n.
template <class S>
std::vector<S> diff_A(const LineFunction<S>& f, int n) {
  if (n > f.level) throw ContractError("diff_A level exceeds data");
  std::vector<S> out(uint64_t(1) << n);
  for (uint64_t k = 1; k <= out.size(); ++k) out[k - 1] = f.at(n, k) - f.at(n, k - 1);
  return out;
}

template <class S>
S norm_sq(const std::vector<S>& v) {
  S acc(0);
  for (const S& x : v) acc += x * x;
  return acc;
}

// Harmonic-prediction residual at the midpoint of the k-th level-n interval.
// Built to annihilate restrictions of harmonic functions.
template <class S>
S diff_Dtilde(const LineFunction<S>& f, int n, uint64_t k) {
  if (n < 1 || n + 1 > f.level || k < 1 || k > (uint64_t(1) << n))
    throw ContractError("diff_Dtilde index out of range");
  const S& mid = f.at(n + 1, 2 * k - 1);
  if (k % 2 == 1)
    return mid - fraction<S>(4, 5) * f.at(n, k) - fraction<S>(8, 25) * f.at(n, k - 1) +
           fraction<S>(3, 25) * f.at(n, k + 1);
  return mid - fraction<S>(4, 5) * f.at(n, k - 1) - fraction<S>(8, 25) * f.at(n, k) +
         fraction<S>(3, 25) * f.at(n, k - 2);
}

// Junction-aware refinement of D~: odd k routes to D~ one level up, even k
// detects matching-condition failure at the dyadic junction k/2^n.
template <class S>
S diff_D(const LineFunction<S>& f, int n, uint64_t k) {
  if (n < 2 || n > f.level || k < 1 || k >= (uint64_t(1) << n))
    throw ContractError("diff_D index out of range");
  if (k % 2 == 1) return diff_Dtilde(f, n - 1, (k + 1) / 2);
  return f.at(n, k) - fraction<S>(5, 8) * (f.at(n, k - 1) + f.at(n, k + 1)) +
         fraction<S>(1, 8) * (f.at(n, k - 2) + f.at(n, k + 2));
}

enum class DifferenceKind { A, Dtilde, D };

// Full table of one difference operator over its valid index range.
template <class S>
struct DifferenceTable {
  DifferenceKind kind = DifferenceKind::A;
  int min_level = 0;
  std::vector<std::vector<S>> rows;  // rows[i] holds level n = min_level + i

  const std::vector<S>& row(int n) const { return rows[n - min_level]; }
  int max_level() const { return min_level + int(rows.size()) - 1; }
};

template <class S>
DifferenceTable<S> a_table(const LineFunction<S>& f) {
  DifferenceTable<S> t{DifferenceKind::A, 0, {}};
  for (int n = 0; n <= f.level; ++n) t.rows.push_back(diff_A(f, n));
  return t;
}

template <class S>
DifferenceTable<S> dtilde_table(const LineFunction<S>& f) {
  DifferenceTable<S> t{DifferenceKind::Dtilde, 1, {}};
  for (int n = 1; n + 1 <= f.level; ++n) {
    std::vector<S> row(uint64_t(1) << n);
    for (uint64_t k = 1; k <= row.size(); ++k) row[k - 1] = diff_Dtilde(f, n, k);
    t.rows.push_back(std::move(row));
  }
  return t;
}

template <class S>
DifferenceTable<S> d_table(const LineFunction<S>& f) {
  DifferenceTable<S> t{DifferenceKind::D, 2, {}};
  for (int n = 2; n <= f.level; ++n) {
    std::vector<S> row((uint64_t(1) << n) - 1);
    for (uint64_t k = 1; k <= row.size(); ++k) row[k - 1] = diff_D(f, n, k);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Critical orders and recursion eigenvalues.
struct CriticalConstants {
  double b1 = std::log(3.0) / std::log(5.0);
  double lambda_plus = (17.0 + std::sqrt(73.0)) / 50.0;
  double lambda_minus = (17.0 - std::sqrt(73.0)) / 50.0;
  double b2 = std::log(25.0 * (17.0 - std::sqrt(73.0)) / 36.0) / std::log(5.0);
  double log6_log5 = std::log(6.0) / std::log(5.0);
  double two_minus_b1 = 2.0 - std::log(3.0) / std::log(5.0);

  // alpha(sigma): the unique alpha with 5^sigma 3^-1 = 2^(2 alpha - 1).
  double alpha(double sigma) const {
    return (std::log(2.0) + sigma * std::log(5.0) - std::log(3.0)) / (2.0 * std::log(2.0));
  }
  double sigma_of_alpha(double a) const {
    return ((2.0 * a - 1.0) * std::log(2.0) + std::log(3.0)) / std::log(5.0);
  }
  double alpha_b2() const { return alpha(b2); }
};

inline const CriticalConstants& constants() {
  static const CriticalConstants c;
  return c;
}

enum class NormSpace { Besov, Ttilde, T, Tinf, SobolevCoefficient, Sigma2 };

inline std::string norm_space_name(NormSpace s) {
  switch (s) {
    case NormSpace::Besov: return "besov";
    case NormSpace::Ttilde: return "ttilde";
    case NormSpace::T: return "t";
    case NormSpace::Tinf: return "tinf";
    case NormSpace::SobolevCoefficient: return "sobolev";
    case NormSpace::Sigma2: return "sigma2";
  }
  return "?";
}

// A norm value with its per-level decomposition. All infinite sums are
// truncated at the data's level; per-level terms let convergence be judged by
// ratio trends rather than one number.
struct NormReport {
  NormSpace space = NormSpace::Besov;
  double parameter = 0.0;  // alpha or sigma; 0 when not applicable
  double value = 0.0;
  double base_term = 0.0;          // endpoint / L^2 part of value^2 (not for Tinf)
  std::vector<int> levels;
  std::vector<double> terms;       // per-level contribution (Tinf: per-level max)
  std::vector<double> partials;    // running value after each level
  int truncation_level = 0;
};

namespace detail {
inline void finish_report(NormReport& r) {
  double acc = r.base_term;
  r.partials.clear();
  for (double t : r.terms) {
    acc += t;
    r.partials.push_back(std::sqrt(acc));
  }
  r.value = std::sqrt(acc);
}
}  // namespace detail

// Trapezoid rule for ||f||^2_{L^2(I)} at the sample level.
template <class S>
double l2_line_sq(const LineFunction<S>& f) {
  double h = 1.0 / double(uint64_t(1) << f.level);
  double acc = 0.0;
  for (uint64_t k = 0; k + 1 < f.count(); ++k) {
    double a = to_double(f.samples[k]), b = to_double(f.samples[k + 1]);
    acc += h * (a * a + b * b) / 2.0;
  }
  return acc;
}

// Dyadic Besov characterization, valid for 1/2 < alpha < 1 only:
// value^2 = |f(0)|^2 + |f(1)|^2 + sum_n 2^(2 n alpha) 2^-n ||A_n||^2.
template <class S>
NormReport besov_norm(const LineFunction<S>& f, double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw DomainError("besov_norm: alpha must lie in (1/2, 1)");
  NormReport r{NormSpace::Besov, alpha};
  double f0 = to_double(f.samples.front());
  double f1 = to_double(f.samples.back());
  r.base_term = f0 * f0 + f1 * f1;
  for (int n = 1; n <= f.level; ++n) {
    double an = to_double(norm_sq(diff_A(f, n)));
    r.levels.push_back(n);
    r.terms.push_back(std::pow(2.0, 2.0 * n * alpha - n) * an);
  }
  r.truncation_level = f.level;
  detail::finish_report(r);
  return r;
}

// value^2 = ||f||^2_{L^2(I)} + sum_{n,k} 5^(n sigma) 3^-n |D~f(n,k)|^2.
template <class S>
NormReport ttilde_norm(const LineFunction<S>& f, double sigma) {
  if (!(sigma > constants().b1))
    throw DomainError("ttilde_norm: sigma must exceed log3/log5");
  NormReport r{NormSpace::Ttilde, sigma};
  r.base_term = l2_line_sq(f);
  for (int n = 1; n + 1 <= f.level; ++n) {
    double sum = 0.0;
    for (uint64_t k = 1; k <= (uint64_t(1) << n); ++k) {
      double d = to_double(diff_Dtilde(f, n, k));
      sum += d * d;
    }
    r.levels.push_back(n);
    r.terms.push_back(std::pow(5.0, sigma * n) * std::pow(3.0, -n) * sum);
  }
  r.truncation_level = f.level;
  detail::finish_report(r);
  return r;
}

// value^2 = ||f||^2_{L^2(I)} + sum_{n,k} 5^(sigma n) 3^-n |Df(n,k)|^2.
template <class S>
NormReport t_norm(const LineFunction<S>& f, double sigma) {
  if (!(sigma > constants().b1))
    throw DomainError("t_norm: sigma must exceed log3/log5");
  NormReport r{NormSpace::T, sigma};
  r.base_term = l2_line_sq(f);
  for (int n = 2; n <= f.level; ++n) {
    double sum = 0.0;
    for (uint64_t k = 1; k < (uint64_t(1) << n); ++k) {
      double d = to_double(diff_D(f, n, k));
      sum += d * d;
    }
    r.levels.push_back(n);
    r.terms.push_back(std::pow(5.0, sigma * n) * std::pow(3.0, -n) * sum);
  }
  r.truncation_level = f.level;
  detail::finish_report(r);
  return r;
}

// sup-norm variant: value = max over (n,k) of 5^n |Df(n,k)|, per-level maxima
// reported.
template <class S>
NormReport tinf_norm(const LineFunction<S>& f) {
  if (f.level < 2) throw ContractError("tinf_norm needs level >= 2");
  NormReport r{NormSpace::Tinf, 0.0};
  double overall = 0.0;
  for (int n = 2; n <= f.level; ++n) {
    double mx = 0.0;
    for (uint64_t k = 1; k < (uint64_t(1) << n); ++k)
      mx = std::max(mx, std::abs(to_double(diff_D(f, n, k))));
    mx *= std::pow(5.0, n);
    overall = std::max(overall, mx);
    r.levels.push_back(n);
    r.terms.push_back(mx);
    r.partials.push_back(overall);
  }
  r.value = overall;
  r.truncation_level = f.level;
  return r;
}

}  // namespace gasket
