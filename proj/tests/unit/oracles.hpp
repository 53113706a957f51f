#pragma once

// Reference implementations used only by tests.  Everything here is computed
// from first principles (classical series, continued fractions, bisection,
// direct loops) so the library is checked against independent arithmetic,
// not against itself.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

inline double gauss_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Upper tail of the standard normal.  Near the center: the odd double
// factorial series Q(x) = 1/2 - pdf(x) * sum x^(2n+1)/(2n+1)!!.  In the
// tail: the Gauss continued fraction for the Mills ratio,
// Q(x) = pdf(x) / (x + 1/(x + 2/(x + 3/...))), evaluated bottom-up.
// Worst case relative error is ~3e-14 at the branch point.
inline double q_function(double x) {
  if (x < 0.0) return 1.0 - q_function(-x);
  if (x < 3.0) {
    double sum = 0.0, term = x;
    for (int n = 0; term > 1e-18 * sum; ++n) {
      sum += term;
      term *= x * x / (2.0 * n + 3.0);
    }
    return 0.5 - gauss_pdf(x) * sum;
  }
  double denom = x;
  for (int n = 500; n >= 1; --n) denom = x + n / denom;
  return gauss_pdf(x) / denom;
}

inline double q_inverse(double eps) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_function(mid) > eps) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

inline double dispersion(double g) {
  return 1.0 - 1.0 / ((1.0 + g) * (1.0 + g));
}

inline double fbl_rate(double g, double blocklength, double eps) {
  const double d = q_inverse(eps) / std::sqrt(blocklength) / std::log(2.0);
  return std::log2(1.0 + g) - d * std::sqrt(dispersion(g));
}

// Direct-loop SINRs, independent of the library's evaluators.
using cvec = std::vector<std::complex<double>>;

inline std::complex<double> inner(const cvec& h, const cvec& p) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += std::conj(h[i]) * p[i];
  return s;
}

inline double sinr_common(const std::vector<cvec>& h, const cvec& pc,
                          const std::vector<cvec>& pp, int k) {
  double intf = 1.0;
  for (const cvec& p : pp) intf += std::norm(inner(h[k], p));
  return std::norm(inner(h[k], pc)) / intf;
}

inline double sinr_private(const std::vector<cvec>& h,
                           const std::vector<cvec>& pp, int k) {
  double intf = 1.0;
  for (std::size_t j = 0; j < pp.size(); ++j) {
    if (static_cast<int>(j) != k) intf += std::norm(inner(h[k], pp[j]));
  }
  return std::norm(inner(h[k], pp[k])) / intf;
}

}  // namespace oracle
