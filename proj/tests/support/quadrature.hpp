#pragma once

// Independent tail probabilities for test oracles: plain composite Simpson
// integration of the densities, written from the textbook formulas.

#include <cmath>
#include <functional>
#include <numbers>

namespace chessmap::fixtures {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// ∫_a^∞ f(t) dt with t = a / s, s in (0, 1].
inline double upper_tail(const std::function<double(double)>& f, double a) {
  auto g = [&](double s) { return s <= 0 ? 0.0 : f(a / s) * a / (s * s); };
  return simpson(g, 0.0, 1.0);
}

inline double t_density(double t, double nu) {
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * std::numbers::pi);
  return c * std::pow(1 + t * t / nu, -(nu + 1) / 2);
}

inline double t_two_tailed(double t, double nu) {
  t = std::abs(t);
  if (t == 0) return 1.0;
  return 2 * upper_tail([nu](double x) { return t_density(x, nu); }, t);
}

inline double chi2_density(double x, double k) {
  if (x <= 0) return 0;
  return std::exp((k / 2 - 1) * std::log(x) - x / 2 - (k / 2) * std::log(2.0) - std::lgamma(k / 2));
}

inline double chi2_upper(double x, double k) {
  if (x <= 0) return 1.0;
  return upper_tail([k](double v) { return chi2_density(v, k); }, x);
}

}  // namespace chessmap::fixtures
