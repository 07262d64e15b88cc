#include "dimc/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace dimc {

std::string_view to_string(Estimator e) { return e == Estimator::mpmc ? "mpmc" : "sve"; }

double pearson_chi_square(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("chi-square undefined: support mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      const double d = q[i] - p[i];
      sum += d * d / p[i];
    } else if (q[i] > 0.0) {
      throw std::domain_error("chi-square undefined: reference has zero mass where other is positive");
    }
  }
  return sum;
}

double empirical_relative_error(std::span<const double> log_a_hat, double true_log_a) {
  if (log_a_hat.size() < 2)
    throw std::invalid_argument("empirical_relative_error: need at least two draws");
  double sum = 0.0;
  for (double v : log_a_hat) {
    const double e = std::expm1(v - true_log_a);
    sum += e * e;
  }
  return sum / static_cast<double>(log_a_hat.size());
}

}  // namespace dimc
