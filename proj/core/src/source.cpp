#include "twinsim/source.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "twinsim/errors.hpp"

namespace twinsim::source {

double lambda_from_p(double p) {
  if (!(p >= 0.0)) {
    throw std::invalid_argument("mean pairs per pulse must be non-negative, got " +
                                std::to_string(p));
  }
  return std::sqrt(p / (1.0 + p));
}

double p_from_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("squeezing parameter must lie in [0, 1), got " +
                                std::to_string(lambda));
  }
  const double l2 = lambda * lambda;
  return l2 / (1.0 - l2);
}

SourceParams SourceParams::from_p(double p) {
  SourceParams s;
  s.p = p;
  s.lambda = lambda_from_p(p);
  return s;
}

SourceParams SourceParams::from_lambda(double lambda) {
  SourceParams s;
  s.lambda = lambda;
  s.p = p_from_lambda(lambda);
  return s;
}

int truncation_level(double lambda, double tail_tolerance, int cap) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("squeezing parameter must lie in [0, 1)");
  }
  if (!(tail_tolerance > 0.0)) {
    throw std::invalid_argument("tail tolerance must be positive");
  }
  const double l2 = lambda * lambda;
  if (l2 == 0.0) return 0;
  int n = 0;
  double tail = l2;  // (lambda^2)^(n+1)
  while (tail > tail_tolerance) {
    ++n;
    tail *= l2;
    if (n > cap) {
      throw TruncationCapError(
          "truncation level for lambda=" + std::to_string(lambda) + ", tolerance=" +
          std::to_string(tail_tolerance) + " exceeds the hard cap " + std::to_string(cap));
    }
  }
  return n;
}

TruncationConfig TruncationConfig::for_source(const SourceParams& s,
                                              double tail_tolerance, int cap) {
  return TruncationConfig{truncation_level(s.lambda, tail_tolerance, cap),
                          tail_tolerance};
}

TruncationConfig TruncationConfig::fixed(int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  // A fixed cutoff makes no tail promise.
  return TruncationConfig{n_max, 1.0};
}

std::vector<double> pair_number_pmf(const SourceParams& s, const TruncationConfig& trunc) {
  if (trunc.n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  const double l2 = s.lambda_sq();
  std::vector<double> pmf(static_cast<std::size_t>(trunc.n_max) + 1);
  double w = 1.0 - l2;
  for (int n = 0; n <= trunc.n_max; ++n) {
    pmf[static_cast<std::size_t>(n)] = w;
    w *= l2;
  }
  return pmf;
}

}  // namespace twinsim::source
