#pragma once

#include <vector>

namespace twinsim::source {

inline constexpr int kDefaultTruncationCap = 64;

// Pulsed two-mode squeezed vacuum source. The squeezing parameter lambda and
// the mean photon pairs per pulse p are kept in sync: p = lambda^2/(1-lambda^2).
struct SourceParams {
  double lambda = 0.0;
  double p = 0.0;

  static SourceParams from_p(double p);
  static SourceParams from_lambda(double lambda);

  double lambda_sq() const { return lambda * lambda; }
};

double lambda_from_p(double p);
double p_from_lambda(double lambda);

// Fock cutoff bounding the geometric pair-number tail of every summation.
struct TruncationConfig {
  int n_max = 0;
  double tail_tolerance = 1e-9;

  static TruncationConfig for_source(const SourceParams& s, double tail_tolerance,
                                     int cap = kDefaultTruncationCap);
  // Explicit cutoff, e.g. for reproducing reference tables computed at a
  // fixed pair number.
  static TruncationConfig fixed(int n_max);
};

// Smallest N with (lambda^2)^(N+1) <= tail_tolerance. Throws
// TruncationCapError when that N would exceed `cap`.
int truncation_level(double lambda, double tail_tolerance,
                     int cap = kDefaultTruncationCap);

// P(n pairs) = (1-lambda^2) lambda^(2n) for n = 0..n_max.
std::vector<double> pair_number_pmf(const SourceParams& s, const TruncationConfig& trunc);

}  // namespace twinsim::source
