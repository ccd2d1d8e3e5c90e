#include "twinsim/counting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twinsim::counting {

namespace {

void check(const RateParams& params) {
  if (!(params.f > 0.0)) throw std::invalid_argument("repetition rate must be positive");
  if (!(params.p >= 0.0)) throw std::invalid_argument("p must be non-negative");
  if (!(params.eta >= 0.0 && params.eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in [0, 1]");
  }
  if (params.n_fold < 1) throw std::invalid_argument("n_fold must be at least 1");
}

}  // namespace

double coincidence_rate(const RateParams& params) {
  check(params);
  const double n = static_cast<double>(params.n_fold);
  return params.f * std::pow(params.p, n) * std::pow(params.eta, 2.0 * n);
}

double estimate_p(double cc, double f, double eta) {
  if (!(cc >= 0.0)) throw std::invalid_argument("coincidence rate must be non-negative");
  if (!(f > 0.0)) throw std::invalid_argument("repetition rate must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1], got " + std::to_string(eta));
  }
  return cc / (f * eta * eta);
}

double snr_db(const PeakCounts& peaks) {
  if (!(peaks.side > 0.0)) {
    throw std::invalid_argument("side peak counts must be positive");
  }
  if (!(peaks.main > peaks.side)) {
    throw std::domain_error("SNR undefined: main peak does not exceed the side peak");
  }
  return 10.0 * std::log10((peaks.main - peaks.side) / peaks.side);
}

double snr_model(double p, std::optional<double> floor_db) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  const double p_floor = floor_db ? std::pow(10.0, -*floor_db / 10.0) : 0.0;
  return -10.0 * std::log10(p + p_floor);
}

}  // namespace twinsim::counting
