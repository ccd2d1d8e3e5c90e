#pragma once

#include <optional>

namespace twinsim::counting {

// Inputs of the 2n-fold coincidence law  cc = f p^n eta^(2n).
struct RateParams {
  double f = 0.0;    // pump repetition rate, Hz
  double p = 0.0;    // mean photon pairs per pulse
  double eta = 1.0;  // overall per-photon efficiency
  int n_fold = 1;    // number of pair sources
};

struct PeakCounts {
  double main = 0.0;
  double side = 0.0;
};

// f * p^n * eta^(2n), counts per second.
double coincidence_rate(const RateParams& params);

// Invert the n = 1 rate law: p = cc / (f eta^2). eta must be in (0, 1].
double estimate_p(double cc, double f, double eta);

// 10 log10((main - side)/side). Requires side > 0; throws std::domain_error
// when main <= side.
double snr_db(const PeakCounts& peaks);

// Small-p scaling model: SNR = 10 log10(1/(p + p_floor)). The optional floor
// is given as the saturation level in dB, p_floor = 10^(-floor_db/10); it
// models the dark/stray-count background that caps the SNR at low p.
double snr_model(double p, std::optional<double> floor_db = std::nullopt);

}  // namespace twinsim::counting
