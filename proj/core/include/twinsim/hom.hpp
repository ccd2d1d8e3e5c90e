#pragma once

#include <optional>
#include <span>
#include <vector>

#include "twinsim/source.hpp"

namespace twinsim::hom {

// Transmittances and efficiencies of the two-photon interferometer:
// per-arm transmittances eta_a/eta_b, mode-matching efficiency eta_m
// (modelled as two beam splitters diverting mismatched light into auxiliary
// modes that still reach the detectors), and threshold-detector efficiencies.
struct SetupParams {
  double eta_a = 1.0;
  double eta_b = 1.0;
  double eta_m = 1.0;
  double eta_d1 = 1.0;
  double eta_d2 = 1.0;
};

// Throws std::invalid_argument when any field is outside [0, 1].
void validate(const SetupParams& setup);

struct CoincidencePair {
  double cc_min = 0.0;   // coincidence probability per pulse at zero delay
  double cc_mean = 0.0;  // coincidence probability per pulse at large delay
};

struct VisibilityPoint {
  double p = 0.0;
  double v = 0.0;
  std::optional<double> sigma_v;
  bool limit = false;  // v was evaluated as the p -> 0 limit
};

// Zero-delay coincidence probability per pulse. The eight-index detector sum
// is collapsed before looping: the 50/50 splits of the auxiliary modes admit
// a closed-form expectation over the detector-miss factors, leaving live
// indices (n, k1, k2, k3, k4) plus the precomputed interference table.
double cc_min(const source::SourceParams& src, const SetupParams& setup,
              const source::TruncationConfig& trunc);

// Large-delay coincidence probability per pulse (no interference, mode
// matching irrelevant).
double cc_mean(const source::SourceParams& src, const SetupParams& setup,
               const source::TruncationConfig& trunc);

// Both rates from one set of shared tables.
CoincidencePair coincidences(const source::SourceParams& src, const SetupParams& setup,
                             const source::TruncationConfig& trunc);

// V = (cc_mean - cc_min)/cc_mean. Throws DegenerateSetupError when
// cc_mean == 0 (e.g. eta_a = 0 or a dead detector).
double visibility(const source::SourceParams& src, const SetupParams& setup,
                  const source::TruncationConfig& trunc);

struct CurveOptions {
  double tail_tolerance = 1e-9;
  int truncation_cap = source::kDefaultTruncationCap;
  // When set, every point uses this pair cutoff instead of the adaptive
  // per-point truncation level.
  std::optional<int> fixed_n_max;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Visibility at each grid point. Points are independent and may be evaluated
// concurrently; output order always matches input order. p = 0 entries are
// evaluated at p = 1e-8 and flagged as limits. Per-point failures are
// re-thrown with the offending p in the message.
std::vector<VisibilityPoint> visibility_curve(std::span<const double> p_grid,
                                              const SetupParams& setup,
                                              const CurveOptions& options = {});
std::vector<VisibilityPoint> visibility_curve(std::span<const double> p_grid,
                                              const SetupParams& setup,
                                              double tail_tolerance);

}  // namespace twinsim::hom
