#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace twinsim::toa {

struct ToAConfig {
  double rep_rate = 76e6;           // pulse repetition rate, Hz
  double p = 0.0;                   // mean photon pairs per pulse
  double eta_start = 1.0;           // overall efficiency, start arm
  double eta_stop = 1.0;            // overall efficiency, stop arm
  double jitter_sigma = 68e-12;     // per-detector Gaussian timing jitter, s
  double system_resolution = 0.5e-9;  // FWHM of the instrument response, s
  double dark_rate = 0.0;           // dark counts per second per detector
  double bin_width = 100e-12;       // s
  double duration = 1.0;            // simulated acquisition time, s
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument on out-of-range fields, including
// bin_width >= 1/rep_rate (peaks would be indistinguishable by construction).
void validate(const ToAConfig& config);

// Start-stop time-difference histogram. The axis is delay-compensated:
// bin i spans [origin - half_span + i*bin_width, ...), with the main
// (same-pulse) peak nominally at `origin` = 0 and side peaks at integer
// multiples of the pulse period.
struct ToAHistogram {
  double bin_width = 0.0;
  std::vector<std::int64_t> counts;
  double origin = 0.0;

  double bin_start(std::size_t i) const {
    return origin - 0.5 * static_cast<double>(counts.size()) * bin_width +
           static_cast<double>(i) * bin_width;
  }
  std::int64_t total() const;
};

// Simulates a single-hit start-stop interval analyzer. Per pulse, the pair
// number is drawn from the geometric pulse statistics of the squeezed
// source; each arm clicks when at least one thinned photon survives; dark
// counts are Poisson. The stop channel is delayed by half the histogram
// span, the converter records the first delayed stop within range and
// ignores starts while armed. Recorded differences are smeared by the
// per-detector jitter and the Gaussian instrument response.
//
// Deterministic for a fixed seed. Disjoint pulse segments draw from
// independent streams derived from (seed, segment), so the result is
// bit-identical for any thread count (threads = 0 picks the hardware
// concurrency).
ToAHistogram simulate_histogram(const ToAConfig& config, unsigned threads = 0);

// Peak-based SNR in dB. Resolved mode: main = value of the highest bin,
// side = mean of the side-peak values one pulse period away on each side
// (local maxima within +-3 bins of the nominal offsets). Unresolved mode
// (side peaks merged into the main peak's shoulders): side = mean of the
// local maxima within 5 pulse periods of the main peak, excluding its FWHM
// region. Throws HistogramError when no main peak stands out (max bin below
// 5x the median) or the required side structure is missing.
double extract_snr(const ToAHistogram& hist, double rep_rate, bool resolved);

// CSV with header "bin_start_s,count", one row per bin.
void write_histogram_csv(const ToAHistogram& hist, std::ostream& out);
ToAHistogram read_histogram_csv(std::istream& in);

// Full config as JSON, for provenance sidecars next to histogram exports.
void write_config_json(const ToAConfig& config, std::ostream& out);
ToAConfig read_config_json(std::istream& in);

}  // namespace twinsim::toa
