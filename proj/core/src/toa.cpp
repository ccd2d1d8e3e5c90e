#include "twinsim/toa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "twinsim/counting.hpp"
#include "twinsim/errors.hpp"
#include "twinsim/io.hpp"

namespace twinsim::toa {

namespace {

// Pulses per generation segment. Segments own independent random streams
// derived from (seed, segment index), which keeps the event set independent
// of how many segments are generated concurrently.
constexpr std::uint64_t kSegmentPulses = std::uint64_t{1} << 22;

// Histogram half-span in pulse periods: covers side peaks out to |k| = 8.
constexpr int kHalfSpanPeriods = 8;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // (0, 1]
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Box-Muller without caching: a fixed two-draw cost per sample.
  double normal(double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Failures before the first success at probability a in (0, 1).
  double geometric_skip(double log_one_minus_a) {
    return std::floor(std::log(uniform()) / log_one_minus_a);
  }

  std::uint64_t poisson(double mean) {
    std::uint64_t k = 0;
    double acc = -std::log(uniform());
    while (acc <= mean) {
      ++k;
      acc += -std::log(uniform());
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

struct ChannelEvents {
  std::vector<double> starts;
  std::vector<double> stops;
};

ChannelEvents generate_segment(const ToAConfig& cfg, std::uint64_t seg_index,
                               std::uint64_t first_pulse, std::uint64_t pulse_count) {
  Rng rng(splitmix64(cfg.seed + 0x9E3779B97F4A7C15ull * (seg_index + 1)));
  ChannelEvents ev;
  const double period = 1.0 / cfg.rep_rate;
  const double lam2 = cfg.p / (1.0 + cfg.p);

  if (lam2 > 0.0) {
    const double log_skip = std::log1p(-lam2);
    const double log_ratio = std::log(lam2);
    std::uint64_t cursor = first_pulse;
    const std::uint64_t end = first_pulse + pulse_count;
    while (cursor < end) {
      const double gap = rng.geometric_skip(log_skip);
      if (gap >= static_cast<double>(end - cursor)) break;
      const std::uint64_t pulse = cursor + static_cast<std::uint64_t>(gap);
      // pair count conditioned on >= 1
      const std::uint64_t extra =
          static_cast<std::uint64_t>(std::floor(std::log(rng.uniform()) / log_ratio));
      const double n = static_cast<double>(1 + extra);
      const double t0 = static_cast<double>(pulse) * period;
      const double p_start = 1.0 - std::pow(1.0 - cfg.eta_start, n);
      if (rng.uniform() < p_start) {
        ev.starts.push_back(t0 + rng.normal(cfg.jitter_sigma));
      }
      const double p_stop = 1.0 - std::pow(1.0 - cfg.eta_stop, n);
      if (rng.uniform() < p_stop) {
        ev.stops.push_back(t0 + rng.normal(cfg.jitter_sigma));
      }
      cursor = pulse + 1;
    }
  }

  const double seg_start = static_cast<double>(first_pulse) / cfg.rep_rate;
  const double seg_duration = static_cast<double>(pulse_count) / cfg.rep_rate;
  if (cfg.dark_rate > 0.0) {
    const double mean = cfg.dark_rate * seg_duration;
    const std::uint64_t n1 = rng.poisson(mean);
    for (std::uint64_t i = 0; i < n1; ++i) {
      ev.starts.push_back(seg_start + rng.uniform() * seg_duration);
    }
    const std::uint64_t n2 = rng.poisson(mean);
    for (std::uint64_t i = 0; i < n2; ++i) {
      ev.stops.push_back(seg_start + rng.uniform() * seg_duration);
    }
  }
  return ev;
}

}  // namespace

void validate(const ToAConfig& cfg) {
  if (!(cfg.rep_rate > 0.0)) throw std::invalid_argument("rep_rate must be positive");
  if (!(cfg.p >= 0.0)) throw std::invalid_argument("p must be non-negative");
  for (double eta : {cfg.eta_start, cfg.eta_stop}) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("arm efficiencies must lie in [0, 1]");
    }
  }
  if (!(cfg.jitter_sigma >= 0.0)) throw std::invalid_argument("jitter_sigma must be non-negative");
  if (!(cfg.system_resolution >= 0.0)) {
    throw std::invalid_argument("system_resolution must be non-negative");
  }
  if (!(cfg.dark_rate >= 0.0)) throw std::invalid_argument("dark_rate must be non-negative");
  if (!(cfg.bin_width > 0.0)) throw std::invalid_argument("bin_width must be positive");
  if (!(cfg.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (cfg.bin_width >= 1.0 / cfg.rep_rate) {
    throw std::invalid_argument(
        "bin_width must be smaller than the pulse period; peaks are otherwise "
        "indistinguishable by construction");
  }
}

std::int64_t ToAHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ToAHistogram simulate_histogram(const ToAConfig& cfg, unsigned threads) {
  validate(cfg);
  const double period = 1.0 / cfg.rep_rate;
  const std::uint64_t pulses =
      static_cast<std::uint64_t>(std::llround(cfg.duration * cfg.rep_rate));
  const std::uint64_t segments = pulses == 0 ? 0 : (pulses - 1) / kSegmentPulses + 1;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<ChannelEvents> per_segment(segments);
  if (threads <= 1 || segments <= 1) {
    for (std::uint64_t s = 0; s < segments; ++s) {
      const std::uint64_t first = s * kSegmentPulses;
      per_segment[s] = generate_segment(cfg, s, first,
                                        std::min(kSegmentPulses, pulses - first));
    }
  } else {
    std::vector<std::future<void>> futures;
    for (unsigned t = 0; t < threads; ++t) {
      futures.push_back(std::async(std::launch::async, [&, t] {
        for (std::uint64_t s = t; s < segments; s += threads) {
          const std::uint64_t first = s * kSegmentPulses;
          per_segment[s] = generate_segment(cfg, s, first,
                                            std::min(kSegmentPulses, pulses - first));
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  std::vector<double> starts, stops;
  {
    std::size_t ns = 0, nq = 0;
    for (const auto& seg : per_segment) {
      ns += seg.starts.size();
      nq += seg.stops.size();
    }
    starts.reserve(ns);
    stops.reserve(nq);
    for (auto& seg : per_segment) {
      starts.insert(starts.end(), seg.starts.begin(), seg.starts.end());
      stops.insert(stops.end(), seg.stops.begin(), seg.stops.end());
      seg.starts.clear();
      seg.starts.shrink_to_fit();
      seg.stops.clear();
      seg.stops.shrink_to_fit();
    }
  }
  std::sort(starts.begin(), starts.end());
  std::sort(stops.begin(), stops.end());

  // Single-hit converter: the stop channel is delayed by the half-span D, a
  // start arms the ramp, the first delayed stop within [ts, ts + 2D) stops
  // it, and starts arriving while armed are lost. Dead time beyond the ramp
  // itself is not modelled.
  const int half_bins =
      static_cast<int>(std::ceil(kHalfSpanPeriods * period / cfg.bin_width));
  const double half_span = half_bins * cfg.bin_width;
  ToAHistogram hist;
  hist.bin_width = cfg.bin_width;
  hist.origin = 0.0;
  hist.counts.assign(static_cast<std::size_t>(2 * half_bins), 0);

  Rng smear(splitmix64(cfg.seed ^ 0x5DEECE66Dull));
  const double sigma_sys =
      cfg.system_resolution / (2.0 * std::sqrt(2.0 * std::log(2.0)));

  std::size_t i = 0, j = 0;
  while (i < starts.size()) {
    const double ts = starts[i];
    while (j < stops.size() && stops[j] < ts - half_span) ++j;
    if (j >= stops.size()) break;
    double armed_until;
    if (stops[j] < ts + half_span) {
      const double delta = stops[j] - ts + smear.normal(sigma_sys);
      const auto bin = static_cast<std::int64_t>(
          std::floor((delta + half_span) / cfg.bin_width));
      if (bin >= 0 && bin < static_cast<std::int64_t>(hist.counts.size())) {
        ++hist.counts[static_cast<std::size_t>(bin)];
      }
      armed_until = stops[j] + half_span;
      ++j;
    } else {
      armed_until = ts + half_span;  // ramp ran out without a stop
    }
    ++i;
    while (i < starts.size() && starts[i] < armed_until) ++i;
  }
  return hist;
}

double extract_snr(const ToAHistogram& hist, double rep_rate, bool resolved) {
  if (!(rep_rate > 0.0)) throw std::invalid_argument("rep_rate must be positive");
  if (hist.counts.empty() || !(hist.bin_width > 0.0)) {
    throw HistogramError("empty histogram");
  }
  const auto& c = hist.counts;
  const std::size_t main_idx = static_cast<std::size_t>(
      std::max_element(c.begin(), c.end()) - c.begin());
  const double main = static_cast<double>(c[main_idx]);

  std::vector<std::int64_t> sorted(c);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = static_cast<double>(sorted[sorted.size() / 2]);
  if (main < 10.0 || main < 5.0 * median) {
    throw HistogramError("no detectable main peak (max bin below 5x median)");
  }

  const double period = 1.0 / rep_rate;
  const auto offset = static_cast<std::int64_t>(std::llround(period / hist.bin_width));
  double side;

  if (resolved) {
    double sum = 0.0;
    for (int sgn : {-1, +1}) {
      const std::int64_t center = static_cast<std::int64_t>(main_idx) + sgn * offset;
      const std::int64_t lo = center - 3;
      const std::int64_t hi = center + 3;
      if (lo < 0 || hi >= static_cast<std::int64_t>(c.size())) {
        throw HistogramError("histogram does not span the side peaks at +-1 period");
      }
      std::int64_t peak = 0;
      for (std::int64_t b = lo; b <= hi; ++b) {
        peak = std::max(peak, c[static_cast<std::size_t>(b)]);
      }
      sum += static_cast<double>(peak);
    }
    side = sum / 2.0;
  } else {
    // Shoulder plateau rule for merged side peaks: average the local maxima
    // within 5 pulse periods of the main peak, excluding its FWHM region.
    const double half_height = main / 2.0;
    std::size_t fwhm_lo = main_idx;
    while (fwhm_lo > 0 && static_cast<double>(c[fwhm_lo]) > half_height) --fwhm_lo;
    std::size_t fwhm_hi = main_idx;
    while (fwhm_hi + 1 < c.size() && static_cast<double>(c[fwhm_hi]) > half_height) ++fwhm_hi;

    const auto window = static_cast<std::int64_t>(std::llround(5.0 * period / hist.bin_width));
    const std::int64_t lo =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(main_idx) - window);
    const std::int64_t hi = std::min<std::int64_t>(
        static_cast<std::int64_t>(c.size()) - 2, static_cast<std::int64_t>(main_idx) + window);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::int64_t b = lo; b <= hi; ++b) {
      const auto ub = static_cast<std::size_t>(b);
      if (ub >= fwhm_lo && ub <= fwhm_hi) continue;
      if (c[ub] > c[ub - 1] && c[ub] >= c[ub + 1]) {
        sum += static_cast<double>(c[ub]);
        ++count;
      }
    }
    if (count == 0) {
      throw HistogramError("no side structure found in the plateau window");
    }
    side = sum / static_cast<double>(count);
  }

  if (!(side > 0.0)) throw HistogramError("side peak region is empty");
  return counting::snr_db({main, side});
}

void write_histogram_csv(const ToAHistogram& hist, std::ostream& out) {
  out << "bin_start_s,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out << io::format_double(hist.bin_start(i)) << ',' << hist.counts[i] << '\n';
  }
}

ToAHistogram read_histogram_csv(std::istream& in) {
  ToAHistogram hist;
  std::string line;
  std::vector<double> bin_starts;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("bin_start_s", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("malformed histogram CSV row: " + line);
    }
    bin_starts.push_back(std::stod(line.substr(0, comma)));
    hist.counts.push_back(std::stoll(line.substr(comma + 1)));
  }
  if (bin_starts.size() >= 2) {
    hist.bin_width = bin_starts[1] - bin_starts[0];
    hist.origin = bin_starts.front() +
                  0.5 * static_cast<double>(hist.counts.size()) * hist.bin_width;
  }
  return hist;
}

void write_config_json(const ToAConfig& cfg, std::ostream& out) {
  nlohmann::json j{{"rep_rate", cfg.rep_rate},
                   {"p", cfg.p},
                   {"eta_start", cfg.eta_start},
                   {"eta_stop", cfg.eta_stop},
                   {"jitter_sigma", cfg.jitter_sigma},
                   {"system_resolution", cfg.system_resolution},
                   {"dark_rate", cfg.dark_rate},
                   {"bin_width", cfg.bin_width},
                   {"duration", cfg.duration},
                   {"seed", cfg.seed}};
  out << j.dump(2) << '\n';
}

ToAConfig read_config_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  ToAConfig cfg;
  cfg.rep_rate = j.at("rep_rate").get<double>();
  cfg.p = j.at("p").get<double>();
  cfg.eta_start = j.at("eta_start").get<double>();
  cfg.eta_stop = j.at("eta_stop").get<double>();
  cfg.jitter_sigma = j.at("jitter_sigma").get<double>();
  cfg.system_resolution = j.at("system_resolution").get<double>();
  cfg.dark_rate = j.at("dark_rate").get<double>();
  cfg.bin_width = j.at("bin_width").get<double>();
  cfg.duration = j.at("duration").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace twinsim::toa
