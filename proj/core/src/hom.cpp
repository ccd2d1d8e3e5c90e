#include "twinsim/hom.hpp"

#include <cmath>
#include <exception>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>

#include "twinsim/errors.hpp"
#include "twinsim/fock.hpp"

namespace twinsim::hom {

namespace {

constexpr double kLimitP = 1e-8;  // stand-in for p = 0 (Eq. for V is 0/0 at vacuum)

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Lower-triangular table t(n, k), 0 <= k <= n <= N.
class TriTable {
 public:
  explicit TriTable(int n_max)
      : n_max_(n_max),
        data_(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 2) / 2) {}

  double* row(int n) { return data_.data() + row_offset(n); }
  const double* row(int n) const { return data_.data() + row_offset(n); }

 private:
  static std::size_t row_offset(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  }
  int n_max_;
  std::vector<double> data_;
};

TriTable loss_rows(int n_max, double eta) {
  TriTable t(n_max);
  for (int n = 0; n <= n_max; ++n) {
    const auto pmf = fock::loss_pmf(n, eta).pmf;
    double* r = t.row(n);
    for (int k = 0; k <= n; ++k) r[k] = pmf[static_cast<std::size_t>(k)];
  }
  return t;
}

std::vector<double> powers(double x, int count) {
  std::vector<double> p(static_cast<std::size_t>(count));
  p[0] = 1.0;
  for (int j = 1; j < count; ++j) p[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j - 1)] * x;
  return p;
}

// Probability that the balanced splitter sends |k3, k4> to |l, k3+k4-l>.
// The alternating root-binomial sum cancels severely at large k3+k4, so each
// term is formed in log magnitude and the sum is compensated.
double balanced_bs_prob(int k3, int k4, int l) {
  Kahan acc;
  const int lo = std::max(0, l - k4);
  const int hi = std::min(l, k3);
  for (int k5 = lo; k5 <= hi; ++k5) {
    const double lm = 0.5 * (fock::log_binomial(k3, k5) + fock::log_binomial(k4, l - k5) +
                             fock::log_binomial(l, k5) +
                             fock::log_binomial(k3 + k4 - l, k3 - k5));
    double term = std::exp(lm);
    if ((l - k5) % 2 != 0) term = -term;
    acc.add(term);
  }
  const double amp = acc.sum * std::exp2(-0.5 * static_cast<double>(k3 + k4));
  return amp * amp;
}

// Shared tables for one (source, setup, n_max) evaluation.
class Evaluator {
 public:
  Evaluator(const source::SourceParams& src, const SetupParams& setup, int n_max)
      : n_(n_max),
        lam2_(src.lambda_sq()),
        pmf_a_(loss_rows(n_max, setup.eta_a)),
        pmf_b_(loss_rows(n_max, setup.eta_b)),
        pmf_m_(loss_rows(n_max, setup.eta_m)),
        pmf_half_(loss_rows(n_max, 0.5)) {
    const double alpha = 1.0 - setup.eta_d1;
    const double beta = 1.0 - setup.eta_d2;
    const int np = 2 * n_max + 1;
    a_pow_ = powers(alpha, np);
    b_pow_ = powers(beta, np);
    ca_pow_ = powers(0.5 * (1.0 + alpha), np);
    cb_pow_ = powers(0.5 * (1.0 + beta), np);
    cab_pow_ = powers(0.5 * (alpha + beta), np);
    build_interference_tables();
  }

  // Zero-delay rate. For each group of k3+k4 photons entering the balanced
  // splitter, q0/qa/qb/qab hold the splitter outcome distribution folded
  // with the detector-miss powers of the two outputs; the K mismatched
  // photons route 50/50 independently, contributing the closed-form factors
  // ca^K, cb^K, cab^K.
  double cc_min() const {
    Kahan total;
    double wn = 1.0 - lam2_;
    for (int n = 0; n <= n_; ++n, wn *= lam2_) {
      const double* pa = pmf_a_.row(n);
      const double* pb = pmf_b_.row(n);
      for (int k1 = 0; k1 <= n; ++k1) {
        if (pa[k1] == 0.0) continue;
        const double* pm1 = pmf_m_.row(k1);
        for (int k2 = 0; k2 <= n; ++k2) {
          if (pb[k2] == 0.0) continue;
          const double base = wn * pa[k1] * pb[k2];
          const double* pm2 = pmf_m_.row(k2);
          double acc = 0.0;
          for (int k3 = 0; k3 <= k1; ++k3) {
            const double m3 = pm1[k3];
            if (m3 == 0.0) continue;
            const std::size_t row = idx(k3, 0);
            for (int k4 = 0; k4 <= k2; ++k4) {
              const double m4 = pm2[k4];
              if (m4 == 0.0) continue;
              const std::size_t kk = static_cast<std::size_t>(k1 - k3 + k2 - k4);
              const double s = q0_[row + static_cast<std::size_t>(k4)] -
                               ca_pow_[kk] * qa_[row + static_cast<std::size_t>(k4)] -
                               cb_pow_[kk] * qb_[row + static_cast<std::size_t>(k4)] +
                               cab_pow_[kk] * qab_[row + static_cast<std::size_t>(k4)];
              acc += m3 * m4 * s;
            }
          }
          total.add(base * acc);
        }
      }
    }
    return total.sum;
  }

  // Large-delay rate: each arm routes 50/50 with no interference; detector 1
  // sees k3 photons of arm A plus k2-k4 of arm B, detector 2 the rest.
  double cc_mean() const {
    Kahan total;
    double wn = 1.0 - lam2_;
    for (int n = 0; n <= n_; ++n, wn *= lam2_) {
      const double* pa = pmf_a_.row(n);
      const double* pb = pmf_b_.row(n);
      for (int k1 = 0; k1 <= n; ++k1) {
        if (pa[k1] == 0.0) continue;
        const double* h1 = pmf_half_.row(k1);
        for (int k2 = 0; k2 <= n; ++k2) {
          if (pb[k2] == 0.0) continue;
          const double base = wn * pa[k1] * pb[k2];
          const double* h2 = pmf_half_.row(k2);
          double acc = 0.0;
          for (int k3 = 0; k3 <= k1; ++k3) {
            double inner = 0.0;
            for (int k4 = 0; k4 <= k2; ++k4) {
              inner += h2[k4] * (1.0 - a_pow_[static_cast<std::size_t>(k2 + k3 - k4)]) *
                       (1.0 - b_pow_[static_cast<std::size_t>(k1 - k3 + k4)]);
            }
            acc += h1[k3] * inner;
          }
          total.add(base * acc);
        }
      }
    }
    return total.sum;
  }

 private:
  std::size_t idx(int k3, int k4) const {
    return static_cast<std::size_t>(k3) * static_cast<std::size_t>(n_ + 1) +
           static_cast<std::size_t>(k4);
  }

  void build_interference_tables() {
    const std::size_t cells = static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1);
    q0_.assign(cells, 0.0);
    qa_.assign(cells, 0.0);
    qb_.assign(cells, 0.0);
    qab_.assign(cells, 0.0);
    for (int k3 = 0; k3 <= n_; ++k3) {
      for (int k4 = 0; k4 <= n_; ++k4) {
        double s0 = 0.0, sa = 0.0, sb = 0.0, sab = 0.0;
        for (int l = 0; l <= k3 + k4; ++l) {
          const double q = balanced_bs_prob(k3, k4, l);
          const double al = a_pow_[static_cast<std::size_t>(l)];
          const double bl = b_pow_[static_cast<std::size_t>(k3 + k4 - l)];
          s0 += q;
          sa += q * al;
          sb += q * bl;
          sab += q * al * bl;
        }
        const std::size_t i = idx(k3, k4);
        q0_[i] = s0;
        qa_[i] = sa;
        qb_[i] = sb;
        qab_[i] = sab;
      }
    }
  }

  int n_;
  double lam2_;
  TriTable pmf_a_, pmf_b_, pmf_m_, pmf_half_;
  std::vector<double> a_pow_, b_pow_, ca_pow_, cb_pow_, cab_pow_;
  std::vector<double> q0_, qa_, qb_, qab_;
};

void check_inputs(const source::SourceParams& src, const SetupParams& setup,
                  const source::TruncationConfig& trunc) {
  validate(setup);
  if (!(src.lambda >= 0.0 && src.lambda < 1.0)) {
    throw std::invalid_argument("squeezing parameter must lie in [0, 1)");
  }
  if (trunc.n_max < 0) throw std::invalid_argument("n_max must be non-negative");
}

}  // namespace

void validate(const SetupParams& setup) {
  const struct {
    const char* name;
    double value;
  } fields[] = {{"eta_a", setup.eta_a},
                {"eta_b", setup.eta_b},
                {"eta_m", setup.eta_m},
                {"eta_d1", setup.eta_d1},
                {"eta_d2", setup.eta_d2}};
  for (const auto& f : fields) {
    if (!(f.value >= 0.0 && f.value <= 1.0)) {
      throw std::invalid_argument(std::string(f.name) + " must lie in [0, 1], got " +
                                  std::to_string(f.value));
    }
  }
}

double cc_min(const source::SourceParams& src, const SetupParams& setup,
              const source::TruncationConfig& trunc) {
  check_inputs(src, setup, trunc);
  return Evaluator(src, setup, trunc.n_max).cc_min();
}

double cc_mean(const source::SourceParams& src, const SetupParams& setup,
               const source::TruncationConfig& trunc) {
  check_inputs(src, setup, trunc);
  return Evaluator(src, setup, trunc.n_max).cc_mean();
}

CoincidencePair coincidences(const source::SourceParams& src, const SetupParams& setup,
                             const source::TruncationConfig& trunc) {
  check_inputs(src, setup, trunc);
  Evaluator ev(src, setup, trunc.n_max);
  return CoincidencePair{ev.cc_min(), ev.cc_mean()};
}

double visibility(const source::SourceParams& src, const SetupParams& setup,
                  const source::TruncationConfig& trunc) {
  const CoincidencePair cc = coincidences(src, setup, trunc);
  if (cc.cc_mean <= 0.0) {
    throw DegenerateSetupError(
        "cc_mean is zero (p=" + std::to_string(src.p) +
        "); visibility is undefined for this setup");
  }
  return (cc.cc_mean - cc.cc_min) / cc.cc_mean;
}

std::vector<VisibilityPoint> visibility_curve(std::span<const double> p_grid,
                                              const SetupParams& setup,
                                              const CurveOptions& options) {
  validate(setup);
  const std::size_t count = p_grid.size();
  std::vector<VisibilityPoint> out(count);
  std::vector<std::exception_ptr> errors(count);

  auto evaluate_point = [&](std::size_t i) {
    const double p_raw = p_grid[i];
    try {
      if (!(p_raw >= 0.0)) {
        throw std::invalid_argument("p must be non-negative");
      }
      const bool limit = p_raw == 0.0;
      const double p = limit ? kLimitP : p_raw;
      const auto src = source::SourceParams::from_p(p);
      const auto trunc =
          options.fixed_n_max
              ? source::TruncationConfig::fixed(*options.fixed_n_max)
              : source::TruncationConfig::for_source(src, options.tail_tolerance,
                                                     options.truncation_cap);
      out[i] = VisibilityPoint{p_raw, visibility(src, setup, trunc), std::nullopt, limit};
    } catch (const TruncationCapError& e) {
      errors[i] = std::make_exception_ptr(
          TruncationCapError("visibility at p=" + std::to_string(p_raw) + ": " + e.what()));
    } catch (const DegenerateSetupError& e) {
      errors[i] = std::make_exception_ptr(
          DegenerateSetupError("visibility at p=" + std::to_string(p_raw) + ": " + e.what()));
    } catch (const std::invalid_argument& e) {
      errors[i] = std::make_exception_ptr(
          std::invalid_argument("visibility at p=" + std::to_string(p_raw) + ": " + e.what()));
    } catch (const std::exception& e) {
      errors[i] = std::make_exception_ptr(
          std::runtime_error("visibility at p=" + std::to_string(p_raw) + ": " + e.what()));
    }
  };

  unsigned threads = options.threads != 0 ? options.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count == 0 ? 1 : count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) evaluate_point(i);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      futures.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t i = t; i < count; i += threads) evaluate_point(i);
      }));
    }
    for (auto& f : futures) f.get();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  return out;
}

std::vector<VisibilityPoint> visibility_curve(std::span<const double> p_grid,
                                              const SetupParams& setup,
                                              double tail_tolerance) {
  CurveOptions options;
  options.tail_tolerance = tail_tolerance;
  return visibility_curve(p_grid, setup, options);
}

}  // namespace twinsim::hom
