#include "twinsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "twinsim/errors.hpp"

namespace twinsim::fit {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;
constexpr double kIntervalWidth = 1e-5;
constexpr int kMaxEvaluations = 200;

// Golden-section minimum of f on [lo, hi] down to kIntervalWidth.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int& evaluations) {
  double x1 = hi - kGoldenRatio * (hi - lo);
  double x2 = lo + kGoldenRatio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  evaluations += 2;
  while (hi - lo > kIntervalWidth) {
    if (evaluations >= kMaxEvaluations) {
      throw FitError("no convergence within " + std::to_string(kMaxEvaluations) +
                     " objective evaluations");
    }
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGoldenRatio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGoldenRatio * (hi - lo);
      f2 = f(x2);
    }
    ++evaluations;
  }
  return f1 < f2 ? x1 : x2;
}

struct PointModel {
  source::SourceParams src;
  source::TruncationConfig trunc;
  double cc_mean = 0.0;  // independent of eta_m; cached when p is fixed
  double v = 0.0;
  double weight = 1.0;
};

void check_problem(const FitProblem& problem) {
  if (problem.data.size() < 2) {
    throw FitError("at least 2 data points are required");
  }
  if (!(problem.eta_m_lo >= 0.0 && problem.eta_m_hi <= 1.0 &&
        problem.eta_m_lo < problem.eta_m_hi)) {
    throw FitError("eta_m bounds must be ordered within [0, 1]");
  }
  bool all_identical = true;
  for (const auto& pt : problem.data) {
    if (!(pt.p >= 0.0)) throw FitError("data p values must be non-negative");
    if (pt.p != problem.data.front().p || pt.v != problem.data.front().v) {
      all_identical = false;
    }
    if (problem.weighting == Weighting::kInverseVariance &&
        (!pt.sigma_v || !(*pt.sigma_v > 0.0))) {
      throw FitError("inverse-variance weighting requires positive sigma_v on every point");
    }
  }
  if (all_identical) throw FitError("all data points are identical");
}

}  // namespace

FitResult fit_eta_m(const FitProblem& problem, double trunc_tolerance) {
  check_problem(problem);
  hom::SetupParams setup = problem.setup;
  setup.eta_m = problem.eta_m_lo;  // placeholder; validated range only
  hom::validate(setup);

  double weight_total = 0.0;
  std::vector<PointModel> points;
  points.reserve(problem.data.size());
  for (const auto& pt : problem.data) {
    PointModel m;
    m.src = source::SourceParams::from_p(pt.p);
    m.trunc = source::TruncationConfig::for_source(m.src, trunc_tolerance);
    m.v = pt.v;
    m.weight = problem.weighting == Weighting::kInverseVariance
                   ? 1.0 / (*pt.sigma_v * *pt.sigma_v)
                   : 1.0;
    weight_total += m.weight;
    points.push_back(std::move(m));
  }

  FitResult result;
  int evaluations = 0;

  auto sse_at = [&](double eta_m, double p_scale) {
    hom::SetupParams s = setup;
    s.eta_m = eta_m;
    double sse = 0.0;
    for (auto& m : points) {
      double v_model;
      if (p_scale == 1.0) {
        if (m.cc_mean == 0.0) m.cc_mean = hom::cc_mean(m.src, s, m.trunc);
        v_model = (m.cc_mean - hom::cc_min(m.src, s, m.trunc)) / m.cc_mean;
      } else {
        const auto src = source::SourceParams::from_p(m.src.p * p_scale);
        const auto trunc = source::TruncationConfig::for_source(src, trunc_tolerance);
        v_model = hom::visibility(src, s, trunc);
      }
      const double r = v_model - m.v;
      sse += m.weight * r * r;
    }
    return sse;
  };

  if (!problem.fit_p_scale) {
    result.eta_m = golden_min([&](double em) { return sse_at(em, 1.0); },
                              problem.eta_m_lo, problem.eta_m_hi, evaluations);
    result.p_scale = 1.0;
  } else {
    // Profile the nuisance scale out with a nested search.
    auto profiled = [&](double em) {
      int inner_evals = 0;
      const double best_scale = golden_min(
          [&](double s) { return sse_at(em, s); }, 0.5, 2.0, inner_evals);
      return sse_at(em, best_scale);
    };
    result.eta_m = golden_min(profiled, problem.eta_m_lo, problem.eta_m_hi, evaluations);
    int inner_evals = 0;
    result.p_scale = golden_min([&](double s) { return sse_at(result.eta_m, s); },
                                0.5, 2.0, inner_evals);
  }

  const double sse = sse_at(result.eta_m, result.p_scale);
  result.residual_rms = std::sqrt(sse / weight_total);
  result.evaluations = evaluations + 1;
  return result;
}

}  // namespace twinsim::fit
