#pragma once

#include <vector>

#include "twinsim/hom.hpp"

namespace twinsim::fit {

enum class Weighting {
  kUniform,
  kInverseVariance,  // requires sigma_v on every data point
};

struct FitProblem {
  std::vector<hom::VisibilityPoint> data;
  // eta_m is the search parameter; the field's value in `setup` is ignored.
  hom::SetupParams setup;
  double eta_m_lo = 0.90;
  double eta_m_hi = 1.00;
  Weighting weighting = Weighting::kUniform;
  // Optional multiplicative nuisance on the p axis (off by default; the data
  // p values are normally taken as given).
  bool fit_p_scale = false;
};

struct FitResult {
  double eta_m = 0.0;
  double residual_rms = 0.0;  // sqrt(sum w r^2 / sum w) at the optimum
  int evaluations = 0;        // objective (full-curve) evaluations
  double p_scale = 1.0;
};

// Least-squares estimate of the mode-matching efficiency by golden-section
// search over [eta_m_lo, eta_m_hi], to an interval width of 1e-5. The
// visibility model is strictly increasing in eta_m at fixed p, so the
// objective is unimodal on sensible brackets. Deterministic. Throws FitError
// on fewer than 2 points, all-identical data, disordered bounds, missing
// sigmas under inverse-variance weighting, or more than 200 objective
// evaluations in one search.
FitResult fit_eta_m(const FitProblem& problem, double trunc_tolerance = 1e-9);

}  // namespace twinsim::fit
