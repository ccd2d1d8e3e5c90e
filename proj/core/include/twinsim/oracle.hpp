#pragma once

#include <vector>

#include "twinsim/hom.hpp"

namespace twinsim::hom {

// Brute-force reference for cc_min/cc_mean at small cutoff: builds the
// truncated squeezed state as an explicit multimode vector and applies every
// beam splitter as a dense two-mode unitary obtained from the matrix
// exponential of the mixing generator (independent of the analytic sums it
// checks). Rejects n_max > 4.
CoincidencePair oracle_cc(const source::SourceParams& src, const SetupParams& setup,
                          int n_max);

// (total+1) x (total+1) block of the beam-splitter unitary on the subspace
// with `total` photons across two modes, row-major. Entry (m1, n1) is
// <m1, total-m1| B(eta) |n1, total-n1>.
std::vector<double> oracle_bs_block(int total, double eta);

}  // namespace twinsim::hom
