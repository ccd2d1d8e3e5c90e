#pragma once

#include <compare>
#include <map>
#include <utility>
#include <vector>

namespace twinsim::fock {

// Photon occupation of two modes.
struct FockPair {
  int n1 = 0;
  int n2 = 0;
  friend auto operator<=>(const FockPair&, const FockPair&) = default;
};

// Real output amplitudes of a two-mode beam splitter acting on a number
// state |n1, n2>. Photon number is conserved, so every stored output pair
// (m1, m2) satisfies m1 + m2 = n1 + n2, and the squared amplitudes sum to 1.
struct BsAmplitudeTable {
  FockPair input;
  double transmittance = 1.0;
  std::map<FockPair, double> amplitudes;

  // 0.0 for output pairs not in the table.
  double amplitude(FockPair out) const;
};

// Binomial loss channel: pmf[k] = C(n,k) eta^k (1-eta)^(n-k).
struct LossPmf {
  int input_count = 0;
  double transmittance = 1.0;
  std::vector<double> pmf;
};

// ln(n!). Table-backed with one-time thread-safe initialization; exact to
// double precision for n <= 20.
double log_factorial(int n);

// ln C(n,k) for 0 <= k <= n.
double log_binomial(int n, int k);

// Amplitudes of the beam splitter with transmittance eta on |n1, n2>,
// grouped by output pair. The double sum over reflected/transmitted photon
// counts is evaluated in log magnitude with compensated accumulation; the
// sign convention puts (-1)^k on photons reflected out of the second mode.
BsAmplitudeTable bs_output_amplitudes(FockPair input, double eta);

LossPmf loss_pmf(int n, double eta);

// Evaluates both sides of the root-binomial product identity used to regroup
// beam-splitter sums. Requires k5 <= k3 and k6 <= k4; consumed by property
// tests only.
std::pair<double, double> binomial_identity_check(int k3, int k4, int k5, int k6);

}  // namespace twinsim::fock
