#include "twinsim/oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace twinsim::hom {

namespace {

// exp(theta K) with K = a b^dag - a^dag b on the subspace of `total` photons,
// basis |k, total-k>. K conserves total photon number, so each block is exact
// regardless of the surrounding cutoff.
Eigen::MatrixXd bs_block(int total, double eta) {
  const double theta = std::atan2(std::sqrt(1.0 - eta), std::sqrt(eta));
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(total + 1, total + 1);
  for (int k = 0; k <= total; ++k) {
    if (k >= 1) {
      gen(k - 1, k) += std::sqrt(static_cast<double>(k)) *
                       std::sqrt(static_cast<double>(total - k + 1));
    }
    if (k < total) {
      gen(k + 1, k) -= std::sqrt(static_cast<double>(k + 1)) *
                       std::sqrt(static_cast<double>(total - k));
    }
  }
  return (theta * gen).exp();
}

using Occupation = std::vector<int>;
using State = std::map<Occupation, double>;

class BlockCache {
 public:
  const Eigen::MatrixXd& get(int total, double eta) {
    auto key = std::make_pair(total, eta);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, bs_block(total, eta)).first;
    return it->second;
  }

 private:
  std::map<std::pair<int, double>, Eigen::MatrixXd> cache_;
};

State apply_bs(const State& state, int i, int j, double eta, BlockCache& blocks) {
  State out;
  for (const auto& [occ, amp] : state) {
    const int n1 = occ[static_cast<std::size_t>(i)];
    const int n2 = occ[static_cast<std::size_t>(j)];
    const int total = n1 + n2;
    const Eigen::MatrixXd& u = blocks.get(total, eta);
    Occupation next = occ;
    for (int m1 = 0; m1 <= total; ++m1) {
      const double c = u(m1, n1);
      if (c == 0.0) continue;
      next[static_cast<std::size_t>(i)] = m1;
      next[static_cast<std::size_t>(j)] = total - m1;
      out[next] += amp * c;
    }
  }
  return out;
}

double click_weighted_sum(const State& state, const std::vector<int>& d1_modes,
                          const std::vector<int>& d2_modes, double eta_d1,
                          double eta_d2) {
  double total = 0.0;
  for (const auto& [occ, amp] : state) {
    int m1 = 0, m2 = 0;
    for (int m : d1_modes) m1 += occ[static_cast<std::size_t>(m)];
    for (int m : d2_modes) m2 += occ[static_cast<std::size_t>(m)];
    const double click1 = 1.0 - std::pow(1.0 - eta_d1, m1);
    const double click2 = 1.0 - std::pow(1.0 - eta_d2, m2);
    total += amp * amp * click1 * click2;
  }
  return total;
}

State truncated_squeezed_state(const source::SourceParams& src, int n_max, int modes) {
  State st;
  const double pref = std::sqrt(1.0 - src.lambda_sq());
  double w = pref;
  for (int n = 0; n <= n_max; ++n) {
    Occupation occ(static_cast<std::size_t>(modes), 0);
    occ[0] = n;
    occ[1] = n;
    st[occ] = w;
    w *= src.lambda;
  }
  return st;
}

}  // namespace

std::vector<double> oracle_bs_block(int total, double eta) {
  if (total < 0) throw std::invalid_argument("total photon number must be non-negative");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("transmittance must lie in [0, 1]");
  }
  const Eigen::MatrixXd u = bs_block(total, eta);
  std::vector<double> flat(static_cast<std::size_t>(total + 1) *
                           static_cast<std::size_t>(total + 1));
  for (int r = 0; r <= total; ++r) {
    for (int c = 0; c <= total; ++c) {
      flat[static_cast<std::size_t>(r) * static_cast<std::size_t>(total + 1) +
           static_cast<std::size_t>(c)] = u(r, c);
    }
  }
  return flat;
}

CoincidencePair oracle_cc(const source::SourceParams& src, const SetupParams& setup,
                          int n_max) {
  validate(setup);
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (n_max > 4) {
    throw std::invalid_argument("oracle_cc is limited to n_max <= 4 (dense state)");
  }
  BlockCache blocks;
  CoincidencePair result;

  // Zero delay. Modes: 0 A, 1 B, 2 C, 3 D, 4 E, 5 F, 6 E', 7 F'.
  // Arm losses, mode-matching splitters, the central 50/50, then the 50/50
  // splits of the mismatch modes. Detector 1 collects A + the transmitted
  // halves of E and F; detector 2 collects B + the reflected halves.
  {
    State st = truncated_squeezed_state(src, n_max, 8);
    st = apply_bs(st, 0, 2, setup.eta_a, blocks);
    st = apply_bs(st, 1, 3, setup.eta_b, blocks);
    st = apply_bs(st, 0, 4, setup.eta_m, blocks);
    st = apply_bs(st, 1, 5, setup.eta_m, blocks);
    st = apply_bs(st, 0, 1, 0.5, blocks);
    st = apply_bs(st, 4, 6, 0.5, blocks);
    st = apply_bs(st, 5, 7, 0.5, blocks);
    result.cc_min = click_weighted_sum(st, {0, 4, 5}, {1, 6, 7}, setup.eta_d1, setup.eta_d2);
  }

  // Large delay: the photons miss each other at the splitter, so each arm
  // routes 50/50 on its own and mode matching drops out.
  // Modes: 0 A, 1 B, 2 C, 3 D, 4 A', 5 B'.
  {
    State st = truncated_squeezed_state(src, n_max, 6);
    st = apply_bs(st, 0, 2, setup.eta_a, blocks);
    st = apply_bs(st, 1, 3, setup.eta_b, blocks);
    st = apply_bs(st, 0, 4, 0.5, blocks);
    st = apply_bs(st, 1, 5, 0.5, blocks);
    result.cc_mean = click_weighted_sum(st, {0, 5}, {4, 1}, setup.eta_d1, setup.eta_d2);
  }

  return result;
}

}  // namespace twinsim::hom
