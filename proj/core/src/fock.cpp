#include "twinsim/fock.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace twinsim::fock {

namespace {

constexpr int kLogFactTableSize = 1024;

std::array<double, kLogFactTableSize> build_log_fact_table() {
  std::array<double, kLogFactTableSize> t{};
  // Exact 64-bit factorials up to 20!, logged directly.
  unsigned long long f = 1;
  for (int n = 0; n <= 20; ++n) {
    if (n > 0) f *= static_cast<unsigned long long>(n);
    t[static_cast<std::size_t>(n)] = std::log(static_cast<double>(f));
  }
  // Beyond that, accumulate in extended precision.
  long double acc = static_cast<long double>(t[20]);
  for (int n = 21; n < kLogFactTableSize; ++n) {
    acc += std::log(static_cast<long double>(n));
    t[static_cast<std::size_t>(n)] = static_cast<double>(acc);
  }
  return t;
}

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

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("transmittance must lie in [0, 1], got " +
                                std::to_string(eta));
  }
}

}  // namespace

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  static const std::array<double, kLogFactTableSize> table = build_log_fact_table();
  if (n < kLogFactTableSize) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_binomial: need 0 <= k <= n");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double BsAmplitudeTable::amplitude(FockPair out) const {
  auto it = amplitudes.find(out);
  return it == amplitudes.end() ? 0.0 : it->second;
}

BsAmplitudeTable bs_output_amplitudes(FockPair input, double eta) {
  check_eta(eta);
  if (input.n1 < 0 || input.n2 < 0) {
    throw std::invalid_argument("photon counts must be non-negative");
  }
  const int n1 = input.n1;
  const int n2 = input.n2;
  const int total = n1 + n2;

  // Accumulate amplitudes per output pair (m1, total - m1). Terms alternate
  // in sign, so keep compensated partial sums.
  std::vector<Kahan> acc(static_cast<std::size_t>(total) + 1);
  const double log_eta = eta > 0.0 ? std::log(eta) : 0.0;
  const double log_1me = eta < 1.0 ? std::log(1.0 - eta) : 0.0;
  const double log_norm = -0.5 * (log_factorial(n1) + log_factorial(n2));

  for (int k1 = 0; k1 <= n1; ++k1) {
    for (int k2 = 0; k2 <= n2; ++k2) {
      const int e_t = n2 + k1 - k2;      // power of sqrt(eta)
      const int e_r = n1 - k1 + k2;      // power of sqrt(1 - eta)
      if (eta == 0.0 && e_t > 0) continue;
      if (eta == 1.0 && e_r > 0) continue;
      const int m1 = k1 + k2;
      double lm = log_norm + log_binomial(n1, k1) + log_binomial(n2, k2) +
                  0.5 * (e_t * log_eta + e_r * log_1me +
                         log_factorial(m1) + log_factorial(total - m1));
      double term = std::exp(lm);
      if (k2 % 2 != 0) term = -term;
      acc[static_cast<std::size_t>(m1)].add(term);
    }
  }

  BsAmplitudeTable table;
  table.input = input;
  table.transmittance = eta;
  for (int m1 = 0; m1 <= total; ++m1) {
    table.amplitudes[FockPair{m1, total - m1}] = acc[static_cast<std::size_t>(m1)].sum;
  }
  return table;
}

LossPmf loss_pmf(int n, double eta) {
  check_eta(eta);
  if (n < 0) throw std::invalid_argument("loss_pmf: negative photon count");
  LossPmf out;
  out.input_count = n;
  out.transmittance = eta;
  out.pmf.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (eta == 0.0) {
    out.pmf[0] = 1.0;
    return out;
  }
  if (eta == 1.0) {
    out.pmf[static_cast<std::size_t>(n)] = 1.0;
    return out;
  }
  const double log_eta = std::log(eta);
  const double log_1me = std::log(1.0 - eta);
  for (int k = 0; k <= n; ++k) {
    out.pmf[static_cast<std::size_t>(k)] =
        std::exp(log_binomial(n, k) + k * log_eta + (n - k) * log_1me);
  }
  return out;
}

std::pair<double, double> binomial_identity_check(int k3, int k4, int k5, int k6) {
  if (k5 < 0 || k6 < 0 || k5 > k3 || k6 > k4) {
    throw std::invalid_argument("binomial_identity_check: need k5 <= k3, k6 <= k4");
  }
  const int s = k5 + k6;
  const int r = k3 + k4 - s;
  const double lhs =
      std::exp(log_binomial(k3, k5) + log_binomial(k4, k6) +
               0.5 * (log_factorial(s) + log_factorial(r) -
                      log_factorial(k3) - log_factorial(k4)));
  const double rhs =
      std::exp(0.5 * (log_binomial(k3, k5) + log_binomial(k4, k6) +
                      log_binomial(s, k5) + log_binomial(r, k3 - k5)));
  return {lhs, rhs};
}

}  // namespace twinsim::fock
