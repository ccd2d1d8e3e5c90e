#include <doctest.h>

#include <cmath>

#include "twinsim/errors.hpp"
#include "twinsim/source.hpp"

using twinsim::TruncationCapError;
using namespace twinsim::source;

TEST_CASE("lambda from p") {
  CHECK(lambda_from_p(0.0) == 0.0);
  CHECK(lambda_from_p(1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(lambda_from_p(0.01) == doctest::Approx(std::sqrt(0.01 / 1.01)).epsilon(1e-14));
  CHECK_THROWS_AS(lambda_from_p(-0.5), std::invalid_argument);
}

TEST_CASE("p <-> lambda round trip") {
  for (double p = 0.0; p <= 10.0; p += 0.37) {
    CHECK(p_from_lambda(lambda_from_p(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(p_from_lambda(1.0), std::invalid_argument);
  CHECK_THROWS_AS(p_from_lambda(-0.1), std::invalid_argument);

  const auto s = SourceParams::from_p(0.25);
  CHECK(s.p == 0.25);
  CHECK(s.lambda_sq() / (1.0 - s.lambda_sq()) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pair number pmf") {
  const auto vacuum = pair_number_pmf(SourceParams::from_p(0.0), TruncationConfig::fixed(3));
  CHECK(vacuum == std::vector<double>{1.0, 0.0, 0.0, 0.0});

  // lambda^2 = 1/2 -> geometric with ratio 1/2
  const auto half = pair_number_pmf(SourceParams::from_lambda(std::sqrt(0.5)),
                                    TruncationConfig::fixed(2));
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(half[2] == doctest::Approx(0.125).epsilon(1e-14));

  const auto small = pair_number_pmf(SourceParams::from_p(0.01), TruncationConfig::fixed(4));
  CHECK(small[1] == doctest::Approx(0.01 / (1.01 * 1.01)).epsilon(1e-12));

  SUBCASE("strictly decreasing and geometric-tail sum") {
    const auto s = SourceParams::from_p(0.8);
    const int n_max = 12;
    const auto pmf = pair_number_pmf(s, TruncationConfig::fixed(n_max));
    double sum = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (i > 0) CHECK(pmf[i] < pmf[i - 1]);
      sum += pmf[i];
    }
    const double expected = 1.0 - std::pow(s.lambda_sq(), n_max + 1);
    CHECK(sum == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("truncation level") {
  CHECK(truncation_level(0.0, 1e-12) == 0);
  CHECK(truncation_level(std::sqrt(0.5), 1e-12) == 39);
  // p = 2 -> lambda^2 = 2/3
  CHECK(truncation_level(std::sqrt(2.0 / 3.0), 1e-9) == 51);

  SUBCASE("monotone in lambda and in tolerance") {
    int prev = 0;
    for (double lam : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const int n = truncation_level(lam, 1e-9, 1000);
      CHECK(n >= prev);
      prev = n;
    }
    prev = 1 << 20;
    for (double tol : {1e-12, 1e-9, 1e-6, 1e-3}) {
      const int n = truncation_level(0.6, tol);
      CHECK(n <= prev);
      prev = n;
    }
  }

  SUBCASE("hard cap") {
    CHECK_THROWS_AS(truncation_level(0.999, 1e-12, 64), TruncationCapError);
    CHECK_NOTHROW(truncation_level(0.999, 1e-12, 20000));
  }

  SUBCASE("config invariant") {
    const auto s = SourceParams::from_p(1.3);
    const auto t = TruncationConfig::for_source(s, 1e-9);
    CHECK(std::pow(s.lambda_sq(), t.n_max + 1) <= t.tail_tolerance);
    if (t.n_max > 0) {
      CHECK(std::pow(s.lambda_sq(), t.n_max) > t.tail_tolerance);
    }
  }
}
