#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "chrono_duhamel/series_calculus.hpp"

using namespace chrono_duhamel;

namespace {

const double kE = std::exp(1.0);

// brute-force oracle for the comparison constant: scan far beyond the peak
double gamma_bruteforce(double r, double R, int k) {
  double best = 0.0;
  for (int p = k; p < 4000; ++p) {
    double fall = 1.0;
    for (int j = 0; j < k; ++j) fall *= (p - j);
    best = std::max(best, fall * std::pow(r / R, p));
  }
  return best / std::pow(r, k);
}

MajorantSeries random_series(std::mt19937_64& g, int degree) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> c(degree + 1);
  for (auto& x : c) x = u(g);
  return MajorantSeries(c);
}

}  // namespace

TEST_CASE("eval") {
  CHECK(MajorantSeries({0, 0, 0, 1}).eval(2.0) == 8.0);
  CHECK(MajorantSeries({1, 1}).eval(0.0) == 1.0);
  const MajorantSeries geo(std::vector<double>(11, 1.0));
  CHECK(geo.eval(0.5) == doctest::Approx((1 - std::pow(0.5, 11)) / 0.5).epsilon(1e-15));
  CHECK(eval(MajorantSeries(), 3.0) == 0.0);
}

TEST_CASE("negative or nan coefficients are rejected") {
  CHECK_THROWS_AS(MajorantSeries({1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(MajorantSeries({std::nan("")}), std::invalid_argument);
}

TEST_CASE("derivative") {
  CHECK(MajorantSeries({0, 0, 1}).derivative(1).coeffs() == std::vector<double>{0, 2});
  CHECK(MajorantSeries({5}).derivative(1).is_zero());
  CHECK(MajorantSeries({0, 0, 0, 1}).derivative(2).coeffs() == std::vector<double>{0, 6});
  CHECK(derivative(MajorantSeries({1, 2, 3}), 7).is_zero());
  CHECK(MajorantSeries({1, 2, 3, 4}).derivative(0).coeffs() == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("gamma constant examples") {
  CHECK(gamma_constant(1, 2, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_constant(1, 2, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gamma_constant(1, kE, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_constant(2, 2, 1), std::domain_error);
  CHECK_THROWS_AS(gamma_constant(3, 2, 0), std::domain_error);
}

TEST_CASE("gamma constant against brute force") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 300; ++i) {
    const double R = 0.5 + 2 * u(g), r = R * u(g);
    const int k = i % 5;
    CHECK(gamma_constant(r, R, k) == doctest::Approx(gamma_bruteforce(r, R, k)).epsilon(1e-12));
  }
}

TEST_CASE("gamma comparison term by term") {
  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const MajorantSeries f = random_series(g, 30);
    const double R = 0.3 + 2 * u(g), r = R * u(g);
    const int k = i % 6;
    if (f.derivative(k).eval(r) > gamma_constant(r, R, k) * f.eval(R) * (1 + 1e-12)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("flow closed forms") {
  CHECK(flow(MajorantSeries({0, 1}), 1.0, 1.0).value == doctest::Approx(kE).epsilon(1e-9));
  CHECK(flow(MajorantSeries({0, 0, 1}), 0.5, 1.0).value == doctest::Approx(2.0).epsilon(1e-9));
  const FlowResult back = flow(MajorantSeries({0, 0, 0, 2}), -1.0, 1.0);
  CHECK(back.status == FlowStatus::completed);
  CHECK(back.value == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-9));
  CHECK(flow(MajorantSeries({0, 1}), 0.0, 0.7).value == 0.7);
}

TEST_CASE("flow blow-up and hit-zero") {
  // z' = z^2 from 1 blows up at t = 1
  const FlowResult up = flow(MajorantSeries({0, 0, 1}), 2.0, 1.0);
  CHECK(up.status == FlowStatus::blew_up);
  CHECK(up.time_reached == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::isfinite(up.time_reached));

  const FlowResult down = flow(MajorantSeries({1}), -2.0, 1.0);
  CHECK(down.status == FlowStatus::hit_zero);
  CHECK(down.time_reached == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("complex flow of the linear field") {
  const std::complex<double> tau(0.3, 0.7), z0(0.2, -0.1);
  const ComplexFlowResult r = flow(MajorantSeries({0, 1}), tau, z0);
  CHECK(r.status == FlowStatus::completed);
  CHECK(std::abs(r.value - z0 * std::exp(tau)) < 1e-9);
}

TEST_CASE("guaranteed time") {
  CHECK(guaranteed_time(MajorantSeries({1}), 1, 0.1) == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(guaranteed_time(MajorantSeries({0, 0, 0, 2}), 1, 0.5) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(guaranteed_time(MajorantSeries({0, 1}), 1, 0.1) == doctest::Approx(std::log(10.0)).epsilon(1e-9));
  CHECK(guaranteed_time(MajorantSeries(), 1, 0.1) == kInfinity);
  // z' = -z^5 decays like t^{-1/4}; a horizon of 10 is exceeded for floor 0.1
  GuaranteedTimeOptions o;
  o.horizon = 10;
  CHECK(guaranteed_time(MajorantSeries({0, 0, 0, 0, 0, 1e-6}), 1, 0.1, o) == kInfinity);
}

TEST_CASE("apply majorant operator") {
  CHECK(apply_majorant_operator(MajorantSeries({0, 1}), MajorantSeries({0, 1}), 1).coeffs() ==
        std::vector<double>{0, 1});
  CHECK(apply_majorant_operator(MajorantSeries({1}), MajorantSeries({0, 0, 1}), 1).coeffs() ==
        std::vector<double>{0, 2});
  CHECK(apply_majorant_operator(MajorantSeries({0, 1}), MajorantSeries({0, 0, 1}), 2).coeffs() ==
        std::vector<double>{0, 0, 4});
  CHECK(apply_majorant_operator(MajorantSeries({0, 1}), MajorantSeries({2, 3}), 0).coeffs() ==
        std::vector<double>{2, 3});
}

TEST_CASE("flow group law") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const MajorantSeries X = random_series(g, 1 + i % 4);
    const double z0 = 0.05 + 0.25 * u(g), t1 = 0.5 * u(g), t2 = 0.5 * u(g);
    const FlowResult full = flow(X, t1 + t2, z0);
    const FlowResult half = flow(X, t1, z0);
    if (full.status != FlowStatus::completed || half.status != FlowStatus::completed) continue;
    const FlowResult two = flow(X, t2, half.value);
    REQUIRE(two.status == FlowStatus::completed);
    CHECK(std::abs(full.value - two.value) <= 10 * 1e-10 * full.value);
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("flow domination") {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(0, 1);
  const double tol = 10 * 1e-10;
  int violations = 0;
  for (int i = 0; i < 2000; ++i) {
    const MajorantSeries X = random_series(g, 1 + i % 4);
    const double rho = 0.3, T = 0.4;
    const FlowResult top = flow(X, T, rho);
    REQUIRE(top.status == FlowStatus::completed);
    const std::complex<double> z = std::polar(rho * u(g), 2 * M_PI * u(g));
    const std::complex<double> tau = std::polar(T * u(g), 2 * M_PI * u(g));
    const double lhs = std::abs(flow(X, tau, z).value);
    const double mid = flow(X, std::abs(tau), std::abs(z)).value;
    if (lhs > mid * (1 + tol) + 1e-15 || mid > top.value * (1 + tol)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("taylor-flow identity") {
  std::mt19937_64 g(23);
  for (int i = 0; i < 20; ++i) {
    const MajorantSeries X = random_series(g, 1 + i % 3);
    const MajorantSeries H = random_series(g, 1 + i % 4);
    const double R = 0.5, T = 0.1;
    const FlowResult back = flow(X, -T, R);
    REQUIRE(back.status == FlowStatus::completed);
    const double target = H.eval(R);
    // below the flow's own accuracy the residual is noise
    const double noise = 1e-10 * target;
    double sum = 0.0, term_scale = 1.0, last_residual = kInfinity;
    for (int k = 0; k <= 40; ++k) {
      if (k > 0) term_scale *= T / k;
      sum += term_scale * apply_majorant_operator(X, H, k).eval(back.value);
      const double residual = std::abs(target - sum);
      if (k >= 4 && last_residual > noise) CHECK(residual <= last_residual);
      last_residual = residual;
    }
    CHECK(last_residual <= 1e-8);
  }
}

TEST_CASE("evaluation is monotone") {
  std::mt19937_64 g(24);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const MajorantSeries f = random_series(g, 6);
    const double a = u(g), b = a + u(g);
    CHECK(f.eval(a) <= f.eval(b));
    std::vector<double> c = f.coeffs();
    c[i % c.size()] += u(g);
    CHECK(f.eval(b) <= MajorantSeries(c).eval(b));
  }
}
