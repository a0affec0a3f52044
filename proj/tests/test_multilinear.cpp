#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "chrono_duhamel/multilinear.hpp"
#include "chrono_duhamel/tensor_io.hpp"

using namespace chrono_duhamel;

namespace {

Eigen::VectorXd unit(int d, int i) { return Eigen::VectorXd::Unit(d, i); }

Eigen::VectorXd random_vec(std::mt19937_64& g, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = u(g);
  return v;
}

SymTensor random_tensor(std::mt19937_64& g, int p, int d, int codim = 1) {
  std::uniform_real_distribution<double> u(-1, 1);
  SymTensor t(p, d, codim);
  for (double& c : t.coeffs()) c = u(g);
  return t;
}

// sum over every ordered index tuple of T_{i1..ip} a1_{i1} ... ap_{ip}
double full_sum(const SymTensor& t, int comp, const std::vector<Eigen::VectorXd>& args) {
  const int p = t.degree(), d = t.dim();
  std::vector<int> idx(p, 0);
  double total = 0.0;
  while (true) {
    double term = t.get(comp, idx);
    for (int j = 0; j < p; ++j) term *= args[j][idx[j]];
    total += term;
    int j = p - 1;
    while (j >= 0 && ++idx[j] == d) idx[j--] = 0;
    if (j < 0) break;
  }
  return total;
}

}  // namespace

TEST_CASE("canonical storage size") {
  CHECK(SymTensor(2, 2).size() == 3);
  CHECK(SymTensor(5, 16).size() == 15504);
  CHECK(SymTensor(0, 4, 3).coeffs().size() == 3);
}

TEST_CASE("eval homogeneous examples") {
  SymTensor f(2, 2);
  const std::vector<int> off{0, 1};
  f.set(0, off, 0.5);
  CHECK(f.eval_homogeneous({unit(2, 0), unit(2, 1)})[0] == doctest::Approx(0.5));
  CHECK(f.eval_diagonal(Eigen::Vector2d(3, 5))[0] == doctest::Approx(15.0));

  std::mt19937_64 g(1);
  const SymTensor r = random_tensor(g, 3, 4);
  CHECK(r.eval_homogeneous({random_vec(g, 4), Eigen::VectorXd::Zero(4), random_vec(g, 4)})[0] == 0.0);

  SymTensor c(3, 1);
  c.coeffs()[0] = 2.0;
  Eigen::VectorXd three(1), one(1);
  three << 3;
  one << 1;
  CHECK(c.eval_homogeneous({three, one, one})[0] == doctest::Approx(6.0));
}

TEST_CASE("dimension mismatch is rejected") {
  SymTensor f(2, 3);
  CHECK_THROWS(f.eval_homogeneous({unit(3, 0)}));
  CHECK_THROWS(f.eval_homogeneous({unit(3, 0), unit(2, 0)}));
}

TEST_CASE("eval homogeneous against the full index sum") {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 1 + trial % 4, d = 1 + trial % 5, codim = 1 + trial % 2;
    const SymTensor t = random_tensor(g, p, d, codim);
    std::vector<Eigen::VectorXd> args;
    for (int j = 0; j < p; ++j) args.push_back(random_vec(g, d));
    const Eigen::VectorXd got = t.eval_homogeneous(args);
    for (int i = 0; i < codim; ++i) CHECK(got[i] == doctest::Approx(full_sum(t, i, args)).epsilon(1e-12));
  }
}

TEST_CASE("polarize examples") {
  Eigen::VectorXd a(1), b(1), c(1);
  a << 1.7;
  b << -0.3;
  c << 3;
  auto lin = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, 4.0 * x[0]); };
  CHECK(polarize(lin, {a})[0] == doctest::Approx(4.0 * 1.7).epsilon(1e-15));
  auto sq = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x[0] * x[0]); };
  CHECK(polarize(sq, {a, b})[0] == doctest::Approx(1.7 * -0.3).epsilon(1e-14));
  auto cube = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(1, x[0] * x[0] * x[0]); };
  Eigen::VectorXd one(1), two(1);
  one << 1;
  two << 2;
  CHECK(polarize(cube, {one, two, c})[0] == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("polarization consistency") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int p = 1 + trial % 5, d = 1 + trial % 8;
    const SymTensor t = random_tensor(g, p, d);
    std::vector<Eigen::VectorXd> args;
    for (int j = 0; j < p; ++j) args.push_back(random_vec(g, d));
    const double direct = t.eval_homogeneous(args)[0];
    const double pol = polarize([&](const Eigen::VectorXd& x) { return t.eval_diagonal(x); }, args)[0];
    CHECK(std::abs(direct - pol) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("tensor norm examples") {
  SymTensor s(2, 1);
  s.coeffs()[0] = -2.5;
  const TensorNormBounds b = tensor_norm(s);
  CHECK(b.upper == doctest::Approx(2.5));
  CHECK(b.lower == doctest::Approx(2.5));

  const TensorNormBounds z = tensor_norm(SymTensor(3, 4));
  CHECK(z.upper == 0.0);
  CHECK(z.lower == 0.0);

  SymTensor l(1, 2);
  l.coeffs() = {3, 4};
  TensorNormOptions o;
  o.arg_norm = NormKind::l2;
  const TensorNormBounds e = tensor_norm(l, o);
  CHECK(e.upper == doctest::Approx(7.0));
  CHECK(e.lower >= 5.0 * (1 - 1e-9));
  CHECK(e.lower <= 5.0 * (1 + 1e-12));
}

TEST_CASE("norm sandwich") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 120; ++trial) {
    const int p = 1 + trial % 4, d = 1 + trial % 4;
    const SymTensor t = random_tensor(g, p, d);
    TensorNormOptions o;
    o.directions = 64;
    o.seed = g();
    o.arg_norm = static_cast<NormKind>(trial % 3);
    const TensorNormBounds b = tensor_norm(t, o);
    const double pp_over_pf = std::pow(p, p) / std::tgamma(p + 1.0);
    CHECK(b.lower <= b.upper * (1 + 1e-12));
    CHECK(b.diagonal_lower <= b.lower * (1 + 1e-12));
    CHECK(b.lower <= pp_over_pf * b.diagonal_lower * (1 + 1e-12));
  }
}

TEST_CASE("eval series examples") {
  const SymFunctional one = SymFunctional::constant(3, 1.0);
  CHECK(eval_series(one, Eigen::Vector3d(4, -2, 9))[0] == 1.0);

  const SymFunctional delta = SymFunctional::linear(unit(4, 2));
  CHECK(eval_series(delta, unit(4, 2))[0] == 1.0);

  SymFunctional f(1, 1, 5);
  SymTensor t1(1, 1), t3(3, 1);
  t1.coeffs()[0] = 1;
  t3.coeffs()[0] = 1;
  f.set_term(t1);
  f.set_term(t3);
  CHECK(eval_series(f, Eigen::VectorXd::Constant(1, 2.0))[0] == doctest::Approx(10.0));
  CHECK(f.degrees() == std::vector<int>{1, 3});
  CHECK_THROWS_AS(f.term_mut(6), std::out_of_range);
}

TEST_CASE("directional derivative examples") {
  SymFunctional cube(1, 1, 3);
  cube.term_mut(3).coeffs()[0] = 1;
  CHECK(directional_derivative(cube, Eigen::VectorXd::Constant(1, 2), Eigen::VectorXd::Constant(1, 1))[0] ==
        doctest::Approx(12.0));

  std::mt19937_64 g(5);
  const Eigen::VectorXd w = random_vec(g, 5), phi = random_vec(g, 5), psi = random_vec(g, 5);
  CHECK(directional_derivative(SymFunctional::linear(w), phi, psi)[0] == doctest::Approx(w.dot(psi)));

  SymFunctional prod(2, 1, 2);
  const std::vector<int> off{0, 1};
  prod.term_mut(2).set(0, off, 0.5);
  CHECK(directional_derivative(prod, Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 0))[0] == doctest::Approx(2.0));
}

TEST_CASE("directional derivative matches difference quotients") {
  std::mt19937_64 g(6);
  for (int trial = 0; trial < 30; ++trial) {
    SymFunctional f(4, 1, 4);
    for (int p = 0; p <= 4; ++p) f.set_term(random_tensor(g, p, 4));
    const Eigen::VectorXd phi = random_vec(g, 4), psi = random_vec(g, 4);
    const double d = directional_derivative(f, phi, psi)[0];
    const double h = 1e-4;
    // central difference, O(h^2)
    const double fd = (eval_series(f, phi + h * psi)[0] - eval_series(f, phi - h * psi)[0]) / (2 * h);
    CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("majorant bound") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 6, codim = 1 + trial % 3;
    SymFunctional f(d, codim, 4);
    for (int p = 0; p <= 4; ++p)
      if (u(g) < 0.7) f.set_term(random_tensor(g, p, d, codim));
    const Eigen::VectorXd phi = random_vec(g, d, 2.0);
    const double lhs = eval_series(f, phi).lpNorm<Eigen::Infinity>();
    if (lhs > majorant_of(f).eval(phi.lpNorm<Eigen::Infinity>()) * (1 + 1e-12) + 1e-300) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("lipschitz bound") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + trial % 5;
    SymFunctional f(d, 1, 5);
    for (int p = 0; p <= 5; ++p) f.set_term(random_tensor(g, p, d));
    const Eigen::VectorXd phi = random_vec(g, d), hpsi = 0.3 * random_vec(g, d);
    const double r = std::max(phi.lpNorm<Eigen::Infinity>(), (phi + hpsi).lpNorm<Eigen::Infinity>());
    const double lhs = std::abs(eval_series(f, phi + hpsi)[0] - eval_series(f, phi)[0]);
    const double rhs = majorant_of(f).derivative(1).eval(r) * hpsi.lpNorm<Eigen::Infinity>();
    if (lhs > rhs * (1 + 1e-12) + 1e-15) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("contraction and codomain pairing") {
  std::mt19937_64 g(9);
  const SymTensor t = random_tensor(g, 3, 4, 2);
  const Eigen::VectorXd v = random_vec(g, 4), a = random_vec(g, 4), b = random_vec(g, 4);
  const Eigen::VectorXd y = random_vec(g, 2);
  const Eigen::VectorXd direct = t.eval_homogeneous({v, a, b});
  CHECK(t.contract(v).eval_homogeneous({a, b}).isApprox(direct, 1e-12));
  CHECK(t.pair_codomain(y).eval_homogeneous({v, a, b})[0] == doctest::Approx(y.dot(direct)).epsilon(1e-12));
}

TEST_CASE("tensor dump round trip") {
  std::mt19937_64 g(10);
  const std::vector<SymTensor> ts{random_tensor(g, 0, 3, 2), random_tensor(g, 2, 3, 1), random_tensor(g, 4, 5, 1)};
  const auto dir = std::filesystem::temp_directory_path() / "chrono_duhamel_test_io";
  std::filesystem::create_directories(dir);

  save_tensors_binary((dir / "t.bin").string(), ts);
  const auto back = load_tensors((dir / "t.bin").string());
  REQUIRE(back.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(back[i].degree() == ts[i].degree());
    CHECK(back[i].codomain_dim() == ts[i].codomain_dim());
    CHECK(back[i].coeffs() == ts[i].coeffs());
  }

  {
    std::ofstream out(dir / "t.txt");
    for (const auto& t : ts) write_tensor_text(out, t);
  }
  const auto text = load_tensors((dir / "t.txt").string());
  REQUIRE(text.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(text[i].coeffs() == ts[i].coeffs());

  // binary layout: three little-endian int64 then the float64 entries
  std::ifstream raw(dir / "t.bin", std::ios::binary);
  std::int64_t header[3];
  raw.read(reinterpret_cast<char*>(header), sizeof header);
  CHECK(header[0] == 0);
  CHECK(header[1] == 3);
  CHECK(header[2] == 2);
  std::filesystem::remove_all(dir);
}
