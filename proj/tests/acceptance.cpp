// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chrono_duhamel/chrono_exp.hpp"
#include "chrono_duhamel/feynman_trees.hpp"

using namespace chrono_duhamel;
using cd = std::complex<double>;

namespace {

const double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Model cubic_kg(int M) {
  return Model{Grid(M, 2 * kPi), DispersionRelation{EquationKind::klein_gordon, 1.0},
               NonlinearitySpec::monomial(3, 1.0)};
}

CauchyData cos_data(const Model& m, double amp) {
  CauchyData d = CauchyData::zero(m.grid, m.disp, 0.0);
  for (int j = 0; j < m.grid.M; ++j) d.psi[j] = amp * std::cos(m.grid.x(j));
  return d;
}

Eigen::VectorXd random_vec(std::mt19937_64& g, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = u(g);
  return v;
}

SymTensor random_tensor(std::mt19937_64& g, int p, int d) {
  std::uniform_real_distribution<double> u(-1, 1);
  SymTensor t(p, d);
  for (double& c : t.coeffs()) c = u(g);
  return t;
}

SymFunctional random_functional(std::mt19937_64& g, int d, const std::vector<int>& degrees, int cap) {
  SymFunctional f(d, 1, cap);
  for (int p : degrees) f.set_term(random_tensor(g, p, d));
  return f;
}

MajorantSeries random_series(std::mt19937_64& g, int degree) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> c(degree + 1);
  for (double& x : c) x = u(g);
  return MajorantSeries(c);
}

// naive DFT, independent of the FFT backend
Eigen::VectorXcd dft(const Eigen::VectorXcd& f) {
  const int M = static_cast<int>(f.size());
  Eigen::VectorXcd F(M);
  for (int k = 0; k < M; ++k) {
    cd acc = 0;
    for (int j = 0; j < M; ++j) acc += f[j] * std::polar(1.0, -2 * kPi * j * k / M);
    F[k] = acc;
  }
  return F;
}

Outcome linear_exactness() {
  std::mt19937_64 g(101);
  std::uniform_real_distribution<double> u(-10, 10), a(-1, 1);
  const Grid grid(16, 2 * kPi);
  const DispersionRelation disp{EquationKind::klein_gordon, 1.0};
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int j = std::uniform_int_distribution<int>(0, grid.M - 1)(g);
    const double t = u(g), p0 = a(g), c0 = a(g);
    CauchyData d = CauchyData::zero(grid, disp, 0.0);
    for (int n = 0; n < grid.M; ++n) {
      const double phase = grid.xi(j) * grid.x(n);
      d.psi[n] = p0 * std::cos(phase);
      d.chi[n] = c0 * std::cos(phase);
    }
    const CauchyData out = propagate(grid, disp, d, t);
    const double eps = std::sqrt(1.0 + grid.xi(j) * grid.xi(j));
    const double pe = p0 * std::cos(eps * t) + c0 * std::sin(eps * t) / eps;
    const double ce = -eps * p0 * std::sin(eps * t) + c0 * std::cos(eps * t);
    const Eigen::VectorXcd P = dft(out.psi), C = dft(out.chi.cast<cd>());
    const Eigen::VectorXcd P0 = dft(d.psi), C0 = dft(d.chi.cast<cd>());
    // expected spectrum is the initial one scaled mode by mode
    const double sp = std::abs(p0) > 0 ? pe / p0 : 0.0, sc = std::abs(c0) > 0 ? ce / c0 : 0.0;
    const double scale = P0.norm() + C0.norm() * (1 + eps);
    const double err = ((P - sp * P0).norm() + (C - sc * C0).norm()) / scale;
    worst = std::max(worst, err);
  }
  double worst_group = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    CauchyData d = from_chart(grid, disp, random_vec(g, 2 * grid.M, 1.0), u(g));
    const double t1 = u(g), t2 = u(g);
    const Eigen::VectorXd ref = to_chart(propagate(grid, disp, d, t2));
    const Eigen::VectorXd two = to_chart(propagate(grid, disp, propagate(grid, disp, d, t1), t2));
    const Eigen::VectorXd back = to_chart(propagate(grid, disp, propagate(grid, disp, d, t1), d.time));
    worst_group = std::max({worst_group, (two - ref).norm() / ref.norm(),
                            (back - to_chart(d)).norm() / to_chart(d).norm()});
  }
  return {worst <= 1e-12 && worst_group <= 1e-12,
          fmt::format("per-mode worst {:.2e}, group/reversal worst {:.2e}", worst, worst_group)};
}

Outcome duhamel_order() {
  const Model m = cubic_kg(32);
  const CauchyData d = cos_data(m, 0.05);
  std::vector<double> res;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) res.push_back(duhamel_residual(evolve(m, d, 0.0, 1.0, dt), 0.0, 1.0).residual);
  bool ok = true;
  std::string ratios;
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double q = res[i - 1] / res[i];
    ok = ok && q >= 12 && q <= 20;
    ratios += fmt::format(" {:.2f}", q);
  }
  return {ok, fmt::format("residuals {:.2e}..{:.2e}, ratios{}", res.front(), res.back(), ratios)};
}

Outcome oracle_agreement() {
  const Model m = cubic_kg(32);
  const CauchyData d = cos_data(m, 0.05);
  auto rk = [&](double dt) {
    const Trajectory tr = evolve(m, d, 0.0, 1.0, dt);
    return to_chart(tr.trace(tr.states.size() - 1));
  };
  auto st = [&](double dt) { return to_chart(strang_split(m, d, 1.0, dt)); };
  const Eigen::VectorXd rk_h = rk(0.05), rk_h2 = rk(0.025);
  const Eigen::VectorXd st_h = st(0.01), st_h2 = st(0.005);
  const double rk_err = (rk_h - rk_h2).norm() / 15.0;
  const double st_err = (st_h - st_h2).norm() / 3.0;
  const double gap = (rk_h2 - st_h2).norm();
  return {gap <= 5 * (rk_err + st_err),
          fmt::format("gap {:.2e}, estimates rk4 {:.2e} strang {:.2e}", gap, rk_err, st_err)};
}

Outcome main_invariance() {
  const Model m = cubic_kg(8);
  const Trajectory tr = evolve(m, cos_data(m, 0.05), 0.0, 0.5, 0.025);
  const InvarianceScan s3 = invariance_scan(point_eval_functional(m, 0.0, 0, 3), tr, 0.0, 0.5);
  const InvarianceScan s5 = invariance_scan(point_eval_functional(m, 0.0, 0, 5), tr, 0.0, 0.5);
  const double final_gap = std::abs(s5.points.back().value - s5.points.front().value);
  const double ratio = s3.drift / s5.drift;
  return {s5.drift <= 1e-6 && ratio >= 10 && final_gap <= 1e-6,
          fmt::format("drift P=5 {:.2e}, P=3 {:.2e}, ratio {:.1f}, final gap {:.2e}", s5.drift, s3.drift, ratio,
                      final_gap)};
}

Outcome tree_equivalence() {
  std::mt19937_64 g(105);
  double worst = 0.0;
  for (int M : {4, 8}) {
    const Model m = cubic_kg(M);
    const SymFunctional f = point_eval_functional(m, 0.0, 0, 5);
    const ChronoResult u = chrono_exp_evolve(m, f, 0.0, 0.25, 40);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd c2 = random_vec(g, 2 * M, 0.3);
      const double tree = tree_expand(m, f, 0.0, 0.25, 2, c2).total;
      worst = std::max(worst, std::abs(tree - eval_series(u.value, c2)[0]));
    }
  }
  return {worst <= 1e-8, fmt::format("worst difference {:.2e}", worst)};
}

Outcome majorant_suite() {
  std::mt19937_64 g(106);
  std::uniform_real_distribution<double> u(0, 1);
  const Model m = cubic_kg(4);
  const int n = 1000;
  int bad_coeff = 0, bad_op = 0, bad_iter = 0, bad_bound = 0, bad_gamma = 0, coeff_checked = 0;

  for (int trial = 0; trial < n; ++trial) {
    const double t = random_vec(g, 1, 1.0)[0];
    const SymFunctional f = random_functional(g, 8, {1 + trial % 2, 3}, 5);
    const double X3 = upper_norm(vector_field_tensor(m, t, 3));
    const SymFunctional vf = vdot(m, t, f).value;
    for (int mdeg : vf.degrees()) {
      const int p = mdeg - 2;
      const double rhs = f.has_term(p) ? p * X3 * upper_norm(f.term(p)) : 0.0;
      ++coeff_checked;
      if (upper_norm(vf.term(mdeg)) > rhs * (1 + 1e-12)) ++bad_coeff;
    }
  }

  for (int trial = 0; trial < n; ++trial) {
    const double t = random_vec(g, 1, 1.0)[0];
    const SymFunctional f = random_functional(g, 8, {0, 1, 2, 3}, 5);
    const MajorantSeries V = MajorantSeries::monomial(3, upper_norm(vector_field_tensor(m, t, 3)));
    const double rho = 0.5 * u(g);
    if (majorant_of(vdot(m, t, f).value).eval(rho) > V.eval(rho) * majorant_of(f).derivative(1).eval(rho) * (1 + 1e-12))
      ++bad_op;
  }

  const MajorantSeries X = chart_majorant(m, 0.0, 1.0, 8);
  for (int trial = 0; trial < n; ++trial) {
    const SymFunctional f = random_functional(g, 8, {0, 1}, 7);
    const int k = 1 + trial % 3;
    SymFunctional cur = f;
    for (int j = 0; j < k; ++j) cur = vdot(m, (j + 1) / 8.0, cur).value;
    const double r = 0.6 * u(g);
    if (majorant_of(cur).eval(r) > apply_majorant_operator(X, majorant_of(f), k).eval(r) * (1 + 1e-12)) ++bad_iter;
  }

  for (int trial = 0; trial < n; ++trial) {
    const int d = 1 + trial % 6;
    const SymFunctional f = random_functional(g, d, {0, 1, 2, 3, 4}, 4);
    const Eigen::VectorXd phi = random_vec(g, d, 1.0);
    if (std::abs(eval_series(f, phi)[0]) > majorant_of(f).eval(phi.lpNorm<Eigen::Infinity>()) * (1 + 1e-12) + 1e-15)
      ++bad_bound;
  }

  for (int trial = 0; trial < n; ++trial) {
    const MajorantSeries f = random_series(g, 30);
    const double R = 0.5 + 1.5 * u(g), r = R * (0.05 + 0.9 * u(g));
    const int k = trial % 5;
    if (f.derivative(k).eval(r) > gamma_constant(r, R, k) * f.eval(R) * (1 + 1e-12)) ++bad_gamma;
  }

  const int total = bad_coeff + bad_op + bad_iter + bad_bound + bad_gamma;
  return {total == 0 && coeff_checked >= n,
          fmt::format("violations: coefficients {}/{}, operator {}/{}, iterated {}/{}, tensor bound {}/{}, gamma {}/{}",
                      bad_coeff, coeff_checked, bad_op, n, bad_iter, n, bad_bound, n, bad_gamma, n)};
}

Outcome flow_lemma() {
  std::mt19937_64 g(107);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 10000;
  int bad = 0, skipped = 0;
  const double tol = 10 * FlowOptions{}.rel_tol;
  for (int i = 0; i < n; ++i) {
    const MajorantSeries X = random_series(g, 1 + i % 4);
    const cd z = std::polar(0.3 * u(g), 2 * kPi * u(g));
    const cd tau = std::polar(0.4 * u(g), 2 * kPi * u(g));
    const FlowResult dom = flow(X, std::abs(tau), std::abs(z));
    if (dom.status != FlowStatus::completed) {
      ++skipped;
      continue;
    }
    const ComplexFlowResult c = flow(X, tau, z);
    if (c.status != FlowStatus::completed || std::abs(c.value) > dom.value * (1 + tol) + 1e-15) ++bad;
  }

  // polynomial presets for the Taylor-flow identity
  const std::vector<std::pair<MajorantSeries, MajorantSeries>> presets = {
      {MajorantSeries({0, 0, 0, 2}), MajorantSeries({0, 1})},
      {MajorantSeries({1, 1}), MajorantSeries({1, 1, 1})},
      {MajorantSeries({0, 0, 1, 0.5}), MajorantSeries({0, 0, 0, 1})},
      {MajorantSeries({0.2, 0, 0, 1}), MajorantSeries({0.5, 0, 2})}};
  const double R = 0.5, T = 0.1;
  double worst_res = 0.0;
  bool monotone = true;
  for (const auto& [Xp, H] : presets) {
    const double r = flow(Xp, -T, R).value;
    // r carries the flow's relative error, below that the residual is noise
    const double noise = tol * H.eval(R);
    double sum = 0, scale = 1, prev_res = kInfinity;
    for (int k = 0; k <= 40; ++k) {
      if (k > 0) scale *= T / k;
      const double term = scale * apply_majorant_operator(Xp, H, k).eval(r);
      if (term < 0) monotone = false;
      sum += term;
      const double res = std::abs(H.eval(R) - sum);
      if (res > prev_res && res > noise) monotone = false;
      prev_res = res;
    }
    worst_res = std::max(worst_res, prev_res);
  }
  return {bad == 0 && skipped < n / 2 && monotone && worst_res <= 1e-8,
          fmt::format("domination violations {}/{} ({} blow-ups skipped), taylor residual {:.2e}{}", bad, n - skipped,
                      skipped, worst_res, monotone ? "" : ", not monotone")};
}

Outcome certified_window() {
  const Model m = cubic_kg(8);
  const double R = 0.2, floor = 0.05, window = 1.0;
  const MajorantSeries X = chart_majorant(m, 0.0, window, 32);
  const double gt = guaranteed_time(X, R, floor);
  const double T = gt / 2;
  const SymFunctional f = point_eval_functional(m, 0.0, 0, 5);
  Certificate cert = certify_window(majorant_of(f), X, R, T);
  bool holds = false;
  if (cert.pass) {
    const ChronoResult uf = chrono_exp_evolve(m, f, 0.0, T, 80);
    check_transported(cert, majorant_of(uf.value));
    holds = cert.bound_holds.value_or(false);
  }
  // pure cubic majorants: z' = -C z^3 reaches the floor in closed form
  bool pure = X.coeff(3) > 0;
  for (int k = 0; k <= X.truncation_degree(); ++k)
    if (k != 3 && X.coeff(k) != 0) pure = false;
  auto closed = [&](double C, double Rr, double fl) { return (1 / (fl * fl) - 1 / (Rr * Rr)) / (2 * C); };
  const double rel_measured = pure ? std::abs(gt - closed(X.coeff(3), R, floor)) / closed(X.coeff(3), R, floor) : 1.0;
  const MajorantSeries preset({0, 0, 0, 2});
  const double gp = guaranteed_time(preset, 1.0, 0.5);
  const double rel_preset = std::abs(gp - closed(2.0, 1.0, 0.5)) / closed(2.0, 1.0, 0.5);
  return {holds && T <= window && pure && rel_measured <= 1e-6 && rel_preset <= 1e-6,
          fmt::format("T {:.4g}, bound {}, closed-form relative error measured {:.1e} preset {:.1e}", T,
                      holds ? "holds" : "fails", rel_measured, rel_preset)};
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"linear exactness", 1, linear_exactness},
      {"duhamel residual order", 10, duhamel_order},
      {"rk4 vs strang oracle", 10, oracle_agreement},
      {"main invariance", 300, main_invariance},
      {"tree/tensor equivalence", 120, tree_equivalence},
      {"majorant suite", 60, majorant_suite},
      {"flow lemma", 60, flow_lemma},
      {"certified window", 60, certified_window},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < criteria[i].budget_s;
    if (!pass) ++failures;
    fmt::print("{} [{}] {}: {} ({:.2f}s of {:.0f}s)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail,
               secs, criteria[i].budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
