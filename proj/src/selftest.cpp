#include "chrono_duhamel/selftest.hpp"

#include <fmt/format.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "chrono_duhamel/chrono_exp.hpp"
#include "chrono_duhamel/feynman_trees.hpp"

namespace chrono_duhamel {

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  Eigen::VectorXd vec(int d, double scale = 1.0) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = uniform(-scale, scale);
    return v;
  }
};

SymTensor random_tensor(Rng& rng, int p, int d, int codim = 1) {
  SymTensor t(p, d, codim);
  for (double& c : t.coeffs()) c = rng.uniform(-1, 1);
  return t;
}

SymFunctional random_functional(Rng& rng, int d, int max_degree, int cap) {
  SymFunctional f(d, 1, cap);
  for (int p = 0; p <= max_degree; ++p)
    if (rng.uniform(0, 1) < 0.7) f.set_term(random_tensor(rng, p, d));
  return f;
}

MajorantSeries random_series(Rng& rng, int degree) {
  std::vector<double> c(degree + 1);
  for (double& x : c) x = rng.uniform(0, 1);
  return MajorantSeries(c);
}

Model small_kg(int M = 4) {
  return Model{Grid(M, 2.0 * 3.14159265358979323846), DispersionRelation{EquationKind::klein_gordon, 1.0},
               NonlinearitySpec::monomial(3, 1.0)};
}

using Check = std::function<SelftestEntry(Rng&)>;

SelftestEntry verdict(const std::string& name, int violations, int trials, double worst = 0.0) {
  return {name, violations == 0, fmt::format("{}/{} violations, worst {:.3e}", violations, trials, worst)};
}

}  // namespace

std::vector<SelftestEntry> run_selftest(std::uint64_t seed) {
  std::vector<std::pair<std::string, Check>> checks;

  checks.push_back({"flow_group_law", [](Rng& rng) {
    int bad = 0;
    double worst = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
      const MajorantSeries X = random_series(rng, rng.integer(1, 4));
      const double z0 = rng.uniform(0.05, 0.3), a = rng.uniform(0, 0.5), b = rng.uniform(0, 0.5);
      const FlowResult full = flow(X, a + b, z0);
      const FlowResult two = flow(X, b, flow(X, a, z0).value);
      if (full.status != FlowStatus::completed || two.status != FlowStatus::completed) continue;
      const double err = std::abs(full.value - two.value) / full.value;
      worst = std::max(worst, err);
      if (err > 1e-9) ++bad;
    }
    return verdict("flow_group_law", bad, n, worst);
  }});

  checks.push_back({"flow_domination", [](Rng& rng) {
    int bad = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      const MajorantSeries X = random_series(rng, rng.integer(1, 4));
      const double rho = 0.3, T = 0.4;
      const FlowResult top = flow(X, T, rho);
      if (top.status != FlowStatus::completed) continue;
      const std::complex<double> z = std::polar(rng.uniform(0, rho), rng.uniform(0, 6.28318));
      const std::complex<double> tau = std::polar(rng.uniform(0, T), rng.uniform(0, 6.28318));
      const double lhs = std::abs(flow(X, tau, z).value);
      const double mid = flow(X, std::abs(tau), std::abs(z)).value;
      if (lhs > mid * (1 + 1e-9) + 1e-15 || mid > top.value * (1 + 1e-9)) ++bad;
    }
    return verdict("flow_domination", bad, n);
  }});

  checks.push_back({"gamma_comparison", [](Rng& rng) {
    int bad = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      const MajorantSeries f = random_series(rng, 30);
      const double R = rng.uniform(0.5, 2), r = R * rng.uniform(0.05, 0.95);
      const int k = rng.integer(0, 4);
      if (f.derivative(k).eval(r) > gamma_constant(r, R, k) * f.eval(R) * (1 + 1e-12)) ++bad;
    }
    return verdict("gamma_comparison", bad, n);
  }});

  checks.push_back({"taylor_flow_identity", [](Rng& rng) {
    int bad = 0;
    const int n = 10;
    for (int i = 0; i < n; ++i) {
      const MajorantSeries X = random_series(rng, 2);
      const MajorantSeries H = random_series(rng, 3);
      const double R = 0.5, T = 0.1;
      const double r = flow(X, -T, R).value;
      double sum = 0, fact = 1, Tk = 1;
      for (int k = 0; k <= 40; ++k) {
        if (k > 0) {
          fact *= k;
          Tk *= T;
        }
        sum += Tk / fact * apply_majorant_operator(X, H, k).eval(r);
      }
      if (std::abs(sum - H.eval(R)) > 1e-8) ++bad;
    }
    return verdict("taylor_flow_identity", bad, n);
  }});

  checks.push_back({"polarization_consistency", [](Rng& rng) {
    int bad = 0;
    double worst = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      const int p = rng.integer(1, 5), d = rng.integer(1, 6);
      const SymTensor t = random_tensor(rng, p, d);
      std::vector<Eigen::VectorXd> args;
      for (int j = 0; j < p; ++j) args.push_back(rng.vec(d));
      const double direct = t.eval_homogeneous(args)[0];
      const double pol = polarize([&](const Eigen::VectorXd& x) { return t.eval_diagonal(x); }, args)[0];
      const double err = std::abs(direct - pol) / std::max(1.0, std::abs(direct));
      worst = std::max(worst, err);
      if (err > 1e-10) ++bad;
    }
    return verdict("polarization_consistency", bad, n, worst);
  }});

  checks.push_back({"majorant_bound", [](Rng& rng) {
    int bad = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      const int d = rng.integer(1, 6);
      const SymFunctional f = random_functional(rng, d, 4, 4);
      const Eigen::VectorXd phi = rng.vec(d);
      const double lhs = std::abs(eval_series(f, phi)[0]);
      if (lhs > majorant_of(f).eval(phi.lpNorm<Eigen::Infinity>()) * (1 + 1e-12) + 1e-15) ++bad;
    }
    return verdict("majorant_bound", bad, n);
  }});

  checks.push_back({"norm_sandwich", [](Rng& rng) {
    int bad = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
      const int p = rng.integer(1, 3), d = rng.integer(1, 4);
      const SymTensor t = random_tensor(rng, p, d);
      TensorNormOptions o;
      o.directions = 32;
      o.seed = rng.eng();
      const TensorNormBounds b = tensor_norm(t, o);
      double pp = 1;
      for (int j = 0; j < p; ++j) pp *= p;
      double pf = 1;
      for (int j = 2; j <= p; ++j) pf *= j;
      if (b.lower > b.upper * (1 + 1e-12) || b.lower > pp / pf * b.diagonal_lower * (1 + 1e-12)) ++bad;
    }
    return verdict("norm_sandwich", bad, n);
  }});

  checks.push_back({"propagator_group_law", [](Rng& rng) {
    int bad = 0;
    double worst = 0;
    const int n = 20;
    const Grid g(16, 5.0);
    for (int i = 0; i < n; ++i) {
      const DispersionRelation disp{i % 2 ? EquationKind::klein_gordon : EquationKind::schrodinger, rng.uniform(0, 2)};
      const CauchyData d = from_chart(g, disp, rng.vec(32), 0.0);
      const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
      const CauchyData two = propagate(g, disp, propagate(g, disp, d, a), b);
      const CauchyData one = propagate(g, disp, d, b);
      const double err = (to_chart(two) - to_chart(one)).norm() / to_chart(one).norm();
      worst = std::max(worst, err);
      if (err > 1e-12) ++bad;
    }
    return verdict("propagator_group_law", bad, n, worst);
  }});

  checks.push_back({"energy_conservation", [](Rng& rng) {
    int bad = 0;
    const int n = 20;
    const Grid g(16, 5.0);
    const DispersionRelation disp{EquationKind::klein_gordon, 1.0};
    for (int i = 0; i < n; ++i) {
      const CauchyData d = from_chart(g, disp, rng.vec(32), 0.0);
      const double e0 = energy(g, disp, d);
      const double e1 = energy(g, disp, propagate(g, disp, d, rng.uniform(-10, 10)));
      if (std::abs(e1 - e0) > 1e-12 * e0) ++bad;
    }
    return verdict("energy_conservation", bad, n);
  }});

  checks.push_back({"trace_identity", [](Rng& rng) {
    int bad = 0;
    const int n = 20;
    const Model m = small_kg(8);
    for (int i = 0; i < n; ++i) {
      CauchyData d = from_chart(m.grid, m.disp, rng.vec(16), rng.uniform(-2, 2));
      const CauchyData back = sample_at(m.grid, m.disp, theta(m.grid, m.disp, d), d.time);
      if ((to_chart(back) - to_chart(d)).norm() > 1e-12 * std::max(1.0, to_chart(d).norm())) ++bad;
    }
    return verdict("trace_identity", bad, n);
  }});

  checks.push_back({"vdot_pointwise", [](Rng& rng) {
    int bad = 0;
    const int n = 10;
    const Model m = small_kg(4);
    for (int i = 0; i < n; ++i) {
      SymFunctional f(8, 1, 5);
      f.set_term(random_tensor(rng, 1, 8));
      f.set_term(random_tensor(rng, 3, 8));
      const double t = rng.uniform(-1, 1);
      const Eigen::VectorXd c = rng.vec(8, 0.5);
      const double lhs = eval_series(vdot(m, t, f).value, c)[0];
      const double rhs = directional_derivative(f, c, lagrange_duhamel_chart(m, t, c))[0];
      if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(rhs))) ++bad;
    }
    return verdict("vdot_pointwise", bad, n);
  }});

  checks.push_back({"coefficient_domination", [](Rng& rng) {
    int bad = 0;
    const int n = 20;
    const Model m = small_kg(4);
    for (int i = 0; i < n; ++i) {
      const double t = rng.uniform(-1, 1);
      const SymFunctional f = random_functional(rng, 8, 3, 5);
      const SymFunctional vf = vdot(m, t, f).value;
      const double X3 = upper_norm(vector_field_tensor(m, t, 3));
      for (int mdeg : vf.degrees()) {
        const int p = mdeg - 2;
        const double rhs = f.has_term(p) ? p * X3 * upper_norm(f.term(p)) : 0.0;
        if (upper_norm(vf.term(mdeg)) > rhs * (1 + 1e-12) + 1e-300) ++bad;
      }
    }
    return verdict("coefficient_domination", bad, n);
  }});

  checks.push_back({"tree_tensor_equivalence", [](Rng& rng) {
    const Model m = small_kg(4);
    const SymFunctional f = point_eval_functional(m, 0.0, 0, 5);
    const Eigen::VectorXd c2 = rng.vec(8, 0.3);
    const double tree = tree_expand(m, f, 0.0, 0.25, 2, c2).total;
    const double chrono = eval_series(chrono_exp_evolve(m, f, 0.0, 0.25, 40).value, c2)[0];
    const double err = std::abs(tree - chrono);
    return SelftestEntry{"tree_tensor_equivalence", err <= 1e-8, fmt::format("difference {:.3e}", err)};
  }});

  checks.push_back({"main_invariance", [](Rng&) {
    Model m = small_kg(4);
    CauchyData d = CauchyData::zero(m.grid, m.disp, 0.0);
    for (int j = 0; j < 4; ++j) d.psi[j] = 0.05 * std::cos(m.grid.x(j));
    const Trajectory traj = evolve(m, d, 0.0, 0.5, 0.025);
    const InvarianceScan scan = invariance_scan(point_eval_functional(m, 0.0, 0, 5), traj, 0.0, 0.5);
    return SelftestEntry{"main_invariance", scan.drift <= 1e-6, fmt::format("drift {:.3e}", scan.drift)};
  }});

  std::vector<SelftestEntry> out;
  Rng rng(seed);
  for (auto& [name, check] : checks) {
    try {
      out.push_back(check(rng));
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

}  // namespace chrono_duhamel
