#include "chrono_duhamel/duhamel_dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace chrono_duhamel {

NonlinearitySpec NonlinearitySpec::monomial(int k, double lambda) {
  NonlinearitySpec n;
  n.coeffs[k] = lambda;
  return n;
}

bool NonlinearitySpec::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second == 0.0; });
}

int NonlinearitySpec::max_degree() const {
  int d = 0;
  for (const auto& [k, v] : coeffs)
    if (v != 0.0) d = std::max(d, k);
  return d;
}

MajorantSeries NonlinearitySpec::majorant() const {
  if (is_zero()) return MajorantSeries();
  std::vector<double> c(max_degree() + 1, 0.0);
  for (const auto& [k, v] : coeffs)
    if (k >= 0 && k < static_cast<int>(c.size())) c[k] = std::abs(v);
  return MajorantSeries(std::move(c));
}

std::complex<double> NonlinearitySpec::apply(std::complex<double> u) const {
  std::complex<double> acc = 0.0;
  for (const auto& [k, v] : coeffs)
    if (v != 0.0) acc += v * (k == 0 ? std::complex<double>(1.0) : std::pow(u, k));
  return acc;
}

Eigen::VectorXcd NonlinearitySpec::apply(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    // integer powers by repeated multiplication keep real inputs exactly real
    std::complex<double> acc = 0.0;
    for (const auto& [k, v] : coeffs) {
      if (v == 0.0) continue;
      std::complex<double> p = 1.0;
      for (int i = 0; i < k; ++i) p *= u[j];
      acc += v * p;
    }
    out[j] = acc;
  }
  return out;
}

NumericalError::NumericalError(const std::string& stage, long step, const std::string& what)
    : std::runtime_error(fmt::format("{} diverged at step {}: {}", stage, step, what)), stage_(stage), step_(step) {}

FreeSolution theta(const Grid& grid, const DispersionRelation& disp, const CauchyData& pde_cauchy_data) {
  return make_free_solution(grid, disp, pde_cauchy_data);
}

Eigen::VectorXd lagrange_duhamel_chart(const Model& model, double t, const Eigen::VectorXd& c) {
  const Grid& g = model.grid;
  if (model.nonlin.is_zero()) return Eigen::VectorXd::Zero(c.size());
  const CauchyData at_t = propagate(g, model.disp, from_chart(g, model.disp, c, 0.0), t);
  const Eigen::VectorXcd source = model.nonlin.apply(at_t.psi);
  return to_chart(green_apply(g, model.disp, t, source).chart_data);
}

FreeSolution lagrange_duhamel_V(const Model& model, double t, const FreeSolution& phi) {
  return free_solution_from_chart(model.grid, model.disp, lagrange_duhamel_chart(model, t, chart_coords(phi)));
}

CauchyData Trajectory::trace(std::size_t i) const {
  return sample_at(model.grid, model.disp, states[i].current, states[i].time);
}

namespace {

long step_count(double span, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double ratio = std::abs(span) / dt;
  const long n = std::lround(ratio);
  if (std::abs(ratio - n) > 1e-6 * std::max(1.0, ratio))
    throw std::invalid_argument(fmt::format("time step {} does not divide the interval length {}", dt, std::abs(span)));
  return n;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Composite Simpson over equally spaced samples f[0..n]; 3/8 rule closes an
// odd interval count, trapezoid for n = 1.
Eigen::VectorXd integrate_nodes(const std::vector<Eigen::VectorXd>& f, std::size_t i0, std::size_t i1, double h) {
  const std::size_t n = i1 - i0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f[i0].size());
  if (n == 0) return acc;
  if (n == 1) return 0.5 * h * (f[i0] + f[i1]);
  std::size_t simpson_end = i1;
  if (n % 2 == 1) simpson_end = i1 - 3;
  for (std::size_t i = i0; i + 2 <= simpson_end; i += 2) acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (simpson_end != i1) {
    const std::size_t j = simpson_end;
    acc += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
  }
  return acc;
}

Eigen::VectorXd trapezoid_nodes(const std::vector<Eigen::VectorXd>& f, std::size_t i0, std::size_t i1, double h) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f[i0].size());
  for (std::size_t i = i0; i < i1; ++i) acc += 0.5 * h * (f[i] + f[i + 1]);
  return acc;
}

double chart_cau_norm(const Model& model, const Eigen::VectorXd& c, double s, double m_ref) {
  const int r = model.disp.second_order() ? 1 : 0;
  return sobolev_norm(model.grid, from_chart(model.grid, model.disp, c, 0.0), s, r, m_ref);
}

std::size_t node_index(const Trajectory& traj, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < traj.states.size(); ++i)
    if (std::abs(traj.states[i].time - t) < std::abs(traj.states[best].time - t)) best = i;
  const double h = traj.states.size() > 1 ? std::abs(traj.states[1].time - traj.states[0].time) : 1.0;
  if (std::abs(traj.states[best].time - t) > 1e-9 * std::max(1.0, h))
    throw std::invalid_argument(fmt::format("time {} is not a trajectory node", t));
  return best;
}

std::vector<Eigen::VectorXd> field_at_nodes(const Trajectory& traj) {
  std::vector<Eigen::VectorXd> v;
  v.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    v.push_back(lagrange_duhamel_chart(traj.model, traj.states[i].time, traj.chart(i)));
  return v;
}

}  // namespace

Trajectory evolve(const Model& model, const CauchyData& initial, double t1, double t2, double dt) {
  const long n = step_count(t2 - t1, dt);
  Trajectory traj;
  traj.model = model;
  CauchyData init = initial;
  if (std::abs(init.time - t1) > 1e-12 * std::max(1.0, std::abs(t1)))
    throw std::invalid_argument("evolve: initial data must be anchored at t1");
  init.time = t1;
  Eigen::VectorXd c = to_chart(theta(model.grid, model.disp, init).chart_data);
  traj.states.push_back({free_solution_from_chart(model.grid, model.disp, c), t1});
  if (n == 0) return traj;
  const double h = (t2 - t1) / static_cast<double>(n);
  auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -lagrange_duhamel_chart(model, t, x); };
  for (long i = 0; i < n; ++i) {
    const double t = t1 + i * h;
    const Eigen::VectorXd k1 = rhs(t, c);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, c + h * k3);
    c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(c)) throw NumericalError("evolve", i + 1, "non-finite chart coordinates");
    const double tn = (i + 1 == n) ? t2 : t1 + (i + 1) * h;
    traj.states.push_back({free_solution_from_chart(model.grid, model.disp, c), tn});
  }
  return traj;
}

ResidualReport duhamel_residual(const Trajectory& traj, double t1, double t2, double s, double m_ref) {
  std::size_t i1 = node_index(traj, t1);
  std::size_t i2 = node_index(traj, t2);
  ResidualReport rep;
  if (i1 == i2) return rep;
  const bool reversed = i2 < i1;
  const std::size_t lo = std::min(i1, i2), hi = std::max(i1, i2);
  const std::vector<Eigen::VectorXd> V = field_at_nodes(traj);
  const double h = traj.states[1].time - traj.states[0].time;
  Eigen::VectorXd integral = integrate_nodes(V, lo, hi, h);
  const std::size_t n = hi - lo;
  Eigen::VectorXd coarse;
  if (n % 4 == 0) {
    std::vector<Eigen::VectorXd> every_other;
    for (std::size_t i = lo; i <= hi; i += 2) every_other.push_back(V[i]);
    coarse = integrate_nodes(every_other, 0, every_other.size() - 1, 2.0 * h);
    rep.quadrature_error = chart_cau_norm(traj.model, integral - coarse, s, m_ref) / 15.0;
  } else {
    coarse = trapezoid_nodes(V, lo, hi, h);
    rep.quadrature_error = chart_cau_norm(traj.model, integral - coarse, s, m_ref);
  }
  if (reversed) integral = -integral;
  const Eigen::VectorXd r = traj.chart(i2) - traj.chart(i1) + integral;
  rep.residual = chart_cau_norm(traj.model, r, s, m_ref);
  return rep;
}

std::vector<double> running_duhamel_residual(const Trajectory& traj, double s, double m_ref) {
  std::vector<double> out(traj.states.size(), 0.0);
  if (traj.states.size() < 2) return out;
  const std::vector<Eigen::VectorXd> V = field_at_nodes(traj);
  const double h = traj.states[1].time - traj.states[0].time;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const Eigen::VectorXd r = traj.chart(i) - traj.chart(0) + integrate_nodes(V, 0, i, h);
    out[i] = chart_cau_norm(traj.model, r, s, m_ref);
  }
  return out;
}

CauchyData strang_split(const Model& model, const CauchyData& initial, double t2, double dt) {
  const long n = step_count(t2 - initial.time, dt);
  CauchyData u = initial;
  if (n == 0) return u;
  const double h = (t2 - initial.time) / static_cast<double>(n);
  const double t1 = initial.time;
  for (long i = 0; i < n; ++i) {
    const double t = t1 + i * h;
    u = propagate(model.grid, model.disp, u, t + 0.5 * h);
    if (model.disp.second_order()) {
      const Eigen::VectorXcd f = model.nonlin.apply(u.psi);
      u.chi -= h * f.real();
    } else {
      // u' = -N(u) pointwise, four RK4 substeps
      const int sub = 4;
      const double hs = h / sub;
      for (int q = 0; q < sub; ++q) {
        const Eigen::VectorXcd k1 = -model.nonlin.apply(u.psi);
        const Eigen::VectorXcd k2 = -model.nonlin.apply(Eigen::VectorXcd(u.psi + 0.5 * hs * k1));
        const Eigen::VectorXcd k3 = -model.nonlin.apply(Eigen::VectorXcd(u.psi + 0.5 * hs * k2));
        const Eigen::VectorXcd k4 = -model.nonlin.apply(Eigen::VectorXcd(u.psi + hs * k3));
        u.psi += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    u = propagate(model.grid, model.disp, u, (i + 1 == n) ? t2 : t + h);
    if (!u.psi.allFinite() || (u.chi.size() > 0 && !u.chi.allFinite()))
      throw NumericalError("strang_split", i + 1, "non-finite field values");
  }
  return u;
}

AlgebraConstant algebra_constant(const Grid& grid, double s, double m_ref, int samples, std::uint64_t seed) {
  const int M = grid.M;
  std::vector<double> w(M);
  for (int k = 0; k < M; ++k) w[k] = std::pow(m_ref * m_ref + grid.xi(k) * grid.xi(k), 0.5 * s);
  double worst = 0.0;
  for (int j = 0; j < M; ++j) {
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
      const int l = ((k - j) % M + M) % M;
      const double K = w[k] / (w[j] * w[l]);
      acc += K * K;
    }
    worst = std::max(worst, acc);
  }
  AlgebraConstant out;
  out.upper = std::sqrt(worst / grid.Lx);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_field = [&]() {
    Eigen::VectorXcd F(M);
    for (int k = 0; k < M; ++k) F[k] = std::complex<double>(gauss(rng), gauss(rng)) / w[k];
    return fft_inverse(F);
  };
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXcd f = random_field();
    const Eigen::VectorXcd g = random_field();
    const Eigen::VectorXcd fg = f.cwiseProduct(g);
    const double ratio = sobolev_norm(grid, fg, s, m_ref) / (sobolev_norm(grid, f, s, m_ref) * sobolev_norm(grid, g, s, m_ref));
    out.lower = std::max(out.lower, ratio);
  }
  return out;
}

VectorFieldBound vector_field_majorant(const Model& model, double T, double s, double m_ref) {
  VectorFieldBound b;
  b.C_phi = propagator_bound(model.grid, model.disp, T, s, m_ref);
  b.Q_s = algebra_constant(model.grid, s, m_ref, 0).upper;
  const int r = model.disp.second_order() ? 1 : 0;
  const double one_norm = std::sqrt(model.grid.Lx) * std::pow(m_ref, s - r);
  const double lift = model.disp.second_order() ? 1.0 / (m_ref * b.Q_s) : 1.0 / b.Q_s;
  b.c_N = std::max(one_norm, lift);
  if (model.nonlin.is_zero()) return b;
  std::vector<double> X(model.nonlin.max_degree() + 1, 0.0);
  for (const auto& [k, v] : model.nonlin.coeffs)
    if (k >= 0 && v != 0.0) X[k] = b.C_phi * b.c_N * std::pow(b.Q_s, k) * std::abs(v);
  b.X = MajorantSeries(std::move(X));
  return b;
}

double chart_norm(const Model& model, const Eigen::VectorXd& c, double T, double s, double m_ref, int samples) {
  return free_sup_norm(model.grid, model.disp, from_chart(model.grid, model.disp, c, 0.0), T, s, m_ref, samples);
}

}  // namespace chrono_duhamel
