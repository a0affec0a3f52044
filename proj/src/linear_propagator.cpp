#include "chrono_duhamel/linear_propagator.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace chrono_duhamel {

Grid::Grid(int M_, double Lx_) : M(M_), Lx(Lx_) {
  if (M < 4 || (M & (M - 1)) != 0) throw std::invalid_argument(fmt::format("grid size M={} must be a power of two >= 4", M));
  if (!(Lx > 0.0)) throw std::invalid_argument("grid length Lx must be positive");
}

double Grid::xi(int j) const {
  const int k = j < M / 2 ? j : j - M;
  return 2.0 * std::numbers::pi / Lx * k;
}

std::string to_string(EquationKind kind) {
  return kind == EquationKind::klein_gordon ? "klein_gordon" : "schrodinger";
}

EquationKind equation_kind_from_string(const std::string& name) {
  if (name == "klein_gordon" || name == "kg") return EquationKind::klein_gordon;
  if (name == "schrodinger" || name == "nls") return EquationKind::schrodinger;
  throw std::invalid_argument("unknown equation kind '" + name + "'");
}

double DispersionRelation::epsilon(double xi) const { return std::sqrt(mass * mass + xi * xi); }

CauchyData CauchyData::zero(const Grid& grid, const DispersionRelation& disp, double time) {
  CauchyData d;
  d.psi = Eigen::VectorXcd::Zero(grid.M);
  if (disp.second_order()) d.chi = Eigen::VectorXd::Zero(grid.M);
  d.time = time;
  return d;
}

int chart_dim(const Grid& grid) { return 2 * grid.M; }

Eigen::VectorXd to_chart(const CauchyData& data) {
  const Eigen::Index M = data.psi.size();
  Eigen::VectorXd c(2 * M);
  if (data.chi.size() == M) {
    c.head(M) = data.psi.real();
    c.tail(M) = data.chi;
  } else {
    c.head(M) = data.psi.real();
    c.tail(M) = data.psi.imag();
  }
  return c;
}

CauchyData from_chart(const Grid& grid, const DispersionRelation& disp, const Eigen::VectorXd& c, double time) {
  const int M = grid.M;
  if (c.size() != 2 * M) throw std::invalid_argument("chart vector has the wrong dimension");
  CauchyData d;
  d.time = time;
  if (disp.second_order()) {
    d.psi = c.head(M).cast<std::complex<double>>();
    d.chi = c.tail(M);
  } else {
    d.psi.resize(M);
    for (int j = 0; j < M; ++j) d.psi[j] = {c[j], c[M + j]};
  }
  return d;
}

FreeSolution free_solution_from_chart(const Grid& grid, const DispersionRelation& disp, const Eigen::VectorXd& c) {
  return FreeSolution{from_chart(grid, disp, c, 0.0)};
}

namespace {

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

void check_data(const Grid& grid, const DispersionRelation& disp, const CauchyData& data) {
  if (data.psi.size() != grid.M) throw std::invalid_argument("Cauchy data psi length differs from grid size");
  if (disp.second_order() && data.chi.size() != grid.M)
    throw std::invalid_argument("Cauchy data chi length differs from grid size");
}

}  // namespace

Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& f) {
  Eigen::VectorXcd out(f.size());
  fft_engine().fwd(out, f);
  return out;
}

Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& F) {
  Eigen::VectorXcd out(F.size());
  fft_engine().inv(out, F);
  return out;
}

Eigen::Matrix2d kg_mode_matrix(double eps, double dt) {
  const double th = eps * dt;
  const double c = std::cos(th);
  const double s = std::sin(th);
  const double sinc = eps == 0.0 ? dt : s / eps;
  Eigen::Matrix2d A;
  A << c, sinc, -eps * s, c;
  return A;
}

CauchyData propagate(const Grid& grid, const DispersionRelation& disp, const CauchyData& data, double target_time) {
  check_data(grid, disp, data);
  const double dt = target_time - data.time;
  CauchyData out;
  out.time = target_time;
  if (dt == 0.0) {
    out.psi = data.psi;
    out.chi = data.chi;
    return out;
  }
  const int M = grid.M;
  Eigen::VectorXcd P = fft_forward(data.psi);
  if (disp.second_order()) {
    Eigen::VectorXcd X = fft_forward(data.chi.cast<std::complex<double>>());
    for (int k = 0; k < M; ++k) {
      const Eigen::Matrix2d A = kg_mode_matrix(disp.epsilon(grid.xi(k)), dt);
      const std::complex<double> p = P[k], x = X[k];
      P[k] = A(0, 0) * p + A(0, 1) * x;
      X[k] = A(1, 0) * p + A(1, 1) * x;
    }
    out.psi = fft_inverse(P).real().cast<std::complex<double>>();
    out.chi = fft_inverse(X).real();
  } else {
    for (int k = 0; k < M; ++k) P[k] *= std::polar(1.0, disp.omega(grid.xi(k)) * dt);
    out.psi = fft_inverse(P);
  }
  return out;
}

Eigen::MatrixXd propagator_matrix(const Grid& grid, const DispersionRelation& disp, double dt) {
  const int d = chart_dim(grid);
  Eigen::MatrixXd A(d, d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    e[j] = 1.0;
    A.col(j) = to_chart(propagate(grid, disp, from_chart(grid, disp, e, 0.0), dt));
    e[j] = 0.0;
  }
  return A;
}

FreeSolution make_free_solution(const Grid& grid, const DispersionRelation& disp, const CauchyData& data) {
  return FreeSolution{propagate(grid, disp, data, 0.0)};
}

CauchyData sample_at(const Grid& grid, const DispersionRelation& disp, const FreeSolution& u, double t) {
  return propagate(grid, disp, u.chart_data, t);
}

FreeSolution green_apply(const Grid& grid, const DispersionRelation& disp, double t, const Eigen::VectorXcd& f) {
  if (f.size() != grid.M) throw std::invalid_argument("green_apply: source length differs from grid size");
  CauchyData d;
  d.time = t;
  if (disp.second_order()) {
    d.psi = Eigen::VectorXcd::Zero(grid.M);
    d.chi = f.real();
  } else {
    d.psi = f;
  }
  return make_free_solution(grid, disp, d);
}

double sobolev_norm(const Grid& grid, const Eigen::VectorXcd& psi, double s, double m_ref) {
  if (!(m_ref > 0.0)) throw std::invalid_argument("sobolev_norm: m_ref must be positive");
  const Eigen::VectorXcd F = fft_forward(psi);
  double acc = 0.0;
  for (int k = 0; k < grid.M; ++k) {
    const double xi = grid.xi(k);
    const double w = s == 0.0 ? 1.0 : std::pow(m_ref * m_ref + xi * xi, s);
    acc += w * std::norm(F[k]);
  }
  return std::sqrt(acc * grid.Lx) / grid.M;
}

double sobolev_norm(const Grid& grid, const CauchyData& data, double s, int r_order, double m_ref) {
  double n = sobolev_norm(grid, data.psi, s, m_ref);
  if (data.chi.size() > 0) n += sobolev_norm(grid, data.chi.cast<std::complex<double>>(), s - r_order, m_ref);
  return n;
}

double energy(const Grid& grid, const DispersionRelation& disp, const CauchyData& data) {
  if (!disp.second_order()) throw std::invalid_argument("energy is defined for klein_gordon only");
  check_data(grid, disp, data);
  const Eigen::VectorXcd P = fft_forward(data.psi);
  const Eigen::VectorXcd X = fft_forward(data.chi.cast<std::complex<double>>());
  double acc = 0.0;
  for (int k = 0; k < grid.M; ++k) {
    const double eps = disp.epsilon(grid.xi(k));
    acc += std::norm(X[k]) + eps * eps * std::norm(P[k]);
  }
  return 0.5 * acc * grid.Lx / (static_cast<double>(grid.M) * grid.M);
}

double l2_norm(const Grid& grid, const Eigen::VectorXcd& psi) {
  return std::sqrt(grid.dx() * psi.squaredNorm());
}

double propagator_bound(const Grid& grid, const DispersionRelation& disp, double T, double /*s*/, double m_ref) {
  if (!disp.second_order()) return 1.0;
  const double T_abs = std::abs(T);
  double worst = 1.0;
  for (int k = 0; k < grid.M; ++k) {
    const double xi = grid.xi(k);
    const double br = std::sqrt(m_ref * m_ref + xi * xi);
    const double eps = disp.epsilon(xi);
    Eigen::Matrix2d W;
    if (eps == 0.0) {
      W << 1.0, br * T_abs, 0.0, 1.0;
    } else {
      // singular values grow with |sin| up to theta = pi/2
      const double th = std::min(eps * T_abs, std::numbers::pi / 2);
      const double kappa = br / eps;
      W << std::cos(th), kappa * std::sin(th), -std::sin(th) / kappa, std::cos(th);
    }
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(W);
    worst = std::max(worst, svd.singularValues()[0]);
  }
  return std::sqrt(2.0) * worst;
}

double free_sup_norm(const Grid& grid, const DispersionRelation& disp, const CauchyData& data, double T, double s,
                     double m_ref, int samples) {
  const int r = disp.second_order() ? 1 : 0;
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double tau = data.time + T * i / samples;
    best = std::max(best, sobolev_norm(grid, propagate(grid, disp, data, tau), s, r, m_ref));
  }
  return best;
}

void write_field_snapshot(std::ostream& out, const Grid& grid, const DispersionRelation& disp,
                          const CauchyData& data) {
  nlohmann::ordered_json header;
  header["M"] = grid.M;
  header["Lx"] = grid.Lx;
  header["kind"] = to_string(disp.kind);
  header["m"] = disp.mass;
  header["t"] = data.time;
  out << "# " << header.dump() << '\n';
  if (disp.second_order()) {
    out << "x,psi,chi\n";
    for (int j = 0; j < grid.M; ++j)
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", grid.x(j), data.psi[j].real(), data.chi[j]);
  } else {
    out << "x,psi_re,psi_im\n";
    for (int j = 0; j < grid.M; ++j)
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", grid.x(j), data.psi[j].real(), data.psi[j].imag());
  }
}

}  // namespace chrono_duhamel
