#ifndef CHRONO_DUHAMEL_LINEAR_PROPAGATOR_HPP
#define CHRONO_DUHAMEL_LINEAR_PROPAGATOR_HPP

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <string>

namespace chrono_duhamel {

/// Periodic grid x_j = j * Lx / M, j = 0..M-1.
/// Mode j has frequency xi_j = 2 pi / Lx * (j < M/2 ? j : j - M).
struct Grid {
  int M = 8;
  double Lx = 2.0 * 3.14159265358979323846;

  Grid() = default;
  /// Throws std::invalid_argument unless M is a power of two >= 4 and Lx > 0.
  Grid(int M, double Lx);

  double dx() const { return Lx / M; }
  double x(int j) const { return j * dx(); }
  double xi(int j) const;
};

enum class EquationKind { klein_gordon, schrodinger };

std::string to_string(EquationKind kind);
EquationKind equation_kind_from_string(const std::string& name);

/// klein_gordon: d0^2 u - dx^2 u + m^2 u + N(u) = 0, eps(xi) = sqrt(m^2 + xi^2).
/// schrodinger:  d0 u - i dx^2 u + N(u) = 0, phase omega(xi) = -xi^2.
struct DispersionRelation {
  EquationKind kind = EquationKind::klein_gordon;
  double mass = 1.0;

  bool second_order() const { return kind == EquationKind::klein_gordon; }
  double epsilon(double xi) const;
  double omega(double xi) const { return -xi * xi; }
};

/// Traces at a time slice. psi is complex for schrodinger; for klein_gordon
/// it holds a real field (imaginary part zero) and chi the time derivative.
struct CauchyData {
  Eigen::VectorXcd psi;
  Eigen::VectorXd chi;
  double time = 0.0;

  static CauchyData zero(const Grid& grid, const DispersionRelation& disp, double time = 0.0);
};

/// Free solution, stored as its Cauchy data at reference time 0.
struct FreeSolution {
  CauchyData chart_data;
};

// Real chart coordinates of dimension 2M:
//   klein_gordon (psi, chi), schrodinger (Re psi, Im psi).
int chart_dim(const Grid& grid);
Eigen::VectorXd to_chart(const CauchyData& data);
CauchyData from_chart(const Grid& grid, const DispersionRelation& disp, const Eigen::VectorXd& c, double time = 0.0);
inline Eigen::VectorXd chart_coords(const FreeSolution& u) { return to_chart(u.chart_data); }
FreeSolution free_solution_from_chart(const Grid& grid, const DispersionRelation& disp, const Eigen::VectorXd& c);

/// Forward FFT, unnormalized: F_k = sum_j f_j exp(-2 pi i jk/M).
Eigen::VectorXcd fft_forward(const Eigen::VectorXcd& f);
/// Inverse with the 1/M factor.
Eigen::VectorXcd fft_inverse(const Eigen::VectorXcd& F);

/// Per-mode klein_gordon rotation over elapsed time dt:
/// [[cos, sin/eps], [-eps sin, cos]] with the sin/eps -> dt limit at eps = 0.
Eigen::Matrix2d kg_mode_matrix(double eps, double dt);

CauchyData propagate(const Grid& grid, const DispersionRelation& disp, const CauchyData& data, double target_time);

/// Matrix of propagation by dt acting on chart coordinates.
Eigen::MatrixXd propagator_matrix(const Grid& grid, const DispersionRelation& disp, double dt);

FreeSolution make_free_solution(const Grid& grid, const DispersionRelation& disp, const CauchyData& data);
CauchyData sample_at(const Grid& grid, const DispersionRelation& disp, const FreeSolution& u, double t);

/// Free solution with Cauchy data (0, f) at time t (second order) or f at
/// time t (first order). For klein_gordon only the real part of f is used.
FreeSolution green_apply(const Grid& grid, const DispersionRelation& disp, double t, const Eigen::VectorXcd& f);

/// ||psi||_{H^s} with <xi> = sqrt(m_ref^2 + xi^2) and Parseval weight Lx/M^2:
/// ||psi||^2 = (Lx / M^2) sum_k <xi_k>^{2s} |F_k|^2. At s = 0 this equals
/// the grid L2 norm sqrt(dx sum |psi_j|^2).
double sobolev_norm(const Grid& grid, const Eigen::VectorXcd& psi, double s, double m_ref);
/// ||psi||_{H^s} + ||chi||_{H^{s-r}}; chi omitted for first-order kinds.
double sobolev_norm(const Grid& grid, const CauchyData& data, double s, int r_order, double m_ref);

/// 1/2 (Lx/M^2) sum_k (|chi_k|^2 + eps_k^2 |psi_k|^2). klein_gordon only.
double energy(const Grid& grid, const DispersionRelation& disp, const CauchyData& data);

/// Grid L2 norm sqrt(dx sum |psi_j|^2).
double l2_norm(const Grid& grid, const Eigen::VectorXcd& psi);

/// Upper bound on sup_{|tau| <= T} ||A_tau c||_{Cau^s} / ||c||_{Cau^s}, from
/// the per-mode 2x2 matrices in the weighted basis (psi <xi>^s, chi <xi>^{s-1}).
/// The sqrt(2) accounts for the sum-of-norms Cau^s definition.
double propagator_bound(const Grid& grid, const DispersionRelation& disp, double T, double s, double m_ref);

/// max over a tau grid of ||A_tau c||_{Cau^s}, tau in [t0, t0 + T].
double free_sup_norm(const Grid& grid, const DispersionRelation& disp, const CauchyData& data, double T, double s,
                     double m_ref, int samples = 64);

/// CSV field snapshot: a JSON header line, then "x,psi,chi" (klein_gordon)
/// or "x,psi_re,psi_im" (schrodinger).
void write_field_snapshot(std::ostream& out, const Grid& grid, const DispersionRelation& disp,
                          const CauchyData& data);

}  // namespace chrono_duhamel

#endif
