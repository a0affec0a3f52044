#ifndef CHRONO_DUHAMEL_DUHAMEL_DYNAMICS_HPP
#define CHRONO_DUHAMEL_DUHAMEL_DYNAMICS_HPP

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chrono_duhamel/linear_propagator.hpp"
#include "chrono_duhamel/series_calculus.hpp"

namespace chrono_duhamel {

/// N(u) = sum_k N_k u^k, applied pointwise. For schrodinger u is complex and
/// N is the holomorphic power series (no conjugates).
struct NonlinearitySpec {
  std::map<int, double> coeffs;

  static NonlinearitySpec monomial(int k, double lambda);

  bool is_zero() const;
  int max_degree() const;
  /// Coefficients |N_k|.
  MajorantSeries majorant() const;
  std::complex<double> apply(std::complex<double> u) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
};

/// Raised when a field turns non-finite; names the stage and step.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& stage, long step, const std::string& what);
  const std::string& stage() const { return stage_; }
  long step() const { return step_; }

 private:
  std::string stage_;
  long step_;
};

/// The pieces of the problem every operation needs.
struct Model {
  Grid grid;
  DispersionRelation disp;
  NonlinearitySpec nonlin;
};

/// Free solution sharing the given Cauchy data at its anchor time.
FreeSolution theta(const Grid& grid, const DispersionRelation& disp, const CauchyData& pde_cauchy_data);

/// V_t in chart coordinates: A_{-t} (0, N(psi_t)) for klein_gordon,
/// A_{-t} N(psi_t) for schrodinger, with psi_t the psi-trace of A_t c.
Eigen::VectorXd lagrange_duhamel_chart(const Model& model, double t, const Eigen::VectorXd& c);
FreeSolution lagrange_duhamel_V(const Model& model, double t, const FreeSolution& phi);

struct EvolutionState {
  FreeSolution current;
  double time = 0.0;
};

struct Trajectory {
  Model model;
  std::vector<EvolutionState> states;

  Eigen::VectorXd chart(std::size_t i) const { return chart_coords(states[i].current); }
  /// Cauchy data of the nonlinear solution at node i.
  CauchyData trace(std::size_t i) const;
};

/// Classical RK4 on the chart coordinates of Theta_t u, dc/dt = -V_t(c).
/// |t2 - t1| must be a multiple of dt up to rounding; t2 < t1 integrates backward.
Trajectory evolve(const Model& model, const CauchyData& initial, double t1, double t2, double dt);

struct ResidualReport {
  double residual = 0.0;
  /// |Simpson(h) - Simpson(2h)| / 15 when the node count allows it,
  /// otherwise the Simpson-trapezoid gap.
  double quadrature_error = 0.0;
};

/// ||Theta_{t2}u - Theta_{t1}u + int_{t1}^{t2} V(Theta u)||_{Cau^s}, the
/// integral by composite Simpson over trajectory nodes in [t1, t2].
ResidualReport duhamel_residual(const Trajectory& traj, double t1, double t2, double s = 1.0, double m_ref = 1.0);

/// Running residual at every node from the first one.
std::vector<double> running_duhamel_residual(const Trajectory& traj, double s = 1.0, double m_ref = 1.0);

/// Strang splitting: half-step exact linear flow, full-step pointwise
/// nonlinear flow (exact kick for klein_gordon, RK4 substeps for schrodinger).
CauchyData strang_split(const Model& model, const CauchyData& initial, double t2, double dt);

struct AlgebraConstant {
  /// Certified: ||fg||_{H^s} <= upper ||f||_{H^s} ||g||_{H^s} on the grid.
  double upper = 0.0;
  /// Largest ratio seen on random pairs.
  double lower = 0.0;
};

AlgebraConstant algebra_constant(const Grid& grid, double s, double m_ref, int samples = 256,
                                 std::uint64_t seed = 0xa16eb7aULL);

struct VectorFieldBound {
  MajorantSeries X;
  double C_phi = 0.0;
  double Q_s = 0.0;
  /// max(||1||_{H^{s-r}}, 1 / (m_ref Q_s)): the lift of N_k psi^k into the
  /// chi slot loses one derivative, bounded by the smallest weight.
  double c_N = 0.0;
};

/// X_k = C_phi c_N Q_s^k |N_k|. Bounds ||V_t^(k)||_tensor for the norm
/// sup_{tau in [0,T]} ||A_tau c||_{Cau^s} on chart coordinates.
VectorFieldBound vector_field_majorant(const Model& model, double T, double s, double m_ref);

/// sup_{tau in [0,T]} ||A_tau c||_{Cau^s}, sampled on `samples`+1 points.
double chart_norm(const Model& model, const Eigen::VectorXd& c, double T, double s, double m_ref, int samples = 64);

}  // namespace chrono_duhamel

#endif
