#ifndef CHRONO_DUHAMEL_CHRONO_EXP_HPP
#define CHRONO_DUHAMEL_CHRONO_EXP_HPP

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "chrono_duhamel/duhamel_dynamics.hpp"
#include "chrono_duhamel/multilinear.hpp"
#include "chrono_duhamel/series_calculus.hpp"

namespace chrono_duhamel {

inline constexpr int kDefaultChronoCap = 5;

/// One rank-one piece of V_t in chart coordinates:
///   g * part(N_k (l . c)^k),
/// where l is the complex linear form giving the field value at one grid
/// node at time t, g the chart image of the unit source at that node, and
/// part is Re or Im. klein_gordon uses real l and Re only; schrodinger has
/// a Re and an Im channel per node.
struct VectorFieldChannel {
  Eigen::VectorXd g;
  Eigen::VectorXcd l;
  bool imaginary_part = false;
};

std::vector<VectorFieldChannel> vector_field_channels(const Model& model, double t);

/// Scalar symmetric tensor of c -> part(N_k (l . c)^k).
SymTensor channel_tensor(const VectorFieldChannel& ch, int k, double N_k);

/// V_t^(k) as a vector-valued symmetric tensor (codomain = chart dimension).
SymTensor vector_field_tensor(const Model& model, double t, int k);

struct VdotResult {
  SymFunctional value;
  /// Output degrees above the cap that would have received a nonzero term.
  int truncation_events = 0;
  /// sum over dropped (p, k) of p ||f^(p)||_upper ||V_t^(k)||_upper.
  double truncated_bound = 0.0;
};

/// (V_t . f)^(m) = sum_{p-1+k=m} p f^(p)(V_t^(k)(c), c, ..., c), degrees
/// above f.max_degree() dropped.
VdotResult vdot(const Model& model, double t, const SymFunctional& f);

struct ChronoResult {
  SymFunctional value;
  long truncation_events = 0;
  double truncated_bound = 0.0;
};

/// U_{t1}^{t2} f, integrating dF/dt = V_t . F from F(t1) = f with RK4.
ChronoResult chrono_exp_evolve(const Model& model, const SymFunctional& f, double t1, double t2, int steps);

/// c -> Re psi(tau, x_node) for the free solution with chart coordinates c.
SymFunctional point_eval_functional(const Model& model, double tau, int node, int max_degree = kDefaultChronoCap);

struct InvariancePoint {
  double t = 0.0;
  double value = 0.0;
  double running_drift = 0.0;
  long truncation_events = 0;
};

struct InvarianceScan {
  std::vector<InvariancePoint> points;
  double drift = 0.0;
};

/// (U_{t1}^t f)(Theta_t u) at every trajectory node in [t1, t2]. U is
/// advanced with `substeps` RK4 steps per trajectory interval.
InvarianceScan invariance_scan(const SymFunctional& f, const Trajectory& traj, double t1, double t2,
                               int substeps = 1);

/// X_k = max over sampled t in [t1, t2] of ||V_t^(k)||_upper, for the
/// coordinate sup norm on the chart. `samples` + 1 equally spaced times.
MajorantSeries chart_majorant(const Model& model, double t1, double t2, int samples = 32);

struct Certificate {
  double R = 0.0;
  double T = 0.0;
  double r_prime = 0.0;
  FlowStatus status = FlowStatus::completed;
  double f_at_R = 0.0;
  /// r' > 0, i.e. the backward flow completed.
  bool pass = false;
  /// When the window is exceeded: the largest admissible T for the given floor.
  std::optional<double> t_bar;
  std::optional<double> transported_at_r_prime;
  std::optional<bool> bound_holds;
};

/// r' = e^{-T X}(R) and [[f]](R). zero_floor is the hit-zero threshold of the flow.
Certificate certify_window(const MajorantSeries& f_majorant, const MajorantSeries& X, double R, double T,
                           double zero_floor = 1e-12);

/// Records [[U f]](r') and whether it stays <= [[f]](R) (relative slack 1e-12).
void check_transported(Certificate& cert, const MajorantSeries& transported_majorant);

}  // namespace chrono_duhamel

#endif
