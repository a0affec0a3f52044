#ifndef CHRONO_DUHAMEL_SERIES_CALCULUS_HPP
#define CHRONO_DUHAMEL_SERIES_CALCULUS_HPP

#include <complex>
#include <limits>
#include <vector>

namespace chrono_duhamel {

/// One-variable power series with nonnegative coefficients, stored dense.
///
/// Used as the majorant of a formal series of multilinear maps: coefficient p
/// bounds the tensor norm of the degree-p component. Evaluation on z >= 0 is
/// monotone in z and in every coefficient.
class MajorantSeries {
 public:
  MajorantSeries() = default;
  /// Throws std::invalid_argument if a coefficient is negative or not finite.
  explicit MajorantSeries(std::vector<double> coeffs);

  static MajorantSeries monomial(int degree, double coeff);

  const std::vector<double>& coeffs() const { return coeffs_; }
  /// Highest stored degree; 0 for the zero series.
  int truncation_degree() const;
  bool is_zero() const;
  double coeff(int p) const;

  double eval(double z) const;
  std::complex<double> eval(std::complex<double> z) const;

  /// d^k/dz^k; the zero series when k exceeds the truncation degree.
  MajorantSeries derivative(int k) const;

  MajorantSeries operator+(const MajorantSeries& other) const;
  MajorantSeries operator*(const MajorantSeries& other) const;
  MajorantSeries scaled(double factor) const;

 private:
  std::vector<double> coeffs_;
};

double eval(const MajorantSeries& series, double z);
MajorantSeries derivative(const MajorantSeries& series, int k);

/// r^{-k} sup_{p>=k} p!/(p-k)! (r/R)^p. The scan over p stops once the term
/// has decreased for `kGammaScanPatience` consecutive steps.
inline constexpr int kGammaScanPatience = 50;
double gamma_constant(double r, double R, int k);

enum class FlowStatus { completed, blew_up, hit_zero };

struct FlowOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  /// Backward flows reaching this value report hit_zero.
  double zero_floor = 1e-12;
  /// Magnitudes beyond this are treated as blow-up.
  double blowup_threshold = 1e150;
  long max_steps = 2'000'000;
};

struct FlowResult {
  double value = 0.0;
  double time_reached = 0.0;
  FlowStatus status = FlowStatus::completed;
};

struct ComplexFlowResult {
  std::complex<double> value;
  double path_fraction = 0.0;  // fraction of the path s in [0,1] integrated
  FlowStatus status = FlowStatus::completed;
};

/// e^{tX}(z0): solution of dz/dtau = sign(t) X(z) at |t|.
/// Adaptive Dormand-Prince 5(4) with error control at opts.rel_tol.
FlowResult flow(const MajorantSeries& X, double t, double z0,
                const FlowOptions& opts = {});

/// e^{tau X}(z0) for complex time, integrated along tau*s for s in [0,1].
ComplexFlowResult flow(const MajorantSeries& X, std::complex<double> tau,
                       std::complex<double> z0, const FlowOptions& opts = {});

struct GuaranteedTimeOptions {
  FlowOptions flow;
  double rel_tol = 1e-11;
  double horizon = 1e12;
};

/// Largest T with e^{-TX}(R) >= floor, found by bisection on flow().
/// Returns +infinity if the flow stays above floor up to opts.horizon.
double guaranteed_time(const MajorantSeries& X, double R, double floor,
                       const GuaranteedTimeOptions& opts = {});

/// (X(z) d/dz)^k H, exact polynomial arithmetic. The degree grows by
/// deg X - 1 per application; pass max_degree >= 0 to cap it.
MajorantSeries apply_majorant_operator(const MajorantSeries& X,
                                       const MajorantSeries& H, int k,
                                       int max_degree = -1);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace chrono_duhamel

#endif
