#ifndef CHRONO_DUHAMEL_MULTILINEAR_HPP
#define CHRONO_DUHAMEL_MULTILINEAR_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chrono_duhamel/index_space.hpp"
#include "chrono_duhamel/series_calculus.hpp"

namespace chrono_duhamel {

inline constexpr int kDefaultDegreeCap = 7;

/// Symmetric p-linear map R^dim -> R^codomain_dim.
///
/// Storage holds the tensor *entries* T_a for canonical (nondecreasing)
/// multi-indices a, component-major: coeffs()[i * size() + rank]. The entry
/// of any permutation of a equals T_a. On the diagonal,
///   f(phi) = sum_a multiplicity(a) T_a phi_a1 ... phi_ap,
/// so the monomial coefficient is multiplicity times entry.
///
/// Worked case dim=2, p=2, f(phi) = phi^1 phi^2: the only nonzero entry is
/// T_(1,2) = 1/2 (multiplicity 2), and f(e1, e2) = 1/2.
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(int degree, int dim, int codomain_dim = 1);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int codomain_dim() const { return codomain_dim_; }
  /// Number of canonical multi-indices per codomain component.
  std::size_t size() const { return space_->size(); }
  const IndexSpace& space() const { return *space_; }

  std::vector<double>& coeffs() { return coeffs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double& entry(int component, std::size_t rank) { return coeffs_[component * size() + rank]; }
  double entry(int component, std::size_t rank) const { return coeffs_[component * size() + rank]; }

  /// Entry at an arbitrary (unsorted) multi-index.
  double get(int component, std::span<const int> index) const;
  void set(int component, std::span<const int> index, double value);

  /// Monomial coefficients: multiplicity(a) * T_a.
  double monomial(int component, std::size_t rank) const {
    return space_->multiplicity(rank) * entry(component, rank);
  }

  bool is_zero() const;
  SymTensor& operator+=(const SymTensor& other);
  SymTensor& operator*=(double factor);

  /// T'_b = sum_a v_a T_{b+a}; degree drops by one.
  SymTensor contract(const Eigen::VectorXd& v) const;
  /// Scalar tensor sum_i y_i T^i.
  SymTensor pair_codomain(const Eigen::VectorXd& y) const;

  /// f(args[0], ..., args[p-1]).
  Eigen::VectorXd eval_homogeneous(const std::vector<Eigen::VectorXd>& args) const;
  /// f(phi, ..., phi).
  Eigen::VectorXd eval_diagonal(const Eigen::VectorXd& phi) const;

 private:
  int degree_ = 0;
  int dim_ = 1;
  int codomain_dim_ = 1;
  std::shared_ptr<const IndexSpace> space_;
  std::vector<double> coeffs_;
};

/// phi_a1 ... phi_ap for every canonical multi-index of the given degree.
std::vector<double> monomial_values(const IndexSpace& space, const Eigen::VectorXd& phi);

/// Truncated formal series sum_{p <= max_degree} f^(p).
class SymFunctional {
 public:
  SymFunctional() = default;
  SymFunctional(int dim, int codomain_dim = 1, int max_degree = kDefaultDegreeCap);

  int dim() const { return dim_; }
  int codomain_dim() const { return codomain_dim_; }
  int max_degree() const { return max_degree_; }

  bool has_term(int p) const;
  const SymTensor& term(int p) const;
  /// Creates a zero term if absent. Throws std::out_of_range beyond max_degree.
  SymTensor& term_mut(int p);
  void set_term(SymTensor t);
  void drop_term(int p);
  /// Degrees with a stored term, ascending.
  std::vector<int> degrees() const;

  SymFunctional& operator+=(const SymFunctional& other);
  SymFunctional& operator*=(double factor);
  /// this += factor * other
  void add_scaled(const SymFunctional& other, double factor);

  static SymFunctional constant(int dim, double value, int max_degree = kDefaultDegreeCap);
  static SymFunctional linear(const Eigen::VectorXd& weights, int max_degree = kDefaultDegreeCap);

 private:
  int dim_ = 1;
  int codomain_dim_ = 1;
  int max_degree_ = kDefaultDegreeCap;
  std::vector<std::optional<SymTensor>> terms_;
};

Eigen::VectorXd eval_homogeneous(const SymTensor& f, const std::vector<Eigen::VectorXd>& args);
Eigen::VectorXd eval_series(const SymFunctional& f, const Eigen::VectorXd& phi);
/// sum_p p f^(p)(psi, phi, ..., phi)
Eigen::VectorXd directional_derivative(const SymFunctional& f, const Eigen::VectorXd& phi,
                                       const Eigen::VectorXd& psi);

/// 1/(2^p p!) sum_{eps in {+-1}^p} (prod eps) f(sum eps_j args_j), p = args.size().
Eigen::VectorXd polarize(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f_diag,
                         const std::vector<Eigen::VectorXd>& args);

enum class NormKind { l1, l2, linf };

double vector_norm(const Eigen::VectorXd& v, NormKind kind);

struct TensorNormOptions {
  NormKind arg_norm = NormKind::linf;
  NormKind out_norm = NormKind::linf;
  int directions = 4096;
  int ascent_iterations = 8;
  std::uint64_t seed = 0x5eed'0f'7e45'02ULL;
};

struct TensorNormBounds {
  /// sum_i sum_a multiplicity(a) |T^i_a|; bounds the norm for any l^p argument
  /// and output norms.
  double upper = 0.0;
  /// max |f(u_1..u_p)| over sampled unit arguments after alternating ascent,
  /// including the diagonal samples.
  double lower = 0.0;
  /// max |f(u,..,u)| over sampled unit u, including the polarization points
  /// of the best arguments found for `lower`.
  double diagonal_lower = 0.0;
};

double upper_norm(const SymTensor& f);
TensorNormBounds tensor_norm(const SymTensor& f, const TensorNormOptions& opts = {});

/// Series of per-degree upper norms.
MajorantSeries majorant_of(const SymFunctional& f);

}  // namespace chrono_duhamel

#endif
