#include "chrono_duhamel/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace chrono_duhamel {

SymTensor::SymTensor(int degree, int dim, int codomain_dim)
    : degree_(degree), dim_(dim), codomain_dim_(codomain_dim), space_(IndexSpace::get(dim, degree)) {
  if (codomain_dim < 1) throw std::invalid_argument("SymTensor: codomain_dim must be >= 1");
  coeffs_.assign(space_->size() * codomain_dim_, 0.0);
}

double SymTensor::get(int component, std::span<const int> index) const {
  std::vector<int> s(index.begin(), index.end());
  std::sort(s.begin(), s.end());
  return entry(component, space_->rank(s));
}

void SymTensor::set(int component, std::span<const int> index, double value) {
  if (static_cast<int>(index.size()) != degree_) throw std::invalid_argument("SymTensor::set: wrong index length");
  std::vector<int> s(index.begin(), index.end());
  std::sort(s.begin(), s.end());
  for (int a : s)
    if (a < 0 || a >= dim_) throw std::out_of_range("SymTensor::set: index out of range");
  entry(component, space_->rank(s)) = value;
}

bool SymTensor::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

SymTensor& SymTensor::operator+=(const SymTensor& other) {
  if (other.degree_ != degree_ || other.dim_ != dim_ || other.codomain_dim_ != codomain_dim_)
    throw std::invalid_argument("SymTensor: shape mismatch in +=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SymTensor& SymTensor::operator*=(double factor) {
  for (double& c : coeffs_) c *= factor;
  return *this;
}

SymTensor SymTensor::contract(const Eigen::VectorXd& v) const {
  if (degree_ == 0) throw std::invalid_argument("SymTensor::contract: degree 0");
  if (v.size() != dim_) throw std::invalid_argument("SymTensor::contract: dimension mismatch");
  SymTensor out(degree_ - 1, dim_, codomain_dim_);
  const std::size_t so = out.size();
  const std::size_t si = size();
  for (int i = 0; i < codomain_dim_; ++i) {
    const double* src = &coeffs_[i * si];
    double* dst = &out.coeffs_[i * so];
    for (std::size_t b = 0; b < so; ++b) {
      double acc = 0.0;
      for (int a = 0; a < dim_; ++a) acc += v[a] * src[space_->insert(b, a)];
      dst[b] = acc;
    }
  }
  return out;
}

SymTensor SymTensor::pair_codomain(const Eigen::VectorXd& y) const {
  if (y.size() != codomain_dim_) throw std::invalid_argument("SymTensor::pair_codomain: dimension mismatch");
  SymTensor out(degree_, dim_, 1);
  const std::size_t s = size();
  for (int i = 0; i < codomain_dim_; ++i)
    for (std::size_t r = 0; r < s; ++r) out.coeffs_[r] += y[i] * coeffs_[i * s + r];
  return out;
}

Eigen::VectorXd SymTensor::eval_homogeneous(const std::vector<Eigen::VectorXd>& args) const {
  if (static_cast<int>(args.size()) != degree_)
    throw std::invalid_argument("eval_homogeneous: number of arguments must equal the degree");
  if (degree_ == 0) return Eigen::Map<const Eigen::VectorXd>(coeffs_.data(), codomain_dim_);
  SymTensor cur = contract(args[0]);
  for (int j = 1; j < degree_; ++j) cur = cur.contract(args[j]);
  return Eigen::Map<const Eigen::VectorXd>(cur.coeffs_.data(), codomain_dim_);
}

std::vector<double> monomial_values(const IndexSpace& space, const Eigen::VectorXd& phi) {
  const int p = space.degree();
  std::vector<double> out(space.size());
  for (std::size_t r = 0; r < space.size(); ++r) {
    const std::uint16_t* idx = space.index(r);
    double v = 1.0;
    for (int j = 0; j < p; ++j) v *= phi[idx[j]];
    out[r] = v;
  }
  return out;
}

Eigen::VectorXd SymTensor::eval_diagonal(const Eigen::VectorXd& phi) const {
  if (phi.size() != dim_) throw std::invalid_argument("eval_diagonal: dimension mismatch");
  const std::vector<double> mono = monomial_values(*space_, phi);
  const std::vector<double>& mult = space_->multiplicities();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(codomain_dim_);
  const std::size_t s = size();
  for (int i = 0; i < codomain_dim_; ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < s; ++r) acc += mult[r] * coeffs_[i * s + r] * mono[r];
    out[i] = acc;
  }
  return out;
}

SymFunctional::SymFunctional(int dim, int codomain_dim, int max_degree)
    : dim_(dim), codomain_dim_(codomain_dim), max_degree_(max_degree), terms_(max_degree + 1) {
  if (max_degree < 0) throw std::invalid_argument("SymFunctional: negative degree cap");
}

bool SymFunctional::has_term(int p) const {
  return p >= 0 && p <= max_degree_ && terms_[p].has_value();
}

const SymTensor& SymFunctional::term(int p) const {
  if (!has_term(p)) throw std::out_of_range("SymFunctional::term: no term of that degree");
  return *terms_[p];
}

SymTensor& SymFunctional::term_mut(int p) {
  if (p < 0 || p > max_degree_) throw std::out_of_range("SymFunctional::term_mut: degree beyond cap");
  if (!terms_[p]) terms_[p].emplace(p, dim_, codomain_dim_);
  return *terms_[p];
}

void SymFunctional::set_term(SymTensor t) {
  if (t.dim() != dim_ || t.codomain_dim() != codomain_dim_)
    throw std::invalid_argument("SymFunctional::set_term: shape mismatch");
  const int p = t.degree();
  if (p > max_degree_) throw std::out_of_range("SymFunctional::set_term: degree beyond cap");
  terms_[p] = std::move(t);
}

void SymFunctional::drop_term(int p) {
  if (p >= 0 && p <= max_degree_) terms_[p].reset();
}

std::vector<int> SymFunctional::degrees() const {
  std::vector<int> out;
  for (int p = 0; p <= max_degree_; ++p)
    if (terms_[p]) out.push_back(p);
  return out;
}

SymFunctional& SymFunctional::operator+=(const SymFunctional& other) {
  add_scaled(other, 1.0);
  return *this;
}

SymFunctional& SymFunctional::operator*=(double factor) {
  for (auto& t : terms_)
    if (t) *t *= factor;
  return *this;
}

void SymFunctional::add_scaled(const SymFunctional& other, double factor) {
  if (other.dim_ != dim_ || other.codomain_dim_ != codomain_dim_)
    throw std::invalid_argument("SymFunctional: shape mismatch");
  for (int p : other.degrees()) {
    SymTensor& dst = term_mut(p);
    const auto& src = other.term(p).coeffs();
    auto& d = dst.coeffs();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * src[i];
  }
}

SymFunctional SymFunctional::constant(int dim, double value, int max_degree) {
  SymFunctional f(dim, 1, max_degree);
  f.term_mut(0).coeffs()[0] = value;
  return f;
}

SymFunctional SymFunctional::linear(const Eigen::VectorXd& weights, int max_degree) {
  SymFunctional f(static_cast<int>(weights.size()), 1, max_degree);
  auto& c = f.term_mut(1).coeffs();
  for (int a = 0; a < weights.size(); ++a) c[a] = weights[a];
  return f;
}

Eigen::VectorXd eval_homogeneous(const SymTensor& f, const std::vector<Eigen::VectorXd>& args) {
  return f.eval_homogeneous(args);
}

Eigen::VectorXd eval_series(const SymFunctional& f, const Eigen::VectorXd& phi) {
  if (phi.size() != f.dim()) throw std::invalid_argument("eval_series: dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.codomain_dim());
  for (int p : f.degrees()) out += f.term(p).eval_diagonal(phi);
  return out;
}

Eigen::VectorXd directional_derivative(const SymFunctional& f, const Eigen::VectorXd& phi,
                                       const Eigen::VectorXd& psi) {
  if (phi.size() != f.dim() || psi.size() != f.dim())
    throw std::invalid_argument("directional_derivative: dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.codomain_dim());
  for (int p : f.degrees()) {
    if (p == 0) continue;
    out += static_cast<double>(p) * f.term(p).contract(psi).eval_diagonal(phi);
  }
  return out;
}

Eigen::VectorXd polarize(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f_diag,
                         const std::vector<Eigen::VectorXd>& args) {
  const int p = static_cast<int>(args.size());
  if (p == 0) throw std::invalid_argument("polarize: need at least one argument");
  Eigen::VectorXd acc;
  double norm = std::ldexp(1.0, p);
  for (int i = 2; i <= p; ++i) norm *= i;
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(args[0].size());
    int sign = 1;
    for (int j = 0; j < p; ++j) {
      if (mask & (1u << j)) {
        x -= args[j];
        sign = -sign;
      } else {
        x += args[j];
      }
    }
    Eigen::VectorXd v = f_diag(x);
    if (mask == 0)
      acc = v;
    else
      acc += sign * v;
  }
  return acc / norm;
}

double vector_norm(const Eigen::VectorXd& v, NormKind kind) {
  switch (kind) {
    case NormKind::l1: return v.lpNorm<1>();
    case NormKind::l2: return v.norm();
    case NormKind::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double upper_norm(const SymTensor& f) {
  const std::size_t s = f.size();
  const auto& mult = f.space().multiplicities();
  double acc = 0.0;
  for (int i = 0; i < f.codomain_dim(); ++i)
    for (std::size_t r = 0; r < s; ++r) acc += mult[r] * std::abs(f.entry(i, r));
  return acc;
}

namespace {

// argmax of <w, x> over the unit ball of `kind`
Eigen::VectorXd dual_maximizer(const Eigen::VectorXd& w, NormKind kind) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(w.size());
  switch (kind) {
    case NormKind::linf:
      for (int i = 0; i < w.size(); ++i) x[i] = w[i] >= 0 ? 1.0 : -1.0;
      break;
    case NormKind::l2: {
      const double n = w.norm();
      if (n > 0) x = w / n;
      else x[0] = 1.0;
      break;
    }
    case NormKind::l1: {
      Eigen::Index k = 0;
      w.cwiseAbs().maxCoeff(&k);
      x[k] = w[k] >= 0 ? 1.0 : -1.0;
      break;
    }
  }
  return x;
}

// dual norm of the output norm: maximizer of <y, out> with ||y||_* <= 1
Eigen::VectorXd output_dual(const Eigen::VectorXd& out, NormKind kind) {
  switch (kind) {
    case NormKind::l1: return dual_maximizer(out, NormKind::linf);
    case NormKind::l2: return dual_maximizer(out, NormKind::l2);
    case NormKind::linf: return dual_maximizer(out, NormKind::l1);
  }
  return out;
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim, NormKind kind) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  const double n = vector_norm(v, kind);
  return n > 0 ? Eigen::VectorXd(v / n) : random_unit(rng, dim, kind);
}

}  // namespace

TensorNormBounds tensor_norm(const SymTensor& f, const TensorNormOptions& opts) {
  TensorNormBounds out;
  out.upper = upper_norm(f);
  if (f.is_zero()) return out;
  const int p = f.degree();
  const int d = f.dim();
  if (p == 0) {
    Eigen::VectorXd v = f.eval_homogeneous({});
    out.lower = out.diagonal_lower = vector_norm(v, opts.out_norm);
    return out;
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::VectorXd> best_args;

  auto unit_value = [&](const std::vector<Eigen::VectorXd>& args) {
    return vector_norm(f.eval_homogeneous(args), opts.out_norm);
  };
  auto diag_value = [&](const Eigen::VectorXd& u) {
    const double n = vector_norm(u, opts.arg_norm);
    if (n == 0) return 0.0;
    return vector_norm(f.eval_diagonal(u / n), opts.out_norm);
  };

  for (int sample = 0; sample < opts.directions; ++sample) {
    std::vector<Eigen::VectorXd> args(p);
    for (auto& a : args) a = random_unit(rng, d, opts.arg_norm);
    double value = unit_value(args);
    for (int it = 0; it < opts.ascent_iterations; ++it) {
      for (int j = 0; j < p; ++j) {
        const Eigen::VectorXd y = output_dual(f.eval_homogeneous(args), opts.out_norm);
        SymTensor s = f.pair_codomain(y);
        for (int k = 0; k < p; ++k)
          if (k != j) s = s.contract(args[k]);
        Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(s.coeffs().data(), d);
        if (w.isZero(0.0)) continue;
        args[j] = dual_maximizer(w, opts.arg_norm);
      }
      const double nv = unit_value(args);
      const bool stalled = nv <= value * (1.0 + 1e-14);
      value = std::max(value, nv);
      if (stalled) break;
    }
    if (value > out.lower) {
      out.lower = value;
      best_args = args;
    }
    out.diagonal_lower = std::max(out.diagonal_lower, diag_value(args[0]));
  }
  if (!best_args.empty()) {
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
      for (int j = 0; j < p; ++j) x += (mask & (1u << j)) ? Eigen::VectorXd(-best_args[j]) : best_args[j];
      out.diagonal_lower = std::max(out.diagonal_lower, diag_value(x));
    }
  }
  // diagonal points are admissible arguments too
  out.lower = std::max(out.lower, out.diagonal_lower);
  return out;
}

MajorantSeries majorant_of(const SymFunctional& f) {
  std::vector<double> c;
  for (int p : f.degrees()) {
    if (static_cast<int>(c.size()) <= p) c.resize(p + 1, 0.0);
    c[p] = upper_norm(f.term(p));
  }
  return MajorantSeries(std::move(c));
}

}  // namespace chrono_duhamel
