#include "chrono_duhamel/series_calculus.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace chrono_duhamel {

namespace odeint = boost::numeric::odeint;

MajorantSeries::MajorantSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("majorant coefficients must be finite and nonnegative");
  }
}

MajorantSeries MajorantSeries::monomial(int degree, double coeff) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c[degree] = coeff;
  return MajorantSeries(std::move(c));
}

int MajorantSeries::truncation_degree() const {
  return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1;
}

bool MajorantSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

double MajorantSeries::coeff(int p) const {
  if (p < 0 || p >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[p];
}

double MajorantSeries::eval(double z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::complex<double> MajorantSeries::eval(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

MajorantSeries MajorantSeries::derivative(int k) const {
  if (k < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (k == 0) return *this;
  const int n = static_cast<int>(coeffs_.size());
  if (k >= n) return MajorantSeries();
  std::vector<double> out(n - k);
  for (int j = 0; j < n - k; ++j) {
    double f = 1.0;
    for (int i = j + 1; i <= j + k; ++i) f *= i;
    out[j] = f * coeffs_[j + k];
  }
  return MajorantSeries(std::move(out));
}

MajorantSeries MajorantSeries::operator+(const MajorantSeries& other) const {
  std::vector<double> out(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) out[i] += other.coeffs_[i];
  return MajorantSeries(std::move(out));
}

MajorantSeries MajorantSeries::operator*(const MajorantSeries& other) const {
  if (coeffs_.empty() || other.coeffs_.empty()) return MajorantSeries();
  std::vector<double> out(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  return MajorantSeries(std::move(out));
}

MajorantSeries MajorantSeries::scaled(double factor) const {
  std::vector<double> out = coeffs_;
  for (double& c : out) c *= factor;
  return MajorantSeries(std::move(out));
}

double eval(const MajorantSeries& series, double z) { return series.eval(z); }

MajorantSeries derivative(const MajorantSeries& series, int k) { return series.derivative(k); }

double gamma_constant(double r, double R, int k) {
  if (!(r > 0.0) || !(r < R)) throw std::domain_error("gamma_constant requires 0 < r < R");
  if (k < 0) throw std::domain_error("gamma_constant requires k >= 0");
  // work in logs: log p!/(p-k)! + p log(r/R)
  const double lq = std::log(r / R);
  double best = -std::numeric_limits<double>::infinity();
  double prev = best;
  int decreasing = 0;
  double lfall = std::lgamma(k + 1.0);  // log p!/(p-k)!
  for (int p = k;; ++p) {
    if (p > k) lfall += std::log(static_cast<double>(p)) - std::log(static_cast<double>(p - k));
    const double term = lfall + p * lq;
    best = std::max(best, term);
    decreasing = (term < prev) ? decreasing + 1 : 0;
    prev = term;
    if (decreasing >= kGammaScanPatience) break;
  }
  return std::exp(best - k * std::log(r));
}

namespace {

using state1 = std::array<double, 1>;
using state2 = std::array<double, 2>;

template <class State, class System, class Check>
std::pair<double, bool> integrate_controlled(System sys, State& x, double s_end, const FlowOptions& opts,
                                             Check stop) {
  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  double s = 0.0;
  double ds = std::min(s_end, 1e-3 * std::max(s_end, 1e-300));
  if (ds <= 0.0) ds = s_end;
  long steps = 0;
  // after a stop, back up and retake the step in halves to locate the crossing
  double ds_cap = s_end;
  const double locate_tol = 1e-13 * std::max(1.0, s_end);
  while (s < s_end) {
    if (++steps > opts.max_steps) throw std::runtime_error("flow: step budget exhausted");
    ds = std::min(ds, ds_cap);
    if (s + ds > s_end) ds = s_end - s;
    const State x_prev = x;
    const double s_prev = s;
    if (stepper.try_step(sys, x, s, ds) == odeint::success) {
      if (stop(x)) {
        const double taken = s - s_prev;
        if (taken <= locate_tol) return {s, true};
        x = x_prev;
        s = s_prev;
        ds_cap = 0.5 * taken;
        ds = ds_cap;
        continue;
      }
      if (s_end - s <= 1e-15 * s_end) s = s_end;
    }
    if (ds < 1e-300) throw std::runtime_error("flow: step size underflow");
  }
  return {s, false};
}

}  // namespace

FlowResult flow(const MajorantSeries& X, double t, double z0, const FlowOptions& opts) {
  FlowResult out;
  out.value = z0;
  if (t == 0.0 || X.is_zero()) {
    out.time_reached = t;
    return out;
  }
  const double sign = t > 0 ? 1.0 : -1.0;
  const double T = std::abs(t);
  auto sys = [&](const state1& z, state1& dz, double) { dz[0] = sign * X.eval(z[0]); };
  state1 x{z0};
  FlowStatus status = FlowStatus::completed;
  auto stop = [&](const state1& z) {
    if (!std::isfinite(z[0]) || std::abs(z[0]) > opts.blowup_threshold) {
      status = FlowStatus::blew_up;
      return true;
    }
    if (sign < 0 && z[0] <= opts.zero_floor) {
      status = FlowStatus::hit_zero;
      return true;
    }
    return false;
  };
  if (sign < 0 && z0 <= opts.zero_floor) {
    out.status = FlowStatus::hit_zero;
    out.time_reached = 0.0;
    return out;
  }
  auto [s, stopped] = integrate_controlled(sys, x, T, opts, stop);
  out.value = x[0];
  out.time_reached = sign * s;
  out.status = stopped ? status : FlowStatus::completed;
  if (out.status == FlowStatus::blew_up) out.value = kInfinity;
  if (out.status == FlowStatus::hit_zero) out.value = std::max(x[0], 0.0);
  return out;
}

ComplexFlowResult flow(const MajorantSeries& X, std::complex<double> tau, std::complex<double> z0,
                       const FlowOptions& opts) {
  ComplexFlowResult out;
  out.value = z0;
  out.path_fraction = 1.0;
  if (tau == 0.0 || X.is_zero()) return out;
  auto sys = [&](const state2& z, state2& dz, double) {
    const std::complex<double> v = tau * X.eval(std::complex<double>(z[0], z[1]));
    dz[0] = v.real();
    dz[1] = v.imag();
  };
  state2 x{z0.real(), z0.imag()};
  auto stop = [&](const state2& z) {
    return !std::isfinite(z[0]) || !std::isfinite(z[1]) || std::hypot(z[0], z[1]) > opts.blowup_threshold;
  };
  auto [s, stopped] = integrate_controlled(sys, x, 1.0, opts, stop);
  out.value = {x[0], x[1]};
  out.path_fraction = s;
  out.status = stopped ? FlowStatus::blew_up : FlowStatus::completed;
  return out;
}

double guaranteed_time(const MajorantSeries& X, double R, double floor, const GuaranteedTimeOptions& opts) {
  if (!(R > 0.0) || !(floor > 0.0) || !(floor < R))
    throw std::domain_error("guaranteed_time requires 0 < floor < R");
  if (X.is_zero()) return kInfinity;
  FlowOptions fo = opts.flow;
  fo.zero_floor = std::min(fo.zero_floor, floor * 1e-3);
  auto above = [&](double T) {
    FlowResult r = flow(X, -T, R, fo);
    return r.status == FlowStatus::completed && r.value >= floor;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (above(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.horizon) return kInfinity;
  }
  while (hi - lo > opts.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

MajorantSeries apply_majorant_operator(const MajorantSeries& X, const MajorantSeries& H, int k, int max_degree) {
  if (k < 0) throw std::invalid_argument("apply_majorant_operator: k must be nonnegative");
  MajorantSeries cur = H;
  for (int i = 0; i < k; ++i) {
    cur = X * cur.derivative(1);
    if (max_degree >= 0 && cur.truncation_degree() > max_degree) {
      std::vector<double> c = cur.coeffs();
      c.resize(static_cast<std::size_t>(max_degree) + 1);
      cur = MajorantSeries(std::move(c));
    }
  }
  return cur;
}

}  // namespace chrono_duhamel
