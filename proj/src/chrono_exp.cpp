#include "chrono_duhamel/chrono_exp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace chrono_duhamel {

std::vector<VectorFieldChannel> vector_field_channels(const Model& model, double t) {
  const int M = model.grid.M;
  const Eigen::MatrixXd A = propagator_matrix(model.grid, model.disp, t);
  const Eigen::MatrixXd B = propagator_matrix(model.grid, model.disp, -t);
  std::vector<VectorFieldChannel> out;
  if (model.disp.second_order()) {
    out.reserve(M);
    for (int x = 0; x < M; ++x)
      out.push_back({B.col(M + x), A.row(x).transpose().cast<std::complex<double>>(), false});
  } else {
    out.reserve(2 * M);
    for (int x = 0; x < M; ++x) {
      Eigen::VectorXcd l(2 * M);
      for (int a = 0; a < 2 * M; ++a) l[a] = {A(x, a), A(M + x, a)};
      out.push_back({B.col(x), l, false});
      out.push_back({B.col(M + x), l, true});
    }
  }
  return out;
}

namespace {

// monomial coefficients mult(a) * part(N_k prod l_a) of the channel polynomial
std::vector<double> channel_monomials(const VectorFieldChannel& ch, const IndexSpace& space, double N_k) {
  const int k = space.degree();
  std::vector<double> out(space.size());
  for (std::size_t r = 0; r < space.size(); ++r) {
    const std::uint16_t* idx = space.index(r);
    std::complex<double> v = N_k;
    for (int j = 0; j < k; ++j) v *= ch.l[idx[j]];
    out[r] = space.multiplicity(r) * (ch.imaginary_part ? v.imag() : v.real());
  }
  return out;
}

}  // namespace

SymTensor channel_tensor(const VectorFieldChannel& ch, int k, double N_k) {
  SymTensor T(k, static_cast<int>(ch.l.size()), 1);
  std::vector<double> mono = channel_monomials(ch, T.space(), N_k);
  for (std::size_t r = 0; r < T.size(); ++r) T.entry(0, r) = mono[r] / T.space().multiplicity(r);
  return T;
}

SymTensor vector_field_tensor(const Model& model, double t, int k) {
  const int d = chart_dim(model.grid);
  SymTensor V(k, d, d);
  auto it = model.nonlin.coeffs.find(k);
  if (it == model.nonlin.coeffs.end() || it->second == 0.0) return V;
  const std::size_t S = V.size();
  for (const auto& ch : vector_field_channels(model, t)) {
    const SymTensor P = channel_tensor(ch, k, it->second);
    for (int i = 0; i < d; ++i) {
      const double gi = ch.g[i];
      if (gi == 0.0) continue;
      for (std::size_t r = 0; r < S; ++r) V.entry(i, r) += gi * P.entry(0, r);
    }
  }
  return V;
}

VdotResult vdot(const Model& model, double t, const SymFunctional& f) {
  const int d = f.dim();
  if (d != chart_dim(model.grid)) throw std::invalid_argument("vdot: functional dimension differs from chart dimension");
  const int cap = f.max_degree();
  const int codim = f.codomain_dim();
  VdotResult res{SymFunctional(d, codim, cap), 0, 0.0};
  if (model.nonlin.is_zero()) return res;

  const std::vector<VectorFieldChannel> channels = vector_field_channels(model, t);
  std::map<int, std::vector<std::vector<double>>> P;  // k -> per-channel monomials
  std::map<int, double> V_upper;
  std::map<int, std::vector<double>> out_mono;

  for (int p : f.degrees()) {
    if (p == 0) continue;
    const SymTensor& fp = f.term(p);
    if (fp.is_zero()) continue;
    for (const auto& [k, N_k] : model.nonlin.coeffs) {
      if (N_k == 0.0) continue;
      const int m = p - 1 + k;
      if (m > cap) {
        ++res.truncation_events;
        if (!V_upper.count(k)) V_upper[k] = upper_norm(vector_field_tensor(model, t, k));
        res.truncated_bound += p * upper_norm(fp) * V_upper[k];
        continue;
      }
      auto space_k = IndexSpace::get(d, k);
      auto space_h = IndexSpace::get(d, p - 1);
      auto space_m = IndexSpace::get(d, m);
      if (!P.count(k)) {
        auto& v = P[k];
        v.reserve(channels.size());
        for (const auto& ch : channels) v.push_back(channel_monomials(ch, *space_k, N_k));
      }
      const auto table = product_table(d, p - 1, k);
      const std::size_t Sk = space_k->size();
      const std::size_t Sh = space_h->size();
      auto& acc = out_mono[m];
      if (acc.empty()) acc.assign(space_m->size() * codim, 0.0);
      const std::vector<double>& mult_h = space_h->multiplicities();
      for (std::size_t c = 0; c < channels.size(); ++c) {
        const SymTensor h = fp.contract(channels[c].g);
        const std::vector<double>& Pm = P[k][c];
        for (int i = 0; i < codim; ++i) {
          double* dst = &acc[i * space_m->size()];
          for (std::size_t a = 0; a < Sh; ++a) {
            const double ha = p * mult_h[a] * h.entry(i, a);
            if (ha == 0.0) continue;
            const std::uint32_t* row = &(*table)[a * Sk];
            for (std::size_t b = 0; b < Sk; ++b) dst[row[b]] += ha * Pm[b];
          }
        }
      }
    }
  }
  for (auto& [m, mono] : out_mono) {
    SymTensor& T = res.value.term_mut(m);
    const std::size_t S = T.size();
    const auto& mult = T.space().multiplicities();
    for (int i = 0; i < codim; ++i)
      for (std::size_t r = 0; r < S; ++r) T.entry(i, r) = mono[i * S + r] / mult[r];
  }
  return res;
}

namespace {

struct Stepper {
  const Model& model;
  long events = 0;
  double bound = 0.0;

  SymFunctional rhs(double t, const SymFunctional& F) {
    VdotResult r = vdot(model, t, F);
    events += r.truncation_events;
    bound = std::max(bound, r.truncated_bound);
    return std::move(r.value);
  }

  void step(SymFunctional& F, double t, double h) {
    const SymFunctional k1 = rhs(t, F);
    SymFunctional y = F;
    y.add_scaled(k1, 0.5 * h);
    const SymFunctional k2 = rhs(t + 0.5 * h, y);
    y = F;
    y.add_scaled(k2, 0.5 * h);
    const SymFunctional k3 = rhs(t + 0.5 * h, y);
    y = F;
    y.add_scaled(k3, h);
    const SymFunctional k4 = rhs(t + h, y);
    F.add_scaled(k1, h / 6.0);
    F.add_scaled(k2, h / 3.0);
    F.add_scaled(k3, h / 3.0);
    F.add_scaled(k4, h / 6.0);
  }
};

void check_finite(const SymFunctional& F, long step) {
  for (int p : F.degrees())
    for (double c : F.term(p).coeffs())
      if (!std::isfinite(c)) throw NumericalError("chrono_exp_evolve", step, "non-finite coefficients");
}

}  // namespace

ChronoResult chrono_exp_evolve(const Model& model, const SymFunctional& f, double t1, double t2, int steps) {
  ChronoResult res{f, 0, 0.0};
  if (t1 == t2 || model.nonlin.is_zero()) return res;
  if (steps < 1) throw std::invalid_argument("chrono_exp_evolve: steps must be >= 1");
  Stepper st{model};
  const double h = (t2 - t1) / steps;
  for (int i = 0; i < steps; ++i) {
    st.step(res.value, t1 + i * h, h);
    check_finite(res.value, i + 1);
  }
  res.truncation_events = st.events;
  res.truncated_bound = st.bound;
  return res;
}

SymFunctional point_eval_functional(const Model& model, double tau, int node, int max_degree) {
  if (node < 0 || node >= model.grid.M) throw std::out_of_range("point_eval_functional: node outside grid");
  const Eigen::MatrixXd A = propagator_matrix(model.grid, model.disp, tau);
  return SymFunctional::linear(A.row(node).transpose(), max_degree);
}

InvarianceScan invariance_scan(const SymFunctional& f, const Trajectory& traj, double t1, double t2, int substeps) {
  if (substeps < 1) throw std::invalid_argument("invariance_scan: substeps must be >= 1");
  InvarianceScan scan;
  const double lo = std::min(t1, t2), hi = std::max(t1, t2);
  const double tol = 1e-12 * std::max(1.0, hi - lo);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.states[i].time;
    if (t >= lo - tol && t <= hi + tol) nodes.push_back(i);
  }
  if (nodes.empty()) return scan;
  if (std::abs(traj.states[nodes.front()].time - t1) > tol) std::reverse(nodes.begin(), nodes.end());

  Stepper st{traj.model};
  SymFunctional F = f;
  double t_prev = traj.states[nodes.front()].time;
  double v0 = 0.0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const double t = traj.states[nodes[n]].time;
    if (n > 0 && !traj.model.nonlin.is_zero()) {
      const double h = (t - t_prev) / substeps;
      for (int q = 0; q < substeps; ++q) st.step(F, t_prev + q * h, h);
      check_finite(F, static_cast<long>(n));
    }
    t_prev = t;
    const double v = eval_series(F, traj.chart(nodes[n]))[0];
    if (n == 0) v0 = v;
    const double drift = std::abs(v - v0);
    scan.drift = std::max(scan.drift, drift);
    scan.points.push_back({t, v, scan.drift, st.events});
  }
  return scan;
}

MajorantSeries chart_majorant(const Model& model, double t1, double t2, int samples) {
  if (model.nonlin.is_zero()) return MajorantSeries();
  std::vector<double> X(model.nonlin.max_degree() + 1, 0.0);
  for (int i = 0; i <= samples; ++i) {
    const double t = samples == 0 ? t1 : t1 + (t2 - t1) * i / samples;
    for (const auto& [k, N_k] : model.nonlin.coeffs) {
      if (N_k == 0.0 || k < 0) continue;
      X[k] = std::max(X[k], upper_norm(vector_field_tensor(model, t, k)));
    }
  }
  return MajorantSeries(std::move(X));
}

Certificate certify_window(const MajorantSeries& f_majorant, const MajorantSeries& X, double R, double T,
                           double zero_floor) {
  Certificate c;
  c.R = R;
  c.T = T;
  c.f_at_R = f_majorant.eval(R);
  FlowOptions opts;
  opts.zero_floor = zero_floor;
  const FlowResult fr = flow(X, -std::abs(T), R, opts);
  c.status = fr.status;
  c.r_prime = fr.value;
  c.pass = fr.status == FlowStatus::completed && fr.value > 0.0;
  if (!c.pass) c.t_bar = std::abs(fr.time_reached);
  return c;
}

void check_transported(Certificate& cert, const MajorantSeries& transported_majorant) {
  const double lhs = transported_majorant.eval(cert.r_prime);
  cert.transported_at_r_prime = lhs;
  cert.bound_holds = cert.pass && lhs <= cert.f_at_R * (1.0 + 1e-12);
}

}  // namespace chrono_duhamel
