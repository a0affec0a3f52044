#include "chrono_duhamel/driver.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "chrono_duhamel/chrono_exp.hpp"
#include "chrono_duhamel/feynman_trees.hpp"
#include "chrono_duhamel/selftest.hpp"
#include "chrono_duhamel/tensor_io.hpp"

namespace chrono_duhamel {

namespace fs = std::filesystem;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"propagate", "evolve", "invariance", "certify", "trees", "selftest"};
  return names;
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

class CsvFile {
 public:
  CsvFile(const RunConfig& cfg, const std::string& command, const std::string& name, const std::string& columns)
      : path_(fs::path(cfg.out_dir) / name), out_(path_, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
    out_ << "# chrono-duhamel " << command << '\n';
    for (const auto& l : cfg.resolved_lines()) out_ << "# " << l << '\n';
    out_ << columns << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_snapshot(const RunConfig& cfg, const Model& m, const CauchyData& d, int index) {
  const fs::path p = fs::path(cfg.out_dir) / fmt::format("field_{:05d}.csv", index);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  write_field_snapshot(out, m.grid, m.disp, d);
}

bool snapshot_due(const RunConfig& cfg, int i, int last) {
  if (i == 0 || i == last) return true;
  return cfg.snapshot_every > 0 && i % cfg.snapshot_every == 0;
}

double quadratic_invariant(const Model& m, const CauchyData& d) {
  return m.disp.second_order() ? energy(m.grid, m.disp, d) : l2_norm(m.grid, d.psi);
}

int cmd_propagate(const RunConfig& cfg, std::ostream& log) {
  const Model m = cfg.model();
  const CauchyData init = cfg.initial_data();
  const int r = m.disp.second_order() ? 1 : 0;
  CsvFile csv(cfg, "propagate", "propagate.csv", "t,cau_norm,quadratic_invariant");
  for (int i = 0; i <= cfg.steps; ++i) {
    const double t = i == cfg.steps ? cfg.t2 : cfg.t1 + i * cfg.dt();
    const CauchyData d = propagate(m.grid, m.disp, init, t);
    csv.row({num(t), num(sobolev_norm(m.grid, d, cfg.s, r, cfg.m_ref)), num(quadratic_invariant(m, d))});
    if (snapshot_due(cfg, i, cfg.steps)) write_snapshot(cfg, m, d, i);
  }
  log << "propagate: wrote " << csv.path().string() << '\n';
  return kExitOk;
}

Trajectory run_evolve(const RunConfig& cfg) {
  return evolve(cfg.model(), cfg.initial_data(), cfg.t1, cfg.t2, std::abs(cfg.dt()));
}

int cmd_evolve(const RunConfig& cfg, std::ostream& log) {
  const Trajectory traj = run_evolve(cfg);
  const Model& m = traj.model;
  const int r = m.disp.second_order() ? 1 : 0;
  const std::vector<double> running = running_duhamel_residual(traj, cfg.s, cfg.m_ref);
  CsvFile csv(cfg, "evolve", "trajectory.csv", "t,cau_norm,energy,duhamel_residual_running");
  const int last = static_cast<int>(traj.states.size()) - 1;
  for (int i = 0; i <= last; ++i) {
    const CauchyData d = traj.trace(i);
    // norm of the chart point Theta_t u, constant when N = 0
    const double chart = sobolev_norm(m.grid, traj.states[i].current.chart_data, cfg.s, r, cfg.m_ref);
    csv.row({num(traj.states[i].time), num(chart),
             num(quadratic_invariant(m, d)), num(running[i])});
    if (snapshot_due(cfg, i, last)) write_snapshot(cfg, m, d, i);
  }
  const ResidualReport rep = duhamel_residual(traj, cfg.t1, cfg.t2, cfg.s, cfg.m_ref);
  log << fmt::format("evolve: {} steps, duhamel residual {:.6e} (quadrature estimate {:.3e})\n", last, rep.residual,
                     rep.quadrature_error);
  return kExitOk;
}

MajorantSeries select_majorant(const RunConfig& cfg, const Model& m) {
  if (cfg.majorant == MajorantSource::preset) return MajorantSeries(cfg.X_coeffs);
  return chart_majorant(m, std::min(cfg.t1, cfg.t2), std::max(cfg.t1, cfg.t2), cfg.majorant_samples);
}

int cmd_invariance(const RunConfig& cfg, std::ostream& log) {
  const Trajectory traj = run_evolve(cfg);
  const SymFunctional f = build_functional(cfg);
  const InvarianceScan scan = invariance_scan(f, traj, cfg.t1, cfg.t2, cfg.invariance_substeps);
  const MajorantSeries X = select_majorant(cfg, traj.model);
  FlowOptions fo;
  fo.rel_tol = cfg.flow_rel_tol;
  CsvFile csv(cfg, "invariance", "invariance.csv", "t,functional_value,running_drift,certified_radius,truncation_events");
  for (const auto& p : scan.points) {
    const FlowResult fr = flow(X, -std::abs(p.t - cfg.t1), cfg.R, fo);
    const double radius = fr.status == FlowStatus::completed ? fr.value : 0.0;
    csv.row({num(p.t), num(p.value), num(p.running_drift), num(radius), std::to_string(p.truncation_events)});
  }
  const bool pass = scan.drift <= cfg.drift_threshold;
  CsvFile summary(cfg, "invariance", "invariance_summary.csv", "drift,threshold,pass,initial_value,final_value");
  summary.row({num(scan.drift), num(cfg.drift_threshold), pass ? "1" : "0", num(scan.points.front().value),
               num(scan.points.back().value)});
  log << fmt::format("invariance: drift {:.6e} (threshold {:.1e}) {}\n", scan.drift, cfg.drift_threshold,
                     pass ? "below threshold" : "ABOVE threshold");
  return kExitOk;
}

std::optional<double> monomial_closed_form(const MajorantSeries& X, double R, double floor) {
  int k = -1;
  for (int p = 0; p <= X.truncation_degree(); ++p) {
    if (X.coeff(p) == 0.0) continue;
    if (k >= 0) return std::nullopt;
    k = p;
  }
  if (k < 0) return std::nullopt;
  const double C = X.coeff(k);
  if (k == 1) return std::log(R / floor) / C;
  return (std::pow(floor, 1.0 - k) - std::pow(R, 1.0 - k)) / (C * (k - 1));
}

int cmd_certify(const RunConfig& cfg, std::ostream& log) {
  const Model m = cfg.model();
  const MajorantSeries X = select_majorant(cfg, m);
  const SymFunctional f = build_functional(cfg);
  const MajorantSeries fm = majorant_of(f);
  GuaranteedTimeOptions gopts;
  gopts.flow.rel_tol = cfg.flow_rel_tol;
  const double tbar = guaranteed_time(X, cfg.R, cfg.floor, gopts);
  const bool transport = cfg.majorant == MajorantSource::measured;

  CsvFile csv(cfg, "certify", "certify.csv", "T,certified_radius,status,f_majorant_at_R,transported_at_radius,bound_holds");
  SymFunctional Uf = f;
  const double span = cfg.t2 - cfg.t1;
  long events = 0;
  for (int i = 0; i <= cfg.steps; ++i) {
    const double T = std::abs(span) * i / cfg.steps;
    if (transport && i > 0) {
      const ChronoResult cr = chrono_exp_evolve(m, Uf, cfg.t1 + span * (i - 1) / cfg.steps, cfg.t1 + span * i / cfg.steps, 1);
      Uf = cr.value;
      events += cr.truncation_events;
    }
    Certificate cert = certify_window(fm, X, cfg.R, T);
    std::string transported, holds;
    if (transport) {
      check_transported(cert, majorant_of(Uf));
      transported = num(*cert.transported_at_r_prime);
      holds = *cert.bound_holds ? "1" : "0";
    }
    const char* status = cert.status == FlowStatus::completed ? "completed"
                         : cert.status == FlowStatus::hit_zero ? "hit_zero" : "blew_up";
    csv.row({num(T), num(cert.r_prime), status, num(cert.f_at_R), transported, holds});
  }
  const auto closed = monomial_closed_form(X, cfg.R, cfg.floor);
  CsvFile summary(cfg, "certify", "certify_summary.csv", "guaranteed_time,closed_form,X_coeffs,truncation_events");
  std::string xs;
  for (double c : X.coeffs()) xs += (xs.empty() ? "" : " ") + num(c);
  summary.row({num(tbar), closed ? num(*closed) : "", xs, std::to_string(events)});
  log << fmt::format("certify: guaranteed time {:.10g} for R={} floor={}\n", tbar, cfg.R, cfg.floor);
  return kExitOk;
}

int cmd_trees(const RunConfig& cfg, std::ostream& log) {
  const Trajectory traj = run_evolve(cfg);
  const Model& m = traj.model;
  const SymFunctional f = build_functional(cfg);
  const Eigen::VectorXd c1 = traj.chart(0);
  const Eigen::VectorXd c2 = traj.chart(traj.states.size() - 1);
  TreeQuadrature q{cfg.tree_order, cfg.tree_panels};
  const TreeExpansion tx = tree_expand(m, f, cfg.t1, cfg.t2, cfg.K, c2, q);
  CsvFile csv(cfg, "trees", "trees.csv", "order,shape,multiplicity,value");
  for (const auto& term : tx.terms)
    csv.row({std::to_string(term.order), term.order == 0 ? "leaf" : term.tree.shape(), num(term.order == 0 ? 1.0 : term.tree.multiplicity),
             num(term.value)});
  // U f truncated to the same order: degree 1 + K (k - 1)
  const int k = m.nonlin.max_degree();
  const int cap = std::min(cfg.P, 1 + cfg.K * std::max(k - 1, 0));
  SymFunctional fc(f.dim(), 1, cap);
  for (int p : f.degrees())
    if (p <= cap) fc.set_term(f.term(p));
  const ChronoResult cr = chrono_exp_evolve(m, fc, cfg.t1, cfg.t2, cfg.steps);
  const double chrono = eval_series(cr.value, c2)[0];
  const double reference = eval_series(f, c1)[0];
  CsvFile summary(cfg, "trees", "trees_summary.csv", "tree_total,chrono_truncated,difference,f_at_theta_t1");
  summary.row({num(tx.total), num(chrono), num(tx.total - chrono), num(reference)});
  log << fmt::format("trees: K={} total {:.12e}, truncated chrono {:.12e}, difference {:.3e}\n", cfg.K, tx.total,
                     chrono, tx.total - chrono);
  return kExitOk;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& log) {
  const auto entries = run_selftest(cfg.seed);
  bool all = true;
  for (const auto& e : entries) {
    log << (e.passed ? "PASS " : "FAIL ") << e.name;
    if (!e.detail.empty()) log << "  " << e.detail;
    log << '\n';
    all = all && e.passed;
  }
  log << (all ? "selftest: all invariants hold\n" : "selftest: failures recorded\n");
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

SymFunctional build_functional(const RunConfig& cfg) {
  const Model m = cfg.model();
  switch (cfg.functional) {
    case FunctionalKind::point_eval: return point_eval_functional(m, cfg.tau, cfg.node, cfg.P);
    case FunctionalKind::linear_weights:
      return SymFunctional::linear(Eigen::Map<const Eigen::VectorXd>(cfg.weights.data(), cfg.weights.size()), cfg.P);
    case FunctionalKind::tensor_file: {
      SymFunctional f;
      try {
        f = load_functional(cfg.tensor_file, cfg.P);
      } catch (const std::runtime_error& e) {
        throw ConfigError(cfg.source_path, 0, "functional.file", e.what());
      }
      if (f.dim() != chart_dim(m.grid) || f.codomain_dim() != 1)
        throw ConfigError(cfg.source_path, 0, "functional.file",
                          fmt::format("tensor dimension {} does not match chart dimension {}", f.dim(), chart_dim(m.grid)));
      return f;
    }
  }
  return SymFunctional();
}

int run(const std::string& command, const RunConfig& config, std::ostream& log) {
  try {
    if (command != "selftest") fs::create_directories(config.out_dir);
    if (command == "propagate") return cmd_propagate(config, log);
    if (command == "evolve") return cmd_evolve(config, log);
    if (command == "invariance") return cmd_invariance(config, log);
    if (command == "certify") return cmd_certify(config, log);
    if (command == "trees") return cmd_trees(config, log);
    if (command == "selftest") return cmd_selftest(config, log);
    log << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    log << "numerical failure in " << e.stage() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    log << "numerical failure in " << command << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace chrono_duhamel
