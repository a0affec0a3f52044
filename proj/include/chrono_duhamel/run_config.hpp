#ifndef CHRONO_DUHAMEL_RUN_CONFIG_HPP
#define CHRONO_DUHAMEL_RUN_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "chrono_duhamel/duhamel_dynamics.hpp"

namespace chrono_duhamel {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

enum class FunctionalKind { point_eval, linear_weights, tensor_file };
enum class MajorantSource { measured, preset };

struct RunConfig {
  std::string source_path;

  // [grid]
  int M = 8;
  double Lx = 6.283185307179586;
  // [equation]
  EquationKind kind = EquationKind::klein_gordon;
  double mass = 1.0;
  // [nonlinearity] coeffs = "k:value, ..."
  NonlinearitySpec nonlin = NonlinearitySpec::monomial(3, 1.0);
  // [data]
  std::string profile = "cos";  // cos | sin | gaussian | random | zero
  double amplitude = 0.05;
  int mode = 1;
  double chi_amplitude = 0.0;
  double gaussian_width = 0.5;
  // [times]
  double t1 = 0.0;
  double t2 = 1.0;
  int steps = 40;
  int snapshot_every = 0;  // 0: first and last only
  // [functional]
  FunctionalKind functional = FunctionalKind::point_eval;
  int node = 0;
  double tau = 0.0;
  bool tau_set = false;
  std::vector<double> weights;
  std::string tensor_file;
  // [caps]
  int P = 5;
  int K = 2;
  // [norms]
  double s = 1.0;
  double m_ref = 1.0;
  // [certify]
  double R = 0.2;
  double floor = 0.05;
  MajorantSource majorant = MajorantSource::measured;
  std::vector<double> X_coeffs;
  int majorant_samples = 32;
  // [tolerances]
  double flow_rel_tol = 1e-10;
  int tree_order = 8;
  int tree_panels = 1;
  int invariance_substeps = 1;
  double drift_threshold = 1e-6;
  // [run]
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  Model model() const;
  CauchyData initial_data() const;
  double dt() const { return (t2 - t1) / steps; }
  /// Every resolved key as "[section] key = value", in a fixed order.
  std::vector<std::string> resolved_lines() const;
};

/// INI-style file: [section] headers, key = value lines, ';' or '#' comments.
/// Unknown sections or keys are errors.
RunConfig load_config(const std::string& path);

}  // namespace chrono_duhamel

#endif
