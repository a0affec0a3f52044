#ifndef CHRONO_DUHAMEL_DRIVER_HPP
#define CHRONO_DUHAMEL_DRIVER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "chrono_duhamel/multilinear.hpp"
#include "chrono_duhamel/run_config.hpp"

namespace chrono_duhamel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

const std::vector<std::string>& command_names();

/// Runs one command, writing CSV artifacts under config.out_dir and a short
/// report to `log`. Returns the process exit status.
int run(const std::string& command, const RunConfig& config, std::ostream& log);

/// The functional selected by the [functional] section.
SymFunctional build_functional(const RunConfig& config);

}  // namespace chrono_duhamel

#endif
