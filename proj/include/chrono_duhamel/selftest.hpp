#ifndef CHRONO_DUHAMEL_SELFTEST_HPP
#define CHRONO_DUHAMEL_SELFTEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace chrono_duhamel {

struct SelftestEntry {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick randomized run of the property suite at small sizes.
std::vector<SelftestEntry> run_selftest(std::uint64_t seed);

}  // namespace chrono_duhamel

#endif
