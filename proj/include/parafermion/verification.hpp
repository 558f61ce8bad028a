#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace parafermion::verification {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  unsigned workers = 0;
  std::size_t paths = 10000;    // Monte Carlo criteria 4-7
  std::size_t ks_paths = 2000;  // per side, criterion 9
  std::string fixture_path;     // walk fixture for criterion 11
};

inline constexpr int kCriterionCount = 11;

std::string criterion_name(int id);

// Runs one acceptance criterion (1..11). Failures are reported in the result;
// exceptions from the numerics are caught and reported as failures too.
CriterionResult run_criterion(int id, const VerifyOptions& options);

std::vector<CriterionResult> run_all(const VerifyOptions& options);

// "[PASS] 1 roots: detail (0.01 s)"
std::string format_line(const CriterionResult& result);

void write_results_json(const std::vector<CriterionResult>& results, std::ostream& out);

// Fixture format: first non-comment line names the domain (shape or cell
// list file); remaining lines are mid-edge doubled coordinates "X Y", start
// first. Returns {turning by turns, turning by argument tracking}.
struct FixtureTurning {
  double by_turns = 0.0;
  double by_argument = 0.0;
  std::size_t length = 0;
};
FixtureTurning fixture_turning(const std::string& fixture_path);

}  // namespace parafermion::verification
