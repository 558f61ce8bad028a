#include <cstdlib>
#include <iostream>

#include "parafermion/verification.hpp"

int main() {
  parafermion::verification::VerifyOptions options;
  options.fixture_path = PARAFERMION_FIXTURE_DIR "/spiral_walk.txt";
  int failed = 0;
  for (int id = 1; id <= parafermion::verification::kCriterionCount; ++id) {
    const auto r = parafermion::verification::run_criterion(id, options);
    std::cout << parafermion::verification::format_line(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
