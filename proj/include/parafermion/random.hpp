#pragma once

#include <cstdint>
#include <random>

namespace parafermion {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent Gaussian stream for one Monte Carlo path. The stream depends
// only on (master seed, path index), never on which worker runs it.
class PathStream {
 public:
  PathStream(std::uint64_t master_seed, std::uint64_t path_index)
      : engine_(stream_seed(master_seed, path_index)) {}

  static std::uint64_t stream_seed(std::uint64_t master_seed,
                                   std::uint64_t path_index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(~path_index));
  }

  // Standard normal draw.
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace parafermion
