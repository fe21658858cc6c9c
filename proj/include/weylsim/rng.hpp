#pragma once

// Counter-based splittable randomness: every (master seed, stream index) pair
// deterministically yields an independent generator, so parallel sampling is
// reproducible regardless of worker scheduling. SplitMix64 core.

#include <cstdint>
#include <vector>

#include "weylsim/common.hpp"

namespace weylsim {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
    return Rng(mix(master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::uint64_t uniform_int(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Poisson draw by CDF inversion; fine for the moderate rates used here.
  int poisson(double lambda);

  static std::uint64_t mix(std::uint64_t x) {
    x = (x ^ (x >> 33)) * 0xff51afd7ed558ccdULL;
    x = (x ^ (x >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return x ^ (x >> 33);
  }

 private:
  std::uint64_t state_;
};

// Walker alias table for O(1) draws from a fixed nonnegative weight vector.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);

  bool empty() const { return prob_.empty(); }
  int sample(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

}  // namespace weylsim
