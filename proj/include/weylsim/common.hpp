#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace weylsim {

using Complex = std::complex<double>;

// Error taxonomy mirrored by the CLI exit codes: parse -> 2, validation -> 3,
// resource caps -> 4.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_prime(int x) {
  if (x < 2) return false;
  for (int f = 2; f * f <= x; ++f)
    if (x % f == 0) return false;
  return true;
}

// Largest dense Hilbert dimension we materialize (d^n). Beyond this the
// dense oracle refuses rather than exhausting memory.
inline constexpr long kDenseDimCap = 4096;

// Entries whose magnitude falls below scale * kEntrySnapTol are treated as
// exact zeros when building superoperator sampling tables. Keeps signed
// permutations (Clifford superoperators) exactly sparse so their column
// norms are exactly 1.
inline constexpr double kEntrySnapTol = 1e-13;

}  // namespace weylsim
