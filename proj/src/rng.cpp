#include "weylsim/rng.hpp"

#include <cmath>

namespace weylsim {

int Rng::poisson(double lambda) {
  if (lambda < 0) throw ValidationError("Poisson rate must be nonnegative");
  if (lambda == 0) return 0;
  // CDF inversion with on-the-fly pmf recurrence.
  const double u = uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u > cdf && k < 10'000'000) {
    ++k;
    p *= lambda / k;
    cdf += p;
    if (p == 0.0) break;  // underflow guard far in the tail
  }
  return k;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const int n = static_cast<int>(weights.size());
  double total = 0;
  for (double w : weights) {
    if (w < 0) throw ValidationError("alias weights must be nonnegative");
    total += w;
  }
  if (n == 0 || total <= 0) return;  // stays empty; caller handles zero-mass columns
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = weights[i] * n / total;
  std::vector<int> small, large;
  for (int i = n - 1; i >= 0; --i) (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    const int s = small.back();
    small.pop_back();
    const int l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (int i : large) prob_[i] = 1.0;
  for (int i : small) prob_[i] = 1.0;
}

int AliasTable::sample(Rng& rng) const {
  const int i = static_cast<int>(rng.uniform_int(prob_.size()));
  return rng.uniform() < prob_[i] ? i : alias_[i];
}

}  // namespace weylsim
