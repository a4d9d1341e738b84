#include "ratelens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ratelens/error.hpp"

namespace ratelens::rng {

std::size_t sample_index(std::span<const double> cumulative, double u) noexcept {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

CountMatrix sample_counts(const JointDist& joint, std::uint64_t n,
                          std::uint64_t seed) {
  const auto& p = joint.probs();
  Matrix<std::uint64_t> counts(p.rows(), p.cols(), 0);
  Xoshiro256 eng = stream_engine(seed, 0);
  const auto probs = p.flat();
  auto out = counts.flat();

  double remaining_mass = 0.0;
  for (double v : probs) remaining_mass += v;
  std::uint64_t remaining = n;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    if (i + 1 == probs.size()) {
      out[i] = remaining;
      break;
    }
    double q = remaining_mass > 0.0 ? probs[i] / remaining_mass : 1.0;
    q = std::clamp(q, 0.0, 1.0);
    std::binomial_distribution<long long> binom(static_cast<long long>(remaining), q);
    const auto k = static_cast<std::uint64_t>(binom(eng));
    out[i] = k;
    remaining -= k;
    remaining_mass -= probs[i];
  }
  return CountMatrix(joint.x_alphabet(), joint.y_alphabet(), std::move(counts));
}

AliasTable::AliasTable(std::span<const double> weights, std::int64_t offset)
    : prob_(weights.size()), alias_(weights.size()), offset_(offset) {
  if (weights.empty()) throw InvalidArgument("alias table needs weights");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("alias weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("alias weights sum to zero");

  const std::size_t n = weights.size();
  std::vector<double> scaled(n);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::size_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

AliasTable binomial_table(std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("binomial needs n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) return AliasTable(std::vector<double>{1.0}, 0);
  if (p == 1.0) return AliasTable(std::vector<double>{1.0}, n);

  const double nd = static_cast<double>(n);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double base = std::lgamma(nd + 1.0);
  auto log_pmf = [&](std::int64_t k) {
    const double kd = static_cast<double>(k);
    return base - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * log_p + (nd - kd) * log_q;
  };
  const auto mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((nd + 1.0) * p)), 0, n);
  const double log_mode = log_pmf(mode);
  constexpr double kLogCut = -41.4465316739;  // ln(1e-18)
  std::int64_t lo = mode;
  while (lo > 0 && log_pmf(lo - 1) - log_mode > kLogCut) --lo;
  std::int64_t hi = mode;
  while (hi < n && log_pmf(hi + 1) - log_mode > kLogCut) ++hi;

  std::vector<double> w(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t k = lo; k <= hi; ++k) {
    w[static_cast<std::size_t>(k - lo)] = std::exp(log_pmf(k) - log_mode);
  }
  return AliasTable(w, lo);
}

}  // namespace ratelens::rng
