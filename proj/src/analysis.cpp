#include "ratelens/analysis.hpp"

#include <algorithm>
#include <numbers>
#include <variant>

#include "ratelens/error.hpp"

namespace ratelens::analysis {

std::size_t aligned_index(std::size_t source, std::size_t move, std::size_t n) {
  return (move + n - source + n / 2) % n;
}

AlignedProfile cyclic_align(const DistortionMatrix& d) {
  const auto& v = d.values();
  if (v.rows() != v.cols() || !(d.x_alphabet() == d.y_alphabet())) {
    throw NotSquare("cyclic alignment needs a square matrix over one alphabet");
  }
  const std::size_t n = v.rows();
  AlignedProfile out{d.x_alphabet(), std::vector<double>(n), Matrix<double>(n, n),
                     {}};
  for (std::size_t j = 0; j < n; ++j) {
    out.shifts[j] =
        2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t m = 0; m < n; ++m) {
      out.per_row(s, aligned_index(s, m, n)) = v(s, m);
    }
  }
  out.mean = mean_profile(out);
  return out;
}

Matrix<double> unalign(const AlignedProfile& profile) {
  const std::size_t n = profile.per_row.rows();
  Matrix<double> d(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t m = 0; m < n; ++m) {
      d(s, m) = profile.per_row(s, aligned_index(s, m, n));
    }
  }
  return d;
}

std::vector<double> mean_profile(const AlignedProfile& profile) {
  const auto& m = profile.per_row;
  std::vector<double> mean(m.cols(), 0.0);
  if (m.rows() == 0) return mean;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += m(r, j);
  }
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

ProfileSummary summarize_profile(const std::vector<double>& mean) {
  if (mean.empty()) throw InvalidArgument("empty profile");
  const std::size_t n = mean.size();
  ProfileSummary s;
  const auto [lo_it, hi_it] = std::minmax_element(mean.begin(), mean.end());
  s.peak = *hi_it;
  s.minimum = *lo_it;
  s.min_index = static_cast<std::size_t>(lo_it - mean.begin());
  const double spacing = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double level = s.minimum + 0.5 * (s.peak - s.minimum);
  if (!(s.peak > s.minimum)) {
    s.half_height_width = 2.0 * std::numbers::pi;
    return s;
  }

  // Offset (in sectors, fractional) from the minimum to the first crossing of
  // `level` walking in direction `dir`.
  auto crossing = [&](int dir) {
    double prev = s.minimum;
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t idx =
          dir > 0 ? (s.min_index + k) % n : (s.min_index + n - k) % n;
      const double cur = mean[idx];
      if (cur > level) {
        return static_cast<double>(k - 1) + (level - prev) / (cur - prev);
      }
      prev = cur;
    }
    return static_cast<double>(n) / 2.0;
  };
  s.half_height_width =
      std::min(2.0 * std::numbers::pi, (crossing(+1) + crossing(-1)) * spacing);
  return s;
}

std::vector<double> mirror_differences(const std::vector<double>& mean) {
  const std::size_t n = mean.size();
  std::vector<double> diff(n);
  for (std::size_t j = 0; j < n; ++j) diff[j] = mean[j] - mean[(n - j) % n];
  return diff;
}

ibaa::IbaaResult recover_distortion(const legi::SimResult& sim) {
  return std::visit(
      [](const auto& table) { return ibaa::ibaa_from_counts(table); }, sim.table);
}

std::vector<HillSweepEntry> hill_sweep(const legi::LegiParams& base,
                                       const std::vector<int>& hills,
                                       const legi::SimConfig& sim) {
  if (hills.empty()) throw InvalidArgument("hill list is empty");
  for (int h : hills) {
    if (h < 1) throw InvalidArgument("hill coefficients must be >= 1");
  }
  std::vector<HillSweepEntry> out;
  out.reserve(hills.size());
  for (int h : hills) {
    legi::LegiParams p = base;
    p.hill = h;
    const legi::SimResult result = legi::simulate(p, sim);
    AlignedProfile profile = cyclic_align(recover_distortion(result).distortion);
    const ProfileSummary summary = summarize_profile(profile.mean);
    out.push_back({h, std::move(profile), summary});
  }
  return out;
}

}  // namespace ratelens::analysis
