#pragma once

#include <vector>

#include "ratelens/ibaa.hpp"
#include "ratelens/legi.hpp"
#include "ratelens/probcore.hpp"

namespace ratelens::analysis {

// Distortion rows re-indexed by the relative angle (theta_m - theta_s + pi)
// mod 2 pi, so the source direction sits at shift pi in every row.
struct AlignedProfile {
  Alphabet rows;               // theta_s labels
  std::vector<double> shifts;  // 2 pi j / N
  Matrix<double> per_row;
  std::vector<double> mean;
};

// Aligned column of movement sector m for source sector s. For odd N the
// source lands at floor(N/2), half a sector short of pi.
std::size_t aligned_index(std::size_t source, std::size_t move, std::size_t n);

// Throws NotSquare unless rows and columns share one sector alphabet.
AlignedProfile cyclic_align(const DistortionMatrix& d);

// Inverse of cyclic_align's re-indexing.
Matrix<double> unalign(const AlignedProfile& profile);

std::vector<double> mean_profile(const AlignedProfile& profile);

struct ProfileSummary {
  double peak = 0.0;
  double minimum = 0.0;
  std::size_t min_index = 0;
  // Full width (radians) of the valley around the minimum where the profile
  // stays below min + (peak - min) / 2; crossings linearly interpolated.
  double half_height_width = 0.0;
};

ProfileSummary summarize_profile(const std::vector<double>& mean);

// mean[j] - mean[N - j]: reflection about the source shift (even N).
std::vector<double> mirror_differences(const std::vector<double>& mean);

// ibaa_from_counts on whichever table the simulation produced.
ibaa::IbaaResult recover_distortion(const legi::SimResult& sim);

struct HillSweepEntry {
  int hill = 1;
  AlignedProfile profile;
  ProfileSummary summary;
};

// For each h: simulate -> recover -> align -> summarize. Every entry uses
// the same seed from `sim`.
std::vector<HillSweepEntry> hill_sweep(const legi::LegiParams& base,
                                       const std::vector<int>& hills,
                                       const legi::SimConfig& sim);

}  // namespace ratelens::analysis
