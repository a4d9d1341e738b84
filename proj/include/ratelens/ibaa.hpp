#pragma once

// Inverse Blahut-Arimoto: recover the distortion function under which an
// observed decision strategy is rate-distortion optimal.
//
// Optimal strategies satisfy P(y|x) = P_Y(y) exp(-lambda d(x,y)) / f(x),
// so -ln(P(y|x) / P_Y(y)) = lambda d(x,y) + ln f(x). The recovered matrix is
// identified only up to a positive scale (lambda is fixed to 1) and a per-row
// offset; the offset, which absorbs the normalizer f(x), is removed by
// subtracting each row's minimum.

#include <optional>
#include <vector>

#include "ratelens/probcore.hpp"

namespace ratelens::ibaa {

struct IbaaResult {
  DistortionMatrix distortion;    // per row, min_y distortion(x, y) == 0
  Matrix<double> tilde_distortion;  // before offset removal
  double lambda_assumed = 1.0;
  // Observed events per input symbol, when recovered from counts.
  std::optional<std::vector<double>> row_counts;
};

// -ln(P(y|x) / P_Y(y)), natural log. Throws ZeroProbability on any zero in
// the strategy or the marginal, ShapeMismatch if the alphabets differ.
Matrix<double> tilde_distortion(const Strategy& strategy, const Pmf& p_y);

IbaaResult estimate_distortion(const Strategy& strategy, const Pmf& p_y);

// Smooth, condition, invert. Never throws for a valid count matrix.
IbaaResult ibaa_from_counts(const CountMatrix& counts);
IbaaResult ibaa_from_counts(const WeightMatrix& weights);

struct RoundtripReport {
  double max_abs_error = 0.0;
  // Least-squares a minimizing |d_est - a d_ref|^2, where d_ref is d_true with
  // per-row minima removed; 0 when d_ref vanishes.
  double recovered_scale = 0.0;
  double lambda = 0.0;
  double rate_bits = 0.0;
  double expected_distortion = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Forward-solve with lambda0, invert, compare against lambda0 * d_ref.
RoundtripReport roundtrip_validate(const Pmf& p_x,
                                   const DistortionMatrix& d_true,
                                   double lambda0, double tol = 1e-12,
                                   std::size_t max_iter = 100000);

}  // namespace ratelens::ibaa
