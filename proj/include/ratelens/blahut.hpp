#pragma once

#include <cstddef>
#include <vector>

#include "ratelens/probcore.hpp"

namespace ratelens::baa {

struct BaaConfig {
  double lambda = 1.0;
  // Stop once max_y |P_Y^{k+1}(y) - P_Y^k(y)| < tol.
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct BaaResult {
  Strategy strategy;
  // The output marginal that generated `strategy` through the exponential
  // update; at convergence it matches the induced marginal within tol.
  Pmf output_dist;
  double lambda = 0.0;
  double rate_bits = 0.0;
  double expected_distortion = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct RdPoint {
  double lambda = 0.0;
  double rate_bits = 0.0;
  double distortion = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct RdCurve {
  std::vector<RdPoint> points;  // sorted by lambda ascending
};

// One strategy update: P(y|x) proportional to P_Y(y) exp(-lambda d(x,y)).
// Evaluated in log space with a per-row max shift, so large lambda cannot
// underflow a whole row. Symbols with P_Y(y) = 0 stay at probability 0.
Strategy update_strategy(const DistortionMatrix& d, double lambda,
                         const Pmf& p_y);

// Output marginal induced by a strategy: P_Y(y) = sum_x P_X(x) P(y|x).
Pmf update_output(const Pmf& p_x, const Strategy& strategy);

// Lagrangian I(X;Y) [nats] + lambda E[d] of the joint induced by `strategy`.
// Nats match the exp(-lambda d) update, which minimizes exactly this form.
double lagrangian(const Pmf& p_x, const Strategy& strategy,
                  const DistortionMatrix& d, double lambda);

// Alternates the two updates from a uniform P_Y. Never throws on
// non-convergence; inspect `converged`. lambda = 0 returns the uniform fixed
// point (every row equal to the uniform P_Y, rate 0).
BaaResult baa_solve(const Pmf& p_x, const DistortionMatrix& d,
                    const BaaConfig& cfg);

// D_max = min_y E[d(X, y)]: distortion of the best constant output.
double zero_rate_distortion(const Pmf& p_x, const DistortionMatrix& d);
// D_min = E[min_y d(X, y)].
double min_distortion(const Pmf& p_x, const DistortionMatrix& d);

// The lambda -> 0+ limit of the optimal strategy: every input mapped to the
// best constant output (lowest index on ties).
BaaResult zero_rate_solution(const Pmf& p_x, const DistortionMatrix& d);

// One baa_solve per grid value. A grid value of exactly 0 yields the zero-rate
// endpoint (0 bits, D_max). Non-converged points are kept and flagged.
RdCurve rd_curve(const Pmf& p_x, const DistortionMatrix& d,
                 const std::vector<double>& lambda_grid, double tol = 1e-10,
                 std::size_t max_iter = 100000);

// `points` values geometrically spaced between lo and hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);
std::vector<double> default_lambda_grid();  // 60 points in [1e-2, 1e2]

// Bisection on lambda until |E[d] - target| <= tol_d. Throws
// TargetOutOfRange when target lies outside [D_min, D_max].
BaaResult solve_for_distortion(const Pmf& p_x, const DistortionMatrix& d,
                               double target, double tol_d,
                               double tol = 1e-10,
                               std::size_t max_iter = 100000);

}  // namespace ratelens::baa
