#include "ratelens/blahut.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

#include "ratelens/error.hpp"

namespace ratelens::baa {
namespace {

// Row sums below this are recomputed in log space.
constexpr double kUnderflowGuard = 1e-250;

void check_inputs(const Pmf& p_x, const DistortionMatrix& d) {
  if (!(p_x.alphabet() == d.x_alphabet())) {
    throw ShapeMismatch("source alphabet does not match distortion rows");
  }
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
}

// exp(-lambda (d(x,y) - min_y' d(x,y'))), precomputed once per solve.
Matrix<double> shifted_kernel(const Matrix<double>& d, double lambda) {
  Matrix<double> k(d.rows(), d.cols());
  for (std::size_t x = 0; x < d.rows(); ++x) {
    const auto row = d.row(x);
    const double lo = *std::min_element(row.begin(), row.end());
    for (std::size_t y = 0; y < d.cols(); ++y) {
      k(x, y) = std::exp(-lambda * (row[y] - lo));
    }
  }
  return k;
}

void log_space_row(std::span<const double> d_row, double lambda,
                   std::span<const double> py, std::span<double> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < out.size(); ++y) {
    if (py[y] > 0.0) {
      out[y] = std::log(py[y]) - lambda * d_row[y];
      top = std::max(top, out[y]);
    }
  }
  double sum = 0.0;
  for (std::size_t y = 0; y < out.size(); ++y) {
    out[y] = py[y] > 0.0 ? std::exp(out[y] - top) : 0.0;
    sum += out[y];
  }
  for (double& v : out) v /= sum;
}

// Strategy update into `out`; `py` must have at least one positive entry.
void strategy_step(const Matrix<double>& d, const Matrix<double>& kernel,
                   double lambda, std::span<const double> py,
                   Matrix<double>& out) {
  const std::size_t ny = d.cols();
  for (std::size_t x = 0; x < d.rows(); ++x) {
    auto dst = out.row(x);
    const auto k = kernel.row(x);
    double sum = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      dst[y] = py[y] * k[y];
      sum += dst[y];
    }
    if (sum < kUnderflowGuard) {
      log_space_row(d.row(x), lambda, py, dst);
      continue;
    }
    const double inv = 1.0 / sum;
    for (double& v : dst) v *= inv;
  }
}

void marginal_step(std::span<const double> px, const Matrix<double>& s,
                   std::span<double> py) {
  std::fill(py.begin(), py.end(), 0.0);
  for (std::size_t x = 0; x < s.rows(); ++x) {
    const double w = px[x];
    const auto row = s.row(x);
    for (std::size_t y = 0; y < py.size(); ++y) py[y] += w * row[y];
  }
}

BaaResult make_result(const Pmf& p_x, const DistortionMatrix& d,
                      Matrix<double> strategy_rows, std::vector<double> py,
                      double lambda, std::size_t iterations, bool converged) {
  Strategy strategy(d.x_alphabet(), d.y_alphabet(), std::move(strategy_rows));
  const JointDist joint = compose_joint(p_x, strategy);
  const double rate = mutual_information(joint);
  const double dist = expected_distortion(joint, d);
  return BaaResult{std::move(strategy),
                   Pmf(d.y_alphabet(), std::move(py)),
                   lambda,
                   rate,
                   dist,
                   iterations,
                   converged};
}

}  // namespace

Strategy update_strategy(const DistortionMatrix& d, double lambda,
                         const Pmf& p_y) {
  check_lambda(lambda);
  if (!(p_y.alphabet() == d.y_alphabet())) {
    throw ShapeMismatch("output marginal does not match distortion columns");
  }
  Matrix<double> rows(d.values().rows(), d.values().cols());
  strategy_step(d.values(), shifted_kernel(d.values(), lambda), lambda,
                p_y.probs(), rows);
  return Strategy(d.x_alphabet(), d.y_alphabet(), std::move(rows));
}

Pmf update_output(const Pmf& p_x, const Strategy& strategy) {
  if (!(p_x.alphabet() == strategy.x_alphabet())) {
    throw ShapeMismatch("source alphabet does not match strategy rows");
  }
  std::vector<double> py(strategy.y_alphabet().size());
  marginal_step(p_x.probs(), strategy.rows(), py);
  return Pmf(strategy.y_alphabet(), std::move(py));
}

double lagrangian(const Pmf& p_x, const Strategy& strategy,
                  const DistortionMatrix& d, double lambda) {
  const JointDist joint = compose_joint(p_x, strategy);
  return std::numbers::ln2 * mutual_information(joint) +
         lambda * expected_distortion(joint, d);
}

BaaResult baa_solve(const Pmf& p_x, const DistortionMatrix& d,
                    const BaaConfig& cfg) {
  check_inputs(p_x, d);
  check_lambda(cfg.lambda);
  if (!(cfg.tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (cfg.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");

  const auto& dv = d.values();
  const std::size_t ny = dv.cols();
  const Matrix<double> kernel = shifted_kernel(dv, cfg.lambda);

  std::vector<double> py(ny, 1.0 / static_cast<double>(ny));
  std::vector<double> next(ny);
  Matrix<double> rows(dv.rows(), ny);

  bool converged = false;
  std::size_t it = 0;
  while (it < cfg.max_iter) {
    ++it;
    strategy_step(dv, kernel, cfg.lambda, py, rows);
    marginal_step(p_x.probs(), rows, next);
    double delta = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      delta = std::max(delta, std::abs(next[y] - py[y]));
    }
    py.swap(next);
    if (delta < cfg.tol) {
      converged = true;
      break;
    }
  }
  // Pair the reported strategy with the marginal that generated it.
  strategy_step(dv, kernel, cfg.lambda, py, rows);
  return make_result(p_x, d, std::move(rows), std::move(py), cfg.lambda, it,
                     converged);
}

double zero_rate_distortion(const Pmf& p_x, const DistortionMatrix& d) {
  check_inputs(p_x, d);
  const auto& dv = d.values();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < dv.cols(); ++y) {
    double e = 0.0;
    for (std::size_t x = 0; x < dv.rows(); ++x) e += p_x[x] * dv(x, y);
    best = std::min(best, e);
  }
  return best;
}

double min_distortion(const Pmf& p_x, const DistortionMatrix& d) {
  check_inputs(p_x, d);
  const auto& dv = d.values();
  double total = 0.0;
  for (std::size_t x = 0; x < dv.rows(); ++x) {
    const auto row = dv.row(x);
    total += p_x[x] * *std::min_element(row.begin(), row.end());
  }
  return total;
}

BaaResult zero_rate_solution(const Pmf& p_x, const DistortionMatrix& d) {
  check_inputs(p_x, d);
  const auto& dv = d.values();
  std::size_t best_y = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < dv.cols(); ++y) {
    double e = 0.0;
    for (std::size_t x = 0; x < dv.rows(); ++x) e += p_x[x] * dv(x, y);
    if (e < best) {
      best = e;
      best_y = y;
    }
  }
  Matrix<double> rows(dv.rows(), dv.cols(), 0.0);
  for (std::size_t x = 0; x < dv.rows(); ++x) rows(x, best_y) = 1.0;
  std::vector<double> py(dv.cols(), 0.0);
  py[best_y] = 1.0;
  return make_result(p_x, d, std::move(rows), std::move(py), 0.0, 0, true);
}

RdCurve rd_curve(const Pmf& p_x, const DistortionMatrix& d,
                 const std::vector<double>& lambda_grid, double tol,
                 std::size_t max_iter) {
  if (lambda_grid.empty()) throw InvalidArgument("lambda grid is empty");
  std::vector<double> grid = lambda_grid;
  for (double l : grid) check_lambda(l);
  std::sort(grid.begin(), grid.end());

  RdCurve curve;
  curve.points.reserve(grid.size());
  for (double lambda : grid) {
    const BaaResult r = lambda == 0.0
                            ? zero_rate_solution(p_x, d)
                            : baa_solve(p_x, d, {lambda, tol, max_iter});
    curve.points.push_back(
        {lambda, r.rate_bits, r.expected_distortion, r.iterations, r.converged});
  }
  return curve;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) {
    throw InvalidArgument("geometric grid needs 0 < lo <= hi and points >= 1");
  }
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo * std::exp(step * static_cast<double>(i));
  }
  grid.back() = hi;
  return grid;
}

std::vector<double> default_lambda_grid() {
  return geometric_grid(1e-2, 1e2, 60);
}

BaaResult solve_for_distortion(const Pmf& p_x, const DistortionMatrix& d,
                               double target, double tol_d, double tol,
                               std::size_t max_iter) {
  if (!(tol_d > 0.0)) throw InvalidArgument("distortion tolerance must be > 0");
  const double d_max = zero_rate_distortion(p_x, d);
  const double d_min = min_distortion(p_x, d);
  if (!std::isfinite(target) || target < d_min - tol_d ||
      target > d_max + tol_d) {
    throw TargetOutOfRange("target distortion " + std::to_string(target) +
                           " outside [" + std::to_string(d_min) + ", " +
                           std::to_string(d_max) + "]");
  }
  if (target >= d_max - tol_d) return zero_rate_solution(p_x, d);

  // Distortion is non-increasing in lambda: bracket, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  BaaResult best = baa_solve(p_x, d, {hi, tol, max_iter});
  for (int k = 0; best.expected_distortion > target + tol_d; ++k) {
    if (k == 60) {
      throw TargetOutOfRange("target distortion " + std::to_string(target) +
                             " not reachable at any finite lambda");
    }
    lo = hi;
    hi *= 2.0;
    best = baa_solve(p_x, d, {hi, tol, max_iter});
  }
  if (std::abs(best.expected_distortion - target) <= tol_d) return best;

  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    BaaResult r = baa_solve(p_x, d, {mid, tol, max_iter});
    const double err = r.expected_distortion - target;
    if (std::abs(err) < std::abs(best.expected_distortion - target)) best = r;
    if (std::abs(err) <= tol_d) return r;
    (err > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * hi) break;
  }
  return best;
}

}  // namespace ratelens::baa
