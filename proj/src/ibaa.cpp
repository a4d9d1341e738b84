#include "ratelens/ibaa.hpp"

#include <algorithm>
#include <cmath>

#include "ratelens/blahut.hpp"
#include "ratelens/error.hpp"

namespace ratelens::ibaa {

Matrix<double> tilde_distortion(const Strategy& strategy, const Pmf& p_y) {
  if (!(strategy.y_alphabet() == p_y.alphabet())) {
    throw ShapeMismatch("strategy columns do not match the output marginal");
  }
  const auto& s = strategy.rows();
  for (std::size_t y = 0; y < p_y.size(); ++y) {
    if (!(p_y[y] > 0.0)) {
      throw ZeroProbability("P_Y('" + p_y.alphabet().label(y) +
                            "') is zero; smooth the observations first");
    }
  }
  Matrix<double> tilde(s.rows(), s.cols());
  for (std::size_t x = 0; x < s.rows(); ++x) {
    for (std::size_t y = 0; y < s.cols(); ++y) {
      if (!(s(x, y) > 0.0)) {
        throw ZeroProbability("P('" + strategy.y_alphabet().label(y) + "' | '" +
                              strategy.x_alphabet().label(x) +
                              "') is zero; the implied distortion is infinite");
      }
      tilde(x, y) = -std::log(s(x, y) / p_y[y]);
    }
  }
  return tilde;
}

IbaaResult estimate_distortion(const Strategy& strategy, const Pmf& p_y) {
  Matrix<double> tilde = tilde_distortion(strategy, p_y);
  Matrix<double> d(tilde.rows(), tilde.cols());
  for (std::size_t x = 0; x < tilde.rows(); ++x) {
    const auto row = tilde.row(x);
    const double lo = *std::min_element(row.begin(), row.end());
    for (std::size_t y = 0; y < tilde.cols(); ++y) d(x, y) = row[y] - lo;
  }
  return IbaaResult{
      DistortionMatrix(strategy.x_alphabet(), strategy.y_alphabet(), std::move(d)),
      std::move(tilde), 1.0, std::nullopt};
}

namespace {

IbaaResult from_smoothed(const JointDist& joint, std::vector<double> totals) {
  IbaaResult r =
      estimate_distortion(conditional_y_given_x(joint), marginal_y(joint));
  r.row_counts = std::move(totals);
  return r;
}

}  // namespace

IbaaResult ibaa_from_counts(const CountMatrix& counts) {
  return from_smoothed(laplace_smooth(counts), counts.row_totals());
}

IbaaResult ibaa_from_counts(const WeightMatrix& weights) {
  return from_smoothed(laplace_smooth(weights), weights.row_totals());
}

RoundtripReport roundtrip_validate(const Pmf& p_x,
                                   const DistortionMatrix& d_true,
                                   double lambda0, double tol,
                                   std::size_t max_iter) {
  if (!std::isfinite(lambda0) || lambda0 < 0.0) {
    throw InvalidArgument("lambda0 must be finite and >= 0");
  }
  const baa::BaaResult forward =
      baa::baa_solve(p_x, d_true, {lambda0, tol, max_iter});
  const IbaaResult inverse =
      estimate_distortion(forward.strategy, forward.output_dist);

  const auto& dt = d_true.values();
  const auto& de = inverse.distortion.values();
  double max_err = 0.0;
  double cross = 0.0;
  double norm = 0.0;
  for (std::size_t x = 0; x < dt.rows(); ++x) {
    const auto row = dt.row(x);
    const double lo = *std::min_element(row.begin(), row.end());
    for (std::size_t y = 0; y < dt.cols(); ++y) {
      const double ref = row[y] - lo;
      max_err = std::max(max_err, std::abs(de(x, y) - lambda0 * ref));
      cross += de(x, y) * ref;
      norm += ref * ref;
    }
  }
  RoundtripReport report;
  report.max_abs_error = max_err;
  report.recovered_scale = norm > 0.0 ? cross / norm : 0.0;
  report.lambda = lambda0;
  report.rate_bits = forward.rate_bits;
  report.expected_distortion = forward.expected_distortion;
  report.iterations = forward.iterations;
  report.converged = forward.converged;
  return report;
}

}  // namespace ratelens::ibaa
