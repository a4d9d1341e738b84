#include "ratelens/apoptosis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ratelens/error.hpp"

namespace ratelens::apoptosis {

void ApoptosisModel::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("apoptosis: gamma must be > 0");
  }
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) {
    throw InvalidArgument("apoptosis: unit_scale must be > 0");
  }
  if (!(squared_denominator > 0.0) || !std::isfinite(squared_denominator)) {
    throw InvalidArgument("apoptosis: squared_denominator must be > 0");
  }
  if (!(0 < x_th && x_th < x_max)) {
    throw InvalidArgument("apoptosis: need 0 < x_th < x_max");
  }
}

Alphabet input_alphabet(const ApoptosisModel& m) {
  m.validate();
  return Alphabet::indexed(static_cast<std::size_t>(m.x_max));
}

Alphabet decision_alphabet() { return Alphabet::indexed(2); }

Pmf exp_source(const ApoptosisModel& m) {
  m.validate();
  const double rate = m.gamma / m.unit_scale;
  std::vector<double> w(static_cast<std::size_t>(m.x_max));
  for (std::size_t x = 0; x < w.size(); ++x) {
    w[x] = std::exp(-rate * static_cast<double>(x));
  }
  return Pmf::from_weights(input_alphabet(m), std::move(w));
}

namespace {

template <typename Cost>
DistortionMatrix threshold_distortion(const ApoptosisModel& m, Cost cost) {
  m.validate();
  const auto n = static_cast<std::size_t>(m.x_max);
  Matrix<double> v(n, 2, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto xi = static_cast<std::int64_t>(x);
    const double c = cost(xi);
    if (xi < m.x_th) {
      v(x, 1) = c;  // death below threshold is the error
    } else {
      v(x, 0) = c;  // survival at or above threshold is the error
    }
  }
  return DistortionMatrix(input_alphabet(m), decision_alphabet(), std::move(v));
}

}  // namespace

DistortionMatrix hamming_like(const ApoptosisModel& m) {
  return threshold_distortion(m, [](std::int64_t) { return 1.0; });
}

DistortionMatrix rectified_squared(const ApoptosisModel& m) {
  return threshold_distortion(m, [&m](std::int64_t x) {
    const double diff = static_cast<double>(x - m.x_th);
    return diff * diff / m.squared_denominator;
  });
}

}  // namespace ratelens::apoptosis
