#pragma once

// Binary apoptosis benchmark: input X is the caspase-8 molecule count on the
// grid {0, ..., x_max - 1}, output Y is survival (0) or death (1).

#include <cstdint>

#include "ratelens/probcore.hpp"

namespace ratelens::apoptosis {

struct ApoptosisModel {
  // Exponential rate per `unit_scale` molecules, i.e. p(x) ~ exp(-gamma x /
  // unit_scale) with x in molecules.
  double gamma = 0.5;
  double unit_scale = 100.0;
  std::int64_t x_max = 2000;
  std::int64_t x_th = 600;
  double squared_denominator = 20000.0;

  void validate() const;  // throws InvalidArgument
};

Alphabet input_alphabet(const ApoptosisModel& m);
Alphabet decision_alphabet();  // {"0", "1"}

Pmf exp_source(const ApoptosisModel& m);

// 0 on the correct side of the threshold, 1 otherwise. x == x_th counts as
// the apoptosis side.
DistortionMatrix hamming_like(const ApoptosisModel& m);

// 0 on the correct side, (x - x_th)^2 / squared_denominator otherwise.
DistortionMatrix rectified_squared(const ApoptosisModel& m);

}  // namespace ratelens::apoptosis
