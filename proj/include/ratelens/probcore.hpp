#pragma once

// Finite-alphabet probability objects and the information measures built on
// them. Every type validates its invariants on construction and is immutable
// afterwards, so instances can be shared freely between threads.
//
// Normalization policy for Pmf / JointDist / Strategy rows:
//   |sum - 1| <= 1e-12  accepted as is
//   |sum - 1| <= 1e-9   renormalized
//   otherwise           InvalidDistribution

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ratelens/matrix.hpp"

namespace ratelens {

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kRenormTolerance = 1e-9;

// Ordered set of unique symbol labels. Labels may carry a numeric embedding,
// either explicit or parsed from the label text, which the squared and
// absolute distortions need.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels);
  Alphabet(std::vector<std::string> labels, std::vector<double> values);

  // Labels "0", "1", ..., "n-1" with matching numeric values.
  static Alphabet indexed(std::size_t n);
  // Labels formatted from values; precision < 0 selects shortest round-trip
  // formatting, otherwise fixed with that many decimals.
  static Alphabet numeric(std::span<const double> values, int precision = -1);

  std::size_t size() const noexcept { return data_->labels.size(); }
  const std::string& label(std::size_t i) const { return data_->labels.at(i); }
  const std::vector<std::string>& labels() const noexcept {
    return data_->labels;
  }
  std::optional<std::size_t> find(std::string_view label) const;

  bool has_numeric_values() const noexcept;
  // Throws NonNumericAlphabet when some label has no numeric reading.
  std::vector<double> numeric_values() const;

  friend bool operator==(const Alphabet& a, const Alphabet& b);

 private:
  struct Data {
    std::vector<std::string> labels;
    std::vector<double> values;  // empty when not numeric
  };
  std::shared_ptr<const Data> data_;
};

class Pmf {
 public:
  Pmf(Alphabet alphabet, std::vector<double> probs);

  static Pmf uniform(Alphabet alphabet);
  // Normalizes arbitrary nonnegative weights with a positive total.
  static Pmf from_weights(Alphabet alphabet, std::vector<double> weights);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  Alphabet alphabet_;
  std::vector<double> probs_;
};

// Observed event counts L(x, y).
class CountMatrix {
 public:
  CountMatrix(Alphabet x, Alphabet y, Matrix<std::uint64_t> counts);

  const Alphabet& x_alphabet() const noexcept { return x_; }
  const Alphabet& y_alphabet() const noexcept { return y_; }
  const Matrix<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t operator()(std::size_t x, std::size_t y) const {
    return counts_(x, y);
  }
  std::vector<double> row_totals() const;

 private:
  Alphabet x_;
  Alphabet y_;
  Matrix<std::uint64_t> counts_;
};

// Fractional event weights, e.g. accumulated movement distributions. Same
// role as CountMatrix but real valued.
class WeightMatrix {
 public:
  WeightMatrix(Alphabet x, Alphabet y, Matrix<double> weights);

  const Alphabet& x_alphabet() const noexcept { return x_; }
  const Alphabet& y_alphabet() const noexcept { return y_; }
  const Matrix<double>& weights() const noexcept { return weights_; }
  double operator()(std::size_t x, std::size_t y) const {
    return weights_(x, y);
  }
  std::vector<double> row_totals() const;

 private:
  Alphabet x_;
  Alphabet y_;
  Matrix<double> weights_;
};

class JointDist {
 public:
  JointDist(Alphabet x, Alphabet y, Matrix<double> probs);

  const Alphabet& x_alphabet() const noexcept { return x_; }
  const Alphabet& y_alphabet() const noexcept { return y_; }
  const Matrix<double>& probs() const noexcept { return probs_; }
  double operator()(std::size_t x, std::size_t y) const {
    return probs_(x, y);
  }

 private:
  Alphabet x_;
  Alphabet y_;
  Matrix<double> probs_;
};

// Row-stochastic P(y|x): the decision strategy.
class Strategy {
 public:
  Strategy(Alphabet x, Alphabet y, Matrix<double> rows);

  const Alphabet& x_alphabet() const noexcept { return x_; }
  const Alphabet& y_alphabet() const noexcept { return y_; }
  const Matrix<double>& rows() const noexcept { return rows_; }
  double operator()(std::size_t x, std::size_t y) const { return rows_(x, y); }

 private:
  Alphabet x_;
  Alphabet y_;
  Matrix<double> rows_;
};

// Finite, nonnegative cost d(x, y).
class DistortionMatrix {
 public:
  DistortionMatrix(Alphabet x, Alphabet y, Matrix<double> values);

  const Alphabet& x_alphabet() const noexcept { return x_; }
  const Alphabet& y_alphabet() const noexcept { return y_; }
  const Matrix<double>& values() const noexcept { return values_; }
  double operator()(std::size_t x, std::size_t y) const {
    return values_(x, y);
  }

 private:
  Alphabet x_;
  Alphabet y_;
  Matrix<double> values_;
};

// Entropy in bits, 0 log 0 := 0.
double entropy(const Pmf& p);

// I(X;Y) in bits; cells with zero joint mass are skipped.
double mutual_information(const JointDist& joint);

// Add-one smoothing: P(x,y) = (L(x,y) + 1) / sum(L + 1). Every entry of the
// result is strictly positive.
JointDist laplace_smooth(const CountMatrix& counts);
JointDist laplace_smooth(const WeightMatrix& weights);

Pmf marginal_x(const JointDist& joint);
Pmf marginal_y(const JointDist& joint);

// Throws ZeroRowMass if any row of the joint sums to zero.
Strategy conditional_y_given_x(const JointDist& joint);

// P(x,y) = P(x) P(y|x).
JointDist compose_joint(const Pmf& p_x, const Strategy& strategy);

// E[d] = sum p(x,y) d(x,y). Throws ShapeMismatch on alphabet disagreement.
double expected_distortion(const JointDist& joint, const DistortionMatrix& d);

enum class DistortionKind { hamming, squared, absolute };

DistortionKind parse_distortion_kind(std::string_view name);
std::string_view to_string(DistortionKind kind);

// Hamming compares labels; squared and absolute use the numeric embedding of
// both alphabets and throw NonNumericAlphabet without one.
DistortionMatrix standard_distortion(DistortionKind kind, const Alphabet& x,
                                     const Alphabet& y);

}  // namespace ratelens
