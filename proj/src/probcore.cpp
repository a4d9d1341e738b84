#include "ratelens/probcore.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "ratelens/error.hpp"

namespace ratelens {
namespace {

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_value(double v, int precision) {
  char buf[64];
  std::to_chars_result res =
      precision < 0 ? std::to_chars(buf, buf + sizeof buf, v)
                    : std::to_chars(buf, buf + sizeof buf, v,
                                    std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

// Applies the shared normalization policy to one block of probabilities.
void check_normalized(std::span<double> probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream msg;
      msg << what << ": entries must be finite and nonnegative (got " << p
          << ")";
      throw InvalidDistribution(msg.str());
    }
    sum += p;
  }
  const double drift = std::abs(sum - 1.0);
  if (drift <= kNormTolerance) return;
  if (drift <= kRenormTolerance) {
    for (double& p : probs) p /= sum;
    return;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << what << ": total mass " << sum << " is not 1";
  throw InvalidDistribution(msg.str());
}

template <typename T>
void check_shape(const Alphabet& x, const Alphabet& y, const Matrix<T>& m,
                 const char* what) {
  if (m.rows() != x.size() || m.cols() != y.size()) {
    std::ostringstream msg;
    msg << what << ": matrix is " << m.rows() << "x" << m.cols()
        << " but alphabets are " << x.size() << "x" << y.size();
    throw ShapeMismatch(msg.str());
  }
}

void require_same(const Alphabet& a, const Alphabet& b, const char* what) {
  if (!(a == b)) throw ShapeMismatch(std::string(what) + ": alphabets differ");
}

}  // namespace

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> labels)
    : Alphabet(std::move(labels), {}) {}

Alphabet::Alphabet(std::vector<std::string> labels, std::vector<double> values) {
  if (labels.empty()) throw InvalidArgument("alphabet must not be empty");
  std::unordered_set<std::string_view> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw InvalidArgument("duplicate alphabet label '" + l + "'");
    }
  }
  if (!values.empty() && values.size() != labels.size()) {
    throw InvalidArgument("alphabet numeric values do not match label count");
  }
  if (values.empty()) {
    // Parse labels eagerly; keep the embedding only if every label parses.
    std::vector<double> parsed;
    parsed.reserve(labels.size());
    for (const auto& l : labels) {
      auto v = parse_number(l);
      if (!v) {
        parsed.clear();
        break;
      }
      parsed.push_back(*v);
    }
    values = std::move(parsed);
  }
  data_ = std::make_shared<const Data>(Data{std::move(labels), std::move(values)});
}

Alphabet Alphabet::indexed(std::size_t n) {
  std::vector<std::string> labels;
  std::vector<double> values;
  labels.reserve(n);
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::to_string(i));
    values.push_back(static_cast<double>(i));
  }
  return Alphabet(std::move(labels), std::move(values));
}

Alphabet Alphabet::numeric(std::span<const double> values, int precision) {
  std::vector<std::string> labels;
  labels.reserve(values.size());
  for (double v : values) labels.push_back(format_value(v, precision));
  return Alphabet(std::move(labels),
                  std::vector<double>(values.begin(), values.end()));
}

std::optional<std::size_t> Alphabet::find(std::string_view label) const {
  const auto& ls = data_->labels;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (ls[i] == label) return i;
  }
  return std::nullopt;
}

bool Alphabet::has_numeric_values() const noexcept {
  return !data_->values.empty();
}

std::vector<double> Alphabet::numeric_values() const {
  if (data_->values.empty()) {
    throw NonNumericAlphabet("alphabet labels carry no numeric values");
  }
  return data_->values;
}

bool operator==(const Alphabet& a, const Alphabet& b) {
  return a.data_ == b.data_ || a.data_->labels == b.data_->labels;
}

// ---------------------------------------------------------------------------
// Containers

Pmf::Pmf(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(std::move(alphabet)), probs_(std::move(probs)) {
  if (probs_.size() != alphabet_.size()) {
    throw ShapeMismatch("pmf: probability vector does not match alphabet");
  }
  check_normalized(probs_, "pmf");
}

Pmf Pmf::uniform(Alphabet alphabet) {
  const std::size_t n = alphabet.size();
  return Pmf(std::move(alphabet),
             std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::from_weights(Alphabet alphabet, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidDistribution("pmf weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidDistribution("pmf weights sum to zero");
  for (double& w : weights) w /= total;
  return Pmf(std::move(alphabet), std::move(weights));
}

CountMatrix::CountMatrix(Alphabet x, Alphabet y, Matrix<std::uint64_t> counts)
    : x_(std::move(x)), y_(std::move(y)), counts_(std::move(counts)) {
  check_shape(x_, y_, counts_, "count matrix");
}

std::vector<double> CountMatrix::row_totals() const {
  std::vector<double> totals(counts_.rows(), 0.0);
  for (std::size_t r = 0; r < counts_.rows(); ++r) {
    for (auto c : counts_.row(r)) totals[r] += static_cast<double>(c);
  }
  return totals;
}

WeightMatrix::WeightMatrix(Alphabet x, Alphabet y, Matrix<double> weights)
    : x_(std::move(x)), y_(std::move(y)), weights_(std::move(weights)) {
  check_shape(x_, y_, weights_, "weight matrix");
  for (double w : weights_.flat()) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("weight matrix entries must be finite and >= 0");
    }
  }
}

std::vector<double> WeightMatrix::row_totals() const {
  std::vector<double> totals(weights_.rows(), 0.0);
  for (std::size_t r = 0; r < weights_.rows(); ++r) {
    for (double w : weights_.row(r)) totals[r] += w;
  }
  return totals;
}

JointDist::JointDist(Alphabet x, Alphabet y, Matrix<double> probs)
    : x_(std::move(x)), y_(std::move(y)), probs_(std::move(probs)) {
  check_shape(x_, y_, probs_, "joint distribution");
  check_normalized(probs_.flat(), "joint distribution");
}

Strategy::Strategy(Alphabet x, Alphabet y, Matrix<double> rows)
    : x_(std::move(x)), y_(std::move(y)), rows_(std::move(rows)) {
  check_shape(x_, y_, rows_, "strategy");
  for (std::size_t r = 0; r < rows_.rows(); ++r) {
    check_normalized(rows_.row(r), "strategy row");
  }
}

DistortionMatrix::DistortionMatrix(Alphabet x, Alphabet y, Matrix<double> values)
    : x_(std::move(x)), y_(std::move(y)), values_(std::move(values)) {
  check_shape(x_, y_, values_, "distortion matrix");
  for (double v : values_.flat()) {
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "distortion entries must be finite and nonnegative (got " << v
          << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Measures

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double q : p.probs()) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return h;
}

double mutual_information(const JointDist& joint) {
  const auto& m = joint.probs();
  std::vector<double> px(m.rows(), 0.0);
  std::vector<double> py(m.cols(), 0.0);
  for (std::size_t x = 0; x < m.rows(); ++x) {
    for (std::size_t y = 0; y < m.cols(); ++y) {
      px[x] += m(x, y);
      py[y] += m(x, y);
    }
  }
  double mi = 0.0;
  for (std::size_t x = 0; x < m.rows(); ++x) {
    for (std::size_t y = 0; y < m.cols(); ++y) {
      const double p = m(x, y);
      if (p > 0.0) mi += p * std::log2(p / (px[x] * py[y]));
    }
  }
  // Rounding can leave a tiny negative value for independent joints.
  return mi < 0.0 ? 0.0 : mi;
}

JointDist laplace_smooth(const CountMatrix& counts) {
  const auto& c = counts.counts();
  Matrix<double> probs(c.rows(), c.cols());
  long double total = 0.0L;
  for (auto v : c.flat()) total += static_cast<long double>(v) + 1.0L;
  for (std::size_t i = 0; i < c.flat().size(); ++i) {
    probs.flat()[i] = static_cast<double>(
        (static_cast<long double>(c.flat()[i]) + 1.0L) / total);
  }
  return JointDist(counts.x_alphabet(), counts.y_alphabet(), std::move(probs));
}

JointDist laplace_smooth(const WeightMatrix& weights) {
  const auto& w = weights.weights();
  Matrix<double> probs(w.rows(), w.cols());
  long double total = 0.0L;
  for (double v : w.flat()) total += static_cast<long double>(v) + 1.0L;
  for (std::size_t i = 0; i < w.flat().size(); ++i) {
    probs.flat()[i] =
        static_cast<double>((static_cast<long double>(w.flat()[i]) + 1.0L) / total);
  }
  return JointDist(weights.x_alphabet(), weights.y_alphabet(), std::move(probs));
}

Pmf marginal_x(const JointDist& joint) {
  const auto& m = joint.probs();
  std::vector<double> px(m.rows(), 0.0);
  for (std::size_t x = 0; x < m.rows(); ++x) {
    for (double p : m.row(x)) px[x] += p;
  }
  return Pmf(joint.x_alphabet(), std::move(px));
}

Pmf marginal_y(const JointDist& joint) {
  const auto& m = joint.probs();
  std::vector<double> py(m.cols(), 0.0);
  for (std::size_t x = 0; x < m.rows(); ++x) {
    for (std::size_t y = 0; y < m.cols(); ++y) py[y] += m(x, y);
  }
  return Pmf(joint.y_alphabet(), std::move(py));
}

Strategy conditional_y_given_x(const JointDist& joint) {
  const auto& m = joint.probs();
  Matrix<double> rows(m.rows(), m.cols());
  for (std::size_t x = 0; x < m.rows(); ++x) {
    double total = 0.0;
    for (double p : m.row(x)) total += p;
    if (!(total > 0.0)) {
      throw ZeroRowMass("row '" + joint.x_alphabet().label(x) +
                        "' of the joint distribution has zero mass; smooth "
                        "the counts first");
    }
    for (std::size_t y = 0; y < m.cols(); ++y) rows(x, y) = m(x, y) / total;
  }
  return Strategy(joint.x_alphabet(), joint.y_alphabet(), std::move(rows));
}

JointDist compose_joint(const Pmf& p_x, const Strategy& strategy) {
  require_same(p_x.alphabet(), strategy.x_alphabet(), "compose_joint");
  const auto& s = strategy.rows();
  Matrix<double> probs(s.rows(), s.cols());
  for (std::size_t x = 0; x < s.rows(); ++x) {
    for (std::size_t y = 0; y < s.cols(); ++y) probs(x, y) = p_x[x] * s(x, y);
  }
  return JointDist(strategy.x_alphabet(), strategy.y_alphabet(),
                   std::move(probs));
}

double expected_distortion(const JointDist& joint, const DistortionMatrix& d) {
  require_same(joint.x_alphabet(), d.x_alphabet(), "expected_distortion");
  require_same(joint.y_alphabet(), d.y_alphabet(), "expected_distortion");
  const auto p = joint.probs().flat();
  const auto v = d.values().flat();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] * v[i];
  return total;
}

DistortionKind parse_distortion_kind(std::string_view name) {
  if (name == "hamming") return DistortionKind::hamming;
  if (name == "squared") return DistortionKind::squared;
  if (name == "absolute") return DistortionKind::absolute;
  throw InvalidArgument("unknown distortion kind '" + std::string(name) + "'");
}

std::string_view to_string(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::hamming:
      return "hamming";
    case DistortionKind::squared:
      return "squared";
    case DistortionKind::absolute:
      return "absolute";
  }
  return "unknown";
}

DistortionMatrix standard_distortion(DistortionKind kind, const Alphabet& x,
                                     const Alphabet& y) {
  Matrix<double> values(x.size(), y.size());
  if (kind == DistortionKind::hamming) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        values(i, j) = x.label(i) == y.label(j) ? 0.0 : 1.0;
      }
    }
    return DistortionMatrix(x, y, std::move(values));
  }
  const auto xv = x.numeric_values();
  const auto yv = y.numeric_values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double diff = xv[i] - yv[j];
      values(i, j) = kind == DistortionKind::squared ? diff * diff
                                                     : std::abs(diff);
    }
  }
  return DistortionMatrix(x, y, std::move(values));
}

}  // namespace ratelens
