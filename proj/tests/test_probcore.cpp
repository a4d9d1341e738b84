#include <cmath>
#include <limits>

#include "doctest.h"
#include "gen.hpp"
#include "ratelens/error.hpp"
#include "ratelens/probcore.hpp"

using namespace ratelens;
using gen::mat;

namespace {

JointDist joint2(Matrix<double> m) {
  return {Alphabet::indexed(m.rows()), Alphabet::indexed(m.cols()), std::move(m)};
}

CountMatrix counts2(Matrix<std::uint64_t> m) {
  return {Alphabet::indexed(m.rows()), Alphabet::indexed(m.cols()), std::move(m)};
}

// Independent evaluation: -sum p log2 p.
double entropy_oracle(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace

TEST_CASE("alphabet") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), InvalidArgument);
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{}), InvalidArgument);
  const Alphabet a({"0.5", "1.5"});
  REQUIRE(a.has_numeric_values());
  CHECK(a.numeric_values()[1] == 1.5);
  CHECK_THROWS_AS(Alphabet({"left", "right"}).numeric_values(), NonNumericAlphabet);
  CHECK(a.find("1.5") == 1u);
  CHECK_FALSE(a.find("2").has_value());
  CHECK(Alphabet::indexed(3) == Alphabet({"0", "1", "2"}));
}

TEST_CASE("pmf normalization policy") {
  const auto ab = Alphabet::indexed(2);
  CHECK_NOTHROW(Pmf(ab, {0.5, 0.5}));
  const Pmf drift(ab, {0.5, 0.5 + 5e-10});
  CHECK(drift[0] + drift[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Pmf(ab, {0.5, 0.6}), InvalidDistribution);
  CHECK_THROWS_AS(Pmf(ab, {1.5, -0.5}), InvalidDistribution);
  CHECK_THROWS_AS(Pmf(ab, {1.0}), ShapeMismatch);
  CHECK_THROWS_AS(Pmf::from_weights(ab, {0.0, 0.0}), InvalidDistribution);
}

TEST_CASE("entropy examples") {
  CHECK(entropy(Pmf::uniform(Alphabet::indexed(4))) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(entropy(Pmf(Alphabet::indexed(1), {1.0})) == 0.0);
  CHECK(entropy(Pmf(Alphabet::indexed(2), {0.25, 0.75})) ==
        doctest::Approx(0.8112781244591328).epsilon(1e-14));
}

TEST_CASE("entropy bounds") {
  gen::Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const Pmf p = gen::pmf(rng, n, 0.3);
    const double h = entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(n)) + 1e-12);
    CHECK(h == doctest::Approx(entropy_oracle(p.probs())).epsilon(1e-12));
  }
}

TEST_CASE("mutual information examples") {
  CHECK(mutual_information(joint2(mat({{0.4, 0.1}, {0.1, 0.4}}))) ==
        doctest::Approx(0.27807190511263774).epsilon(1e-13));
  CHECK(mutual_information(joint2(mat({{0.1, 0.3}, {0.15, 0.45}}))) ==
        doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t n : {2u, 3u, 8u}) {
    Matrix<double> m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0 / static_cast<double>(n);
    CHECK(mutual_information(joint2(std::move(m))) ==
          doctest::Approx(std::log2(static_cast<double>(n))).epsilon(1e-13));
  }
}

TEST_CASE("mutual information properties") {
  gen::Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t nx = 1 + rng() % 6;
    const std::size_t ny = 1 + rng() % 6;
    const JointDist j = gen::joint(rng, nx, ny);
    const double mi = mutual_information(j);
    CHECK(mi >= 0.0);
    // H(X) + H(Y) - H(X,Y)
    const Pmf flat = Pmf::from_weights(Alphabet::indexed(nx * ny),
                                       {j.probs().flat().begin(), j.probs().flat().end()});
    CHECK(mi == doctest::Approx(entropy(marginal_x(j)) + entropy(marginal_y(j)) - entropy(flat))
                    .epsilon(1e-9));

    const Pmf px = marginal_x(j);
    const Pmf py = marginal_y(j);
    Matrix<double> prod(nx, ny);
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < ny; ++y) prod(x, y) = px[x] * py[y];
    }
    CHECK(std::abs(mutual_information(joint2(std::move(prod)))) <= 1e-10);
  }
}

TEST_CASE("laplace smoothing examples") {
  const auto j = laplace_smooth(counts2(mat<std::uint64_t>({{0, 1}, {1, 2}})));
  CHECK(j(0, 0) == 1.0 / 8);
  CHECK(j(0, 1) == 2.0 / 8);
  CHECK(j(1, 0) == 2.0 / 8);
  CHECK(j(1, 1) == 3.0 / 8);
  const auto z = laplace_smooth(counts2(Matrix<std::uint64_t>(2, 2, 0)));
  for (double v : z.probs().flat()) CHECK(v == 0.25);
  CHECK(laplace_smooth(counts2(mat<std::uint64_t>({{9}})))(0, 0) == 1.0);
}

TEST_CASE("laplace smoothing properties") {
  gen::Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t nx = 1 + rng() % 7;
    const std::size_t ny = 1 + rng() % 7;
    const CountMatrix c = gen::counts(rng, nx, ny, 1000, 0.3);
    const JointDist j = laplace_smooth(c);
    double total = 0.0;
    for (auto v : c.counts().flat()) total += static_cast<double>(v);
    const double floor = 1.0 / (total + static_cast<double>(nx * ny));
    double sum = 0.0;
    for (double v : j.probs().flat()) {
      CHECK(v >= floor * (1 - 1e-12));
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }

  // Large counts converge to the empirical ratios.
  const auto base = mat<std::uint64_t>({{1, 2, 0}, {3, 0, 4}});
  Matrix<std::uint64_t> big = base;
  for (auto& v : big.flat()) v *= 1'000'000;
  const auto j = laplace_smooth(counts2(big));
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(j.probs().flat()[i] - static_cast<double>(base.flat()[i]) / 10.0) <= 1e-4);
  }
}

TEST_CASE("marginals and conditionals") {
  const auto j = joint2(mat({{0.4, 0.1}, {0.1, 0.4}}));
  CHECK(marginal_x(j)[0] == doctest::Approx(0.5));
  CHECK(marginal_y(j)[1] == doctest::Approx(0.5));
  const Strategy s = conditional_y_given_x(j);
  CHECK(s(0, 0) == doctest::Approx(0.8));
  CHECK(s(1, 0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(conditional_y_given_x(joint2(mat({{0.5, 0.5}, {0.0, 0.0}}))), ZeroRowMass);

  gen::Rng rng(4);
  const Pmf px = gen::pmf(rng, 4);
  const JointDist jj = gen::joint(rng, 4, 3);
  const JointDist back = compose_joint(marginal_x(jj), conditional_y_given_x(jj));
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(back.probs().flat()[i] == doctest::Approx(jj.probs().flat()[i]).epsilon(1e-12));
  }
}

TEST_CASE("expected distortion") {
  const auto ham = standard_distortion(DistortionKind::hamming, Alphabet::indexed(2),
                                       Alphabet::indexed(2));
  CHECK(expected_distortion(joint2(mat({{0.5, 0.0}, {0.0, 0.5}})), ham) == 0.0);
  CHECK(expected_distortion(joint2(mat({{0.25, 0.25}, {0.25, 0.25}})), ham) == 0.5);
  CHECK(expected_distortion(joint2(mat({{0.4, 0.1}, {0.1, 0.4}})), ham) ==
        doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(expected_distortion(joint2(Matrix<double>(3, 2, 1.0 / 6)), ham), ShapeMismatch);

  gen::Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto j1 = gen::joint(rng, 3, 4);
    const auto j2 = gen::joint(rng, 3, 4);
    const auto d = gen::distortion(rng, 3, 4);
    Matrix<double> mix(3, 4);
    for (std::size_t i = 0; i < 12; ++i) {
      mix.flat()[i] = 0.3 * j1.probs().flat()[i] + 0.7 * j2.probs().flat()[i];
    }
    const double lhs = expected_distortion(joint2(std::move(mix)), d);
    const double rhs = 0.3 * expected_distortion(j1, d) + 0.7 * expected_distortion(j2, d);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("standard distortions") {
  const Alphabet x({"1", "3", "5"});
  const Alphabet y({"3", "5"});
  const auto ham = standard_distortion(DistortionKind::hamming, x, y);
  CHECK(ham(1, 0) == 0.0);
  CHECK(ham(0, 0) == 1.0);
  CHECK(standard_distortion(DistortionKind::squared, x, y)(1, 1) == 4.0);
  CHECK(standard_distortion(DistortionKind::absolute, x, y)(1, 1) == 2.0);
  CHECK_THROWS_AS(standard_distortion(DistortionKind::squared, Alphabet({"a"}), y),
                  NonNumericAlphabet);
  CHECK(parse_distortion_kind("absolute") == DistortionKind::absolute);
  CHECK(to_string(DistortionKind::squared) == "squared");
  CHECK_THROWS_AS(parse_distortion_kind("cosine"), InvalidArgument);
}

TEST_CASE("distortion matrix validation") {
  CHECK_THROWS_AS(DistortionMatrix(Alphabet::indexed(1), Alphabet::indexed(2), mat({{0.0, -1.0}})),
                  InvalidArgument);
  CHECK_THROWS_AS(DistortionMatrix(Alphabet::indexed(1), Alphabet::indexed(2),
                                   mat({{0.0, std::numeric_limits<double>::infinity()}})),
                  InvalidArgument);
}
