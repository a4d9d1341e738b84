#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gen.hpp"
#include "ratelens/analysis.hpp"
#include "ratelens/error.hpp"

using namespace ratelens;
using std::numbers::pi;

namespace {

DistortionMatrix square(Matrix<double> m) {
  const auto ab = legi::sector_alphabet(m.rows());
  return {ab, ab, std::move(m)};
}

DistortionMatrix circulant(const std::vector<double>& first) {
  const std::size_t n = first.size();
  Matrix<double> m(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < n; ++k) m(s, (s + k) % n) = first[k];
  }
  return square(std::move(m));
}

}  // namespace

TEST_CASE("aligned index") {
  CHECK(analysis::aligned_index(1, 3, 4) == 0);
  CHECK(analysis::aligned_index(1, 0, 4) == 1);
  CHECK(analysis::aligned_index(1, 1, 4) == 2);
  CHECK(analysis::aligned_index(1, 2, 4) == 3);
  CHECK(analysis::aligned_index(3, 3, 7) == 3);
}

TEST_CASE("alignment examples") {
  gen::Rng rng(40);
  Matrix<double> m(4, 4);
  for (auto& v : m.flat()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto prof = analysis::cyclic_align(square(m));
  CHECK(prof.per_row(1, 0) == m(1, 3));
  CHECK(prof.per_row(1, 1) == m(1, 0));
  CHECK(prof.per_row(1, 2) == m(1, 1));
  CHECK(prof.per_row(1, 3) == m(1, 2));
  CHECK(prof.shifts[2] == doctest::Approx(pi));

  const auto c = analysis::cyclic_align(circulant({0.0, 1.0, 3.0, 2.5, 0.5}));
  for (std::size_t s = 1; s < 5; ++s) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(c.per_row(s, j) == c.per_row(0, j));
  }
  CHECK(c.mean == std::vector<double>(c.per_row.row(0).begin(), c.per_row.row(0).end()));

  Matrix<double> id(6, 6, 1.0);
  for (std::size_t i = 0; i < 6; ++i) id(i, i) = 0.0;
  const auto ip = analysis::cyclic_align(square(id));
  CHECK(ip.mean[3] == 0.0);
  CHECK(ip.mean[0] == 1.0);

  analysis::AlignedProfile two{Alphabet::indexed(2), {0.0, pi}, gen::mat({{0.0, 2.0}, {2.0, 0.0}}), {}};
  CHECK(analysis::mean_profile(two) == std::vector<double>{1.0, 1.0});
  analysis::AlignedProfile same{Alphabet::indexed(2), {0.0, pi}, gen::mat({{0.5, 3.0}, {0.5, 3.0}}), {}};
  CHECK(analysis::mean_profile(same) == std::vector<double>{0.5, 3.0});

  CHECK_THROWS_AS(analysis::cyclic_align(DistortionMatrix(Alphabet::indexed(2), Alphabet::indexed(3),
                                                          Matrix<double>(2, 3, 0.0))),
                  NotSquare);
  CHECK_THROWS_AS(analysis::cyclic_align(DistortionMatrix(Alphabet({"a", "b"}), Alphabet({"b", "a"}),
                                                          Matrix<double>(2, 2, 0.0))),
                  NotSquare);
}

TEST_CASE("unalign inverts alignment") {
  gen::Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 30;
    Matrix<double> m(n, n);
    for (auto& v : m.flat()) v = std::uniform_real_distribution<double>(0, 5)(rng);
    const auto prof = analysis::cyclic_align(square(m));
    CHECK(analysis::unalign(prof) == m);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += prof.per_row(r, j);
      CHECK(prof.mean[j] == doctest::Approx(s / static_cast<double>(n)).epsilon(1e-13));
    }
  }
}

TEST_CASE("profile summary on a cosine valley") {
  const std::size_t n = 100;
  std::vector<double> mean(n);
  for (std::size_t j = 0; j < n; ++j) mean[j] = 1.0 + std::cos(2 * pi * static_cast<double>(j) / n);
  const auto s = analysis::summarize_profile(mean);
  CHECK(s.min_index == 50);
  CHECK(s.peak == doctest::Approx(2.0));
  CHECK(s.minimum == doctest::Approx(0.0));
  CHECK(s.half_height_width == doctest::Approx(pi).epsilon(1e-9));

  for (double v : analysis::mirror_differences(mean)) CHECK(std::abs(v) <= 1e-12);

  std::vector<double> narrow(n);
  for (std::size_t j = 0; j < n; ++j) narrow[j] = std::pow(mean[j] / 2.0, 0.25);
  CHECK(analysis::summarize_profile(narrow).half_height_width < s.half_height_width);
}

TEST_CASE("hill sweep pipeline") {
  legi::SimConfig cfg;
  cfg.trials = 100'000;
  cfg.seed = 3;
  cfg.mode = legi::SimMode::accumulate;
  const auto entries = analysis::hill_sweep({}, {1, 3}, cfg);
  REQUIRE(entries.size() == 2);
  CHECK(entries[1].hill == 3);
  for (const auto& e : entries) {
    CHECK(e.summary.min_index >= 48);
    CHECK(e.summary.min_index <= 52);
    CHECK(e.profile.mean[0] > e.profile.mean[25]);
    CHECK(e.profile.mean[25] > e.profile.mean[50]);
  }
  CHECK(entries[1].summary.peak > entries[0].summary.peak);
}
