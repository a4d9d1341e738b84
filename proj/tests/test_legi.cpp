#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gen.hpp"
#include "ratelens/analysis.hpp"
#include "ratelens/error.hpp"
#include "ratelens/legi.hpp"

using namespace ratelens;
using std::numbers::pi;

namespace {

const CountMatrix& counts_of(const legi::SimResult& r) { return std::get<CountMatrix>(r.table); }
const WeightMatrix& weights_of(const legi::SimResult& r) { return std::get<WeightMatrix>(r.table); }

legi::SimResult run(std::uint64_t trials, std::uint64_t seed, legi::SimMode mode,
                    unsigned threads = 1, const legi::LegiParams& p = {}) {
  legi::SimConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.mode = mode;
  cfg.threads = threads;
  return legi::simulate(p, cfg);
}

}  // namespace

TEST_CASE("parameters") {
  CHECK_NOTHROW(legi::LegiParams{}.validate());
  legi::LegiParams p;
  p.a = 30;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("positive"), InvalidArgument);
  p = {};
  p.a = 40;  // a == 2b
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.k_d = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.r_t = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.n_sectors = 1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.hill = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("geometry") {
  const auto th = legi::sector_angles(100);
  REQUIRE(th.size() == 100);
  CHECK(th[0] == 0.0);
  CHECK(th[25] == doctest::Approx(pi / 2));
  CHECK(th[99] < 2 * pi);
  const auto ab = legi::sector_alphabet(100);
  CHECK(ab.label(1) == "0.062832");
  CHECK(ab.label(50) == "3.141593");
}

TEST_CASE("ligand and occupancy") {
  const legi::LegiParams p;
  CHECK(legi::ligand_concentration(1.0, 1.0, p) == doctest::Approx(220.0));
  CHECK(legi::ligand_concentration(pi + 0.3, 0.3, p) == doctest::Approx(180.0));
  CHECK(legi::ligand_concentration(pi / 2, 0.0, p) == doctest::Approx(200.0));
  CHECK(legi::occupancy(200, 200) == 0.5);
  CHECK(legi::occupancy(220, 200) == doctest::Approx(11.0 / 21).epsilon(1e-15));
  CHECK(legi::occupancy(0, 200) == 0.0);

  for (std::size_t s : {0u, 13u, 77u}) {
    const auto f = legi::occupancy_profile(p, s);
    CHECK(std::max_element(f.begin(), f.end()) - f.begin() == static_cast<long>(s));
    CHECK(std::min_element(f.begin(), f.end()) - f.begin() == static_cast<long>((s + 50) % 100));
    // Rotating the source rotates the profile.
    const auto f0 = legi::occupancy_profile(p, 0);
    for (std::size_t i = 0; i < 100; ++i) CHECK(f[(i + s) % 100] == doctest::Approx(f0[i]));
  }
}

TEST_CASE("binomial tables") {
  rng::Xoshiro256 eng(5);
  const auto none = rng::binomial_table(1000, 0.0);
  const auto all = rng::binomial_table(1000, 1.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(none(eng) == 0);
    CHECK(all(eng) == 1000);
  }
  // Mean of 1e5 draws against n p; sd of the mean is sqrt(n p q / 1e5).
  const double p = 11.0 / 21.0;
  const auto t = rng::binomial_table(1000, p);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const double k = static_cast<double>(t(eng));
    sum += k;
    sq += k * k;
  }
  const double mean = sum / kDraws;
  const double var = sq / kDraws - mean * mean;
  const double se = std::sqrt(1000 * p * (1 - p) / kDraws);
  CHECK(std::abs(mean - 1000 * p) <= 4 * se);
  CHECK(var == doctest::Approx(1000 * p * (1 - p)).epsilon(0.03));
  CHECK_THROWS_AS(rng::binomial_table(10, 1.5), InvalidArgument);
}

TEST_CASE("sampled complexes stay in range") {
  rng::Xoshiro256 eng(6);
  const legi::LegiParams p;
  for (int t = 0; t < 100; ++t) {
    for (auto c : legi::sample_complexes(eng, p, t % 100)) {
      CHECK(c >= 0);
      CHECK(c <= 1000);
    }
  }
}

TEST_CASE("response examples") {
  const std::vector<std::int64_t> flat{5, 5, 5, 5};
  for (double u : legi::legi_response(flat, 1)) CHECK(u == 1.0);
  const std::vector<std::int64_t> c{0, 1, 2, 1};
  const auto u1 = legi::legi_response(c, 1);
  CHECK(u1 == std::vector<double>{0, 1, 2, 1});
  const auto u2 = legi::legi_response(c, 2);
  CHECK(u2[0] == 0.0);
  CHECK(u2[1] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(u2[2] == doctest::Approx(8.0 / 3).epsilon(1e-15));
}

TEST_CASE("response sums to N") {
  gen::Rng rng(30);
  std::uniform_int_distribution<std::int64_t> c(0, 1000);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::int64_t> v(2 + rng() % 150);
    for (auto& x : v) x = c(rng);
    const int h = 1 + static_cast<int>(rng() % 40);
    const auto u = legi::legi_response(v, h);
    double s = 0.0;
    for (double x : u) {
      CHECK(std::isfinite(x));
      s += x;
    }
    CHECK(std::abs(s - static_cast<double>(v.size())) <= 1e-9);
  }
}

TEST_CASE("movement distribution") {
  const auto ab = Alphabet::indexed(4);
  const Pmf m = legi::movement_distribution(std::vector<double>{0, 1, 2, 1}, ab);
  CHECK(m[0] == 0.0);
  CHECK(m[2] == 0.5);
  const Pmf flat = legi::movement_distribution(std::vector<double>{3, 3, 3, 3}, ab);
  for (double v : flat.probs()) CHECK(v == 0.25);
  CHECK(legi::movement_distribution(std::vector<double>{0, 0, 7, 0}, ab)[2] == 1.0);
  CHECK_THROWS_AS(legi::movement_distribution(std::vector<double>{0, 0, 0, 0}, ab), InvalidArgument);
  CHECK_THROWS_AS(legi::movement_distribution(std::vector<double>{1, -1, 0, 0}, ab), InvalidArgument);
}

TEST_CASE("modes") {
  CHECK(legi::parse_sim_mode("accumulate") == legi::SimMode::accumulate);
  CHECK(legi::to_string(legi::SimMode::sample) == "sample");
  CHECK_THROWS_AS(legi::parse_sim_mode("both"), InvalidArgument);
}

TEST_CASE("simulation determinism") {
  const auto a = run(50'000, 42, legi::SimMode::sample);
  const auto b = run(50'000, 42, legi::SimMode::sample);
  CHECK(counts_of(a).counts() == counts_of(b).counts());
  CHECK_FALSE(counts_of(a).counts() == counts_of(run(50'000, 43, legi::SimMode::sample)).counts());
  for (unsigned t : {4u, 8u}) {
    CHECK(counts_of(run(50'000, 42, legi::SimMode::sample, t)).counts() == counts_of(a).counts());
  }
  const auto w1 = run(50'000, 7, legi::SimMode::accumulate, 1);
  const auto w3 = run(50'000, 7, legi::SimMode::accumulate, 3);
  CHECK(weights_of(w1).weights() == weights_of(w3).weights());

  std::uint64_t total = 0;
  for (auto v : counts_of(a).counts().flat()) total += v;
  CHECK(total == 50'000);
  const auto rows = weights_of(w1).row_totals();
  double wt = 0.0;
  for (double r : rows) wt += r;
  CHECK(wt == doctest::Approx(50'000.0).epsilon(1e-12));
}

TEST_CASE("progress and priors") {
  legi::SimConfig cfg;
  cfg.trials = 20'000;
  std::vector<double> seen;
  cfg.progress = [&](double f) { seen.push_back(f); };
  std::vector<double> prior(100, 0.0);
  prior[3] = 1.0;
  prior[60] = 3.0;
  cfg.source_prior = prior;
  const auto r = legi::simulate({}, cfg);
  CHECK(seen.size() == 10);
  CHECK(seen.back() == 1.0);
  const auto rows = counts_of(r).row_totals();
  CHECK(rows[0] == 0.0);
  CHECK(rows[3] + rows[60] == 20'000.0);
  CHECK(rows[60] / 20'000.0 == doctest::Approx(0.75).epsilon(0.03));
  CHECK_THROWS_AS(legi::empirical_strategy(r), ZeroRowMass);

  cfg.source_prior = std::vector<double>(99, 1.0);
  CHECK_THROWS_AS(legi::simulate({}, cfg), InvalidArgument);
}

TEST_CASE("sample and accumulate agree") {
  const auto s = run(1'000'000, 11, legi::SimMode::sample);
  const auto a = run(1'000'000, 12, legi::SimMode::accumulate);
  const auto& c = counts_of(s);
  const auto& w = weights_of(a);
  const auto cn = c.row_totals();
  const auto wn = w.row_totals();
  double worst = 0.0;
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t m = 0; m < 100; ++m) {
      const double ps = static_cast<double>(c(r, m)) / cn[r];
      const double pa = w(r, m) / wn[r];
      const double sd = std::sqrt(std::max(pa * (1 - pa), 1e-6) / cn[r]);
      worst = std::max(worst, std::abs(ps - pa) / sd);
    }
  }
  CHECK(worst <= 5.0);
}

TEST_CASE("circular symmetry of the simulated strategy") {
  const auto sim = run(1'000'000, 13, legi::SimMode::sample);
  const auto& c = counts_of(sim);
  // Pool aligned counts over even and over odd source sectors.
  std::vector<double> pool[2] = {std::vector<double>(100, 0.0), std::vector<double>(100, 0.0)};
  double n[2] = {0, 0};
  for (std::size_t s = 0; s < 100; ++s) {
    for (std::size_t m = 0; m < 100; ++m) {
      pool[s % 2][analysis::aligned_index(s, m, 100)] += static_cast<double>(c(s, m));
      n[s % 2] += static_cast<double>(c(s, m));
    }
  }
  for (std::size_t j = 0; j < 100; ++j) {
    const double p0 = pool[0][j] / n[0];
    const double p1 = pool[1][j] / n[1];
    const double pbar = (pool[0][j] + pool[1][j]) / (n[0] + n[1]);
    const double sd = std::sqrt(pbar * (1 - pbar) * (1 / n[0] + 1 / n[1]));
    CHECK(std::abs(p0 - p1) <= 4 * sd);
  }
}
