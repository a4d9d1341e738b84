#pragma once

// Monte Carlo model of chemotactic gradient sensing with local excitation,
// global inhibition (LEGI). The membrane is split into N equal sectors; a
// ligand source at sector s produces a cosine-shaped concentration profile,
// receptors bind independently (binomial), and the cell moves toward sector i
// with probability proportional to the LEGI response u_i.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ratelens/probcore.hpp"
#include "ratelens/rng.hpp"

namespace ratelens::legi {

struct LegiParams {
  double a = 220.0;    // maximum ligand concentration seen by the cell
  double b = 20.0;     // gradient strength
  double k_d = 200.0;  // dissociation constant
  std::int64_t r_t = 1000;      // receptors per sector
  std::size_t n_sectors = 100;
  int hill = 1;

  // a > 2b > 0 keeps the concentration positive on the whole membrane.
  void validate() const;
};

// theta_i = 2 pi i / N, i = 0..N-1.
std::vector<double> sector_angles(std::size_t n);
// Sector labels: angle in radians with 6 decimals.
Alphabet sector_alphabet(std::size_t n);

double ligand_concentration(double theta_i, double theta_s, const LegiParams& p);
double occupancy(double ligand, double k_d);

// f_i for every sector given the source sector.
std::vector<double> occupancy_profile(const LegiParams& p,
                                      std::size_t source_sector);

std::vector<std::int64_t> sample_complexes(rng::Xoshiro256& eng,
                                           const LegiParams& p,
                                           std::size_t source_sector);

// u_i = (c_i - min c)^h / mean_j (c_j - min c)^h. All-equal counts carry no
// directional information and map to u = 1 everywhere.
std::vector<double> legi_response(std::span<const std::int64_t> complexes,
                                  int hill);

// u_i / sum_j u_j. Throws InvalidArgument on negative or all-zero input.
Pmf movement_distribution(std::span<const double> response,
                          const Alphabet& sectors);

enum class SimMode {
  sample,      // draw one movement direction per trial, count it
  accumulate,  // add the whole movement distribution as fractional weight
};

SimMode parse_sim_mode(std::string_view name);
std::string_view to_string(SimMode mode);

struct SimConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  SimMode mode = SimMode::sample;
  // Prior over source sectors; uniform when empty.
  std::optional<std::vector<double>> source_prior;
  unsigned threads = 1;
  // Called with the completed fraction at every further 10%.
  std::function<void(double)> progress;
};

struct SimResult {
  SimMode mode = SimMode::sample;
  std::variant<CountMatrix, WeightMatrix> table;  // rows theta_s, cols theta_m
  double wall_seconds = 0.0;
};

// Deterministic for a fixed seed regardless of `threads`.
SimResult simulate(const LegiParams& p, const SimConfig& cfg);

// Unsmoothed empirical P(theta_m | theta_s). Throws ZeroRowMass when some
// source sector was never drawn.
Strategy empirical_strategy(const SimResult& sim);

}  // namespace ratelens::legi
