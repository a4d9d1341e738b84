#include "ratelens/legi.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "ratelens/error.hpp"

namespace ratelens::legi {
namespace {

// Trials per work unit. Depends on the trial count only, never on the worker
// count, so the merge order (and floating-point sums) are fixed.
std::uint64_t chunk_size_for(std::uint64_t trials) {
  constexpr std::uint64_t kMinChunk = 4096;
  constexpr std::uint64_t kMaxChunks = 256;
  return std::max(kMinChunk, (trials + kMaxChunks - 1) / kMaxChunks);
}

double int_pow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Differences are scaled by their maximum before the power so large Hill
// coefficients cannot overflow; the mean normalization cancels the scale.
void response_into(std::span<const std::int64_t> c, int hill,
                   std::span<double> u) {
  const auto [lo_it, hi_it] = std::minmax_element(c.begin(), c.end());
  const std::int64_t lo = *lo_it;
  if (*hi_it == lo) {
    std::fill(u.begin(), u.end(), 1.0);
    return;
  }
  const double inv_span = 1.0 / static_cast<double>(*hi_it - lo);
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    u[i] = int_pow(static_cast<double>(c[i] - lo) * inv_span, hill);
    total += u[i];
  }
  const double scale = static_cast<double>(c.size()) / total;
  for (double& v : u) v *= scale;
}

struct Worker {
  std::vector<std::int64_t> complexes;
  std::vector<double> response;
  std::vector<double> cumulative;
};

class Simulator {
 public:
  Simulator(const LegiParams& p, const SimConfig& cfg) : p_(p), cfg_(cfg) {
    const std::size_t n = p_.n_sectors;
    const auto offsets = occupancy_profile(p_, 0);
    for (double f : offsets) binom_.push_back(rng::binomial_table(p_.r_t, f));

    std::vector<double> prior =
        cfg_.source_prior ? *cfg_.source_prior
                          : std::vector<double>(n, 1.0 / static_cast<double>(n));
    if (prior.size() != n) {
      throw InvalidArgument("source prior must have one entry per sector");
    }
    // Validates nonnegativity and normalizes.
    const Pmf prior_pmf = Pmf::from_weights(Alphabet::indexed(n), prior);
    prior_cum_.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += prior_pmf[i];
      prior_cum_[i] = acc;
    }
  }

  Worker make_worker() const {
    const std::size_t n = p_.n_sectors;
    return Worker{std::vector<std::int64_t>(n), std::vector<double>(n),
                  std::vector<double>(n)};
  }

  void run_trial(std::uint64_t trial, Worker& w, Matrix<double>& acc) const {
    const std::size_t n = p_.n_sectors;
    rng::Xoshiro256 eng = rng::stream_engine(cfg_.seed, trial);
    const std::size_t s = rng::sample_index(prior_cum_, rng::uniform01(eng));
    for (std::size_t i = 0; i < n; ++i) {
      w.complexes[i] = binom_[(i + n - s) % n](eng);
    }
    response_into(w.complexes, p_.hill, w.response);
    auto row = acc.row(s);
    if (cfg_.mode == SimMode::sample) {
      double run = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        run += w.response[i];
        w.cumulative[i] = run;
      }
      row[rng::sample_index(w.cumulative, rng::uniform01(eng))] += 1.0;
    } else {
      // sum(u) == N by construction of the response.
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) row[i] += w.response[i] * inv;
    }
  }

  void run_chunk(std::uint64_t chunk, std::uint64_t chunk_size, Worker& w,
                 Matrix<double>& acc) const {
    const std::uint64_t begin = chunk * chunk_size;
    const std::uint64_t end = std::min(cfg_.trials, begin + chunk_size);
    for (std::uint64_t t = begin; t < end; ++t) run_trial(t, w, acc);
  }

 private:
  const LegiParams& p_;
  const SimConfig& cfg_;
  // Complex-count samplers indexed by sector offset from the source; the
  // occupancy depends only on that offset.
  std::vector<rng::AliasTable> binom_;
  std::vector<double> prior_cum_;
};

void add_into(Matrix<double>& total, const Matrix<double>& part) {
  auto dst = total.flat();
  auto src = part.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

void LegiParams::validate() const {
  if (!(b > 0.0) || !(a > 2.0 * b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument(
        "LEGI parameters need a > 2b > 0 so the ligand concentration "
        "a - b(1 - cos(theta_i - theta_s)) stays positive on the membrane");
  }
  if (!(k_d > 0.0) || !std::isfinite(k_d)) {
    throw InvalidArgument("LEGI parameters need k_d > 0");
  }
  if (r_t < 1) throw InvalidArgument("LEGI parameters need r_t >= 1");
  if (n_sectors < 2) throw InvalidArgument("LEGI parameters need n_sectors >= 2");
  if (hill < 1) throw InvalidArgument("LEGI parameters need hill >= 1");
}

std::vector<double> sector_angles(std::size_t n) {
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = 2.0 * std::numbers::pi * static_cast<double>(i) /
               static_cast<double>(n);
  }
  return theta;
}

Alphabet sector_alphabet(std::size_t n) {
  const auto theta = sector_angles(n);
  return Alphabet::numeric(theta, 6);
}

double ligand_concentration(double theta_i, double theta_s, const LegiParams& p) {
  return p.a - p.b * (1.0 - std::cos(theta_i - theta_s));
}

double occupancy(double ligand, double k_d) {
  if (!(k_d > 0.0)) throw InvalidArgument("k_d must be > 0");
  if (!(ligand >= 0.0)) throw InvalidArgument("ligand must be >= 0");
  return ligand / (k_d + ligand);
}

std::vector<double> occupancy_profile(const LegiParams& p,
                                      std::size_t source_sector) {
  p.validate();
  if (source_sector >= p.n_sectors) {
    throw InvalidArgument("source sector out of range");
  }
  const auto theta = sector_angles(p.n_sectors);
  std::vector<double> f(p.n_sectors);
  for (std::size_t i = 0; i < p.n_sectors; ++i) {
    f[i] = occupancy(ligand_concentration(theta[i], theta[source_sector], p),
                     p.k_d);
  }
  return f;
}

std::vector<std::int64_t> sample_complexes(rng::Xoshiro256& eng,
                                           const LegiParams& p,
                                           std::size_t source_sector) {
  const auto f = occupancy_profile(p, source_sector);
  std::vector<std::int64_t> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    c[i] = rng::binomial_table(p.r_t, f[i])(eng);
  }
  return c;
}

std::vector<double> legi_response(std::span<const std::int64_t> complexes,
                                  int hill) {
  if (complexes.empty()) throw InvalidArgument("no sectors");
  if (hill < 1) throw InvalidArgument("hill must be >= 1");
  for (auto c : complexes) {
    if (c < 0) throw InvalidArgument("complex counts must be nonnegative");
  }
  std::vector<double> u(complexes.size());
  response_into(complexes, hill, u);
  return u;
}

Pmf movement_distribution(std::span<const double> response,
                          const Alphabet& sectors) {
  if (response.size() != sectors.size()) {
    throw ShapeMismatch("response length does not match sector alphabet");
  }
  try {
    return Pmf::from_weights(sectors,
                             std::vector<double>(response.begin(), response.end()));
  } catch (const InvalidDistribution& e) {
    throw InvalidArgument(std::string("LEGI response: ") + e.what());
  }
}

SimMode parse_sim_mode(std::string_view name) {
  if (name == "sample") return SimMode::sample;
  if (name == "accumulate") return SimMode::accumulate;
  throw InvalidArgument("unknown simulation mode '" + std::string(name) + "'");
}

std::string_view to_string(SimMode mode) {
  return mode == SimMode::sample ? "sample" : "accumulate";
}

SimResult simulate(const LegiParams& p, const SimConfig& cfg) {
  p.validate();
  if (cfg.trials < 1) throw InvalidArgument("trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = p.n_sectors;
  const Simulator sim(p, cfg);
  const std::uint64_t chunk = chunk_size_for(cfg.trials);
  const std::uint64_t n_chunks = (cfg.trials + chunk - 1) / chunk;

  Matrix<double> total(n, n, 0.0);
  std::uint64_t merged = 0;
  int reported_decile = 0;
  auto report = [&] {
    if (!cfg.progress) return;
    const int decile = static_cast<int>(10 * merged / n_chunks);
    while (reported_decile < decile) {
      ++reported_decile;
      cfg.progress(reported_decile / 10.0);
    }
  };

  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(cfg.threads, 1, n_chunks));
  if (workers == 1) {
    Worker w = sim.make_worker();
    Matrix<double> part(n, n);
    for (std::uint64_t k = 0; k < n_chunks; ++k) {
      part.fill(0.0);
      sim.run_chunk(k, chunk, w, part);
      add_into(total, part);
      ++merged;
      report();
    }
  } else {
    // Chunks complete out of order; they are merged strictly in index order.
    std::atomic<std::uint64_t> next{0};
    std::mutex mu;
    std::map<std::uint64_t, Matrix<double>> pending;
    std::exception_ptr failure;
    auto body = [&] {
      try {
        Worker w = sim.make_worker();
        for (std::uint64_t k = next++; k < n_chunks; k = next++) {
          Matrix<double> part(n, n, 0.0);
          sim.run_chunk(k, chunk, w, part);
          std::lock_guard lock(mu);
          pending.emplace(k, std::move(part));
          for (auto it = pending.find(merged); it != pending.end();
               it = pending.find(merged)) {
            add_into(total, it->second);
            pending.erase(it);
            ++merged;
            report();
          }
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n_chunks;
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  const Alphabet sectors = sector_alphabet(n);
  SimResult result{cfg.mode, WeightMatrix(sectors, sectors, Matrix<double>(n, n)),
                   0.0};
  if (cfg.mode == SimMode::sample) {
    Matrix<std::uint64_t> counts(n, n);
    for (std::size_t i = 0; i < n * n; ++i) {
      counts.flat()[i] = static_cast<std::uint64_t>(total.flat()[i]);
    }
    result.table = CountMatrix(sectors, sectors, std::move(counts));
  } else {
    result.table = WeightMatrix(sectors, sectors, std::move(total));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

Strategy empirical_strategy(const SimResult& sim) {
  return std::visit(
      [](const auto& table) {
        const std::size_t rows = table.x_alphabet().size();
        const std::size_t cols = table.y_alphabet().size();
        Matrix<double> m(rows, cols);
        for (std::size_t x = 0; x < rows; ++x) {
          double total = 0.0;
          for (std::size_t y = 0; y < cols; ++y) {
            total += static_cast<double>(table(x, y));
          }
          if (!(total > 0.0)) {
            throw ZeroRowMass("source sector '" + table.x_alphabet().label(x) +
                              "' has no trials");
          }
          for (std::size_t y = 0; y < cols; ++y) {
            m(x, y) = static_cast<double>(table(x, y)) / total;
          }
        }
        return Strategy(table.x_alphabet(), table.y_alphabet(), std::move(m));
      },
      sim.table);
}

}  // namespace ratelens::legi
