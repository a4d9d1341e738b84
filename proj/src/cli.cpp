#include "ratelens/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratelens/analysis.hpp"
#include "ratelens/apoptosis.hpp"
#include "ratelens/blahut.hpp"
#include "ratelens/csv.hpp"
#include "ratelens/error.hpp"
#include "ratelens/ibaa.hpp"
#include "ratelens/legi.hpp"
#include "ratelens/rng.hpp"

namespace ratelens::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Resource caps for command-line input; the library itself has no upper
// bounds.
constexpr std::int64_t kMaxApoptosisGrid = 10'000'000;
constexpr std::size_t kMaxSectors = 4096;
constexpr std::int64_t kMaxReceptors = 10'000'000;
constexpr int kMaxHill = 64;

class UsageError : public Error {
 public:
  using Error::Error;
};

class StrictFailure : public Error {
 public:
  using Error::Error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    T v{};
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

fs::path sidecar_path(const std::string& out) { return fs::path(out + ".json"); }

json to_json(const apoptosis::ApoptosisModel& m) {
  return {{"gamma", m.gamma},
          {"unit_scale", m.unit_scale},
          {"x_max", m.x_max},
          {"x_th", m.x_th},
          {"squared_denominator", m.squared_denominator}};
}

json to_json(const legi::LegiParams& p) {
  return {{"a", p.a},           {"b", p.b},
          {"k_d", p.k_d},       {"r_t", p.r_t},
          {"n_sectors", p.n_sectors}, {"hill", p.hill}};
}

// ---------------------------------------------------------------------------
// Shared option groups

struct ApoptosisOptions {
  apoptosis::ApoptosisModel model;
  std::string distortion = "hamming";

  void attach(CLI::App* app) {
    app->add_option("--gamma", model.gamma, "Exponential rate per unit_scale molecules");
    app->add_option("--unit-scale", model.unit_scale, "Molecules per source unit");
    app->add_option("--x-max", model.x_max, "Size of the molecule-count grid");
    app->add_option("--x-th", model.x_th, "Apoptosis threshold (molecules)");
    app->add_option("--squared-denominator", model.squared_denominator,
                    "Normalization of the rectified squared distortion");
    app->add_option("--distortion", distortion, "hamming | squared");
  }

  void validate() const {
    model.validate();
    if (model.x_max > kMaxApoptosisGrid) {
      throw UsageError("--x-max is limited to " +
                       std::to_string(kMaxApoptosisGrid));
    }
    if (distortion != "hamming" && distortion != "squared") {
      throw UsageError("--distortion must be 'hamming' or 'squared'");
    }
  }

  DistortionMatrix build_distortion() const {
    return distortion == "hamming" ? apoptosis::hamming_like(model)
                                   : apoptosis::rectified_squared(model);
  }
};

struct LegiOptions {
  legi::LegiParams params;
  std::uint64_t trials = 20'000'000;
  std::uint64_t seed = 0;
  std::string mode = "sample";
  unsigned threads = 1;

  void attach(CLI::App* app) {
    app->add_option("--a", params.a, "Maximum ligand concentration");
    app->add_option("--b", params.b, "Gradient strength");
    app->add_option("--kd", params.k_d, "Dissociation constant");
    app->add_option("--rt", params.r_t, "Receptors per sector");
    app->add_option("--sectors", params.n_sectors, "Number of membrane sectors");
    app->add_option("--trials", trials, "Monte Carlo trials");
    app->add_option("--mode", mode, "sample | accumulate");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--threads", threads, "Worker threads");
  }

  void validate() const {
    params.validate();
    if (params.n_sectors > kMaxSectors) {
      throw UsageError("--sectors is limited to " + std::to_string(kMaxSectors));
    }
    if (params.r_t > kMaxReceptors) {
      throw UsageError("--rt is limited to " + std::to_string(kMaxReceptors));
    }
    if (params.hill > kMaxHill) {
      throw UsageError("--hill is limited to " + std::to_string(kMaxHill));
    }
    if (trials < 1) throw UsageError("--trials must be >= 1");
    legi::parse_sim_mode(mode);
  }
};

struct BaaOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  bool strict = false;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "Convergence threshold on max |dP_Y|");
    app->add_option("--max-iter", max_iter, "Iteration cap per solve");
    app->add_flag("--strict", strict, "Exit 3 if any solve fails to converge");
  }
};

// Source pmf + distortion either from the apoptosis model or from files.
struct SourceOptions {
  std::string model = "apoptosis";
  std::string px_file;
  std::string d_file;
  ApoptosisOptions apo;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "apoptosis | file");
    app->add_option("--px", px_file, "Source pmf CSV (one data row)");
    app->add_option("--d", d_file, "Distortion matrix CSV");
    apo.attach(app);
  }

  std::pair<Pmf, DistortionMatrix> load() const {
    const bool from_files = model == "file" || !px_file.empty() || !d_file.empty();
    if (from_files) {
      if (px_file.empty() || d_file.empty()) {
        throw UsageError("file-based runs need both --px and --d");
      }
      Pmf px = csv::read_pmf(px_file);
      auto m = csv::read_matrix(fs::path(d_file));
      DistortionMatrix d(std::move(m.rows), std::move(m.cols), std::move(m.values));
      if (!(px.alphabet() == d.x_alphabet())) {
        throw UsageError("--px labels do not match the row labels of --d");
      }
      return {std::move(px), std::move(d)};
    }
    if (model != "apoptosis") throw UsageError("--model must be apoptosis or file");
    apo.validate();
    return {apoptosis::exp_source(apo.model), apo.build_distortion()};
  }

  json describe() const {
    if (model == "file" || !px_file.empty() || !d_file.empty()) {
      return {{"model", "file"}, {"px", px_file}, {"d", d_file}};
    }
    return {{"model", "apoptosis"},
            {"distortion", apo.distortion},
            {"apoptosis", to_json(apo.model)}};
  }
};

// ---------------------------------------------------------------------------
// Runtime helpers

struct Runtime {
  std::ostream& out;
  std::ostream& err;
};

std::uint64_t resolve_seed(CLI::App* app, std::uint64_t given, std::ostream& err) {
  if (app->get_option("--seed")->count() > 0) return given;
  std::random_device rd;
  const std::uint64_t seed =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  err << "seed: " << seed << '\n';
  return seed;
}

unsigned resolve_threads(CLI::App* app, unsigned given) {
  if (app->get_option("--threads")->count() > 0) {
    if (given < 1) throw UsageError("--threads must be >= 1");
    return given;
  }
  if (const char* env = std::getenv("RATELENS_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
      throw UsageError("RATELENS_THREADS must be a positive integer");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

legi::SimConfig make_sim_config(const LegiOptions& o, std::uint64_t seed,
                                unsigned threads, std::ostream& err) {
  legi::SimConfig cfg;
  cfg.trials = o.trials;
  cfg.seed = seed;
  cfg.mode = legi::parse_sim_mode(o.mode);
  cfg.threads = threads;
  cfg.progress = [&err](double f) {
    err << "progress: " << static_cast<int>(f * 100.0 + 0.5) << "%\n";
  };
  return cfg;
}

void require(CLI::App* app, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (app->get_option(name)->count() == 0) {
      throw UsageError(std::string(name) + " is required");
    }
  }
}

// Fills options that were not given on the command line from the config file.
void apply_config(CLI::App* app, const std::string& path) {
  for (const auto& [raw_key, value] : read_config_file(path)) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw UsageError("unknown config key '" + raw_key + "' in " + path);
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// Commands

struct Commands {
  // rd-curve / rd-strategy
  SourceOptions source;
  BaaOptions baa;
  std::string lambda_grid;
  double lambda_min = 1e-2;
  double lambda_max = 1e2;
  std::size_t lambda_points = 60;
  double lambda = 1.0;
  double target_distortion = 0.0;
  double distortion_tol = 1e-6;
  std::string out;

  // ibaa / align
  std::string counts_file;
  std::string weights_file;
  std::string distortion_file;
  std::string sidecar;
  std::string summary_file;
  bool per_row = false;

  // sim-legi / hill-sweep
  LegiOptions legi;
  std::string hills = "1,3,5";
  std::string out_dir;

  // sim-apoptosis / roundtrip
  ApoptosisOptions apo;
  std::uint64_t samples = 10'000'000;
  std::uint64_t apo_seed = 0;
  double roundtrip_tol = 1e-12;
  std::size_t roundtrip_max_iter = 100000;
  bool roundtrip_strict = false;

  int rd_curve(Runtime& rt, CLI::App* app) {
    require(app, {"--out"});
    auto [px, d] = source.load();
    std::vector<double> grid =
        lambda_grid.empty()
            ? baa::geometric_grid(lambda_min, lambda_max, lambda_points)
            : parse_list<double>(lambda_grid, "--lambda-grid");
    const baa::RdCurve curve = baa::rd_curve(px, d, grid, baa.tol, baa.max_iter);

    std::ofstream f(out);
    if (!f) throw InvalidArgument("cannot write '" + out + "'");
    f << "lambda,rate_bits,distortion,iterations,converged\n";
    std::size_t failed = 0;
    for (const auto& p : curve.points) {
      f << csv::format_double(p.lambda) << ',' << csv::format_double(p.rate_bits)
        << ',' << csv::format_double(p.distortion) << ',' << p.iterations << ','
        << (p.converged ? "true" : "false") << '\n';
      if (!p.converged) {
        ++failed;
        rt.err << "warning: lambda=" << p.lambda << " did not converge in "
               << p.iterations << " iterations\n";
      }
    }
    write_json(sidecar_path(out),
               {{"command", "rd-curve"},
                {"source", source.describe()},
                {"tol", baa.tol},
                {"max_iter", baa.max_iter},
                {"lambda_grid", grid}});
    if (failed > 0 && baa.strict) {
      throw StrictFailure(std::to_string(failed) + " curve point(s) did not converge");
    }
    return kExitOk;
  }

  int rd_strategy(Runtime& rt, CLI::App* app) {
    require(app, {"--out"});
    const bool by_target = app->get_option("--target-distortion")->count() > 0;
    const bool by_lambda = app->get_option("--lambda")->count() > 0;
    if (by_target == by_lambda) {
      throw UsageError("give exactly one of --lambda or --target-distortion");
    }
    auto [px, d] = source.load();
    const baa::BaaResult r =
        by_target ? baa::solve_for_distortion(px, d, target_distortion,
                                              distortion_tol, baa.tol, baa.max_iter)
                  : baa::baa_solve(px, d, {lambda, baa.tol, baa.max_iter});
    csv::write_matrix_file(out, r.strategy.x_alphabet(), r.strategy.y_alphabet(),
                           r.strategy.rows());
    write_json(sidecar_path(out),
               {{"command", "rd-strategy"},
                {"source", source.describe()},
                {"lambda", r.lambda},
                {"rate_bits", r.rate_bits},
                {"expected_distortion", r.expected_distortion},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"output_dist", std::vector<double>(r.output_dist.probs().begin(),
                                                    r.output_dist.probs().end())},
                {"tol", baa.tol},
                {"max_iter", baa.max_iter}});
    if (!r.converged) {
      rt.err << "warning: solve did not converge in " << r.iterations
             << " iterations\n";
      if (baa.strict) throw StrictFailure("solve did not converge");
    }
    return kExitOk;
  }

  int ibaa(Runtime&, CLI::App* app) {
    require(app, {"--out"});
    if (counts_file.empty() == weights_file.empty()) {
      throw UsageError("give exactly one of --counts or --weights");
    }
    ibaa::IbaaResult r = [&] {
      if (!counts_file.empty()) return ibaa::ibaa_from_counts(csv::read_counts(counts_file));
      auto m = csv::read_matrix(fs::path(weights_file));
      return ibaa::ibaa_from_counts(
          WeightMatrix(std::move(m.rows), std::move(m.cols), std::move(m.values)));
    }();
    const auto& dist = r.distortion;
    csv::write_matrix_file(out, dist.x_alphabet(), dist.y_alphabet(), dist.values());
    const auto tilde = r.tilde_distortion.flat();
    const auto [lo, hi] = std::minmax_element(tilde.begin(), tilde.end());
    write_json(sidecar.empty() ? sidecar_path(out) : fs::path(sidecar),
               {{"command", "ibaa"},
                {"input", counts_file.empty() ? weights_file : counts_file},
                {"lambda_assumed", r.lambda_assumed},
                {"row_counts", r.row_counts.value_or(std::vector<double>{})},
                {"max_tilde", *hi},
                {"min_tilde", *lo}});
    return kExitOk;
  }

  int sim_legi(Runtime& rt, CLI::App* app) {
    require(app, {"--out"});
    legi.validate();
    const std::uint64_t seed = resolve_seed(app, legi.seed, rt.err);
    const unsigned threads = resolve_threads(app, legi.threads);
    const legi::SimResult sim =
        legi::simulate(legi.params, make_sim_config(legi, seed, threads, rt.err));
    std::visit(
        [&](const auto& table) {
          using T = std::decay_t<decltype(table)>;
          if constexpr (std::is_same_v<T, CountMatrix>) {
            csv::write_counts_file(out, table);
          } else {
            csv::write_matrix_file(out, table.x_alphabet(), table.y_alphabet(),
                                   table.weights());
          }
        },
        sim.table);
    write_json(sidecar_path(out),
               {{"command", "sim-legi"},
                {"params", to_json(legi.params)},
                {"seed", seed},
                {"trials", legi.trials},
                {"mode", legi.mode},
                {"wall_seconds", sim.wall_seconds}});
    return kExitOk;
  }

  int hill_sweep(Runtime& rt, CLI::App* app) {
    require(app, {"--out-dir"});
    legi.validate();
    const auto hs = parse_list<int>(hills, "--hills");
    for (int h : hs) {
      if (h < 1 || h > kMaxHill) throw UsageError("hill coefficients must be in [1, 64]");
    }
    const std::uint64_t seed = resolve_seed(app, legi.seed, rt.err);
    const unsigned threads = resolve_threads(app, legi.threads);
    fs::create_directories(out_dir);
    const auto entries = analysis::hill_sweep(
        legi.params, hs, make_sim_config(legi, seed, threads, rt.err));
    json all = json::array();
    for (const auto& e : entries) {
      const fs::path profile = fs::path(out_dir) / ("profile_h" + std::to_string(e.hill) + ".csv");
      write_profile(profile, e.profile, per_row);
      json s = {{"hill", e.hill},
                {"peak", e.summary.peak},
                {"minimum", e.summary.minimum},
                {"min_shift_radians", e.profile.shifts[e.summary.min_index]},
                {"half_height_width", e.summary.half_height_width}};
      write_json(fs::path(out_dir) / ("summary_h" + std::to_string(e.hill) + ".json"), s);
      all.push_back(s);
    }
    legi::LegiParams p = legi.params;
    write_json(fs::path(out_dir) / "sweep.json",
               {{"command", "hill-sweep"},
                {"params", to_json(p)},
                {"hills", hs},
                {"seed", seed},
                {"trials", legi.trials},
                {"mode", legi.mode},
                {"summaries", all}});
    return kExitOk;
  }

  static void write_profile(const fs::path& path,
                            const analysis::AlignedProfile& prof, bool rows) {
    std::ofstream f(path);
    if (!f) throw InvalidArgument("cannot write '" + path.string() + "'");
    f << "shift_radians,mean_distortion";
    if (rows) {
      for (const auto& l : prof.rows.labels()) f << ",theta_s=" << l;
    }
    f << '\n';
    for (std::size_t j = 0; j < prof.shifts.size(); ++j) {
      f << csv::format_double(prof.shifts[j]) << ',' << csv::format_double(prof.mean[j]);
      if (rows) {
        for (std::size_t s = 0; s < prof.per_row.rows(); ++s) {
          f << ',' << csv::format_double(prof.per_row(s, j));
        }
      }
      f << '\n';
    }
  }

  int align(Runtime&, CLI::App* app) {
    require(app, {"--distortion", "--out"});
    auto m = csv::read_matrix(fs::path(distortion_file));
    const DistortionMatrix d(std::move(m.rows), std::move(m.cols), std::move(m.values));
    const analysis::AlignedProfile prof = analysis::cyclic_align(d);
    write_profile(out, prof, per_row);
    const auto s = analysis::summarize_profile(prof.mean);
    write_json(summary_file.empty() ? sidecar_path(out) : fs::path(summary_file),
               {{"command", "align"},
                {"input", distortion_file},
                {"peak", s.peak},
                {"minimum", s.minimum},
                {"min_shift_radians", prof.shifts[s.min_index]},
                {"half_height_width", s.half_height_width}});
    return kExitOk;
  }

  int sim_apoptosis(Runtime& rt, CLI::App* app) {
    require(app, {"--out", "--lambda"});
    apo.validate();
    const std::uint64_t seed = resolve_seed(app, apo_seed, rt.err);
    const Pmf px = apoptosis::exp_source(apo.model);
    const baa::BaaResult r =
        baa::baa_solve(px, apo.build_distortion(), {lambda, baa.tol, baa.max_iter});
    if (!r.converged) {
      rt.err << "warning: solve did not converge in " << r.iterations << " iterations\n";
      if (baa.strict) throw StrictFailure("solve did not converge");
    }
    const CountMatrix counts = rng::sample_counts(compose_joint(px, r.strategy), samples, seed);
    csv::write_counts_file(out, counts);
    write_json(sidecar_path(out),
               {{"command", "sim-apoptosis"},
                {"apoptosis", to_json(apo.model)},
                {"distortion", apo.distortion},
                {"lambda", lambda},
                {"samples", samples},
                {"seed", seed},
                {"rate_bits", r.rate_bits},
                {"expected_distortion", r.expected_distortion},
                {"tol", baa.tol},
                {"max_iter", baa.max_iter}});
    return kExitOk;
  }

  int roundtrip(Runtime& rt, CLI::App* app) {
    require(app, {"--lambda"});
    apo.validate();
    const auto report = ibaa::roundtrip_validate(
        apoptosis::exp_source(apo.model), apo.build_distortion(), lambda,
        roundtrip_tol, roundtrip_max_iter);
    json j = {{"command", "roundtrip"},
              {"apoptosis", to_json(apo.model)},
              {"distortion", apo.distortion},
              {"lambda", report.lambda},
              {"max_abs_error", report.max_abs_error},
              {"recovered_scale", report.recovered_scale},
              {"rate_bits", report.rate_bits},
              {"expected_distortion", report.expected_distortion},
              {"iterations", report.iterations},
              {"converged", report.converged},
              {"tol", roundtrip_tol}};
    if (out.empty()) {
      rt.out << j.dump(2) << '\n';
    } else {
      write_json(out, j);
    }
    if (!report.converged) {
      rt.err << "warning: forward solve did not converge\n";
      if (roundtrip_strict) throw StrictFailure("forward solve did not converge");
    }
    return kExitOk;
  }
};

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    kv[key] = value;
  }
  return kv;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    Commands c;
    CLI::App app{"ratelens: rate-distortion strategies and inverse distortion recovery"};
    app.require_subcommand(1);
    std::string config;

    struct Sub {
      CLI::App* app;
      std::function<int(Runtime&, CLI::App*)> body;
    };
    std::vector<Sub> subs;
    auto add = [&](const char* name, const char* help,
                   std::function<int(Runtime&, CLI::App*)> body) {
      CLI::App* s = app.add_subcommand(name, help);
      s->add_option("--config", config, "Flat key = value file (flags win)");
      subs.push_back({s, std::move(body)});
      return s;
    };

    {
      CLI::App* s = add("rd-curve", "Trace R(D) over a lambda grid",
                        [&](Runtime& rt, CLI::App* a) { return c.rd_curve(rt, a); });
      c.source.attach(s);
      c.baa.attach(s);
      s->add_option("--lambda-grid", c.lambda_grid, "Comma-separated lambda values");
      s->add_option("--lambda-min", c.lambda_min, "Geometric grid start");
      s->add_option("--lambda-max", c.lambda_max, "Geometric grid end");
      s->add_option("--lambda-points", c.lambda_points, "Geometric grid size");
      s->add_option("--out", c.out, "Curve CSV");
    }
    {
      CLI::App* s = add("rd-strategy", "Optimal strategy at one lambda or distortion",
                        [&](Runtime& rt, CLI::App* a) { return c.rd_strategy(rt, a); });
      c.source.attach(s);
      c.baa.attach(s);
      s->add_option("--lambda", c.lambda, "Lagrange multiplier");
      s->add_option("--target-distortion", c.target_distortion, "Expected distortion to hit");
      s->add_option("--distortion-tol", c.distortion_tol, "Tolerance on the target");
      s->add_option("--out", c.out, "Strategy CSV");
    }
    {
      CLI::App* s = add("ibaa", "Recover a distortion matrix from observed counts",
                        [&](Runtime& rt, CLI::App* a) { return c.ibaa(rt, a); });
      s->add_option("--counts", c.counts_file, "Count matrix CSV");
      s->add_option("--weights", c.weights_file, "Fractional weight matrix CSV");
      s->add_option("--out", c.out, "Distortion CSV");
      s->add_option("--sidecar", c.sidecar, "JSON sidecar path (default <out>.json)");
    }
    {
      CLI::App* s = add("sim-legi", "Monte Carlo LEGI chemotaxis simulation",
                        [&](Runtime& rt, CLI::App* a) { return c.sim_legi(rt, a); });
      c.legi.attach(s);
      s->add_option("--hill", c.legi.params.hill, "Hill coefficient");
      s->add_option("--out", c.out, "Joint counts (or weights) CSV");
    }
    {
      CLI::App* s = add("hill-sweep", "Simulate, recover and align for several Hill coefficients",
                        [&](Runtime& rt, CLI::App* a) { return c.hill_sweep(rt, a); });
      c.legi.attach(s);
      s->add_option("--hills", c.hills, "Comma-separated Hill coefficients");
      s->add_option("--out-dir", c.out_dir, "Output directory");
      s->add_flag("--per-row", c.per_row, "Include one column per source sector");
    }
    {
      CLI::App* s = add("align", "Cyclic alignment and mean profile of a distortion matrix",
                        [&](Runtime& rt, CLI::App* a) { return c.align(rt, a); });
      s->add_option("--distortion", c.distortion_file, "Square distortion CSV");
      s->add_option("--out", c.out, "Profile CSV");
      s->add_option("--summary", c.summary_file, "Summary JSON (default <out>.json)");
      s->add_flag("--per-row", c.per_row, "Include one column per source sector");
    }
    {
      CLI::App* s = add("sim-apoptosis", "Sample input/output counts from the optimal apoptosis strategy",
                        [&](Runtime& rt, CLI::App* a) { return c.sim_apoptosis(rt, a); });
      c.apo.attach(s);
      c.baa.attach(s);
      s->add_option("--lambda", c.lambda, "Lagrange multiplier");
      s->add_option("--samples", c.samples, "Number of sampled events");
      s->add_option("--seed", c.apo_seed, "Random seed");
      s->add_option("--out", c.out, "Count matrix CSV");
    }
    {
      CLI::App* s = add("roundtrip", "Forward solve, inverse recovery, compare",
                        [&](Runtime& rt, CLI::App* a) { return c.roundtrip(rt, a); });
      c.apo.attach(s);
      s->add_option("--lambda", c.lambda, "Lagrange multiplier used for the forward solve");
      s->add_option("--tol", c.roundtrip_tol, "Forward convergence threshold");
      s->add_option("--max-iter", c.roundtrip_max_iter, "Forward iteration cap");
      s->add_flag("--strict", c.roundtrip_strict, "Exit 3 on non-convergence");
      s->add_option("--out", c.out, "Report JSON (stdout when omitted)");
    }

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n' << app.help();
      return kExitUsage;
    }

    for (auto& sub : subs) {
      if (!sub.app->parsed()) continue;
      try {
        if (!config.empty()) apply_config(sub.app, config);
      } catch (const CLI::ParseError& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitUsage;
      }
      Runtime rt{out, err};
      try {
        return sub.body(rt, sub.app);
      } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << sub.app->help();
        return kExitUsage;
      }
    }
    err << app.help();
    return kExitUsage;
  } catch (const StrictFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ratelens::cli
