// dmimo: bounds, PEB maps, Monte Carlo, tracking episodes and fixture checks from config files.
//
// Exit codes: 0 success, 1 other failure (IO, failed fixtures), 2 config or usage error,
// 3 numerical infeasibility.

#include <chrono>
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dmimo/csv.hpp"
#include "dmimo/error.hpp"
#include "dmimo/fixtures.hpp"
#include "dmimo/parallel.hpp"
#include "dmimo/scenario.hpp"

using namespace dmimo;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) std::cout << text;
  else write_text(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position error bounds and PHD tracking for distributed MIMO"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "threads for grid and trial loops (0: DMIMO_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string config_path, out;

  auto* peb_map = app.add_subcommand("peb-map", "PEB over a horizontal grid of the surveillance box");
  int nx = 50, ny = 35;
  std::optional<double> z;
  peb_map->add_option("config", config_path, "scenario config")->required();
  peb_map->add_option("--out", out, "CSV path (default: stdout)");
  peb_map->add_option("--nx", nx, "cells along x")->check(CLI::PositiveNumber);
  peb_map->add_option("--ny", ny, "cells along y")->check(CLI::PositiveNumber);
  peb_map->add_option("--z", z, "grid height (default: box centre)");

  auto* mc = app.add_subcommand("monte-carlo", "ML estimator RMSE against the PEB over SNR");
  std::vector<double> snr = {10, 20, 30};
  int trials = 500;
  mc->add_option("config", config_path, "scenario config")->required();
  mc->add_option("--snr", snr, "SNR list in dB")->delimiter(',');
  mc->add_option("--trials", trials, "trials per SNR")->check(CLI::PositiveNumber);
  mc->add_option("--out", out, "CSV path (default: stdout)");

  auto* track = app.add_subcommand("track", "run a tracking episode");
  std::string prefix;
  track->add_option("config", config_path, "scenario config")->required();
  track->add_option("--out-prefix", prefix, "writes <prefix>_track.csv, _activation.csv, _summary.json")->required();

  auto* select = app.add_subcommand("select-aps", "AP subset minimizing the summed PEB at the UE start positions");
  int k = 0;
  std::string method = "greedy";
  select->add_option("config", config_path, "scenario config")->required();
  select->add_option("--k", k, "number of active APs")->required()->check(CLI::PositiveNumber);
  select->add_option("--method", method, "greedy|greedy_local|brute|all");
  select->add_option("--out", out, "CSV path (default: stdout)");

  auto* bounds = app.add_subcommand("bounds", "per-link and joint FIM summaries at the first UE start");
  bounds->add_option("config", config_path, "scenario config")->required();
  bounds->add_option("--out", out, "CSV path (default: stdout)");

  auto* validate = app.add_subcommand("validate", "parse and check a config");
  validate->add_option("config", config_path, "scenario config")->required();

  auto* verify = app.add_subcommand("verify-fixtures", "regenerate golden fixtures and compare");
  std::string manifest_path;
  bool update = false;
  std::vector<std::string> only;
  verify->add_option("manifest", manifest_path, "fixture manifest")->required();
  verify->add_flag("--update", update, "rewrite golden files and digests instead of checking");
  verify->add_option("--only", only, "comma-separated fixture names to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (workers == 0) workers = default_worker_count();

  try {
    if (*peb_map) {
      const ScenarioConfig c = load_config_file(config_path);
      emit(peb_map_csv(run_peb_map(c, nx, ny, z, workers)), out);
    } else if (*mc) {
      const ScenarioConfig c = load_config_file(config_path);
      emit(monte_carlo_csv(run_monte_carlo(monte_carlo_scenario(c), snr, trials, c.seed, workers)), out);
    } else if (*track) {
      const ScenarioConfig c = load_config_file(config_path);
      const EpisodeLog log = run_tracking_episode(c, workers);
      write_text(prefix + "_track.csv", track_csv(log));
      write_text(prefix + "_activation.csv", activation_csv(log));
      write_text(prefix + "_summary.json", episode_summary(log));
      std::printf("%s: %zu steps, mean RMSE %.6g m, max RMSE %.6g m, mean cardinality error %.6g\n",
                  log.name.c_str(), log.steps.size(), log.mean_rmse(), log.max_rmse(),
                  log.mean_cardinality_error());
    } else if (*select) {
      const ScenarioConfig c = load_config_file(config_path);
      SelectionMethod m;
      try {
        m = parse_selection_method(method);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), "--method");
      }
      if (k > static_cast<int>(c.aps.size()))
        throw ConfigError("exceeds the " + std::to_string(c.aps.size()) + " configured APs", "--k");
      emit(selection_csv(to_string(m), k, select_aps(selection_problem(c, workers), k, m)), out);
    } else if (*bounds) {
      emit(bounds_csv(run_bounds(load_config_file(config_path))), out);
    } else if (*validate) {
      const ScenarioConfig c = load_config_file(config_path);
      std::printf("%s: ok (%zu APs, %zu UEs, %d steps, schedule %s)\n", c.name.c_str(), c.aps.size(), c.ues.size(),
                  c.steps, to_string(c.schedule.method).c_str());
    } else if (*verify) {
      Manifest m = load_manifest(manifest_path);
      if (!only.empty()) {
        std::vector<FixtureSpec> keep;
        for (const FixtureSpec& f : m.fixtures)
          if (std::find(only.begin(), only.end(), f.name) != only.end()) keep.push_back(f);
        m.fixtures = keep;
      }
      if (update) {
        if (!only.empty()) throw ConfigError("--update rewrites the whole manifest; drop --only", "--only");
        write_text(manifest_path, serialize_manifest(update_manifest(m, workers)));
        std::printf("updated %zu fixtures\n", m.fixtures.size());
        return 0;
      }
      int failed = 0;
      for (const FixtureReport& r : verify_manifest(m, workers)) {
        std::printf("%s %-28s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.message.c_str());
        failed += !r.passed;
      }
      std::printf("%zu fixtures, %d failed\n", m.fixtures.size(), failed);
      return failed ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
