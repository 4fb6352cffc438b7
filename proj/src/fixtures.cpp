#include "dmimo/fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "dmimo/csv.hpp"
#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

namespace {

namespace fs = std::filesystem;

std::string resolve(const std::string& dir, const std::string& rel) { return (fs::path(dir) / rel).string(); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void episode_metrics(const ScenarioConfig& c, const EpisodeLog& log, std::map<std::string, double>& m) {
  m["mean_rmse"] = log.mean_rmse();
  m["max_rmse"] = log.max_rmse();
  m["mean_cardinality_error"] = log.mean_cardinality_error();
  const int ref = c.schedule.method == ScheduleKind::Fixed && !c.schedule.fixed.empty() ? c.schedule.fixed.front() : 0;
  m["far_half_rmse"] = far_half_rmse(log, c.aps.at(static_cast<std::size_t>(ref)).position);
  double active = 0.0;
  for (const StepRecord& r : log.steps) active += static_cast<double>(r.active.size());
  m["mean_active_aps"] = log.steps.empty() ? 0.0 : active / static_cast<double>(log.steps.size());
}

// First differing line, then first differing cell within it.
std::string locate_divergence(const std::string& expected, const std::string& actual) {
  std::istringstream a(expected), b(actual);
  std::string la, lb, header;
  for (int line = 1;; ++line) {
    const bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
    if (line == 1 && ga) header = la;
    if (!ga && !gb) return "texts differ only in line endings or trailing bytes";
    if (ga != gb)
      return "line " + std::to_string(line) + ": " +
             (ga ? "missing in regenerated output" : "extra line in regenerated output");
    if (la == lb) continue;
    const CsvTable ta = parse_csv(header + "\n" + la + "\n"), tb = parse_csv(header + "\n" + lb + "\n");
    if (line == 1 || ta.rows.empty() || tb.rows.empty()) return "line " + std::to_string(line) + " differs";
    const auto& ra = ta.rows.front();
    const auto& rb = tb.rows.front();
    for (std::size_t k = 0; k < std::max(ra.size(), rb.size()); ++k) {
      const std::string ca = k < ra.size() ? ra[k] : "<none>", cb = k < rb.size() ? rb[k] : "<none>";
      if (ca != cb) {
        const std::string name = k < ta.header.size() ? ta.header[k] : std::to_string(k + 1);
        return "row " + std::to_string(line - 1) + ", column " + name + ": expected " + ca + ", got " + cb;
      }
    }
    return "line " + std::to_string(line) + " differs";
  }
}

bool parses(const std::string& s, double& v) {
  try {
    v = read_number(s);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

std::string numeric_divergence(const std::string& expected, const std::string& actual, double tol) {
  const CsvTable a = parse_csv(expected), b = parse_csv(actual);
  if (a.header != b.header) return "header differs";
  if (a.rows.size() != b.rows.size())
    return "row count: expected " + std::to_string(a.rows.size()) + ", got " + std::to_string(b.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return "row " + std::to_string(r + 1) + ": cell count differs";
    for (std::size_t k = 0; k < a.rows[r].size(); ++k) {
      const std::string &ca = a.rows[r][k], &cb = b.rows[r][k];
      double x = 0.0, y = 0.0;
      bool ok;
      if (parses(ca, x) && parses(cb, y))
        ok = (std::isnan(x) && std::isnan(y)) || x == y || std::abs(x - y) < tol;
      else
        ok = ca == cb;
      if (!ok)
        return "row " + std::to_string(r + 1) + ", column " + a.header[k] + ": expected " + ca + ", got " + cb;
    }
  }
  return "";
}

}  // namespace

std::string to_string(ToleranceClass c) {
  switch (c) {
    case ToleranceClass::BitExact: return "bit-exact";
    case ToleranceClass::Numeric: return "numeric";
    case ToleranceClass::Statistical: return "statistical";
  }
  return "bit-exact";
}

ToleranceClass parse_tolerance_class(const std::string& name) {
  if (name == "bit-exact") return ToleranceClass::BitExact;
  if (name == "numeric") return ToleranceClass::Numeric;
  if (name == "statistical") return ToleranceClass::Statistical;
  throw ConfigError("unknown tolerance class '" + name + "' (bit-exact|numeric|statistical)", "class");
}

std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Manifest load_manifest(const std::string& path) {
  toml::table root;
  try {
    root = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()), path, static_cast<int>(e.source().begin.line),
                      static_cast<int>(e.source().begin.column));
  }
  Manifest m;
  const fs::path p(path);
  m.directory = p.has_parent_path() ? p.parent_path().string() : ".";
  const toml::array* list = root["fixture"].as_array();
  if (!list) throw ConfigError("manifest needs [[fixture]] entries", "fixture");
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string where = "fixture[" + std::to_string(i) + "]";
    const toml::table* t = (*list)[i].as_table();
    if (!t) throw ConfigError("expected a table", where);
    for (const auto& [k, v] : *t) {
      static const char* known[] = {"name",   "artifact", "config", "class",  "golden", "digest", "tolerance",
                                    "stats",  "nx",       "ny",     "snr_db", "trials", "k_prime", "method"};
      bool ok = false;
      for (const char* n : known) ok |= k.str() == n;
      if (!ok) throw ConfigError("unknown key", where + "." + std::string(k.str()));
    }
    FixtureSpec f;
    auto str = [&](const char* key, const std::string& fallback) {
      return (*t)[key].value_or(fallback);
    };
    f.name = str("name", "");
    f.artifact = str("artifact", "");
    f.config = str("config", "");
    if (f.name.empty() || f.artifact.empty() || f.config.empty())
      throw ConfigError("name, artifact and config are required", where);
    f.tolerance_class = parse_tolerance_class(str("class", "bit-exact"));
    f.golden = str("golden", "");
    f.digest = str("digest", "");
    f.tolerance = (*t)["tolerance"].value_or(f.tolerance);
    f.nx = static_cast<int>((*t)["nx"].value_or(static_cast<std::int64_t>(f.nx)));
    f.ny = static_cast<int>((*t)["ny"].value_or(static_cast<std::int64_t>(f.ny)));
    f.trials = static_cast<int>((*t)["trials"].value_or(static_cast<std::int64_t>(f.trials)));
    f.k_prime = static_cast<int>((*t)["k_prime"].value_or(static_cast<std::int64_t>(0)));
    f.method = str("method", "");
    if (const toml::array* s = (*t)["snr_db"].as_array()) {
      f.snr_db.clear();
      for (const auto& e : *s) f.snr_db.push_back(e.value_or(0.0));
    }
    if (const toml::array* s = (*t)["stats"].as_array())
      for (const auto& e : *s) {
        const toml::table* st = e.as_table();
        if (!st) throw ConfigError("expected a table", where + ".stats");
        StatBand b;
        b.metric = (*st)["metric"].value_or(std::string());
        b.mean = (*st)["mean"].value_or(0.0);
        b.band = (*st)["band"].value_or(0.0);
        if (b.metric.empty() || !(b.band >= 0))
          throw ConfigError("stat needs a metric and band >= 0", where + ".stats");
        f.stats.push_back(b);
      }
    if (f.tolerance_class == ToleranceClass::Statistical && f.stats.empty())
      throw ConfigError("statistical fixture needs stats", where + ".stats");
    if (f.tolerance_class != ToleranceClass::Statistical && f.golden.empty())
      throw ConfigError("fixture needs a golden file", where + ".golden");
    m.fixtures.push_back(std::move(f));
  }
  return m;
}

std::string serialize_manifest(const Manifest& m) {
  std::ostringstream o;
  o << "# Golden fixtures. Regenerate goldens and digests with:\n"
    << "#   dmimo verify-fixtures fixtures/golden/manifest.toml --update\n"
    << "# Statistical bands are set by hand and are not touched by --update.\n";
  for (const FixtureSpec& f : m.fixtures) {
    o << "\n[[fixture]]\nname = " << quoted(f.name) << "\nartifact = " << quoted(f.artifact)
      << "\nconfig = " << quoted(f.config) << "\nclass = " << quoted(to_string(f.tolerance_class)) << "\n";
    if (!f.golden.empty()) o << "golden = " << quoted(f.golden) << "\n";
    if (!f.digest.empty()) o << "digest = " << quoted(f.digest) << "\n";
    if (f.tolerance_class == ToleranceClass::Numeric) o << "tolerance = " << format_number(f.tolerance) << "\n";
    if (f.artifact == "peb_map") o << "nx = " << f.nx << "\nny = " << f.ny << "\n";
    if (f.artifact == "monte_carlo") {
      o << "trials = " << f.trials << "\nsnr_db = [";
      for (std::size_t i = 0; i < f.snr_db.size(); ++i) o << (i ? ", " : "") << format_number(f.snr_db[i]);
      o << "]\n";
    }
    if (f.k_prime) o << "k_prime = " << f.k_prime << "\n";
    if (!f.method.empty()) o << "method = " << quoted(f.method) << "\n";
    if (!f.stats.empty()) {
      o << "stats = [\n";
      for (const StatBand& b : f.stats)
        o << "  { metric = " << quoted(b.metric) << ", mean = " << format_number(b.mean)
          << ", band = " << format_number(b.band) << " },\n";
      o << "]\n";
    }
  }
  return o.str();
}

Artifact generate_artifact(const FixtureSpec& spec, const std::string& directory, int workers) {
  const ScenarioConfig c = load_config_file(resolve(directory, spec.config));
  Artifact a;
  const std::string& kind = spec.artifact;
  if (kind == "track" || kind == "activation" || kind == "summary") {
    const EpisodeLog log = run_tracking_episode(c, workers);
    a.text = kind == "track" ? track_csv(log) : kind == "activation" ? activation_csv(log) : episode_summary(log);
    episode_metrics(c, log, a.metrics);
  } else if (kind == "peb_map") {
    const PebMap map = run_peb_map(c, spec.nx, spec.ny, std::nullopt, workers);
    a.text = peb_map_csv(map);
    double sum = 0.0;
    int n = 0;
    for (int j = 0; j < map.peb.rows(); ++j)
      for (int i = 0; i < map.peb.cols(); ++i)
        if (std::isfinite(map.peb(j, i))) sum += map.peb(j, i), ++n;
    a.metrics["max_peb"] = map.peb.maxCoeff();
    a.metrics["min_peb"] = map.peb.minCoeff();
    a.metrics["mean_peb"] = n ? sum / n : std::nan("");
  } else if (kind == "monte_carlo") {
    const auto reports = run_monte_carlo(monte_carlo_scenario(c), spec.snr_db, spec.trials, c.seed, workers);
    a.text = monte_carlo_csv(reports);
    for (const RmseReport& r : reports) {
      const std::string at = "@" + format_number(r.snr_db);
      a.metrics["rmse" + at] = r.rmse;
      a.metrics["peb" + at] = r.peb;
      a.metrics["rmse_over_peb" + at] = r.rmse / r.peb;
    }
  } else if (kind == "bounds") {
    const BoundsReport r = run_bounds(c);
    a.text = bounds_csv(r);
    a.metrics["peb"] = r.peb;
    a.metrics["peb_decomposed"] = r.peb_decomposed;
    a.metrics["peb_2d"] = r.peb_2d;
    a.metrics["geometry_factor"] = r.geometry_factor;
    a.metrics["closed_form_peb"] = r.closed_form_peb;
  } else if (kind == "selection") {
    const std::string method_name = spec.method.empty() ? to_string(c.schedule.method) : spec.method;
    const SelectionMethod method = parse_selection_method(method_name);
    int k = spec.k_prime > 0 ? spec.k_prime : c.schedule.k_prime;
    if (k <= 0) k = static_cast<int>(c.aps.size());
    const Activation act = select_aps(selection_problem(c, workers), k, method);
    a.text = selection_csv(to_string(method), k, act);
    a.metrics["objective"] = act.objective;
  } else {
    throw ConfigError("unknown artifact '" + kind + "' (track|activation|summary|peb_map|monte_carlo|bounds|selection)",
                      spec.name + ".artifact");
  }
  return a;
}

FixtureReport compare_artifact(const FixtureSpec& spec, const Artifact& produced, const std::string& golden_text) {
  FixtureReport r;
  r.name = spec.name;
  switch (spec.tolerance_class) {
    case ToleranceClass::BitExact: {
      const std::string got = fnv1a_digest(produced.text);
      if (got == spec.digest && (golden_text.empty() || golden_text == produced.text)) {
        r.passed = true;
        r.message = got;
      } else if (!golden_text.empty() && golden_text != produced.text) {
        r.message = "digest " + got + " != " + spec.digest + "; first divergence at " +
                    locate_divergence(golden_text, produced.text);
      } else {
        r.message = "digest " + got + " != " + spec.digest;
      }
      break;
    }
    case ToleranceClass::Numeric: {
      if (golden_text.empty()) {
        r.message = "golden file missing";
        break;
      }
      const std::string where = numeric_divergence(golden_text, produced.text, spec.tolerance);
      r.passed = where.empty();
      r.message = r.passed ? "all cells within " + format_number(spec.tolerance) : "first divergence at " + where;
      break;
    }
    case ToleranceClass::Statistical: {
      r.passed = true;
      std::ostringstream msg;
      for (const StatBand& b : spec.stats) {
        const auto it = produced.metrics.find(b.metric);
        if (it == produced.metrics.end()) {
          r.passed = false;
          msg << b.metric << ": not produced by artifact " << spec.artifact << "; ";
          continue;
        }
        const bool ok = std::abs(it->second - b.mean) <= b.band;
        r.passed &= ok;
        msg << b.metric << " = " << format_number(it->second) << (ok ? " in " : " outside ") << format_number(b.mean)
            << " +- " << format_number(b.band) << "; ";
      }
      r.message = msg.str();
      break;
    }
  }
  return r;
}

FixtureReport verify_fixture(const FixtureSpec& spec, const std::string& directory, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  FixtureReport r;
  try {
    const Artifact a = generate_artifact(spec, directory, workers);
    std::string golden;
    if (!spec.golden.empty() && fs::exists(resolve(directory, spec.golden)))
      golden = read_text(resolve(directory, spec.golden));
    r = compare_artifact(spec, a, golden);
  } catch (const std::exception& e) {
    r.name = spec.name;
    r.passed = false;
    r.message = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<FixtureReport> verify_manifest(const Manifest& manifest, int workers) {
  std::vector<FixtureReport> out(manifest.fixtures.size());
  parallel_for(manifest.fixtures.size(), workers,
               [&](std::size_t i) { out[i] = verify_fixture(manifest.fixtures[i], manifest.directory, 1); });
  return out;
}

Manifest update_manifest(const Manifest& manifest, int workers) {
  Manifest m = manifest;
  std::vector<std::string> texts(m.fixtures.size());
  parallel_for(m.fixtures.size(), workers, [&](std::size_t i) {
    const FixtureSpec& f = m.fixtures[i];
    if (f.tolerance_class != ToleranceClass::Statistical) texts[i] = generate_artifact(f, m.directory, 1).text;
  });
  for (std::size_t i = 0; i < m.fixtures.size(); ++i) {
    FixtureSpec& f = m.fixtures[i];
    if (f.tolerance_class == ToleranceClass::Statistical) continue;
    write_text(resolve(m.directory, f.golden), texts[i]);
    f.digest = f.tolerance_class == ToleranceClass::BitExact ? fnv1a_digest(texts[i]) : "";
  }
  return m;
}

}  // namespace dmimo
