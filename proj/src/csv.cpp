#include "dmimo/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dmimo/error.hpp"

namespace dmimo {

namespace {

std::string join_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + '\n';
}

std::string header(const std::vector<std::string>& cols) { return join_row(cols); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double read_number(const std::string& cell) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [p, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || p != end) throw InvalidArgument("not a number: '" + cell + "'");
  return v;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

double CsvTable::number(std::size_t row, int col) const {
  return read_number(rows.at(row).at(static_cast<std::size_t>(col)));
}

const std::vector<std::string>& track_columns() {
  static const std::vector<std::string> c = {"t",      "ue_id",  "est_x",  "est_y", "est_z",
                                             "true_x", "true_y", "true_z", "rmse",  "n_components"};
  return c;
}

const std::vector<std::string>& activation_columns() {
  static const std::vector<std::string> c = {"t", "ap_id", "active"};
  return c;
}

const std::vector<std::string>& peb_map_columns() {
  static const std::vector<std::string> c = {"x", "y", "z", "peb"};
  return c;
}

const std::vector<std::string>& monte_carlo_columns() {
  static const std::vector<std::string> c = {"snr_db",     "noise_variance", "trials",        "rmse",     "rmse_se",
                                             "mean_error", "peb",            "rmse_over_peb", "ambiguous"};
  return c;
}

const std::vector<std::string>& bounds_columns() {
  static const std::vector<std::string> c = {"ap_id",          "theta", "phi",    "tau",
                                             "f_theta_theta",  "f_phi_phi", "f_tau_tau", "peb",
                                             "peb_decomposed", "peb_2d", "geometry_factor", "closed_form_peb"};
  return c;
}

std::string track_csv(const EpisodeLog& log) {
  std::string out = header(track_columns());
  for (const StepRecord& r : log.steps)
    for (std::size_t u = 0; u < r.truth.size(); ++u) {
      const Vec3& e = r.estimates.at(u);
      const Vec3& x = r.truth[u];
      out += join_row({std::to_string(r.t), std::to_string(u), format_number(e.x()), format_number(e.y()),
                       format_number(e.z()), format_number(x.x()), format_number(x.y()), format_number(x.z()),
                       format_number(r.rmse.at(u)), std::to_string(r.components)});
    }
  return out;
}

std::string activation_csv(const EpisodeLog& log) {
  std::string out = header(activation_columns());
  for (const StepRecord& r : log.steps) {
    std::vector<char> on(static_cast<std::size_t>(log.ap_count), 0);
    for (int k : r.active) on.at(static_cast<std::size_t>(k)) = 1;
    for (int k = 0; k < log.ap_count; ++k)
      out += join_row({std::to_string(r.t), std::to_string(k), on[static_cast<std::size_t>(k)] ? "1" : "0"});
  }
  return out;
}

std::string peb_map_csv(const PebMap& map) {
  std::string out = header(peb_map_columns());
  for (std::size_t j = 0; j < map.ys.size(); ++j)
    for (std::size_t i = 0; i < map.xs.size(); ++i)
      out += join_row({format_number(map.xs[i]), format_number(map.ys[j]), format_number(map.z),
                       format_number(map.peb(static_cast<int>(j), static_cast<int>(i)))});
  return out;
}

std::string monte_carlo_csv(const std::vector<RmseReport>& reports) {
  std::string out = header(monte_carlo_columns());
  for (const RmseReport& r : reports)
    out += join_row({format_number(r.snr_db), format_number(r.noise_variance), std::to_string(r.trials),
                     format_number(r.rmse), format_number(r.rmse_standard_error), format_number(r.mean_error),
                     format_number(r.peb), format_number(r.rmse / r.peb), std::to_string(r.ambiguous)});
  return out;
}

std::string bounds_csv(const BoundsReport& r) {
  std::string out = header(bounds_columns());
  const std::string nan = "nan";
  for (const LinkBounds& b : r.links)
    out += join_row({std::to_string(b.ap), format_number(b.theta), format_number(b.phi), format_number(b.tau),
                     format_number(b.efim_diagonal(0)), format_number(b.efim_diagonal(1)),
                     format_number(b.efim_diagonal(2)), format_number(b.peb), format_number(b.peb_decomposed), nan,
                     nan, nan});
  out += join_row({"-1", nan, nan, nan, nan, nan, nan, format_number(r.peb), format_number(r.peb_decomposed),
                   format_number(r.peb_2d), format_number(r.geometry_factor), format_number(r.closed_form_peb)});
  return out;
}

std::string selection_csv(const std::string& method, int k_prime, const Activation& a) {
  std::string ids;
  for (std::size_t i = 0; i < a.selected.size(); ++i) ids += (i ? ";" : "") + std::to_string(a.selected[i]);
  return "method,k_prime,selected,objective\n" +
         join_row({method, std::to_string(k_prime), ids, format_number(a.objective)});
}

std::string episode_summary(const EpisodeLog& log) {
  nlohmann::ordered_json j;
  j["name"] = log.name;
  j["steps"] = log.steps.size();
  j["ap_count"] = log.ap_count;
  j["mean_rmse"] = log.mean_rmse();
  j["max_rmse"] = log.max_rmse();
  j["mean_cardinality_error"] = log.mean_cardinality_error();
  std::vector<int> counts;
  for (const StepRecord& r : log.steps) counts.push_back(static_cast<int>(r.active.size()));
  j["active_ap_counts"] = counts;
  return j.dump(2) + "\n";
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) t.header = std::move(cells), first = false;
    else t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text(path)); }

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed", path);
}

}  // namespace dmimo
