#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "dmimo/error.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Typed access into one TOML table; every key read is recorded so leftovers can be rejected.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return table_ && table_->contains(key); }

  double number(const std::string& key, double fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError("expected a number", join(path_, key));
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (n->is_integer()) return n->as_integer()->get();
    throw ConfigError("expected an integer", join(path_, key));
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (n->is_boolean()) return n->as_boolean()->get();
    throw ConfigError("expected true or false", join(path_, key));
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (n->is_string()) return n->as_string()->get();
    throw ConfigError("expected a string", join(path_, key));
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected = 0) {
    const toml::node* n = node(key);
    if (!n) return {};
    return to_numbers(n, join(path_, key), expected);
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) {
      (void)node(key);
      return fallback;
    }
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }

  cd complex(const std::string& key, cd fallback) {
    if (!has(key)) return fallback;
    const auto v = numbers(key, 2);
    return {v[0], v[1]};
  }

  Section table(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {nullptr, join(path_, key)};
    if (!n->is_table()) throw ConfigError("expected a table", join(path_, key));
    return {n->as_table(), join(path_, key)};
  }

  std::vector<Section> tables(const std::string& key) {
    const toml::node* n = node(key);
    std::vector<Section> out;
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("expected an array of tables", join(path_, key));
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string p = join(path_, key) + "[" + std::to_string(i) + "]";
      if (!(*arr)[i].is_table()) throw ConfigError("expected a table", p);
      out.emplace_back((*arr)[i].as_table(), p);
    }
    return out;
  }

  std::vector<std::vector<double>> matrix(const std::string& key) {
    const toml::node* n = node(key);
    std::vector<std::vector<double>> out;
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("expected an array of arrays", join(path_, key));
    for (std::size_t i = 0; i < arr->size(); ++i)
      out.push_back(to_numbers(&(*arr)[i], join(path_, key) + "[" + std::to_string(i) + "]", 0));
    return out;
  }

  /// Rejects keys that were never read (typos would otherwise be silently ignored).
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) throw ConfigError("unknown key", join(path_, key));
    }
  }

 private:
  const toml::node* node(const std::string& key) {
    used_.insert(key);
    if (!table_) return nullptr;
    return table_->get(key);
  }

  static std::vector<double> to_numbers(const toml::node* n, const std::string& path, std::size_t expected) {
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("expected an array of numbers", path);
    std::vector<double> out;
    for (const auto& e : *arr) {
      auto v = e.value<double>();
      if (!v) throw ConfigError("expected an array of numbers", path);
      out.push_back(*v);
    }
    if (expected && out.size() != expected)
      throw ConfigError("expected " + std::to_string(expected) + " numbers, got " + std::to_string(out.size()), path);
    return out;
  }

  const toml::table* table_;
  std::string path_;
  std::set<std::string> used_;
};

PortLayout parse_layout(const std::string& s, const std::string& path) {
  if (s == "vertical") return PortLayout::AllVertical;
  if (s == "alternating") return PortLayout::Alternating;
  if (s == "dual") return PortLayout::DualPort;
  throw ConfigError("unknown port layout '" + s + "' (vertical|alternating|dual)", path);
}

std::string layout_name(PortLayout l) {
  switch (l) {
    case PortLayout::AllVertical: return "vertical";
    case PortLayout::Alternating: return "alternating";
    case PortLayout::DualPort: return "dual";
  }
  return "vertical";
}

std::string eadf_kind_name(EadfSource::Kind k) {
  switch (k) {
    case EadfSource::Kind::Ideal: return "ideal";
    case EadfSource::Kind::Perturbed: return "perturbed";
    case EadfSource::Kind::File: return "file";
  }
  return "ideal";
}

std::string path_name(PathKind k) {
  switch (k) {
    case PathKind::Static: return "static";
    case PathKind::Waypoints: return "waypoints";
    case PathKind::RandomWalk: return "random_walk";
  }
  return "static";
}

EadfSource read_eadf(Section s) {
  EadfSource e;
  const std::string kind = s.string("kind", "perturbed");
  if (kind == "ideal") e.kind = EadfSource::Kind::Ideal;
  else if (kind == "perturbed") e.kind = EadfSource::Kind::Perturbed;
  else if (kind == "file") e.kind = EadfSource::Kind::File;
  else throw ConfigError("unknown EADF kind '" + kind + "' (ideal|perturbed|file)", join(s.path(), "kind"));
  e.rows = static_cast<int>(s.integer("rows", e.rows));
  e.cols = static_cast<int>(s.integer("cols", e.cols));
  e.spacing = s.number("spacing", e.spacing);
  e.modes = static_cast<int>(s.integer("modes", e.modes));
  e.layout = parse_layout(s.string("layout", "vertical"), join(s.path(), "layout"));
  e.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
  e.path = s.string("path", "");
  s.finish();
  return e;
}

Eigen::MatrixXd read_covariance(Section& s, int dim) {
  if (s.has("covariance")) {
    const auto rows = s.matrix("covariance");
    if (static_cast<int>(rows.size()) != dim)
      throw ConfigError("expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix",
                        join(s.path(), "covariance"));
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(rows[i].size()) != dim)
        throw ConfigError("expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix",
                          join(s.path(), "covariance"));
      for (int j = 0; j < dim; ++j) m(i, j) = rows[i][j];
    }
    (void)s.numbers("sigma");
    return m;
  }
  const auto sd = s.numbers("sigma", static_cast<std::size_t>(dim));
  if (sd.empty()) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = sd[i] * sd[i];
  return v.asDiagonal();
}

// Shortest decimal that reads back to the same double.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  std::string s(buf, end);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string vec(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::All: return "all";
    case ScheduleKind::Fixed: return "fixed";
    case ScheduleKind::Greedy: return "greedy";
    case ScheduleKind::GreedyLocal: return "greedy_local";
    case ScheduleKind::BruteForce: return "brute";
  }
  return "all";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "all") return ScheduleKind::All;
  if (name == "fixed") return ScheduleKind::Fixed;
  if (name == "greedy") return ScheduleKind::Greedy;
  if (name == "greedy_local" || name == "greedy-local") return ScheduleKind::GreedyLocal;
  if (name == "brute" || name == "brute_force") return ScheduleKind::BruteForce;
  throw ConfigError("unknown schedule method '" + name + "' (all|fixed|greedy|greedy_local|brute)",
                    "schedule.method");
}

ScenarioConfig load_config(const std::string& text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(e.description()), "", static_cast<int>(e.source().begin.line),
                      static_cast<int>(e.source().begin.column));
  }
  ScenarioConfig c;
  c.base_dir = base_dir;
  Section top(&root, "");

  Section sc = top.table("scenario");
  c.name = sc.string("name", c.name);
  c.steps = static_cast<int>(sc.integer("steps", c.steps));
  sc.finish();

  Section sig = top.table("signal");
  c.carrier_frequency = sig.number("carrier_frequency", c.carrier_frequency);
  c.subcarriers = static_cast<int>(sig.integer("subcarriers", c.subcarriers));
  c.bandwidth = sig.number("bandwidth", c.bandwidth);
  c.snr_db = sig.number("snr_db", c.snr_db);
  sig.finish();

  Section box = top.table("box");
  c.box.lo = box.vec3("min", c.box.lo);
  c.box.hi = box.vec3("max", c.box.hi);
  box.finish();

  for (Section a : top.tables("aps")) {
    ApDescriptor ap;
    ap.position = a.vec3("position", ap.position);
    if (a.has("look_at") && a.has("omega")) throw ConfigError("give either omega or look_at", join(a.path(), "omega"));
    if (a.has("look_at")) {
      const Vec3 d = a.vec3("look_at", Vec3::Zero()) - ap.position;
      ap.omega = std::atan2(d.y(), d.x());
      (void)a.number("omega", 0.0);
    } else {
      ap.omega = a.number("omega", 0.0);
      (void)a.vec3("look_at", Vec3::Zero());
    }
    ap.eadf = read_eadf(a.table("eadf"));
    a.finish();
    c.aps.push_back(std::move(ap));
  }

  for (Section u : top.tables("ues")) {
    UeDescriptor ue;
    const std::string path = u.string("path", "waypoints");
    if (path == "static") ue.path = PathKind::Static;
    else if (path == "waypoints") ue.path = PathKind::Waypoints;
    else if (path == "random_walk") ue.path = PathKind::RandomWalk;
    else throw ConfigError("unknown path '" + path + "' (static|waypoints|random_walk)", join(u.path(), "path"));
    ue.position = u.vec3("position", ue.position);
    for (const auto& w : u.matrix("waypoints")) {
      if (w.size() != 3) throw ConfigError("waypoints must be [x, y, z] triples", join(u.path(), "waypoints"));
      ue.waypoints.emplace_back(w[0], w[1], w[2]);
    }
    ue.closed = u.boolean("closed", ue.closed);
    ue.speed = u.number("speed", ue.speed);
    ue.antenna.c_tv = u.complex("c_tv", ue.antenna.c_tv);
    ue.antenna.c_th = u.complex("c_th", ue.antenna.c_th);
    ue.antenna.beta = u.number("beta", ue.antenna.beta);
    if (u.has("tilt")) {
      Section t = u.table("tilt");
      TiltPrior p;
      p.mu = t.number("mu", 0.0);
      p.kappa = t.number("kappa", 0.0);
      t.finish();
      ue.tilt = p;
    } else {
      (void)u.table("tilt");
    }
    u.finish();
    c.ues.push_back(std::move(ue));
  }

  Section tr = top.table("tracking");
  TrackingSettings& t = c.tracking;
  t.phd.p_detect = tr.number("p_detect", t.phd.p_detect);
  t.phd.clutter_intensity = tr.number("clutter_intensity", t.phd.clutter_intensity);
  t.phd.prune_threshold = tr.number("prune_threshold", t.phd.prune_threshold);
  t.phd.merge_threshold = tr.number("merge_threshold", t.phd.merge_threshold);
  t.phd.max_components = static_cast<int>(tr.integer("max_components", t.phd.max_components));
  const std::string motion = tr.string("motion", "random_walk");
  if (motion == "random_walk") t.motion = MotionKind::RandomWalk;
  else if (motion == "constant_velocity") t.motion = MotionKind::ConstantVelocity;
  else throw ConfigError("unknown motion '" + motion + "' (random_walk|constant_velocity)", "tracking.motion");
  t.motion_sigma = tr.number("motion_sigma", t.motion_sigma);
  t.dt = tr.number("dt", t.dt);
  t.gate_distance = tr.number("gate_distance", t.gate_distance);
  t.proxy_consistency = tr.number("proxy_consistency", t.proxy_consistency);
  t.noise_inflation = tr.number("noise_inflation", t.noise_inflation);
  const int dim = t.motion == MotionKind::RandomWalk ? 3 : 6;
  const bool explicit_birth = tr.has("birth");
  for (Section b : tr.tables("birth")) {
    GaussianComponent g;
    g.weight = b.number("weight", 1e-2);
    const auto mean = b.numbers("mean", static_cast<std::size_t>(dim));
    if (mean.empty()) throw ConfigError("missing", join(b.path(), "mean"));
    g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
    g.covariance = read_covariance(b, dim);
    b.finish();
    t.phd.birth.push_back(std::move(g));
  }
  tr.finish();
  if (!explicit_birth) {
    // One component at every UE's entry point.
    for (const UeDescriptor& ue : c.ues) {
      GaussianComponent g;
      g.weight = 1e-2;
      g.mean = Eigen::VectorXd::Zero(dim);
      g.mean.head<3>() = ue.path == PathKind::Waypoints && !ue.waypoints.empty() ? ue.waypoints.front() : ue.position;
      g.covariance = Eigen::MatrixXd::Identity(dim, dim);
      t.phd.birth.push_back(std::move(g));
    }
  }

  Section sch = top.table("schedule");
  c.schedule.method = parse_schedule_kind(sch.string("method", "all"));
  c.schedule.k_prime = static_cast<int>(sch.integer("k_prime", 0));
  for (double v : sch.numbers("fixed")) {
    if (v != std::floor(v)) throw ConfigError("AP ids must be integers", "schedule.fixed");
    c.schedule.fixed.push_back(static_cast<int>(v));
  }
  sch.finish();

  Section seeds = top.table("seeds");
  c.seed = static_cast<std::uint64_t>(seeds.integer("master", 1));
  seeds.finish();
  top.finish();

  if (const char* env = std::getenv("DMIMO_SEED"); env && *env) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [p, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || p != end) throw ConfigError("DMIMO_SEED must be a non-negative integer", "seeds.master");
    c.seed = v;
  }
  c.validate();
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", "");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path p(path);
  return load_config(ss.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

void ScenarioConfig::validate() const {
  auto need = [](bool ok, const std::string& what, const std::string& path) {
    if (!ok) throw ConfigError(what, path);
  };
  need(steps >= 1, "must be >= 1", "scenario.steps");
  need(carrier_frequency > 0, "must be positive", "signal.carrier_frequency");
  need(subcarriers >= 2, "must be >= 2", "signal.subcarriers");
  need(bandwidth > 0, "must be positive", "signal.bandwidth");
  need(std::isfinite(snr_db), "must be finite", "signal.snr_db");
  need((box.hi.array() > box.lo.array()).all(), "max must exceed min on every axis", "box.max");
  need(!aps.empty(), "at least one AP is required", "aps");
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const std::string p = "aps[" + std::to_string(i) + "].eadf";
    const EadfSource& e = aps[i].eadf;
    need(aps[i].position.allFinite() && std::isfinite(aps[i].omega), "must be finite",
         "aps[" + std::to_string(i) + "].position");
    if (e.kind == EadfSource::Kind::File) {
      need(!e.path.empty(), "file EADF needs a path", p + ".path");
      const std::filesystem::path f = std::filesystem::path(base_dir) / e.path;
      need(std::filesystem::exists(f), "file not found: " + f.string(), p + ".path");
    } else {
      need(e.rows >= 1 && e.cols >= 1, "array needs at least one row and column", p + ".rows");
      need(e.modes >= 4 && e.modes % 2 == 0, "must be an even number >= 4", p + ".modes");
      need(e.spacing > 0, "must be positive", p + ".spacing");
    }
  }
  need(!ues.empty(), "at least one UE is required", "ues");
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const std::string p = "ues[" + std::to_string(i) + "]";
    const UeDescriptor& u = ues[i];
    if (u.path == PathKind::Waypoints) {
      need(!u.waypoints.empty(), "waypoint path needs waypoints", p + ".waypoints");
      need(u.speed > 0, "must be positive", p + ".speed");
    }
    if (u.tilt) need(u.tilt->kappa >= 0, "must be >= 0", p + ".tilt.kappa");
    need(std::abs(u.antenna.c_tv) + std::abs(u.antenna.c_th) > 0, "UE antenna needs a nonzero gain", p + ".c_tv");
  }
  const PhdConfig& phd = tracking.phd;
  need(phd.p_detect >= 0 && phd.p_detect <= 1, "must be in [0, 1]", "tracking.p_detect");
  need(phd.clutter_intensity >= 0, "must be >= 0", "tracking.clutter_intensity");
  need(phd.prune_threshold > 0, "must be positive", "tracking.prune_threshold");
  need(phd.merge_threshold > 0, "must be positive", "tracking.merge_threshold");
  need(phd.max_components >= 1, "must be >= 1", "tracking.max_components");
  need(tracking.motion_sigma >= 0, "must be >= 0", "tracking.motion_sigma");
  need(tracking.dt > 0, "must be positive", "tracking.dt");
  need(tracking.gate_distance > 0, "must be positive", "tracking.gate_distance");
  need(tracking.proxy_consistency > 0, "must be positive", "tracking.proxy_consistency");
  need(tracking.noise_inflation >= 0, "must be >= 0", "tracking.noise_inflation");
  const int dim = tracking.motion == MotionKind::RandomWalk ? 3 : 6;
  for (std::size_t i = 0; i < phd.birth.size(); ++i) {
    const std::string p = "tracking.birth[" + std::to_string(i) + "]";
    need(phd.birth[i].mean.size() == dim, "mean must have " + std::to_string(dim) + " entries", p + ".mean");
    need(phd.birth[i].covariance.rows() == dim && is_psd(phd.birth[i].covariance), "must be a PSD matrix",
         p + ".covariance");
    need(phd.birth[i].weight >= 0, "must be >= 0", p + ".weight");
  }
  const int k = static_cast<int>(aps.size());
  need(schedule.k_prime >= 0 && schedule.k_prime <= k,
       "must be in [1, " + std::to_string(k) + "] (0 selects all APs)", "schedule.k_prime");
  if (schedule.method == ScheduleKind::Fixed) {
    need(!schedule.fixed.empty(), "fixed schedule needs AP ids", "schedule.fixed");
    for (int id : schedule.fixed)
      need(id >= 0 && id < k, "AP id " + std::to_string(id) + " out of range", "schedule.fixed");
  }
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "[scenario]\nname = " << quoted(c.name) << "\nsteps = " << c.steps << "\n\n";
  o << "[signal]\ncarrier_frequency = " << num(c.carrier_frequency) << "\nsubcarriers = " << c.subcarriers
    << "\nbandwidth = " << num(c.bandwidth) << "\nsnr_db = " << num(c.snr_db) << "\n\n";
  o << "[box]\nmin = " << vec(c.box.lo) << "\nmax = " << vec(c.box.hi) << "\n\n";
  o << "[seeds]\nmaster = " << c.seed << "\n\n";
  o << "[schedule]\nmethod = " << quoted(to_string(c.schedule.method)) << "\nk_prime = " << c.schedule.k_prime;
  if (!c.schedule.fixed.empty()) {
    o << "\nfixed = [";
    for (std::size_t i = 0; i < c.schedule.fixed.size(); ++i) o << (i ? ", " : "") << c.schedule.fixed[i];
    o << "]";
  }
  o << "\n\n";
  const TrackingSettings& t = c.tracking;
  o << "[tracking]\np_detect = " << num(t.phd.p_detect) << "\nclutter_intensity = " << num(t.phd.clutter_intensity)
    << "\nprune_threshold = " << num(t.phd.prune_threshold) << "\nmerge_threshold = " << num(t.phd.merge_threshold)
    << "\nmax_components = " << t.phd.max_components << "\nmotion = "
    << quoted(t.motion == MotionKind::RandomWalk ? "random_walk" : "constant_velocity")
    << "\nmotion_sigma = " << num(t.motion_sigma) << "\ndt = " << num(t.dt)
    << "\ngate_distance = " << num(t.gate_distance) << "\nproxy_consistency = " << num(t.proxy_consistency)
    << "\nnoise_inflation = " << num(t.noise_inflation) << "\n\n";
  for (const GaussianComponent& b : t.phd.birth) {
    o << "[[tracking.birth]]\nweight = " << num(b.weight) << "\nmean = " << vec(b.mean) << "\ncovariance = [";
    for (int i = 0; i < b.covariance.rows(); ++i) o << (i ? ", " : "") << vec(b.covariance.row(i).transpose());
    o << "]\n\n";
  }
  for (const ApDescriptor& a : c.aps) {
    const EadfSource& e = a.eadf;
    o << "[[aps]]\nposition = " << vec(a.position) << "\nomega = " << num(a.omega) << "\neadf = { kind = "
      << quoted(eadf_kind_name(e.kind)) << ", rows = " << e.rows << ", cols = " << e.cols
      << ", spacing = " << num(e.spacing) << ", modes = " << e.modes << ", layout = " << quoted(layout_name(e.layout))
      << ", seed = " << e.seed;
    if (!e.path.empty()) o << ", path = " << quoted(e.path);
    o << " }\n\n";
  }
  for (const UeDescriptor& u : c.ues) {
    o << "[[ues]]\npath = " << quoted(path_name(u.path)) << "\nposition = " << vec(u.position);
    if (!u.waypoints.empty()) {
      o << "\nwaypoints = [";
      for (std::size_t i = 0; i < u.waypoints.size(); ++i) o << (i ? ", " : "") << vec(u.waypoints[i]);
      o << "]";
    }
    o << "\nclosed = " << (u.closed ? "true" : "false") << "\nspeed = " << num(u.speed)
      << "\nc_tv = [" << num(u.antenna.c_tv.real()) << ", " << num(u.antenna.c_tv.imag()) << "]"
      << "\nc_th = [" << num(u.antenna.c_th.real()) << ", " << num(u.antenna.c_th.imag()) << "]"
      << "\nbeta = " << num(u.antenna.beta);
    if (u.tilt) o << "\ntilt = { mu = " << num(u.tilt->mu) << ", kappa = " << num(u.tilt->kappa) << " }";
    o << "\n\n";
  }
  return o.str();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto same_eadf = [](const EadfSource& x, const EadfSource& y) {
    return x.kind == y.kind && x.rows == y.rows && x.cols == y.cols && x.spacing == y.spacing && x.modes == y.modes &&
           x.layout == y.layout && x.seed == y.seed && x.path == y.path;
  };
  if (a.name != b.name || a.steps != b.steps || a.carrier_frequency != b.carrier_frequency ||
      a.subcarriers != b.subcarriers || a.bandwidth != b.bandwidth || a.snr_db != b.snr_db || a.seed != b.seed)
    return false;
  if (a.box.lo != b.box.lo || a.box.hi != b.box.hi) return false;
  if (a.aps.size() != b.aps.size() || a.ues.size() != b.ues.size()) return false;
  for (std::size_t i = 0; i < a.aps.size(); ++i)
    if (a.aps[i].position != b.aps[i].position || a.aps[i].omega != b.aps[i].omega ||
        !same_eadf(a.aps[i].eadf, b.aps[i].eadf))
      return false;
  for (std::size_t i = 0; i < a.ues.size(); ++i) {
    const UeDescriptor &x = a.ues[i], &y = b.ues[i];
    if (x.path != y.path || x.position != y.position || x.waypoints != y.waypoints || x.closed != y.closed ||
        x.speed != y.speed || x.antenna.c_tv != y.antenna.c_tv || x.antenna.c_th != y.antenna.c_th ||
        x.antenna.beta != y.antenna.beta || x.tilt.has_value() != y.tilt.has_value())
      return false;
    if (x.tilt && (x.tilt->mu != y.tilt->mu || x.tilt->kappa != y.tilt->kappa)) return false;
  }
  const TrackingSettings &s = a.tracking, &t = b.tracking;
  if (s.phd.p_detect != t.phd.p_detect || s.phd.clutter_intensity != t.phd.clutter_intensity ||
      s.phd.prune_threshold != t.phd.prune_threshold || s.phd.merge_threshold != t.phd.merge_threshold ||
      s.phd.max_components != t.phd.max_components || s.motion != t.motion || s.motion_sigma != t.motion_sigma ||
      s.dt != t.dt || s.gate_distance != t.gate_distance || s.proxy_consistency != t.proxy_consistency ||
      s.noise_inflation != t.noise_inflation ||
      s.phd.birth.size() != t.phd.birth.size())
    return false;
  for (std::size_t i = 0; i < s.phd.birth.size(); ++i)
    if (s.phd.birth[i].weight != t.phd.birth[i].weight || !same(s.phd.birth[i].mean, t.phd.birth[i].mean) ||
        !same(s.phd.birth[i].covariance, t.phd.birth[i].covariance))
      return false;
  return a.schedule.method == b.schedule.method && a.schedule.k_prime == b.schedule.k_prime &&
         a.schedule.fixed == b.schedule.fixed;
}

}  // namespace dmimo
