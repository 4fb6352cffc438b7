#include "dmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"

namespace dmimo {

namespace {

constexpr std::uint64_t kMeasurementStream = 1;
constexpr std::uint64_t kTiltStream = 2;
constexpr std::uint64_t kTrajectoryStream = 3;

const Vec3 kRangeScale(1.0, 1.0, kSpeedOfLight);

void reflect_into(const Box& box, Vec3& p, Vec3* v) {
  for (int i = 0; i < 3; ++i) {
    const double lo = box.lo(i), hi = box.hi(i);
    for (int guard = 0; guard < 64 && (p(i) < lo || p(i) > hi); ++guard) {
      p(i) = p(i) < lo ? 2 * lo - p(i) : 2 * hi - p(i);
      if (v) (*v)(i) = -(*v)(i);
    }
    p(i) = std::clamp(p(i), lo, hi);
  }
}

// Truth-to-estimate matching with the smallest total squared error.
std::vector<int> match(const std::vector<Vec3>& truth, const std::vector<Vec3>& est) {
  const std::size_t m = truth.size();
  std::vector<int> best(m, -1);
  if (est.empty()) return best;
  std::vector<int> idx(est.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto at = [&](std::size_t i) { return est[static_cast<std::size_t>(idx[i])]; };
  if (m <= 7 && est.size() <= 7) {
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (std::size_t i = 0; i < m && i < idx.size(); ++i) cost += (truth[i] - at(i)).squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        for (std::size_t i = 0; i < m; ++i) best[i] = i < idx.size() ? idx[i] : -1;
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
  }
  // Too many for exhaustive search: nearest unused estimate, truth in order.
  std::vector<char> used(est.size(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < est.size(); ++j)
      if (!used[j] && (truth[i] - est[j]).squaredNorm() < bd) {
        bd = (truth[i] - est[j]).squaredNorm();
        best[i] = static_cast<int>(j);
      }
    if (best[i] >= 0) used[static_cast<std::size_t>(best[i])] = 1;
  }
  return best;
}

}  // namespace

bool Box::contains(const Vec3& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }

EadfModel EadfSource::build(const std::string& base_dir) const {
  if (kind == Kind::File) {
    const std::filesystem::path p = std::filesystem::path(base_dir) / path;
    std::ifstream in(p);
    if (!in) throw InvalidArgument("cannot open pattern file '" + p.string() + "'");
    return build_eadf(read_pattern(in));
  }
  PatternGrid g = synthesize_ideal_upa(rows, cols, spacing, modes, modes, layout);
  if (kind == Kind::Perturbed) g = perturb_pattern(g, seed);
  return build_eadf(g);
}

MotionModel TrackingSettings::motion_model() const {
  return motion == MotionKind::RandomWalk ? MotionModel::random_walk(motion_sigma, dt)
                                          : MotionModel::constant_velocity(motion_sigma, dt);
}

SignalSpec ScenarioConfig::signal_spec() const {
  SignalSpec s = make_flat_spec(subcarriers, bandwidth, 1.0);
  s.noise_variance = noise_variance_for_snr(s, snr_db, wavelength());
  return s;
}

std::vector<ApModel> build_aps(const ScenarioConfig& config) {
  std::vector<ApModel> out;
  for (const ApDescriptor& a : config.aps) out.push_back({a.eadf.build(config.base_dir), {a.position, a.omega}});
  return out;
}

std::vector<UeState> simulate_trajectory(const MotionModel& motion, const UeState& start, int steps,
                                         std::uint64_t seed, const std::optional<Box>& box) {
  if (steps < 1) throw InvalidArgument("steps must be >= 1");
  motion.validate();
  const Eigen::MatrixXd f = motion.transition();
  const Eigen::MatrixXd root = psd_sqrt(motion.process_noise);
  const int n = motion.state_dim();
  SeededStream s(seed, kTrajectoryStream);
  Eigen::VectorXd x(n);
  x.head<3>() = start.position;
  if (n == 6) x.tail<3>() = start.velocity;
  std::vector<UeState> out;
  for (int t = 0; t < steps; ++t) {
    if (t > 0) {
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) w(i) = s.normal();
      x = f * x + root * w;
      if (box) {
        Vec3 p = x.head<3>();
        if (n == 6) {
          Vec3 v = x.tail<3>();
          reflect_into(*box, p, &v);
          x.tail<3>() = v;
        } else {
          reflect_into(*box, p, nullptr);
        }
        x.head<3>() = p;
      }
    }
    UeState st;
    st.position = x.head<3>();
    if (n == 6) st.velocity = x.tail<3>();
    out.push_back(st);
  }
  return out;
}

std::vector<UeState> ue_path(const UeDescriptor& ue, const ScenarioConfig& config, int ue_index) {
  const int steps = config.steps;
  std::vector<UeState> out;
  if (ue.path == PathKind::Static) {
    out.assign(static_cast<std::size_t>(steps), UeState{ue.position, Vec3::Zero()});
    return out;
  }
  if (ue.path == PathKind::RandomWalk) {
    SeededStream s(config.seed, kTrajectoryStream);
    const std::uint64_t seed = s.child(static_cast<std::uint64_t>(ue_index)).next_u64();
    return simulate_trajectory(config.tracking.motion_model(), {ue.position, Vec3::Zero()}, steps, seed, config.box);
  }
  std::vector<Vec3> pts = ue.waypoints;
  if (ue.closed && pts.size() > 1) pts.push_back(pts.front());
  std::vector<double> cum = {0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) cum.push_back(cum.back() + (pts[i] - pts[i - 1]).norm());
  const double length = cum.back();
  for (int t = 0; t < steps; ++t) {
    double s = ue.speed * t;
    if (length <= 0.0) {
      out.push_back({pts.front(), Vec3::Zero()});
      continue;
    }
    bool stopped = false;
    if (ue.closed) s = std::fmod(s, length);
    else if (s >= length) s = length, stopped = true;
    std::size_t seg = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
    seg = std::clamp<std::size_t>(seg, 1, pts.size() - 1);
    const double segl = cum[seg] - cum[seg - 1];
    const double a = segl > 0 ? (s - cum[seg - 1]) / segl : 0.0;
    const Vec3 dir = segl > 0 ? Vec3((pts[seg] - pts[seg - 1]) / segl) : Vec3::Zero();
    out.push_back({pts[seg - 1] + a * (pts[seg] - pts[seg - 1]),
                   stopped ? Vec3::Zero() : Vec3(dir * ue.speed / config.tracking.dt)});
  }
  return out;
}

Mat3 link_crlb(const ApModel& ap, const Vec3& ue_position, const UeAntenna& ue, const SignalSpec& spec,
               double wavelength) {
  const LosParams lp = link_params(ap.geometry, ue_position, wavelength);
  const Mat3 e = efim_xi(fim_theta(ap.eadf, lp, ue, spec));
  // Equilibrate: angles in rad and delay in s differ by many orders of magnitude.
  const Vec3 d = e.diagonal().cwiseMax(0.0).cwiseSqrt();
  if ((d.array() <= 0.0).any())
    throw ConditioningError("link carries no information on an angle or delay", 0.0, Vec3::Zero());
  const Mat3 scaled = d.cwiseInverse().asDiagonal() * e * d.cwiseInverse().asDiagonal();
  const Mat3 inv = psd_inverse(scaled);
  return d.cwiseInverse().asDiagonal() * inv * d.cwiseInverse().asDiagonal();
}

std::vector<PositionMeasurement> synthesize_scan(const std::vector<ApModel>& aps, const std::vector<int>& active,
                                                 const std::vector<Vec3>& ue_positions,
                                                 const std::vector<UeAntenna>& antennas, const SignalSpec& spec,
                                                 double wavelength, const Box& box, const MeasurementSettings& m,
                                                 SeededStream& stream) {
  if (antennas.size() != ue_positions.size()) throw InvalidArgument("one antenna per UE is required");
  std::vector<PositionMeasurement> out;
  auto emit = [&](const ApModel& ap, const Vec3& pos, const UeAntenna& ant, int source, bool noisy) {
    const LosParams lp = link_params(ap.geometry, pos, wavelength);
    Mat3 cov = Mat3::Zero();
    try {
      cov = m.noise_inflation * link_crlb(ap, pos, ant, spec, wavelength);
    } catch (const NumericalError&) {
      // Directly below the array: no usable angle covariance, keep the draw noiseless.
    }
    Vec3 xi(lp.theta, lp.phi, lp.tau);
    const Vec3 w(stream.normal(), stream.normal(), stream.normal());
    if (noisy) {
      const Mat3 root = psd_sqrt(kRangeScale.asDiagonal() * cov * kRangeScale.asDiagonal());
      xi += kRangeScale.cwiseInverse().asDiagonal() * (root * w);
    }
    xi(2) = std::max(xi(2), 1e-3 / kSpeedOfLight);
    out.push_back(measurement_from_angles(ap.geometry, xi(0), xi(1), xi(2), cov, source));
  };
  for (std::size_t u = 0; u < ue_positions.size(); ++u)
    for (int k : active) {
      if (stream.uniform() >= m.p_detect) continue;
      emit(aps.at(static_cast<std::size_t>(k)), ue_positions[u], antennas[u], k, true);
    }
  if (m.clutter_intensity > 0.0 && !active.empty()) {
    const std::uint64_t count = stream.poisson(m.clutter_intensity * box.volume());
    for (std::uint64_t c = 0; c < count; ++c) {
      const Vec3 p(stream.uniform(box.lo.x(), box.hi.x()), stream.uniform(box.lo.y(), box.hi.y()),
                   stream.uniform(box.lo.z(), box.hi.z()));
      const std::size_t pick = std::min(active.size() - 1, static_cast<std::size_t>(stream.uniform() * active.size()));
      emit(aps.at(static_cast<std::size_t>(active[pick])), p, antennas.empty() ? UeAntenna{} : antennas.front(),
           PositionMeasurement::kClutter, false);
    }
  }
  return out;
}

double EpisodeLog::mean_rmse() const {
  double s = 0.0;
  int n = 0;
  for (const StepRecord& r : steps)
    for (double e : r.rmse)
      if (std::isfinite(e)) s += e, ++n;
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

double EpisodeLog::max_rmse() const {
  double m = 0.0;
  for (const StepRecord& r : steps)
    for (double e : r.rmse) m = std::max(m, e);
  return m;
}

double EpisodeLog::mean_cardinality_error() const {
  if (steps.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (const StepRecord& r : steps) s += std::abs(std::round(r.cardinality) - static_cast<double>(r.truth.size()));
  return s / static_cast<double>(steps.size());
}

double far_half_rmse(const EpisodeLog& log, const Vec3& from, int ue) {
  std::vector<double> d;
  for (const StepRecord& r : log.steps) d.push_back((r.truth.at(static_cast<std::size_t>(ue)) - from).norm());
  if (d.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted = d;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  double s = 0.0;
  int n = 0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    const double e = log.steps[t].rmse[static_cast<std::size_t>(ue)];
    if (d[t] >= median && std::isfinite(e)) s += e, ++n;
  }
  return n ? s / n : std::numeric_limits<double>::quiet_NaN();
}

EpisodeLog run_tracking_episode(const ScenarioConfig& config, int workers) {
  config.validate();
  const std::vector<ApModel> aps = build_aps(config);
  const SignalSpec spec = config.signal_spec();
  const double wavelength = config.wavelength();
  const int k_all = static_cast<int>(aps.size());
  const int m = static_cast<int>(config.ues.size());
  std::vector<std::vector<UeState>> paths;
  for (int i = 0; i < m; ++i) paths.push_back(ue_path(config.ues[static_cast<std::size_t>(i)], config, i));

  PhdFilter filter(config.tracking.phd, config.tracking.motion_model());
  const MeasurementSettings ms{config.tracking.phd.p_detect, config.tracking.phd.clutter_intensity,
                               config.tracking.noise_inflation};
  const int k_prime = config.schedule.k_prime > 0 ? config.schedule.k_prime : k_all;
  std::vector<int> all(static_cast<std::size_t>(k_all));
  std::iota(all.begin(), all.end(), 0);

  EpisodeLog log;
  log.name = config.name;
  log.ap_count = k_all;
  for (int t = 0; t < config.steps; ++t) {
    StepRecord rec;
    rec.t = t;
    std::vector<UeAntenna> antennas;
    SeededStream tilt_stream = SeededStream(config.seed, kTiltStream).child(static_cast<std::uint64_t>(t));
    for (int i = 0; i < m; ++i) {
      rec.truth.push_back(paths[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)].position);
      UeAntenna a = config.ues[static_cast<std::size_t>(i)].antenna;
      if (const auto& tilt = config.ues[static_cast<std::size_t>(i)].tilt)
        a.beta = std::isinf(tilt->kappa) ? tilt->mu : sample_von_mises(tilt->mu, tilt->kappa, tilt_stream);
      antennas.push_back(a);
    }

    filter.predict_step();
    switch (config.schedule.method) {
      case ScheduleKind::All: rec.active = all; break;
      case ScheduleKind::Fixed:
        rec.active = config.schedule.fixed;
        std::sort(rec.active.begin(), rec.active.end());
        break;
      default: {
        // No prediction exists before the first update: start with everything on.
        const Extraction pred = extract_states(filter.mixture(), m);
        if (t == 0 || pred.shortfall) {
          rec.active = all;
          break;
        }
        std::vector<Vec3> predicted;
        for (const UeState& s : pred.states) predicted.push_back(s.position);
        const SelectionProblem problem =
            build_selection_problem(aps, predicted, antennas.front(), spec, wavelength, workers);
        SelectionMethod method = SelectionMethod::BruteForce;
        if (config.schedule.method == ScheduleKind::Greedy) method = SelectionMethod::Greedy;
        if (config.schedule.method == ScheduleKind::GreedyLocal) method = SelectionMethod::GreedyLocal;
        rec.active = select_aps(problem, k_prime, method).selected;
      }
    }

    SeededStream ms_stream = SeededStream(config.seed, kMeasurementStream).child(static_cast<std::uint64_t>(t));
    const std::vector<PositionMeasurement> z =
        synthesize_scan(aps, rec.active, rec.truth, antennas, spec, wavelength, config.box, ms, ms_stream);
    const std::vector<PositionMeasurement> proxies =
        cluster_proxies(z, config.tracking.gate_distance, config.tracking.proxy_consistency);
    filter.update_step(proxies);

    const Extraction ex = extract_states(filter.mixture(), m);
    std::vector<Vec3> est;
    for (const UeState& s : ex.states) est.push_back(s.position);
    const std::vector<int> assign = match(rec.truth, est);
    for (int i = 0; i < m; ++i) {
      const int j = assign[static_cast<std::size_t>(i)];
      if (j < 0) {
        rec.estimates.push_back(Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
        rec.rmse.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        const Vec3& e = est[static_cast<std::size_t>(j)];
        rec.estimates.push_back(e);
        rec.rmse.push_back(instantaneous_rmse(e, rec.truth[static_cast<std::size_t>(i)]));
      }
    }
    rec.measurements = static_cast<int>(z.size());
    rec.proxies = static_cast<int>(proxies.size());
    rec.components = static_cast<int>(filter.mixture().size());
    rec.cardinality = total_weight(filter.mixture());
    log.steps.push_back(std::move(rec));
  }
  return log;
}

PebMap run_peb_map(const ScenarioConfig& config, int nx, int ny, std::optional<double> z, int workers) {
  if (nx < 1 || ny < 1) throw InvalidArgument("PEB map needs at least one cell per axis");
  const std::vector<ApModel> aps = build_aps(config);
  const SignalSpec spec = config.signal_spec();
  PebMap map;
  map.z = z.value_or(config.box.center().z());
  const Vec3 span = config.box.hi - config.box.lo;
  for (int i = 0; i < nx; ++i) map.xs.push_back(config.box.lo.x() + (i + 0.5) * span.x() / nx);
  for (int j = 0; j < ny; ++j) map.ys.push_back(config.box.lo.y() + (j + 0.5) * span.y() / ny);
  map.peb.resize(ny, nx);
  const UeAntenna antenna = config.ues.empty() ? UeAntenna{} : config.ues.front().antenna;
  parallel_for(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx),
               workers > 0 ? workers : default_worker_count(), [&](std::size_t idx) {
                 const int j = static_cast<int>(idx / static_cast<std::size_t>(nx));
                 const int i = static_cast<int>(idx % static_cast<std::size_t>(nx));
                 const Vec3 p(map.xs[static_cast<std::size_t>(i)], map.ys[static_cast<std::size_t>(j)], map.z);
                 Mat3 total = Mat3::Zero();
                 for (const ApModel& ap : aps) {
                   try {
                     total += ap_position_fim(ap.eadf, ap.geometry, p, antenna, spec, config.wavelength()).matrix;
                   } catch (const NumericalError&) {
                     // This AP cannot see the point (pole): it adds nothing.
                   }
                 }
                 double v;
                 try {
                   v = peb(total);
                 } catch (const NumericalError&) {
                   v = std::numeric_limits<double>::infinity();
                 }
                 map.peb(j, i) = v;
               });
  return map;
}

SelectionProblem selection_problem(const ScenarioConfig& config, int workers) {
  config.validate();
  std::vector<Vec3> positions;
  for (int i = 0; i < static_cast<int>(config.ues.size()); ++i) positions.push_back(ue_start(config, i));
  return build_selection_problem(build_aps(config), positions, config.ues.front().antenna, config.signal_spec(),
                                 config.wavelength(), workers);
}

Vec3 ue_start(const ScenarioConfig& config, int ue) {
  const UeDescriptor& u = config.ues.at(static_cast<std::size_t>(ue));
  return u.path == PathKind::Waypoints && !u.waypoints.empty() ? u.waypoints.front() : u.position;
}

MonteCarloScenario monte_carlo_scenario(const ScenarioConfig& config) {
  config.validate();
  MonteCarloScenario sc;
  sc.aps = build_aps(config);
  sc.ue_position = ue_start(config);
  sc.ue = config.ues.front().antenna;
  sc.spec = config.signal_spec();
  sc.wavelength = config.wavelength();
  return sc;
}

BoundsReport run_bounds(const ScenarioConfig& config, std::optional<Vec3> ue_position) {
  config.validate();
  const std::vector<ApModel> aps = build_aps(config);
  const SignalSpec spec = config.signal_spec();
  const UeDescriptor& ue = config.ues.front();
  BoundsReport r;
  r.ue_position = ue_position.value_or(ue_start(config));
  auto safe_peb = [](const Mat3& f) {
    try {
      return peb(f);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Mat3 total = Mat3::Zero(), total_dec = Mat3::Zero();
  std::vector<LinkInformation> diag;
  std::vector<ApGeometry> geos;
  for (std::size_t k = 0; k < aps.size(); ++k) {
    const ApModel& ap = aps[k];
    const LosParams lp = link_params(ap.geometry, r.ue_position, config.wavelength());
    LinkBounds b;
    b.ap = static_cast<int>(k);
    b.theta = lp.theta;
    b.phi = lp.phi;
    b.tau = lp.tau;
    try {
      const Mat7 f =
          ue.tilt ? averaged_fim_theta(ap.eadf, lp, spec, *ue.tilt) : fim_theta(ap.eadf, lp, ue.antenna, spec);
      b.efim_diagonal = efim_xi(f).diagonal();
      const Mat3 exact = to_global(local_fim_exact(f, lp), ap.geometry.omega).matrix;
      const Mat3 dec = to_global(local_fim_decomposed(b.efim_diagonal(0), b.efim_diagonal(1), b.efim_diagonal(2), lp),
                                 ap.geometry.omega)
                           .matrix;
      b.peb = safe_peb(exact);
      b.peb_decomposed = safe_peb(dec);
      total += exact;
      total_dec += dec;
      diag.push_back({b.efim_diagonal(0), b.efim_diagonal(1), b.efim_diagonal(2), lp.theta, lp.phi, lp.tau,
                      ap.geometry.omega});
      geos.push_back(ap.geometry);
    } catch (const NumericalError&) {
      // Pole or no information: the AP contributes nothing.
      b.peb = b.peb_decomposed = std::numeric_limits<double>::infinity();
    }
    r.links.push_back(b);
  }
  r.peb = safe_peb(total);
  r.peb_decomposed = safe_peb(total_dec);
  if (diag.empty()) {
    r.peb_2d = r.closed_form_peb = std::numeric_limits<double>::infinity();
    r.geometry_factor = 0.0;
    return r;
  }
  const std::vector<PlanarLink> planar = planar_links(diag, geos, r.ue_position.head<2>());
  try {
    r.peb_2d = peb_2d(fim_2d(planar));
  } catch (const NumericalError&) {
    r.peb_2d = std::numeric_limits<double>::infinity();
  }
  r.geometry_factor = std::abs(geometry_factor(planar));
  r.closed_form_peb = optimal_peb_closed_form(planar);
  return r;
}

namespace {

ApDescriptor facing(const Vec3& p, const Vec3& target, EadfSource src) {
  const Vec3 d = target - p;
  return {p, std::atan2(d.y(), d.x()), src};
}

}  // namespace

ScenarioConfig canonical_room_config() {
  ScenarioConfig c;
  c.name = "canonical_room";
  c.steps = 780;
  c.snr_db = 20.0;
  c.box = {Vec3(0, 0, 0), Vec3(10, 7, 3)};
  const std::vector<Vec3> sites = {{0.2, 0.2, 2}, {5.0, 0.2, 2}, {9.8, 0.2, 2}, {9.8, 3.5, 2},
                                   {9.8, 6.8, 2}, {5.0, 6.8, 2}, {0.2, 6.8, 2}, {0.2, 3.5, 2}};
  for (std::size_t k = 0; k < sites.size(); ++k) {
    EadfSource e;
    e.kind = EadfSource::Kind::Perturbed;
    e.seed = 1000 + k;
    c.aps.push_back(facing(sites[k], Vec3(5, 3.5, 2), e));
  }
  UeDescriptor ue;
  ue.path = PathKind::Waypoints;
  ue.waypoints = {{1, 1, 1.2}, {9, 1, 1.2}, {9, 6, 1.2}, {1, 6, 1.2}};
  ue.position = ue.waypoints.front();
  ue.speed = 0.1;
  c.ues.push_back(ue);
  c.tracking.phd.p_detect = 0.95;
  c.tracking.phd.clutter_intensity = 0.005;  // about one clutter point per scan
  c.tracking.motion_sigma = 0.1;
  // chi-square(3) at 0.999: keeps clutter that happens to fall inside the distance gate out of proxies.
  c.tracking.proxy_consistency = 16.27;
  GaussianComponent birth{1e-2, Eigen::VectorXd(Vec3(1, 1, 1.2)), Eigen::MatrixXd::Identity(3, 3)};
  c.tracking.phd.birth = {birth};
  c.schedule.method = ScheduleKind::All;
  c.seed = 1;
  return c;
}

ScenarioConfig canonical_monte_carlo_config() {
  ScenarioConfig c = canonical_room_config();
  c.name = "canonical_monte_carlo";
  c.steps = 1;
  c.aps.clear();
  const std::vector<Vec3> pos = {{0.2, 0.2, 2}, {9.8, 0.2, 2}, {9.8, 6.8, 2}, {0.2, 6.8, 2}};
  for (std::size_t k = 0; k < pos.size(); ++k) {
    EadfSource e;
    e.kind = EadfSource::Kind::Perturbed;
    e.seed = 100 + k;
    c.aps.push_back(facing(pos[k], Vec3(5, 3.5, 2), e));
  }
  UeDescriptor ue;
  ue.path = PathKind::Static;
  ue.position = Vec3(4.0, 3.0, 1.0);
  c.ues = {ue};
  c.tracking.phd.birth = {{1e-2, Eigen::VectorXd(ue.position), Eigen::MatrixXd::Identity(3, 3)}};
  return c;
}

MonteCarloScenario canonical_monte_carlo() { return monte_carlo_scenario(canonical_monte_carlo_config()); }

ScenarioConfig layout_config(const std::string& layout, EadfSource::Kind kind) {
  ScenarioConfig c = canonical_room_config();
  c.name = layout;
  c.steps = 1;
  c.aps.clear();
  EadfSource e;
  e.kind = kind;
  e.seed = 1000;
  // The mode window [-M/2, M/2-1] is lopsided; with 16 modes its truncation breaks the array's
  // mirror symmetry at the 1e-3 level. 40 modes push the cut tail below 1e-10.
  e.modes = 40;
  if (layout == "one_sided") {
    for (double x : {1.5, 4.0, 6.0, 8.5}) c.aps.push_back({Vec3(x, 0.2, 2), kPi / 2, e});
  } else if (layout == "four_corner") {
    for (const Vec3& p : {Vec3(0.2, 0.2, 2), Vec3(9.8, 0.2, 2), Vec3(9.8, 6.8, 2), Vec3(0.2, 6.8, 2)})
      c.aps.push_back(facing(p, Vec3(5, 3.5, 2), e));
  } else if (layout == "single") {
    c.aps.push_back(facing(Vec3(0.2, 0.2, 2), Vec3(5, 3.5, 2), e));
  } else {
    throw InvalidArgument("unknown layout '" + layout + "' (one_sided|four_corner|single)");
  }
  for (std::size_t k = 0; k < c.aps.size(); ++k) c.aps[k].eadf.seed = 1000 + k;
  return c;
}

}  // namespace dmimo
