#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dmimo/apselect.hpp"
#include "dmimo/eadf.hpp"
#include "dmimo/estimator.hpp"
#include "dmimo/fim.hpp"
#include "dmimo/signal.hpp"
#include "dmimo/tracking.hpp"

namespace dmimo {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3(10.0, 7.0, 3.0);

  double volume() const { return (hi - lo).prod(); }
  bool contains(const Vec3& p) const;
  Vec3 center() const { return 0.5 * (lo + hi); }
};

struct EadfSource {
  enum class Kind { Ideal, Perturbed, File };
  Kind kind = Kind::Perturbed;
  int rows = 2;
  int cols = 4;
  double spacing = 0.5;  ///< wavelengths
  int modes = 16;        ///< M_theta = M_phi
  PortLayout layout = PortLayout::AllVertical;
  std::uint64_t seed = 0;
  std::string path;  ///< pattern file (Kind::File), relative to the config's directory

  EadfModel build(const std::string& base_dir = ".") const;
};

struct ApDescriptor {
  Vec3 position = Vec3::Zero();
  double omega = 0.0;
  EadfSource eadf;
};

enum class PathKind { Static, Waypoints, RandomWalk };

struct UeDescriptor {
  PathKind path = PathKind::Waypoints;
  Vec3 position = Vec3(1.0, 1.0, 1.2);     ///< start (Static, RandomWalk)
  std::vector<Vec3> waypoints;              ///< Waypoints: traversed in order at `speed`
  bool closed = true;                       ///< loop back to the first waypoint
  double speed = 0.1;                       ///< metres per step
  UeAntenna antenna;
  std::optional<TiltPrior> tilt;            ///< per-step beta drawn from this prior when set
};

struct TrackingSettings {
  PhdConfig phd;
  MotionKind motion = MotionKind::RandomWalk;
  double motion_sigma = 0.1;  ///< random walk: position std per step; CV: acceleration density
  double dt = 1.0;
  double gate_distance = 1.0;
  /// Mahalanobis^2 bound for linking two detections into one proxy (inf disables the test).
  double proxy_consistency = std::numeric_limits<double>::infinity();
  double noise_inflation = 1.0;  ///< scales the CRLB measurement covariance

  MotionModel motion_model() const;
};

enum class ScheduleKind { All, Fixed, Greedy, GreedyLocal, BruteForce };

struct Schedule {
  ScheduleKind method = ScheduleKind::All;
  int k_prime = 0;           ///< 0 means K
  std::vector<int> fixed;    ///< AP ids for ScheduleKind::Fixed
};

struct ScenarioConfig {
  std::string name = "scenario";
  int steps = 100;
  double carrier_frequency = 5.6e9;
  int subcarriers = 32;
  double bandwidth = 400e6;
  double snr_db = 20.0;  ///< reference SNR at 1 m
  Box box;
  std::vector<ApDescriptor> aps;
  std::vector<UeDescriptor> ues;
  TrackingSettings tracking;
  Schedule schedule;
  std::uint64_t seed = 1;
  std::string base_dir = ".";  ///< where relative file references resolve; not serialized

  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  /// Signal spec with the noise variance implied by snr_db.
  SignalSpec signal_spec() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// TOML text to config. Parse errors carry line and column; semantic errors a field path.
/// DMIMO_SEED, when set, replaces seeds.master.
ScenarioConfig load_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config_file(const std::string& path);
/// Canonical TOML text; load_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);
bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

std::vector<ApModel> build_aps(const ScenarioConfig& config);

/// Sampled path under the motion model; with `box`, positions are reflected back inside.
std::vector<UeState> simulate_trajectory(const MotionModel& motion, const UeState& start, int steps,
                                         std::uint64_t seed, const std::optional<Box>& box = std::nullopt);

/// Deterministic path of one UE descriptor (random walks use the stream for that UE).
std::vector<UeState> ue_path(const UeDescriptor& ue, const ScenarioConfig& config, int ue_index);

struct MeasurementSettings {
  double p_detect = 0.95;
  double clutter_intensity = 0.0;  ///< per m^3 per step
  double noise_inflation = 1.0;
};

/// Angle/delay CRLB of one link, (theta, phi, tau) order.
Mat3 link_crlb(const ApModel& ap, const Vec3& ue_position, const UeAntenna& ue, const SignalSpec& spec,
               double wavelength);

/// One scan: for every UE and active AP a detection with probability p_D (CRLB noise on
/// theta, phi, tau, converted by the unscented transform), then Poisson(lambda |box|)
/// clutter points uniform over the box attributed to a random active AP.
std::vector<PositionMeasurement> synthesize_scan(const std::vector<ApModel>& aps, const std::vector<int>& active,
                                                 const std::vector<Vec3>& ue_positions,
                                                 const std::vector<UeAntenna>& antennas, const SignalSpec& spec,
                                                 double wavelength, const Box& box, const MeasurementSettings& m,
                                                 SeededStream& stream);

struct StepRecord {
  int t = 0;
  std::vector<Vec3> truth;
  std::vector<Vec3> estimates;  ///< matched to truth order; missing entries are NaN
  std::vector<double> rmse;     ///< per UE
  std::vector<int> active;
  int measurements = 0;
  int proxies = 0;
  int components = 0;
  double cardinality = 0.0;     ///< sum of weights
};

struct EpisodeLog {
  std::string name;
  int ap_count = 0;
  std::vector<StepRecord> steps;

  double mean_rmse() const;
  double max_rmse() const;
  /// mean |round(sum w) - M|
  double mean_cardinality_error() const;
};

/// Mean RMSE of UE `ue` over the steps whose true distance from `from` is at least the median distance.
double far_half_rmse(const EpisodeLog& log, const Vec3& from, int ue = 0);

/// Selection, measurement synthesis, proxy clustering, PHD recursion and extraction per step.
/// `workers` only parallelizes the per-step candidate FIMs; results do not depend on it.
EpisodeLog run_tracking_episode(const ScenarioConfig& config, int workers = 1);

/// Selection problem at every UE's start position (first UE's antenna).
SelectionProblem selection_problem(const ScenarioConfig& config, int workers = 1);

struct PebMap {
  std::vector<double> xs, ys;
  double z = 0.0;
  Eigen::MatrixXd peb;  ///< peb(iy, ix); +inf where singular
};

/// Cell-centred nx x ny grid over the box footprint at height z (default: box centre).
PebMap run_peb_map(const ScenarioConfig& config, int nx, int ny, std::optional<double> z = std::nullopt,
                   int workers = 0);

/// Per-link and joint bounds at one UE position.
struct LinkBounds {
  int ap = 0;
  double theta = 0.0, phi = 0.0, tau = 0.0;
  Vec3 efim_diagonal = Vec3::Zero();  ///< (theta, phi, tau) entries of the link EFIM
  double peb = 0.0;                   ///< this AP alone, exact local FIM; +inf if singular
  double peb_decomposed = 0.0;        ///< same from the three ranging-direction terms
};

struct BoundsReport {
  Vec3 ue_position = Vec3::Zero();
  std::vector<LinkBounds> links;
  double peb = 0.0;
  double peb_decomposed = 0.0;
  double peb_2d = 0.0;               ///< azimuth-plane FIM
  double geometry_factor = 0.0;      ///< |D|
  double closed_form_peb = 0.0;      ///< planar PEB a zero-|D| layout would reach
};

/// FIM-level view of the configured APs at the first UE's start (or `ue_position`).
/// A UE tilt prior switches to the tilt-averaged FIM.
BoundsReport run_bounds(const ScenarioConfig& config, std::optional<Vec3> ue_position = std::nullopt);

/// Position of UE `ue` at step 0.
Vec3 ue_start(const ScenarioConfig& config, int ue = 0);

/// ML-vs-PEB Monte Carlo setup from a config: its APs, signal and first UE.
MonteCarloScenario monte_carlo_scenario(const ScenarioConfig& config);

/// Built-in scenarios used by tests, fixtures and docs.
ScenarioConfig canonical_room_config();
/// Four perturbed-EADF APs in the room corners facing its centre, one static UE at (4, 3, 1).
ScenarioConfig canonical_monte_carlo_config();
MonteCarloScenario canonical_monte_carlo();
/// Room APs on a single wall (one-sided) or in the four corners.
ScenarioConfig layout_config(const std::string& layout, EadfSource::Kind kind = EadfSource::Kind::Ideal);

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

}  // namespace dmimo
