#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/fim.hpp"
#include "dmimo/mathcore.hpp"

namespace dmimo {

struct UeState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct GaussianComponent {
  double weight = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

using GaussianMixture = std::vector<GaussianComponent>;

enum class MotionKind { RandomWalk, ConstantVelocity };

/// Linear Gaussian motion. Random walk: 3D position state, F = I. Constant velocity:
/// state (p, v), F = [I dt I; 0 I].
struct MotionModel {
  MotionKind kind = MotionKind::RandomWalk;
  Eigen::MatrixXd process_noise = 0.01 * Eigen::MatrixXd::Identity(3, 3);
  double dt = 1.0;

  int state_dim() const { return kind == MotionKind::RandomWalk ? 3 : 6; }
  Eigen::MatrixXd transition() const;
  void validate() const;

  static MotionModel random_walk(double sigma, double dt = 1.0);
  /// Discretized white-noise acceleration with spectral density sigma_a^2.
  static MotionModel constant_velocity(double sigma_a, double dt = 1.0);
};

struct PositionMeasurement {
  static constexpr int kProxy = -1;
  static constexpr int kClutter = -2;

  Vec3 value = Vec3::Zero();
  Mat3 covariance = Mat3::Identity();
  int source_ap = kProxy;
};

struct PhdConfig {
  double p_detect = 0.95;
  /// Clutter intensity per unit volume (m^-3), the kappa(z) of the update denominator.
  double clutter_intensity = 0.0;
  double prune_threshold = 1e-4;
  double merge_threshold = 4.0;
  int max_components = 500;
  GaussianMixture birth;

  void validate() const;
};

/// Position block of a state vector.
Vec3 position_of(const Eigen::VectorXd& state);

/// Predicted mixture: each component propagated through the motion model, then the birth
/// components appended (weights unchanged, survival probability one).
GaussianMixture predict(const GaussianMixture& mixture, const MotionModel& motion,
                        const GaussianMixture& birth = {});

/// GM-PHD measurement update with measurement matrix selecting the position block.
GaussianMixture update(const GaussianMixture& mixture, const std::vector<PositionMeasurement>& measurements,
                       const PhdConfig& cfg);

/// Prune, merge (Mahalanobis^2 in the heaviest component's covariance), cap by weight.
GaussianMixture prune_merge(const GaussianMixture& mixture, const PhdConfig& cfg);

struct Extraction {
  std::vector<UeState> states;
  bool shortfall = false;  ///< fewer components than requested
};

/// Means of the `count` heaviest components; ties go to the lower index.
Extraction extract_states(const GaussianMixture& mixture, int count);

double total_weight(const GaussianMixture& mixture);

/// Gaussian density N(x; mean, cov).
double gaussian_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

/// Unscented transform (2n+1 sigma points, n = 3, kappa = 0) of (theta, phi, tau) with
/// covariance `cov` (same order) through the spherical-to-global map of `ap`.
PositionMeasurement measurement_from_angles(const ApGeometry& ap, double theta, double phi, double tau,
                                            const Mat3& cov, int source_ap = PositionMeasurement::kProxy);

/// Global position of an AP-frame direction and delay.
Vec3 spherical_to_global(const ApGeometry& ap, double theta, double phi, double tau);

/// Single-linkage grouping at `gate_distance`; groups of two or more are fused in
/// information form into a proxy measurement. Output order follows each group's first member.
/// A finite `consistency_gate` additionally requires d^T (W_i + W_j)^-1 d <= gate for a link.
std::vector<PositionMeasurement> cluster_proxies(const std::vector<PositionMeasurement>& measurements,
                                                 double gate_distance,
                                                 double consistency_gate = std::numeric_limits<double>::infinity());

/// Kalman track for the nearest-neighbour baseline.
struct Track {
  int id = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int misses = 0;
};

struct KalmanUpdate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Vec3 innovation;
  Mat3 innovation_covariance;
};

/// Standard Kalman update of a position-observing state.
KalmanUpdate kalman_update(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           const PositionMeasurement& z);

/// Predict every track, then associate greedily by increasing Mahalanobis^2 (pairs above
/// `gate` are ignored, each measurement used once) and update; unassociated tracks coast.
std::vector<Track> kalman_baseline_step(const std::vector<Track>& tracks,
                                        const std::vector<PositionMeasurement>& measurements,
                                        const MotionModel& motion, double gate);

double instantaneous_rmse(const Vec3& estimate, const Vec3& truth);

/// GM-PHD filter state with a fixed configuration.
class PhdFilter {
 public:
  PhdFilter(PhdConfig config, MotionModel motion);

  /// Predict (with birth) and return the predicted mixture.
  const GaussianMixture& predict_step();
  /// Update with the measurements of this scan, then prune/merge.
  const GaussianMixture& update_step(const std::vector<PositionMeasurement>& measurements);

  const GaussianMixture& mixture() const { return mixture_; }
  void set_mixture(GaussianMixture m) { mixture_ = std::move(m); }
  const PhdConfig& config() const { return config_; }
  const MotionModel& motion() const { return motion_; }

 private:
  PhdConfig config_;
  MotionModel motion_;
  GaussianMixture mixture_;
};

}  // namespace dmimo
