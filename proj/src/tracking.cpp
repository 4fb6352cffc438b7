#include "dmimo/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

namespace {

Eigen::MatrixXd position_selector(int dim) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, dim);
  h.leftCols(3).setIdentity();
  return h;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Eigen::MatrixXd MotionModel::transition() const {
  const int n = state_dim();
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(n, n);
  if (kind == MotionKind::ConstantVelocity) f.topRightCorner(3, 3) = dt * Eigen::MatrixXd::Identity(3, 3);
  return f;
}

void MotionModel::validate() const {
  const int n = state_dim();
  if (process_noise.rows() != n || process_noise.cols() != n)
    throw InvalidArgument("process noise must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!is_psd(process_noise)) throw InvalidArgument("process noise must be symmetric PSD");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
}

MotionModel MotionModel::random_walk(double sigma, double dt) {
  return {MotionKind::RandomWalk, sigma * sigma * Eigen::MatrixXd::Identity(3, 3), dt};
}

MotionModel MotionModel::constant_velocity(double sigma_a, double dt) {
  Eigen::MatrixXd q(6, 6);
  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  q << dt * dt * dt / 3 * i3, dt * dt / 2 * i3, dt * dt / 2 * i3, dt * i3;
  return {MotionKind::ConstantVelocity, sigma_a * sigma_a * q, dt};
}

void PhdConfig::validate() const {
  if (!(p_detect >= 0.0 && p_detect <= 1.0)) throw InvalidArgument("p_detect must be in [0,1]");
  if (!(clutter_intensity >= 0.0)) throw InvalidArgument("clutter intensity must be >= 0");
  if (!(prune_threshold > 0.0) || !(merge_threshold > 0.0)) throw InvalidArgument("thresholds must be positive");
  if (max_components < 1) throw InvalidArgument("max_components must be >= 1");
}

Vec3 position_of(const Eigen::VectorXd& state) { return state.head<3>(); }

GaussianMixture predict(const GaussianMixture& mixture, const MotionModel& motion, const GaussianMixture& birth) {
  const Eigen::MatrixXd f = motion.transition();
  GaussianMixture out;
  out.reserve(mixture.size() + birth.size());
  for (const GaussianComponent& c : mixture) {
    if (c.mean.size() != motion.state_dim()) throw InvalidArgument("component state dimension mismatch");
    out.push_back({c.weight, f * c.mean, symmetrize(f * c.covariance * f.transpose() + motion.process_noise)});
  }
  for (const GaussianComponent& b : birth) out.push_back(b);
  return out;
}

double gaussian_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  const Eigen::VectorXd d = llt.matrixL().solve(x - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double k = static_cast<double>(x.size());
  return std::exp(-0.5 * d.squaredNorm() - 0.5 * log_det - 0.5 * k * std::log(kTwoPi));
}

KalmanUpdate kalman_update(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                           const PositionMeasurement& z) {
  const int n = static_cast<int>(mean.size());
  const Eigen::MatrixXd h = position_selector(n);
  const Mat3 s = symmetrize(h * covariance * h.transpose()) + z.covariance;
  Eigen::LLT<Mat3> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("innovation covariance is singular");
  const Eigen::MatrixXd k = llt.solve(h * covariance).transpose();
  KalmanUpdate u;
  u.innovation = z.value - position_of(mean);
  u.innovation_covariance = s;
  u.mean = mean + k * u.innovation;
  // Joseph form keeps the covariance PSD under rounding.
  const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(n, n) - k * h;
  u.covariance = symmetrize(ikh * covariance * ikh.transpose() + k * z.covariance * k.transpose());
  return u;
}

GaussianMixture update(const GaussianMixture& mixture, const std::vector<PositionMeasurement>& measurements,
                       const PhdConfig& cfg) {
  cfg.validate();
  GaussianMixture out;
  out.reserve(mixture.size() * (measurements.size() + 1));
  for (const GaussianComponent& c : mixture)
    out.push_back({(1.0 - cfg.p_detect) * c.weight, c.mean, c.covariance});
  for (std::size_t j = 0; j < measurements.size(); ++j) {
    const PositionMeasurement& z = measurements[j];
    if (!is_psd(z.covariance)) throw InvalidArgument("measurement " + std::to_string(j) + " covariance is not PSD");
    const std::size_t first = out.size();
    double denom = cfg.clutter_intensity;
    for (std::size_t i = 0; i < mixture.size(); ++i) {
      KalmanUpdate u;
      try {
        u = kalman_update(mixture[i].mean, mixture[i].covariance, z);
      } catch (const NumericalError&) {
        throw NumericalError("singular innovation covariance for component " + std::to_string(i) +
                             " and measurement " + std::to_string(j));
      }
      const double w = cfg.p_detect * mixture[i].weight *
                       gaussian_density(z.value, position_of(mixture[i].mean), u.innovation_covariance);
      denom += w;
      out.push_back({w, std::move(u.mean), std::move(u.covariance)});
    }
    for (std::size_t i = first; i < out.size(); ++i) out[i].weight = denom > 0.0 ? out[i].weight / denom : 0.0;
  }
  return out;
}

GaussianMixture prune_merge(const GaussianMixture& mixture, const PhdConfig& cfg) {
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < mixture.size(); ++i)
    if (mixture[i].weight >= cfg.prune_threshold) alive.push_back(i);
  GaussianMixture out;
  while (!alive.empty()) {
    // Heaviest survivor, lowest index on ties.
    std::size_t best = 0;
    for (std::size_t a = 1; a < alive.size(); ++a)
      if (mixture[alive[a]].weight > mixture[alive[best]].weight) best = a;
    const GaussianComponent& head = mixture[alive[best]];
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(head.covariance);
    std::vector<std::size_t> group, rest;
    for (std::size_t idx : alive) {
      const Eigen::VectorXd d = mixture[idx].mean - head.mean;
      const double m2 = idx == alive[best] ? 0.0 : d.dot(ldlt.solve(d));
      (m2 <= cfg.merge_threshold ? group : rest).push_back(idx);
    }
    GaussianComponent merged;
    merged.weight = 0.0;
    for (std::size_t idx : group) merged.weight += mixture[idx].weight;
    merged.mean = Eigen::VectorXd::Zero(head.mean.size());
    for (std::size_t idx : group) merged.mean += mixture[idx].weight * mixture[idx].mean;
    merged.mean /= merged.weight;
    merged.covariance = Eigen::MatrixXd::Zero(head.mean.size(), head.mean.size());
    for (std::size_t idx : group) {
      const Eigen::VectorXd d = merged.mean - mixture[idx].mean;
      merged.covariance += mixture[idx].weight * (mixture[idx].covariance + d * d.transpose());
    }
    merged.covariance = symmetrize(merged.covariance / merged.weight);
    out.push_back(std::move(merged));
    alive = std::move(rest);
  }
  if (static_cast<int>(out.size()) > cfg.max_components) {
    std::stable_sort(out.begin(), out.end(),
                     [](const GaussianComponent& a, const GaussianComponent& b) { return a.weight > b.weight; });
    out.resize(static_cast<std::size_t>(cfg.max_components));
  }
  return out;
}

Extraction extract_states(const GaussianMixture& mixture, int count) {
  if (count < 0) throw InvalidArgument("state count must be >= 0");
  std::vector<std::size_t> order(mixture.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mixture[a].weight > mixture[b].weight; });
  Extraction e;
  e.shortfall = static_cast<std::size_t>(count) > mixture.size();
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(count), mixture.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& m = mixture[order[i]].mean;
    UeState s;
    s.position = position_of(m);
    if (m.size() >= 6) s.velocity = m.segment<3>(3);
    e.states.push_back(s);
  }
  return e;
}

double total_weight(const GaussianMixture& mixture) {
  double w = 0.0;
  for (const auto& c : mixture) w += c.weight;
  return w;
}

Vec3 spherical_to_global(const ApGeometry& ap, double theta, double phi, double tau) {
  const double d = kSpeedOfLight * tau;
  const Vec3 local(d * std::sin(theta) * std::cos(phi), d * std::sin(theta) * std::sin(phi), d * std::cos(theta));
  return ap.position + rotation_z(ap.omega) * local;
}

PositionMeasurement measurement_from_angles(const ApGeometry& ap, double theta, double phi, double tau,
                                            const Mat3& cov, int source_ap) {
  if (!(tau > 0.0)) throw InvalidArgument("delay must be positive");
  if (!cov.allFinite()) throw InvalidArgument("angle/delay covariance must be finite");
  // Work in (theta, phi, range) so the square root sees comparable magnitudes.
  const Vec3 scale(1.0, 1.0, kSpeedOfLight);
  const Mat3 scaled = scale.asDiagonal() * cov * scale.asDiagonal();
  Mat3 root;
  try {
    root = psd_sqrt(scaled);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("sigma points: angle/delay covariance is not PSD");
  }
  constexpr int n = 3;
  const double spread = std::sqrt(static_cast<double>(n));  // n + kappa with kappa = 0
  const Vec3 centre(theta, phi, kSpeedOfLight * tau);
  std::vector<Vec3> points;
  points.push_back(centre);
  for (int i = 0; i < n; ++i) {
    points.push_back(centre + spread * root.col(i));
    points.push_back(centre - spread * root.col(i));
  }
  const double wi = 1.0 / (2.0 * n);  // centre weight is zero
  std::vector<Vec3> mapped;
  for (const Vec3& s : points) mapped.push_back(spherical_to_global(ap, s(0), s(1), s(2) / kSpeedOfLight));
  // Offsets from the central point keep the degenerate case exact.
  Vec3 shift = Vec3::Zero();
  for (std::size_t i = 1; i < mapped.size(); ++i) shift += wi * (mapped[i] - mapped[0]);
  Mat3 w = -shift * shift.transpose();
  for (std::size_t i = 1; i < mapped.size(); ++i) {
    const Vec3 d = mapped[i] - mapped[0];
    w += wi * d * d.transpose();
  }
  const Vec3 mean = mapped[0] + shift;
  PositionMeasurement z;
  z.value = mean;
  z.covariance = 0.5 * (w + w.transpose());
  z.source_ap = source_ap;
  return z;
}

std::vector<PositionMeasurement> cluster_proxies(const std::vector<PositionMeasurement>& measurements,
                                                 double gate_distance, double consistency_gate) {
  if (!(gate_distance > 0.0)) throw InvalidArgument("gate distance must be positive");
  if (!(consistency_gate > 0.0)) throw InvalidArgument("consistency gate must be positive");
  auto consistent = [&](const PositionMeasurement& a, const PositionMeasurement& b) {
    if (std::isinf(consistency_gate)) return true;
    const Vec3 d = a.value - b.value;
    const Eigen::LDLT<Mat3> ldlt(a.covariance + b.covariance);
    return d.dot(ldlt.solve(d)) <= consistency_gate;
  };
  const std::size_t n = measurements.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((measurements[i].value - measurements[j].value).norm() <= gate_distance &&
          consistent(measurements[i], measurements[j])) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<PositionMeasurement> out;
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (done[root]) continue;
    done[root] = 1;
    std::vector<std::size_t> members;
    for (std::size_t j = i; j < n; ++j)
      if (find(j) == root) members.push_back(j);
    if (members.size() == 1) {
      out.push_back(measurements[i]);
      continue;
    }
    Mat3 info = Mat3::Zero();
    Vec3 acc = Vec3::Zero();
    for (std::size_t j : members) {
      const Mat3 inv = psd_inverse(measurements[j].covariance);
      info += inv;
      acc += inv * measurements[j].value;
    }
    PositionMeasurement fused;
    fused.covariance = psd_inverse(info);
    fused.covariance = 0.5 * (fused.covariance + fused.covariance.transpose()).eval();
    fused.value = fused.covariance * acc;
    fused.source_ap = PositionMeasurement::kProxy;
    out.push_back(fused);
  }
  return out;
}

std::vector<Track> kalman_baseline_step(const std::vector<Track>& tracks,
                                        const std::vector<PositionMeasurement>& measurements,
                                        const MotionModel& motion, double gate) {
  const Eigen::MatrixXd f = motion.transition();
  std::vector<Track> out;
  for (const Track& t : tracks) {
    Track p = t;
    p.mean = f * t.mean;
    p.covariance = symmetrize(f * t.covariance * f.transpose() + motion.process_noise);
    out.push_back(std::move(p));
  }
  struct Pair {
    double d2;
    std::size_t track, meas;
  };
  std::vector<Pair> pairs;
  const int dim = motion.state_dim();
  const Eigen::MatrixXd h = position_selector(dim);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < measurements.size(); ++j) {
      const Mat3 s = h * out[i].covariance * h.transpose() + measurements[j].covariance;
      const Vec3 v = measurements[j].value - position_of(out[i].mean);
      const double d2 = v.dot(s.ldlt().solve(v));
      if (d2 <= gate) pairs.push_back({d2, i, j});
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d2 < b.d2; });
  std::vector<char> track_used(out.size(), 0), meas_used(measurements.size(), 0);
  for (const Pair& p : pairs) {
    if (track_used[p.track] || meas_used[p.meas]) continue;
    track_used[p.track] = meas_used[p.meas] = 1;
    KalmanUpdate u = kalman_update(out[p.track].mean, out[p.track].covariance, measurements[p.meas]);
    out[p.track].mean = std::move(u.mean);
    out[p.track].covariance = std::move(u.covariance);
    out[p.track].misses = 0;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!track_used[i]) ++out[i].misses;
  return out;
}

double instantaneous_rmse(const Vec3& estimate, const Vec3& truth) { return (estimate - truth).norm(); }

PhdFilter::PhdFilter(PhdConfig config, MotionModel motion) : config_(std::move(config)), motion_(std::move(motion)) {
  config_.validate();
  motion_.validate();
}

const GaussianMixture& PhdFilter::predict_step() {
  mixture_ = predict(mixture_, motion_, config_.birth);
  return mixture_;
}

const GaussianMixture& PhdFilter::update_step(const std::vector<PositionMeasurement>& measurements) {
  mixture_ = prune_merge(update(mixture_, measurements, config_), config_);
  return mixture_;
}

}  // namespace dmimo
