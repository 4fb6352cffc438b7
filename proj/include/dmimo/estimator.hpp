#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/eadf.hpp"
#include "dmimo/fim.hpp"
#include "dmimo/signal.hpp"

namespace dmimo {

/// Multiresolution grid search settings. The coarse grid covers the axis-aligned box
/// grid_center +- grid_extent/2; each refinement level runs a 26-neighbour pattern search
/// and then shrinks the step by refine_shrink.
struct MlConfig {
  Vec3 grid_center = Vec3(5.0, 3.5, 1.5);
  Vec3 grid_extent = Vec3(10.0, 7.0, 3.0);
  double coarse_step = 0.25;
  int refine_iterations = 6;
  double refine_shrink = 0.5;
  /// Coarse-grid maxima refined independently; the best refined one wins.
  int refine_starts = 3;
  /// Hessian condition number above which the optimum is flagged ambiguous.
  double ambiguity_condition = 1e10;

  void validate() const;
  /// Final pattern-search step: coarse_step * refine_shrink^refine_iterations.
  double resolution() const;
};

/// Everything the estimator knows about one AP.
struct ApModel {
  EadfModel eadf;
  ApGeometry geometry;
};

struct MlResult {
  Vec3 position = Vec3::Zero();
  /// Concentrated log-likelihood sum_k ||P_k y_k||^2 / sigma^2 (constants dropped).
  double log_likelihood = 0.0;
  /// Condition number of the negative Hessian at the optimum (inf when not positive definite).
  double hessian_condition = 0.0;
  bool ambiguous = false;
  int evaluations = 0;
};

/// Concentrated log-likelihood of a candidate position: per-AP complex gains are replaced by
/// their least-squares values, leaving sum_k y_k^H B_k (B_k^H B_k)^+ B_k^H y_k / sigma^2.
double concentrated_log_likelihood(const std::vector<ApModel>& aps,
                                   const std::vector<Eigen::VectorXcd>& signals,
                                   const UeAntenna& ue, const SignalSpec& spec, const Vec3& position);

/// Least-squares gains (VV, HH) of one AP at a candidate position and the residual y - B gamma.
struct GainFit {
  Eigen::Vector2cd gains;
  Eigen::VectorXcd residual;
  Eigen::MatrixXcd basis;  ///< the two B columns used by the fit
};
GainFit fit_gains(const ApModel& ap, const Eigen::VectorXcd& signal, const UeAntenna& ue,
                  const SignalSpec& spec, const Vec3& position);

/// Grid-plus-refinement ML search with a reusable coarse-grid cache. Construction
/// precomputes array responses and delay vectors on the coarse grid; `estimate` is then
/// cheap per call and safe to call concurrently.
class MlSearch {
 public:
  MlSearch(std::vector<ApModel> aps, UeAntenna ue, SignalSpec spec, MlConfig config);

  MlResult estimate(const std::vector<Eigen::VectorXcd>& signals) const;

  const MlConfig& config() const { return config_; }
  std::size_t coarse_points() const { return grid_.size(); }

 private:
  struct CoarseCache {
    Eigen::MatrixXcd a_v, a_h;  // N x points, rotated UE gains applied
    Eigen::MatrixXcd b_conj;    // N_f x points
    Eigen::VectorXd g11, g22, bb;
    Eigen::VectorXcd g12;
    std::vector<char> valid;
  };

  double evaluate(const std::vector<Eigen::VectorXcd>& signals, const Vec3& p) const;

  std::vector<ApModel> aps_;
  UeAntenna ue_;
  SignalSpec spec_;
  MlConfig config_;
  std::vector<Vec3> grid_;
  std::vector<CoarseCache> cache_;  // per AP
};

/// One-shot estimate (builds an MlSearch). Throws InvalidArgument for an empty AP set or
/// signal/AP count mismatch.
MlResult ml_estimate(const std::vector<Eigen::VectorXcd>& signals, const std::vector<ApModel>& aps,
                     const UeAntenna& ue, const SignalSpec& spec, const MlConfig& config);

struct MonteCarloScenario {
  std::vector<ApModel> aps;
  Vec3 ue_position = Vec3(4.0, 3.0, 1.0);
  UeAntenna ue;
  SignalSpec spec;  ///< noise_variance is overwritten per SNR
  double wavelength = kSpeedOfLight / 5.6e9;
  MlConfig ml;
};

struct RmseReport {
  double snr_db = 0.0;
  double noise_variance = 0.0;
  /// sqrt(mean ||e||^2)
  double rmse = 0.0;
  /// Standard error of `rmse` (delta method on the mean squared error).
  double rmse_standard_error = 0.0;
  /// mean ||e||
  double mean_error = 0.0;
  double peb = 0.0;
  int trials = 0;
  int ambiguous = 0;
};

/// PEB of the scenario at a given noise variance (exact EFIM path, global frame).
double scenario_peb(const MonteCarloScenario& scenario, double noise_variance);

/// Per-SNR RMSE and PEB. Trial t at SNR index s draws noise from stream
/// SeededStream(seed, s).child(t), so results do not depend on `workers`.
std::vector<RmseReport> run_monte_carlo(const MonteCarloScenario& scenario,
                                        const std::vector<double>& snr_db, int trials,
                                        std::uint64_t seed, int workers = 0);

}  // namespace dmimo
