#include "dmimo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"

namespace dmimo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LinkGeometry {
  double theta, phi, tau;
};

bool link_geometry(const ApGeometry& ap, const Vec3& p, LinkGeometry& out) {
  const Vec3 v = rotation_z(ap.omega).transpose() * (p - ap.position);
  const double d = v.norm();
  if (!(d > 0.0)) return false;
  out = {std::acos(std::clamp(v.z() / d, -1.0, 1.0)), std::atan2(v.y(), v.x()), d / kSpeedOfLight};
  return true;
}

// y^H P y for the span of {a_v (x) b, a_h (x) b}, given r = (a_v^H z, a_h^H z) with
// z = Y conj(b) and the Gram entries without the |b|^2 factor.
double projected_energy(cd r1, cd r2, double g11, double g22, cd g12, double bb) {
  g11 *= bb;
  g22 *= bb;
  g12 *= bb;
  const double det = g11 * g22 - std::norm(g12);
  if (det > 1e-12 * g11 * g22) {
    const double num = g22 * std::norm(r1) + g11 * std::norm(r2) - 2.0 * std::real(std::conj(r1) * g12 * r2);
    return num / det;
  }
  // Rank one: both columns are parallel (or one vanishes).
  if (g11 >= g22) return g11 > 0.0 ? std::norm(r1) / g11 : 0.0;
  return std::norm(r2) / g22;
}

Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_matrix(
    const Eigen::VectorXcd& y, int elements, int freqs) {
  return {y.data(), elements, freqs};
}

void check_inputs(const std::vector<ApModel>& aps, const std::vector<Eigen::VectorXcd>& signals,
                  const SignalSpec& spec) {
  if (aps.empty()) throw InvalidArgument("ML estimation needs at least one AP");
  if (signals.size() != aps.size()) throw InvalidArgument("one received signal per AP required");
  for (std::size_t k = 0; k < aps.size(); ++k)
    if (signals[k].size() != static_cast<Eigen::Index>(aps[k].eadf.element_count()) * spec.count())
      throw InvalidArgument("signal " + std::to_string(k) + " has the wrong length");
}

double link_energy(const ApModel& ap, const Eigen::VectorXcd& y, const std::array<cd, 2>& ct,
                   const SignalSpec& spec, const Vec3& p) {
  LinkGeometry g;
  if (!link_geometry(ap.geometry, p, g)) return kNegInf;
  const ArrayResponse r = evaluate_all(ap.eadf, g.theta, g.phi, false);
  const Eigen::VectorXcd b = delay_vector(spec, g.tau);
  const Eigen::VectorXcd z = as_matrix(y, ap.eadf.element_count(), spec.count()) * b.conjugate();
  const Eigen::VectorXcd av = ct[0] * r.value[0];
  const Eigen::VectorXcd ah = ct[1] * r.value[1];
  return projected_energy(av.dot(z), ah.dot(z), av.squaredNorm(), ah.squaredNorm(), av.dot(ah),
                          b.squaredNorm());
}

}  // namespace

void MlConfig::validate() const {
  if (!(coarse_step > 0.0)) throw InvalidArgument("coarse_step must be positive");
  if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) throw InvalidArgument("refine_shrink must be in (0,1)");
  if (refine_iterations < 0) throw InvalidArgument("refine_iterations must be >= 0");
  if (refine_starts < 1) throw InvalidArgument("refine_starts must be >= 1");
  if (!grid_center.allFinite() || !grid_extent.allFinite() || (grid_extent.array() < 0.0).any())
    throw InvalidArgument("grid extent must be finite and nonnegative");
}

double MlConfig::resolution() const { return coarse_step * std::pow(refine_shrink, refine_iterations); }

double concentrated_log_likelihood(const std::vector<ApModel>& aps,
                                   const std::vector<Eigen::VectorXcd>& signals,
                                   const UeAntenna& ue, const SignalSpec& spec, const Vec3& position) {
  check_inputs(aps, signals, spec);
  const auto ct = tilt_rotate(ue);
  double total = 0.0;
  for (std::size_t k = 0; k < aps.size(); ++k) total += link_energy(aps[k], signals[k], ct, spec, position);
  return total / spec.noise_variance;
}

GainFit fit_gains(const ApModel& ap, const Eigen::VectorXcd& signal, const UeAntenna& ue,
                  const SignalSpec& spec, const Vec3& position) {
  LinkGeometry g;
  if (!link_geometry(ap.geometry, position, g)) throw InvalidArgument("UE coincides with AP position");
  LosParams p;
  p.theta = g.theta;
  p.phi = g.phi;
  p.tau = g.tau;
  const Eigen::MatrixXcd b = build_b_matrix(ap.eadf, p, ue, spec);
  GainFit fit;
  fit.basis.resize(b.rows(), 2);
  fit.basis.col(0) = b.col(0);
  fit.basis.col(1) = b.col(3);
  fit.gains = fit.basis.completeOrthogonalDecomposition().solve(signal);
  fit.residual = signal - fit.basis * fit.gains;
  return fit;
}

MlSearch::MlSearch(std::vector<ApModel> aps, UeAntenna ue, SignalSpec spec, MlConfig config)
    : aps_(std::move(aps)), ue_(ue), spec_(std::move(spec)), config_(config) {
  if (aps_.empty()) throw InvalidArgument("ML estimation needs at least one AP");
  config_.validate();
  spec_.validate();
  ue_.validate();
  Eigen::Vector3i counts;
  for (int a = 0; a < 3; ++a)
    counts(a) = 1 + static_cast<int>(std::floor(config_.grid_extent(a) / config_.coarse_step + 1e-9));
  const Vec3 origin = config_.grid_center - 0.5 * config_.coarse_step * (counts.cast<double>() - Vec3::Ones());
  for (int i = 0; i < counts(0); ++i)
    for (int j = 0; j < counts(1); ++j)
      for (int k = 0; k < counts(2); ++k)
        grid_.push_back(origin + config_.coarse_step * Vec3(i, j, k));

  const auto ct = tilt_rotate(ue_);
  const Eigen::Index points = static_cast<Eigen::Index>(grid_.size());
  for (const ApModel& ap : aps_) {
    CoarseCache c;
    const int n = ap.eadf.element_count();
    c.a_v.resize(n, points);
    c.a_h.resize(n, points);
    c.b_conj.resize(spec_.count(), points);
    c.g11.resize(points);
    c.g22.resize(points);
    c.g12.resize(points);
    c.bb.resize(points);
    c.valid.assign(grid_.size(), 1);
    for (Eigen::Index p = 0; p < points; ++p) {
      LinkGeometry g;
      if (!link_geometry(ap.geometry, grid_[p], g)) {
        c.valid[p] = 0;
        c.a_v.col(p).setZero();
        c.a_h.col(p).setZero();
        c.b_conj.col(p).setZero();
        c.g11(p) = c.g22(p) = c.bb(p) = 0.0;
        c.g12(p) = 0.0;
        continue;
      }
      const ArrayResponse r = evaluate_all(ap.eadf, g.theta, g.phi, false);
      c.a_v.col(p) = ct[0] * r.value[0];
      c.a_h.col(p) = ct[1] * r.value[1];
      const Eigen::VectorXcd b = delay_vector(spec_, g.tau);
      c.b_conj.col(p) = b.conjugate();
      c.g11(p) = c.a_v.col(p).squaredNorm();
      c.g22(p) = c.a_h.col(p).squaredNorm();
      c.g12(p) = c.a_v.col(p).dot(c.a_h.col(p));
      c.bb(p) = b.squaredNorm();
    }
    cache_.push_back(std::move(c));
  }
}

double MlSearch::evaluate(const std::vector<Eigen::VectorXcd>& signals, const Vec3& p) const {
  const auto ct = tilt_rotate(ue_);
  double total = 0.0;
  for (std::size_t k = 0; k < aps_.size(); ++k) total += link_energy(aps_[k], signals[k], ct, spec_, p);
  return total / spec_.noise_variance;
}

MlResult MlSearch::estimate(const std::vector<Eigen::VectorXcd>& signals) const {
  check_inputs(aps_, signals, spec_);
  MlResult result;
  const std::size_t points = grid_.size();

  // Coarse grid: one matrix product per AP.
  Eigen::VectorXd ll = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(points));
  std::vector<char> valid(points, 1);
  for (std::size_t k = 0; k < aps_.size(); ++k) {
    const CoarseCache& c = cache_[k];
    const Eigen::MatrixXcd z = as_matrix(signals[k], aps_[k].eadf.element_count(), spec_.count()) * c.b_conj;
    for (std::size_t p = 0; p < points; ++p) {
      if (!c.valid[p]) {
        valid[p] = 0;
        continue;
      }
      const Eigen::Index i = static_cast<Eigen::Index>(p);
      ll(i) += projected_energy(c.a_v.col(i).dot(z.col(i)), c.a_h.col(i).dot(z.col(i)), c.g11(i), c.g22(i),
                                c.g12(i), c.bb(i));
    }
  }
  result.evaluations = static_cast<int>(points);

  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < points; ++p)
    if (valid[p]) order.push_back(p);
  if (order.empty()) throw NumericalError("no valid coarse grid point");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ll(static_cast<Eigen::Index>(a)) > ll(static_cast<Eigen::Index>(b));
  });
  std::vector<Vec3> starts;
  const double separation = 2.0 * config_.coarse_step + 1e-9;
  for (std::size_t p : order) {
    if (static_cast<int>(starts.size()) >= config_.refine_starts) break;
    bool far = true;
    for (const Vec3& s : starts) far = far && (grid_[p] - s).cwiseAbs().maxCoeff() > separation;
    if (far) starts.push_back(grid_[p]);
  }

  auto f = [&](const Vec3& p) {
    ++result.evaluations;
    return evaluate(signals, p);
  };

  Vec3 best = starts.front();
  double best_ll = kNegInf;
  for (const Vec3& start : starts) {
    Vec3 x = start;
    double fx = f(x);
    double step = config_.coarse_step;
    for (int level = 1; level <= config_.refine_iterations; ++level) {
      step *= config_.refine_shrink;
      for (int move = 0; move < 200; ++move) {
        Vec3 candidate = x;
        double fc = fx;
        for (int dx = -1; dx <= 1; ++dx)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dz = -1; dz <= 1; ++dz) {
              if (dx == 0 && dy == 0 && dz == 0) continue;
              const Vec3 trial = x + step * Vec3(dx, dy, dz);
              const double ft = f(trial);
              if (ft > fc) {
                fc = ft;
                candidate = trial;
              }
            }
        if (!(fc > fx)) break;
        x = candidate;
        fx = fc;
      }
    }
    if (fx > best_ll) {
      best_ll = fx;
      best = x;
    }
  }

  // Newton polish on a finite-difference Hessian; also used for the ambiguity check.
  const double h = std::max(1e-4, 0.5 * config_.resolution());
  Mat3 hess;
  Vec3 grad;
  auto derivatives = [&](const Vec3& x, double fx) {
    for (int i = 0; i < 3; ++i) {
      const Vec3 ei = h * Vec3::Unit(i);
      const double fp = f(x + ei), fm = f(x - ei);
      grad(i) = (fp - fm) / (2 * h);
      hess(i, i) = (fp - 2 * fx + fm) / (h * h);
      for (int j = 0; j < i; ++j) {
        const Vec3 ej = h * Vec3::Unit(j);
        hess(i, j) = hess(j, i) =
            (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h);
      }
    }
  };
  for (int iter = 0; iter < 4; ++iter) {
    derivatives(best, best_ll);
    Eigen::SelfAdjointEigenSolver<Mat3> es(-hess);
    if (!(es.eigenvalues().minCoeff() > 0.0)) break;
    const Vec3 delta = -hess.ldlt().solve(grad);
    if (!delta.allFinite() || delta.norm() > config_.coarse_step) break;
    const Vec3 next = best + delta;
    const double fn = f(next);
    if (!(fn > best_ll)) break;
    best = next;
    best_ll = fn;
    if (delta.norm() < 1e-9) break;
  }
  derivatives(best, best_ll);
  Eigen::SelfAdjointEigenSolver<Mat3> es(-hess);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  result.hessian_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  result.ambiguous = !(result.hessian_condition < config_.ambiguity_condition);
  result.position = best;
  result.log_likelihood = best_ll;
  return result;
}

MlResult ml_estimate(const std::vector<Eigen::VectorXcd>& signals, const std::vector<ApModel>& aps,
                     const UeAntenna& ue, const SignalSpec& spec, const MlConfig& config) {
  check_inputs(aps, signals, spec);
  return MlSearch(aps, ue, spec, config).estimate(signals);
}

double scenario_peb(const MonteCarloScenario& scenario, double noise_variance) {
  SignalSpec spec = scenario.spec;
  spec.noise_variance = noise_variance;
  Mat3 total = Mat3::Zero();
  for (const ApModel& ap : scenario.aps)
    total += ap_position_fim(ap.eadf, ap.geometry, scenario.ue_position, scenario.ue, spec,
                             scenario.wavelength).matrix;
  return peb(total);
}

std::vector<RmseReport> run_monte_carlo(const MonteCarloScenario& scenario,
                                        const std::vector<double>& snr_db, int trials,
                                        std::uint64_t seed, int workers) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (scenario.aps.empty()) throw InvalidArgument("Monte Carlo scenario needs at least one AP");
  std::vector<LosParams> params;
  for (const ApModel& ap : scenario.aps)
    params.push_back(link_params(ap.geometry, scenario.ue_position, scenario.wavelength));

  std::vector<RmseReport> reports;
  for (std::size_t s = 0; s < snr_db.size(); ++s) {
    SignalSpec spec = scenario.spec;
    spec.noise_variance = noise_variance_for_snr(spec, snr_db[s], scenario.wavelength);
    const MlSearch search(scenario.aps, scenario.ue, spec, scenario.ml);
    std::vector<double> sq(static_cast<std::size_t>(trials)), norm(sq.size());
    std::vector<char> ambiguous(sq.size(), 0);
    const SeededStream base(seed, s);
    parallel_for(sq.size(), workers, [&](std::size_t t) {
      SeededStream stream = base.child(t);
      std::vector<Eigen::VectorXcd> signals;
      for (std::size_t k = 0; k < scenario.aps.size(); ++k)
        signals.push_back(synthesize_received(scenario.aps[k].eadf, params[k], scenario.ue, spec, stream));
      const MlResult r = search.estimate(signals);
      const Vec3 e = r.position - scenario.ue_position;
      sq[t] = e.squaredNorm();
      norm[t] = e.norm();
      ambiguous[t] = r.ambiguous;
    });
    RmseReport rep;
    rep.snr_db = snr_db[s];
    rep.noise_variance = spec.noise_variance;
    rep.trials = trials;
    const double n = trials;
    const double mse = std::accumulate(sq.begin(), sq.end(), 0.0) / n;
    double var = 0.0;
    for (double v : sq) var += (v - mse) * (v - mse);
    var = trials > 1 ? var / (n - 1) : 0.0;
    rep.rmse = std::sqrt(mse);
    rep.rmse_standard_error = mse > 0.0 ? std::sqrt(var / n) / (2.0 * rep.rmse) : 0.0;
    rep.mean_error = std::accumulate(norm.begin(), norm.end(), 0.0) / n;
    rep.ambiguous = static_cast<int>(std::count(ambiguous.begin(), ambiguous.end(), 1));
    try {
      rep.peb = scenario_peb(scenario, spec.noise_variance);
    } catch (const NumericalError&) {
      rep.peb = std::numeric_limits<double>::infinity();
    }
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace dmimo
