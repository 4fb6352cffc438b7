#include "dmimo/fim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

namespace {

constexpr double kC = kSpeedOfLight;

void check_pole(double theta) {
  if (std::abs(std::sin(theta)) < tolerance::kPoleAngle)
    throw SingularAzimuthError("elevation " + std::to_string(theta) +
                               " rad is at a pole; azimuth is unobservable");
}

void kron_into(Eigen::Ref<Eigen::VectorXcd> out, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
               cd scale) {
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) += (scale * a(i)) * b;
}

Vec3 unit_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Mat7 real_gram(const Eigen::MatrixXcd& j, double noise_variance) {
  return (2.0 / noise_variance) * (j.adjoint() * j).real();
}

}  // namespace

double TiltPrior::rho() const { return bessel_i_ratio(kappa) * std::cos(2.0 * mu); }

LosParams link_params(const ApGeometry& ap, const Vec3& ue_position, double wavelength) {
  const Vec3 v = rotation_z(ap.omega).transpose() * (ue_position - ap.position);
  const double d = v.norm();
  if (!(d > 0.0)) throw InvalidArgument("UE coincides with AP position");
  LosParams p;
  p.theta = std::acos(std::clamp(v.z() / d, -1.0, 1.0));
  p.phi = std::atan2(v.y(), v.x());
  p.tau = d / kC;
  p.alpha_vv = free_space_gain(wavelength, ap.position, ue_position);
  p.alpha_hh = p.alpha_vv;
  return p;
}

Eigen::MatrixXcd signal_jacobian(const EadfModel& model, const LosParams& params,
                                 const std::array<cd, 2>& c_t, const SignalSpec& spec) {
  params.validate();
  spec.validate();
  const ArrayResponse r = evaluate_all(model, params.theta, params.phi, true);
  const Eigen::VectorXcd b = delay_vector(spec, params.tau);
  Eigen::VectorXcd b_tau(b.size());
  for (int f = 0; f < spec.count(); ++f) b_tau(f) = cd(0.0, -kTwoPi * spec.frequencies[f]) * b(f);

  const Eigen::Index rows = static_cast<Eigen::Index>(model.element_count()) * b.size();
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(rows, 7);
  const cd alpha[2] = {params.alpha_vv, params.alpha_hh};
  const cd i1(0.0, 1.0);
  for (int p = 0; p < kPolarizationCount; ++p) {
    const cd w = alpha[p] * c_t[p];
    kron_into(j.col(kTheta), r.d_theta[p], b, w);
    kron_into(j.col(kPhi), r.d_phi[p], b, w);
    kron_into(j.col(kTau), r.value[p], b_tau, w);
    const int re = p == 0 ? kReVV : kReHH;
    kron_into(j.col(re), r.value[p], b, c_t[p]);
    j.col(re + 1) = i1 * j.col(re);
  }
  return j;
}

Mat7 fim_theta(const EadfModel& model, const LosParams& params, const UeAntenna& ue,
               const SignalSpec& spec) {
  ue.validate();
  return real_gram(signal_jacobian(model, params, tilt_rotate(ue), spec), spec.noise_variance);
}

Mat3 efim_xi(const Mat7& fim) {
  if (!fim.allFinite()) throw InvalidArgument("FIM has non-finite entries");
  std::vector<int> keep;
  for (int i = kReVV; i <= kImHH; ++i)
    if (fim.row(i).cwiseAbs().maxCoeff() > 0.0) keep.push_back(i);
  Mat3 out = fim.topLeftCorner<3, 3>();
  if (keep.empty()) return out;
  const int m = static_cast<int>(keep.size());
  Eigen::MatrixXd z(m, m), y(3, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) z(a, b) = fim(keep[a], keep[b]);
    for (int r = 0; r < 3; ++r) y(r, a) = fim(r, keep[a]);
  }
  // Equilibrate: the Schur complement is invariant to diagonal rescaling of the gain block.
  const Eigen::VectorXd s = z.diagonal().cwiseMax(0.0).cwiseSqrt();
  if ((s.array() <= 0.0).any()) throw NumericalError("gain block has a zero diagonal with coupling");
  const Eigen::VectorXd inv_s = s.cwiseInverse();
  const Eigen::MatrixXd zs = inv_s.asDiagonal() * z * inv_s.asDiagonal();
  const Eigen::MatrixXd ys = y * inv_s.asDiagonal();
  out -= ys * psd_inverse(zs) * ys.transpose();
  return 0.5 * (out + out.transpose());
}

Mat3 jacobian_xi_to_p(const LosParams& params) {
  check_pole(params.theta);
  if (!(params.tau > 0.0)) throw InvalidArgument("delay must be positive");
  const double d = kC * params.tau;
  const double st = std::sin(params.theta), ct = std::cos(params.theta);
  const double sp = std::sin(params.phi), cp = std::cos(params.phi);
  Mat3 j;
  j.col(0) = Vec3(ct * cp, ct * sp, -st) / d;
  j.col(1) = Vec3(-sp, cp, 0.0) / (d * st);
  j.col(2) = unit_direction(params.theta, params.phi) / kC;
  return j;
}

Mat3 jacobian_p_to_xi(const LosParams& params) {
  const double d = kC * params.tau;
  const double st = std::sin(params.theta), ct = std::cos(params.theta);
  const double sp = std::sin(params.phi), cp = std::cos(params.phi);
  Mat3 inv;
  inv.row(0) = d * Vec3(ct * cp, ct * sp, -st).transpose();
  inv.row(1) = d * st * Vec3(-sp, cp, 0.0).transpose();
  inv.row(2) = kC * unit_direction(params.theta, params.phi).transpose();
  return inv;
}

PositionFim local_fim_exact(const Mat7& fim, const LosParams& params) {
  const Mat3 j = jacobian_xi_to_p(params);
  const Mat3 f = j * efim_xi(fim) * j.transpose();
  return {0.5 * (f + f.transpose()), Frame::Local};
}

Mat3 rdm(double theta, double phi) {
  const Vec3 u = unit_direction(theta, phi);
  return u * u.transpose();
}

Mat2 rdm_2d(double phi) {
  const Vec2 u(std::cos(phi), std::sin(phi));
  return u * u.transpose();
}

PositionFim local_fim_decomposed(double f_theta_theta, double f_phi_phi, double f_tau_tau,
                                 const LosParams& params) {
  check_pole(params.theta);
  if (f_theta_theta < 0.0 || f_phi_phi < 0.0 || f_tau_tau < 0.0)
    throw InvalidArgument("diagonal FIM entries must be nonnegative");
  const double d2 = kC * kC * params.tau * params.tau;
  const double st = std::sin(params.theta);
  Mat3 f = f_theta_theta / d2 * rdm(params.theta + kPi / 2, params.phi) +
           f_phi_phi / (d2 * st * st) * rdm(kPi / 2, params.phi + kPi / 2) +
           f_tau_tau / (kC * kC) * rdm(params.theta, params.phi);
  return {f, Frame::Local};
}

PositionFim to_global(const PositionFim& local, double omega) {
  if (local.frame == Frame::Global) throw InvalidArgument("FIM is already in the global frame");
  const Mat3 r = rotation_z(omega);
  const Mat3 g = r * local.matrix * r.transpose();
  return {0.5 * (g + g.transpose()), Frame::Global};
}

PositionFim global_fim(const std::vector<PositionFim>& locals, const std::vector<ApGeometry>& aps) {
  if (locals.empty()) throw InvalidArgument("global FIM needs at least one AP");
  if (locals.size() != aps.size()) throw InvalidArgument("one geometry per local FIM required");
  PositionFim out{Mat3::Zero(), Frame::Global};
  for (std::size_t k = 0; k < locals.size(); ++k) out.matrix += to_global(locals[k], aps[k].omega).matrix;
  return out;
}

PositionFim global_fim_decomposed(const std::vector<LinkInformation>& links) {
  if (links.empty()) throw InvalidArgument("global FIM needs at least one AP");
  PositionFim out{Mat3::Zero(), Frame::Global};
  for (const LinkInformation& l : links) {
    check_pole(l.theta);
    const double d2 = kC * kC * l.tau * l.tau;
    const double st = std::sin(l.theta);
    const double bearing = l.phi + l.omega;
    out.matrix += l.f_theta_theta / d2 * rdm(l.theta + kPi / 2, bearing) +
                  l.f_phi_phi / (d2 * st * st) * rdm(kPi / 2, bearing + kPi / 2) +
                  l.f_tau_tau / (kC * kC) * rdm(l.theta, bearing);
  }
  return out;
}

double peb(const Mat3& fim) { return std::sqrt(psd_inverse(fim).trace()); }
double peb(const PositionFim& fim) { return peb(fim.matrix); }
double peb_2d(const Mat2& fim) { return std::sqrt(psd_inverse(fim).trace()); }

Mat2 fim_2d(const std::vector<PlanarLink>& links) {
  if (links.empty()) throw InvalidArgument("2D FIM needs at least one AP");
  Mat2 f = Mat2::Zero();
  for (const PlanarLink& l : links)
    f += l.f_phi_phi / (kC * kC * l.tau * l.tau) * rdm_2d(l.bearing + kPi / 2) +
         l.f_tau_tau / (kC * kC) * rdm_2d(l.bearing);
  return f;
}

cd geometry_factor(const std::vector<PlanarLink>& links) {
  cd d(0.0, 0.0);
  for (const PlanarLink& l : links)
    d += (l.f_phi_phi / (l.tau * l.tau * kC * kC) - l.f_tau_tau / (kC * kC)) *
         std::polar(1.0, 2.0 * l.bearing);
  return d;
}

double optimal_peb_closed_form(const std::vector<PlanarLink>& links) {
  if (links.empty()) throw InvalidArgument("closed-form PEB needs at least one AP");
  double sum_ab = 0.0, diff = 0.0, cross = 0.0;
  for (const PlanarLink& k : links) {
    const double a = k.f_phi_phi / (k.tau * k.tau);
    sum_ab += a + k.f_tau_tau;
    diff += a - k.f_tau_tau;
    for (const PlanarLink& kp : links)
      cross += a * kp.f_tau_tau + kp.f_phi_phi / (kp.tau * kp.tau) * k.f_tau_tau;
  }
  const double denom = diff * diff + 2.0 * cross;
  if (!(sum_ab > 0.0) || !(denom > 0.0)) throw NumericalError("closed-form PEB: no position information");
  return std::sqrt(4.0 * kC * kC * sum_ab / denom);
}

std::vector<PlanarLink> planar_links(const std::vector<LinkInformation>& diagonals,
                                     const std::vector<ApGeometry>& aps, const Vec2& ue_position) {
  if (diagonals.size() != aps.size()) throw InvalidArgument("one geometry per AP required");
  std::vector<PlanarLink> out;
  for (std::size_t k = 0; k < aps.size(); ++k) {
    const Vec2 v = ue_position - aps[k].position.head<2>();
    if (!(v.norm() > 0.0)) throw InvalidArgument("UE coincides with AP position");
    out.push_back({diagonals[k].f_phi_phi, diagonals[k].f_tau_tau, v.norm() / kC,
                   std::atan2(v.y(), v.x())});
  }
  return out;
}

Mat7 averaged_fim_theta(const EadfModel& model, const LosParams& params, const SignalSpec& spec,
                        const TiltPrior& tilt) {
  if (!(tilt.kappa >= 0.0)) throw InvalidArgument("kappa must be >= 0");
  const double rho = tilt.rho();
  const Eigen::MatrixXcd gv = signal_jacobian(model, params, {cd(1, 0), cd(0, 0)}, spec);
  const Eigen::MatrixXcd gh = signal_jacobian(model, params, {cd(0, 0), cd(1, 0)}, spec);
  const Mat7 f = (2.0 / spec.noise_variance) *
                 (0.5 * (1.0 + rho) * (gv.adjoint() * gv) + 0.5 * (1.0 - rho) * (gh.adjoint() * gh)).real();
  return 0.5 * (f + f.transpose());
}

double cross_polar_ratio(const EadfModel& model, const LosParams& params, const SignalSpec& spec) {
  const Eigen::MatrixXcd gv = signal_jacobian(model, params, {cd(1, 0), cd(0, 0)}, spec);
  const Eigen::MatrixXcd gh = signal_jacobian(model, params, {cd(0, 0), cd(1, 0)}, spec);
  const double co = (gv.adjoint() * gv + gh.adjoint() * gh).real().norm();
  const double cross = (gv.adjoint() * gh + gh.adjoint() * gv).real().norm();
  return co > 0.0 ? cross / co : 0.0;
}

PositionFim position_fim(const Mat7& fim, const ApGeometry& ap, const Vec3& ue_position) {
  const LosParams geo = link_params(ap, ue_position, 1.0);
  return to_global(local_fim_exact(fim, geo), ap.omega);
}

PositionFim ap_position_fim(const EadfModel& model, const ApGeometry& ap, const Vec3& ue_position,
                            const UeAntenna& ue, const SignalSpec& spec, double wavelength) {
  const LosParams params = link_params(ap, ue_position, wavelength);
  return to_global(local_fim_exact(fim_theta(model, params, ue, spec), params), ap.omega);
}

double averaged_peb(const std::vector<Mat7>& fims, const std::vector<ApGeometry>& aps,
                    const Vec3& ue_position) {
  if (fims.empty() || fims.size() != aps.size()) throw InvalidArgument("one FIM per AP required");
  Mat3 total = Mat3::Zero();
  for (std::size_t k = 0; k < fims.size(); ++k) total += position_fim(fims[k], aps[k], ue_position).matrix;
  return peb(total);
}

}  // namespace dmimo
