#include <gtest/gtest.h>

#include <cmath>

#include "dmimo/error.hpp"
#include "dmimo/fim.hpp"
#include "test_support.hpp"

using namespace dmimo;
using namespace dmimo::testing;

namespace {

constexpr double kC = kSpeedOfLight;

Mat7 random_spd7(SeededStream& s) { return random_spd(7, s, 0.5); }

// Block-of-inverse oracle for the Schur complement.
Mat3 schur_oracle(const Mat7& f) {
  const Mat7 inv = f.inverse();
  return inv.topLeftCorner<3, 3>().inverse();
}

double rel_fro(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(a.norm(), b.norm());
}

double scaled_error3(const Mat3& ref, const Mat3& x) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(ref(i, j) - x(i, j)) / std::sqrt(ref(i, i) * ref(j, j)));
  return worst;
}

LosParams random_geometry(SeededStream& s) {
  LosParams p;
  p.theta = s.uniform(0.2, kPi - 0.2);
  p.phi = s.uniform(-kPi, kPi);
  p.tau = s.uniform(1.0, 15.0) / kC;
  return p;
}

ApGeometry random_ap(SeededStream& s) {
  return {Vec3(s.uniform(-5, 5), s.uniform(-5, 5), s.uniform(0, 3)), s.uniform(-kPi, kPi)};
}

}  // namespace

TEST(FimTheta, MatchesFiniteDifferenceJacobian) {
  SeededStream s(11, 1);
  const EadfModel m = perturbed_upa(3);
  for (int t = 0; t < 20; ++t) {
    const RandomLink link = random_link(s);
    const Mat7 f = fim_theta(m, link.params, link.ue, link.spec);
    EXPECT_LT(scaled_max_error(f, finite_difference_fim(m, link)), 1e-5) << "trial " << t;
    EXPECT_LT((f - f.transpose()).cwiseAbs().maxCoeff(), 1e-10 * f.cwiseAbs().maxCoeff());
    EXPECT_TRUE(is_psd(f));
  }
}

TEST(FimTheta, ZeroGainsKillGeometricInformation) {
  SeededStream s(12, 1);
  RandomLink link = random_link(s);
  link.params.alpha_vv = 0.0;
  link.params.alpha_hh = 0.0;
  const EadfModel m = perturbed_upa(1);
  const Mat7 f = fim_theta(m, link.params, link.ue, link.spec);
  EXPECT_EQ(f.topRows<3>().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(f.leftCols<3>().cwiseAbs().maxCoeff(), 0.0);
  // Gain block does not depend on the gains themselves.
  const Eigen::MatrixXcd b = build_b_matrix(m, link.params, link.ue, link.spec);
  const double vv = 2.0 / link.spec.noise_variance * b.col(0).squaredNorm();
  EXPECT_NEAR(f(kReVV, kReVV), vv, 1e-12 * vv);
  EXPECT_NEAR(f(kImVV, kImVV), vv, 1e-12 * vv);
}

TEST(FimTheta, ScalesInverselyWithNoise) {
  SeededStream s(13, 1);
  RandomLink link = random_link(s);
  const EadfModel m = perturbed_upa(2);
  const Mat7 f1 = fim_theta(m, link.params, link.ue, link.spec);
  link.spec.noise_variance *= 4;
  const Mat7 f4 = fim_theta(m, link.params, link.ue, link.spec);
  EXPECT_LT((f1 / 4.0 - f4).cwiseAbs().maxCoeff(), 1e-14 * f1.cwiseAbs().maxCoeff());
}

TEST(FimTheta, ElementwiseThetaThetaDecoupling) {
  SeededStream s(14, 1);
  const EadfModel m = perturbed_upa(4);
  for (int t = 0; t < 5; ++t) {
    const RandomLink link = random_link(s);
    const auto ct = tilt_rotate(link.ue);
    const cd alpha[2] = {link.params.alpha_vv, link.params.alpha_hh};
    const Eigen::VectorXcd b = delay_vector(link.spec, link.params.tau);
    double sum = 0.0;
    for (int n = 0; n < m.element_count(); ++n) {
      cd dn = 0.0;
      for (int p = 0; p < 2; ++p)
        dn += alpha[p] * ct[p] *
              evaluate_response_derivative(m, link.params.theta, link.params.phi,
                                           static_cast<Polarization>(p), AngleParameter::Theta)(n);
      sum += std::norm(dn) * b.squaredNorm();
    }
    sum *= 2.0 / link.spec.noise_variance;
    const Mat7 f = fim_theta(m, link.params, link.ue, link.spec);
    EXPECT_NEAR(f(kTheta, kTheta), sum, 1e-10 * sum);
  }
}

TEST(Efim, Cases) {
  Mat7 f = Mat7::Identity();
  EXPECT_LT((efim_xi(f) - Mat3::Identity()).norm(), 1e-15);
  SeededStream s(15, 1);
  f.setZero();
  f.topLeftCorner<3, 3>() = random_spd(3, s);
  f.bottomRightCorner<4, 4>() = random_spd(4, s);
  EXPECT_LT((efim_xi(f) - f.topLeftCorner<3, 3>()).norm(), 1e-12);
}

TEST(Efim, SchurIdentity) {
  SeededStream s(16, 1);
  for (int t = 0; t < 100; ++t) {
    const Mat7 f = random_spd7(s);
    EXPECT_LT(rel_fro(schur_oracle(f), efim_xi(f)), 1e-8);
  }
}

TEST(Efim, SingularGainBlock) {
  Mat7 f = Mat7::Identity();
  f(kReVV, kReVV) = f(kImVV, kImVV) = 1.0;
  f(kReVV, kImVV) = f(kImVV, kReVV) = 1.0;  // rank-deficient gain block
  f(kTheta, kReVV) = f(kReVV, kTheta) = 0.1;
  EXPECT_THROW(efim_xi(f), ConditioningError);
}

TEST(Efim, DropsUninformativeGains) {
  SeededStream s(17, 1);
  Mat7 f = random_spd7(s);
  f.row(kReHH).setZero();
  f.col(kReHH).setZero();
  f.row(kImHH).setZero();
  f.col(kImHH).setZero();
  Eigen::MatrixXd reduced(5, 5);
  const int keep[5] = {0, 1, 2, 3, 4};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) reduced(i, j) = f(keep[i], keep[j]);
  const Mat3 oracle = reduced.inverse().topLeftCorner(3, 3).inverse();
  EXPECT_LT(rel_fro(oracle, efim_xi(f)), 1e-8);
}

TEST(Jacobian, AxisCase) {
  LosParams p;
  p.theta = kPi / 2;
  p.phi = 0.0;
  p.tau = 4.0 / kC;
  const Mat3 j = jacobian_xi_to_p(p);
  EXPECT_LT((j.col(2) - Vec3(1, 0, 0) / kC).norm(), 1e-20);
}

TEST(Jacobian, AnalyticInverse) {
  SeededStream s(18, 1);
  for (int t = 0; t < 100; ++t) {
    const LosParams p = random_geometry(s);
    EXPECT_LT((jacobian_xi_to_p(p) * jacobian_p_to_xi(p) - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-10);
    // Mixed units: compare each entry against the magnitude of its own row-column product.
    const Mat3 j = jacobian_xi_to_p(p), inv = jacobian_p_to_xi(p);
    const Mat3 prod = inv * j;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        EXPECT_NEAR(prod(a, b), a == b ? 1.0 : 0.0, 1e-10 * inv.row(a).norm() * j.col(b).norm());
  }
}

TEST(Jacobian, FiniteDifferenceOfSphericalMap) {
  auto xi = [](const Vec3& p) {
    const double d = p.norm();
    return Vec3(std::acos(p.z() / d), std::atan2(p.y(), p.x()), d / kC);
  };
  SeededStream s(19, 1);
  for (int t = 0; t < 50; ++t) {
    const LosParams g = random_geometry(s);
    const double d = g.tau * kC;
    const Vec3 p(d * std::sin(g.theta) * std::cos(g.phi), d * std::sin(g.theta) * std::sin(g.phi),
                 d * std::cos(g.theta));
    const Mat3 j = jacobian_xi_to_p(g);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Vec3 pp = p, pm = p;
      pp(i) += h;
      pm(i) -= h;
      const Vec3 fd = (xi(pp) - xi(pm)) / (2 * h);
      for (int k = 0; k < 3; ++k) {
        const double scale = j.col(k).norm();
        EXPECT_NEAR(fd(k), j(i, k), 1e-6 * scale);
      }
    }
  }
}

TEST(Jacobian, PoleRejected) {
  LosParams p;
  p.theta = 0.0;
  EXPECT_THROW(jacobian_xi_to_p(p), SingularAzimuthError);
  p.theta = kPi - 1e-8;
  EXPECT_THROW(jacobian_xi_to_p(p), SingularAzimuthError);
  EXPECT_THROW(local_fim_decomposed(1, 1, 1, p), SingularAzimuthError);
}

TEST(LocalFim, CongruencePreservesPsd) {
  SeededStream s(20, 1);
  for (int t = 0; t < 50; ++t) {
    const Mat7 f = random_spd7(s);
    const PositionFim local = local_fim_exact(f, random_geometry(s));
    EXPECT_EQ(local.frame, Frame::Local);
    EXPECT_TRUE(is_psd(local.matrix));
  }
}

TEST(LocalFim, DecomposedMatchesExact) {
  SeededStream s(21, 1);
  const EadfModel m = perturbed_upa(6);
  for (double eps : {0.0, 1e-3, 1e-2}) {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const RandomLink link = random_link(s);
      const Mat7 full = fim_theta(m, link.params, link.ue, link.spec);
      Mat7 f = Mat7(full.diagonal().asDiagonal());
      for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) {
          const double v = eps * s.uniform(-1, 1) * std::sqrt(f(i, i) * f(j, j));
          f(i, j) = f(j, i) = v;
        }
      const Mat3 exact = local_fim_exact(f, link.params).matrix;
      const Mat3 dec = local_fim_decomposed(f(0, 0), f(1, 1), f(2, 2), link.params).matrix;
      worst = std::max(worst, scaled_error3(exact, dec));
    }
    if (eps == 0.0)
      EXPECT_LT(worst, 1e-8);
    else
      EXPECT_LT(worst, 5 * eps) << "eps " << eps;
  }
}

TEST(LocalFim, DelayOnlyIsRankOne) {
  LosParams p;
  p.theta = 1.1;
  p.phi = 0.4;
  const Mat3 f = local_fim_decomposed(0, 0, 2.5, p).matrix;
  const Vec3 u(std::sin(1.1) * std::cos(0.4), std::sin(1.1) * std::sin(0.4), std::cos(1.1));
  EXPECT_LT((f - 2.5 / (kC * kC) * u * u.transpose()).norm(), 1e-30);
}

TEST(LocalFim, OrthogonalAtHorizon) {
  LosParams p;
  p.theta = kPi / 2;
  p.phi = 0.7;
  p.tau = 5.0 / kC;
  const double a = 3.0, b = 7.0, c = 11.0 * kC * kC / 25.0;
  const Mat3 f = local_fim_decomposed(a, b, c, p).matrix;
  Eigen::SelfAdjointEigenSolver<Mat3> es(f);
  std::vector<double> expected = {a / 25.0, b / 25.0, 11.0 / 25.0};
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(es.eigenvalues()(i), expected[i], 1e-12 * expected[i]);
}

TEST(Rdm, Properties) {
  EXPECT_LT((rdm(0, 1.3) - Vec3::UnitZ() * Vec3::UnitZ().transpose()).norm(), 1e-15);
  EXPECT_LT((rdm(kPi / 2, 0) - Vec3::UnitX() * Vec3::UnitX().transpose()).norm(), 1e-15);
  SeededStream s(22, 1);
  for (int t = 0; t < 100; ++t) {
    const Mat3 u = rdm(s.uniform(0, kPi), s.uniform(-kPi, kPi));
    EXPECT_NEAR(u.trace(), 1.0, 1e-14);
    EXPECT_LT((u * u - u).norm(), 1e-14);
    EXPECT_LT((u - u.transpose()).norm(), 1e-16);
  }
}

TEST(GlobalFim, IdentityRotationAndAdditivity) {
  SeededStream s(23, 1);
  const PositionFim local{Mat3(random_spd(3, s)), Frame::Local};
  const ApGeometry ap{Vec3(1, 2, 3), 0.0};
  EXPECT_LT((global_fim({local}, {ap}).matrix - local.matrix).norm(), 1e-14);
  const ApGeometry rotated{Vec3::Zero(), 0.8};
  const Mat3 one = global_fim({local}, {rotated}).matrix;
  EXPECT_LT((global_fim({local, local}, {rotated, rotated}).matrix - 2 * one).norm(), 1e-13);
  EXPECT_THROW(global_fim({}, {}), InvalidArgument);
  EXPECT_THROW(to_global(to_global(local, 0.1), 0.1), InvalidArgument);
}

TEST(GlobalFim, RotationMatchesDirectForm) {
  SeededStream s(24, 1);
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + static_cast<int>(s.uniform() * 6);
    std::vector<PositionFim> locals;
    std::vector<ApGeometry> aps;
    std::vector<LinkInformation> links;
    for (int i = 0; i < k; ++i) {
      const LosParams p = random_geometry(s);
      LinkInformation l{s.uniform(0.1, 10) * 1e4, s.uniform(0.1, 10) * 1e4, s.uniform(0.1, 10) * 1e20,
                        p.theta, p.phi, p.tau, s.uniform(-kPi, kPi)};
      locals.push_back(local_fim_decomposed(l.f_theta_theta, l.f_phi_phi, l.f_tau_tau, p));
      aps.push_back({Vec3::Zero(), l.omega});
      links.push_back(l);
    }
    EXPECT_LT(rel_fro(global_fim(locals, aps).matrix, global_fim_decomposed(links).matrix), 1e-10);
  }
}

TEST(GlobalFim, PositionFimMatchesRotatedLocal) {
  SeededStream s(25, 1);
  const EadfModel m = perturbed_upa(8);
  const SignalSpec spec = make_flat_spec(16, 400e6, 1e-12);
  const double lambda = kC / 5.6e9;
  const ApGeometry ap{Vec3(1, -2, 2), 0.6};
  const Vec3 ue(3, 1, 1);
  const PositionFim g = ap_position_fim(m, ap, ue, UeAntenna{}, spec, lambda);
  const LosParams p = link_params(ap, ue, lambda);
  EXPECT_NEAR(p.tau * kC, (ue - ap.position).norm(), 1e-12);
  const Vec3 local_dir(std::sin(p.theta) * std::cos(p.phi), std::sin(p.theta) * std::sin(p.phi),
                       std::cos(p.theta));
  EXPECT_LT((rotation_z(ap.omega) * local_dir - (ue - ap.position).normalized()).norm(), 1e-12);
  const Mat3 expected = to_global(local_fim_exact(fim_theta(m, p, UeAntenna{}, spec), p), ap.omega).matrix;
  EXPECT_LT(rel_fro(expected, g.matrix), 1e-12);
  EXPECT_EQ(g.frame, Frame::Global);
}

TEST(Peb, Cases) {
  EXPECT_NEAR(peb(Mat3(2.0 * Mat3::Identity())), std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(peb(Mat3(Vec3(1, 4, 9).asDiagonal())), 7.0 / 6.0, 1e-15);
  Mat3 singular = Mat3::Zero();
  singular(0, 0) = singular(1, 1) = 1.0;
  try {
    peb(singular);
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_NEAR(std::abs(e.null_direction()(2)), 1.0, 1e-12);
  }
}

TEST(Peb, Monotonicity) {
  SeededStream s(26, 1);
  for (int t = 0; t < 100; ++t) {
    const Mat3 f = random_spd(3, s);
    Eigen::MatrixXd a(3, 2);
    for (int i = 0; i < 6; ++i) a(i) = s.normal();
    const Mat3 inc = a * a.transpose();
    EXPECT_LE(peb(Mat3(f + inc)), peb(f) * (1 + 1e-14));
  }
}

TEST(Fim2d, IsotropicAndCompletion) {
  const double tau = 5.0 / kC;
  const PlanarLink iso{3.0 * tau * tau, 3.0, tau, 0.9};
  const Mat2 f = fim_2d({iso});
  EXPECT_LT((f - 3.0 / (kC * kC) * Mat2::Identity()).norm(), 1e-12 * f.norm());
  SeededStream s(27, 1);
  for (int t = 0; t < 50; ++t) {
    const double phi = s.uniform(-10, 10);
    EXPECT_LT((rdm_2d(phi) + rdm_2d(phi + kPi / 2) - Mat2::Identity()).norm(), 1e-14);
  }
}

TEST(Fim2d, MatchesHorizontalRestriction) {
  SeededStream s(28, 1);
  for (int t = 0; t < 50; ++t) {
    std::vector<LinkInformation> links;
    std::vector<PlanarLink> planar;
    for (int k = 0; k < 4; ++k) {
      LinkInformation l{s.uniform(1, 5) * 1e4, s.uniform(1, 5) * 1e4, s.uniform(1, 5) * 1e20, kPi / 2,
                        s.uniform(-kPi, kPi), s.uniform(1, 10) / kC, s.uniform(-kPi, kPi)};
      links.push_back(l);
      planar.push_back({l.f_phi_phi, l.f_tau_tau, l.tau, l.phi + l.omega});
    }
    const Mat3 g = global_fim_decomposed(links).matrix;
    EXPECT_LT(rel_fro(g.topLeftCorner<2, 2>(), fim_2d(planar)), 1e-12);
  }
}

TEST(GeometryFactor, Cases) {
  const double tau = 4.0 / kC;
  const PlanarLink a{1.0 * tau * tau, 5.0, tau, 0.0};
  PlanarLink b = a;
  b.bearing = kPi / 2;
  EXPECT_LT(std::abs(geometry_factor({a, b})), 1e-12 * 5.0 / (kC * kC));
  SeededStream s(29, 1);
  std::vector<PlanarLink> iso;
  for (int k = 0; k < 5; ++k) {
    const double t2 = s.uniform(1, 10) / kC;
    const double w = s.uniform(1, 10);
    iso.push_back({w * t2 * t2, w, t2, s.uniform(-kPi, kPi)});
  }
  EXPECT_LT(std::abs(geometry_factor(iso)), 1e-12 * 10 / (kC * kC));
}

TEST(GeometryFactor, SpearmanTrendWithPeb) {
  SeededStream s(30, 1);
  const double tau = 5.0 / kC;
  std::vector<double> d, p;
  for (int t = 0; t < 200; ++t) {
    std::vector<PlanarLink> links;
    for (int k = 0; k < 4; ++k) links.push_back({2e19 * tau * tau, 1e20, tau, s.uniform(0, kTwoPi)});
    d.push_back(std::abs(geometry_factor(links)));
    p.push_back(peb_2d(fim_2d(links)));
  }
  EXPECT_GE(spearman(d, p), 0.0);
  EXPECT_GT(spearman(d, p), 0.9);  // the relation is monotone for equal per-AP information
}

TEST(ClosedForm, Cases) {
  const double tau = 3.0 / kC;
  const double a = 2e20;
  const PlanarLink iso{a * tau * tau, a, tau, 0.3};
  EXPECT_NEAR(optimal_peb_closed_form({iso}), std::sqrt(2.0 * kC * kC / a), 1e-12);
  EXPECT_NEAR(optimal_peb_closed_form({iso}), peb_2d(fim_2d({iso})), 1e-8 * peb_2d(fim_2d({iso})));
  EXPECT_NEAR(optimal_peb_closed_form({iso, iso}), optimal_peb_closed_form({iso}) / std::sqrt(2.0), 1e-15);

  std::vector<PlanarLink> four;
  for (double phi : {0.0, kPi / 4, kPi / 2, 3 * kPi / 4}) four.push_back({5e20 * tau * tau, 1e20, tau, phi});
  ASSERT_LT(std::abs(geometry_factor(four)), 1e-10);
  const double closed = optimal_peb_closed_form(four);
  EXPECT_NEAR(closed, peb_2d(fim_2d(four)), 1e-8 * closed);
  EXPECT_THROW(optimal_peb_closed_form({}), InvalidArgument);
  EXPECT_THROW(optimal_peb_closed_form({PlanarLink{0, 0, tau, 0}}), NumericalError);
}

TEST(ClosedForm, ZeroFactorLayoutIsOptimal) {
  SeededStream s(31, 1);
  std::vector<PlanarLink> base;
  for (int k = 0; k < 4; ++k) {
    const double tau = s.uniform(2, 8) / kC;
    base.push_back({s.uniform(1, 9) * 1e20 * tau * tau, s.uniform(1, 9) * 1e20, tau, 0.0});
  }
  // Phasor weights |a - b| admit a cancelling layout iff the largest is at most the sum of the rest.
  std::vector<double> w;
  for (const auto& l : base) w.push_back(std::abs(l.f_phi_phi / (l.tau * l.tau) - l.f_tau_tau));
  const double wsum = w[0] + w[1] + w[2] + w[3];
  const bool reachable = 2 * *std::max_element(w.begin(), w.end()) <= wsum;
  const double closed = optimal_peb_closed_form(base);
  double best = INFINITY;
  for (int t = 0; t < 2000; ++t) {
    for (auto& l : base) l.bearing = s.uniform(0, kTwoPi);
    const double v = peb_2d(fim_2d(base));
    EXPECT_GE(v, closed * (1 - 1e-12));
    best = std::min(best, v);
  }
  if (reachable) EXPECT_LT(best, closed * 1.05);
}

TEST(Averaged, DegeneratePriorMatchesDeterministic) {
  const EadfModel m = perturbed_upa(7);
  SeededStream s(32, 1);
  RandomLink link = random_link(s);
  const Mat7 avg = averaged_fim_theta(m, link.params, link.spec, {0.0, INFINITY});
  const Mat7 det = fim_theta(m, link.params, UeAntenna{1.0, 0.0, 0.0}, link.spec);
  EXPECT_LT(scaled_max_error(det, avg), 1e-12);
}

TEST(Averaged, UniformTiltEqualWeights) {
  const EadfModel m = perturbed_upa(7);
  SeededStream s(33, 1);
  RandomLink link = random_link(s);
  const Mat7 avg = averaged_fim_theta(m, link.params, link.spec, {0.3, 0.0});
  const Mat7 v = fim_theta(m, link.params, UeAntenna{1.0, 0.0, 0.0}, link.spec);
  const Mat7 h = fim_theta(m, link.params, UeAntenna{0.0, 1.0, 0.0}, link.spec);
  EXPECT_LT(scaled_max_error(Mat7(0.5 * (v + h)), avg), 1e-12);
}

TEST(Averaged, PebDirectionAndStability) {
  const double lambda = kC / 5.6e9;
  const SignalSpec spec = make_flat_spec(16, 400e6, 1e-14);
  const std::vector<ApGeometry> aps = {{Vec3(0, 0, 2), 0.3}, {Vec3(8, 0, 2), 2.5}, {Vec3(4, 6, 2), -1.6}};
  const Vec3 ue(3.5, 2.5, 1.0);
  auto averaged = [&](const EadfModel& m, double mu) {
    std::vector<Mat7> fims;
    for (const auto& ap : aps) fims.push_back(averaged_fim_theta(m, link_params(ap, ue, lambda), spec, {mu, 5.0}));
    return averaged_peb(fims, aps, ue);
  };
  const EadfModel single = build_eadf(synthesize_ideal_upa(2, 4, 0.5, 16, 16));
  EXPECT_GT(averaged(single, kPi / 2), averaged(single, 0.0));

  const EadfModel dual = build_eadf(perturb_pattern(
      synthesize_ideal_upa(2, 4, 0.5, 16, 16, PortLayout::DualPort), 5));
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i <= 4; ++i) {
    const double v = averaged(dual, i * kPi / 8);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT(hi / lo - 1.0, 0.05);
}

TEST(Averaged, CrossPolarRatioIsSmallForDualArray) {
  const EadfModel dual = build_eadf(perturb_pattern(
      synthesize_ideal_upa(2, 4, 0.5, 16, 16, PortLayout::Alternating), 5));
  SeededStream s(34, 1);
  const RandomLink link = random_link(s);
  const double r = cross_polar_ratio(dual, link.params, link.spec);
  EXPECT_GE(r, 0.0);
  EXPECT_LT(r, 0.5);
  const EadfModel ideal = build_eadf(synthesize_ideal_upa(2, 4, 0.5, 16, 16, PortLayout::Alternating));
  EXPECT_LT(cross_polar_ratio(ideal, link.params, link.spec), 1e-12);
}

TEST(TiltPrior, Rho) {
  EXPECT_EQ(TiltPrior({0.0, 0.0}).rho(), 0.0);
  EXPECT_GT(TiltPrior({0.0, 50.0}).rho(), 0.95);
  EXPECT_NEAR(TiltPrior({kPi / 2, INFINITY}).rho(), -1.0, 1e-15);
}
