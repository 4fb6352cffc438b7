#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dmimo/eadf.hpp"
#include "dmimo/error.hpp"

using namespace dmimo;

namespace {

PatternGrid random_grid(int n, int mt, int mp, std::uint64_t seed) {
  PatternGrid g(n, mt, mp);
  SeededStream s(seed, 0);
  for (int e = 0; e < n; ++e)
    for (int p = 0; p < 2; ++p)
      for (int i = 0; i < mt; ++i)
        for (int k = 0; k < mp; ++k) g.at(e, static_cast<Polarization>(p), i, k) = s.complex_normal(1.0);
  return g;
}

// Oracle: direct plane-wave phase of element (r, c) of a y-z planar array.
cd plane_wave(int rows, int cols, double d, int r, int c, double theta, double phi) {
  const double y = (c - (cols - 1) / 2.0) * d;
  const double z = (r - (rows - 1) / 2.0) * d;
  const double ux = std::sin(theta) * std::cos(phi);
  const double uy = std::sin(theta) * std::sin(phi);
  const double uz = std::cos(theta);
  return std::exp(cd(0, 2 * kPi * (0.0 * ux + y * uy + z * uz)));
}

}  // namespace

TEST(BuildEadf, ConstantPatternSingleCoefficient) {
  PatternGrid g(1, 8, 6);
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 6; ++k) g.at(0, Polarization::V, i, k) = 1.0;
  const EadfModel m = build_eadf(g);
  const Eigen::Index center = (8 / 2) * 6 + 6 / 2;
  for (Eigen::Index c = 0; c < m.coefficients.cols(); ++c) {
    const double expected = c == center ? 48.0 : 0.0;
    EXPECT_NEAR(std::abs(m.coefficients(0, c) - expected), 0.0, 1e-12) << c;
  }
  EXPECT_EQ(m.theta_index(0), -4);
  EXPECT_EQ(m.theta_index(7), 3);
  for (double th : {0.0, 0.7, 2.9})
    EXPECT_NEAR(std::abs(evaluate_response(m, th, 1.3, Polarization::V)(0) - 1.0), 0.0, 1e-13);
  EXPECT_LT(evaluate_response_derivative(m, 0.3, 0.4, Polarization::V, AngleParameter::Phi).norm(), 1e-13);
}

TEST(BuildEadf, SingleFourierMode) {
  PatternGrid g(1, 8, 8);
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 8; ++k) g.at(0, Polarization::V, i, k) = std::polar(1.0, g.theta_at(i));
  const EadfModel m = build_eadf(g);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const double mag = std::abs(m.coefficients(0, a * 8 + b));
      if (m.theta_index(a) == 1 && m.phi_index(b) == 0)
        EXPECT_NEAR(mag, 64.0, 1e-10);
      else
        EXPECT_LT(mag, 1e-10);
    }
  const double th = 0.77;
  const cd d = evaluate_response_derivative(m, th, 0.1, Polarization::V, AngleParameter::Theta)(0);
  EXPECT_NEAR(std::abs(d - cd(0, 1) * std::polar(1.0, th)), 0.0, 1e-12);
}

TEST(BuildEadf, RejectsOddAndNonFinite) {
  EXPECT_THROW(build_eadf(PatternGrid(1, 7, 8)), InvalidArgument);
  EXPECT_THROW(build_eadf(PatternGrid(1, 8, 5)), InvalidArgument);
  PatternGrid g(1, 4, 4);
  g.at(0, Polarization::H, 1, 1) = cd(NAN, 0);
  EXPECT_THROW(build_eadf(g), InvalidArgument);
}

TEST(BuildEadf, RoundTripRandomGrids) {
  for (int n : {1, 2, 4}) {
    for (int m : {4, 8, 16}) {
      const PatternGrid g = random_grid(n, m, m, 100 + n * 17 + m);
      const EadfModel model = build_eadf(g);
      double worst = 0.0;
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
          for (int p = 0; p < 2; ++p) {
            const auto pol = static_cast<Polarization>(p);
            const Eigen::VectorXcd c = evaluate_response(model, g.theta_at(i), g.phi_at(k), pol);
            for (int e = 0; e < n; ++e)
              worst = std::max(worst, std::abs(c(e) - g.at(e, pol, i, k)) / std::abs(g.at(e, pol, i, k)));
          }
      EXPECT_LT(worst, 1e-10) << n << " " << m;
    }
  }
}

TEST(EvaluateResponse, GridPointAndPeriodicity) {
  const PatternGrid g = random_grid(3, 8, 10, 9);
  const EadfModel model = build_eadf(g);
  const Eigen::VectorXcd c = evaluate_response(model, g.theta_at(3), g.phi_at(5), Polarization::H);
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(std::abs(c(e) - g.at(e, Polarization::H, 3, 5)), 0.0, 1e-12);
  const double th = 0.4, ph = 2.2;
  const Eigen::VectorXcd a = evaluate_response(model, th, ph, Polarization::V);
  const Eigen::VectorXcd b = evaluate_response(model, th + kTwoPi, ph, Polarization::V);
  const Eigen::VectorXcd d = evaluate_response(model, th, ph + kTwoPi, Polarization::V);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a - d).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(evaluate_response(model, NAN, 0.0, Polarization::V), InvalidArgument);
}

TEST(EvaluateResponse, DerivativesMatchFiniteDifference) {
  const EadfModel model = build_eadf(random_grid(2, 8, 8, 31));
  SeededStream s(77, 0);
  const double h = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const double th = s.uniform(0.0, kTwoPi);
    const double ph = s.uniform(0.0, kTwoPi);
    for (int p = 0; p < 2; ++p) {
      const auto pol = static_cast<Polarization>(p);
      const Eigen::VectorXcd dt = evaluate_response_derivative(model, th, ph, pol, AngleParameter::Theta);
      const Eigen::VectorXcd dp = evaluate_response_derivative(model, th, ph, pol, AngleParameter::Phi);
      const Eigen::VectorXcd ft = (evaluate_response(model, th + h, ph, pol) -
                                   evaluate_response(model, th - h, ph, pol)) / (2 * h);
      const Eigen::VectorXcd fp = (evaluate_response(model, th, ph + h, pol) -
                                   evaluate_response(model, th, ph - h, pol)) / (2 * h);
      EXPECT_LT((dt - ft).norm() / dt.norm(), 1e-6);
      EXPECT_LT((dp - fp).norm() / dp.norm(), 1e-6);
      const ArrayResponse all = evaluate_all(model, th, ph);
      EXPECT_LT((all.d_theta[p] - dt).norm(), 1e-12 * dt.norm());
      EXPECT_LT((all.d_phi[p] - dp).norm(), 1e-12 * dp.norm());
    }
  }
}

TEST(Normalize, EqualMagnitudes) {
  EadfModel m;
  m.theta_index = Eigen::VectorXd::LinSpaced(4, -2, 1);
  m.phi_index = Eigen::VectorXd::LinSpaced(6, -3, 2);
  m.coefficients.resize(2, 24);
  SeededStream s(1, 1);
  for (Eigen::Index c = 0; c < 24; ++c)
    for (int r = 0; r < 2; ++r) m.coefficients(r, c) = std::polar(1.0, s.uniform(0, kTwoPi));
  const EadfModel n = normalize_eadf(m, 1);
  EXPECT_TRUE(n.normalized);
  const double scale = 1.0 / std::sqrt(2.0 * 4 * 6);
  EXPECT_LT((n.coefficients - scale * m.coefficients).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(n.coefficients.squaredNorm(), 1.0, 1e-12);
}

TEST(Normalize, InterElementRatioAndIdempotence) {
  EadfModel m;
  m.theta_index = Eigen::VectorXd::LinSpaced(2, -1, 0);
  m.phi_index = Eigen::VectorXd::LinSpaced(2, -1, 0);
  m.coefficients = decltype(m.coefficients)::Zero(4, 4);
  m.coefficients(0, 0) = 2.0;  // element 0 energy 4
  m.coefficients(2, 1) = 1.0;  // element 1 energy 1
  const EadfModel n = normalize_eadf(m, 1);
  EXPECT_NEAR(n.coefficients(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(n.coefficients(2, 1).real(), 1.0, 1e-15);

  const EadfModel r = normalize_eadf(build_eadf(random_grid(3, 8, 8, 5)), 16);
  const EadfModel r2 = normalize_eadf(r, 16);
  EXPECT_LT((r.coefficients - r2.coefficients).cwiseAbs().maxCoeff(), 1e-12);
  for (int e = 0; e < 3; ++e)
    EXPECT_NEAR(16 * r.coefficients.middleRows(2 * e, 2).squaredNorm(), 1.0, 1e-12);
}

TEST(Normalize, ZeroEnergyElementNamed) {
  EadfModel m = build_eadf(random_grid(3, 4, 4, 2));
  m.coefficients.middleRows(2, 2).setZero();
  try {
    normalize_eadf(m, 1);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("element 1"), std::string::npos);
  }
}

TEST(IdealUpa, SingleElementAndBroadside) {
  const EadfModel one = build_eadf(synthesize_ideal_upa(1, 1, 0.5, 8, 8));
  const ArrayResponse r = evaluate_all(one, 1.1, 0.3, false);
  EXPECT_NEAR(std::abs(r.value[0](0) - 1.0), 0.0, 1e-12);
  EXPECT_EQ(r.value[1].norm(), 0.0);

  const EadfModel pair = build_eadf(synthesize_ideal_upa(1, 2, 0.5, 16, 16));
  const Eigen::VectorXcd c = evaluate_response(pair, kPi / 2, 0.0, Polarization::V);
  EXPECT_NEAR(std::abs(c(0) - c(1)), 0.0, 1e-10);
  EXPECT_THROW(synthesize_ideal_upa(1, 2, 0.0, 8, 8), InvalidArgument);
}

TEST(IdealUpa, BoresightEqualPhaseAndPlaneWave) {
  const int rows = 2, cols = 4;
  const EadfModel m = build_eadf(synthesize_ideal_upa(rows, cols, 0.5, 36, 36));
  const Eigen::VectorXcd b = evaluate_response(m, kPi / 2, 0.0, Polarization::V);
  for (int e = 1; e < 8; ++e) EXPECT_NEAR(std::abs(b(e) - b(0)), 0.0, 1e-9);
  const double th = 60 * kPi / 180, ph = 30 * kPi / 180;
  const Eigen::VectorXcd c = evaluate_response(m, th, ph, Polarization::V);
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < cols; ++k)
      EXPECT_NEAR(std::abs(c(r * cols + k) - plane_wave(rows, cols, 0.5, r, k, th, ph)), 0.0, 1e-8);
}

TEST(IdealUpa, AlternatingLayout) {
  const PatternGrid g = synthesize_ideal_upa(2, 2, 0.5, 8, 8, PortLayout::Alternating);
  EXPECT_EQ(g.at(1, Polarization::V, 2, 3), cd(0.0, 0.0));
  EXPECT_NEAR(std::abs(g.at(1, Polarization::H, 2, 3)), 1.0, 1e-15);
  EXPECT_EQ(g.at(2, Polarization::H, 2, 3), cd(0.0, 0.0));
}

TEST(IdealUpa, DualPortLayout) {
  const PatternGrid g = synthesize_ideal_upa(1, 3, 0.5, 8, 8, PortLayout::DualPort);
  ASSERT_EQ(g.element_count(), 6);
  for (int site = 0; site < 3; ++site) {
    EXPECT_EQ(g.at(2 * site, Polarization::H, 1, 5), cd(0.0, 0.0));
    EXPECT_EQ(g.at(2 * site + 1, Polarization::V, 1, 5), cd(0.0, 0.0));
    EXPECT_EQ(g.at(2 * site, Polarization::V, 1, 5), g.at(2 * site + 1, Polarization::H, 1, 5));
  }
}

TEST(Perturb, GainsAndLeakage) {
  const PatternGrid ideal = synthesize_ideal_upa(2, 2, 0.5, 8, 8);
  const PatternGrid a = perturb_pattern(ideal, 4);
  const PatternGrid b = perturb_pattern(ideal, 4);
  EXPECT_EQ(a.samples(), b.samples());
  for (int e = 0; e < 4; ++e) {
    const cd g = a.at(e, Polarization::V, 3, 1) / ideal.at(e, Polarization::V, 3, 1);
    EXPECT_LT(std::abs(20 * std::log10(std::abs(g))), 3.0);
    EXPECT_LT(std::abs(std::arg(g)), 5 * kPi / 180 + 1e-12);
    const cd leak = a.at(e, Polarization::H, 3, 1) / a.at(e, Polarization::V, 3, 1);
    EXPECT_NEAR(20 * std::log10(std::abs(leak)), -20.0, 1e-9);
    // same complex gain at another grid point
    EXPECT_NEAR(std::abs(a.at(e, Polarization::V, 5, 6) / ideal.at(e, Polarization::V, 5, 6) - g), 0, 1e-12);
  }
  EXPECT_NE(perturb_pattern(ideal, 5).samples(), a.samples());
}

TEST(ExtendElevation, MatchesFullPeriodSynthesis) {
  const int mt = 12, mp = 10;
  const PatternGrid full = synthesize_ideal_upa(2, 3, 0.5, mt, mp);
  PatternGrid half(6, mt / 2 + 1, mp);
  for (int e = 0; e < 6; ++e)
    for (int i = 0; i <= mt / 2; ++i)
      for (int k = 0; k < mp; ++k) half.at(e, Polarization::V, i, k) = full.at(e, Polarization::V, i, k);
  const PatternGrid ext = extend_elevation(half, mt);
  for (std::size_t i = 0; i < full.samples().size(); ++i)
    EXPECT_NEAR(std::abs(ext.samples()[i] - full.samples()[i]), 0.0, 1e-12);
  EXPECT_THROW(extend_elevation(half, 14), InvalidArgument);
}

TEST(PatternIo, RoundTripExact) {
  const PatternGrid g = random_grid(2, 4, 6, 8);
  std::stringstream ss;
  write_pattern(ss, g);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("eadf-pattern v1 2 4 6\n", 0), 0u);
  const PatternGrid back = read_pattern(ss);
  EXPECT_EQ(back.samples(), g.samples());
  std::stringstream bad("eadf-pattern v1 1 2 2\n1 0\n");
  EXPECT_THROW(read_pattern(bad), InvalidArgument);
}
