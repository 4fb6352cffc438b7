#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dmimo/error.hpp"
#include "dmimo/mathcore.hpp"

using namespace dmimo;

namespace {

// Independent oracle: 64-term power series of I_n(x) in long double.
long double series_in(int n, long double x) {
  long double sum = 0.0L;
  long double fact_k = 1.0L;
  for (int k = 0; k < 64; ++k) {
    if (k > 0) fact_k *= k;
    long double fact_kn = 1.0L;
    for (int i = 2; i <= k + n; ++i) fact_kn *= i;
    sum += std::pow(x / 2.0L, 2 * k + n) / (fact_k * fact_kn);
  }
  return sum;
}

Eigen::MatrixXd random_spd(int n, SeededStream& s) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = s.normal();
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST(SeededStream, SameSeedSameSequence) {
  SeededStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeededStream, DistinctStreamsDiffer) {
  SeededStream a(42, 7), b(42, 8);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
  EXPECT_NE(SeededStream(1, 2).child(3).stream_id(), SeededStream(1, 2).child(4).stream_id());
}

TEST(SeededStream, PhiloxKnownAnswer) {
  // Random123 known-answer vectors for philox4x32-10.
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
  auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi[0], 0xd16cfe09u);
  EXPECT_EQ(pi[1], 0x94fdccebu);
  EXPECT_EQ(pi[2], 0x5001e420u);
  EXPECT_EQ(pi[3], 0x24126ea1u);
}

TEST(SeededStream, NormalMoments) {
  SeededStream s(3, 1);
  const int n = 200000;
  double m1 = 0, m2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(SeededStream, PoissonMean) {
  SeededStream s(5, 2);
  for (double mean : {0.3, 4.0, 60.0, 900.0}) {
    const int n = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(s.poisson(mean));
      sum += k;
      sq += k * k;
    }
    const double m = sum / n;
    const double var = sq / n - m * m;
    EXPECT_NEAR(m, mean, 4.0 * std::sqrt(mean / n)) << mean;
    EXPECT_NEAR(var / mean, 1.0, 0.06) << mean;
  }
  EXPECT_EQ(s.poisson(0.0), 0u);
  EXPECT_THROW(s.poisson(-1.0), InvalidArgument);
}

TEST(Bessel, RatioAtZeroAndLarge) {
  EXPECT_EQ(bessel_i_ratio(0.0), 0.0);
  EXPECT_GT(bessel_i_ratio(200.0), 0.99);
  EXPECT_LT(bessel_i_ratio(200.0), 1.0);
  EXPECT_EQ(bessel_i_ratio(INFINITY), 1.0);
  EXPECT_THROW(bessel_i_ratio(-1.0), InvalidArgument);
}

TEST(Bessel, RatioMatchesSeriesOracle) {
  for (double k : {1e-3, 0.5, 2.0, 8.0, 20.0}) {
    const long double ratio = series_in(2, k) / series_in(0, k);
    EXPECT_NEAR(bessel_i_ratio(k), static_cast<double>(ratio), 1e-10 * std::max(1.0, (double)ratio)) << k;
  }
  EXPECT_NEAR(bessel_i_ratio(2.0), static_cast<double>(series_in(2, 2.0L) / series_in(0, 2.0L)), 1e-12);
}

TEST(Bessel, ScaledFunctionsAcrossSeriesBoundary) {
  // e^-x I0(x) from the long-double series at x = 29.9 and 30.1 vs the implementation.
  for (double x : {29.9, 30.1, 45.0}) {
    const long double i0 = series_in(0, x) * std::exp(-static_cast<long double>(x));
    const long double i1 = series_in(1, x) * std::exp(-static_cast<long double>(x));
    EXPECT_NEAR(bessel_i0_scaled(x), static_cast<double>(i0), 1e-12 * static_cast<double>(i0));
    EXPECT_NEAR(bessel_i1_scaled(x), static_cast<double>(i1), 1e-12 * static_cast<double>(i1));
  }
}

TEST(Bessel, RatioMonotone) {
  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double k = 1e-6 * std::pow(10.0, 8.0 * i / 999.0);
    const double r = bessel_i_ratio(k);
    ASSERT_GE(r, prev) << k;
    prev = r;
  }
}

TEST(VonMises, UniformWhenKappaZero) {
  SeededStream s(11, 0);
  const int n = 20000;
  std::vector<double> x(n);
  for (double& v : x) v = sample_von_mises(0.0, 0.0, s) / kTwoPi;
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) d = std::max({d, std::abs(x[i] - (i + 1.0) / n), std::abs(x[i] - double(i) / n)});
  EXPECT_LT(d, 1.63 / std::sqrt(n));  // KS 1% critical value
}

TEST(VonMises, Concentrated) {
  SeededStream s(12, 0);
  const int n = 20000;
  double m = 0, q = 0;
  for (int i = 0; i < n; ++i) {
    double b = sample_von_mises(0.5, 1000.0, s);
    m += b;
    q += b * b;
  }
  m /= n;
  const double sd = std::sqrt(q / n - m * m);
  EXPECT_NEAR(m, 0.5, 0.01);
  EXPECT_LT(sd, 0.05);
}

TEST(VonMises, SecondMomentIdentity) {
  for (double kappa : {0.5, 2.0, 8.0}) {
    const double mu = 0.3;
    SeededStream s(13, static_cast<std::uint64_t>(kappa * 10));
    const int n = 1000000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double c = std::cos(2.0 * sample_von_mises(mu, kappa, s));
      sum += c;
      sq += c * c;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    EXPECT_NEAR(mean, bessel_i_ratio(kappa) * std::cos(2 * mu), 3 * se) << kappa;
  }
}

TEST(PsdInverse, IdentityAndPolicy) {
  EXPECT_TRUE(psd_inverse(Eigen::Matrix3d::Identity()).isApprox(Eigen::Matrix3d::Identity()));
  Eigen::Matrix2d d;
  d << 1.0, 0.0, 0.0, 1e-15;
  try {
    psd_inverse(d, 1e12);
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_GT(e.condition(), 1e12);
    EXPECT_NEAR(std::abs(e.null_direction()(1)), 1.0, 1e-12);
  }
}

TEST(PsdInverse, ResidualOnRandomSpd) {
  SeededStream s(21, 0);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd a = random_spd(7, s);
    const Eigen::MatrixXd inv = psd_inverse(a);
    EXPECT_LT((a * inv - Eigen::MatrixXd::Identity(7, 7)).norm(), 1e-8);
  }
}

TEST(PsdSqrt, SquaresBack) {
  SeededStream s(22, 0);
  const Eigen::MatrixXd a = random_spd(4, s);
  const Eigen::MatrixXd r = psd_sqrt(a);
  EXPECT_LT((r * r - a).norm(), 1e-10 * a.norm());
  Eigen::Matrix2d bad;
  bad << 1, 0, 0, -1;
  EXPECT_THROW(psd_sqrt(bad), InvalidArgument);
  EXPECT_TRUE(is_psd(a));
  EXPECT_FALSE(is_psd(bad));
}

TEST(Geometry, RotationAndWrap) {
  const Vec3 x = rotation_z(kPi / 2) * Vec3::UnitX();
  EXPECT_NEAR(x(1), 1.0, 1e-15);
  EXPECT_NEAR(wrap_two_pi(-0.5), kTwoPi - 0.5, 1e-15);
  EXPECT_NEAR(wrap_two_pi(7.0), 7.0 - kTwoPi, 1e-15);
  EXPECT_GE(wrap_two_pi(-1e-18), 0.0);
  EXPECT_LT(wrap_two_pi(-1e-18), kTwoPi);
}
