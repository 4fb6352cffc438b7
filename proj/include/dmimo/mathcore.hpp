#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace dmimo {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Speed of light in vacuum, exact.
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Default numerical tolerances. Production code reads these; tests may pass their own.
namespace tolerance {
inline constexpr double kConditionLimit = 1e12;
inline constexpr double kEigenFloor = 1e-12;
inline constexpr double kPoleAngle = 1e-6;
inline constexpr double kSymmetry = 1e-10;
inline constexpr double kPsdSlack = 1e-8;
}  // namespace tolerance

/// Counter-based random stream (Philox4x32-10).
///
/// Each draw is a pure function of (master_seed, stream_id, counter), so streams can be
/// created independently in any worker and always reproduce the same sequence. Normal
/// variates use the Marsaglia polar method and Poisson variates use inversion, both on top
/// of 53-bit uniforms, so sequences do not depend on the standard library's distributions.
class SeededStream {
 public:
  SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derived stream for a sub-task; children of distinct (stream_id, child) pairs never collide.
  SeededStream child(std::uint64_t child_id) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  cd complex_normal(double variance);
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// One Philox4x32-10 block for the given key and counter words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Ratio I2(kappa)/I0(kappa) of modified Bessel functions of the first kind, kappa >= 0.
/// Returns 1 for kappa = +inf.
double bessel_i_ratio(double kappa);

/// Exponentially scaled I0 and I1: e^{-x} I_n(x), x >= 0.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// Von Mises draw (Best-Fisher rejection), wrapped to [0, 2pi).
double sample_von_mises(double mu, double kappa, SeededStream& stream);

/// Inverse of a symmetric matrix through its eigendecomposition.
///
/// Throws ConditioningError when max|lambda|/min(lambda) exceeds `condition_limit` or any
/// eigenvalue is non-positive.
Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& matrix,
                            double condition_limit = tolerance::kConditionLimit);

/// Symmetric square root (eigenvalues clipped at zero). Throws InvalidArgument when the
/// matrix has an eigenvalue below -kPsdSlack * trace.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& matrix);

/// Whether `matrix` is symmetric and positive semidefinite within the default slack.
bool is_psd(const Eigen::MatrixXd& matrix, double slack = tolerance::kPsdSlack);

/// Rotation about the z axis by `angle` (counter-clockwise).
Mat3 rotation_z(double angle);

/// Wrap an angle into [0, 2pi).
double wrap_two_pi(double angle);

}  // namespace dmimo
