#include "dmimo/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"

namespace dmimo {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// SplitMix64 finalizer; used only to derive child stream ids.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Power series for I_n(x) with n in {0, 1}; all terms positive.
double bessel_i_series(int order, double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = order == 0 ? 1.0 : half;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Asymptotic expansion of e^{-x} I_n(x) for large x.
double bessel_i_asymptotic_scaled(int order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(kTwoPi * x);
}

constexpr double kBesselSeriesLimit = 30.0;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

SeededStream SeededStream::child(std::uint64_t child_id) const {
  return SeededStream(master_seed_, mix64(stream_id_ ^ mix64(child_id + 0x5851F42D4C957F2Dull)));
}

std::uint64_t SeededStream::next_u64() {
  if (buffered_ == 0) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(master_seed_),
                                              static_cast<std::uint32_t>(master_seed_ >> 32)};
    const auto block = philox4x32(ctr, key);
    ++counter_;
    buffer_[0] = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    buffer_[1] = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double SeededStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

cd SeededStream::complex_normal(double variance) {
  const double scale = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return {scale * re, scale * im};
}

std::uint64_t SeededStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidArgument("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean > 500.0) {
    // Normal approximation; relative skew is below 5% at this mean.
    const double draw = std::round(mean + std::sqrt(mean) * normal());
    return draw < 0.0 ? 0 : static_cast<std::uint64_t>(draw);
  }
  // Inversion by sequential search.
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0 && cdf < u) break;
  }
  return k;
}

double bessel_i0_scaled(double x) {
  if (x < 0.0) throw InvalidArgument("bessel argument must be >= 0");
  if (x <= kBesselSeriesLimit) return bessel_i_series(0, x) * std::exp(-x);
  return bessel_i_asymptotic_scaled(0, x);
}

double bessel_i1_scaled(double x) {
  if (x < 0.0) throw InvalidArgument("bessel argument must be >= 0");
  if (x <= kBesselSeriesLimit) return bessel_i_series(1, x) * std::exp(-x);
  return bessel_i_asymptotic_scaled(1, x);
}

double bessel_i_ratio(double kappa) {
  if (std::isnan(kappa) || kappa < 0.0) throw InvalidArgument("kappa must be >= 0");
  if (std::isinf(kappa)) return 1.0;
  if (kappa < 1e-4) {
    // I2/I0 = k^2/8 - k^4/96 + O(k^6)
    const double k2 = kappa * kappa;
    return k2 / 8.0 - k2 * k2 / 96.0;
  }
  // I2 = I0 - (2/k) I1, so I2/I0 = 1 - (2/k) I1/I0.
  return 1.0 - (2.0 / kappa) * (bessel_i1_scaled(kappa) / bessel_i0_scaled(kappa));
}

double sample_von_mises(double mu, double kappa, SeededStream& stream) {
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be >= 0");
  if (kappa < 1e-8) return wrap_two_pi(kTwoPi * stream.uniform());
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double u3 = stream.uniform();
  const double offset = std::acos(std::clamp(f, -1.0, 1.0));
  return wrap_two_pi(u3 > 0.5 ? mu + offset : mu - offset);
}

Eigen::MatrixXd psd_inverse(const Eigen::MatrixXd& matrix, double condition_limit) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("psd_inverse: matrix must be square");
  if (matrix.size() == 0) return matrix;
  if (!matrix.allFinite()) throw InvalidArgument("psd_inverse: non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = values.cwiseAbs().maxCoeff();
  const double smallest = values(0);
  const double condition =
      smallest > 0.0 ? largest / smallest : std::numeric_limits<double>::infinity();
  if (largest == 0.0 || smallest <= tolerance::kEigenFloor * largest || condition > condition_limit) {
    throw ConditioningError("matrix is singular or ill-conditioned (condition " +
                                std::to_string(condition) + ")",
                            condition, eig.eigenvectors().col(0));
  }
  return eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("psd_sqrt: matrix must be square");
  if (!matrix.allFinite()) throw InvalidArgument("psd_sqrt: non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double slack = tolerance::kPsdSlack * std::max(sym.trace(), 1e-300);
  if (eig.eigenvalues().minCoeff() < -slack)
    throw InvalidArgument("psd_sqrt: matrix is not positive semidefinite");
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

bool is_psd(const Eigen::MatrixXd& matrix, double slack) {
  if (matrix.rows() != matrix.cols() || !matrix.allFinite()) return false;
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > tolerance::kSymmetry * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (matrix + matrix.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -slack * std::max(std::abs(matrix.trace()), scale);
}

Mat3 rotation_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

double wrap_two_pi(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

int default_worker_count() {
  if (const char* env = std::getenv("DMIMO_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace dmimo
