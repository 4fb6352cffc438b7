#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/mathcore.hpp"

namespace dmimo {

enum class Polarization { V = 0, H = 1 };

inline constexpr int kPolarizationCount = 2;

/// Sampled dual-polarized radiation pattern of an N-element array.
///
/// Rows are elevation samples at 2*pi*m/M_theta and columns azimuth samples at
/// 2*pi*m/M_phi, m = 0..M-1 (full period on both axes). Elevation beyond pi is the
/// periodic extension of the physical sphere; see `extend_elevation`.
class PatternGrid {
 public:
  PatternGrid(int element_count, int m_theta, int m_phi);

  int element_count() const { return element_count_; }
  int m_theta() const { return m_theta_; }
  int m_phi() const { return m_phi_; }

  cd& at(int element, Polarization pol, int theta_index, int phi_index) {
    return samples_[offset(element, pol, theta_index, phi_index)];
  }
  const cd& at(int element, Polarization pol, int theta_index, int phi_index) const {
    return samples_[offset(element, pol, theta_index, phi_index)];
  }

  double theta_at(int theta_index) const { return kTwoPi * theta_index / m_theta_; }
  double phi_at(int phi_index) const { return kTwoPi * phi_index / m_phi_; }

  const std::vector<cd>& samples() const { return samples_; }

  /// Throws InvalidArgument for odd grid sizes or non-finite samples.
  void validate() const;

 private:
  std::size_t offset(int element, Polarization pol, int theta_index, int phi_index) const {
    return ((static_cast<std::size_t>(element) * kPolarizationCount + static_cast<int>(pol)) *
                m_theta_ + theta_index) * m_phi_ + phi_index;
  }

  int element_count_;
  int m_theta_;
  int m_phi_;
  std::vector<cd> samples_;
};

/// Effective aperture distribution function: per (element, polarization) 2D Fourier
/// coefficients of a PatternGrid.
///
/// Row r = 2*element + polarization; column a*M_phi + b holds the coefficient of
/// exp(j(theta*theta_index[a] + phi*phi_index[b])).
struct EadfModel {
  Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> coefficients;
  Eigen::VectorXd theta_index;
  Eigen::VectorXd phi_index;
  bool normalized = false;

  int element_count() const { return static_cast<int>(coefficients.rows()) / kPolarizationCount; }
  int m_theta() const { return static_cast<int>(theta_index.size()); }
  int m_phi() const { return static_cast<int>(phi_index.size()); }
};

enum class AngleParameter { Theta, Phi };

/// Responses of both polarizations and their angle derivatives at one direction.
struct ArrayResponse {
  Eigen::VectorXcd value[kPolarizationCount];
  Eigen::VectorXcd d_theta[kPolarizationCount];
  Eigen::VectorXcd d_phi[kPolarizationCount];
};

EadfModel build_eadf(const PatternGrid& pattern);

/// Scales each element so that frequency_count * sum |q|^2 over polarizations and both
/// angle indices equals one. Already-normalized input is returned unchanged (to rounding).
EadfModel normalize_eadf(const EadfModel& model, int frequency_count = 1);

/// Response c(theta, phi) of every element for one polarization (2D inverse DFT).
Eigen::VectorXcd evaluate_response(const EadfModel& model, double theta, double phi,
                                   Polarization pol);

/// Analytic derivative of `evaluate_response` with respect to theta or phi.
Eigen::VectorXcd evaluate_response_derivative(const EadfModel& model, double theta, double phi,
                                              Polarization pol, AngleParameter wrt);

/// Values and derivatives for both polarizations in one pass.
ArrayResponse evaluate_all(const EadfModel& model, double theta, double phi,
                           bool with_derivatives = true);

/// Port polarization layout of a synthetic dual-polarized array.
enum class PortLayout {
  AllVertical,  ///< every port V-polarized
  Alternating,  ///< ports 0,2,4,... V and 1,3,5,... H
  DualPort,     ///< a V port and an H port at every site: 2*rows*cols ports, V first
};

/// Pattern of an ideal rows x cols planar array in the LCS y-z plane (boresight +x).
///
/// Element (r, c) sits at (0, (c - (cols-1)/2) d, (r - (rows-1)/2) d) wavelengths and
/// responds with exp(j 2 pi pos . u(theta, phi)) on its own polarization and exactly zero
/// on the other one. With DualPort, ports 2s and 2s+1 share site s.
PatternGrid synthesize_ideal_upa(int rows, int cols, double spacing_wavelengths, int m_theta,
                                 int m_phi, PortLayout layout = PortLayout::AllVertical);

/// Per-element impairments applied by `perturb_pattern`.
struct PerturbationSpec {
  double magnitude_sigma_db = 0.5;
  double phase_limit_deg = 5.0;
  double cross_polar_db = -20.0;
};

/// Ideal pattern with per-element complex gain jitter (log-normal magnitude, uniform
/// phase) and cross-polar leakage with a random per-element phase.
PatternGrid perturb_pattern(const PatternGrid& ideal, std::uint64_t seed,
                            const PerturbationSpec& spec = {});

/// Builds a full-period grid from a physical pattern sampled on theta in [0, pi].
///
/// `half` must have M_theta/2 + 1 elevation rows (0, 2pi/M_theta, ..., pi); rows beyond pi
/// are filled with c(2pi - theta, phi + pi).
PatternGrid extend_elevation(const PatternGrid& half, int m_theta);

/// Text format: header `eadf-pattern v1 N M_theta M_phi`, then one `re im` line per
/// sample in (element, polarization, theta, phi) order, shortest round-trip decimals.
void write_pattern(std::ostream& out, const PatternGrid& pattern);
PatternGrid read_pattern(std::istream& in);

}  // namespace dmimo
