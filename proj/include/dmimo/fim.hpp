#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dmimo/eadf.hpp"
#include "dmimo/mathcore.hpp"
#include "dmimo/signal.hpp"

namespace dmimo {

using Mat7 = Eigen::Matrix<double, 7, 7>;

/// Parameter order of the 7x7 FIM.
enum ThetaIndex { kTheta = 0, kPhi, kTau, kReVV, kImVV, kReHH, kImHH };

enum class Frame { Local, Global };

struct PositionFim {
  Mat3 matrix = Mat3::Zero();
  Frame frame = Frame::Local;
};

/// AP pose: position (m) and the CCW angle of its LCS x-axis from the GCS x-axis.
struct ApGeometry {
  Vec3 position = Vec3::Zero();
  double omega = 0.0;
};

/// Von Mises prior on the UE tilt angle.
struct TiltPrior {
  double mu = 0.0;
  double kappa = 0.0;  ///< may be +inf

  /// rho = I2(kappa)/I0(kappa) cos(2 mu)
  double rho() const;
};

/// Diagonal FIM entries of one link plus the link geometry used by the decompositions.
struct LinkInformation {
  double f_theta_theta = 0.0;
  double f_phi_phi = 0.0;
  double f_tau_tau = 0.0;
  double theta = kPi / 2;
  double phi = 0.0;
  double tau = 1e-8;
  double omega = 0.0;
};

/// Azimuth-plane view of one link: phi'=phi+omega is the global bearing AP->UE.
struct PlanarLink {
  double f_phi_phi = 0.0;
  double f_tau_tau = 0.0;
  double tau = 1e-8;
  double bearing = 0.0;
};

/// Geometric LoS parameters of the AP->UE link in the AP frame; both co-polar gains set to
/// the free-space amplitude.
LosParams link_params(const ApGeometry& ap, const Vec3& ue_position, double wavelength);

/// Complex Jacobian dD/dTheta, (N*N_f) x 7, for rotated transmit gains c_t = (c'_TV, c'_TH).
Eigen::MatrixXcd signal_jacobian(const EadfModel& model, const LosParams& params,
                                 const std::array<cd, 2>& c_t, const SignalSpec& spec);

/// F = (2/sigma^2) Re{J^H J}.
Mat7 fim_theta(const EadfModel& model, const LosParams& params, const UeAntenna& ue,
               const SignalSpec& spec);

/// Schur complement of the gain block. Gain parameters with an identically zero FIM row are
/// dropped first; the rest is inverted after diagonal equilibration under the conditioning
/// policy (ConditioningError otherwise).
Mat3 efim_xi(const Mat7& fim);

/// J with J(i, j) = d xi_j / d p_i, xi = (theta, phi, tau), in the AP frame.
/// Throws SingularAzimuthError within the pole tolerance of theta = 0 or pi.
Mat3 jacobian_xi_to_p(const LosParams& params);
/// Analytic inverse: row j is d p / d xi_j.
Mat3 jacobian_p_to_xi(const LosParams& params);

PositionFim local_fim_exact(const Mat7& fim, const LosParams& params);

/// Three orthogonal ranging-direction terms: elevation, azimuth, and distance information.
PositionFim local_fim_decomposed(double f_theta_theta, double f_phi_phi, double f_tau_tau,
                                 const LosParams& params);

/// Outer product of the unit vector u(theta, phi).
Mat3 rdm(double theta, double phi);
/// 2D counterpart [cos, sin]^T [cos, sin].
Mat2 rdm_2d(double phi);

/// R_z(omega) F R_z(omega)^T
PositionFim to_global(const PositionFim& local, double omega);

/// Sum of rotated local FIMs.
PositionFim global_fim(const std::vector<PositionFim>& locals, const std::vector<ApGeometry>& aps);
/// Direct evaluation of the decomposed joint FIM with the bearing shifted by omega.
PositionFim global_fim_decomposed(const std::vector<LinkInformation>& links);

/// sqrt(tr F^-1); ConditioningError when F is not invertible under the policy.
double peb(const Mat3& fim);
double peb(const PositionFim& fim);
double peb_2d(const Mat2& fim);

Mat2 fim_2d(const std::vector<PlanarLink>& links);
cd geometry_factor(const std::vector<PlanarLink>& links);
/// Closed-form PEB attained by any layout with zero geometry factor.
double optimal_peb_closed_form(const std::vector<PlanarLink>& links);

/// Planar links from per-AP diagonal entries and positions (bearing and tau from geometry).
std::vector<PlanarLink> planar_links(const std::vector<LinkInformation>& diagonals,
                                     const std::vector<ApGeometry>& aps, const Vec2& ue_position);

/// Expected FIM over a Von Mises tilt for a single-polarized UE antenna.
Mat7 averaged_fim_theta(const EadfModel& model, const LosParams& params, const SignalSpec& spec,
                        const TiltPrior& tilt);

/// ||Re(G_V^H G_H + G_H^H G_V)||_F / ||Re(G_V^H G_V + G_H^H G_H)||_F: size of the cross-polar
/// terms that the tilt average neglects.
double cross_polar_ratio(const EadfModel& model, const LosParams& params, const SignalSpec& spec);

/// Global position FIM contributed by one AP from its 7x7 FIM.
PositionFim position_fim(const Mat7& fim, const ApGeometry& ap, const Vec3& ue_position);

/// One-call global FIM of a single AP for a UE at `ue_position`.
PositionFim ap_position_fim(const EadfModel& model, const ApGeometry& ap, const Vec3& ue_position,
                            const UeAntenna& ue, const SignalSpec& spec, double wavelength);

/// PEB of the sum of per-AP averaged FIMs.
double averaged_peb(const std::vector<Mat7>& fims, const std::vector<ApGeometry>& aps,
                    const Vec3& ue_position);

}  // namespace dmimo
