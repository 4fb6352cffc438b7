#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/eadf.hpp"
#include "dmimo/mathcore.hpp"

namespace dmimo {

/// LoS parameters of one AP-UE link in the AP's local frame.
struct LosParams {
  double theta = kPi / 2;  ///< elevation AoA, rad
  double phi = 0.0;        ///< azimuth AoA, rad
  double tau = 1e-8;       ///< delay, s
  cd alpha_vv{1.0, 0.0};
  cd alpha_hh{0.0, 0.0};

  void validate() const;
};

/// Single-antenna UE: transmit polarization gains and tilt angle beta.
struct UeAntenna {
  cd c_tv{1.0, 0.0};
  cd c_th{0.0, 0.0};
  double beta = 0.0;

  void validate() const;
};

/// Baseband sampling of the transmitted signal.
struct SignalSpec {
  std::vector<double> frequencies;  ///< Hz, baseband
  std::vector<double> amplitudes;   ///< |s(f)|
  double noise_variance = 1.0;      ///< per complex sample

  int count() const { return static_cast<int>(frequencies.size()); }
  /// E_s = sum |s(f)|^2
  double energy() const;
  void validate() const;
};

/// N_f uniformly spaced tones covering `bandwidth` centred at 0 Hz, unit amplitudes.
SignalSpec make_flat_spec(int frequency_count, double bandwidth, double noise_variance);

/// Noise variance giving per-sample SNR `snr_db` for a unit-gain isotropic element at
/// `reference_distance` under free-space loss: sigma^2 = (lambda/(4 pi d_ref))^2 E_s/(N_f SNR).
double noise_variance_for_snr(const SignalSpec& spec, double snr_db, double wavelength,
                              double reference_distance = 1.0);

/// Rotated transmit gains (c'_TV, c'_TH).
std::array<cd, 2> tilt_rotate(const UeAntenna& ue);

/// b_f[f] = s(f) exp(-j 2 pi f tau)
Eigen::VectorXcd delay_vector(const SignalSpec& spec, double tau);

/// B(Theta): (N*N_f) x 4, columns VV, VH, HV, HH; row index n*N_f + f.
Eigen::MatrixXcd build_b_matrix(const EadfModel& model, const LosParams& params,
                                const UeAntenna& ue, const SignalSpec& spec);

/// D = B(Theta) gamma with gamma = (alpha_vv, 0, 0, alpha_hh).
Eigen::VectorXcd noiseless_signal(const EadfModel& model, const LosParams& params,
                                  const UeAntenna& ue, const SignalSpec& spec);

/// Free-space amplitude lambda / (4 pi d).
cd free_space_gain(double wavelength, const Vec3& ap_position, const Vec3& ue_position);

/// D plus circular complex Gaussian noise of variance spec.noise_variance; deterministic in seed.
Eigen::VectorXcd synthesize_received(const EadfModel& model, const LosParams& params,
                                     const UeAntenna& ue, const SignalSpec& spec,
                                     std::uint64_t rng_seed);
/// Same, drawing noise from a caller-owned stream.
Eigen::VectorXcd synthesize_received(const EadfModel& model, const LosParams& params,
                                     const UeAntenna& ue, const SignalSpec& spec,
                                     SeededStream& stream);

/// RMS bandwidth: B_e^2 = sum f^2 |s|^2 / E_s.
double effective_bandwidth(const SignalSpec& spec);

}  // namespace dmimo
