#include "dmimo/signal.hpp"

#include <cmath>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

void LosParams::validate() const {
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw InvalidArgument("LoS angles must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("LoS delay must be positive");
  for (const cd& a : {alpha_vv, alpha_hh})
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InvalidArgument("LoS gains must be finite");
}

void UeAntenna::validate() const {
  if (std::abs(c_tv) == 0.0 && std::abs(c_th) == 0.0)
    throw InvalidArgument("UE antenna gains are both zero");
  if (!std::isfinite(beta)) throw InvalidArgument("UE tilt must be finite");
}

double SignalSpec::energy() const {
  double e = 0.0;
  for (double a : amplitudes) e += a * a;
  return e;
}

void SignalSpec::validate() const {
  if (frequencies.size() < 2) throw InvalidArgument("signal needs at least two frequency samples");
  if (amplitudes.size() != frequencies.size())
    throw InvalidArgument("signal amplitudes and frequencies differ in length");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!std::isfinite(frequencies[i])) throw InvalidArgument("non-finite frequency");
    if (!(amplitudes[i] >= 0.0) || !std::isfinite(amplitudes[i]))
      throw InvalidArgument("amplitudes must be finite and nonnegative");
  }
  if (!(energy() > 0.0)) throw InvalidArgument("signal energy must be positive");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidArgument("noise variance must be positive");
}

SignalSpec make_flat_spec(int frequency_count, double bandwidth, double noise_variance) {
  if (frequency_count < 2) throw InvalidArgument("frequency_count must be >= 2");
  if (!(bandwidth > 0.0)) throw InvalidArgument("bandwidth must be positive");
  SignalSpec spec;
  spec.noise_variance = noise_variance;
  const double step = bandwidth / frequency_count;
  for (int i = 0; i < frequency_count; ++i) {
    spec.frequencies.push_back((i - 0.5 * (frequency_count - 1)) * step);
    spec.amplitudes.push_back(1.0);
  }
  return spec;
}

double noise_variance_for_snr(const SignalSpec& spec, double snr_db, double wavelength,
                              double reference_distance) {
  if (!(wavelength > 0.0) || !(reference_distance > 0.0))
    throw InvalidArgument("wavelength and reference distance must be positive");
  const double gain = wavelength / (4.0 * kPi * reference_distance);
  return gain * gain * spec.energy() / (spec.count() * std::pow(10.0, snr_db / 10.0));
}

std::array<cd, 2> tilt_rotate(const UeAntenna& ue) {
  const double c = std::cos(ue.beta);
  const double s = std::sin(ue.beta);
  return {ue.c_tv * c - ue.c_th * s, ue.c_tv * s + ue.c_th * c};
}

Eigen::VectorXcd delay_vector(const SignalSpec& spec, double tau) {
  Eigen::VectorXcd b(spec.count());
  for (int f = 0; f < spec.count(); ++f)
    b(f) = std::polar(spec.amplitudes[f], -kTwoPi * spec.frequencies[f] * tau);
  return b;
}

namespace {

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

}  // namespace

Eigen::MatrixXcd build_b_matrix(const EadfModel& model, const LosParams& params,
                                const UeAntenna& ue, const SignalSpec& spec) {
  params.validate();
  ue.validate();
  spec.validate();
  const ArrayResponse r = evaluate_all(model, params.theta, params.phi, false);
  const Eigen::VectorXcd b = delay_vector(spec, params.tau);
  const auto ct = tilt_rotate(ue);
  const Eigen::VectorXcd rv = kron(r.value[0], b);
  const Eigen::VectorXcd rh = kron(r.value[1], b);
  Eigen::MatrixXcd out(rv.size(), 4);
  out.col(0) = ct[0] * rv;
  out.col(1) = ct[1] * rv;
  out.col(2) = ct[0] * rh;
  out.col(3) = ct[1] * rh;
  return out;
}

Eigen::VectorXcd noiseless_signal(const EadfModel& model, const LosParams& params,
                                  const UeAntenna& ue, const SignalSpec& spec) {
  const Eigen::MatrixXcd b = build_b_matrix(model, params, ue, spec);
  return params.alpha_vv * b.col(0) + params.alpha_hh * b.col(3);
}

cd free_space_gain(double wavelength, const Vec3& ap_position, const Vec3& ue_position) {
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  const double d = (ap_position - ue_position).norm();
  if (!(d > 0.0)) throw InvalidArgument("AP and UE positions coincide");
  return {wavelength / (4.0 * kPi * d), 0.0};
}

Eigen::VectorXcd synthesize_received(const EadfModel& model, const LosParams& params,
                                     const UeAntenna& ue, const SignalSpec& spec,
                                     SeededStream& stream) {
  Eigen::VectorXcd y = noiseless_signal(model, params, ue, spec);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += stream.complex_normal(spec.noise_variance);
  return y;
}

Eigen::VectorXcd synthesize_received(const EadfModel& model, const LosParams& params,
                                     const UeAntenna& ue, const SignalSpec& spec,
                                     std::uint64_t rng_seed) {
  SeededStream stream(rng_seed, 0x6e6f697365ull);
  return synthesize_received(model, params, ue, spec, stream);
}

double effective_bandwidth(const SignalSpec& spec) {
  const double es = spec.energy();
  if (!(es > 0.0)) throw InvalidArgument("signal energy must be positive");
  double m2 = 0.0;
  for (int f = 0; f < spec.count(); ++f)
    m2 += spec.frequencies[f] * spec.frequencies[f] * spec.amplitudes[f] * spec.amplitudes[f];
  return std::sqrt(m2 / es);
}

}  // namespace dmimo
