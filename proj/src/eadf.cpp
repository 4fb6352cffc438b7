#include "dmimo/eadf.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

namespace {

using RowMajorCd = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXd centered_index(int m) {
  Eigen::VectorXd index(m);
  for (int a = 0; a < m; ++a) index(a) = static_cast<double>(a - m / 2);
  return index;
}

Eigen::VectorXcd phase_vector(const Eigen::VectorXd& index, double angle) {
  Eigen::VectorXcd w(index.size());
  for (Eigen::Index a = 0; a < index.size(); ++a) w(a) = std::polar(1.0, angle * index(a));
  return w;
}

void check_angles(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw InvalidArgument("non-finite direction");
}

// c = Q (w_theta (x) w_phi) / (M_theta M_phi), evaluated as a two-stage contraction.
Eigen::VectorXcd contract(const EadfModel& model, const Eigen::VectorXcd& w_theta,
                          const Eigen::VectorXcd& w_phi, int pol) {
  const int n = model.element_count();
  const int mt = model.m_theta();
  const int mp = model.m_phi();
  Eigen::Map<const RowMajorCd> stacked(model.coefficients.data(), model.coefficients.rows() * mt, mp);
  const Eigen::VectorXcd partial = stacked * w_phi;  // rows: (row, a_theta)
  const double scale = 1.0 / (static_cast<double>(mt) * mp);
  Eigen::VectorXcd out(n);
  for (int e = 0; e < n; ++e) {
    const Eigen::Index row = static_cast<Eigen::Index>(kPolarizationCount * e + pol) * mt;
    out(e) = partial.segment(row, mt).cwiseProduct(w_theta).sum() * scale;
  }
  return out;
}

std::string shortest(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace

PatternGrid::PatternGrid(int element_count, int m_theta, int m_phi)
    : element_count_(element_count), m_theta_(m_theta), m_phi_(m_phi) {
  if (element_count < 1 || m_theta < 1 || m_phi < 1)
    throw InvalidArgument("pattern grid dimensions must be positive");
  samples_.assign(static_cast<std::size_t>(element_count) * kPolarizationCount * m_theta * m_phi,
                  cd(0.0, 0.0));
}

void PatternGrid::validate() const {
  if (m_theta_ % 2 != 0 || m_phi_ % 2 != 0)
    throw InvalidArgument("pattern grid sizes must be even (got M_theta=" +
                          std::to_string(m_theta_) + ", M_phi=" + std::to_string(m_phi_) + ")");
  for (const cd& s : samples_)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw InvalidArgument("pattern grid holds non-finite samples");
}

EadfModel build_eadf(const PatternGrid& pattern) {
  pattern.validate();
  const int n = pattern.element_count();
  const int mt = pattern.m_theta();
  const int mp = pattern.m_phi();
  EadfModel model;
  model.theta_index = centered_index(mt);
  model.phi_index = centered_index(mp);
  model.coefficients.resize(static_cast<Eigen::Index>(n) * kPolarizationCount,
                            static_cast<Eigen::Index>(mt) * mp);

  // Forward kernels: F(a, m) = exp(-j k_a 2 pi m / M).
  Eigen::MatrixXcd ft(mt, mt), fp(mp, mp);
  for (int a = 0; a < mt; ++a)
    for (int m = 0; m < mt; ++m) ft(a, m) = std::polar(1.0, -model.theta_index(a) * pattern.theta_at(m));
  for (int b = 0; b < mp; ++b)
    for (int m = 0; m < mp; ++m) fp(b, m) = std::polar(1.0, -model.phi_index(b) * pattern.phi_at(m));

  Eigen::MatrixXcd grid(mt, mp);
  for (int e = 0; e < n; ++e) {
    for (int p = 0; p < kPolarizationCount; ++p) {
      for (int i = 0; i < mt; ++i)
        for (int k = 0; k < mp; ++k) grid(i, k) = pattern.at(e, static_cast<Polarization>(p), i, k);
      const Eigen::MatrixXcd q = ft * grid * fp.transpose();
      auto row = model.coefficients.row(kPolarizationCount * e + p);
      for (int a = 0; a < mt; ++a)
        for (int b = 0; b < mp; ++b) row(static_cast<Eigen::Index>(a) * mp + b) = q(a, b);
    }
  }
  return model;
}

EadfModel normalize_eadf(const EadfModel& model, int frequency_count) {
  if (frequency_count < 1) throw InvalidArgument("frequency_count must be positive");
  EadfModel out = model;
  for (int e = 0; e < model.element_count(); ++e) {
    const double energy =
        frequency_count * model.coefficients.middleRows(kPolarizationCount * e, kPolarizationCount)
                              .squaredNorm();
    if (!(energy > 0.0) || !std::isfinite(energy))
      throw InvalidArgument("element " + std::to_string(e) + " has zero energy");
    out.coefficients.middleRows(kPolarizationCount * e, kPolarizationCount) /= std::sqrt(energy);
  }
  out.normalized = true;
  return out;
}

Eigen::VectorXcd evaluate_response(const EadfModel& model, double theta, double phi,
                                   Polarization pol) {
  check_angles(theta, phi);
  return contract(model, phase_vector(model.theta_index, theta), phase_vector(model.phi_index, phi),
                  static_cast<int>(pol));
}

Eigen::VectorXcd evaluate_response_derivative(const EadfModel& model, double theta, double phi,
                                              Polarization pol, AngleParameter wrt) {
  check_angles(theta, phi);
  Eigen::VectorXcd wt = phase_vector(model.theta_index, theta);
  Eigen::VectorXcd wp = phase_vector(model.phi_index, phi);
  const cd j(0.0, 1.0);
  if (wrt == AngleParameter::Theta)
    wt = (j * model.theta_index.cast<cd>()).cwiseProduct(wt);
  else
    wp = (j * model.phi_index.cast<cd>()).cwiseProduct(wp);
  return contract(model, wt, wp, static_cast<int>(pol));
}

ArrayResponse evaluate_all(const EadfModel& model, double theta, double phi, bool with_derivatives) {
  check_angles(theta, phi);
  const Eigen::VectorXcd wt = phase_vector(model.theta_index, theta);
  const Eigen::VectorXcd wp = phase_vector(model.phi_index, phi);
  ArrayResponse r;
  Eigen::VectorXcd wt_d, wp_d;
  if (with_derivatives) {
    const cd j(0.0, 1.0);
    wt_d = (j * model.theta_index.cast<cd>()).cwiseProduct(wt);
    wp_d = (j * model.phi_index.cast<cd>()).cwiseProduct(wp);
  }
  for (int p = 0; p < kPolarizationCount; ++p) {
    r.value[p] = contract(model, wt, wp, p);
    if (with_derivatives) {
      r.d_theta[p] = contract(model, wt_d, wp, p);
      r.d_phi[p] = contract(model, wt, wp_d, p);
    }
  }
  return r;
}

PatternGrid synthesize_ideal_upa(int rows, int cols, double spacing_wavelengths, int m_theta,
                                 int m_phi, PortLayout layout) {
  if (rows < 1 || cols < 1) throw InvalidArgument("array must have at least one element");
  if (!(spacing_wavelengths > 0.0)) throw InvalidArgument("element spacing must be positive");
  const int ports = layout == PortLayout::DualPort ? 2 : 1;
  PatternGrid grid(rows * cols * ports, m_theta, m_phi);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int site = r * cols + c;
      const double y = (c - 0.5 * (cols - 1)) * spacing_wavelengths;
      const double z = (r - 0.5 * (rows - 1)) * spacing_wavelengths;
      for (int port = 0; port < ports; ++port) {
        const int e = site * ports + port;
        const bool horizontal = (layout == PortLayout::Alternating && site % 2 == 1) || port == 1;
        const Polarization pol = horizontal ? Polarization::H : Polarization::V;
        for (int i = 0; i < m_theta; ++i) {
          const double th = grid.theta_at(i);
          for (int k = 0; k < m_phi; ++k) {
            const double ph = grid.phi_at(k);
            const double phase = kTwoPi * (y * std::sin(th) * std::sin(ph) + z * std::cos(th));
            grid.at(e, pol, i, k) = std::polar(1.0, phase);
          }
        }
      }
    }
  }
  return grid;
}

PatternGrid perturb_pattern(const PatternGrid& ideal, std::uint64_t seed,
                            const PerturbationSpec& spec) {
  PatternGrid out = ideal;
  SeededStream stream(seed, 0x70657274ull);
  const double leak = std::pow(10.0, spec.cross_polar_db / 20.0);
  const double phase_limit = spec.phase_limit_deg * kPi / 180.0;
  for (int e = 0; e < ideal.element_count(); ++e) {
    const double mag_db = spec.magnitude_sigma_db * stream.normal();
    const cd gain = std::polar(std::pow(10.0, mag_db / 20.0), stream.uniform(-phase_limit, phase_limit));
    const cd leak_gain = std::polar(leak, stream.uniform(0.0, kTwoPi));
    for (int i = 0; i < ideal.m_theta(); ++i) {
      for (int k = 0; k < ideal.m_phi(); ++k) {
        const cd v = ideal.at(e, Polarization::V, i, k);
        const cd h = ideal.at(e, Polarization::H, i, k);
        // co-pol scaled by the element gain; each port leaks into the other.
        out.at(e, Polarization::V, i, k) = gain * (v + leak_gain * h);
        out.at(e, Polarization::H, i, k) = gain * (h + leak_gain * v);
      }
    }
  }
  return out;
}

PatternGrid extend_elevation(const PatternGrid& half, int m_theta) {
  if (m_theta % 2 != 0 || half.m_phi() % 2 != 0)
    throw InvalidArgument("extend_elevation needs even M_theta and M_phi");
  if (half.m_theta() != m_theta / 2 + 1)
    throw InvalidArgument("half pattern must hold M_theta/2 + 1 elevation rows");
  const int mp = half.m_phi();
  PatternGrid full(half.element_count(), m_theta, mp);
  for (int e = 0; e < half.element_count(); ++e) {
    for (int p = 0; p < kPolarizationCount; ++p) {
      const auto pol = static_cast<Polarization>(p);
      for (int i = 0; i < m_theta; ++i) {
        for (int k = 0; k < mp; ++k) {
          full.at(e, pol, i, k) = i <= m_theta / 2
                                      ? half.at(e, pol, i, k)
                                      : half.at(e, pol, m_theta - i, (k + mp / 2) % mp);
        }
      }
    }
  }
  return full;
}

void write_pattern(std::ostream& out, const PatternGrid& pattern) {
  out << "eadf-pattern v1 " << pattern.element_count() << ' ' << pattern.m_theta() << ' '
      << pattern.m_phi() << '\n';
  for (const cd& s : pattern.samples()) out << shortest(s.real()) << ' ' << shortest(s.imag()) << '\n';
  if (!out) throw Error("failed to write pattern");
}

PatternGrid read_pattern(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("pattern file is empty");
  std::istringstream hs(header);
  std::string magic, version;
  int n = 0, mt = 0, mp = 0;
  if (!(hs >> magic >> version >> n >> mt >> mp) || magic != "eadf-pattern" || version != "v1")
    throw InvalidArgument("bad pattern header: '" + header + "'");
  PatternGrid grid(n, mt, mp);
  std::string line;
  std::size_t count = 0;
  const std::size_t expected = grid.samples().size();
  std::vector<cd> values;
  values.reserve(expected);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    double re = 0.0, im = 0.0;
    auto r1 = std::from_chars(p, end, re);
    if (r1.ec != std::errc()) throw InvalidArgument("bad sample at line " + std::to_string(line_no));
    p = r1.ptr;
    while (p < end && *p == ' ') ++p;
    auto r2 = std::from_chars(p, end, im);
    if (r2.ec != std::errc()) throw InvalidArgument("bad sample at line " + std::to_string(line_no));
    values.emplace_back(re, im);
    ++count;
  }
  if (count != expected)
    throw InvalidArgument("pattern holds " + std::to_string(count) + " samples, expected " +
                          std::to_string(expected));
  std::size_t idx = 0;
  for (int e = 0; e < n; ++e)
    for (int p = 0; p < kPolarizationCount; ++p)
      for (int i = 0; i < mt; ++i)
        for (int k = 0; k < mp; ++k) grid.at(e, static_cast<Polarization>(p), i, k) = values[idx++];
  grid.validate();
  return grid;
}

}  // namespace dmimo
