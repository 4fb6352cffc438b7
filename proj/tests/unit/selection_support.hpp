#pragma once
// Random room scheduling instants for AP-selection tests.

#include <cmath>
#include <vector>

#include "dmimo/apselect.hpp"
#include "test_support.hpp"

namespace dmimo::testing {

/// Shared EADFs, built once; geometry is what varies between instants.
inline const std::vector<EadfModel>& selection_eadfs() {
  static const std::vector<EadfModel> models = [] {
    std::vector<EadfModel> m;
    for (int k = 0; k < 8; ++k) m.push_back(perturbed_upa(500 + static_cast<std::uint64_t>(k)));
    return m;
  }();
  return models;
}

/// K APs at random wall positions of a 10 x 7 x 3 room facing roughly inward, M UEs inside.
inline SelectionProblem random_selection_problem(SeededStream& s, int k, int m, double snr_db = 20.0) {
  const double wavelength = kSpeedOfLight / 5.6e9;
  SignalSpec spec = make_flat_spec(32, 400e6, 1.0);
  spec.noise_variance = noise_variance_for_snr(spec, snr_db, wavelength);
  std::vector<ApModel> aps;
  for (int i = 0; i < k; ++i) {
    const double u = s.uniform(0.0, 34.0);  // perimeter coordinate
    Vec3 p;
    if (u < 10) p = {u, 0.1, 0};
    else if (u < 17) p = {9.9, u - 10, 0};
    else if (u < 27) p = {27 - u, 6.9, 0};
    else p = {0.1, 34 - u, 0};
    p.z() = s.uniform(1.5, 2.8);
    const Vec3 d = Vec3(5, 3.5, p.z()) - p;
    const double omega = std::atan2(d.y(), d.x()) + s.uniform(-0.3, 0.3);
    aps.push_back({selection_eadfs()[static_cast<std::size_t>(i % 8)], {p, omega}});
  }
  std::vector<Vec3> ues;
  for (int j = 0; j < m; ++j) ues.emplace_back(s.uniform(1, 9), s.uniform(1, 6), s.uniform(0.5, 2.0));
  return build_selection_problem(aps, ues, UeAntenna{}, spec, wavelength);
}

}  // namespace dmimo::testing
