#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dmimo/csv.hpp"
#include "dmimo/error.hpp"
#include "dmimo/fixtures.hpp"
#include "dmimo/scenario.hpp"

namespace py = pybind11;
using namespace dmimo;

namespace {

py::dict to_dict(const LinkBounds& b) {
  py::dict d;
  d["ap"] = b.ap;
  d["theta"] = b.theta;
  d["phi"] = b.phi;
  d["tau"] = b.tau;
  d["efim_diagonal"] = Eigen::Vector3d(b.efim_diagonal);
  d["peb"] = b.peb;
  d["peb_decomposed"] = b.peb_decomposed;
  return d;
}

py::dict to_dict(const RmseReport& r) {
  py::dict d;
  d["snr_db"] = r.snr_db;
  d["noise_variance"] = r.noise_variance;
  d["trials"] = r.trials;
  d["rmse"] = r.rmse;
  d["rmse_standard_error"] = r.rmse_standard_error;
  d["mean_error"] = r.mean_error;
  d["peb"] = r.peb;
  d["ambiguous"] = r.ambiguous;
  return d;
}

// Rows are steps; one UE per row block, matching the track CSV.
py::dict to_dict(const EpisodeLog& log) {
  std::size_t rows = 0;
  for (const StepRecord& s : log.steps) rows += s.truth.size();
  Eigen::MatrixXd truth(rows, 3), est(rows, 3);
  Eigen::VectorXd rmse(rows), card(log.steps.size());
  Eigen::VectorXi t(rows), ue(rows);
  std::vector<std::vector<int>> active;
  std::size_t r = 0;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const StepRecord& s = log.steps[i];
    for (std::size_t u = 0; u < s.truth.size(); ++u, ++r) {
      truth.row(r) = s.truth[u].transpose();
      est.row(r) = s.estimates[u].transpose();
      rmse(r) = s.rmse[u];
      t(r) = s.t;
      ue(r) = static_cast<int>(u);
    }
    card(i) = s.cardinality;
    active.push_back(s.active);
  }
  py::dict d;
  d["name"] = log.name;
  d["ap_count"] = log.ap_count;
  d["t"] = t;
  d["ue"] = ue;
  d["truth"] = truth;
  d["estimate"] = est;
  d["rmse"] = rmse;
  d["cardinality"] = card;
  d["active"] = active;
  d["mean_rmse"] = log.mean_rmse();
  d["max_rmse"] = log.max_rmse();
  d["mean_cardinality_error"] = log.mean_cardinality_error();
  d["track_csv"] = track_csv(log);
  d["activation_csv"] = activation_csv(log);
  return d;
}

}  // namespace

PYBIND11_MODULE(_dmimo, m) {
  m.doc() = "Position error bounds, ML positioning and GM-PHD tracking for distributed MIMO";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)error;

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("steps", &ScenarioConfig::steps)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("snr_db", &ScenarioConfig::snr_db)
      .def_readwrite("carrier_frequency", &ScenarioConfig::carrier_frequency)
      .def_readwrite("subcarriers", &ScenarioConfig::subcarriers)
      .def_readwrite("bandwidth", &ScenarioConfig::bandwidth)
      .def_property_readonly("ap_count", [](const ScenarioConfig& c) { return c.aps.size(); })
      .def_property_readonly("ue_count", [](const ScenarioConfig& c) { return c.ues.size(); })
      .def_property_readonly("ap_positions",
                             [](const ScenarioConfig& c) {
                               Eigen::MatrixXd p(c.aps.size(), 3);
                               for (std::size_t k = 0; k < c.aps.size(); ++k) p.row(k) = c.aps[k].position.transpose();
                               return p;
                             })
      .def_property(
          "schedule",
          [](const ScenarioConfig& c) { return to_string(c.schedule.method); },
          [](ScenarioConfig& c, const std::string& s) { c.schedule.method = parse_schedule_kind(s); })
      .def_property(
          "k_prime", [](const ScenarioConfig& c) { return c.schedule.k_prime; },
          [](ScenarioConfig& c, int k) { c.schedule.k_prime = k; })
      .def_property(
          "fixed_aps", [](const ScenarioConfig& c) { return c.schedule.fixed; },
          [](ScenarioConfig& c, const std::vector<int>& f) { c.schedule.fixed = f; })
      .def("validate", &ScenarioConfig::validate)
      .def("to_toml", [](const ScenarioConfig& c) { return serialize_config(c); })
      .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
      .def("__repr__", [](const ScenarioConfig& c) {
        return "<ScenarioConfig '" + c.name + "' " + std::to_string(c.aps.size()) + " APs, " +
               std::to_string(c.steps) + " steps>";
      });

  m.def("load_config", &load_config_file, py::arg("path"), "Read and validate a TOML scenario file.");
  m.def("parse_config", &load_config, py::arg("text"), py::arg("base_dir") = ".",
        "Parse and validate TOML text.");
  m.def("canonical_room_config", &canonical_room_config);
  m.def("canonical_monte_carlo_config", &canonical_monte_carlo_config);
  m.def("layout_config", [](const std::string& layout, bool perturbed) {
    return layout_config(layout, perturbed ? EadfSource::Kind::Perturbed : EadfSource::Kind::Ideal);
  }, py::arg("layout"), py::arg("perturbed") = false, "Room layouts: one_sided, four_corner or single.");

  m.def(
      "peb_map",
      [](const ScenarioConfig& c, int nx, int ny, std::optional<double> z, int workers) {
        PebMap map;
        {
          py::gil_scoped_release release;
          map = run_peb_map(c, nx, ny, z, workers);
        }
        py::dict d;
        d["x"] = map.xs;
        d["y"] = map.ys;
        d["z"] = map.z;
        d["peb"] = map.peb;
        return d;
      },
      py::arg("config"), py::arg("nx") = 50, py::arg("ny") = 35, py::arg("z") = py::none(), py::arg("workers") = 1,
      "PEB on a cell-centred grid; peb[iy, ix], inf where singular.");

  m.def(
      "bounds",
      [](const ScenarioConfig& c, std::optional<Eigen::Vector3d> ue) {
        const BoundsReport r = run_bounds(c, ue ? std::optional<Vec3>(Vec3(*ue)) : std::nullopt);
        py::list links;
        for (const LinkBounds& b : r.links) links.append(to_dict(b));
        py::dict d;
        d["ue_position"] = Eigen::Vector3d(r.ue_position);
        d["links"] = links;
        d["peb"] = r.peb;
        d["peb_decomposed"] = r.peb_decomposed;
        d["peb_2d"] = r.peb_2d;
        d["geometry_factor"] = r.geometry_factor;
        d["closed_form_peb"] = r.closed_form_peb;
        return d;
      },
      py::arg("config"), py::arg("ue_position") = py::none());

  m.def(
      "monte_carlo",
      [](const ScenarioConfig& c, const std::vector<double>& snr, int trials, std::optional<std::uint64_t> seed,
         int workers) {
        std::vector<RmseReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_monte_carlo(monte_carlo_scenario(c), snr, trials, seed.value_or(c.seed), workers);
        }
        py::list out;
        for (const RmseReport& r : reports) out.append(to_dict(r));
        return out;
      },
      py::arg("config"), py::arg("snr_db"), py::arg("trials") = 100, py::arg("seed") = py::none(),
      py::arg("workers") = 1, "ML estimator RMSE against the PEB per SNR.");

  m.def(
      "track",
      [](const ScenarioConfig& c, int workers) {
        EpisodeLog log;
        {
          py::gil_scoped_release release;
          log = run_tracking_episode(c, workers);
        }
        return to_dict(log);
      },
      py::arg("config"), py::arg("workers") = 1, "Run a tracking episode.");

  m.def(
      "select_aps",
      [](const ScenarioConfig& c, int k, const std::string& method) {
        const Activation a = select_aps(selection_problem(c), k, parse_selection_method(method));
        return py::make_tuple(a.selected, a.objective);
      },
      py::arg("config"), py::arg("k"), py::arg("method") = "greedy_local",
      "AP subset of size k minimizing the summed PEB at the UE starts: (selected, objective).");

  m.def("efim_xi", [](const Mat7& f) { return Mat3(efim_xi(f)); }, py::arg("fim"),
        "Schur complement of a 7x7 link FIM onto (theta, phi, tau).");
  m.def("peb", [](const Mat3& f) { return peb(f); }, py::arg("fim"),
        "sqrt(trace(F^-1)); raises NumericalError when singular.");

  m.def(
      "verify_fixtures",
      [](const std::string& manifest, int workers) {
        const Manifest man = load_manifest(manifest);
        std::vector<FixtureReport> reports;
        {
          py::gil_scoped_release release;
          reports = verify_manifest(man, workers);
        }
        py::list out;
        for (const FixtureReport& r : reports) out.append(py::make_tuple(r.name, r.passed, r.message));
        return out;
      },
      py::arg("manifest"), py::arg("workers") = 1, "[(name, passed, message)] for every fixture.");
}
