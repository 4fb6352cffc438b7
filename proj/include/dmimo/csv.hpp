#pragma once
// Tabular exports. Every floating value is written as the shortest decimal that reads back
// to the same double, so files round-trip exactly.

#include <string>
#include <vector>

#include "dmimo/estimator.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

/// Header and rows of a CSV file; numeric cells parse with read_number.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  ///< -1 when absent
  double number(std::size_t row, int column) const;
};

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);
double read_number(const std::string& cell);

/// t,ue_id,est_x,est_y,est_z,true_x,true_y,true_z,rmse,n_components
std::string track_csv(const EpisodeLog& log);
/// t,ap_id,active
std::string activation_csv(const EpisodeLog& log);
/// x,y,z,peb (row-major over y, then x)
std::string peb_map_csv(const PebMap& map);
/// snr_db,noise_variance,trials,rmse,rmse_se,mean_error,peb,rmse_over_peb,ambiguous
std::string monte_carlo_csv(const std::vector<RmseReport>& reports);
/// ap_id,theta,phi,tau,f_theta_theta,f_phi_phi,f_tau_tau,peb,peb_decomposed,peb_2d,geometry_factor,
/// closed_form_peb; one row per AP then a joint row with ap_id -1 (planar columns are nan on AP rows).
std::string bounds_csv(const BoundsReport& report);
/// method,k_prime,selected,objective; `selected` lists AP ids separated by ';'.
std::string selection_csv(const std::string& method, int k_prime, const Activation& activation);
/// JSON: name, steps, mean/max RMSE, mean cardinality error, per-step active-AP counts.
std::string episode_summary(const EpisodeLog& log);

const std::vector<std::string>& track_columns();
const std::vector<std::string>& activation_columns();
const std::vector<std::string>& peb_map_columns();
const std::vector<std::string>& monte_carlo_columns();
const std::vector<std::string>& bounds_columns();

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);
/// Writes `text` to `path`, creating parent directories; IoError names the path.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace dmimo
