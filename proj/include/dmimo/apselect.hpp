#pragma once

#include <string>
#include <vector>

#include "dmimo/estimator.hpp"
#include "dmimo/fim.hpp"

namespace dmimo {

/// Per-AP, per-UE global position FIMs for one scheduling instant.
struct SelectionProblem {
  std::vector<std::vector<Mat3>> fims;  ///< fims[ap][ue]

  int ap_count() const { return static_cast<int>(fims.size()); }
  int ue_count() const { return fims.empty() ? 0 : static_cast<int>(fims.front().size()); }
  void validate() const;
};

/// FIMs of every AP for every predicted UE position. FIMs that cannot be formed (UE on an
/// AP's vertical axis) contribute zero information. Entries are evaluated on `workers` threads.
SelectionProblem build_selection_problem(const std::vector<ApModel>& aps, const std::vector<Vec3>& ue_positions,
                                         const UeAntenna& ue, const SignalSpec& spec, double wavelength,
                                         int workers = 1);

struct Activation {
  std::vector<int> selected;  ///< ascending AP indices
  double objective = 0.0;     ///< total PEB, +inf when infeasible

  std::vector<bool> flags(int ap_count) const;
};

/// Sum over UEs of the PEB of the summed FIM of `selected`; +inf when any joint FIM is singular.
double total_peb(const SelectionProblem& problem, const std::vector<int>& selected);

/// Greedy growth from the best single AP (best pair when every single AP is infeasible).
Activation greedy_select(const SelectionProblem& problem, int k_prime);

/// Swap refinement: scan (outside, inside) pairs in ascending order, accept the first strict
/// improvement and rescan, until a full scan finds none. `history` receives the objective
/// after the initial set and after every accepted swap.
Activation local_search(const SelectionProblem& problem, const Activation& initial,
                        std::vector<double>* history = nullptr);

/// Largest C(K, K') brute_force_select will enumerate.
inline constexpr double kBruteForceBudget = 1e6;

/// Exhaustive optimum; ties go to the lexicographically smallest index set.
Activation brute_force_select(const SelectionProblem& problem, int k_prime);

enum class SelectionMethod { Greedy, GreedyLocal, BruteForce, All };

SelectionMethod parse_selection_method(const std::string& name);
std::string to_string(SelectionMethod method);

Activation select_aps(const SelectionProblem& problem, int k_prime, SelectionMethod method);

}  // namespace dmimo
