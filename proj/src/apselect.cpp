#include "dmimo/apselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"

namespace dmimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative margin a swap must win by; keeps rounding noise from cycling.
constexpr double kImprovement = 1e-12;

void check_budget(const SelectionProblem& problem, int k_prime) {
  problem.validate();
  if (k_prime < 1 || k_prime > problem.ap_count())
    throw InvalidArgument("K' must be in [1, " + std::to_string(problem.ap_count()) + "], got " +
                          std::to_string(k_prime));
}

Activation make(const SelectionProblem& problem, std::vector<int> sel) {
  std::sort(sel.begin(), sel.end());
  Activation a;
  a.objective = total_peb(problem, sel);
  a.selected = std::move(sel);
  return a;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void SelectionProblem::validate() const {
  if (fims.empty()) throw InvalidArgument("selection problem has no APs");
  const std::size_t m = fims.front().size();
  if (m == 0) throw InvalidArgument("selection problem has no UEs");
  for (const auto& row : fims)
    if (row.size() != m) throw InvalidArgument("every AP needs one FIM per UE");
}

SelectionProblem build_selection_problem(const std::vector<ApModel>& aps, const std::vector<Vec3>& ue_positions,
                                         const UeAntenna& ue, const SignalSpec& spec, double wavelength,
                                         int workers) {
  SelectionProblem p;
  p.fims.assign(aps.size(), std::vector<Mat3>(ue_positions.size(), Mat3::Zero()));
  parallel_for(aps.size() * ue_positions.size(), workers, [&](std::size_t idx) {
    const std::size_t k = idx / ue_positions.size(), j = idx % ue_positions.size();
    try {
      p.fims[k][j] = ap_position_fim(aps[k].eadf, aps[k].geometry, ue_positions[j], ue, spec, wavelength).matrix;
    } catch (const NumericalError&) {
      // The AP cannot resolve this UE: zero information.
    }
  });
  return p;
}

std::vector<bool> Activation::flags(int ap_count) const {
  std::vector<bool> f(static_cast<std::size_t>(ap_count), false);
  for (int k : selected) f.at(static_cast<std::size_t>(k)) = true;
  return f;
}

double total_peb(const SelectionProblem& problem, const std::vector<int>& selected) {
  problem.validate();
  if (selected.empty()) throw InvalidArgument("at least one AP must be active");
  double total = 0.0;
  for (int m = 0; m < problem.ue_count(); ++m) {
    Mat3 f = Mat3::Zero();
    for (int k : selected) {
      if (k < 0 || k >= problem.ap_count()) throw InvalidArgument("AP index " + std::to_string(k) + " out of range");
      f += problem.fims[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
    }
    try {
      total += peb(f);
    } catch (const NumericalError&) {
      return kInf;
    }
  }
  return total;
}

Activation greedy_select(const SelectionProblem& problem, int k_prime) {
  check_budget(problem, k_prime);
  const int k_all = problem.ap_count();
  std::vector<int> chosen;
  double best = kInf;
  int best_k = 0;
  for (int k = 0; k < k_all; ++k) {
    const double v = total_peb(problem, {k});
    if (v < best) best = v, best_k = k;
  }
  chosen.push_back(best_k);
  if (best == kInf && k_prime >= 2) {
    // No AP localizes alone: start from the best pair instead.
    int a = 0, b = 1;
    for (int i = 0; i < k_all; ++i)
      for (int j = i + 1; j < k_all; ++j) {
        const double v = total_peb(problem, {i, j});
        if (v < best) best = v, a = i, b = j;
      }
    chosen = {a, b};
  }
  while (static_cast<int>(chosen.size()) < k_prime) {
    double step_best = kInf;
    int add = -1;
    for (int k = 0; k < k_all; ++k) {
      if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
      std::vector<int> trial = chosen;
      trial.push_back(k);
      const double v = total_peb(problem, trial);
      if (add < 0 || v < step_best) step_best = v, add = k;
    }
    chosen.push_back(add);
  }
  return make(problem, chosen);
}

Activation local_search(const SelectionProblem& problem, const Activation& initial, std::vector<double>* history) {
  problem.validate();
  Activation cur = make(problem, initial.selected);
  if (history) history->assign(1, cur.objective);
  const int k_all = problem.ap_count();
  bool improved = true;
  while (improved) {
    improved = false;
    for (int out = 0; out < k_all && !improved; ++out) {
      if (std::binary_search(cur.selected.begin(), cur.selected.end(), out)) continue;
      for (std::size_t slot = 0; slot < cur.selected.size(); ++slot) {
        std::vector<int> trial = cur.selected;
        trial[slot] = out;
        const double v = total_peb(problem, trial);
        const bool better = cur.objective == kInf ? v < kInf : v < cur.objective * (1.0 - kImprovement);
        if (better) {
          cur = make(problem, trial);
          if (history) history->push_back(cur.objective);
          improved = true;
          break;
        }
      }
    }
  }
  return cur;
}

Activation brute_force_select(const SelectionProblem& problem, int k_prime) {
  check_budget(problem, k_prime);
  const int n = problem.ap_count();
  if (binomial(n, k_prime) > kBruteForceBudget)
    throw InvalidArgument("brute force over C(" + std::to_string(n) + ", " + std::to_string(k_prime) +
                          ") subsets exceeds the enumeration budget");
  std::vector<int> comb(static_cast<std::size_t>(k_prime));
  for (int i = 0; i < k_prime; ++i) comb[static_cast<std::size_t>(i)] = i;
  Activation best;
  best.objective = kInf;
  bool first = true;
  while (true) {
    const double v = total_peb(problem, comb);
    if (first || v < best.objective) {
      best.selected = comb;
      best.objective = v;
      first = false;
    }
    int i = k_prime - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k_prime + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k_prime; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

SelectionMethod parse_selection_method(const std::string& name) {
  if (name == "greedy") return SelectionMethod::Greedy;
  if (name == "greedy_local" || name == "greedy-local") return SelectionMethod::GreedyLocal;
  if (name == "brute" || name == "brute_force") return SelectionMethod::BruteForce;
  if (name == "all") return SelectionMethod::All;
  throw InvalidArgument("unknown selection method '" + name + "' (greedy|greedy_local|brute|all)");
}

std::string to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::Greedy: return "greedy";
    case SelectionMethod::GreedyLocal: return "greedy_local";
    case SelectionMethod::BruteForce: return "brute";
    case SelectionMethod::All: return "all";
  }
  return "unknown";
}

Activation select_aps(const SelectionProblem& problem, int k_prime, SelectionMethod method) {
  switch (method) {
    case SelectionMethod::Greedy: return greedy_select(problem, k_prime);
    case SelectionMethod::GreedyLocal: return local_search(problem, greedy_select(problem, k_prime));
    case SelectionMethod::BruteForce: return brute_force_select(problem, k_prime);
    case SelectionMethod::All: {
      problem.validate();
      std::vector<int> all(static_cast<std::size_t>(problem.ap_count()));
      for (int k = 0; k < problem.ap_count(); ++k) all[static_cast<std::size_t>(k)] = k;
      return make(problem, all);
    }
  }
  throw InvalidArgument("unknown selection method");
}

}  // namespace dmimo
