#include "marketsim/bilevel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "marketsim/errors.hpp"
#include "marketsim/scenario.hpp"

namespace marketsim {

namespace {

// Profit ties within this tolerance resolve toward less aggressive bids.
constexpr double kTieTol = 1e-9;

bool better(double profit, double ksum, const std::vector<double>& k, double best_profit,
            double best_ksum, const std::vector<double>& best_k) {
  if (profit > best_profit + kTieTol) return true;
  if (profit < best_profit - kTieTol) return false;
  if (ksum < best_ksum - kTieTol) return true;
  if (ksum > best_ksum + kTieTol) return false;
  return k < best_k;  // last resort: lexicographic, for determinism
}

double ksum(const std::vector<double>& k) {
  double s = 0.0;
  for (double v : k) s += v;
  return s;
}

class ProfitEvaluator {
 public:
  ProfitEvaluator(const Scenario& s, long long max_evals)
      : s_(s), max_evals_(max_evals) {}

  // Clears the market at the given bids and returns the strategic profit.
  // Results are memoized so revisited points do not burn budget.
  double operator()(const std::vector<double>& k) {
    auto hit = cache_.find(k);
    if (hit != cache_.end()) return hit->second;
    if (evaluations_ >= max_evals_) throw BudgetExhausted{};
    ++evaluations_;
    DispatchResult d = clear_market(s_, BidVector{k}, solver_);
    const double profit = strategic_profit(d, s_);
    cache_.emplace(k, profit);
    return profit;
  }

  struct BudgetExhausted {};

  long long evaluations() const { return evaluations_; }
  QpSolver& solver() { return solver_; }

 private:
  const Scenario& s_;
  long long max_evals_;
  long long evaluations_ = 0;
  QpSolver solver_;
  std::map<std::vector<double>, double> cache_;
};

}  // namespace

double strategic_profit(const DispatchResult& d, const Scenario& s) {
  const auto idx = s.strategic_index();
  if (!idx) throw ValidationError("strategic_profit: scenario has no strategic company");
  const auto& co = s.companies[*idx];
  const auto& cd = d.companies.at(*idx);
  double profit = 0.0;
  for (int t = 0; t < s.horizon; ++t) {
    const double sg = cd.sg_output[t];
    const double bs = cd.bs_power[t];
    profit += d.prices[t] * sg - co.sg.marginal_cost * sg - co.bs.levelized_cost * bs * bs;
  }
  return profit;
}

BilevelSolution solve_bilevel(const Scenario& s, const SearchConfig& cfg) {
  require_valid(s);
  if (!s.strategic_index()) throw ValidationError("solve_bilevel: scenario has no strategic company");
  const auto t0 = std::chrono::steady_clock::now();

  const int T = s.horizon;
  const double k_lo = 1.0, k_hi = s.k_max;
  ProfitEvaluator evaluate(s, std::max(1, cfg.max_evals));

  // Truthful bids first: if the scenario itself is infeasible this throws,
  // and the truthful point guarantees the profit floor.
  std::vector<double> best_k(T, 1.0);
  double best_profit = evaluate(best_k);
  double best_ksum = ksum(best_k);

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(T, k_lo));
  starts.push_back(std::vector<double>(T, k_hi));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(k_lo, k_hi);
  while (static_cast<int>(starts.size()) < std::max(1, cfg.restarts)) {
    std::vector<double> k(T);
    for (double& v : k) v = uni(rng);
    starts.push_back(std::move(k));
  }
  starts.resize(std::max(1, std::min<int>(cfg.restarts, static_cast<int>(starts.size()))));

  const double pass_tol = 1e-4;           // minimum profit gain per sweep
  const double step_min = 5e-4;           // multiplier resolution
  int restarts_run = 0;

  try {
    for (const auto& start : starts) {
      ++restarts_run;
      std::vector<double> k = start;
      double profit = evaluate(k);
      double step = 0.25 * (k_hi - k_lo);
      while (step >= step_min) {
        double gained = 0.0;
        for (int t = 0; t < T; ++t) {
          for (double dir : {+1.0, -1.0}) {
            double kt = std::clamp(k[t] + dir * step, k_lo, k_hi);
            if (kt == k[t]) continue;
            std::vector<double> cand = k;
            cand[t] = kt;
            const double p = evaluate(cand);
            if (p > profit) {
              gained += p - profit;
              profit = p;
              k = std::move(cand);
            }
          }
        }
        if (gained < pass_tol) step *= 0.5;
        if (better(profit, ksum(k), k, best_profit, best_ksum, best_k)) {
          best_profit = profit;
          best_ksum = ksum(k);
          best_k = k;
        }
      }
    }
  } catch (const ProfitEvaluator::BudgetExhausted&) {
    // budget spent; return the best point found so far
  }

  BilevelSolution sol;
  sol.bids = BidVector{best_k};
  sol.dispatch = clear_market(s, sol.bids, evaluate.solver());
  sol.strategic_profit = strategic_profit(sol.dispatch, s);
  sol.stats.evaluations = evaluate.evaluations() + 1;
  sol.stats.restarts = restarts_run;
  sol.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

BilevelSolution solve_bilevel(const Scenario& s) { return solve_bilevel(s, s.solver); }

BilevelSolution brute_force_bilevel(const Scenario& s, double grid_step) {
  require_valid(s);
  if (!s.strategic_index())
    throw ValidationError("brute_force_bilevel: scenario has no strategic company");
  if (!(grid_step > 0)) throw std::invalid_argument("brute_force_bilevel: grid_step must be > 0");
  const auto t0 = std::chrono::steady_clock::now();

  const int T = s.horizon;
  std::vector<double> axis;
  for (double k = 1.0; k < s.k_max - 1e-12; k += grid_step) axis.push_back(k);
  axis.push_back(s.k_max);

  const double total = std::pow(static_cast<double>(axis.size()), T);
  if (total > 1e6) {
    throw std::invalid_argument("brute_force_bilevel: grid of " + std::to_string(total) +
                                " evaluations exceeds the 1e6 guard");
  }

  QpSolver solver;
  std::vector<std::size_t> odo(T, 0);
  std::vector<double> k(T, axis[0]);
  std::vector<double> best_k;
  double best_profit = -std::numeric_limits<double>::infinity();
  double best_ksum = 0.0;
  long long evals = 0;

  bool done = false;
  while (!done) {
    for (int t = 0; t < T; ++t) k[t] = axis[odo[t]];
    DispatchResult d = clear_market(s, BidVector{k}, solver);
    ++evals;
    const double profit = strategic_profit(d, s);
    if (best_k.empty() || better(profit, ksum(k), k, best_profit, best_ksum, best_k)) {
      best_profit = profit;
      best_ksum = ksum(k);
      best_k = k;
    }
    int t = 0;
    for (; t < T; ++t) {
      if (++odo[t] < axis.size()) break;
      odo[t] = 0;
    }
    done = (t == T);
  }

  BilevelSolution sol;
  sol.bids = BidVector{best_k};
  sol.dispatch = clear_market(s, sol.bids, solver);
  sol.strategic_profit = strategic_profit(sol.dispatch, s);
  sol.stats.evaluations = evals + 1;
  sol.stats.restarts = 1;
  sol.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace marketsim
