// Benchmark of the parallel kernels against their serial reference: sweep
// row evaluation and DP stage tabulation. Verifies that both paths produce
// identical output before timing them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinchain/chain_model.hpp"
#include "spinchain/planner.hpp"
#include "spinchain/sweep.hpp"

namespace {

namespace sc = spinchain;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

bool rows_equal(const sc::sweep::Table& a, const sc::sweep::Table& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t j = 0; j < a.rows[i].size(); ++j)
      if (a.rows[i][j] != b.rows[i][j]) return false;
  }
  return true;
}

bool plans_equal(const sc::planner::ChainPlan& a, const sc::planner::ChainPlan& b) {
  if (a.betas != b.betas || a.segment_times != b.segment_times) return false;
  return a.total_time == b.total_time;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP: max %d threads\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled, parallel path degrades to serial\n");
#endif

  int failures = 0;

  {
    sc::sweep::Request req;
    req.kind = sc::sweep::Kind::time_vs_k_beta;
    for (int i = 0; i < 6; ++i) req.k_values.push_back(1.0 + 0.8 * i);
    for (int i = 0; i < 5; ++i)
      req.beta_values.push_back(std::numbers::pi / 2.0 * (i + 1) / 5.0);

    // warm the shared memo so both timings start from the same cache state
    sc::sweep::run(req, sc::par::Exec::serial);

    double t0 = now_seconds();
    const auto serial = sc::sweep::run(req, sc::par::Exec::serial);
    const double t_serial = now_seconds() - t0;
    t0 = now_seconds();
    const auto parallel = sc::sweep::run(req, sc::par::Exec::parallel);
    const double t_parallel = now_seconds() - t0;

    const bool same = rows_equal(serial, parallel);
    if (!same) ++failures;
    std::printf("sweep %2zu rows   serial %7.3f s   parallel %7.3f s   speedup %4.2fx   %s\n",
                serial.rows.size(), t_serial, t_parallel, t_serial / t_parallel,
                same ? "outputs identical" : "OUTPUT MISMATCH");
  }

  {
    const auto chain =
        sc::chain::normalize_chain(sc::chain::ChainSpec{{91.0, 15.0, 55.0}}, 1);
    const int grid = 33;

    sc::planner::dp_solve(chain, grid, sc::par::Exec::serial);  // warm the memo

    double t0 = now_seconds();
    const auto serial = sc::planner::dp_solve(chain, grid, sc::par::Exec::serial);
    const double t_serial = now_seconds() - t0;
    t0 = now_seconds();
    const auto parallel = sc::planner::dp_solve(chain, grid, sc::par::Exec::parallel);
    const double t_parallel = now_seconds() - t0;

    const bool same = plans_equal(serial, parallel);
    if (!same) ++failures;
    std::printf("dp grid %3d     serial %7.3f s   parallel %7.3f s   speedup %4.2fx   %s\n", grid,
                t_serial, t_parallel, t_serial / t_parallel,
                same ? "outputs identical" : "OUTPUT MISMATCH");
  }

  {
    // cold-cache DP timing: fresh angles, nothing memoized
    const auto chain = sc::chain::normalize_chain(sc::chain::ChainSpec{{83.0, 17.0, 47.0}}, 1);
    const double t0 = now_seconds();
    const auto plan = sc::planner::dp_solve(chain, 33, sc::par::Exec::parallel);
    std::printf("dp cold 33      parallel %7.3f s   total time %.6f\n", now_seconds() - t0,
                plan.total_time);
  }

  return failures;
}
