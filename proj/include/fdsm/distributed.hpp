#pragma once

#include <vector>

#include "fdsm/solver.hpp"

namespace fdsm {

/// One worker j: private operator T_j, objective f_j and delay sequence tau^j_n.
struct WorkerSpec {
  FneOperatorPtr op;
  OraclePtr objective;
  DelaySchedule delays = DelaySchedule::zero();
};

struct DistributedOptions {
  StepSchedule steps = StepSchedule::harmonic(0.5, 0.5, 0, 4.0);
  StopRule stop{500, 10.0};
  bool record_iterates = false;
  /// Worker evaluations per round may run on up to this many threads. The
  /// server reduction is always sequential in worker order.
  std::size_t threads = 1;
};

struct DistributedResult {
  Vector final;
  /// Global trace: f = sum_j f_j, residual of the averaged operator,
  /// oracle_calls summed over workers, tau = max_j tau^j_n.
  RunTrace trace;
  std::vector<std::size_t> worker_oracle_calls;
};

/// Round-synchronous simulation of the distributed delayed method:
///   x_{n,j}  = T_j x_n - alpha_n g_j(T_j x_{n - tau^j_n})
///   x_{n+1}  = (1/m) sum_j x_{n,j}
DistributedResult run_distributed(const std::vector<WorkerSpec>& workers, ConstView x0,
                                  const DistributedOptions& options);

/// max_j of the workers' delay bounds.
std::size_t max_delay(const std::vector<WorkerSpec>& workers);

/// (m dist0_sq + 2m C^2 sum alpha_n^2 + m (40 C^2 + 8 L^2) sum alpha_n^(2-a)) / (2 sum alpha_n),
/// guarded by (4 + 2 (tau_max+1)^2) alpha_0^a < 8.
double distributed_rate_bound(std::size_t m, double dist0_sq, double c_max, double l_max,
                              const StepSchedule& steps, std::size_t tau_max, double a,
                              std::size_t n_max);

std::vector<double> distributed_rate_bound_curve(std::size_t m, double dist0_sq, double c_max,
                                                 double l_max, const StepSchedule& steps,
                                                 std::size_t tau_max, double a,
                                                 std::size_t n_max);

}  // namespace fdsm
