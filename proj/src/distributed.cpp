#include "fdsm/distributed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace fdsm {

namespace {

using Clock = std::chrono::steady_clock;

struct WorkerState {
  explicit WorkerState(std::size_t tau, Vector x0) : history(tau, std::move(x0)) {}
  HistoryBuffer<Vector> history;
  Vector tx;    // T_j x_n
  Vector out;   // x_{n,j}
  double g_norm = 0.0;
  std::size_t tau_n = 0;
};

void worker_round(const WorkerSpec& spec, WorkerState& state, ConstView x, std::size_t n,
                  double alpha) {
  state.tx = spec.op->apply(x);
  state.tau_n = spec.delays.at(n);
  const std::size_t k = HistoryBuffer<Vector>::resolve(n, state.tau_n);
  const Vector& g = state.history.payload(k, [&] {
    if (k == n) return spec.objective->subgradient(state.tx);
    return spec.objective->subgradient(spec.op->apply(state.history.iterate(k)));
  });
  state.out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) state.out[i] = state.tx[i] - alpha * g[i];
  state.g_norm = norm(g);
}

}  // namespace

std::size_t max_delay(const std::vector<WorkerSpec>& workers) {
  std::size_t tau = 0;
  for (const auto& w : workers) tau = std::max(tau, w.delays.bound());
  return tau;
}

DistributedResult run_distributed(const std::vector<WorkerSpec>& workers, ConstView x0,
                                  const DistributedOptions& options) {
  require(!workers.empty(), "run_distributed: at least one worker is required");
  require(options.stop.max_iters.has_value() || options.stop.max_seconds.has_value(),
          "run_distributed: stop rule needs max_iters or max_seconds");
  const std::size_t d = x0.size();
  for (const auto& w : workers) {
    require(w.op != nullptr && w.objective != nullptr, "run_distributed: incomplete worker spec");
    require_dim(w.op->dim(), d, "run_distributed: worker operator");
    require_dim(w.objective->dim(), d, "run_distributed: worker objective");
  }
  const std::size_t m = workers.size();
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  std::vector<WorkerState> states;
  states.reserve(m);
  for (const auto& w : workers) states.emplace_back(w.delays.bound(), Vector(x0.begin(), x0.end()));

  DistributedResult result;
  RunTrace& trace = result.trace;
  if (options.record_iterates) trace.iterates.emplace_back(x0.begin(), x0.end());

  Vector x(x0.begin(), x0.end());
  Vector next(d), t_avg(d);
  const double inv_m = 1.0 / static_cast<double>(m);
  double best = std::numeric_limits<double>::infinity();
  double c_hat = 0.0;
  double m_hat = norm(x);
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, m);

  for (std::size_t n = 0;; ++n) {
    if (options.stop.max_iters && n >= *options.stop.max_iters) {
      trace.status = StopReason::kMaxIters;
      break;
    }
    if (options.stop.max_seconds && elapsed() >= *options.stop.max_seconds) {
      trace.status = StopReason::kMaxSeconds;
      break;
    }
    const double alpha = options.steps.at(n);

    // Round barrier: every worker finishes before the server reduces.
    std::vector<std::exception_ptr> errors(m);
    auto run_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j) {
        try {
          worker_round(workers[j], states[j], x, n, alpha);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      run_range(0, m);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (m + threads - 1) / threads;
      for (std::size_t lo = 0; lo < m; lo += chunk) pool.emplace_back(run_range, lo, std::min(m, lo + chunk));
      for (auto& t : pool) t.join();
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!errors[j]) continue;
      try {
        std::rethrow_exception(errors[j]);
      } catch (const std::exception& e) {
        throw SolverError(n, "worker " + std::to_string(j) + ": " + e.what());
      }
    }

    std::fill(next.begin(), next.end(), 0.0);
    std::fill(t_avg.begin(), t_avg.end(), 0.0);
    IterationRecord rec;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        next[i] += states[j].out[i];
        t_avg[i] += states[j].tx[i];
      }
      c_hat = std::max(c_hat, states[j].g_norm);
      rec.tau = std::max(rec.tau, states[j].tau_n);
      rec.oracle_calls += states[j].history.oracle_calls();
    }
    for (std::size_t i = 0; i < d; ++i) {
      next[i] *= inv_m;
      t_avg[i] *= inv_m;
    }

    rec.n = n;
    rec.alpha = alpha;
    double f_next = 0.0;
    for (const auto& w : workers) f_next += w.objective->value(next);
    rec.f_next = f_next;
    best = std::min(best, f_next);
    rec.best_f = best;
    rec.residual = dist(t_avg, x);
    rec.step_norm = dist(next, x);
    rec.c_hat = c_hat;
    m_hat = std::max(m_hat, norm(next));
    rec.m_hat = m_hat;
    rec.elapsed_s = elapsed();
    trace.records.push_back(rec);

    x = next;
    for (auto& s : states) s.history.push(x);
    if (options.record_iterates) trace.iterates.push_back(x);
  }

  result.final = std::move(x);
  for (const auto& s : states) result.worker_oracle_calls.push_back(s.history.oracle_calls());
  return result;
}

std::vector<double> distributed_rate_bound_curve(std::size_t m, double dist0_sq, double c_max,
                                                 double l_max, const StepSchedule& steps,
                                                 std::size_t tau_max, double a,
                                                 std::size_t n_max) {
  require(m >= 1, "distributed_rate_bound: m must be positive");
  require(dist0_sq >= 0.0 && c_max >= 0.0 && l_max >= 0.0,
          "distributed_rate_bound: constants must be non-negative");
  check_step_hypothesis(steps.at(0), a, tau_max, 4.0);
  const double md = static_cast<double>(m);
  const double c2 = c_max * c_max;
  const double l2 = l_max * l_max;
  std::vector<double> curve;
  curve.reserve(n_max + 1);
  double s1 = 0.0, s2 = 0.0, s2a = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double alpha = steps.at(n);
    s1 += alpha;
    s2 += alpha * alpha;
    s2a += std::pow(alpha, 2.0 - a);
    curve.push_back((md * dist0_sq + 2.0 * md * c2 * s2 + md * (40.0 * c2 + 8.0 * l2) * s2a) /
                    (2.0 * s1));
  }
  return curve;
}

double distributed_rate_bound(std::size_t m, double dist0_sq, double c_max, double l_max,
                              const StepSchedule& steps, std::size_t tau_max, double a,
                              std::size_t n_max) {
  return distributed_rate_bound_curve(m, dist0_sq, c_max, l_max, steps, tau_max, a, n_max).back();
}

}  // namespace fdsm
