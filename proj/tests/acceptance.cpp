// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "fdsm/distributed.hpp"
#include "fdsm/inpainting.hpp"
#include "fdsm/solver.hpp"
#include "oracles.hpp"

using namespace fdsm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RunOptions opts(StepSchedule steps, DelaySchedule delays, std::size_t iters, bool iterates = false) {
  RunOptions o;
  o.steps = std::move(steps);
  o.delays = std::move(delays);
  o.stop = StopRule{iters, std::nullopt};
  o.record_iterates = iterates;
  return o;
}

// Shared problems: f = ||x - (2,2)||_1 on the box [0,1]^2, optionally plus (mu/2)||x||^2.
const FneOperatorPtr kBox = box_projection({0, 0}, {1, 1});
const OraclePtr kL1 = l1_distance(Vector{2, 2});
constexpr double kMu = 0.1;
const OraclePtr kStrict = add_quadratic(l1_distance(Vector{2, 2}), kMu, Vector{0, 0});

double l1_value(double x, double y) { return std::abs(x - 2) + std::abs(y - 2); }
double strict_value(double x, double y) { return l1_value(x, y) + 0.5 * kMu * (x * x + y * y); }

// Runs kept for the certificate criterion.
struct CertRun {
  std::string name;
  const SubgradientOracle* f;
  RunResult run;
  Vector x_star;
};
std::vector<CertRun> g_cert_runs;

Outcome fne_suite() {
  double worst = INFINITY;
  std::size_t count = 0;
  for (std::size_t d : {2, 8, 64}) {
    std::mt19937_64 rng(100 + d);
    const Vector lo = oracle::random_vector(d, rng, -3, 0), hi = oracle::random_vector(d, rng, 0, 3);
    const Vector c = oracle::random_vector(d, rng), a = oracle::random_vector(d, rng);
    const Vector diag = oracle::random_vector(d, rng, -2, 2);
    std::vector<FneOperatorPtr> ops = {
        identity_operator(d), box_projection(lo, hi), ball_projection(c, 2.5),
        halfspace_projection(a, 0.5), make_landweber(diagonal_map(diag), oracle::random_vector(d, rng)),
        average_ops({box_projection(lo, hi), ball_projection(c, 2.5), halfspace_projection(a, 0.5)})};
    if (d == 8) {
      DenseMatrix m{8, 8, oracle::random_vector(64, rng)};
      ops.push_back(make_landweber(dense_map(m), oracle::random_vector(8, rng)));
    }
    if (d == 64) ops.push_back(make_landweber(make_mask(8, 8, 0.5, 3).map(), oracle::random_vector(64, rng)));
    for (const auto& op : ops) {
      const auto r = check_fne(*op, 1000, 7 + count);
      worst = std::min(worst, r.min_slack);
      ++count;
      if (!r.pass) return {false, "operator " + std::to_string(count) + " slack " + fmt("%.3e", r.min_slack)};
    }
  }
  const auto doubled = function_operator(4, [](ConstView x) { return scaled(x, 2.0); });
  const auto neg = check_fne(*doubled, 1000, 1);
  if (neg.pass) return {false, "2*identity passed"};
  return {true, std::to_string(count) + " operators, min slack " + fmt("%.3e", worst) +
                    "; 2*identity slack " + fmt("%.3e", neg.min_slack)};
}

Outcome subgradient_suite() {
  std::mt19937_64 rng(5);
  const std::vector<OraclePtr> oracles = {
      l1_composite(tv_map(4, 4)), l1_composite(haar(4, 2)), l1_composite(stack({haar(4, 2), tv_map(4, 4)})),
      l1_composite(row_diff(3, 5)), l1_composite(col_diff(3, 5)), l1_distance(oracle::random_vector(6, rng)),
      max_affine({{1, 2}, {-1, 0.5}, {0, -3}, {2, 2}}, {0.1, -0.2, 1, 0}), kStrict,
      sum_oracle({l1_distance(Vector{3, 3}), l1_distance(Vector{2, 0})})};
  double worst = INFINITY;
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    const auto r = check_subgradient(*oracles[i], 1000, 20 + i);
    worst = std::min(worst, r.min_slack);
    if (!r.pass) return {false, "oracle " + std::to_string(i) + " slack " + fmt("%.3e", r.min_slack)};
  }
  double eps_worst = INFINITY;
  for (auto mode : {EpsMode::kShrink, EpsMode::kOffset}) {
    for (const auto& f : {oracles[0], oracles[7], oracles[8]}) {
      for (double eps : {0.01, 0.1, 1.0}) {
        const auto r = check_eps_subgradient(make_eps_oracle(f, mode), eps, 1000, 3);
        eps_worst = std::min(eps_worst, r.min_slack);
        if (!r.pass) return {false, "eps-oracle slack " + fmt("%.3e", r.min_slack)};
      }
    }
  }
  return {true, std::to_string(oracles.size()) + " oracles, min slack " + fmt("%.3e", worst) +
                    "; eps-oracles min relaxed slack " + fmt("%.3e", eps_worst)};
}

Outcome adjoint_suite() {
  const std::vector<LinearMapPtr> maps = {row_diff(16, 16), col_diff(16, 16), haar(16, 4), tv_map(16, 16),
                                          stack({haar(16, 4), tv_map(16, 16)}), haar(256, 8)};
  double worst = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto r = check_adjoint(*maps[i], i + 1 == maps.size() ? 20 : 1000, 9, 1e-10);
    worst = std::max(worst, r.max_rel_error);
    if (!r.pass) return {false, "map " + std::to_string(i) + " error " + fmt("%.3e", r.max_rel_error)};
  }
  double ortho = 0.0;
  for (std::size_t n : {2, 4, 8, 256}) {
    std::size_t p = 0;
    while ((std::size_t{1} << p) < n) ++p;
    const auto q = oracle::to_eigen(haar_matrix(n, p));
    ortho = std::max(ortho, (q * q.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return {ortho <= 1e-12, "max adjoint error " + fmt("%.3e", worst) + ", max |QQ^T - I| " + fmt("%.3e", ortho)};
}

Outcome rate_dominance() {
  const Vector opt = oracle::grid_minimize_2d(l1_value, 0, 1, 0, 1);
  const double f_star = 2.0;
  if (std::abs(l1_value(opt[0], opt[1]) - f_star) > 1e-12 || dist(opt, Vector{1, 1}) > 1e-9) {
    return {false, "grid oracle disagrees with f* = 2 at (1,1)"};
  }
  const std::size_t n_max = 5000;
  double margin = INFINITY;
  for (std::size_t tau : {0, 1, 3}) {
    const auto steps = StepSchedule::harmonic(0.5, 0.5, tau);
    auto r = run_fdsm(*kBox, *kL1, Vector{0, 0}, opts(steps, DelaySchedule::cyclic(tau), n_max + 1, true));
    const double c = std::sqrt(2.0);
    if (r.trace.records.back().c_hat > c) return {false, "observed subgradient norm exceeds C"};
    const auto curve = rate_bound_curve(2.0, c, steps, tau, 0.5, n_max);
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double gap = r.trace.records[n].best_f - f_star;
      margin = std::min(margin, curve[n] - gap);
      if (gap > curve[n] + 1e-8) return {false, "tau " + std::to_string(tau) + " N " + std::to_string(n)};
    }
    g_cert_runs.push_back({"rate tau=" + std::to_string(tau), kL1.get(), std::move(r), Vector{1, 1}});
  }
  return {true, "tau in {0,1,3}, N <= 5000, min(bound - gap) " + fmt("%.4g", margin)};
}

Outcome convergence() {
  const Vector opt = oracle::grid_minimize_2d(strict_value, 0, 1, 0, 1);
  double worst = 0.0;
  for (std::size_t tau : {0, 1, 5}) {
    auto r = run_fdsm(*kBox, *kStrict, Vector{0, 0},
                      opts(StepSchedule::inverse(1.0), DelaySchedule::cyclic(tau), 10000, true));
    worst = std::max(worst, dist(r.final, opt));
    g_cert_runs.push_back({"strict tau=" + std::to_string(tau), kStrict.get(), std::move(r), opt});
  }
  return {worst <= 1e-2, "oracle optimum (" + fmt("%.6f", opt[0]) + ", " + fmt("%.6f", opt[1]) +
                             "), max distance " + fmt("%.3e", worst)};
}

Outcome delay_economy() {
  for (std::size_t tau : {0, 1, 3, 5, 10, 20}) {
    const auto r = run_fdsm(*kBox, *kL1, Vector{0, 0},
                            opts(StepSchedule::harmonic(0.5, 0.5, tau), DelaySchedule::cyclic(tau), 1000));
    const std::size_t expect = (1000 + tau) / (tau + 1);
    if (r.trace.oracle_calls() != expect) {
      return {false, "tau " + std::to_string(tau) + ": " + std::to_string(r.trace.oracle_calls()) + " calls"};
    }
  }
  return {true, "calls = ceil(1000/(tau+1)) for tau in {0,1,3,5,10,20}"};
}

Outcome distributed_reduction() {
  const auto t = halfspace_projection({1, 2}, 1.0);
  const auto f = add_quadratic(l1_distance(Vector{3, -1}), 0.2, Vector{0, 0});
  const auto steps = StepSchedule::harmonic(0.5, 0.5, 3, 4.0);
  const auto single = run_fdsm(*t, *f, Vector{2, 2}, opts(steps, DelaySchedule::cyclic(3), 1000, true));
  DistributedOptions o;
  o.steps = steps;
  o.stop = StopRule{1000, std::nullopt};
  o.record_iterates = true;
  const WorkerSpec w{t, f, DelaySchedule::cyclic(3)};
  const auto one = run_distributed({w}, Vector{2, 2}, o);
  const auto two = run_distributed({w, w}, Vector{2, 2}, o);
  const auto& ref = single.trace.iterates;
  if (one.trace.iterates.size() != ref.size() || two.trace.iterates.size() != ref.size()) {
    return {false, "iterate counts differ"};
  }
  for (std::size_t n = 0; n < ref.size(); ++n) {
    if (one.trace.iterates[n] != ref[n]) return {false, "m=1 differs at n=" + std::to_string(n)};
    if (two.trace.iterates[n] != ref[n]) return {false, "m=2 differs at n=" + std::to_string(n)};
  }
  return {true, "1001 iterates bitwise equal for m=1 and two identical workers"};
}

Outcome distributed_convergence() {
  const double mu = 0.1;
  const std::vector<WorkerSpec> workers = {
      {halfspace_projection({1, 1}, 2.0), add_quadratic(l1_distance(Vector{3, 3}), mu, Vector{0, 0}), DelaySchedule::cyclic(1)},
      {halfspace_projection({1, -1}, 0.5), add_quadratic(l1_distance(Vector{2, 0}), mu, Vector{0, 0}), DelaySchedule::cyclic(2)}};
  // Brute force over the feasible set; infeasible points get +inf.
  const auto f = [&](double x, double y) -> double {
    if (x + y > 2.0 || x - y > 0.5) return INFINITY;
    return std::abs(x - 3) + std::abs(y - 3) + std::abs(x - 2) + std::abs(y) + mu * (x * x + y * y);
  };
  const Vector opt = oracle::grid_minimize_2d(f, -1, 4, -1, 4, 501, 8);
  DistributedOptions o;
  o.steps = StepSchedule::inverse(1.0);
  o.stop = StopRule{10000, std::nullopt};
  const auto r = run_distributed(workers, Vector{0, 0}, o);
  const double d = dist(r.final, opt);
  return {d <= 1e-2, "oracle optimum (" + fmt("%.6f", opt[0]) + ", " + fmt("%.6f", opt[1]) + "), distance " +
                         fmt("%.3e", d)};
}

Outcome inexact() {
  const auto t = box_projection({1}, {2});
  const auto f = l1_distance(Vector{0});
  const auto o = opts(StepSchedule::harmonic(0.5, 0.5, 0), DelaySchedule::zero(), 2000);
  const auto exact = run_fdsm(*t, *f, Vector{5}, o);
  const auto zero = run_inexact(*t, make_eps_oracle(f, EpsMode::kShrink), EpsSchedule::harmonic(0.0), Vector{5}, o);
  if (zero.final != exact.final) return {false, "eps0 = 0 final iterate differs"};
  for (std::size_t n = 0; n < exact.trace.records.size(); ++n) {
    if (zero.trace.records[n].f_next != exact.trace.records[n].f_next ||
        zero.trace.records[n].step_norm != exact.trace.records[n].step_norm) {
      return {false, "eps0 = 0 trajectory differs at n=" + std::to_string(n)};
    }
  }
  const auto shrink = run_inexact(*t, make_eps_oracle(f, EpsMode::kShrink), EpsSchedule::harmonic(0.1), Vector{5}, o);
  const double d = std::abs(shrink.final[0] - exact.final[0]);
  return {d <= 2e-2, "eps0 = 0 bitwise identical; shrink final " + fmt("%.6f", shrink.final[0]) + " vs exact " +
                         fmt("%.6f", exact.final[0]) + ", difference " + fmt("%.3e", d)};
}

Outcome inpainting() {
  const auto img = gradient_image(16, 16);
  const auto problem = build_problem(img, 0.5, 0, TransformKind::kTv);
  const auto o = opts(StepSchedule::harmonic(0.9, 0.9, 1), DelaySchedule::cyclic(1), 2000);
  const auto r = restore(problem, o);
  const double before = psnr(img, problem.damaged), after = psnr(img, r.restored);
  double fidelity = 0.0;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    if (problem.mask.is_observed(p)) fidelity = std::max(fidelity, std::abs(r.restored.data()[p] - problem.damaged.data()[p]));
  }
  return {after - before >= 3.0 && fidelity <= 1e-3,
          "psnr " + fmt("%.2f", before) + " -> " + fmt("%.2f", after) + " dB, observed-pixel deviation " +
              fmt("%.3e", fidelity)};
}

Outcome step_identity() {
  double worst = 0.0;
  for (int ia = 1; ia <= 9; ++ia) {
    for (int ib = 1; ib <= 9; ++ib) {
      for (std::size_t tau : {0, 1, 3, 5, 10, 20}) {
        const double a = ia / 10.0, a0 = ib / 10.0;
        const double alpha0 = StepSchedule::harmonic(a0, a, tau).at(0);
        const double lhs = (3.0 + 2.0 * (tau + 1.0) * (tau + 1.0)) * std::pow(alpha0, a);
        worst = std::max(worst, std::abs(lhs - 8.0 * std::pow(a0, a)));
      }
    }
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.3e", worst) + " over 486 cells"};
}

Outcome certificates() {
  if (g_cert_runs.size() != 6) return {false, "criteria 4-5 runs missing"};
  std::size_t total = 0;
  double worst = -INFINITY;
  for (const auto& c : g_cert_runs) {
    const auto rep = check_certificate(*kBox, *c.f, c.run.trace, c.x_star, c.run.trace.records.back().c_hat);
    worst = std::max(worst, rep.max_excess);
    total += rep.violations.size();
  }
  return {total == 0, std::to_string(total) + " violations over 6 runs, max lhs - rhs " + fmt("%.3e", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"firm nonexpansiveness", 5, fne_suite},
      {"subgradient inequality", 5, subgradient_suite},
      {"adjoints and Haar orthogonality", 10, adjoint_suite},
      {"rate bound dominance", 5, rate_dominance},
      {"convergence to the constrained optimum", 10, convergence},
      {"delay oracle economy", 1, delay_economy},
      {"distributed reduction", 2, distributed_reduction},
      {"distributed convergence", 10, distributed_convergence},
      {"inexact reduction and convergence", 5, inexact},
      {"inpainting end to end", 10, inpainting},
      {"step hypothesis identity", 1, step_identity},
      {"certificates", 5, certificates},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_s;
    if (!pass) ++failures;
    std::printf("%s %2d %s: %s (%.3f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), secs,
                c.limit_s);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
