#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fdsm/cli.hpp"

namespace fdsm::cli {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

RunOptions run_options(const ExperimentConfig& c, std::size_t tau, double a, double a0) {
  RunOptions o;
  o.steps = make_steps(c, tau, a, a0);
  o.delays = make_delays(c.delay, tau);
  o.stop = StopRule{c.max_iters, c.max_seconds};
  return o;
}

bool inexact(const ExperimentConfig& c) { return c.oracle != OracleKind::kExact && c.eps0 > 0.0; }

// Exact runs go through restore(); inexact ones swap in the eps-oracle per channel.
RestoreResult solve(const InpaintingProblem& problem, const ExperimentConfig& c,
                    const RunOptions& options, std::size_t threads) {
  if (!inexact(c)) return restore(problem, options, threads);
  const auto mode = c.oracle == OracleKind::kShrink ? EpsMode::kShrink : EpsMode::kOffset;
  const Vector x0(problem.original.pixels(), 0.0);
  RestoreResult result{ImageGrid::filled(problem.original.height(), problem.original.width(),
                                         problem.channels.size(), 0.0),
                       {}};
  for (std::size_t ch = 0; ch < problem.channels.size(); ++ch) {
    const auto& p = problem.channels[ch];
    auto run = run_inexact(*p.op, make_eps_oracle(p.objective, mode), EpsSchedule::harmonic(c.eps0),
                           x0, options, c.seed);
    result.restored.set_channel(ch, run.final);
    result.runs.push_back(std::move(run));
  }
  return result;
}

std::string image_ext(const ImageGrid& img) { return img.channels() == 3 ? ".ppm" : ".pgm"; }

double summed_best(const RestoreResult& r) {
  double s = 0.0;
  for (const auto& run : r.runs) {
    if (!run.trace.records.empty()) s += run.trace.records.back().best_f;
  }
  return s;
}

std::size_t summed_calls(const RestoreResult& r) {
  std::size_t s = 0;
  for (const auto& run : r.runs) s += run.trace.oracle_calls();
  return s;
}

std::size_t max_iters_run(const RestoreResult& r) {
  std::size_t s = 0;
  for (const auto& run : r.runs) s = std::max(s, run.trace.iterations());
  return s;
}

struct Cell {
  TransformKind transform;
  std::size_t tau;
  double a;
  double a0;
};

struct CellOutcome {
  std::size_t iters = 0;
  double elapsed_ms = 0.0;
  std::size_t oracle_calls = 0;
  double psnr = 0.0;
  double best_f = 0.0;
  std::string trace;
};

}  // namespace

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t channel, bool header) {
  if (header) out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << channel << ',' << r.n << ',' << num(r.alpha) << ',' << r.tau << ',' << num(r.f_next) << ','
        << num(r.best_f) << ',' << num(r.residual) << ',' << num(r.step_norm) << ',' << num(r.c_hat)
        << ',' << num(r.m_hat) << ',' << r.oracle_calls << ',' << num(r.eps) << ',' << num(r.shrink)
        << ',' << num(r.elapsed_s) << '\n';
  }
}

int cmd_inpaint(const ExperimentConfig& c, std::ostream& log) {
  const ImageGrid original = load_original(c);
  const auto problem = build_problem(original, c.ratio, c.seed, c.transform);
  const auto result = solve(problem, c, run_options(c, c.tau, c.a, c.a0), c.jobs);

  std::filesystem::create_directories(c.out);
  const auto ext = image_ext(original);
  write_image(problem.damaged, c.out / ("damaged" + ext));
  write_image(result.restored, c.out / ("restored" + ext));
  auto trace = open_output(c.out / "trace.csv");
  for (std::size_t ch = 0; ch < result.runs.size(); ++ch) {
    write_trace_csv(trace, result.runs[ch].trace, ch, ch == 0);
  }

  log << "transform " << transform_name(c.transform) << ", tau " << c.tau << ", "
      << max_iters_run(result) << " iterations, " << summed_calls(result) << " oracle calls\n"
      << "psnr damaged " << num(psnr(original, problem.damaged)) << " dB, restored "
      << num(psnr(original, result.restored)) << " dB\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& c, std::ostream& log) {
  const SweepGrid grid = effective_grid(c);
  std::vector<Cell> cells;
  for (auto t : grid.transform) {
    for (auto tau : grid.tau) {
      for (double a : grid.a) {
        for (double a0 : grid.a0) cells.push_back(Cell{t, tau, a, a0});
      }
    }
  }
  // Lexicographic order by transform name, then numerically.
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
    const auto nx = transform_name(x.transform), ny = transform_name(y.transform);
    if (nx != ny) return nx < ny;
    if (x.tau != y.tau) return x.tau < y.tau;
    if (x.a != y.a) return x.a < y.a;
    return x.a0 < y.a0;
  });

  const ImageGrid original = load_original(c);
  std::map<TransformKind, InpaintingProblem> problems;
  for (const auto& cell : cells) {
    if (!problems.count(cell.transform)) {
      problems.emplace(cell.transform, build_problem(original, c.ratio, c.seed, cell.transform));
    }
  }

  std::vector<CellOutcome> outcomes(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto& cell = cells[i];
        const auto& problem = problems.at(cell.transform);
        const auto start = std::chrono::steady_clock::now();
        const auto r = solve(problem, c, run_options(c, cell.tau, cell.a, cell.a0), 1);
        auto& o = outcomes[i];
        o.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        o.iters = max_iters_run(r);
        o.oracle_calls = summed_calls(r);
        o.psnr = psnr(original, r.restored);
        o.best_f = summed_best(r);
        if (c.trace) {
          std::ostringstream buf;
          for (std::size_t ch = 0; ch < r.runs.size(); ++ch) write_trace_csv(buf, r.runs[ch].trace, ch, ch == 0);
          o.trace = buf.str();
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(c.jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto csv = open_output(c.out / "sweep.csv");
  csv << kSweepHeader << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    const auto& o = outcomes[i];
    csv << c.seed << ',' << transform_name(cell.transform) << ',' << cell.tau << ',' << num(cell.a) << ','
        << num(cell.a0) << ',' << o.iters << ',' << num(o.elapsed_ms) << ',' << o.oracle_calls << ','
        << num(o.psnr) << ',' << num(o.best_f) << '\n';
    if (c.trace) {
      auto t = open_output(c.out / "traces" / ("cell_" + std::to_string(i) + ".csv"));
      t << o.trace;
    }
  }

  // Best (a, a0) per (transform, tau); the first cell wins ties.
  auto best = open_output(c.out / "sweep_best.csv");
  best << kSweepBestHeader << '\n';
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i, arg = i;
    while (j < cells.size() && cells[j].transform == cells[i].transform && cells[j].tau == cells[i].tau) {
      if (outcomes[j].psnr > outcomes[arg].psnr) arg = j;
      ++j;
    }
    const auto& cell = cells[arg];
    best << transform_name(cell.transform) << ',' << cell.tau << ',' << num(cell.a) << ',' << num(cell.a0)
         << ',' << num(outcomes[arg].psnr) << ',' << outcomes[arg].iters << '\n';
    log << transform_name(cell.transform) << " tau=" << cell.tau << ": best a=" << num(cell.a)
        << " a0=" << num(cell.a0) << " psnr=" << num(outcomes[arg].psnr) << '\n';
    i = j;
  }
  log << cells.size() << " cells written to " << (c.out / "sweep.csv").string() << '\n';
  return 0;
}

int cmd_bound(const ExperimentConfig& c, std::ostream& out) {
  const std::size_t n_max = c.max_iters == 0 ? 0 : c.max_iters - 1;
  std::vector<double> curve;
  switch (c.bound) {
    case BoundKind::kRate:
      curve = rate_bound_curve(c.dist0_sq, c.bound_c, make_steps(c, c.tau, c.a, c.a0), c.tau, c.a, n_max);
      break;
    case BoundKind::kLog: {
      const double alpha = make_steps(c, c.tau, c.a, c.a0).alpha();
      for (std::size_t n = 0; n <= n_max; ++n) {
        curve.push_back(log_rate_bound(c.dist0_sq, c.bound_c, alpha, c.a, c.tau, n));
      }
      break;
    }
    case BoundKind::kDistributed:
      curve = distributed_rate_bound_curve(c.m, c.dist0_sq, c.bound_c, c.bound_l,
                                           make_steps(c, c.tau, c.a, c.a0, 4.0), c.tau, c.a, n_max);
      break;
  }
  out << "n,bound\n";
  for (std::size_t n = 0; n < curve.size(); ++n) out << n << ',' << num(curve[n]) << '\n';
  return 0;
}

int cmd_distributed(const ExperimentConfig& c, std::ostream& log) {
  const auto workers = make_workers(c);
  const std::size_t dim = workers.front().op->dim();
  DistributedOptions o;
  const std::size_t tau_max = max_delay(workers);
  o.steps = make_steps(c, tau_max, c.a, c.a0, 4.0);
  o.stop = StopRule{c.max_iters, c.max_seconds};
  o.threads = c.jobs;
  const auto r = run_distributed(workers, Vector(dim, 0.0), o);

  auto csv = open_output(c.out / "distributed.csv");
  csv << "coordinate,value\n";
  for (std::size_t i = 0; i < r.final.size(); ++i) csv << i << ',' << num(r.final[i]) << '\n';
  if (c.trace) {
    auto t = open_output(c.out / "distributed_trace.csv");
    write_trace_csv(t, r.trace, 0);
  }

  log << workers.size() << " workers, " << r.trace.iterations() << " rounds, best f "
      << num(r.trace.records.empty() ? 0.0 : r.trace.records.back().best_f) << "\nx =";
  for (double v : r.final) log << ' ' << num(v);
  log << "\noracle calls per worker:";
  for (auto k : r.worker_oracle_calls) log << ' ' << k;
  log << '\n';
  return 0;
}

int cmd_selftest(std::ostream& log) {
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, double value) {
    log << (pass ? "PASS " : "FAIL ") << name << " (" << num(value) << ")\n";
    ok = ok && pass;
  };

  for (std::size_t d : {2, 8, 64}) {
    const Vector lo(d, -1.0), hi(d, 1.0), center(d, 0.5);
    Vector normal(d, 1.0);
    Vector diag(d);
    for (std::size_t i = 0; i < d; ++i) diag[i] = 1.0 + static_cast<double>(i % 3);
    const std::vector<std::pair<std::string, FneOperatorPtr>> ops = {
        {"identity", identity_operator(d)},
        {"box", box_projection(lo, hi)},
        {"ball", ball_projection(center, 2.0)},
        {"halfspace", halfspace_projection(normal, 1.0)},
        {"landweber", make_landweber(diagonal_map(diag), Vector(d, 1.0))},
        {"average", average_ops({box_projection(lo, hi), halfspace_projection(normal, 1.0)})},
    };
    for (const auto& [name, op] : ops) {
      const auto r = check_fne(*op, 1000, 1);
      report("fne " + name + " d=" + std::to_string(d), r.pass, r.min_slack);
    }
    const std::vector<std::pair<std::string, OraclePtr>> fs = {
        {"l1_distance", l1_distance(center)},
        {"l1_composite", l1_composite(diagonal_map(diag))},
        {"quadratic", add_quadratic(l1_distance(center), 0.1, Vector(d, 0.0))},
    };
    for (const auto& [name, f] : fs) {
      const auto r = check_subgradient(*f, 1000, 2);
      report("subgradient " + name + " d=" + std::to_string(d), r.pass, r.min_slack);
    }
  }

  for (const auto& [name, map] : std::vector<std::pair<std::string, LinearMapPtr>>{
           {"row_diff", row_diff(8, 8)}, {"col_diff", col_diff(8, 8)},
           {"haar", haar(8, 3)}, {"tv", tv_map(8, 8)}}) {
    const auto r = check_adjoint(*map, 100, 3);
    report("adjoint " + name, r.pass, r.max_rel_error);
  }
  log << (ok ? "all checks passed\n" : "some checks failed\n");
  return ok ? 0 : 2;
}

int dispatch(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig c = flags.config ? load_config(*flags.config) : parse_config("");
    if (flags.seed) c.seed = *flags.seed;
    if (flags.jobs) {
      if (*flags.jobs < 1) throw ConfigError(0, "--jobs must be positive");
      c.jobs = *flags.jobs;
    }
    if (flags.trace) c.trace = true;
    if (flags.out) c.out = *flags.out;

    if (command == "inpaint") return cmd_inpaint(c, out);
    if (command == "sweep") return cmd_sweep(c, out);
    if (command == "bound") return cmd_bound(c, out);
    if (command == "distributed") return cmd_distributed(c, out);
    if (command == "selftest") return cmd_selftest(out);
    throw ConfigError(0, "unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fdsm::cli
