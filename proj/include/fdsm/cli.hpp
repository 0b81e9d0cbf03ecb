#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdsm/distributed.hpp"
#include "fdsm/inpainting.hpp"
#include "fdsm/solver.hpp"

namespace fdsm::cli {

/// Config-file or flag problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One `worker = tau=1; normal=1,1; offset=2; center=3,3` entry:
/// T_j projects onto {x : <normal, x> <= offset}, f_j = ||x - center||_1 + (mu/2)||x||^2.
struct WorkerConfig {
  std::size_t tau = 0;
  Vector normal;
  double offset = 0.0;
  Vector center;
};

struct SweepGrid {
  std::vector<double> a;
  std::vector<double> a0;
  std::vector<std::size_t> tau;
  std::vector<TransformKind> transform;

  std::size_t cells() const { return a.size() * a0.size() * tau.size() * transform.size(); }
};

enum class DelayKind { kCyclic, kFixed, kZero };
enum class OracleKind { kExact, kShrink, kOffset };
enum class BoundKind { kRate, kLog, kDistributed };

struct ExperimentConfig {
  // problem
  std::string problem = "gradient";  ///< gradient | checker | image
  std::filesystem::path image;
  std::size_t size = 16;             ///< synthetic image side
  std::size_t channels = 1;          ///< synthetic image channels (1 or 3)
  double ratio = 0.5;
  TransformKind transform = TransformKind::kTv;

  // schedules
  std::size_t tau = 0;
  DelayKind delay = DelayKind::kCyclic;
  double a = 0.5;
  double a0 = 0.5;
  std::optional<double> alpha;       ///< explicit alpha_n = alpha/(n+1) overrides a, a0

  // inexact variant
  double eps0 = 0.0;
  OracleKind oracle = OracleKind::kExact;

  // distributed
  std::vector<WorkerConfig> workers;
  double mu = 0.1;

  // bounds
  BoundKind bound = BoundKind::kRate;
  double bound_c = 1.0;
  double bound_l = 0.0;
  double dist0_sq = 1.0;
  std::size_t m = 1;

  // stop rule
  std::size_t max_iters = 500;
  double max_seconds = 10.0;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t jobs = 1;
  bool trace = false;

  SweepGrid grid;  ///< empty lists default to the scalar values above
};

/// Line-oriented `key = value`, `#` starts a comment. Unknown keys, malformed
/// values and constraint violations raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a config file; unreadable files raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Validates cross-field constraints (also run by parse_config).
void validate(const ExperimentConfig& config);

/// Grid with empty lists replaced by the scalar config values.
SweepGrid effective_grid(const ExperimentConfig& config);

StepSchedule make_steps(const ExperimentConfig& config, std::size_t tau, double a, double a0,
                        double coefficient = 3.0);
DelaySchedule make_delays(DelayKind kind, std::size_t tau);

/// The synthetic or file-backed original image named by the config.
ImageGrid load_original(const ExperimentConfig& config);

/// Workers of the distributed scenario (the built-in 2-worker instance when
/// the config lists none).
std::vector<WorkerSpec> make_workers(const ExperimentConfig& config);

inline const char* kTraceHeader =
    "channel,n,alpha,tau,f_next,best_f,residual,step_norm,c_hat,m_hat,oracle_calls,eps,shrink,"
    "elapsed_s";
inline const char* kSweepHeader =
    "seed,transform,tau,a,a0,iters,elapsed_ms,oracle_calls,psnr,best_f";
inline const char* kSweepBestHeader = "transform,tau,a,a0,psnr,iters";

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t channel,
                     bool header = true);

int cmd_inpaint(const ExperimentConfig& config, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, std::ostream& log);
int cmd_bound(const ExperimentConfig& config, std::ostream& out);
int cmd_distributed(const ExperimentConfig& config, std::ostream& log);
int cmd_selftest(std::ostream& log);

struct Flags {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool trace = false;
  std::optional<std::filesystem::path> out;
};

/// Loads the config, applies flag overrides, runs `command` and maps failures
/// to exit codes: 0 success, 1 config error, 2 runtime error.
int dispatch(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err);

}  // namespace fdsm::cli
