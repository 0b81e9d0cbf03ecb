#include "fdsm/inpainting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace fdsm {

MaskOperator::MaskOperator(std::size_t height, std::size_t width, std::vector<std::uint8_t> observed)
    : height_(height), width_(width), observed_(std::move(observed)) {
  require(height >= 1 && width >= 1, "MaskOperator: empty shape");
  require_dim(observed_.size(), height * width, "MaskOperator");
  for (auto& v : observed_) v = v ? 1 : 0;
}

std::size_t MaskOperator::observed_count() const {
  return static_cast<std::size_t>(std::count(observed_.begin(), observed_.end(), 1));
}

LinearMapPtr MaskOperator::map() const {
  Vector diag(observed_.size());
  for (std::size_t p = 0; p < diag.size(); ++p) diag[p] = observed_[p] ? 1.0 : 0.0;
  return diagonal_map(std::move(diag));
}

MaskOperator make_mask(std::size_t height, std::size_t width, double ratio, std::uint64_t seed) {
  require(ratio >= 0.0 && ratio <= 1.0, "make_mask: ratio must lie in [0, 1]");
  const std::size_t n = height * width;
  require(n >= 1, "make_mask: empty shape");
  // Guard against ratio * n landing just below an integer, e.g. 0.29 * 100.
  const auto hidden = std::min(n, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < hidden; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::uint8_t> observed(n, 1);
  for (std::size_t i = 0; i < hidden; ++i) observed[order[i]] = 0;
  return MaskOperator(height, width, std::move(observed));
}

ImageGrid apply_damage(const ImageGrid& original, const MaskOperator& mask) {
  require(original.height() == mask.height() && original.width() == mask.width(),
          "apply_damage: mask and image differ in shape");
  Vector data = original.data();
  const std::size_t channels = original.channels();
  for (std::size_t p = 0; p < original.pixels(); ++p) {
    if (mask.is_observed(p)) continue;
    for (std::size_t c = 0; c < channels; ++c) data[p * channels + c] = 0.0;
  }
  return ImageGrid(original.height(), original.width(), channels, std::move(data));
}

TransformKind parse_transform(const std::string& name) {
  if (name == "R") return TransformKind::kRow;
  if (name == "C") return TransformKind::kCol;
  if (name == "H") return TransformKind::kHaar;
  if (name == "L") return TransformKind::kTv;
  if (name == "G") return TransformKind::kHaarTv;
  throw InputError("unknown transform '" + name + "' (expected R, C, H, L or G)");
}

std::string transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kRow: return "R";
    case TransformKind::kCol: return "C";
    case TransformKind::kHaar: return "H";
    case TransformKind::kTv: return "L";
    case TransformKind::kHaarTv: return "G";
  }
  return "?";
}

namespace {

LinearMapPtr full_haar(std::size_t height, std::size_t width) {
  require(height == width && height >= 2 && std::has_single_bit(height),
          "Haar transforms need a square power-of-two image");
  return haar(height, static_cast<std::size_t>(std::countr_zero(height)));
}

}  // namespace

LinearMapPtr make_transform(TransformKind kind, std::size_t height, std::size_t width) {
  switch (kind) {
    case TransformKind::kRow: return row_diff(height, width);
    case TransformKind::kCol: return col_diff(height, width);
    case TransformKind::kHaar: return full_haar(height, width);
    case TransformKind::kTv: return tv_map(height, width);
    case TransformKind::kHaarTv: return stack({full_haar(height, width), tv_map(height, width)});
  }
  throw InputError("make_transform: unknown transform");
}

InpaintingProblem build_problem(const ImageGrid& original, double ratio, std::uint64_t seed,
                                TransformKind transform) {
  auto mask = make_mask(original.height(), original.width(), ratio, seed);
  auto damaged = apply_damage(original, mask);
  auto w = make_transform(transform, original.height(), original.width());
  const auto b_map = mask.map();
  auto objective = l1_composite(w);

  std::vector<ChannelProblem> channels;
  for (std::size_t c = 0; c < original.channels(); ++c) {
    Vector b = damaged.channel(c);
    auto op = make_landweber(b_map, b);
    channels.push_back(ChannelProblem{std::move(b), std::move(op), objective});
  }
  return InpaintingProblem{original, std::move(damaged), std::move(mask), transform, std::move(w),
                           std::move(channels)};
}

RestoreResult restore(const InpaintingProblem& problem, const RunOptions& options,
                      std::size_t threads) {
  const std::size_t channels = problem.channels.size();
  std::vector<RunResult> runs(channels);
  std::vector<std::exception_ptr> errors(channels);
  const Vector x0(problem.original.pixels(), 0.0);

  auto solve = [&](std::size_t c) {
    try {
      const auto& ch = problem.channels[c];
      runs[c] = run_fdsm(*ch.op, *ch.objective, x0, options);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (threads <= 1 || channels == 1) {
    for (std::size_t c = 0; c < channels; ++c) solve(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t c = 0; c < channels; ++c) pool.emplace_back(solve, c);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ImageGrid restored = ImageGrid::filled(problem.original.height(), problem.original.width(),
                                         channels, 0.0);
  for (std::size_t c = 0; c < channels; ++c) restored.set_channel(c, runs[c].final);
  return RestoreResult{std::move(restored), std::move(runs)};
}

}  // namespace fdsm
