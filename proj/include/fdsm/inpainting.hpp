#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdsm/objectives.hpp"
#include "fdsm/operators.hpp"
#include "fdsm/solver.hpp"
#include "fdsm/transforms.hpp"

namespace fdsm {

/// Row-major image with interleaved channels; samples live in [0, 1] and are
/// clamped on construction.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(std::size_t height, std::size_t width, std::size_t channels, Vector data);

  static ImageGrid filled(std::size_t height, std::size_t width, std::size_t channels, double value);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t pixels() const { return height_ * width_; }
  const Vector& data() const { return data_; }

  double at(std::size_t i, std::size_t j, std::size_t c = 0) const {
    return data_[(i * width_ + j) * channels_ + c];
  }

  /// One channel as a row-major plane of length height * width.
  Vector channel(std::size_t c) const;
  /// Overwrites channel c, clamping into [0, 1].
  void set_channel(std::size_t c, ConstView plane);

  bool same_shape(const ImageGrid& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  Vector data_;
};

/// Linear ramp (i + j) / (h + w - 2), identical in every channel.
ImageGrid gradient_image(std::size_t height, std::size_t width, std::size_t channels = 1);

/// 0/1 checkerboard with square cells of side `cell`.
ImageGrid checker_image(std::size_t height, std::size_t width, std::size_t cell,
                        std::size_t channels = 1);

/// B = diag(observed), observed[p] in {0, 1} for pixel p (row-major).
class MaskOperator {
 public:
  MaskOperator(std::size_t height, std::size_t width, std::vector<std::uint8_t> observed);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  const std::vector<std::uint8_t>& observed() const { return observed_; }
  std::size_t observed_count() const;
  bool is_observed(std::size_t pixel) const { return observed_[pixel] != 0; }

  /// B as a diagonal linear map over one channel plane.
  LinearMapPtr map() const;

 private:
  std::size_t height_, width_;
  std::vector<std::uint8_t> observed_;
};

/// Marks exactly floor(ratio * h * w) distinct pixels unobserved, chosen by a
/// seeded partial Fisher-Yates shuffle.
MaskOperator make_mask(std::size_t height, std::size_t width, double ratio, std::uint64_t seed);

/// b = B x per channel: unobserved samples become 0.
ImageGrid apply_damage(const ImageGrid& original, const MaskOperator& mask);

/// 10 log10(1 / MSE) over all samples; +infinity for identical images.
double psnr(const ImageGrid& reference, const ImageGrid& candidate);

class ImageParseError : public std::runtime_error {
 public:
  ImageParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Binary PGM (P5) or PPM (P6), maxval 255.
ImageGrid decode_image(const std::string& bytes);
std::string encode_image(const ImageGrid& image);

ImageGrid read_image(const std::filesystem::path& path);
void write_image(const ImageGrid& image, const std::filesystem::path& path);

enum class TransformKind { kRow, kCol, kHaar, kTv, kHaarTv };

/// Parses "R", "C", "H", "L" or "G".
TransformKind parse_transform(const std::string& name);
std::string transform_name(TransformKind kind);

/// R, C, H, L = (R, C) or G = (H, L) on an h x w plane. H and G use full-depth
/// Haar and need h = w = 2^p.
LinearMapPtr make_transform(TransformKind kind, std::size_t height, std::size_t width);

struct ChannelProblem {
  Vector damaged;                                   ///< b for this channel
  std::shared_ptr<const LandweberOperator> op;      ///< T
  OraclePtr objective;                              ///< ||W .||_1
};

struct InpaintingProblem {
  ImageGrid original;
  ImageGrid damaged;
  MaskOperator mask;
  TransformKind transform_kind;
  LinearMapPtr transform;
  std::vector<ChannelProblem> channels;
};

/// Throws InputError when ratio = 1 (B = 0) or when H/G meet a non power-of-two image.
InpaintingProblem build_problem(const ImageGrid& original, double ratio, std::uint64_t seed,
                                TransformKind transform);

struct RestoreResult {
  ImageGrid restored;
  std::vector<RunResult> runs;  ///< one per channel
};

/// Runs the delayed subgradient method on every channel from x0 = 0.
/// Channels are solved on up to `threads` threads.
RestoreResult restore(const InpaintingProblem& problem, const RunOptions& options,
                      std::size_t threads = 1);

}  // namespace fdsm
