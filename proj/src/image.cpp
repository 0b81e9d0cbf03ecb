#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fdsm/inpainting.hpp"

namespace fdsm {

ImageGrid::ImageGrid(std::size_t height, std::size_t width, std::size_t channels, Vector data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  require(height >= 1 && width >= 1 && channels >= 1, "ImageGrid: empty shape");
  require_dim(data_.size(), height * width * channels, "ImageGrid data");
  for (auto& v : data_) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
}

ImageGrid ImageGrid::filled(std::size_t height, std::size_t width, std::size_t channels,
                            double value) {
  return ImageGrid(height, width, channels, Vector(height * width * channels, value));
}

Vector ImageGrid::channel(std::size_t c) const {
  require(c < channels_, "ImageGrid::channel: channel out of range");
  Vector plane(pixels());
  for (std::size_t p = 0; p < plane.size(); ++p) plane[p] = data_[p * channels_ + c];
  return plane;
}

void ImageGrid::set_channel(std::size_t c, ConstView plane) {
  require(c < channels_, "ImageGrid::set_channel: channel out of range");
  require_dim(plane.size(), pixels(), "ImageGrid::set_channel");
  for (std::size_t p = 0; p < plane.size(); ++p) {
    const double v = plane[p];
    data_[p * channels_ + c] = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
}

ImageGrid gradient_image(std::size_t height, std::size_t width, std::size_t channels) {
  const double span = std::max<double>(1.0, static_cast<double>(height + width) - 2.0);
  Vector data(height * width * channels);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t c = 0; c < channels; ++c) {
        data[(i * width + j) * channels + c] = static_cast<double>(i + j) / span;
      }
    }
  }
  return ImageGrid(height, width, channels, std::move(data));
}

ImageGrid checker_image(std::size_t height, std::size_t width, std::size_t cell,
                        std::size_t channels) {
  require(cell >= 1, "checker_image: cell must be positive");
  Vector data(height * width * channels);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const double v = ((i / cell + j / cell) % 2 == 0) ? 1.0 : 0.0;
      for (std::size_t c = 0; c < channels; ++c) data[(i * width + j) * channels + c] = v;
    }
  }
  return ImageGrid(height, width, channels, std::move(data));
}

double psnr(const ImageGrid& reference, const ImageGrid& candidate) {
  require(reference.same_shape(candidate), "psnr: images differ in shape");
  double sum = 0.0;
  const auto& a = reference.data();
  const auto& b = candidate.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sum / static_cast<double>(a.size());
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > 1'000'000) throw ImageParseError(start, std::string(what) + " is too large");
      ++pos_;
    }
    if (pos_ == start) throw ImageParseError(start, std::string("expected ") + what);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageGrid decode_image(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw ImageParseError(0, "missing netpbm magic");
  std::size_t channels = 0;
  if (bytes[1] == '5') {
    channels = 1;
  } else if (bytes[1] == '6') {
    channels = 3;
  } else {
    throw ImageParseError(0, std::string("unsupported magic P") + bytes[1]);
  }
  HeaderReader reader(bytes);
  reader.advance();
  reader.advance();
  const std::size_t width = reader.number("width");
  const std::size_t height = reader.number("height");
  const std::size_t maxval_pos = reader.pos();
  const std::size_t maxval = reader.number("maxval");
  if (width == 0 || height == 0) throw ImageParseError(maxval_pos, "zero image dimension");
  if (maxval != 255) throw ImageParseError(maxval_pos, "maxval must be 255");
  if (reader.pos() >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    throw ImageParseError(reader.pos(), "expected whitespace after maxval");
  }
  const std::size_t payload = reader.pos() + 1;
  const std::size_t expected = width * height * channels;
  if (bytes.size() - payload < expected) {
    throw ImageParseError(bytes.size(), "truncated payload: expected " + std::to_string(expected) +
                                            " bytes, found " + std::to_string(bytes.size() - payload));
  }
  Vector data(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    data[i] = static_cast<double>(static_cast<unsigned char>(bytes[payload + i])) / 255.0;
  }
  return ImageGrid(height, width, channels, std::move(data));
}

std::string encode_image(const ImageGrid& image) {
  require(image.channels() == 1 || image.channels() == 3,
          "encode_image: only 1 (PGM) or 3 (PPM) channels are supported");
  std::string out = (image.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(image.width()) +
                    " " + std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.data().size());
  for (double v : image.data()) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(q, 0L, 255L))));
  }
  return out;
}

ImageGrid read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_image(buf.str());
}

void write_image(const ImageGrid& image, const std::filesystem::path& path) {
  const std::string bytes = encode_image(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace fdsm
