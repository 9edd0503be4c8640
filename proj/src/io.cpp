#include "pmog/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmog::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
  fail(ErrorCode::IoError, path.string() + ": " + what);
}

[[noreturn]] void format_error(const fs::path& path, const std::string& what) {
  fail(ErrorCode::ImageFormatError, path.string() + ": " + what);
}

// Whitespace- and comment-aware token reader for PGM headers and P2 bodies.
class PgmTokens {
 public:
  PgmTokens(const std::string& data, const fs::path& path) : data_(data), path_(path) {}

  long next_int() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) format_error(path_, "expected an integer in the header or body");
    long v = 0;
    const auto res = std::from_chars(data_.data() + start, data_.data() + pos_, v);
    if (res.ec != std::errc()) format_error(path_, "integer out of range");
    return v;
  }

  /// Position of the byte after the single whitespace that ends the header.
  std::size_t raster_start() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_])))
      format_error(path_, "missing whitespace before the raster");
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  const fs::path& path_;
  std::size_t pos_ = 2;
};

}  // namespace

std::string format_double(double value) {
  require(std::isfinite(value), ErrorCode::IoError, "cannot serialise a non-finite value");
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) io_error(path, "read failed");
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) io_error(path, "cannot create parent directory: " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_error(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) io_error(path, "write failed");
}

void write_csv(const fs::path& path, const Matrix& M) {
  std::string text;
  text.reserve(static_cast<std::size_t>(M.size()) * 24);
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c) text += ',';
      text += format_double(M(r, c));
    }
    text += '\n';
  }
  write_text(path, text);
}

Matrix read_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<double> values;
  Eigen::Index rows = 0;
  Eigen::Index cols = -1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    Eigen::Index count = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        std::ostringstream os;
        os << "line " << rows + 1 << ": cannot parse '" << field << "'";
        io_error(path, os.str());
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cols >= 0 && count != cols) {
      std::ostringstream os;
      os << "line " << rows + 1 << " has " << count << " fields, expected " << cols;
      io_error(path, os.str());
    }
    cols = count;
    ++rows;
  }
  if (rows == 0) io_error(path, "empty matrix file");
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return M;
}

GrayImage read_pgm(const fs::path& path) {
  const std::string data = read_text(path);
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
    format_error(path, "not a P2 or P5 PGM file");
  const bool binary = data[1] == '5';
  PgmTokens tok(data, path);
  GrayImage img;
  const long w = tok.next_int();
  const long h = tok.next_int();
  const long maxval = tok.next_int();
  if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) format_error(path, "bad image dimensions");
  if (maxval <= 0 || maxval > 65535) format_error(path, "maxval outside 1..65535");
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  img.pixels.resize(count);

  if (binary) {
    const std::size_t start = tok.raster_start();
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    if (data.size() < start + count * bytes) format_error(path, "raster is truncated");
    const auto* raw = reinterpret_cast<const unsigned char*>(data.data() + start);
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bytes == 1 ? raw[i] : (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
      if (v > static_cast<unsigned>(maxval)) format_error(path, "pixel exceeds maxval");
      img.pixels[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = tok.next_int();
      if (v > maxval) format_error(path, "pixel exceeds maxval");
      img.pixels[i] = static_cast<double>(v);
    }
  }
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  require(image.width > 0 && image.height > 0 &&
              image.pixels.size() == static_cast<std::size_t>(image.width) * image.height,
          ErrorCode::InvalidArgument, "image buffer does not match its dimensions");
  require(image.maxval >= 1 && image.maxval <= 65535, ErrorCode::InvalidArgument,
          "maxval outside 1..65535");
  std::ostringstream header;
  header << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  std::string out = header.str();
  const bool wide = image.maxval > 255;
  for (double p : image.pixels) {
    const auto v = static_cast<unsigned>(std::clamp(std::lround(p), 0L, long{image.maxval}));
    if (wide) out += static_cast<char>((v >> 8) & 0xFF);
    out += static_cast<char>(v & 0xFF);
  }
  write_text(path, out);
}

void write_pgm_rescaled(const fs::path& path, const Vector& values, int width, int height) {
  require(values.size() == static_cast<Eigen::Index>(width) * height, ErrorCode::SizeMismatch,
          "pixel count does not match the image size");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.maxval = 255;
  const double lo = values.minCoeff();
  const double span = values.maxCoeff() - lo;
  img.pixels.resize(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    img.pixels[static_cast<std::size_t>(i)] = span > 0 ? 255.0 * (values(i) - lo) / span : 0.0;
  write_pgm(path, img);
}

}  // namespace pmog::io
