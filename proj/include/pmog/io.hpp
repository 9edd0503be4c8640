#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmog/types.hpp"

namespace pmog::io {

/// Shortest-safe 17-significant-digit rendering; parses back to the same double.
std::string format_double(double value);

/// Headerless CSV: one matrix row per line, comma separated, LF endings.
void write_csv(const std::filesystem::path& path, const Matrix& M);
Matrix read_csv(const std::filesystem::path& path);

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<double> pixels;  // row-major, height * width
};

/// Accepts P2 (ASCII) and P5 (binary, 8- or 16-bit) files.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
/// Writes `values` as an 8-bit P5 image after per-image min-max scaling to 0-255.
void write_pgm_rescaled(const std::filesystem::path& path, const Vector& values, int width,
                        int height);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pmog::io
