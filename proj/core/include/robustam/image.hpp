#pragma once

#include "robustam/common.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace robustam {

/// Grayscale image, row-major, values in [0, 1].
struct GrayImage {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> pixels;

  double at(Index r, Index c) const {
    return pixels[static_cast<std::size_t>(r * cols + c)];
  }
  bool all_zero() const;
};

/// Reads a binary PGM (P5) file with maxval <= 255. Pixel values are scaled
/// by 1/maxval.
GrayImage load_pgm(const std::filesystem::path& path);

void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Row-major vectorization zero-padded to length n (a power of two >= the
/// pixel count; pass n = 0 for the smallest such length). When n is an
/// integer multiple of the row count the padding is laid out as trailing
/// zero columns of the grid; otherwise zeros are appended after the last
/// pixel.
VectorXd image_to_vector(const GrayImage& img, Index n = 0);

VectorXd load_image_vector(const std::filesystem::path& path, Index n = 0);

/// Deterministic 16x16 digit-like test images (seven-segment digits with
/// varying stroke intensity and placement). Used for self-contained image
/// experiments when no PGM corpus is available.
std::vector<GrayImage> synthetic_digit_images(int count, std::uint64_t seed);

}  // namespace robustam
