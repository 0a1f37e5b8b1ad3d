#include "robustam/image.hpp"

#include "robustam/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

namespace robustam {

bool GrayImage::all_zero() const {
  return std::all_of(pixels.begin(), pixels.end(),
                     [](double p) { return p == 0.0; });
}

namespace {

// Reads the next integer token of a PGM header, skipping whitespace and
// '#' comment lines.
long read_pgm_int(std::istream& in, const std::filesystem::path& path) {
  for (;;) {
    int c = in.peek();
    if (c == EOF) {
      throw IoError("pgm: truncated header in " + path.string());
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  long value = 0;
  if (!(in >> value) || value < 0) {
    throw IoError("pgm: malformed header in " + path.string());
  }
  return value;
}

}  // namespace

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("pgm: cannot open " + path.string());
  }
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') {
    throw IoError("pgm: " + path.string() + " is not a binary PGM (P5)");
  }
  const long cols = read_pgm_int(in, path);
  const long rows = read_pgm_int(in, path);
  const long maxval = read_pgm_int(in, path);
  if (cols <= 0 || rows <= 0) {
    throw IoError("pgm: empty image in " + path.string());
  }
  if (maxval < 1 || maxval > 255) {
    throw IoError("pgm: only 8-bit images supported (maxval " +
                  std::to_string(maxval) + ") in " + path.string());
  }
  in.get();  // single whitespace after maxval
  const std::size_t count = static_cast<std::size_t>(rows * cols);
  std::vector<unsigned char> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    throw IoError("pgm: truncated pixel data in " + path.string());
  }
  GrayImage img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(count);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    img.pixels[i] = scale * raw[i];
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("pgm: cannot write " + path.string());
  }
  out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  for (double p : img.pixels) {
    const double clamped = std::clamp(p, 0.0, 1.0);
    out.put(static_cast<char>(std::lround(clamped * 255.0)));
  }
  if (!out) {
    throw IoError("pgm: write failed for " + path.string());
  }
}

VectorXd image_to_vector(const GrayImage& img, Index n) {
  const Index pixels = img.rows * img.cols;
  if (pixels < 1) {
    throw DimensionError("image_to_vector: empty image");
  }
  if (n == 0) {
    n = next_power_of_two(pixels);
  }
  if (!is_power_of_two(n)) {
    throw DimensionError("image_to_vector: target length must be a power of "
                         "two, got " + std::to_string(n));
  }
  if (pixels > n) {
    throw DimensionError("image_to_vector: image has " +
                         std::to_string(pixels) +
                         " pixels, exceeding target length " +
                         std::to_string(n));
  }
  VectorXd v = VectorXd::Zero(n);
  if (n % img.rows == 0 && n / img.rows >= img.cols) {
    // Pad as trailing zero columns of an rows x (n/rows) grid.
    const Index padded_cols = n / img.rows;
    for (Index r = 0; r < img.rows; ++r) {
      for (Index c = 0; c < img.cols; ++c) {
        v[r * padded_cols + c] = img.at(r, c);
      }
    }
  } else {
    for (Index i = 0; i < pixels; ++i) {
      v[i] = img.pixels[static_cast<std::size_t>(i)];
    }
  }
  return v;
}

VectorXd load_image_vector(const std::filesystem::path& path, Index n) {
  return image_to_vector(load_pgm(path), n);
}

namespace {

// Seven-segment layout on a 16x16 canvas.
//    _a_
//   f| g |b
//    |___|
//   e|   |c
//    |_d_|
constexpr unsigned kSegmentsByDigit[10] = {
    /*0*/ 0b0111111, /*1*/ 0b0000110, /*2*/ 0b1011011, /*3*/ 0b1001111,
    /*4*/ 0b1100110, /*5*/ 0b1101101, /*6*/ 0b1111101, /*7*/ 0b0000111,
    /*8*/ 0b1111111, /*9*/ 0b1101111};

void fill_rect(GrayImage& img, Index r0, Index r1, Index c0, Index c1,
               double value) {
  for (Index r = std::max<Index>(r0, 0); r < std::min(r1, img.rows); ++r) {
    for (Index c = std::max<Index>(c0, 0); c < std::min(c1, img.cols); ++c) {
      img.pixels[static_cast<std::size_t>(r * img.cols + c)] = value;
    }
  }
}

}  // namespace

std::vector<GrayImage> synthetic_digit_images(int count, std::uint64_t seed) {
  std::vector<GrayImage> images;
  images.reserve(static_cast<std::size_t>(count));
  RngStream rng = derive_stream(seed, "synthetic_digits");
  for (int idx = 0; idx < count; ++idx) {
    const int digit = idx % 10;
    GrayImage img;
    img.rows = 16;
    img.cols = 16;
    img.pixels.assign(256, 0.0);

    const Index dr = static_cast<Index>(rng.uniform_index(3));
    const Index dc = static_cast<Index>(rng.uniform_index(4));
    const double ink = 0.55 + 0.4 * rng.uniform01();
    const double faint = 0.05 + 0.1 * rng.uniform01();  // background wash
    for (auto& p : img.pixels) p = faint;

    const Index top = 1 + dr, left = 2 + dc;
    const Index h = 11, w = 8, t = 2;  // glyph box and stroke thickness
    const unsigned seg = kSegmentsByDigit[digit];
    if (seg & 0b0000001)  // a: top bar
      fill_rect(img, top, top + t, left, left + w, ink);
    if (seg & 0b0000010)  // b: upper right
      fill_rect(img, top, top + h / 2 + 1, left + w - t, left + w, ink);
    if (seg & 0b0000100)  // c: lower right
      fill_rect(img, top + h / 2, top + h, left + w - t, left + w, ink);
    if (seg & 0b0001000)  // d: bottom bar
      fill_rect(img, top + h - t, top + h, left, left + w, ink);
    if (seg & 0b0010000)  // e: lower left
      fill_rect(img, top + h / 2, top + h, left, left + t, ink);
    if (seg & 0b0100000)  // f: upper left
      fill_rect(img, top, top + h / 2 + 1, left, left + t, ink);
    if (seg & 0b1000000)  // g: middle bar
      fill_rect(img, top + h / 2 - 1, top + h / 2 + 1, left, left + w, ink);

    images.push_back(std::move(img));
  }
  return images;
}

}  // namespace robustam
