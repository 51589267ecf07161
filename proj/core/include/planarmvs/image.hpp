#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "planarmvs/grid.hpp"

namespace planarmvs {

// Grayscale image, intensities in [0, 1].
using ImageF = Grid<float>;
// 8-bit RGB image (point-cloud coloring and PPM I/O).
using ImageRgb = Grid<std::array<std::uint8_t, 3>>;

// Bilinear intensity lookup; pre: (x, y) within [0, w-1] x [0, h-1].
double sample_bilinear(const ImageF &img, double x, double y);

// Binary PGM (P5) / PPM (P6), 8-bit.  Loading converts to grayscale float
// via (0.299 R + 0.587 G + 0.114 B) / 255; the RGB raster is returned too
// when `rgb` is non-null (PGM replicates the gray channel).
ImageF load_image(const std::string &path, ImageRgb *rgb = nullptr);
void save_pgm(const ImageF &img, const std::string &path);
void save_ppm(const ImageRgb &img, const std::string &path);

// Nearest-neighbor-free box downscale by integer factor (area average), used
// by the CLI --max-dim option.  factor >= 1.
ImageF downscale(const ImageF &img, int factor);
ImageRgb downscale(const ImageRgb &img, int factor);

}  // namespace planarmvs
