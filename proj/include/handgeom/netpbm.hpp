#pragma once

#include <string>

#include "handgeom/image.hpp"

namespace handgeom {

// Binary Netpbm I/O. Readers accept "P5" (PGM) and "P6" (PPM) with
// maxval 255; writers always emit maxval 255.

GrayImage load_pgm(const std::string& path);
RgbImage load_ppm(const std::string& path);

// Dispatches on the magic number; PPM input is reduced to luminance.
GrayImage load_image_gray(const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);
void save_ppm(const RgbImage& img, const std::string& path);

} // namespace handgeom
