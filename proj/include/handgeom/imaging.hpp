#pragma once

#include "handgeom/image.hpp"

namespace handgeom {

// Which side of the threshold is the hand.
enum class Polarity {
    BrightHand, // intensity > t maps to foreground (dark background scans)
    DarkHand    // intensity <= t maps to foreground
};

// ITU-R 601 luminance, rounded and clamped to [0,255].
GrayImage to_grayscale(const RgbImage& image);

// Threshold level maximizing between-class variance of the 256-bin
// histogram; ties resolved toward the smallest level. Throws
// DegenerateHistogramError when the image holds a single intensity.
int otsu_threshold(const GrayImage& img);

GrayImage median_filter(const GrayImage& img, int window = 3);

BinaryImage binarize(const GrayImage& img, int threshold, Polarity polarity = Polarity::BrightHand);

// Keeps only the biggest 8-connected foreground component; ties go to the
// component containing the topmost-leftmost pixel.
BinaryImage largest_component(const BinaryImage& img);

// Gradient magnitude of the 3x3 Sobel operator applied to the mask
// (out-of-image pixels read as background). Nonzero exactly on the
// silhouette boundary for well-formed masks.
int sobel_magnitude(const BinaryImage& img, int row, int col);

// Closed outer boundary of the single foreground component: an 8-connected
// clockwise walk anchored at the topmost-leftmost boundary pixel.
Contour sobel_contour(const BinaryImage& img);

} // namespace handgeom
