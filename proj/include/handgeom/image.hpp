#pragma once

#include <cstdint>
#include <vector>

#include "handgeom/errors.hpp"
#include "handgeom/geometry.hpp"

namespace handgeom {

namespace detail {
inline void check_dims(int width, int height) {
    if (width <= 0 || height <= 0)
        throw DimensionError("image dimensions must be positive");
}
} // namespace detail

// 8-bit single-channel raster, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        pixels_.assign(static_cast<std::size_t>(width) * height, fill);
    }
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        detail::check_dims(width, height);
        if (pixels_.size() != static_cast<std::size_t>(width) * height)
            throw DimensionError("pixel buffer size does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t at(int row, int col) const { return pixels_[index(row, col)]; }
    std::uint8_t& at(int row, int col) { return pixels_[index(row, col)]; }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }
    std::vector<std::uint8_t>& pixels() { return pixels_; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// 8-bit RGB raster, row-major, interleaved channels.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        pixels_.assign(static_cast<std::size_t>(width) * height * 3, 0);
    }
    RgbImage(int width, int height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        detail::check_dims(width, height);
        if (pixels_.size() != static_cast<std::size_t>(width) * height * 3)
            throw DimensionError("pixel buffer size does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t at(int row, int col, int channel) const {
        return pixels_[(static_cast<std::size_t>(row) * width_ + col) * 3 + channel];
    }
    std::uint8_t& at(int row, int col, int channel) {
        return pixels_[(static_cast<std::size_t>(row) * width_ + col) * 3 + channel];
    }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// Binary mask, one byte per pixel holding 0 (background) or 1 (hand).
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height) {
        detail::check_dims(width, height);
        pixels_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t at(int row, int col) const { return pixels_[index(row, col)]; }
    void set(int row, int col, bool value) { pixels_[index(row, col)] = value ? 1 : 0; }

    // Out-of-bounds coordinates read as background.
    bool foreground(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_ && pixels_[index(row, col)] != 0;
    }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }
    std::vector<std::uint8_t>& pixels() { return pixels_; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (auto v : pixels_) n += v;
        return n;
    }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

} // namespace handgeom
