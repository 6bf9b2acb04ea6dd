// SPDX-License-Identifier: Apache-2.0
/**
 * @file   plate.hpp
 * @brief  Plate detection by color and the crop rectangle derived from it.
 */
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hapnet::visual {

/// 8-bit interleaved RGB image.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb; ///< height * width * 3

  Image() = default;
  Image(std::size_t w, std::size_t h, std::array<std::uint8_t, 3> fill = {});
  std::uint8_t *pixel(std::size_t x, std::size_t y) {
    return rgb.data() + (y * width + x) * 3;
  }
  const std::uint8_t *pixel(std::size_t x, std::size_t y) const {
    return rgb.data() + (y * width + x) * 3;
  }
};

/// Inclusive per-channel bounds selecting plate-colored pixels.
struct ColorBand {
  std::array<std::uint8_t, 3> lo{150, 150, 150};
  std::array<std::uint8_t, 3> hi{215, 215, 225};

  bool contains(const std::uint8_t *px) const;
};

struct PlateGeometry {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// Minimum share of pixels the color mask must cover.
inline constexpr double kMinPlateCoverage = 0.005;

/**
 * Center = centroid of the color mask, radius = sqrt(area / pi).
 * Throws PlateNotFound when the mask covers less than 0.5% of the image.
 */
PlateGeometry detect_plate(const Image &image, const ColorBand &band = {});

struct CropRect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool clamped = false;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// 2R x R rectangle centered R above the plate center, clamped to the image.
CropRect crop_rect(const PlateGeometry &plate, std::size_t image_width,
                   std::size_t image_height);

/// Settings handed to the external feature extractor.
struct ImageNormParams {
  std::array<double, 3> mean_rgb{123.0, 117.0, 104.0};
  std::size_t input_width = 224;
  std::size_t input_height = 224;

  bool operator==(const ImageNormParams &) const = default;
};

/// Echoes the configured channel means with the fixed 224 x 224 input size.
ImageNormParams image_norm_params(const std::array<double, 3> &mean_rgb);
ImageNormParams image_norm_params();

/// Binary (P6) PPM reader/writer, enough to feed detect_plate from disk.
Image read_ppm(const std::string &path);
void write_ppm(const Image &image, const std::string &path);

} // namespace hapnet::visual
