// SPDX-License-Identifier: Apache-2.0
#include <hapnet/errors.hpp>
#include <hapnet/visual/plate.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace hapnet::visual {

Image::Image(std::size_t w, std::size_t h, std::array<std::uint8_t, 3> fill)
    : width(w), height(h), rgb(w * h * 3) {
  for (std::size_t i = 0; i < w * h; ++i)
    std::copy(fill.begin(), fill.end(), rgb.begin() + static_cast<long>(i * 3));
}

bool ColorBand::contains(const std::uint8_t *px) const {
  for (int c = 0; c < 3; ++c)
    if (px[c] < lo[c] || px[c] > hi[c])
      return false;
  return true;
}

PlateGeometry detect_plate(const Image &image, const ColorBand &band) {
  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  for (std::size_t y = 0; y < image.height; ++y)
    for (std::size_t x = 0; x < image.width; ++x)
      if (band.contains(image.pixel(x, y))) {
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++count;
      }
  const double total = static_cast<double>(image.width * image.height);
  if (count == 0 || static_cast<double>(count) < kMinPlateCoverage * total)
    throw PlateNotFound("plate mask covers " + std::to_string(count) +
                        " of " + std::to_string(image.width * image.height) +
                        " pixels");
  const double n = static_cast<double>(count);
  return {sx / n, sy / n, std::sqrt(n / std::numbers::pi)};
}

CropRect crop_rect(const PlateGeometry &plate, std::size_t image_width,
                   std::size_t image_height) {
  const double r = plate.radius;
  const double cy = plate.cy - r;
  CropRect rect{plate.cx - r, cy - 0.5 * r, plate.cx + r, cy + 0.5 * r, false};
  const double w = static_cast<double>(image_width);
  const double h = static_cast<double>(image_height);
  auto clamp = [&rect](double &v, double hi) {
    const double c = std::clamp(v, 0.0, hi);
    if (c != v) {
      v = c;
      rect.clamped = true;
    }
  };
  clamp(rect.x0, w);
  clamp(rect.x1, w);
  clamp(rect.y0, h);
  clamp(rect.y1, h);
  return rect;
}

ImageNormParams image_norm_params(const std::array<double, 3> &mean_rgb) {
  ImageNormParams p;
  p.mean_rgb = mean_rgb;
  return p;
}

ImageNormParams image_norm_params() { return ImageNormParams{}; }

Image read_ppm(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path);
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || maxval != 255 || w == 0 || h == 0)
    throw UnsupportedFormat(path + ": expected an 8-bit binary PPM (P6)");
  in.get();
  Image img(w, h);
  in.read(reinterpret_cast<char *>(img.rgb.data()),
          static_cast<std::streamsize>(img.rgb.size()));
  if (!in)
    throw UnsupportedFormat(path + ": truncated pixel data");
  return img;
}

void write_ppm(const Image &image, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char *>(image.rgb.data()),
            static_cast<std::streamsize>(image.rgb.size()));
}

} // namespace hapnet::visual
