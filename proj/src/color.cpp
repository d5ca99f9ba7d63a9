#include <algorithm>
#include <cmath>

#include "pelletseg/dataset.hpp"

namespace pelletseg {

namespace {

// D65 reference white, CIE 1931 2 degree observer.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;
constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_to_linear(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }

double linear_to_srgb(double v) {
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

double lab_f_inv(double f) {
  const double f3 = f * f * f;
  return f3 > kEpsilon ? f3 : (116.0 * f - 16.0) / kKappa;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8 / 255.0);
  const double g = srgb_to_linear(g8 / 255.0);
  const double b = srgb_to_linear(b8 / 255.0);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kXn);
  const double fy = lab_f(y / kYn);
  const double fz = lab_f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::array<std::uint8_t, 3> lab_to_srgb(const Lab& lab) {
  const double fy = (lab.l + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double x = kXn * lab_f_inv(fx);
  const double y = kYn * lab_f_inv(fy);
  const double z = kZn * lab_f_inv(fz);
  const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  return {to_byte(linear_to_srgb(std::clamp(r, 0.0, 1.0))), to_byte(linear_to_srgb(std::clamp(g, 0.0, 1.0))),
          to_byte(linear_to_srgb(std::clamp(b, 0.0, 1.0)))};
}

namespace {

void require_rgb(const RgbImage& image, const char* what) {
  if (image.channels() != 3) throw ShapeError(std::string(what) + ": expected a 3-channel RGB image");
}

}  // namespace

LuminanceStats luminance_stats(const RgbImage& image) {
  require_rgb(image, "luminance_stats");
  const std::size_t n = image.pixel_count();
  if (n == 0) return {0.0, 0.0};
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      const double l = srgb_to_lab(image(r, c, 0), image(r, c, 1), image(r, c, 2)).l;
      sum += l;
      sum2 += l * l;
    }
  }
  const double mean = sum / double(n);
  const double var = std::max(0.0, sum2 / double(n) - mean * mean);
  return {mean, std::sqrt(var)};
}

RgbImage normalize_luminance(const RgbImage& image, const LuminanceStats& ref) {
  require_rgb(image, "normalize_luminance");
  if (!(ref.ref_mean >= 0.0 && ref.ref_mean <= 100.0) || !(ref.ref_std >= 0.0)) {
    throw InvalidParameter("normalize_luminance: reference mean must lie in [0, 100] and std be >= 0");
  }
  const LuminanceStats cur = luminance_stats(image);
  const double gain = ref.ref_std / std::max(cur.ref_std, 1e-6);
  RgbImage out(image.rows(), image.cols(), 3);
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      Lab lab = srgb_to_lab(image(r, c, 0), image(r, c, 1), image(r, c, 2));
      lab.l = std::clamp((lab.l - cur.ref_mean) * gain + ref.ref_mean, 0.0, 100.0);
      const auto rgb = lab_to_srgb(lab);
      std::ranges::copy(rgb, out.pixel(r, c).begin());
    }
  }
  return out;
}

ImageStats image_stats(std::string id, const ClassMap& classes, const RgbImage* rgb) {
  ImageStats s;
  s.id = std::move(id);
  s.fractions = class_pixel_fractions(classes);
  if (rgb != nullptr) {
    const LuminanceStats l = luminance_stats(*rgb);
    s.lum_mean = l.ref_mean;
    s.lum_std = l.ref_std;
  }
  return s;
}

}  // namespace pelletseg
