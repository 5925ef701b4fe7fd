#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace curvelane {

// Row-major pixel grid with 1 or 3 interleaved channels, intensities in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c = 1, float fill = 0.0f);

  bool empty() const { return data.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  Image channel(int c) const;
  void set_channel(int c, const Image& plane);

  friend bool operator==(const Image&, const Image&) = default;
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<float> magnitude;   // gradient strength in [0, 1]
  std::vector<std::uint8_t> binary;
  double low = 0.0;
  double high = 0.0;

  bool is_edge(int x, int y) const { return binary[static_cast<std::size_t>(y) * width + x] != 0; }
  float magnitude_at(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
  std::size_t edge_count() const;
  Image magnitude_image() const;
  Image binary_image() const;
};

// Hexcone RGB -> HSV; H is scaled so [0, 1) covers [0, 360) degrees.
Image to_hsv(const Image& rgb);
Image hsv_to_rgb(const Image& hsv);

// Expands a single-channel image to three identical channels.
Image gray_to_rgb(const Image& gray);

// Separable Gaussian with edge replication, applied to every channel.
Image gaussian_blur(const Image& img, double sigma);

Image mirror_horizontal(const Image& img);

struct IlluminationParams {
  int tile = 32;
  double target = 0.5;      // V level the local mean is mapped to
  double flatness = 1e-3;   // global V deviation below which the image is left alone
};

// Local gain normalisation of the V channel of an HSV image. Each tile's mean V
// is bilinearly interpolated between tile centres and V is rescaled so that the
// local mean lands on `target`. H and S pass through untouched.
Image correct_illumination(const Image& hsv, const IlluminationParams& params = {});

// 3x3 Sobel magnitude, non-maximum suppression along the gradient, and hysteresis
// with (low, high). Magnitude is normalised so a unit step reads 1.
EdgeMap edge_detect(const Image& gray, double low, double high);

}  // namespace curvelane
