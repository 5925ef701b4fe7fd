#include "curvelane/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvelane/error.hpp"

namespace curvelane {

Image::Image(int w, int h, int c, float fill) : width(w), height(h), channels(c) {
  if (w < 0 || h < 0 || (c != 1 && c != 3)) {
    throw Error(ErrorCode::InvalidParameter, "image must have non-negative size and 1 or 3 channels");
  }
  data.assign(static_cast<std::size_t>(w) * h * c, fill);
}

Image Image::channel(int c) const {
  Image out(width, height, 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) out.data[i] = data[i * channels + c];
  return out;
}

void Image::set_channel(int c, const Image& plane) {
  if (plane.width != width || plane.height != height || plane.channels != 1) {
    throw Error(ErrorCode::ShapeMismatch, "plane does not match image size");
  }
  for (std::size_t i = 0; i < pixel_count(); ++i) data[i * channels + c] = plane.data[i];
}

std::size_t EdgeMap::edge_count() const {
  return static_cast<std::size_t>(std::count(binary.begin(), binary.end(), std::uint8_t{1}));
}

Image EdgeMap::magnitude_image() const {
  Image out(width, height, 1);
  out.data = magnitude;
  return out;
}

Image EdgeMap::binary_image() const {
  Image out(width, height, 1);
  for (std::size_t i = 0; i < binary.size(); ++i) out.data[i] = binary[i] ? 1.0f : 0.0f;
  return out;
}

Image to_hsv(const Image& rgb) {
  if (rgb.channels != 3) throw Error(ErrorCode::ChannelMismatch, "to_hsv needs 3 channels");
  Image out(rgb.width, rgb.height, 3);
  for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
    const float r = rgb.data[3 * i];
    const float g = rgb.data[3 * i + 1];
    const float b = rgb.data[3 * i + 2];
    const float mx = std::max({r, g, b});
    const float mn = std::min({r, g, b});
    const float delta = mx - mn;
    float h = 0.0f;
    if (delta > 0.0f) {
      if (mx == r) {
        h = (g - b) / delta;
        if (h < 0.0f) h += 6.0f;
      } else if (mx == g) {
        h = (b - r) / delta + 2.0f;
      } else {
        h = (r - g) / delta + 4.0f;
      }
      h /= 6.0f;
      if (h >= 1.0f) h -= 1.0f;
    }
    out.data[3 * i] = h;
    out.data[3 * i + 1] = mx > 0.0f ? delta / mx : 0.0f;
    out.data[3 * i + 2] = mx;
  }
  return out;
}

Image hsv_to_rgb(const Image& hsv) {
  if (hsv.channels != 3) throw Error(ErrorCode::ChannelMismatch, "hsv_to_rgb needs 3 channels");
  Image out(hsv.width, hsv.height, 3);
  for (std::size_t i = 0; i < hsv.pixel_count(); ++i) {
    const float h = hsv.data[3 * i] * 6.0f;
    const float s = hsv.data[3 * i + 1];
    const float v = hsv.data[3 * i + 2];
    const int sector = static_cast<int>(std::floor(h)) % 6;
    const float f = h - std::floor(h);
    const float p = v * (1.0f - s);
    const float q = v * (1.0f - s * f);
    const float t = v * (1.0f - s * (1.0f - f));
    float r = v, g = v, b = v;
    switch (sector) {
      case 0: r = v; g = t; b = p; break;
      case 1: r = q; g = v; b = p; break;
      case 2: r = p; g = v; b = t; break;
      case 3: r = p; g = q; b = v; break;
      case 4: r = t; g = p; b = v; break;
      default: r = v; g = p; b = q; break;
    }
    out.data[3 * i] = r;
    out.data[3 * i + 1] = g;
    out.data[3 * i + 2] = b;
  }
  return out;
}

Image gray_to_rgb(const Image& gray) {
  if (gray.channels == 3) return gray;
  Image out(gray.width, gray.height, 3);
  for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = gray.data[i];
  }
  return out;
}

namespace {

std::vector<double> gaussian_kernel_half(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> w(radius + 1);
  double total = 0.0;
  for (int k = 0; k <= radius; ++k) {
    w[k] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += (k == 0 ? 1.0 : 2.0) * w[k];
  }
  for (double& v : w) v /= total;
  return w;
}

// One 1-D pass. Output = centre + sum_k w_k * ((right_k - centre) + (left_k - centre)).
// Pairing symmetric taps keeps mirrored inputs bit-identical, and constants exact.
void convolve_line(const float* src, float* dst, int n, std::ptrdiff_t stride,
                   const std::vector<double>& half) {
  const int radius = static_cast<int>(half.size()) - 1;
  for (int i = 0; i < n; ++i) {
    const double centre = src[i * stride];
    double acc = 0.0;
    for (int k = 1; k <= radius; ++k) {
      const int lo = std::max(i - k, 0);
      const int hi = std::min(i + k, n - 1);
      acc += half[k] * ((src[hi * stride] - centre) + (src[lo * stride] - centre));
    }
    dst[i * stride] = static_cast<float>(centre + acc);
  }
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidSigma, "sigma must be positive");
  const auto half = gaussian_kernel_half(sigma);
  Image tmp(img.width, img.height, img.channels);
  Image out(img.width, img.height, img.channels);
  const std::ptrdiff_t c = img.channels;
  for (int y = 0; y < img.height; ++y) {
    for (int ch = 0; ch < img.channels; ++ch) {
      const std::size_t base = static_cast<std::size_t>(y) * img.width * c + ch;
      convolve_line(img.data.data() + base, tmp.data.data() + base, img.width, c, half);
    }
  }
  const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(img.width) * c;
  for (int x = 0; x < img.width; ++x) {
    for (int ch = 0; ch < img.channels; ++ch) {
      const std::size_t base = static_cast<std::size_t>(x) * c + ch;
      convolve_line(tmp.data.data() + base, out.data.data() + base, img.height, row, half);
    }
  }
  return out;
}

Image mirror_horizontal(const Image& img) {
  Image out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) out.at(img.width - 1 - x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

Image correct_illumination(const Image& hsv, const IlluminationParams& params) {
  if (hsv.channels != 3) throw Error(ErrorCode::ChannelMismatch, "correct_illumination needs HSV input");
  if (params.tile < 1 || !(params.target > 0.0) || params.flatness < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "illumination tile, target and flatness must be positive");
  }
  Image out = hsv;
  const int w = hsv.width;
  const int h = hsv.height;
  if (w == 0 || h == 0) return out;

  double sum = 0.0;
  for (std::size_t i = 0; i < hsv.pixel_count(); ++i) sum += hsv.data[3 * i + 2];
  const double global_mean = sum / static_cast<double>(hsv.pixel_count());
  double sq = 0.0;
  for (std::size_t i = 0; i < hsv.pixel_count(); ++i) {
    const double d = hsv.data[3 * i + 2] - global_mean;
    sq += d * d;
  }
  const double global_dev = std::sqrt(sq / static_cast<double>(hsv.pixel_count()));
  // Blend weight: 0 for a flat image (left untouched), close to 1 otherwise.
  const double weight = global_dev / (global_dev + params.flatness);
  if (weight == 0.0) return out;

  const int tile = params.tile;
  const int nx = (w + tile - 1) / tile;
  const int ny = (h + tile - 1) / tile;
  std::vector<double> tile_mean(static_cast<std::size_t>(nx) * ny, 0.0);
  for (int ty = 0; ty < ny; ++ty) {
    for (int tx = 0; tx < nx; ++tx) {
      double s = 0.0;
      int count = 0;
      for (int y = ty * tile; y < std::min(h, (ty + 1) * tile); ++y) {
        for (int x = tx * tile; x < std::min(w, (tx + 1) * tile); ++x) {
          s += hsv.at(x, y, 2);
          ++count;
        }
      }
      tile_mean[static_cast<std::size_t>(ty) * nx + tx] = s / count;
    }
  }

  auto axis_weights = [tile](int p, int n, int& i0, int& i1, double& t) {
    double f = (p + 0.5) / tile - 0.5;
    f = std::clamp(f, 0.0, static_cast<double>(n - 1));
    i0 = static_cast<int>(std::floor(f));
    i1 = std::min(i0 + 1, n - 1);
    t = f - i0;
  };

  constexpr double kMeanFloor = 1e-3;
  for (int y = 0; y < h; ++y) {
    int y0, y1;
    double ty;
    axis_weights(y, ny, y0, y1, ty);
    for (int x = 0; x < w; ++x) {
      int x0, x1;
      double tx;
      axis_weights(x, nx, x0, x1, tx);
      const double m00 = tile_mean[static_cast<std::size_t>(y0) * nx + x0];
      const double m01 = tile_mean[static_cast<std::size_t>(y0) * nx + x1];
      const double m10 = tile_mean[static_cast<std::size_t>(y1) * nx + x0];
      const double m11 = tile_mean[static_cast<std::size_t>(y1) * nx + x1];
      const double local = (1 - ty) * ((1 - tx) * m00 + tx * m01) + ty * ((1 - tx) * m10 + tx * m11);
      const double v = hsv.at(x, y, 2);
      const double normalised = std::clamp(params.target * v / std::max(local, kMeanFloor), 0.0, 1.0);
      out.at(x, y, 2) = static_cast<float>(std::clamp((1.0 - weight) * v + weight * normalised, 0.0, 1.0));
    }
  }
  return out;
}

EdgeMap edge_detect(const Image& gray, double low, double high) {
  if (gray.channels != 1) throw Error(ErrorCode::ChannelMismatch, "edge_detect needs a single channel");
  if (!(low >= 0.0 && low <= high && high <= 1.0)) {
    throw Error(ErrorCode::BadThresholds, "need 0 <= low <= high <= 1");
  }
  const int w = gray.width;
  const int h = gray.height;
  EdgeMap edges;
  edges.width = w;
  edges.height = h;
  edges.low = low;
  edges.high = high;
  edges.magnitude.assign(gray.pixel_count(), 0.0f);
  edges.binary.assign(gray.pixel_count(), 0);
  if (w == 0 || h == 0) return edges;

  std::vector<float> gx(gray.pixel_count());
  std::vector<float> gy(gray.pixel_count());
  auto px = [&](int x, int y) {
    return gray.data[static_cast<std::size_t>(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float dx = (px(x + 1, y - 1) + 2.0f * px(x + 1, y) + px(x + 1, y + 1)) -
                       (px(x - 1, y - 1) + 2.0f * px(x - 1, y) + px(x - 1, y + 1));
      const float dy = (px(x - 1, y + 1) + 2.0f * px(x, y + 1) + px(x + 1, y + 1)) -
                       (px(x - 1, y - 1) + 2.0f * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      gx[i] = dx;
      gy[i] = dy;
      edges.magnitude[i] = std::min(1.0f, std::hypot(dx, dy) * 0.25f);
    }
  }

  auto mag = [&](int x, int y) -> float {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0f;
    return edges.magnitude[static_cast<std::size_t>(y) * w + x];
  };
  constexpr float kTan22 = 0.41421356f;
  constexpr float kTan67 = 2.41421356f;
  // 0 = suppressed, 1 = weak candidate, 2 = strong seed.
  std::vector<std::uint8_t> state(gray.pixel_count(), 0);
  std::vector<int> stack;
  const float lowf = static_cast<float>(low);
  const float highf = static_cast<float>(high);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const float m = edges.magnitude[i];
      if (m <= 0.0f || m < lowf) continue;
      const float ax = std::fabs(gx[i]);
      const float ay = std::fabs(gy[i]);
      float prev, next;
      if (ay <= ax * kTan22) {
        prev = mag(x - 1, y);
        next = mag(x + 1, y);
      } else if (ay >= ax * kTan67) {
        prev = mag(x, y - 1);
        next = mag(x, y + 1);
      } else if ((gx[i] > 0) == (gy[i] > 0)) {
        prev = mag(x - 1, y - 1);
        next = mag(x + 1, y + 1);
      } else {
        prev = mag(x + 1, y - 1);
        next = mag(x - 1, y + 1);
      }
      if (!(m > prev && m >= next)) continue;
      if (m >= highf) {
        state[i] = 2;
        stack.push_back(static_cast<int>(i));
      } else {
        state[i] = 1;
      }
    }
  }
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    edges.binary[i] = 1;
    const int x = i % w;
    const int y = i / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const int j = ny * w + nx;
        if (state[j] == 1) {
          state[j] = 2;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace curvelane
