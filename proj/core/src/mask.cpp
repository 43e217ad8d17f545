#include "faceval/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "faceval/error.hpp"

namespace faceval {

namespace {

void require_finite(const std::vector<float>& values, const char* what) {
  for (float v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " contains non-finite values");
  }
}

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

ScalarField::ScalarField(int w, int h, float fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

ScalarField::ScalarField(int w, int h, std::vector<float> v) : width(w), height(h), values(std::move(v)) {
  if (w < 0 || h < 0 || values.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw Error(ErrorCode::DimensionMismatch, "field data does not match " + dims(w, h));
  }
}

Mask::Mask(ScalarField field) : field_(std::move(field)) {
  if (field_.values.size() != static_cast<std::size_t>(field_.width) * field_.height) {
    throw Error(ErrorCode::DimensionMismatch, "mask data does not match " + dims(field_.width, field_.height));
  }
  for (float v : field_.values) {
    if (!(v >= 0.0f && v <= 1.0f)) throw Error(ErrorCode::ValueOutOfRange, "mask values must lie in [0, 1]");
  }
}

Image Image::constant(int channels, int width, int height, float level) {
  Image img;
  img.channels = channels;
  img.width = width;
  img.height = height;
  img.values.assign(static_cast<std::size_t>(width) * height * channels, level);
  return img;
}

void validate(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::DimensionMismatch, "images must have 1 or 3 channels");
  }
  if (image.width < 0 || image.height < 0 ||
      image.values.size() != static_cast<std::size_t>(image.width) * image.height * image.channels) {
    throw Error(ErrorCode::DimensionMismatch, "image data does not match " + dims(image.width, image.height));
  }
  for (float v : image.values) {
    if (!(v >= 0.0f && v <= 1.0f)) throw Error(ErrorCode::ValueOutOfRange, "image samples must lie in [0, 1]");
  }
}

ScalarField aggregate_heatmap(const Heatmap& heatmap) {
  if (heatmap.channels < 1) throw Error(ErrorCode::EmptyField, "heatmap has no channels");
  const std::size_t plane = static_cast<std::size_t>(heatmap.width) * heatmap.height;
  if (heatmap.values.size() != plane * heatmap.channels) {
    throw Error(ErrorCode::DimensionMismatch, "heatmap data does not match its header");
  }
  require_finite(heatmap.values, "heatmap");

  ScalarField out(heatmap.width, heatmap.height);
  std::vector<double> acc(plane, 0.0);
  for (int c = 0; c < heatmap.channels; ++c) {
    const float* src = heatmap.values.data() + plane * c;
    for (std::size_t i = 0; i < plane; ++i) acc[i] += src[i];
  }
  for (std::size_t i = 0; i < plane; ++i) {
    out.values[i] = static_cast<float>(acc[i] / heatmap.channels);
  }
  return out;
}

Mask normalize_mask(const ScalarField& raw, double k, double eps) {
  if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::NonPositiveParam, "k must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::NonPositiveParam, "eps must be positive");
  require_finite(raw.values, "attention map");

  std::vector<double> sharp(raw.values.size());
  for (std::size_t i = 0; i < sharp.size(); ++i) {
    sharp[i] = -std::expm1(-k * static_cast<double>(raw.values[i]));
  }
  ScalarField out(raw.width, raw.height);
  if (!sharp.empty()) {
    const auto [lo, hi] = std::minmax_element(sharp.begin(), sharp.end());
    const double min_s = *lo;
    const double denom = (*hi - min_s) + eps;
    for (std::size_t i = 0; i < sharp.size(); ++i) {
      out.values[i] = static_cast<float>((sharp[i] - min_s) / denom);
    }
  }
  return Mask(std::move(out));
}

Image blend(const Image& image, const Mask& mask, const Image& background) {
  if (image.width != mask.width() || image.height != mask.height()) {
    throw Error(ErrorCode::DimensionMismatch, "mask " + dims(mask.width(), mask.height()) +
                                                  " does not match image " + dims(image.width, image.height));
  }
  if (background.width != image.width || background.height != image.height ||
      background.channels != image.channels) {
    throw Error(ErrorCode::DimensionMismatch, "background does not match image dimensions or channels");
  }
  Image out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const float m = mask.at(x, y);
      for (int c = 0; c < image.channels; ++c) {
        out.at(x, y, c) = m * image.at(x, y, c) + (1.0f - m) * background.at(x, y, c);
      }
    }
  }
  return out;
}

ScalarField sobel_edges(const Image& image) {
  if (image.width < 3 || image.height < 3) {
    throw Error(ErrorCode::ImageTooSmall, "Sobel needs at least 3x3 pixels, got " + dims(image.width, image.height));
  }
  const int w = image.width;
  const int h = image.height;
  std::vector<double> gray(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray[static_cast<std::size_t>(y) * w + x] =
          image.channels == 1 ? image.at(x, y, 0)
                              : 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                                    0.114 * image.at(x, y, 2);
    }
  }
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return gray[static_cast<std::size_t>(y) * w + x];
  };

  ScalarField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(x + 1, y - 1) - px(x - 1, y - 1)) + 2.0 * (px(x + 1, y) - px(x - 1, y)) +
                        (px(x + 1, y + 1) - px(x - 1, y + 1));
      const double gy = (px(x - 1, y + 1) - px(x - 1, y - 1)) + 2.0 * (px(x, y + 1) - px(x, y - 1)) +
                        (px(x + 1, y + 1) - px(x + 1, y - 1));
      out.at(x, y) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

ScalarField resize_bilinear(const ScalarField& field, int out_width, int out_height) {
  if (field.width < 1 || field.height < 1 || field.values.empty()) {
    throw Error(ErrorCode::EmptyField, "cannot resize an empty field");
  }
  if (out_width < 1 || out_height < 1) {
    throw Error(ErrorCode::NonPositiveParam, "output size must be at least 1x1");
  }
  if (out_width == field.width && out_height == field.height) return field;

  const double sx = static_cast<double>(field.width) / out_width;
  const double sy = static_cast<double>(field.height) / out_height;
  ScalarField out(out_width, out_height);
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(field.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, field.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(field.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, field.width - 1);
      const double tx = fx - x0;
      const double top = (1.0 - tx) * field.at(x0, y0) + tx * field.at(x1, y0);
      const double bottom = (1.0 - tx) * field.at(x0, y1) + tx * field.at(x1, y1);
      out.at(x, y) = static_cast<float>((1.0 - ty) * top + ty * bottom);
    }
  }
  return out;
}

ScalarField transpose(const ScalarField& field) {
  ScalarField out(field.height, field.width);
  for (int y = 0; y < field.height; ++y) {
    for (int x = 0; x < field.width; ++x) out.at(y, x) = field.at(x, y);
  }
  return out;
}

Image transpose(const Image& image) {
  Image out = Image::constant(image.channels, image.height, image.width, 0.0f);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y, x, c) = image.at(x, y, c);
    }
  }
  return out;
}

}  // namespace faceval
