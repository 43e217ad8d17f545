#pragma once

#include <vector>

namespace faceval {

/// Single-channel float field, row-major.
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  ScalarField() = default;
  ScalarField(int w, int h, float fill = 0.0f);
  ScalarField(int w, int h, std::vector<float> v);

  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;
};

/// A ScalarField whose values all lie in [0, 1].
class Mask {
 public:
  /// Throws ValueOutOfRange or DimensionMismatch.
  explicit Mask(ScalarField field);

  const ScalarField& field() const noexcept { return field_; }
  int width() const noexcept { return field_.width; }
  int height() const noexcept { return field_.height; }
  float at(int x, int y) const { return field_.at(x, y); }

 private:
  ScalarField field_;
};

/// Multi-channel landmark heatmap, channel-major then row-major.
struct Heatmap {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<float> values;

  float at(int c, int x, int y) const {
    return values[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// 1- or 3-channel image with samples in [0, 1], row-major, interleaved.
struct Image {
  int channels = 1;
  int width = 0;
  int height = 0;
  std::vector<float> values;

  static Image constant(int channels, int width, int height, float level);

  float at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float& at(int x, int y, int c) {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Throws DimensionMismatch (wrong length / channel count) or ValueOutOfRange.
void validate(const Image& image);

inline constexpr double kDefaultSharpness = 10.0;
inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr float kNeutralGray = 0.5f;

/// Mean over channels: out[y,x] = (1/C) sum_c hm[c,y,x].
ScalarField aggregate_heatmap(const Heatmap& heatmap);

/// Exponential sharpening then global min-max normalisation:
///   s = 1 - exp(-k * raw),  M = (s - min s) / (max s - min s + eps).
/// A constant field maps to all zeros.
Mask normalize_mask(const ScalarField& raw, double k = kDefaultSharpness,
                    double eps = kDefaultEpsilon);

/// out = M * image + (1 - M) * background, per channel.
Image blend(const Image& image, const Mask& mask, const Image& background);

/// Sobel gradient magnitude with replicate padding. RGB input is converted
/// to luma (0.299, 0.587, 0.114) first.
ScalarField sobel_edges(const Image& image);

/// Bilinear resampling with half-pixel centres (align_corners = false).
ScalarField resize_bilinear(const ScalarField& field, int out_width, int out_height);

ScalarField transpose(const ScalarField& field);
Image transpose(const Image& image);

}  // namespace faceval
