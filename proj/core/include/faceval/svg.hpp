#pragma once

#include <optional>
#include <string>

#include "faceval/landmarks.hpp"

namespace faceval {

/// Plain SVG 1.1 overlay of landmark sets: one layer per group, points as
/// 2 px circles, prediction and ground truth in separate stroke classes
/// (ground truth green). Output is byte-deterministic.
std::string render_landmarks_svg(const LandmarkSet& pred, const std::optional<LandmarkSet>& gt = std::nullopt,
                                 int size = 512);

}  // namespace faceval
