// Copyright 2026 The QTL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "qtl/common/tensor.hpp"

namespace qtl::data {

inline constexpr std::array<float, 3> kImageNetMean = {0.485f, 0.456f, 0.406f};
inline constexpr std::array<float, 3> kImageNetStd = {0.229f, 0.224f, 0.225f};

struct PreprocessConfig {
  std::size_t resize_shortest = 72;
  std::size_t crop = 64;
};

/// Half-pixel-centred bilinear resize of an HWC uint8 image to out_h x out_w.
/// Returns float HWC values still in [0, 255].
Tensor<float> resize_bilinear(const ByteTensor& image, std::size_t out_h, std::size_t out_w);

/// HWC uint8 -> CHW float: shortest side to resize_shortest (aspect kept,
/// long side rounded), centre crop (floor offsets), /255, then per-channel
/// ImageNet normalisation. Single-channel input uses the first constant pair.
/// Throws PreprocessError when the resized image is smaller than the crop.
FloatTensor preprocess(const ByteTensor& image, const PreprocessConfig& config = {});

struct AugmentDecision {
  bool flip = false;
  double angle_degrees = 0.0;
  bool operator==(const AugmentDecision&) const = default;
};

inline constexpr double kMaxRotationDegrees = 15.0;

/// Decision for one (seed, epoch, sample) triple. Nothing else feeds the
/// stream, so every head sees the same augmentation for the same sample.
AugmentDecision draw_augment(std::uint64_t seed, std::uint64_t epoch, const std::string& sample_id);

/// Horizontal flip, then rotation about the image centre by the decision's
/// angle (bilinear, edge-clamped). A no-flip, zero-angle decision returns
/// the input unchanged.
FloatTensor apply_augment(const FloatTensor& chw, const AugmentDecision& decision);

FloatTensor augment(std::uint64_t seed, std::uint64_t epoch, const std::string& sample_id,
                    const FloatTensor& chw);

}  // namespace qtl::data
