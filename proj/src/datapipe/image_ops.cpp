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

#include "qtl/datapipe/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"
#include "qtl/mlcore/rng.hpp"

namespace qtl::data {

Tensor<float> resize_bilinear(const ByteTensor& image, std::size_t out_h, std::size_t out_w) {
  if (image.rank() != 3) throw ArgumentError("resize expects an HWC image");
  const std::size_t h = image.shape[0], w = image.shape[1], c = image.shape[2];
  auto out = Tensor<float>::zeros({out_h, out_w, c});
  if (out_h == h && out_w == w) {
    std::copy(image.data.begin(), image.data.end(), out.data.begin());
    return out;
  }
  const double sy = static_cast<double>(h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(w) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0,
                                 static_cast<double>(h - 1));
    const std::size_t y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0,
                                   static_cast<double>(w - 1));
      const std::size_t x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        auto at = [&](std::size_t yy, std::size_t xx) {
          return static_cast<double>(image.data[(yy * w + xx) * c + ch]);
        };
        const double top = at(y0, x0) * (1 - tx) + at(y0, x1) * tx;
        const double bottom = at(y1, x0) * (1 - tx) + at(y1, x1) * tx;
        out.data[(y * out_w + x) * c + ch] = static_cast<float>(top * (1 - ty) + bottom * ty);
      }
    }
  }
  return out;
}

FloatTensor preprocess(const ByteTensor& image, const PreprocessConfig& config) {
  if (image.rank() != 3 || (image.shape[2] != 1 && image.shape[2] != 3)) {
    throw PreprocessError("preprocess expects an HWC image with 1 or 3 channels");
  }
  const std::size_t h = image.shape[0], w = image.shape[1], c = image.shape[2];
  if (h == 0 || w == 0) throw PreprocessError("empty image");
  const double scale = static_cast<double>(config.resize_shortest) /
                       static_cast<double>(std::min(h, w));
  const std::size_t rh = h <= w ? config.resize_shortest
                                : static_cast<std::size_t>(std::llround(h * scale));
  const std::size_t rw = w < h ? config.resize_shortest
                               : static_cast<std::size_t>(std::llround(w * scale));
  if (rh < config.crop || rw < config.crop) {
    throw PreprocessError("image " + std::to_string(h) + "x" + std::to_string(w) +
                          " resizes to " + std::to_string(rh) + "x" + std::to_string(rw) +
                          ", smaller than the " + std::to_string(config.crop) + " crop");
  }
  const auto resized = resize_bilinear(image, rh, rw);
  const std::size_t top = (rh - config.crop) / 2;
  const std::size_t left = (rw - config.crop) / 2;
  const std::size_t s = config.crop;
  auto out = FloatTensor::zeros({c, s, s});
  for (std::size_t ch = 0; ch < c; ++ch) {
    const float mean = kImageNetMean[ch];
    const float inv_std = 1.0f / kImageNetStd[ch];
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        const float v = resized.data[((top + y) * rw + left + x) * c + ch] / 255.0f;
        out.data[(ch * s + y) * s + x] = (v - mean) * inv_std;
      }
    }
  }
  return out;
}

AugmentDecision draw_augment(std::uint64_t seed, std::uint64_t epoch, const std::string& sample_id) {
  auto rng = ml::Rng::derive(seed, {ml::key(ml::Stream::kAugment), epoch, fnv1a64(sample_id)});
  AugmentDecision d;
  d.flip = rng.uniform() < 0.5;
  d.angle_degrees = rng.uniform(-kMaxRotationDegrees, kMaxRotationDegrees);
  return d;
}

FloatTensor apply_augment(const FloatTensor& chw, const AugmentDecision& decision) {
  if (chw.rank() != 3) throw ArgumentError("augment expects a CHW tensor");
  const std::size_t c = chw.shape[0], h = chw.shape[1], w = chw.shape[2];
  FloatTensor flipped = chw;
  if (decision.flip) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t y = 0; y < h; ++y) {
        float* row = &flipped.data[(ch * h + y) * w];
        std::reverse(row, row + w);
      }
    }
  }
  if (decision.angle_degrees == 0.0) return flipped;

  const double a = decision.angle_degrees * std::numbers::pi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  const double cy = (static_cast<double>(h) - 1) / 2, cx = (static_cast<double>(w) - 1) / 2;
  FloatTensor out = FloatTensor::zeros(chw.shape);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      // Inverse map: sample the source at the output pixel rotated by -angle.
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      const double sx = std::clamp(ca * dx + sa * dy + cx, 0.0, static_cast<double>(w - 1));
      const double sy = std::clamp(-sa * dx + ca * dy + cy, 0.0, static_cast<double>(h - 1));
      const std::size_t x0 = static_cast<std::size_t>(sx), y0 = static_cast<std::size_t>(sy);
      const std::size_t x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
      const float tx = static_cast<float>(sx - x0), ty = static_cast<float>(sy - y0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const float* src = &flipped.data[ch * h * w];
        const float top = src[y0 * w + x0] * (1 - tx) + src[y0 * w + x1] * tx;
        const float bottom = src[y1 * w + x0] * (1 - tx) + src[y1 * w + x1] * tx;
        out.data[(ch * h + y) * w + x] = top * (1 - ty) + bottom * ty;
      }
    }
  }
  return out;
}

FloatTensor augment(std::uint64_t seed, std::uint64_t epoch, const std::string& sample_id,
                    const FloatTensor& chw) {
  return apply_augment(chw, draw_augment(seed, epoch, sample_id));
}

}  // namespace qtl::data
