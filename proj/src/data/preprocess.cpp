// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "atlbp/data/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "atlbp/error.hpp"

namespace atlbp::data {

Segment downsample(const Segment& segment, double target_fps) {
  if (!(target_fps > 0.0)) fail(ErrorKind::usage, "downsample: target fps must be positive");
  if (target_fps > segment.fps) {
    fail(ErrorKind::usage, "downsample: target fps " + std::to_string(target_fps) +
                               " exceeds source fps " + std::to_string(segment.fps) +
                               " of segment " + segment.id());
  }
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(segment.fps / target_fps)));
  Segment out = segment;
  out.fps = target_fps;
  out.frames.clear();
  out.frames.reserve(segment.frames.size() / stride + 1);
  for (std::size_t i = 0; i < segment.frames.size(); i += stride) {
    out.frames.push_back(segment.frames[i]);
  }
  return out;
}

Normalizer fit_normalizer(std::span<const Segment> train_segments) {
  std::size_t dim = 0;
  std::size_t count = 0;
  for (const Segment& s : train_segments) {
    for (const FrameFeatures& f : s.frames) {
      if (dim == 0) dim = f.psi.size();
      if (f.psi.size() != dim) fail(ErrorKind::dimension, "fit_normalizer: inconsistent psi length");
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::usage, "fit_normalizer: no training frames");

  Normalizer norm{Vector(dim), Vector(dim)};
  for (const Segment& s : train_segments) {
    for (const FrameFeatures& f : s.frames) {
      for (std::size_t d = 0; d < dim; ++d) norm.mean[d] += f.psi[d];
    }
  }
  for (double& m : norm.mean) m /= static_cast<double>(count);

  for (const Segment& s : train_segments) {
    for (const FrameFeatures& f : s.frames) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = f.psi[d] - norm.mean[d];
        norm.stddev[d] += diff * diff;
      }
    }
  }
  for (double& v : norm.stddev) {
    v = std::max(std::sqrt(v / static_cast<double>(count)), Normalizer::kStdFloor);
  }
  return norm;
}

Segment Normalizer::apply(const Segment& segment) const {
  Segment out = segment;
  for (FrameFeatures& f : out.frames) {
    if (f.psi.size() != mean.size()) {
      fail(ErrorKind::dimension, "normalizer fitted for psi length " + std::to_string(mean.size()) +
                                     " applied to segment " + segment.id());
    }
    for (std::size_t d = 0; d < mean.size(); ++d) f.psi[d] = (f.psi[d] - mean[d]) / stddev[d];
  }
  return out;
}

}  // namespace atlbp::data
