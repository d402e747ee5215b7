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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atlbp/data/outcome.hpp"
#include "atlbp/numgrad/tensor.hpp"

namespace atlbp::data {

using numgrad::Vector;

/// One frame: traditional facial features ψ plus the optional raw affect (ρ)
/// and face-identity (ξ) embeddings.
struct FrameFeatures {
  Vector psi;
  std::optional<Vector> rho;
  std::optional<Vector> xi;

  friend bool operator==(const FrameFeatures&, const FrameFeatures&) = default;
};

/// One labeled problem attempt of one user in one session.
struct Segment {
  std::string user_id;
  std::string session_id;
  std::size_t problem_index = 0;  // chronological within the session
  OutcomeLabel label = OutcomeLabel::SOF;
  double fps = 3.0;
  std::vector<FrameFeatures> frames;

  /// "user/session/problem_index"; unique within a dataset.
  std::string id() const;

  friend bool operator==(const Segment&, const Segment&) = default;
};

inline constexpr int kDatasetFormatVersion = 1;

/// First line of a dataset file. A zero embedding dim means the embedding is
/// absent from every frame.
struct DatasetHeader {
  int format_version = kDatasetFormatVersion;
  std::size_t dim_psi = 49;
  std::size_t dim_rho = 8192;
  std::size_t dim_xi = 2622;

  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<Segment> segments;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Checks every segment against the header and the Segment invariants.
/// Throws a data error naming the offending segment.
void validate(const Dataset& dataset);

/// Reads the JSON Lines format; `source` names the stream in error messages.
Dataset read_dataset(std::istream& in, const std::string& source = "<stream>");
void write_dataset(const Dataset& dataset, std::ostream& out);

/// File variants; a ".gz" extension selects gzip compression.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace atlbp::data
