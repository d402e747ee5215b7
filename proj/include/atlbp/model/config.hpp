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
#include <cstdint>
#include <optional>
#include <string_view>

#include "atlbp/numgrad/adam.hpp"

namespace atlbp::model {

/// Which raw embeddings are compressed and fused next to ψ.
enum class EmbeddingMode { none, affect_only, identity_only, both };

/// How the head reads the top LSTM layer.
enum class Pooling { last, mean };

std::string_view to_string(EmbeddingMode mode) noexcept;
std::string_view to_string(Pooling pooling) noexcept;
std::optional<EmbeddingMode> parse_embedding_mode(std::string_view name) noexcept;
std::optional<Pooling> parse_pooling(std::string_view name) noexcept;

struct ModelConfig {
  std::size_t dim_psi = 49;
  std::size_t dim_rho = 8192;
  std::size_t dim_xi = 2622;
  std::size_t dim_ca = 50;
  std::size_t dim_cv = 50;
  std::size_t hidden_units = 200;
  std::size_t num_classes = 7;
  std::size_t num_layers = 2;

  double learning_rate = 3e-5;
  std::size_t epochs = 30;
  std::size_t personalize_epochs = 30;
  std::size_t batch_size = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // 0 disables global-norm clipping
  std::uint64_t seed = 0;

  EmbeddingMode embedding_mode = EmbeddingMode::both;
  Pooling pooling = Pooling::last;
  bool compress_tanh = false;

  /// Default config for `mode`: a single embedding is compressed to 100
  /// dimensions, both embeddings to 50 each, so the fused size stays 149.
  static ModelConfig for_mode(EmbeddingMode mode);

  bool uses_affect() const noexcept {
    return embedding_mode == EmbeddingMode::affect_only || embedding_mode == EmbeddingMode::both;
  }
  bool uses_identity() const noexcept {
    return embedding_mode == EmbeddingMode::identity_only || embedding_mode == EmbeddingMode::both;
  }

  /// dim_psi + dim_ca·[affect] + dim_cv·[identity]
  std::size_t fused_dim() const noexcept;

  numgrad::AdamOptions adam() const noexcept {
    return {learning_rate, beta1, beta2, epsilon};
  }

  /// Throws a config error on any violated invariant.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Closed-form number of trainable scalars for `config`.
std::size_t parameter_count(const ModelConfig& config) noexcept;

}  // namespace atlbp::model
