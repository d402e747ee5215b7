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

#include "atlbp/model/config.hpp"

#include <string>

#include "atlbp/error.hpp"

namespace atlbp::model {

std::string_view to_string(EmbeddingMode mode) noexcept {
  switch (mode) {
    case EmbeddingMode::none: return "none";
    case EmbeddingMode::affect_only: return "affect";
    case EmbeddingMode::identity_only: return "identity";
    case EmbeddingMode::both: return "both";
  }
  return "?";
}

std::string_view to_string(Pooling pooling) noexcept {
  return pooling == Pooling::last ? "last" : "mean";
}

std::optional<EmbeddingMode> parse_embedding_mode(std::string_view name) noexcept {
  if (name == "none") return EmbeddingMode::none;
  if (name == "affect" || name == "affect_only") return EmbeddingMode::affect_only;
  if (name == "identity" || name == "identity_only") return EmbeddingMode::identity_only;
  if (name == "both") return EmbeddingMode::both;
  return std::nullopt;
}

std::optional<Pooling> parse_pooling(std::string_view name) noexcept {
  if (name == "last") return Pooling::last;
  if (name == "mean") return Pooling::mean;
  return std::nullopt;
}

ModelConfig ModelConfig::for_mode(EmbeddingMode mode) {
  ModelConfig c;
  c.embedding_mode = mode;
  if (mode == EmbeddingMode::affect_only) c.dim_ca = 100;
  if (mode == EmbeddingMode::identity_only) c.dim_cv = 100;
  return c;
}

std::size_t ModelConfig::fused_dim() const noexcept {
  return dim_psi + (uses_affect() ? dim_ca : 0) + (uses_identity() ? dim_cv : 0);
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::config, std::string("invalid model config: ") + what);
  };
  require(dim_psi > 0, "dim_psi must be positive");
  require(!uses_affect() || (dim_rho > 0 && dim_ca > 0), "affect embedding needs dim_rho, dim_ca > 0");
  require(!uses_identity() || (dim_xi > 0 && dim_cv > 0), "identity embedding needs dim_xi, dim_cv > 0");
  require(hidden_units > 0, "hidden_units must be positive");
  require(num_classes >= 2, "num_classes must be at least 2");
  require(num_layers >= 1, "num_layers must be at least 1");
  require(batch_size == 1, "batch_size is fixed to 1");
  require(learning_rate >= 0.0, "learning_rate must be nonnegative");
  require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must lie in [0, 1)");
  require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must lie in [0, 1)");
  require(epsilon > 0.0, "epsilon must be positive");
  require(clip_norm >= 0.0, "clip_norm must be nonnegative");
}

std::size_t parameter_count(const ModelConfig& c) noexcept {
  const std::size_t h = c.hidden_units;
  std::size_t n = 0;
  if (c.uses_affect()) n += c.dim_ca * c.dim_rho + c.dim_ca;
  if (c.uses_identity()) n += c.dim_cv * c.dim_xi + c.dim_cv;
  std::size_t input = c.fused_dim();
  for (std::size_t l = 0; l < c.num_layers; ++l) {
    n += 4 * h * input + 4 * h * h + 4 * h;
    input = h;
  }
  n += c.num_classes * h + c.num_classes;
  return n;
}

}  // namespace atlbp::model
