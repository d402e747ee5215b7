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

#include "atlbp/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "atlbp/error.hpp"
#include "atlbp/numgrad/tensor.hpp"

namespace atlbp::synth {

namespace {

using data::OutcomeLabel;
using numgrad::Matrix;
using numgrad::Vector;

// Six decimals keeps files compact; the written value is what gets loaded.
double quantize(double x) { return std::round(x * 1e6) / 1e6; }

Vector quantized(std::vector<double> v) {
  for (double& x : v) x = quantize(x);
  return Vector(std::move(v));
}

Matrix random_expansion(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
  Matrix m(rows, cols);
  for (double& v : m.span()) v = dist(rng);
  return m;
}

std::vector<double> expand(const Matrix& a, const std::vector<double>& latent) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out[r] += a(r, c) * latent[c];
  }
  return out;
}

}  // namespace

void SyntheticSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::config, "invalid synthetic spec: " + what);
  };
  require(n_users > 0, "n_users must be positive");
  require(max_sessions_per_user == 1 || max_sessions_per_user == 2, "max_sessions_per_user must be 1 or 2");
  require(two_session_fraction >= 0.0 && two_session_fraction <= 1.0, "two_session_fraction must lie in [0, 1]");
  require(problems_min >= 1 && problems_min <= problems_max, "problems range must satisfy 1 <= min <= max");
  require(frames_min >= 1 && frames_min <= frames_max, "frames range must satisfy 1 <= min <= max");
  require(fps > 0.0, "fps must be positive");
  double total = 0.0;
  for (double p : label_distribution) {
    require(p >= 0.0, "label probabilities must be nonnegative");
    total += p;
  }
  require(std::abs(total - 1.0) < 1e-9, "label distribution must sum to 1");
  require(signal_strength >= 0.0 && baseline_scale >= 0.0 && noise_scale >= 0.0, "scales must be nonnegative");
  require(dim_psi >= kSignalDims, "dim_psi " + std::to_string(dim_psi) + " is below the signal subspace size " +
                                      std::to_string(kSignalDims));
}

double signature(OutcomeLabel label, double u) noexcept {
  switch (label) {
    case OutcomeLabel::ATT: return 2.0 * u - 1.0;
    case OutcomeLabel::GIVEUP: return 1.0 - 2.0 * u;
    case OutcomeLabel::GUESS: return std::exp(-std::pow((u - 0.5) / 0.15, 2));
    case OutcomeLabel::NOTR: return 1.0;
    case OutcomeLabel::SHINT: return std::sin(4.0 * std::numbers::pi * u);
    case OutcomeLabel::SKIP: return std::exp(-std::pow((u - 0.85) / 0.1, 2));
    case OutcomeLabel::SOF: return 0.0;
  }
  return 0.0;
}

data::Dataset generate(const SyntheticSpec& spec) {
  spec.validate();
  data::Dataset out;
  out.header = data::DatasetHeader{data::kDatasetFormatVersion, spec.dim_psi, spec.dim_rho, spec.dim_xi};

  std::mt19937_64 shared(spec.seed);
  constexpr std::size_t latent_dim = kSignalDims + kIdentityDims;
  const Matrix expand_rho = random_expansion(std::max<std::size_t>(spec.dim_rho, 1), latent_dim, shared);
  const Matrix expand_xi = random_expansion(std::max<std::size_t>(spec.dim_xi, 1), latent_dim, shared);

  // Session layout comes from the shared stream so target_segments can be met exactly.
  std::vector<std::size_t> sessions_of(spec.n_users, 1);
  if (spec.max_sessions_per_user == 2) {
    const auto n_two = static_cast<std::size_t>(std::llround(spec.two_session_fraction * static_cast<double>(spec.n_users)));
    std::vector<std::size_t> users(spec.n_users);
    for (std::size_t u = 0; u < spec.n_users; ++u) users[u] = u;
    std::shuffle(users.begin(), users.end(), shared);
    for (std::size_t i = 0; i < std::min(n_two, spec.n_users); ++i) sessions_of[users[i]] = 2;
  }
  std::size_t n_sessions = 0;
  for (std::size_t s : sessions_of) n_sessions += s;
  std::vector<std::size_t> problems(n_sessions);
  if (spec.target_segments > 0) {
    if (spec.target_segments < n_sessions) {
      fail(ErrorKind::config, "invalid synthetic spec: target_segments is below the session count");
    }
    for (std::size_t i = 0; i < n_sessions; ++i) {
      problems[i] = spec.target_segments / n_sessions + (i < spec.target_segments % n_sessions ? 1 : 0);
    }
    std::shuffle(problems.begin(), problems.end(), shared);
  } else {
    std::uniform_int_distribution<std::size_t> count(spec.problems_min, spec.problems_max);
    for (std::size_t& p : problems) p = count(shared);
  }

  std::size_t session_cursor = 0;
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(u)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> baseline_dist(0.0, 1.0);
    std::normal_distribution<double> noise_dist(0.0, 1.0);
    std::discrete_distribution<int> label_dist(spec.label_distribution.begin(), spec.label_distribution.end());
    std::uniform_int_distribution<std::size_t> frame_count(spec.frames_min, spec.frames_max);

    std::vector<double> baseline(spec.dim_psi);
    for (double& b : baseline) b = spec.baseline_scale * baseline_dist(rng);
    std::array<double, kIdentityDims> identity{};
    for (double& v : identity) v = spec.baseline_scale * baseline_dist(rng);

    char user_id[32];
    std::snprintf(user_id, sizeof(user_id), "u%03zu", u);
    for (std::size_t s = 0; s < sessions_of[u]; ++s) {
      const std::size_t n_problems = problems[session_cursor++];
      for (std::size_t p = 0; p < n_problems; ++p) {
        data::Segment seg;
        seg.user_id = user_id;
        seg.session_id = "s" + std::to_string(s);
        seg.problem_index = p;
        seg.label = static_cast<OutcomeLabel>(label_dist(rng));
        seg.fps = spec.fps;
        const std::size_t n_frames = frame_count(rng);
        const std::size_t channel = data::class_index(seg.label);
        for (std::size_t t = 0; t < n_frames; ++t) {
          const double rel = (static_cast<double>(t) + 0.5) / static_cast<double>(n_frames);
          const double level = spec.signal_strength * signature(seg.label, rel);

          std::vector<double> psi(spec.dim_psi);
          for (std::size_t d = 0; d < spec.dim_psi; ++d) {
            psi[d] = baseline[d] + spec.noise_scale * noise_dist(rng);
          }
          psi[channel] += level;

          std::vector<double> latent(latent_dim, 0.0);
          for (std::size_t d = 0; d < kSignalDims; ++d) {
            latent[d] = baseline[d] + spec.noise_scale * noise_dist(rng);
          }
          latent[channel] += level;
          for (std::size_t d = 0; d < kIdentityDims; ++d) latent[kSignalDims + d] = identity[d];

          data::FrameFeatures frame;
          frame.psi = quantized(std::move(psi));
          if (spec.dim_rho > 0) frame.rho = quantized(expand(expand_rho, latent));
          if (spec.dim_xi > 0) frame.xi = quantized(expand(expand_xi, latent));
          seg.frames.push_back(std::move(frame));
        }
        out.segments.push_back(std::move(seg));
      }
    }
  }
  return out;
}

DatasetSummary describe(const data::Dataset& dataset) {
  DatasetSummary s;
  std::set<std::string> users;
  std::set<std::pair<std::string, std::string>> sessions;
  s.segments = dataset.segments.size();
  for (const data::Segment& seg : dataset.segments) {
    users.insert(seg.user_id);
    sessions.insert({seg.user_id, seg.session_id});
    ++s.label_histogram[data::class_index(seg.label)];
    const std::size_t n = seg.frames.size();
    s.frames_total += n;
    if (s.frames_min == 0 || n < s.frames_min) s.frames_min = n;
    s.frames_max = std::max(s.frames_max, n);
  }
  s.users = users.size();
  s.sessions = sessions.size();
  s.frames_mean = s.segments > 0 ? static_cast<double>(s.frames_total) / static_cast<double>(s.segments) : 0.0;
  return s;
}

nlohmann::ordered_json to_json(const DatasetSummary& s) {
  nlohmann::ordered_json j;
  j["users"] = s.users;
  j["sessions"] = s.sessions;
  j["segments"] = s.segments;
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < data::kNumOutcomes; ++i) hist[std::string(data::kOutcomeNames[i])] = s.label_histogram[i];
  j["label_histogram"] = std::move(hist);
  j["frames_total"] = s.frames_total;
  j["frames_min"] = s.frames_min;
  j["frames_max"] = s.frames_max;
  j["frames_mean"] = s.frames_mean;
  return j;
}

}  // namespace atlbp::synth
