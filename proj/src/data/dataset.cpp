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

#include "atlbp/data/dataset.hpp"

#include <zlib.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "atlbp/error.hpp"
#include "json.hpp"

namespace atlbp::data {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void data_error(std::size_t line, const std::string& message) {
  fail(ErrorKind::data, "line " + std::to_string(line) + ": " + message);
}

Vector read_vector(const json& value, std::size_t expected, std::size_t line,
                   const std::string& what) {
  if (!value.is_array()) data_error(line, what + " is not an array");
  if (value.size() != expected) {
    fail(ErrorKind::data, "line " + std::to_string(line) + ": " + what + " has length " +
                              std::to_string(value.size()) + ", header declares " +
                              std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) data_error(line, what + " contains a non-numeric entry");
    out.push_back(v.get<double>());
  }
  if (!numgrad::all_finite(out)) data_error(line, what + " contains a non-finite entry");
  return Vector(std::move(out));
}

DatasetHeader parse_header(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    data_error(1, std::string("malformed header: ") + e.what());
  }
  if (!j.is_object()) data_error(1, "header is not an object");
  DatasetHeader h;
  try {
    h.format_version = j.at("format_version").get<int>();
    h.dim_psi = j.at("dim_psi").get<std::size_t>();
    h.dim_rho = j.value("dim_rho", std::size_t{0});
    h.dim_xi = j.value("dim_xi", std::size_t{0});
  } catch (const json::exception& e) {
    data_error(1, std::string("bad header field: ") + e.what());
  }
  if (h.format_version != kDatasetFormatVersion) {
    data_error(1, "unsupported format_version " + std::to_string(h.format_version));
  }
  if (h.dim_psi == 0) data_error(1, "dim_psi must be positive");
  if (j.contains("labels")) {
    const auto& labels = j["labels"];
    if (!labels.is_array() || labels.size() != kNumOutcomes) {
      fail(ErrorKind::label, "line 1: header labels must list the 7 outcome names");
    }
    for (std::size_t i = 0; i < kNumOutcomes; ++i) {
      if (!labels[i].is_string() || labels[i].get<std::string>() != kOutcomeNames[i]) {
        fail(ErrorKind::label, "line 1: header label " + std::to_string(i) + " must be " +
                                   std::string(kOutcomeNames[i]));
      }
    }
  }
  return h;
}

Segment parse_record(const std::string& text, const DatasetHeader& h, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    data_error(line, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) data_error(line, "record is not an object");

  Segment s;
  try {
    s.user_id = j.at("user_id").get<std::string>();
    s.session_id = j.at("session_id").get<std::string>();
    const auto& pi = j.at("problem_index");
    if (!pi.is_number_integer() || pi.get<long long>() < 0) {
      data_error(line, "problem_index must be a nonnegative integer");
    }
    s.problem_index = pi.get<std::size_t>();
    s.fps = j.at("fps").get<double>();
  } catch (const json::exception& e) {
    data_error(line, std::string("bad record field: ") + e.what());
  }
  const std::string id = s.id();

  const auto outcome_it = j.find("outcome");
  if (outcome_it == j.end() || !outcome_it->is_string()) {
    fail(ErrorKind::label, "line " + std::to_string(line) + ": segment " + id +
                               " has no outcome string");
  }
  const auto label = parse_outcome(outcome_it->get<std::string>());
  if (!label) {
    fail(ErrorKind::label, "line " + std::to_string(line) + ": segment " + id +
                               " has unknown outcome '" + outcome_it->get<std::string>() + "'");
  }
  s.label = *label;

  const auto frames_it = j.find("frames");
  if (frames_it == j.end() || !frames_it->is_array()) {
    data_error(line, "segment " + id + " has no frames array");
  }
  s.frames.reserve(frames_it->size());
  for (std::size_t f = 0; f < frames_it->size(); ++f) {
    const json& fr = (*frames_it)[f];
    const std::string where = "segment " + id + " frame " + std::to_string(f);
    if (!fr.is_object() || !fr.contains("psi")) data_error(line, where + " has no psi");
    FrameFeatures frame;
    frame.psi = read_vector(fr["psi"], h.dim_psi, line, where + " psi");
    if (fr.contains("rho") && !fr["rho"].is_null()) {
      frame.rho = read_vector(fr["rho"], h.dim_rho, line, where + " rho");
    }
    if (fr.contains("xi") && !fr["xi"].is_null()) {
      frame.xi = read_vector(fr["xi"], h.dim_xi, line, where + " xi");
    }
    s.frames.push_back(std::move(frame));
  }
  if (s.frames.empty()) data_error(line, "segment " + id + " has an empty frame list");
  if (!(s.fps > 0.0)) data_error(line, "segment " + id + " has non-positive fps");
  return s;
}

void write_vector(ordered_json& out, const char* key, const Vector& v) {
  out[key] = v.values();
}

std::string read_all_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) fail(ErrorKind::data, "cannot open " + path.string());
  std::string out;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) out.append(buffer, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(file);
  if (failed) fail(ErrorKind::data, "gzip read error in " + path.string());
  return out;
}

bool is_gzip(const std::filesystem::path& path) { return path.extension() == ".gz"; }

}  // namespace

std::string Segment::id() const {
  return user_id + "/" + session_id + "/" + std::to_string(problem_index);
}

void validate(const Dataset& dataset) {
  const DatasetHeader& h = dataset.header;
  std::set<std::string> seen;
  for (const Segment& s : dataset.segments) {
    const std::string id = s.id();
    if (!seen.insert(id).second) {
      fail(ErrorKind::data, "duplicate problem_index in segment " + id);
    }
    if (s.frames.empty()) fail(ErrorKind::data, "segment " + id + " has an empty frame list");
    if (!(s.fps > 0.0)) fail(ErrorKind::data, "segment " + id + " has non-positive fps");
    if (class_index(s.label) >= kNumOutcomes) fail(ErrorKind::label, "segment " + id + " has an invalid label");
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
      const FrameFeatures& fr = s.frames[f];
      const std::string where = "segment " + id + " frame " + std::to_string(f);
      if (fr.psi.size() != h.dim_psi) fail(ErrorKind::data, where + " psi length mismatch");
      if (fr.rho && fr.rho->size() != h.dim_rho) fail(ErrorKind::data, where + " rho length mismatch");
      if (fr.xi && fr.xi->size() != h.dim_xi) fail(ErrorKind::data, where + " xi length mismatch");
      if (!numgrad::all_finite(fr.psi) || (fr.rho && !numgrad::all_finite(*fr.rho)) ||
          (fr.xi && !numgrad::all_finite(*fr.xi))) {
        fail(ErrorKind::data, where + " contains a non-finite value");
      }
    }
  }
}

Dataset read_dataset(std::istream& in, const std::string& source) {
  Dataset dataset;
  std::string line_text;
  std::size_t line = 0;
  bool have_header = false;
  std::set<std::string> seen;
  try {
    while (std::getline(in, line_text)) {
      ++line;
      if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
      if (line_text.find_first_not_of(" \t") == std::string::npos) continue;
      if (!have_header) {
        dataset.header = parse_header(line_text);
        have_header = true;
        continue;
      }
      Segment s = parse_record(line_text, dataset.header, line);
      if (!seen.insert(s.id()).second) {
        data_error(line, "duplicate problem_index in segment " + s.id());
      }
      dataset.segments.push_back(std::move(s));
    }
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.what());
  }
  if (!have_header) fail(ErrorKind::data, source + ": missing header line");
  return dataset;
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  const DatasetHeader& h = dataset.header;
  ordered_json header;
  header["format_version"] = h.format_version;
  header["dim_psi"] = h.dim_psi;
  header["dim_rho"] = h.dim_rho;
  header["dim_xi"] = h.dim_xi;
  header["labels"] = kOutcomeNames;
  out << header.dump() << '\n';

  for (const Segment& s : dataset.segments) {
    ordered_json rec;
    rec["user_id"] = s.user_id;
    rec["session_id"] = s.session_id;
    rec["problem_index"] = s.problem_index;
    rec["outcome"] = std::string(to_string(s.label));
    rec["fps"] = s.fps;
    ordered_json frames = ordered_json::array();
    for (const FrameFeatures& fr : s.frames) {
      ordered_json f;
      write_vector(f, "psi", fr.psi);
      if (fr.rho) write_vector(f, "rho", *fr.rho);
      if (fr.xi) write_vector(f, "xi", *fr.xi);
      frames.push_back(std::move(f));
    }
    rec["frames"] = std::move(frames);
    out << rec.dump() << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  if (is_gzip(path)) {
    std::istringstream in(read_all_gzip(path));
    return read_dataset(in, path.string());
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open " + path.string());
  return read_dataset(in, path.string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  if (is_gzip(path)) {
    std::ostringstream text;
    write_dataset(dataset, text);
    const std::string bytes = text.str();
    gzFile file = gzopen(path.string().c_str(), "wb");
    if (file == nullptr) fail(ErrorKind::data, "cannot write " + path.string());
    const int written = gzwrite(file, bytes.data(), static_cast<unsigned>(bytes.size()));
    gzclose(file);
    if (written != static_cast<int>(bytes.size())) fail(ErrorKind::data, "gzip write error in " + path.string());
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  write_dataset(dataset, out);
  if (!out) fail(ErrorKind::data, "write error in " + path.string());
}

}  // namespace atlbp::data
