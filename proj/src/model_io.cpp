// Copyright 2026 The slicepack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slicepack/model_io.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "slicepack/error.hpp"
#include "json_util.hpp"

namespace slicepack {

using nlohmann::json;

namespace {

json parse_document(std::string_view text, std::string_view what) {
  try {
    json doc = json::parse(text.begin(), text.end());
    if (!doc.is_object()) throw ParseError(std::string(what) + ": top level must be an object");
    if (!doc.contains("version") || !doc["version"].is_number_integer())
      throw ParseError(std::string(what) + ": missing integer version");
    if (doc["version"].get<int>() != kFormatVersion)
      throw ParseError(std::string(what) + ": unsupported version " + doc["version"].dump());
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, std::string_view what) {
  if (!obj.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::vector<int>>)
      detail::require_integers(obj.at(key), std::string(what) + ": field '" + key + "'");
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": field '" + key + "': " + e.what());
  }
}

// `"key": [line, line, ...]` with one compact entry per line.
void write_lines(std::ostringstream& os, const char* key, const std::vector<std::string>& lines, bool last) {
  os << "  \"" << key << "\": [";
  for (std::size_t i = 0; i < lines.size(); ++i) os << (i ? ",\n    " : "\n    ") << lines[i];
  os << (lines.empty() ? "]" : "\n  ]") << (last ? "\n" : ",\n");
}

void write_map(std::ostringstream& os, const char* key, const std::vector<std::pair<std::string, std::string>>& entries,
               bool last) {
  os << "  \"" << key << "\": {";
  for (std::size_t i = 0; i < entries.size(); ++i)
    os << (i ? ",\n    " : "\n    ") << json(entries[i].first).dump() << ": " << entries[i].second;
  os << (entries.empty() ? "}" : "\n  }") << (last ? "\n" : ",\n");
}

}  // namespace

std::string serialize_model(const ModelGraph& graph) {
  std::vector<std::string> layers;
  for (const auto& l : graph.layers) {
    json j = json::object();
    j["id"] = l.id;
    j["kind"] = std::string(to_string(l.kind));
    j["in_channels"] = l.in_channels;
    j["out_channels"] = l.out_channels;
    if (l.kind == LayerKind::kSlice) j["offset"] = l.offset;
    if (l.kind == LayerKind::kGather) j["indices"] = l.indices;
    layers.push_back(j.dump());
  }
  std::vector<std::string> edges;
  for (const auto& e : graph.edges) edges.push_back(json::array({e.src, e.dst}).dump());
  std::ostringstream os;
  os << "{\n  \"version\": " << kFormatVersion << ",\n";
  write_lines(os, "layers", layers, false);
  write_lines(os, "edges", edges, true);
  os << "}\n";
  return os.str();
}

ModelGraph parse_model(std::string_view text) {
  const json doc = parse_document(text, "model");
  ModelGraph g;
  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ParseError("model: missing layers array");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError("model: missing edges array");
  for (const auto& jl : doc["layers"]) {
    if (!jl.is_object()) throw ParseError("model: layer entries must be objects");
    Layer l;
    l.id = field<std::string>(jl, "id", "model layer");
    const auto kind_name = field<std::string>(jl, "kind", "model layer " + l.id);
    auto kind = parse_layer_kind(kind_name);
    if (!kind) throw ParseError("model: layer " + l.id + " has unknown kind '" + kind_name + "'");
    l.kind = *kind;
    l.in_channels = field<int>(jl, "in_channels", "model layer " + l.id);
    l.out_channels = field<int>(jl, "out_channels", "model layer " + l.id);
    if (l.kind == LayerKind::kSlice) l.offset = field<int>(jl, "offset", "model layer " + l.id);
    if (l.kind == LayerKind::kGather) l.indices = field<std::vector<int>>(jl, "indices", "model layer " + l.id);
    g.layers.push_back(std::move(l));
  }
  for (const auto& je : doc["edges"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
      throw ParseError("model: edges must be [src, dst] string pairs");
    g.edges.push_back({je[0].get<std::string>(), je[1].get<std::string>()});
  }
  return g;
}

std::string serialize_weights(const WeightStore& weights) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [id, t] : weights) {
    json j = json::object();
    j["shape"] = t.shape;
    j["data"] = t.data;
    entries.emplace_back(id, j.dump());
  }
  std::ostringstream os;
  os << "{\n  \"version\": " << kFormatVersion << ",\n";
  write_map(os, "tensors", entries, true);
  os << "}\n";
  return os.str();
}

WeightStore parse_weights(std::string_view text) {
  const json doc = parse_document(text, "weights");
  if (!doc.contains("tensors") || !doc["tensors"].is_object()) throw ParseError("weights: missing tensors object");
  WeightStore ws;
  for (const auto& [id, jt] : doc["tensors"].items()) {
    if (!jt.is_object()) throw ParseError("weights: tensor " + id + " must be an object");
    Tensor t;
    t.shape = field<std::vector<std::size_t>>(jt, "shape", "weights tensor " + id);
    if (!jt.contains("data") || !jt["data"].is_array()) throw ParseError("weights: tensor " + id + " missing data");
    t.data.reserve(jt["data"].size());
    for (const auto& v : jt["data"]) {
      if (!v.is_number()) throw ParseError("weights: tensor " + id + " has a non-numeric entry");
      t.data.push_back(v.get<double>());
    }
    ws.emplace(id, std::move(t));
  }
  return ws;
}

std::string serialize_mask(const ChannelMask& mask) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [id, idx] : mask.retained) entries.emplace_back(id, json(idx).dump());
  std::ostringstream os;
  os << "{\n  \"version\": " << kFormatVersion << ",\n";
  os << "  \"target\": " << json(std::string(to_string(mask.target))).dump() << ",\n";
  write_map(os, "retained", entries, true);
  os << "}\n";
  return os.str();
}

ChannelMask parse_mask(std::string_view text) {
  const json doc = parse_document(text, "mask");
  ChannelMask m;
  if (doc.contains("target")) {
    if (!doc["target"].is_string()) throw ParseError("mask: target must be a string");
    auto t = parse_mask_target(doc["target"].get<std::string>());
    if (!t) throw ParseError("mask: unknown target " + doc["target"].dump());
    m.target = *t;
  }
  if (!doc.contains("retained") || !doc["retained"].is_object()) throw ParseError("mask: missing retained object");
  for (const auto& [id, jv] : doc["retained"].items()) {
    try {
      if (!jv.is_array()) throw ParseError("mask: entry " + id + " must be an array");
      detail::require_integers(jv, "mask: entry " + id);
      m.retained.emplace(id, jv.get<std::vector<int>>());
    } catch (const json::exception& e) {
      throw ParseError("mask: entry " + id + ": " + e.what());
    }
  }
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string s;
  for (const auto& d : diags) {
    if (!s.empty()) s += "; ";
    s += d.message;
  }
  return s;
}

std::pair<ModelGraph, WeightStore> load_model(const std::filesystem::path& model_file,
                                              const std::filesystem::path& weights_file) {
  ModelGraph g = parse_model(read_text_file(model_file));
  WeightStore w = parse_weights(read_text_file(weights_file));
  auto diags = validate(g, w);
  if (!diags.empty()) throw ValidationError(format_diagnostics(diags));
  return {std::move(g), std::move(w)};
}

ChannelMask load_mask(const std::filesystem::path& mask_file, const ModelGraph& graph) {
  ChannelMask m = parse_mask(read_text_file(mask_file));
  auto diags = validate_mask(graph, m);
  if (!diags.empty()) throw ValidationError(format_diagnostics(diags));
  return m;
}

}  // namespace slicepack
