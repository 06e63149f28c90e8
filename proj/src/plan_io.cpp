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

#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "json_util.hpp"
#include "slicepack/error.hpp"
#include "slicepack/export_planner.hpp"
#include "slicepack/model_io.hpp"

namespace slicepack {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json to_json(const ExportPlan& p) {
  ordered_json j;
  j["id"] = p.segment;
  j["producers"] = p.producers;
  j["consumers"] = p.consumers;
  j["channel_space"] = p.channel_space;
  j["reorder"] = p.reorder;
  if (p.fallback) j["fallback"] = true;
  j["order"] = p.order;
  j["dropped"] = p.dropped;
  ordered_json perms = ordered_json::object();
  for (const auto& [id, perm] : p.producer_perms) perms[id] = {{"source", perm.source}, {"dropped", perm.dropped}};
  j["producer_perms"] = std::move(perms);
  ordered_json access = ordered_json::object();
  for (const auto& [id, a] : p.access) {
    if (a.mode == ConsumerAccess::Mode::kSlice)
      access[id] = {{"slice", {a.start, a.length}}, {"perm", a.perm}};
    else
      access[id] = {{"gather", a.indices}};
  }
  j["access"] = std::move(access);
  ordered_json pc = ordered_json::object();
  for (const auto& [id, src] : p.per_channel) pc[id] = src;
  j["per_channel"] = std::move(pc);
  j["stats"] = {{"total_reads", p.stats.total_reads},
                {"copied", p.stats.copied},
                {"zero_copy_optimal", p.stats.zero_copy_optimal},
                {"interior_copied", p.stats.interior_copied},
                {"slice_reads", p.stats.slice_reads}};
  return j;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
  try {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::vector<int>>)
      detail::require_integers(obj.at(key), what + ": field '" + key + "'");
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(what + ": field '" + key + "': " + e.what());
  }
}

ExportPlan from_json(const json& j) {
  const std::string what = "plan segment";
  ExportPlan p;
  p.segment = get<int>(j, "id", what);
  const std::string seg = what + " " + std::to_string(p.segment);
  p.producers = get<std::vector<std::string>>(j, "producers", seg);
  p.consumers = get<std::vector<std::string>>(j, "consumers", seg);
  p.channel_space = get<int>(j, "channel_space", seg);
  p.reorder = get<bool>(j, "reorder", seg);
  if (j.contains("fallback")) p.fallback = get<bool>(j, "fallback", seg);
  p.order = get<std::vector<int>>(j, "order", seg);
  p.dropped = get<std::vector<int>>(j, "dropped", seg);
  const auto jperms = get<json>(j, "producer_perms", seg);
  for (const auto& [id, jp] : jperms.items()) {
    p.producer_perms[id] = {get<std::vector<int>>(jp, "source", seg + " producer " + id),
                            get<std::vector<int>>(jp, "dropped", seg + " producer " + id)};
  }
  const auto jaccess = get<json>(j, "access", seg);
  for (const auto& [id, ja] : jaccess.items()) {
    ConsumerAccess a;
    const std::string w = seg + " access " + id;
    if (ja.is_object() && ja.contains("slice")) {
      const auto sl = get<std::vector<int>>(ja, "slice", w);
      if (sl.size() != 2) throw ParseError(w + ": slice must be [start, length]");
      a.start = sl[0];
      a.length = sl[1];
      a.perm = get<std::vector<int>>(ja, "perm", w);
    } else {
      a.mode = ConsumerAccess::Mode::kGather;
      a.indices = get<std::vector<int>>(ja, "gather", w);
    }
    p.access[id] = std::move(a);
  }
  const auto jpc = get<json>(j, "per_channel", seg);
  for (const auto& [id, jv] : jpc.items()) {
    try {
      detail::require_integers(jv, seg + " per_channel " + id);
      p.per_channel[id] = jv.get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw ParseError(seg + " per_channel " + id + ": " + e.what());
    }
  }
  const auto js = get<json>(j, "stats", seg);
  p.stats.total_reads = get<int>(js, "total_reads", seg + " stats");
  p.stats.copied = get<int>(js, "copied", seg + " stats");
  p.stats.zero_copy_optimal = get<int>(js, "zero_copy_optimal", seg + " stats");
  p.stats.interior_copied = get<int>(js, "interior_copied", seg + " stats");
  p.stats.slice_reads = get<int>(js, "slice_reads", seg + " stats");
  return p;
}

}  // namespace

std::string serialize_plan(const ModelPlan& plan) {
  std::ostringstream os;
  os << "{\n  \"version\": " << kFormatVersion << ",\n";
  os << "  \"strategy\": " << json(std::string(to_string(plan.strategy))).dump() << ",\n";
  os << "  \"target\": " << json(std::string(to_string(plan.target))).dump() << ",\n";
  os << "  \"segments\": [";
  for (std::size_t i = 0; i < plan.segments.size(); ++i)
    os << (i ? ",\n    " : "\n    ") << to_json(plan.segments[i]).dump();
  os << (plan.segments.empty() ? "]\n" : "\n  ]\n") << "}\n";
  return os.str();
}

ModelPlan parse_plan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("plan: top level must be an object");
  if (get<int>(doc, "version", "plan") != kFormatVersion) throw ParseError("plan: unsupported version");
  ModelPlan plan;
  const auto strategy = parse_strategy(get<std::string>(doc, "strategy", "plan"));
  if (!strategy) throw ParseError("plan: unknown strategy");
  plan.strategy = *strategy;
  const auto target = parse_mask_target(get<std::string>(doc, "target", "plan"));
  if (!target) throw ParseError("plan: unknown target");
  plan.target = *target;
  const auto segs = get<json>(doc, "segments", "plan");
  if (!segs.is_array()) throw ParseError("plan: segments must be an array");
  for (const auto& js : segs) plan.segments.push_back(from_json(js));
  return plan;
}

}  // namespace slicepack
