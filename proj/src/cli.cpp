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

#include "slicepack/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "slicepack/error.hpp"
#include "slicepack/interpreter.hpp"
#include "slicepack/masking.hpp"
#include "slicepack/model_io.hpp"
#include "slicepack/pipeline.hpp"

namespace slicepack {

namespace {

struct RunConfig {
  std::string model;
  std::string weights;
  std::string masks;
  std::string heuristic;
  double sparsity = -1.0;
  std::string mode;
  std::string strategy = "upscale";
  std::string out_prefix = "slicepack";
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int trials = 8;
  int threads = 0;
  bool allow_fallback = false;
  bool paths_only = false;
  bool per_layer = false;
  bool json = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class NotEquivalent : public Error {
 public:
  using Error::Error;
};

std::string path_for(const RunConfig& c, const char* suffix) { return c.out_prefix + suffix; }

MaskTarget target_of(const RunConfig& c) {
  if (c.mode.empty()) return MaskTarget::kInput;
  auto t = parse_mask_target(c.mode);
  if (!t) throw UsageError("--mode must be input or output");
  return *t;
}

Strategy strategy_of(const RunConfig& c) {
  auto s = parse_strategy(c.strategy);
  if (!s) throw UsageError("--strategy must be upscale, baseline or constrained");
  return *s;
}

ChannelMask generate_masks(const RunConfig& c, const ModelGraph& g, const WeightStore& w, MaskMode mode) {
  auto h = parse_heuristic(c.heuristic);
  if (!h) throw UsageError("unknown heuristic '" + c.heuristic + "' (l1, l2, lamp, random)");
  if (!(c.sparsity >= 0.0 && c.sparsity < 1.0)) throw UsageError("--sparsity must be in [0, 1)");
  MaskOptions o;
  o.sparsity = c.sparsity;
  o.mode = mode;
  o.target = target_of(c);
  o.per_layer = c.per_layer;
  const auto scores = o.target == MaskTarget::kInput ? score_channels(g, w, *h, c.seed) : score_filters(g, w, *h, c.seed);
  return make_masks(g, scores, o);
}

// Masks from --masks or from --heuristic/--sparsity, never both.
ChannelMask obtain_masks(const RunConfig& c, const ModelGraph& g, const WeightStore& w) {
  const bool file = !c.masks.empty();
  const bool gen = !c.heuristic.empty() || c.sparsity >= 0.0;
  if (file == gen) throw UsageError("give either --masks or --heuristic with --sparsity");
  if (gen) {
    if (c.heuristic.empty() || c.sparsity < 0.0) throw UsageError("--heuristic and --sparsity go together");
    const auto mode = strategy_of(c) == Strategy::kConstrained ? MaskMode::kConstrained : MaskMode::kUnconstrained;
    return generate_masks(c, g, w, mode);
  }
  auto m = load_mask(c.masks, g);
  if (!c.mode.empty() && target_of(c) != m.target) throw UsageError("--mode disagrees with the mask file target");
  return m;
}

ExportOptions export_options(const RunConfig& c, Strategy s) {
  ExportOptions o;
  o.strategy = s;
  o.allow_fallback = c.allow_fallback;
  o.exact_layout = !c.paths_only;
  o.policy = c.threads == 1 ? ExecPolicy::kSerial : ExecPolicy::kParallel;
  return o;
}

void print_stats_row(std::ostream& out, const std::string& name, const CopyStats& s) {
  out << std::left << std::setw(14) << name << std::right << std::setw(12) << s.total_reads << std::setw(10)
      << s.copied << std::setw(12) << std::fixed << std::setprecision(4) << s.copied_fraction() << std::setw(16)
      << s.interior_copied << "\n";
  out.unsetf(std::ios::floatfield);
}

void print_stats_header(std::ostream& out, const std::string& first) {
  out << std::left << std::setw(14) << first << std::right << std::setw(12) << "total_reads" << std::setw(10)
      << "copied" << std::setw(12) << "fraction" << std::setw(16) << "interior_copied" << "\n";
}

int cmd_prune(const RunConfig& c, std::ostream& out) {
  auto [g, w] = load_model(c.model, c.weights);
  if (c.heuristic.empty() || c.sparsity < 0.0) throw UsageError("prune needs --heuristic and --sparsity");
  const auto mode = strategy_of(c) == Strategy::kConstrained ? MaskMode::kConstrained : MaskMode::kUnconstrained;
  const auto masks = generate_masks(c, g, w, mode);
  write_text_file(path_for(c, ".masks.json"), serialize_mask(masks));
  out << "achieved sparsity " << achieved_sparsity(g, masks) << "\n";
  return kExitOk;
}

int cmd_export(const RunConfig& c, std::ostream& out) {
  auto [g, w] = load_model(c.model, c.weights);
  const auto masks = obtain_masks(c, g, w);
  const auto result = plan_model(g, masks, export_options(c, strategy_of(c)));
  auto [eg, ew] = apply_plan(result.plan, g, w);
  write_text_file(path_for(c, ".plan.json"), serialize_plan(result.plan));
  write_text_file(path_for(c, ".model.json"), serialize_model(eg));
  write_text_file(path_for(c, ".weights.json"), serialize_weights(ew));
  write_text_file(path_for(c, ".masks.json"), serialize_mask(result.masks));
  print_stats_header(out, "segment");
  for (const auto& s : result.plan.segments) print_stats_row(out, std::to_string(s.segment), s.stats);
  print_stats_row(out, "total", copy_report(result.plan.segments));
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  auto [g, w] = load_model(c.model, c.weights);
  const std::string mask_path = c.masks.empty() ? path_for(c, ".masks.json") : c.masks;
  const auto masks = load_mask(mask_path, g);
  const auto plan_text = read_text_file(path_for(c, ".plan.json"));
  const auto policy = c.threads == 1 ? ExecPolicy::kSerial : ExecPolicy::kParallel;

  std::vector<std::pair<std::string, EquivalenceReport>> reports;
  try {
    const auto plan = parse_plan(plan_text);
    auto [pg, pw] = apply_plan(plan, g, w);
    reports.emplace_back("plan", check_equivalence(g, w, &masks, pg, pw, c.trials, c.tol, c.seed, policy));
  } catch (const ParseError& e) {
    throw NotEquivalent(std::string("plan does not parse: ") + e.what());
  } catch (const PlanError& e) {
    throw NotEquivalent(std::string("plan does not apply: ") + e.what());
  }
  const auto model_path = path_for(c, ".model.json");
  const auto weights_path = path_for(c, ".weights.json");
  if (std::filesystem::exists(model_path) && std::filesystem::exists(weights_path)) {
    try {
      auto [eg, ew] = load_model(model_path, weights_path);
      reports.emplace_back("model", check_equivalence(g, w, &masks, eg, ew, c.trials, c.tol, c.seed, policy));
    } catch (const ParseError& e) {
      throw NotEquivalent(std::string("exported model does not load: ") + e.what());
    } catch (const ValidationError& e) {
      throw NotEquivalent(std::string("exported model does not load: ") + e.what());
    }
  }
  bool ok = true;
  for (const auto& [name, r] : reports) {
    out << name << ": max deviation " << std::setprecision(3) << std::scientific << r.max_deviation
        << " (tolerance " << r.tolerance << ", " << r.trials << " trials) " << (r.passed ? "PASS" : "FAIL") << "\n";
    out.unsetf(std::ios::floatfield);
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitNotEquivalent;
}

int cmd_stats(const RunConfig& c, std::ostream& out) {
  auto [g, w] = load_model(c.model, c.weights);
  const auto masks = obtain_masks(c, g, w);
  const Strategy all[] = {Strategy::kUpscale, Strategy::kBaseline, Strategy::kConstrained};
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  if (!c.json) print_stats_header(out, "strategy");
  for (auto s : all) {
    const auto r = plan_model(g, masks, export_options(c, s));
    const auto st = copy_report(r.plan.segments);
    if (c.json) {
      doc[std::string(to_string(s))] = {{"total_reads", st.total_reads},
                                        {"copied", st.copied},
                                        {"copied_fraction", st.copied_fraction()},
                                        {"interior_copied", st.interior_copied}};
    } else {
      print_stats_row(out, std::string(to_string(s)), st);
    }
  }
  if (c.json) out << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"slicepack: export channel-pruned models with contiguous channel layouts"};
  app.require_subcommand(1);
  RunConfig c;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", c.model, "model file")->required();
    sub->add_option("--weights", c.weights, "weights file")->required();
    sub->add_option("--out-prefix", c.out_prefix, "prefix for files written or read");
    sub->add_option("--threads", c.threads, "OpenMP threads (1 runs serially)");
  };
  auto masks_opts = [&](CLI::App* sub) {
    sub->add_option("--masks", c.masks, "mask file");
    sub->add_option("--heuristic", c.heuristic, "l1, l2, lamp or random");
    sub->add_option("--sparsity", c.sparsity, "fraction of channels to prune");
    sub->add_option("--seed", c.seed, "seed for random scores");
    sub->add_option("--mode", c.mode, "input or output pruning");
    sub->add_option("--strategy", c.strategy, "upscale, baseline or constrained");
    sub->add_flag("--per-layer", c.per_layer, "threshold each layer separately");
  };
  auto* prune = app.add_subcommand("prune", "generate a mask file");
  common(prune);
  masks_opts(prune);
  auto* exp = app.add_subcommand("export", "plan and write the pruned model");
  common(exp);
  masks_opts(exp);
  exp->add_flag("--allow-fallback", c.allow_fallback, "export unsupported segments without reordering");
  exp->add_flag("--paths-only", c.paths_only, "use the path order even where a full search would copy less");
  auto* verify = app.add_subcommand("verify", "check an export against the masked original");
  common(verify);
  verify->add_option("--masks", c.masks, "mask file (default <prefix>.masks.json)");
  verify->add_option("--tol", c.tol, "relative tolerance");
  verify->add_option("--seed", c.seed, "seed for the random inputs");
  verify->add_option("--trials", c.trials, "number of random inputs");
  auto* stats = app.add_subcommand("stats", "compare copy counts across strategies");
  common(stats);
  masks_opts(stats);
  stats->add_flag("--allow-fallback", c.allow_fallback, "count unsupported segments without reordering");
  stats->add_flag("--paths-only", c.paths_only, "use the path order even where a full search would copy less");
  stats->add_flag("--json", c.json, "machine-readable output");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (c.threads > 0) omp_set_num_threads(c.threads);
  try {
    if (*prune) return cmd_prune(c, out);
    if (*exp) return cmd_export(c, out);
    if (*verify) return cmd_verify(c, out);
    return cmd_stats(c, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const UnsupportedTopology& e) {
    err << "error: unsupported topology in " << e.what() << "\n";
    return kExitTopology;
  } catch (const OutputPruningHazard& e) {
    err << "error: unsafe output pruning in " << e.what() << "\n";
    return kExitTopology;
  } catch (const NotEquivalent& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotEquivalent;
  } catch (const PlanError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNotEquivalent;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace slicepack
