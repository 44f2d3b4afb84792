// Copyright 2026 The Artigen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "artigen/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <sstream>

#include "artigen/boxcodec.hpp"
#include "artigen/diffusion/checkpoint.hpp"
#include "artigen/diffusion/flow.hpp"
#include "artigen/error.hpp"
#include "artigen/io.hpp"
#include "artigen/metrics.hpp"
#include "artigen/planner.hpp"
#include "artigen/selftest.hpp"
#include "artigen/synthgen.hpp"
#include "artigen/urdf.hpp"
#include "json.hpp"

namespace artigen::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--config", c.config, "key=value file; command-line flags take precedence");
  sub->add_option("--out", c.out, "Output directory");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Fills options that were not given on the command line from a key=value file.
void apply_config(CLI::App* sub, const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw UsageError(path + ": config files cannot nest");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) opt = sub->get_option_no_throw(key);
    if (opt == nullptr) throw UsageError(path + ": unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(path + ": bad value for '" + key + "': " + e.what());
    }
  }
}

void write_run_json(const CLI::App* sub, const Common& c) {
  ordered_json j;
  j["subcommand"] = sub->get_name();
  ordered_json opts = ordered_json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    opts[name] = value;
  }
  j["options"] = opts;
  write_text(fs::path(c.out) / "run.json", j.dump(2) + "\n");
}

fs::path need_out(const Common& c) {
  if (c.out.empty()) throw UsageError("--out is required");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + c.out);
  return c.out;
}

void need(const std::string& value, const char* name) {
  if (value.empty()) throw UsageError(std::string(name) + " is required");
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v[0], v[1], v[2]}); }

ordered_json box_json(const Aabb& b) {
  ordered_json j;
  j["min"] = vec_json(b.min);
  j["max"] = vec_json(b.max);
  return j;
}

Vec3 canon3(const Vec3& v) {
  return {canonical_real(v[0]), canonical_real(v[1]), canonical_real(v[2])};
}

std::string stem_of(const fs::path& p) {
  std::string name = p.filename().string();
  for (const char* suffix : {".blueprint.json", ".json", ".kvox"}) {
    const std::string s(suffix);
    if (name.size() > s.size() && name.ends_with(s)) return name.substr(0, name.size() - s.size());
  }
  return p.stem().string();
}

fs::path asset_dir(const fs::path& dir) {
  return fs::is_directory(dir / "assets") ? dir / "assets" : dir;
}

// --- subcommands ----------------------------------------------------------

struct SynthOpts {
  std::string families = "cabinet_door=2,drawer_chest=2,hinged_lid=1,rotary_knob=2,fixed_handle=1";
  int resolution = kDefaultResolution;
};

void cmd_synth(const SynthOpts& o, const Common& c, std::ostream& out) {
  const fs::path dir = need_out(c);
  const auto samples = generate_dataset(parse_dataset_spec(o.families), c.seed, o.resolution);
  write_dataset(dir, samples, o.families, c.seed, o.resolution);
  out << "wrote " << samples.size() << " assets to " << dir.string() << "\n";
}

struct PlanOpts {
  std::string grid;
  double scale = 1.0;
};

void cmd_plan(const PlanOpts& o, const Common& c, std::ostream& out) {
  need(o.grid, "grid");
  const VoxelGrid g = decode_kvox(read_bytes(o.grid));
  const Plan plan = plan_blueprint(g);
  const std::string tokens = render_tokens(encode_stream(plan.boxes));
  out << tokens << "\n";
  if (c.out.empty()) return;
  const fs::path dir = need_out(c);
  ordered_json j;
  j["boxes"] = ordered_json::array();
  for (const Aabb& b : plan.boxes) j["boxes"].push_back(box_json(b));
  j["parents"] = plan.parents;
  j["joint_types"] = ordered_json::array();
  for (JointType t : plan.joint_types) j["joint_types"].push_back(std::string(to_string(t)));
  write_text(dir / "plan.json", j.dump(2) + "\n");
  write_text(dir / "tokens.txt", tokens + "\n");
  write_text(dir / "plan.blueprint.json", serialize_blueprint(plan_skeleton(plan, o.scale)));
}

struct TokenizeOpts {
  std::string input;
};

void cmd_tokenize(const TokenizeOpts& o, const Common& c, std::ostream& out) {
  need(o.input, "input");
  const Blueprint bp = parse_blueprint(read_text(o.input));
  std::vector<Aabb> boxes;
  for (const Part& p : bp.parts) boxes.push_back(p.bbox);
  const TokenStream tokens = encode_stream(boxes);
  out << render_tokens(tokens) << "\n";
  if (c.out.empty()) return;
  const fs::path dir = need_out(c);
  write_text(dir / "tokens.txt", render_tokens(tokens) + "\n");
  write_bytes(dir / "tokens.bin", to_bytes(tokens));
}

struct DetokenizeOpts {
  std::string input;
  bool binary = false;
};

void cmd_detokenize(const DetokenizeOpts& o, const Common& c, std::ostream& out) {
  need(o.input, "input");
  const TokenStream tokens =
      o.binary ? from_bytes(read_bytes(o.input)) : parse_tokens(read_text(o.input));
  ordered_json j = ordered_json::array();
  for (const Aabb& b : decode_stream(tokens)) j.push_back(box_json(b));
  out << j.dump(2) << "\n";
  if (c.out.empty()) return;
  write_text(need_out(c) / "boxes.json", j.dump(2) + "\n");
}

struct ValidateOpts {
  std::string input;
};

int cmd_validate(const ValidateOpts& o, std::ostream& out) {
  need(o.input, "input");
  const Blueprint bp = parse_blueprint(read_text(o.input));
  const auto violations = validate_blueprint(bp);
  for (const Violation& v : violations) {
    out << to_string(v.code) << "\t" << v.part_index << "\t" << v.message << "\n";
  }
  if (violations.empty()) out << "OK\n";
  return violations.empty() ? kExitOk : kExitData;
}

struct TrainOpts {
  std::string data;
  int steps = 1000;
  diffusion::DenoiserConfig model;
  diffusion::TrainConfig train;
  std::string optimizer = "sgd";
  int log_every = 100;
};

void cmd_train(TrainOpts o, const Common& c, std::ostream& out) {
  need(o.data, "--data");
  const fs::path dir = need_out(c);
  const auto entries = load_dataset(o.data);
  if (entries.empty()) throw Error(Errc::kIo, "no assets in " + o.data);
  o.model.resolution = entries[0].grid.resolution();
  o.model.seed = c.seed;
  o.train.seed = c.seed;
  o.train.steps = o.steps;
  o.train.optimizer =
      o.optimizer == "adam" ? diffusion::Optimizer::kAdam : diffusion::Optimizer::kSgdMomentum;
  std::vector<diffusion::TrainingExample> examples;
  for (const DatasetEntry& e : entries) {
    if (e.grid.resolution() != o.model.resolution) {
      throw Error(Errc::kShapeMismatch, e.id + " has a different grid resolution");
    }
    examples.push_back(diffusion::make_example(e.blueprint, e.grid, o.model.scales, e.id));
  }
  diffusion::Denoiser model(o.model);
  out << "parameters " << model.param_count() << "\n";
  const auto trace = diffusion::train(model, examples, o.train, [&](const diffusion::LossRecord& r) {
    if (o.log_every > 0 && (r.step % o.log_every == 0 || r.step + 1 == o.steps)) {
      out << "step " << r.step << " loss " << r.terms.total << " l_geo " << r.terms.l_geo
          << " l_kine " << r.terms.l_kine << "\n";
    }
  });
  diffusion::save_checkpoint(dir / "model.kvim", model);
  write_text(dir / "loss.csv", diffusion::loss_trace_csv(trace));
}

struct SampleOpts {
  std::string model;
  std::string plan;
  std::string id;
  int steps = 0;
};

void cmd_sample(const SampleOpts& o, const Common& c, std::ostream& out) {
  need(o.model, "--model");
  need(o.plan, "--plan");
  const fs::path dir = need_out(c);
  const diffusion::Denoiser model = diffusion::load_checkpoint(o.model);

  Blueprint bp;
  if (fs::path(o.plan).extension() == ".kvox") {
    bp = plan_skeleton(plan_blueprint(decode_kvox(read_bytes(o.plan))), 1.0);
  } else {
    bp = parse_blueprint(read_text(o.plan));
  }
  const auto cond = diffusion::Condition::from_blueprint(bp);
  const int steps = o.steps > 0 ? o.steps : model.config().sampler_steps;
  const auto result = diffusion::sample(model, cond, steps, c.seed);

  ordered_json joints = ordered_json::array();
  for (std::size_t j = 0; j < result.movable.size(); ++j) {
    Part& part = bp.parts[result.movable[j]];
    ordered_json jj;
    jj["part_index"] = result.movable[j];
    jj["part_id"] = part.part_id;
    jj["type"] = std::string(to_string(part.joint.type));
    if (result.joints[j]) {
      Joint joint = *result.joints[j];
      joint.origin = canon3(joint.origin);
      joint.axis = canon3(joint.axis);
      joint.limits = {canonical_real(joint.limits.first), canonical_real(joint.limits.second)};
      part.joint = joint;
      jj["origin"] = vec_json(joint.origin);
      jj["axis"] = vec_json(joint.axis);
      jj["limits"] = ordered_json::array({joint.limits.first, joint.limits.second});
    } else {
      // Keep a valid placeholder so the blueprint stays exportable.
      part.joint = Joint{.type = part.joint.type,
                         .origin = canon3(part.bbox.center()),
                         .axis = {0.0, 0.0, 1.0},
                         .limits = {0.0, 0.0}};
      jj["error"] = result.joint_errors[j];
      out << "part " << part.part_id << ": " << result.joint_errors[j] << "\n";
    }
    joints.push_back(jj);
  }
  const std::string id = o.id.empty() ? stem_of(o.plan) : o.id;
  write_text(dir / (id + ".blueprint.json"), serialize_blueprint(bp));
  write_bytes(dir / (id + ".kvox"), encode_kvox(result.occupancy));
  write_text(dir / (id + ".joints.json"), joints.dump(2) + "\n");
  out << "sampled " << id << ": " << result.occupancy.occupied() << " voxels, "
      << result.movable.size() << " joints\n";
}

struct EvalOpts {
  std::string pred;
  std::string gt;
  int samples = 2048;
};

std::string csv_row(const std::string& name, const MetricReport& r) {
  std::string row = name;
  for (const auto& v : report_values(r)) row += "," + (v ? format_real(*v) : std::string());
  return row + "\n";
}

void cmd_eval(const EvalOpts& o, const Common& c, std::ostream& out, std::ostream& err) {
  need(o.pred, "--pred");
  need(o.gt, "--gt");
  const fs::path dir = need_out(c);
  const fs::path gt_dir = asset_dir(o.gt);
  const fs::path pred_dir = asset_dir(o.pred);
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".blueprint.json")) ids.push_back(stem_of(e.path()));
  }
  std::sort(ids.begin(), ids.end());

  std::string csv = "asset";
  for (const char* col : kMetricColumns) csv += std::string(",") + col;
  csv += "\n";
  std::vector<MetricReport> reports;
  for (const std::string& id : ids) {
    const fs::path pb = pred_dir / (id + ".blueprint.json");
    if (!fs::exists(pb)) {
      err << "warning: no prediction for " << id << "\n";
      continue;
    }
    const Blueprint gt_bp = parse_blueprint(read_text(gt_dir / (id + ".blueprint.json")));
    const VoxelGrid gt_grid = decode_kvox(read_bytes(gt_dir / (id + ".kvox")));
    const Blueprint pred_bp = parse_blueprint(read_text(pb));
    const VoxelGrid pred_grid = decode_kvox(read_bytes(pred_dir / (id + ".kvox")));
    reports.push_back(evaluate_asset(pred_bp, pred_grid, gt_bp, gt_grid, o.samples, c.seed));
    csv += csv_row(id, reports.back());
  }
  if (reports.empty()) throw Error(Errc::kIo, "no prediction/ground-truth pairs found");
  csv += csv_row("mean", aggregate(reports));
  write_text(dir / "eval.csv", csv);
  out << csv;
}

struct ExportOpts {
  std::string input;
  std::string grid;
};

void cmd_export(const ExportOpts& o, const Common& c, std::ostream& out) {
  need(o.input, "input");
  const fs::path dir = need_out(c);
  const fs::path in(o.input);
  const fs::path grid = o.grid.empty() ? in.parent_path() / (stem_of(in) + ".kvox") : fs::path(o.grid);
  const Blueprint bp = parse_blueprint(read_text(in));
  const UrdfDocument doc = to_urdf(bp, decode_kvox(read_bytes(grid)));
  const std::string xml = serialize_urdf(doc);
  if (!(parse_urdf(xml) == doc)) throw Error(Errc::kXmlSyntax, "exported document does not re-parse");
  write_text(dir / (stem_of(in) + ".urdf"), xml);
  out << "exported " << doc.links.size() << " links, " << doc.joints.size() << " joints\n";
}

int cmd_selftest(const Common& c, std::ostream& out) {
  bool ok = true;
  for (const CheckResult& r : run_selftest(c.seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Articulated asset pipeline: blueprints, box tokens, KineVoxel flow matching, metrics, URDF export."};
  app.name(args.empty() ? "artigen" : fs::path(args[0]).filename().string());
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Common common;

  SynthOpts synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  s_synth->add_option("--families", synth.families, "family=count,... in generation order");
  s_synth->add_option("--resolution", synth.resolution, "Grid resolution R (>= 8)");
  add_common(s_synth, common);

  PlanOpts plan;
  auto* s_plan = app.add_subcommand("plan", "Plan parts and joint types from a .kvox grid");
  s_plan->add_option("grid", plan.grid, "Input .kvox grid");
  s_plan->add_option("--scale", plan.scale, "real_scale_m for the skeleton blueprint");
  add_common(s_plan, common);

  TokenizeOpts tok;
  auto* s_tok = app.add_subcommand("tokenize", "Encode a blueprint's part boxes as tokens");
  s_tok->add_option("input", tok.input, "Blueprint JSON");
  add_common(s_tok, common);

  DetokenizeOpts detok;
  auto* s_detok = app.add_subcommand("detokenize", "Decode a token stream into boxes");
  s_detok->add_option("input", detok.input, "Token text (or bytes with --binary)");
  s_detok->add_flag("--binary", detok.binary, "Input holds raw token bytes");
  add_common(s_detok, common);

  ValidateOpts val;
  auto* s_val = app.add_subcommand("validate", "Lint a blueprint");
  s_val->add_option("input", val.input, "Blueprint JSON");
  add_common(s_val, common);

  TrainOpts train;
  auto* s_train = app.add_subcommand("train", "Train the KineVoxel flow-matching denoiser");
  s_train->add_option("--data", train.data, "Dataset directory written by synth");
  s_train->add_option("--steps", train.steps, "Optimizer steps");
  s_train->add_option("--patch", train.model.patch, "Patch edge in voxels");
  s_train->add_option("--d-model", train.model.d_model, "Transformer width");
  s_train->add_option("--n-layers", train.model.n_layers, "Transformer depth");
  s_train->add_option("--n-heads", train.model.n_heads, "Attention heads");
  s_train->add_option("--mlp-ratio", train.model.mlp_ratio, "MLP hidden width / d_model");
  s_train->add_option("--max-parts", train.model.max_parts, "Largest part count accepted");
  s_train->add_option("--lambda", train.model.lambda_kine, "Kinematic loss weight");
  s_train->add_option("--sampler-steps", train.model.sampler_steps, "Default Euler steps");
  s_train->add_option("--optimizer", train.optimizer, "sgd or adam")
      ->check(CLI::IsMember({"sgd", "adam"}));
  s_train->add_option("--lr", train.train.lr, "Learning rate");
  s_train->add_option("--momentum", train.train.momentum, "SGD momentum / Adam beta1");
  s_train->add_option("--batch-size", train.train.batch_size, "Examples per step");
  s_train->add_option("--grad-clip", train.train.grad_clip, "Global gradient norm clip (<= 0 off)");
  s_train->add_flag("--cosine-decay", train.train.cosine_decay, "Anneal lr to 0 on a cosine schedule");
  s_train->add_option("--ema", train.train.ema_decay, "Weight EMA decay kept as the final model (0 = off)");
  s_train->add_option("--log-every", train.log_every, "Progress line interval (0 = quiet)");
  add_common(s_train, common);

  SampleOpts sample;
  auto* s_sample = app.add_subcommand("sample", "Generate geometry and joints for a plan");
  s_sample->add_option("--model", sample.model, "Checkpoint written by train");
  s_sample->add_option("--plan", sample.plan, "Blueprint JSON or .kvox grid providing the plan");
  s_sample->add_option("--steps", sample.steps, "Euler steps (0 = checkpoint default)");
  s_sample->add_option("--id", sample.id, "Output file stem (default: plan file stem)");
  add_common(s_sample, common);

  EvalOpts eval;
  auto* s_eval = app.add_subcommand("eval", "Score predictions against ground truth");
  s_eval->add_option("--pred", eval.pred, "Directory of predicted <id>.blueprint.json/.kvox");
  s_eval->add_option("--gt", eval.gt, "Ground-truth dataset directory");
  s_eval->add_option("--samples", eval.samples, "Surface points per cloud");
  add_common(s_eval, common);

  ExportOpts exp;
  auto* s_export = app.add_subcommand("export", "Write a URDF for a blueprint and its grid");
  s_export->add_option("input", exp.input, "Blueprint JSON");
  s_export->add_option("--grid", exp.grid, "Labeled .kvox grid (default: sibling file)");
  add_common(s_export, common);

  auto* s_self = app.add_subcommand("selftest", "Run the built-in oracle checks");
  add_common(s_self, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!common.config.empty()) apply_config(sub, common.config);
    int code = kExitOk;
    if (sub == s_synth) cmd_synth(synth, common, out);
    if (sub == s_plan) cmd_plan(plan, common, out);
    if (sub == s_tok) cmd_tokenize(tok, common, out);
    if (sub == s_detok) cmd_detokenize(detok, common, out);
    if (sub == s_val) code = cmd_validate(val, out);
    if (sub == s_train) cmd_train(train, common, out);
    if (sub == s_sample) cmd_sample(sample, common, out);
    if (sub == s_eval) cmd_eval(eval, common, out, err);
    if (sub == s_export) cmd_export(exp, common, out);
    if (sub == s_self) code = cmd_selftest(common, out);
    if (!common.out.empty()) {
      std::error_code ec;
      fs::create_directories(common.out, ec);
      write_run_json(sub, common);
    }
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace artigen::cli
