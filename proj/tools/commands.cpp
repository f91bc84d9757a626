#include "commands.hpp"

#include "proto_tqtl/error.hpp"
#include "proto_tqtl/proto/core.hpp"
#include "proto_tqtl/proto/io.hpp"
#include "proto_tqtl/spec_library.hpp"
#include "proto_tqtl/synth.hpp"
#include "proto_tqtl/tqtl/eval.hpp"
#include "proto_tqtl/tqtl/parser.hpp"
#include "proto_tqtl/trace.hpp"
#include "proto_tqtl/trace_gen.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace proto_tqtl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Thrown by commands to exit with a specific code after printing `what()`.
struct Exit {
  int code;
  std::string message;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kInputError, "cannot read " + path.string()};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string robustness_text(tqtl::Robustness r) { return r.is_finite() ? fixed(r.value()) : r.to_string(); }

json robustness_json(tqtl::Robustness r) {
  if (r.is_finite()) return r.value();
  return r.to_string();
}

json group_json(const specs::GroupStats& g) {
  json j = {{"total", g.total}, {"sat", g.sat}, {"unsat", g.unsat}, {"inconclusive", g.inconclusive}};
  if (auto p = g.percent()) {
    j["percent"] = *p;
  } else {
    j["percent"] = nullptr;
  }
  return j;
}

/// Parse + scope-check. Parse errors exit 1, scope errors exit 2.
tqtl::Formula load_spec_file(const fs::path& path) {
  const std::string text = read_text(path);
  tqtl::Formula f;
  try {
    f = tqtl::parse(text);
  } catch (const ParseError& e) {
    throw Exit{kInputError, path.string() + ":" + e.what()};
  }
  const auto errors = tqtl::scope_check(f);
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += path.string() + ": " + e.message() + "\n";
    msg.pop_back();
    throw Exit{kSemanticError, msg};
  }
  return f;
}

// ---------------------------------------------------------------------------

int cmd_spec_check(const std::string& spec_path, std::ostream& out) {
  const tqtl::Formula f = load_spec_file(spec_path);
  out << tqtl::pretty_print(f) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string spec;
  std::vector<std::string> traces;
  std::string trace_dir;
  std::string class_source = "predicted";
  double ceiling = 0.4;
  double drift = 0.1;
  std::int64_t window = 5;
  bool literal_phi1 = false;
  bool json = false;
  bool strict = false;
  unsigned jobs = 1;
};

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  specs::SpecParams params;
  params.similarity_ceiling = opt.ceiling;
  params.drift_bound = opt.drift;
  params.window = opt.window;
  params.literal_phi1 = opt.literal_phi1;
  params.class_source =
      opt.class_source == "ground-truth" ? tqtl::ClassSource::GroundTruth : tqtl::ClassSource::Predicted;

  tqtl::Formula spec;
  if (!fs::exists(opt.spec) && specs::builtin(opt.spec, params)) {
    spec = *specs::builtin(opt.spec, params);
  } else {
    spec = load_spec_file(opt.spec);
  }

  std::vector<fs::path> paths(opt.traces.begin(), opt.traces.end());
  if (!opt.trace_dir.empty()) {
    if (!fs::is_directory(opt.trace_dir)) throw Exit{kInputError, "not a directory: " + opt.trace_dir};
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(opt.trace_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".trace") found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  if (paths.empty()) throw Exit{kInputError, "no traces given (use --trace or --trace-dir)"};

  std::vector<Trace> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths) {
    try {
      traces.push_back(read_trace(p));
    } catch (const Error& e) {
      throw Exit{kInputError, p.string() + ": " + e.what()};
    }
  }
  spdlog::info("verifying {} traces with {} jobs", traces.size(), opt.jobs);

  specs::ReportOptions ropts;
  ropts.eval.class_source = params.class_source;
  ropts.jobs = opt.jobs;
  specs::SatisfactionReport rep;
  try {
    rep = specs::report(spec, traces, ropts);
  } catch (const Error& e) {
    throw Exit{kSemanticError, e.what()};
  }

  if (opt.json) {
    json results = json::array();
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
      const auto& r = rep.results[i];
      results.push_back({{"trace", paths[i].string()},
                         {"video_id", r.video_id},
                         {"ground_truth", std::string(to_string(r.ground_truth))},
                         {"predicted", std::string(to_string(r.predicted))},
                         {"verdict", std::string(tqtl::to_string(r.verdict))},
                         {"robustness", robustness_json(r.robustness)}});
    }
    json doc = {{"spec", tqtl::pretty_print(spec)},
                {"class_source", opt.class_source},
                {"results", std::move(results)},
                {"summary",
                 {{"positive", group_json(rep.positive)},
                  {"negative", group_json(rep.negative)},
                  {"all", group_json(rep.all)}}}};
    out << doc.dump(2) << "\n";
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %-5s %-5s %-12s %s\n", "trace", "truth", "pred", "verdict", "robustness");
    out << line;
    for (const auto& r : rep.results) {
      std::snprintf(line, sizeof line, "%-24s %-5s %-5s %-12s %s\n", r.video_id.c_str(),
                    std::string(to_string(r.ground_truth)).c_str(), std::string(to_string(r.predicted)).c_str(),
                    std::string(tqtl::to_string(r.verdict)).c_str(), robustness_text(r.robustness).c_str());
      out << line;
    }
    out << "\n" << specs::format_table(rep, "satisfied%");
    out << "inconclusive: " << rep.all.inconclusive << "\n";
  }

  if (opt.strict && rep.all.sat != rep.all.total) return kViolations;
  return kOk;
}

// ---------------------------------------------------------------------------

void print_train_config(const proto::TrainConfig& c, std::ostream& out) {
  out << "config:"
      << " lambda_clus=" << c.lambda_clus << " lambda_sep=" << c.lambda_sep << " lambda_div=" << c.lambda_div
      << " s_max=" << c.s_max << " protos_per_class=" << c.protos_per_class << " lr_proto=" << c.lr_proto
      << " lr_fc=" << c.lr_fc << " epochs=" << c.epochs << " projection_period=" << c.projection_period
      << " seed=" << c.seed << " literal_lambda_signs=" << (c.literal_lambda_signs ? "true" : "false") << "\n";
}

std::vector<proto::LatentClip> load_dataset(const std::string& path) {
  try {
    return proto::read_dataset(path);
  } catch (const Error& e) {
    throw Exit{kInputError, path + ": " + e.what()};
  }
}

proto::PrototypeBank load_model(const std::string& path) {
  try {
    return proto::read_model(path);
  } catch (const Error& e) {
    throw Exit{kInputError, path + ": " + e.what()};
  }
}

int cmd_train(const std::string& data, const std::string& model_out, const proto::TrainConfig& cfg, std::ostream& out) {
  print_train_config(cfg, out);
  const auto clips = load_dataset(data);
  const proto::TrainResult r = proto::train(clips, cfg);
  proto::write_model(r.bank, model_out);
  out << "initial_loss=" << fixed(r.initial_loss) << " final_loss=" << fixed(r.final_loss)
      << " train_accuracy=" << fixed(r.final_accuracy, 4) << " projections=" << r.projections << "\n";
  out << "model written to " << model_out << "\n";
  return kOk;
}

int cmd_project(const std::string& model, const std::string& data, std::string model_out, std::ostream& out) {
  if (model_out.empty()) model_out = model;
  out << "config: model=" << model << " data=" << data << " out=" << model_out << "\n";
  const auto bank = load_model(model);
  const auto clips = load_dataset(data);
  const auto projected = proto::project(bank, clips);
  proto::write_model(projected, model_out);
  std::size_t moved = 0;
  for (std::size_t j = 0; j < bank.size(); ++j) moved += bank.prototypes[j].vector != projected.prototypes[j].vector;
  out << "projected " << projected.size() << " prototypes (" << moved << " moved); model written to " << model_out
      << "\n";
  return kOk;
}

struct GenDataOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> clips_per_class;
  std::optional<double> noise;
};

int cmd_gen_data(const GenDataOptions& opt, std::ostream& out) {
  synth::SynthSpec spec;
  try {
    spec = synth::read_synth_spec(opt.config);
  } catch (const Error& e) {
    throw Exit{kInputError, opt.config + ": " + e.what()};
  }
  if (opt.seed) spec.seed = *opt.seed;
  if (opt.clips_per_class) spec.clips_per_class = *opt.clips_per_class;
  if (opt.noise) spec.noise_scale = *opt.noise;
  spec.validate();
  out << "config: " << synth::format_synth_spec(spec) << "\n";
  const auto clips = synth::generate_dataset(spec);
  proto::write_dataset(clips, opt.out);
  out << "wrote " << clips.size() << " clips to " << opt.out << "\n";
  return kOk;
}

struct GenTraceOptions {
  std::string model;
  std::string data;
  std::string out_dir;
  std::size_t frames = 8;
  std::string aggregation = "mean";
};

int cmd_gen_trace(const GenTraceOptions& opt, std::ostream& out) {
  out << "config: model=" << opt.model << " data=" << opt.data << " out_dir=" << opt.out_dir
      << " frames=" << opt.frames << " aggregation=" << opt.aggregation << "\n";
  const auto bank = load_model(opt.model);
  const auto clips = load_dataset(opt.data);
  fs::create_directories(opt.out_dir);

  TraceMetadata meta;
  meta.aggregation = opt.aggregation == "sum" ? Aggregation::Sum : Aggregation::Mean;
  std::size_t written = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::vector<proto::LatentClip> same;
    for (const auto& c : clips) {
      if (c.label() == label_at(k)) same.push_back(c);
    }
    std::string prefix(to_string(label_at(k)));
    std::transform(prefix.begin(), prefix.end(), prefix.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (std::size_t start = 0, video = 0; start < same.size(); start += opt.frames, ++video) {
      const std::size_t n = std::min(opt.frames, same.size() - start);
      char id[64];
      std::snprintf(id, sizeof id, "%s_%03zu", prefix.c_str(), video);
      meta.video_id = id;
      meta.ground_truth = label_at(k);
      const Trace t = generate_trace(std::span(same).subspan(start, n), bank, meta);
      write_trace(t, fs::path(opt.out_dir) / (meta.video_id + ".trace"));
      ++written;
    }
  }
  out << "wrote " << written << " traces to " << opt.out_dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

CLI::Validator positive_real(const std::string& name) {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v > 0.0 && std::isfinite(v)) return {};
        } catch (...) {
        }
        return "value must be a positive real";
      },
      "POSITIVE", name);
}

CLI::Validator unit_interval() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v > 0.0 && v <= 1.0) return {};
        } catch (...) {
        }
        return "value must lie in (0, 1]";
      },
      "(0,1]", "unit_interval");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prototype-similarity trace generation and TQTL verification", "proto-tqtl"};
  app.require_subcommand(1);

  // spec-check
  std::string check_path;
  auto* check = app.add_subcommand("spec-check", "Parse and scope-check a TQTL spec file");
  check->add_option("spec,--spec", check_path, "Spec file")->required();

  // verify
  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Verify traces against a TQTL spec");
  verify->add_option("--spec", vopt.spec, "Spec file, or phi1 / phi2 / phi3 for the built-in specs")->required();
  verify->add_option("--trace", vopt.traces, "Trace file (repeatable)");
  verify->add_option("--trace-dir", vopt.trace_dir, "Directory of *.trace files");
  verify->add_option("--class-source", vopt.class_source, "Label read by class()")
      ->check(CLI::IsMember({"predicted", "ground-truth"}));
  verify->add_option("--ceiling", vopt.ceiling, "Built-in specs: similarity ceiling")->check(unit_interval());
  verify->add_option("--drift", vopt.drift, "Built-in specs: drift bound")->check(positive_real("drift"));
  verify->add_option("--window", vopt.window, "Built-in specs: drift window in frames")
      ->check(CLI::Range(std::int64_t{0}, std::int64_t{1} << 40));
  verify->add_flag("--literal-phi1", vopt.literal_phi1, "Built-in phi1 exactly as printed (audit)");
  verify->add_flag("--json", vopt.json, "Machine-readable output");
  verify->add_flag("--strict", vopt.strict, "Exit 3 unless every trace is SAT");
  verify->add_option("--jobs", vopt.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));

  // train
  proto::TrainConfig tcfg;
  std::string train_data, train_out = "model.jsonl";
  auto* trainc = app.add_subcommand("train", "Train a prototype bank on a latent dataset");
  trainc->add_option("--data", train_data, "Dataset file")->required();
  trainc->add_option("--out", train_out, "Model file to write");
  trainc->add_option("--epochs", tcfg.epochs, "Gradient steps (one per epoch)")->check(CLI::Range(0, 1000000));
  trainc->add_option("--lambda-clus", tcfg.lambda_clus, "Clustering weight");
  trainc->add_option("--lambda-sep", tcfg.lambda_sep, "Separation weight");
  trainc->add_option("--lambda-div", tcfg.lambda_div, "Diversity weight");
  trainc->add_option("--s-max", tcfg.s_max, "Diversity cosine threshold");
  trainc->add_option("--protos-per-class", tcfg.protos_per_class, "Prototypes per class (m_k)")
      ->check(CLI::Range(1, 100000));
  trainc->add_option("--lr-proto", tcfg.lr_proto, "Prototype learning rate")->check(positive_real("lr-proto"));
  trainc->add_option("--lr-fc", tcfg.lr_fc, "Class-connection learning rate")->check(positive_real("lr-fc"));
  trainc->add_option("--projection-period", tcfg.projection_period, "Epochs between projections")
      ->check(CLI::Range(1, 1000000));
  trainc->add_option("--seed", tcfg.seed, "Random seed");
  trainc->add_flag("--literal-lambda-signs", tcfg.literal_lambda_signs, "Use lambda_sep's sign as given");

  // project
  std::string proj_model, proj_data, proj_out;
  auto* projc = app.add_subcommand("project", "Project prototypes onto their nearest same-class patches");
  projc->add_option("--model", proj_model, "Model file")->required();
  projc->add_option("--data", proj_data, "Dataset file")->required();
  projc->add_option("--out", proj_out, "Output model file (default: overwrite --model)");

  // gen-data
  GenDataOptions gdopt;
  auto* gendata = app.add_subcommand("gen-data", "Generate a synthetic latent dataset");
  gendata->add_option("--config", gdopt.config, "Synthetic dataset config (JSON)")->required();
  gendata->add_option("--out", gdopt.out, "Dataset file to write")->required();
  gendata->add_option("--seed", gdopt.seed, "Override the config seed");
  gendata->add_option("--clips-per-class", gdopt.clips_per_class, "Override clips per class");
  gendata->add_option("--noise", gdopt.noise, "Override the noise scale")->check(CLI::Range(0.0, 1e6));

  // gen-trace
  GenTraceOptions gtopt;
  auto* gentrace = app.add_subcommand("gen-trace", "Score latent clips into trace files");
  gentrace->add_option("--model", gtopt.model, "Model file")->required();
  gentrace->add_option("--data", gtopt.data, "Dataset file; same-label clips are chunked into videos")->required();
  gentrace->add_option("--out-dir", gtopt.out_dir, "Directory for <video_id>.trace files")->required();
  gentrace->add_option("--frames", gtopt.frames, "Frames per video")->check(CLI::Range(1, 1000000));
  gentrace->add_option("--aggregation", gtopt.aggregation, "Video-level score aggregation")
      ->check(CLI::IsMember({"mean", "sum"}));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*check) return cmd_spec_check(check_path, out);
    if (*verify) return cmd_verify(vopt, out);
    if (*trainc) return cmd_train(train_data, train_out, tcfg, out);
    if (*projc) return cmd_project(proj_model, proj_data, proj_out, out);
    if (*gendata) return cmd_gen_data(gdopt, out);
    if (*gentrace) return cmd_gen_trace(gtopt, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const InvariantError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

} // namespace proto_tqtl::cli
