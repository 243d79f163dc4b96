// biasforge command-line driver.
//
//   generate  factor space -> instance manifest
//   screen    manifest -> batch checkpoint (automated screening, human gate)
//   simulate  manifest + planted model -> trial log
//   analyze   trial log -> report.json and CSV tables
//   sgl       instruction + scene -> refined instruction
//   report    report.json -> text tables

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "biasforge/context_builder.hpp"
#include "biasforge/error.hpp"
#include "biasforge/factor_space.hpp"
#include "biasforge/fairness.hpp"
#include "biasforge/manifest.hpp"
#include "biasforge/report.hpp"
#include "biasforge/sgl.hpp"
#include "biasforge/sim_harness.hpp"
#include "biasforge/trial_log.hpp"

namespace fs = std::filesystem;
using namespace biasforge;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kExternal = 3 };

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
  spdlog::info("wrote {}", path.string());
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("biasforge");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("BIASFORGE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour it when asked for
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string space;
  std::vector<std::string> eval_dims;
  std::string factorial;
  std::string context = "baseline";
  std::string out = ".";
};

int run_generate(const GenerateArgs& a) {
  const FactorSpace space = load_space(a.space);
  if (a.eval_dims.empty() && a.factorial.empty()) {
    throw CLI::ValidationError("generate", "give at least one --eval-dim or --factorial");
  }
  ManifestHeader header;
  header.visual_baselines = visual_baselines(space);
  header.context_baseline = context_baseline(space);
  std::vector<TaskInstance> all;
  for (const std::string& dim : a.eval_dims) {
    auto part = task_subspace(space, dim);
    header.evaluated_dims.push_back(dim);
    header.counts.emplace_back(dim, part.size());
    spdlog::info("{}: {} instances", dim, part.size());
    all.insert(all.end(), part.begin(), part.end());
  }
  if (!a.factorial.empty()) {
    const auto comma = a.factorial.find(',');
    if (comma == std::string::npos) {
      throw CLI::ValidationError("--factorial", "expected <dimA,dimB>");
    }
    const std::string i = a.factorial.substr(0, comma);
    const std::string j = a.factorial.substr(comma + 1);
    const EvaluationContext c_star = a.context == "baseline"
                                         ? baseline_factorial_context(space, i, j)
                                         : parse_context(read_text(a.context));
    auto part = factorial_subspace(space, i, j, c_star);
    header.factorial = FactorialRequest{i, j, c_star};
    header.counts.emplace_back(i + " x " + j, part.size());
    spdlog::info("{} x {}: {} instances", i, j, part.size());
    all.insert(all.end(), part.begin(), part.end());
  }
  header.total = all.size();
  const fs::path out(a.out);
  write_text(out / "manifest.jsonl", write_manifest(all));
  write_text(out / "manifest.header.json", serialize_header(header));
  std::cout << all.size() << " instances\n";
  return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string space;
  std::string manifest;
  std::string model;
  std::size_t reps = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string agent = "planted";
  std::string out = ".";
};

int run_simulate(const SimulateArgs& a) {
  SimRunSpec spec;
  spec.model = parse_model(read_text(a.model));
  if (!a.space.empty()) validate_model(spec.model, load_space(a.space));
  spec.subspace = load_manifest(a.manifest);
  spec.repetitions = a.reps;
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.agent_id = a.agent;
  const auto trials = simulate_trials(spec);
  write_text(fs::path(a.out) / "trials.jsonl", write_trials(trials));
  std::cout << trials.size() << " trials\n";
  return kOk;
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string space;
  std::string trials;
  double epsilon = 1e-6;
  std::string out = ".";
};

int run_analyze(const AnalyzeArgs& a) {
  const FactorSpace space = load_space(a.space);
  const auto trials = load_trials(a.trials);
  MetricConfig cfg;
  cfg.epsilon = a.epsilon;
  const BiasReport report = analyze_trials(trials, space, cfg);
  const fs::path out(a.out);
  write_text(out / "report.json", report_json(report));
  write_text(out / "table1.csv", table1_csv(report));
  write_text(out / "iec.csv", iec_csv(report));
  write_text(out / "color_categories.csv", color_category_csv(report));
  const auto tables = build_success_tables(trials);
  for (const AgentReport& agent : report.agents) {
    for (const std::string& w : agent.warnings) spdlog::warn("{}: {}", agent.agent_id, w);
    for (const PairMetrics& p : agent.pairs) {
      write_text(out / ("heatmap_" + agent.agent_id + "_" + p.dim_i + "_" + p.dim_j + ".csv"),
                 heatmap_csv(tables.at(agent.agent_id), space, p.dim_i, p.dim_j));
    }
  }
  std::cout << render_text(report);
  return kOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::string report;
  std::string out;
};

int run_report(const ReportArgs& a) {
  const std::string text = render_text(parse_report(read_text(a.report)));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(fs::path(a.out) / "report.txt", text);
  }
  return kOk;
}

// --- screen -----------------------------------------------------------------

struct ScreenArgs {
  std::string manifest;
  std::string adjudicator;
  std::string checkpoint;
  std::string reviews;
  std::string images;
  std::string batch_id = "batch";
  std::string out = ".";
  std::size_t max_iterations = 10;
  std::size_t consecutive = 1;
  std::size_t concurrency = 8;
  bool no_pause = false;
};

struct PauseForAdjustment {};

std::unique_ptr<AdjudicatorClient> make_client(const std::string& spec,
                                               const std::vector<TaskInstance>& manifest) {
  constexpr std::string_view kMock = "mock:";
  if (spec.rfind(kMock, 0) == 0) {
    std::vector<std::string> ids;
    for (const TaskInstance& t : manifest) ids.push_back(t.instance_id);
    return std::make_unique<ScriptedAdjudicator>(
        ScriptedAdjudicator::from_json(read_text(spec.substr(kMock.size())), ids));
  }
  return std::make_unique<HttpAdjudicator>(spec);
}

void print_state(const BatchState& s) {
  std::cout << "batch " << s.batch_id << ": " << phase_name(s.phase) << " after " << s.iteration
            << " screening(s), pass rate " << s.screening_pass_rate;
  if (s.human_pass_rate) std::cout << ", human pass rate " << *s.human_pass_rate;
  std::cout << "\n";
}

int run_screen(const ScreenArgs& a) {
  const fs::path state_path =
      a.checkpoint.empty() ? fs::path(a.out) / "batch.json" : fs::path(a.checkpoint);
  auto save = [&](const BatchState& s) { write_text(state_path, serialize_state(s)); };

  if (!a.reviews.empty()) {
    BatchState state = parse_state(read_text(state_path));
    state = human_gate(std::move(state), parse_reviews_csv(read_text(a.reviews)), 0.95, save);
    print_state(state);
    return kOk;
  }

  if (a.manifest.empty()) throw CLI::ValidationError("--manifest", "required unless --reviews is given");
  if (a.adjudicator.empty()) throw CLI::ValidationError("--adjudicator", "required unless --reviews is given");
  std::vector<TaskInstance> manifest = load_manifest(a.manifest);
  const bool resume = !a.checkpoint.empty() && fs::exists(state_path);
  BatchState state = resume ? parse_state(read_text(state_path)) : new_batch(a.batch_id, manifest);
  auto client = make_client(a.adjudicator, manifest);

  LoopConfig cfg;
  cfg.max_iterations = a.max_iterations;
  cfg.consecutive_required = a.consecutive;
  cfg.screening.concurrency = a.concurrency;
  cfg.screening.image_root = a.images;

  // The first adjustment after a resume takes the manifest given on the
  // command line as the revision; later ones pause for the operator.
  bool revision_pending = resume && (state.phase == Phase::needs_adjustment || state.phase == Phase::reverted);
  AdjustmentHook hook = [&](const BatchState&, const std::vector<TaskInstance>& current) {
    if (revision_pending || a.no_pause) {
      revision_pending = false;
      return current;
    }
    throw PauseForAdjustment{};
  };

  BatchState last = state;
  auto sink = [&](const BatchState& s) {
    last = s;
    save(s);
  };
  save(state);
  try {
    state = refinement_loop(std::move(state), manifest, *client, cfg, hook, sink);
  } catch (const PauseForAdjustment&) {
    print_state(last);
    std::cout << last.flagged_instances.size() << " flagged; revise the manifest and rerun with --checkpoint "
              << state_path.string() << "\n";
    return kOk;
  }
  print_state(state);
  return kOk;
}

// --- sgl --------------------------------------------------------------------

struct SglArgs {
  std::string instruction;
  std::string scene;
  std::string image;
  std::string parser;
  std::string lexicon;
  std::string out;
};

int run_sgl(const SglArgs& a) {
  std::vector<SceneObject> objects;
  if (!a.scene.empty()) {
    objects = parse_scene_json(read_text(a.scene));
  } else if (!a.image.empty() && !a.parser.empty()) {
    auto client = make_client(a.parser, {});
    objects = parse_scene(a.instruction, a.image, *client);
  } else {
    throw CLI::ValidationError("sgl", "give --scene, or --images with --adjudicator");
  }
  const Lexicon lexicon = a.lexicon.empty() ? default_lexicon() : parse_lexicon(read_text(a.lexicon));
  const SglResult r = ground_instruction(a.instruction, objects, lexicon);
  if (!a.out.empty()) write_text(fs::path(a.out) / "sgl_trace.json", sgl_trace_json(r));
  std::cout << r.refined << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"biasforge: visual-bias benchmark construction and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "biasforge 0.1.0");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Enumerate task instances from a factor space");
  g->add_option("--space", gen.space, "Factor-space JSON")->required()->check(CLI::ExistingFile);
  g->add_option("--eval-dim", gen.eval_dims, "Visual dimension to evaluate (repeatable)");
  g->add_option("--factorial", gen.factorial, "Factorial pair <dimA,dimB>");
  g->add_option("--context", gen.context, "Factorial context: baseline or a JSON file");
  g->add_option("--out", gen.out, "Output directory");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a planted-bias model over a manifest");
  s->add_option("--manifest", sim.manifest, "Instance manifest (JSONL)")->required()->check(CLI::ExistingFile);
  s->add_option("--model", sim.model, "Planted model JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--space", sim.space, "Factor space used to validate the model");
  s->add_option("--reps", sim.reps, "Repetitions per instance")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--threads", sim.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  s->add_option("--agent", sim.agent, "agent_id written to each record");
  s->add_option("--out", sim.out, "Output directory");

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Compute bias metrics from a trial log");
  z->add_option("--space", an.space, "Factor-space JSON")->required()->check(CLI::ExistingFile);
  z->add_option("--trials", an.trials, "Trial log (JSONL)")->required()->check(CLI::ExistingFile);
  z->add_option("--epsilon", an.epsilon, "CCV stabilizer")->check(CLI::NonNegativeNumber);
  z->add_option("--out", an.out, "Output directory");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Render report.json as text tables");
  r->add_option("report", rep.report, "report.json")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rep.out, "Write report.txt here instead of stdout");

  ScreenArgs scr;
  auto* c = app.add_subcommand("screen", "Automated screening loop and human gate");
  c->add_option("--manifest", scr.manifest, "Instance manifest (JSONL)");
  c->add_option("--adjudicator", scr.adjudicator, "http://host[:port]/path or mock:<file>");
  c->add_option("--checkpoint", scr.checkpoint, "Batch state file to resume from and update");
  c->add_option("--reviews", scr.reviews, "Human review CSV; applies the gate to the checkpoint");
  c->add_option("--images", scr.images, "Directory holding <instance_id>.png");
  c->add_option("--batch-id", scr.batch_id, "Id for a new batch");
  c->add_option("--max-iterations", scr.max_iterations, "Screening budget")->check(CLI::PositiveNumber);
  c->add_option("--consecutive", scr.consecutive, "Passing screenings required in a row")
      ->check(CLI::PositiveNumber);
  c->add_option("--concurrency", scr.concurrency, "Parallel adjudication requests")
      ->check(CLI::PositiveNumber);
  c->add_flag("--no-pause", scr.no_pause, "Re-screen without waiting for a revised manifest");
  c->add_option("--out", scr.out, "Output directory for batch.json");

  SglArgs sg;
  auto* l = app.add_subcommand("sgl", "Ground and disambiguate an instruction");
  l->add_option("--instruction", sg.instruction, "Original instruction")->required();
  l->add_option("--scene", sg.scene, "Parsed scene JSON list");
  l->add_option("--images", sg.image, "Image reference sent to the scene parser");
  l->add_option("--adjudicator", sg.parser, "Scene parser endpoint (http://... or mock:<file>)");
  l->add_option("--lexicon", sg.lexicon, "Action lexicon JSON");
  l->add_option("--out", sg.out, "Write sgl_trace.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (g->parsed()) return run_generate(gen);
    if (s->parsed()) return run_simulate(sim);
    if (z->parsed()) return run_analyze(an);
    if (r->parsed()) return run_report(rep);
    if (c->parsed()) return run_screen(scr);
    if (l->parsed()) return run_sgl(sg);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return is_external_failure(e.code()) ? kExternal : kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
