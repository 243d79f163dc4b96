// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "biasforge/context_builder.hpp"
#include "biasforge/error.hpp"
#include "biasforge/fairness.hpp"
#include "biasforge/geometry.hpp"
#include "biasforge/metrics.hpp"
#include "biasforge/report.hpp"
#include "biasforge/sgl.hpp"
#include "biasforge/sim_harness.hpp"
#include "spaces.hpp"

namespace fs = std::filesystem;
using namespace biasforge;
using namespace bftest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failed expectations and measured values for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool passed() const { return failures_.empty(); }
  std::string summary() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + ("FAILED " + f);
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. Structured union

void criterion_union(Check& c) {
  const auto t0 = Clock::now();
  const FactorSpace space = build_space(
      {color_dim(4), pose_dim(), position_dim(2, 2), shape_dim({"cube", "cylinder", "pyramid", "sphere"}),
       instruction_dim(3)});
  const auto got = context_union(space);

  // Brute force: every point of the full product, kept when at most one
  // dimension leaves its baseline.
  const std::vector<FactorDimension> dims{position_dim(2, 2), shape_dim({"cube", "cylinder", "pyramid", "sphere"}),
                                          instruction_dim(3)};
  std::set<Assignment> oracle;
  for (const auto& a : dims[0].values)
    for (const auto& b : dims[1].values)
      for (const auto& d : dims[2].values) {
        const int off = (a.id != dims[0].baseline().id) + (b.id != dims[1].baseline().id) +
                        (d.id != dims[2].baseline().id);
        if (off <= 1) oracle.insert({{"position", a.id}, {"shape", b.id}, {"instruction", d.id}});
      }

  std::vector<Assignment> sorted_got(got.begin(), got.end());
  std::sort(sorted_got.begin(), sorted_got.end());
  const std::vector<Assignment> sorted_oracle(oracle.begin(), oracle.end());
  const double secs = seconds_since(t0);
  c.note("size " + std::to_string(got.size()) + ", " + fmt(secs, 4) + " s");
  c.expect(got.size() == 9, "expected 9 assignments");
  c.expect(sorted_got == sorted_oracle, "element-for-element match with brute force");
  c.expect(std::set<Assignment>(got.begin(), got.end()).size() == got.size(), "no duplicates");
  c.expect(secs < 1.0, "runtime < 1 s");
}

// ---------------------------------------------------------------------------
// 2. Subspace cardinalities

void criterion_cardinalities(Check& c) {
  const auto t0 = Clock::now();
  const FactorSpace space = load_space(BIASFORGE_DATA_DIR "/example_space.json");
  const auto insts = task_subspace(space, "color");

  std::set<std::string> ids;
  for (const auto& t : insts) ids.insert(t.instance_id);

  // Nested-loop enumerator: colors outermost, then the union built as
  // baseline + one-dimension sweeps in dimension order.
  const Assignment g = context_baseline(space);
  const Assignment b = visual_baselines(space);
  std::vector<Assignment> contexts{g};
  for (const FactorDimension& d : space.context_dims()) {
    for (const auto& v : d.values) {
      if (v.id == d.baseline().id) continue;
      Assignment a = g;
      a[d.name] = v.id;
      contexts.push_back(a);
    }
  }
  Assignment fixed = b;
  fixed.erase("color");
  std::vector<std::tuple<std::string, Assignment, Assignment>> expected;
  for (const auto& v : space.at("color").values)
    for (const auto& ctx : contexts) expected.emplace_back(v.id, ctx, fixed);

  bool agree = expected.size() == insts.size();
  for (std::size_t k = 0; agree && k < insts.size(); ++k) {
    const auto& [color, ctx, vis] = expected[k];
    agree = insts[k].varied == Assignment{{"color", color}} && insts[k].eval_context.context == ctx &&
            insts[k].eval_context.visual_fixed == vis;
  }

  const FactorSpace grid_space = reference_space(24);
  const auto grid = factorial_subspace(grid_space, "camera_pose", "color",
                                       baseline_factorial_context(grid_space, "camera_pose", "color"));
  std::set<std::string> grid_ids;
  for (const auto& t : grid) grid_ids.insert(t.instance_id);

  const double secs = seconds_since(t0);
  c.note("colors " + std::to_string(space.at("color").values.size()) + ", instances " +
         std::to_string(insts.size()) + ", factorial " + std::to_string(grid.size()) + ", " + fmt(secs, 3) + " s");
  c.expect(space.at("color").values.size() == 141, "141 colors in shipped table");
  c.expect(insts.size() == 141 * 9, "141 x 9 instances");
  c.expect(ids.size() == insts.size(), "pairwise-distinct instance ids");
  c.expect(agree, "nested-loop enumerator agrees");
  c.expect(grid.size() == 504 && grid_ids.size() == 504, "factorial 21 x 24 = 504 distinct");
  c.expect(secs < 5.0, "runtime < 5 s");
}

// ---------------------------------------------------------------------------
// 3. Camera geometry

void criterion_geometry(Check& c) {
  const Vec3 target{0.5, 0.0, 0.0};
  const Vec3 eye{0.0, 0.4, 0.6};
  const CameraPose base{eye, look_at_euler(eye, target)};

  const auto dist = distance_scale_poses(base);
  double worst = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    worst = std::max(worst, std::abs(norm(dist[k].position - dist[0].position) - 0.05 * double(k)));
    if (k > 0) worst = std::max(worst, std::abs(norm(dist[k].position - dist[k - 1].position) - 0.05));
  }
  c.expect(dist.size() == 9, "9 distance poses");
  c.expect(worst <= 1e-9, "spacing 0.05 k within 1e-9");

  const auto grid = euler_perturbations(base);
  std::set<std::pair<long, long>> offsets;
  double grid_err = 0.0;
  for (const auto& p : grid) {
    const double dy = p.euler.yaw - base.euler.yaw;
    const double dp = p.euler.pitch - base.euler.pitch;
    offsets.insert({std::lround(dy), std::lround(dp)});
    grid_err = std::max({grid_err, std::abs(dy - std::round(dy)), std::abs(dp - std::round(dp))});
    c.expect(p.position == base.position && p.euler.roll == base.euler.roll, "grid keeps position and roll");
  }
  std::set<std::pair<long, long>> want;
  for (long y : {-6, 0, 6})
    for (long p : {-6, 0, 6}) want.insert({y, p});
  c.expect(grid.size() == 9 && offsets == want && grid_err <= 1e-9, "9-pose {-6,0,6} yaw x pitch grid");

  const auto orbit = orbit_rings(target, kDefaultOrbitRings);
  double min_dot = 1.0;
  for (const auto& p : orbit) min_dot = std::min(min_dot, dot(forward(p.euler), normalize(target - p.position)));
  c.expect(orbit.size() == 21, "3 x 7 = 21 orbit poses");
  c.expect(min_dot >= 1.0 - 1e-9, "look-at invariant");
  std::ostringstream err;
  err << std::scientific << std::setprecision(2) << worst;
  c.note("spacing error " + err.str() + ", min forward.dir " + fmt(min_dot, 12));
}

// ---------------------------------------------------------------------------
// 4. Metric closed forms

void criterion_metrics(Check& c) {
  const MetricConfig cfg;
  const double half = *ccv_of(std::vector<double>{1.0, 0.0}, cfg);
  const double flat = *ccv_of(std::vector<double>(9, 0.37), cfg);
  const bool na = !ccv_of(std::vector<double>(5, 0.0), cfg).has_value();
  c.note("ccv{1,0} = " + fmt(half, 6) + ", uniform = " + fmt(flat, 6));
  c.expect(std::abs(half - 100.0) <= 0.01, "ccv {1,0} = 100.00 +- 0.01");
  c.expect(flat == 0.0, "uniform exactly 0");
  c.expect(na, "all-zero context is N/A");

  // A dimension with no successes anywhere renders "0.00,N/A".
  const FactorSpace space = build_space({color_dim(3), position_dim(1, 2)});
  const auto insts = task_subspace(space, "color");
  PlantedBiasModel dead;
  dead.base_logit = -1000.0;
  const auto trials = simulate_trials({dead, insts, 3, 1, "dead", 1});
  const std::string csv = table1_csv(analyze_trials(trials, space, cfg));
  c.expect(csv == "agent,color_SR,color_CV,average_SR,average_CV\ndead,0.00,N/A,0.00,N/A\n",
           "CSV prints 0.00,N/A");
}

// ---------------------------------------------------------------------------
// 5. Estimator consistency

PlantedBiasModel color_context_model(const FactorSpace& space) {
  PlantedBiasModel m;
  m.base_logit = 0.6;
  const auto& colors = space.at("color").values;
  for (std::size_t k = 0; k < colors.size(); ++k) {
    m.main_effects[{"color", colors[k].id}] = 1.6 * std::sin(0.9 * double(k)) - 0.2 * double(k % 3);
  }
  m.main_effects[{"shape", "sphere"}] = -0.8;
  m.main_effects[{"position", "p3"}] = 0.5;
  m.main_effects[{"instruction", "i2"}] = -0.4;
  m.interaction_effects[{{"color", colors[3].id}, {"shape", "pyramid"}}] = -1.2;
  return m;
}

void criterion_consistency(Check& c) {
  const auto t0 = Clock::now();
  const FactorSpace space = reference_space(20);
  const auto insts = task_subspace(space, "color");
  const PlantedBiasModel model = color_context_model(space);
  const MetricConfig cfg;
  const double truth = *analytic_metrics(model, insts, space, cfg).agents.at(0).dims.at(0).cv_sr;
  c.expect(insts.size() == 180, "20 colors x 9 contexts");

  const std::map<std::size_t, double> bound{{50, 8.0}, {200, 5.0}, {1000, 3.0}};
  std::string errors;
  for (const auto& [reps, limit] : bound) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto trials = simulate_trials({model, insts, reps, seed, "planted", 8});
      const auto rep = analyze_trials(trials, space, cfg);
      total += std::abs(*rep.agents.at(0).dims.at(0).cv_sr - truth);
    }
    const double mae = total / 10.0;
    errors += (errors.empty() ? "" : ", ") + std::to_string(reps) + ":" + fmt(mae);
    c.expect(mae < limit, "reps " + std::to_string(reps) + " MAE < " + fmt(limit, 0));
  }
  const double secs = seconds_since(t0);
  c.note("analytic CV_SR " + fmt(truth) + ", MAE " + errors + ", " + fmt(secs, 2) + " s");
  c.expect(secs < 60.0, "runtime < 60 s");
}

// ---------------------------------------------------------------------------
// 6. IEC asymmetry

void criterion_asymmetry(Check& c) {
  const FactorSpace space = reference_space(24);
  const auto insts = factorial_subspace(space, "camera_pose", "color",
                                        baseline_factorial_context(space, "camera_pose", "color"));
  // Pose profile a[k]; color j sees it cyclically shifted by j % 3, so every
  // color column holds the same pose SRs while pose decides which colors fail.
  const auto& poses = space.at("camera_pose").values;
  const auto& colors = space.at("color").values;
  std::vector<double> a;
  for (std::size_t k = 0; k < poses.size(); ++k) a.push_back(0.5 + 2.5 * std::sin(2.0 * M_PI * double(k) / 21.0));
  PlantedBiasModel m;
  for (std::size_t k = 0; k < poses.size(); ++k)
    for (std::size_t j = 0; j < colors.size(); ++j)
      m.interaction_effects[{{"camera_pose", poses[k].id}, {"color", colors[j].id}}] = a[(k + j % 3) % a.size()];

  const MetricConfig cfg;
  const PairMetrics truth = analytic_metrics(m, insts, space, cfg).agents.at(0).pairs.at(0);
  const auto trials = simulate_trials({m, insts, 500, 2024, "planted", 8});
  const PairMetrics got = analyze_trials(trials, space, cfg).agents.at(0).pairs.at(0);
  // report pairs follow visual order: dim_i = color, dim_j = camera_pose
  c.expect(truth.dim_i == "color" && truth.dim_j == "camera_pose", "pair orientation");
  const double iec_cp = *got.iec_ij;  // pose modulating color
  const double iec_pc = *got.iec_ji;  // color modulating pose
  c.note("analytic IEC(P;C) " + fmt(*truth.iec_ji, 6) + ", measured IEC(C;P) " + fmt(iec_cp) +
         ", IEC(P;C) " + fmt(iec_pc));
  c.expect(*truth.iec_ji == 0.0, "analytic IEC(P;C) exactly 0");
  c.expect(iec_cp >= 2.0 * iec_pc, "measured IEC(C;P) >= 2 x IEC(P;C)");
}

// ---------------------------------------------------------------------------
// 7. Fairness state machine

std::vector<TaskInstance> numbered(std::size_t n) {
  std::vector<TaskInstance> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016zx", i);
    out[i].instance_id = buf;
  }
  return out;
}

std::vector<std::string> ids_of(const std::vector<TaskInstance>& v) {
  std::vector<std::string> out;
  for (const auto& t : v) out.push_back(t.instance_id);
  return out;
}

BatchState at_review(const std::vector<TaskInstance>& insts) {
  BatchState s = new_batch("gate", insts);
  s.transition(Phase::screening);
  s.transition(Phase::human_review);
  return s;
}

std::vector<Review> reviews(const std::vector<TaskInstance>& insts, std::size_t yes) {
  std::vector<Review> out;
  for (std::size_t i = 0; i < insts.size(); ++i) out.push_back({insts[i].instance_id, i < yes ? Verdict::yes : Verdict::no});
  return out;
}

void criterion_state_machine(Check& c) {
  auto insts = numbered(100);
  LoopConfig cfg;
  cfg.screening.backoff = std::chrono::milliseconds(0);
  const AdjustmentHook keep = [](const BatchState&, const std::vector<TaskInstance>& m) { return m; };

  auto seq = ScriptedAdjudicator::from_flag_rates({0.10, 0.07, 0.04}, ids_of(insts));
  const BatchState done = refinement_loop(new_batch("a", insts), insts, seq, cfg, keep);
  c.expect(done.iteration == 3 && done.phase == Phase::human_review, "[0.10,0.07,0.04] -> 3 iterations, human_review");
  c.note("sequence: " + std::to_string(done.iteration) + " iterations, " + std::string(phase_name(done.phase)));

  auto stuck = ScriptedAdjudicator::from_flag_rates({0.06}, ids_of(insts));
  cfg.max_iterations = 5;
  bool raised = false;
  try {
    refinement_loop(new_batch("b", insts), insts, stuck, cfg, keep);
  } catch (const Error& e) {
    raised = e.code() == Errc::MaxIterationsExceeded;
  }
  c.expect(raised, "constant 0.06 with max 5 raises MaxIterationsExceeded");

  c.expect(human_gate(at_review(insts), reviews(insts, 96)).phase == Phase::accepted, "96/100 accepted");
  c.expect(human_gate(at_review(insts), reviews(insts, 94)).phase == Phase::reverted, "94/100 reverted");

  const std::set<std::pair<Phase, Phase>> edges = {
      {Phase::generated, Phase::screening},        {Phase::screening, Phase::screening},
      {Phase::screening, Phase::needs_adjustment}, {Phase::screening, Phase::human_review},
      {Phase::needs_adjustment, Phase::screening}, {Phase::human_review, Phase::accepted},
      {Phase::human_review, Phase::reverted},      {Phase::reverted, Phase::screening}};
  const Phase all[] = {Phase::generated,    Phase::screening, Phase::needs_adjustment,
                       Phase::human_review, Phase::accepted,  Phase::reverted};
  std::size_t traces = 0;
  std::size_t bad = 0;
  std::function<void(const BatchState&, int)> walk = [&](const BatchState& s, int depth) {
    ++traces;
    for (std::size_t i = 1; i < s.trail.size(); ++i) bad += !edges.contains({s.trail[i - 1], s.trail[i]});
    if (depth == 6) return;
    for (Phase to : all) {
      BatchState next = s;
      try {
        next.transition(to);
      } catch (const Error&) {
        bad += edges.contains({s.phase, to});  // a legal edge was refused
        continue;
      }
      bad += !edges.contains({s.phase, to});
      walk(next, depth + 1);
    }
  };
  walk(new_batch("x", numbered(1)), 0);
  c.note(std::to_string(traces) + " traces of length <= 6");
  c.expect(bad == 0, "no illegal edge in exhaustive traces");
}

// ---------------------------------------------------------------------------
// 8. Adjudication parsing

void criterion_parsing(Check& c) {
  const std::string yes = R"({
  "analysis": "The image clearly shows a small blue pyramid and a yellow box, and both are identifiable.",
  "final_answer": "yes"
})";
  const std::string no = R"({
  "analysis": "The image contains a small pyramid, but the box is red, not yellow.",
  "final_answer": "no"
})";
  c.expect(parse_adjudication(yes).final_answer == Verdict::yes, "example 1 parses to yes");
  c.expect(parse_adjudication(no).final_answer == Verdict::no, "example 2 parses to no");

  const std::vector<std::string> wrapped = {"Here is my answer: " + yes, yes + "\nHope this helps.",
                                            "```json\n" + yes + "\n```", yes + yes, "Answer: yes"};
  std::size_t rejected = 0;
  for (const auto& w : wrapped) {
    try {
      parse_adjudication(w);
    } catch (const Error& e) {
      rejected += e.code() == Errc::ExtraneousText || e.code() == Errc::MalformedJson;
    }
  }
  c.note(std::to_string(rejected) + "/" + std::to_string(wrapped.size()) + " wrapped responses rejected");
  c.expect(rejected == wrapped.size(), "text outside the object is rejected");
}

// ---------------------------------------------------------------------------
// 9. SGL

void criterion_sgl(Check& c) {
  // The three-object scene with the box swapped for a larger red cube, so
  // the instruction is a stacking task.
  const auto stack = parse_scene_json(R"([
    {"ID": 1, "object_type": "manipulation object", "name": "cube",
     "category": ["cube", "geometry", "rectangular shape"], "state": "solid", "color": "red",
     "size": "small", "position": "left"},
    {"ID": 2, "object_type": "receiver object", "name": "cube", "category": ["cube", "rectangular shape"],
     "state": "solid", "color": "red", "size": "big", "position": "right"},
    {"ID": 3, "object_type": "other object", "name": "pyramid", "category": ["pyramid", "geometry"],
     "state": "solid", "color": "blue", "size": "normal", "position": "middle"}])");
  const SglResult r = ground_instruction("stack the cube", stack);
  c.note("\"" + r.refined + "\"");
  c.expect(r.refined == "put the small red cube on the larger cube", "stacking scene refinement");

  const auto twins = parse_scene_json(R"([
    {"ID": 1, "object_type": "manipulation object", "name": "cube", "category": ["cube"],
     "state": "solid", "color": "red", "size": "small", "position": "left"},
    {"ID": 2, "object_type": "other object", "name": "cube", "category": ["cube"],
     "state": "solid", "color": "red", "size": "big", "position": "left"}])");
  const SglResult t = ground_instruction("pick up the cube", twins);
  c.expect(t.target_attributes == std::vector<AttributeChoice>{{Attribute::size, "small"}},
           "two red cubes: only size, color and state skipped");
  c.expect(t.refined == "pick up the small cube", "two red cubes: prefix small");

  auto same = twins;
  same[1].size = SizeClass::small;
  bool indistinguishable = false;
  try {
    ground_instruction("pick up the cube", same);
  } catch (const Error& e) {
    indistinguishable = e.code() == Errc::Indistinguishable;
  }
  c.expect(indistinguishable, "all attributes tied raises Indistinguishable");

  // The verbatim prompt scene: color alone separates the cube.
  const auto prompt_scene = parse_scene_json(R"([
    {"ID": 1, "object_type": "manipulation object", "name": "cube",
     "category": ["cube", "geometry", "rectangular shape"], "state": "solid", "color": "red",
     "size": "small", "position": "left"},
    {"ID": 2, "object_type": "receiver object", "name": "box", "category": ["box", "container", "rectangular shape"],
     "state": "hollow", "color": "yellow", "size": "normal", "position": "right"},
    {"ID": 3, "object_type": "other object", "name": "pyramid", "category": ["pyramid", "geometry"],
     "state": "solid", "color": "blue", "size": "normal", "position": "middle"}])");
  const SglResult p = ground_instruction("Put the small geometry into the box", prompt_scene);
  c.expect(p.refined == "put the red cube into the yellow box", "prompt scene refinement");
}

// ---------------------------------------------------------------------------
// 10. End-to-end determinism

int sh(const std::string& args) {
  const int status = std::system((std::string(BIASFORGE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

void pipeline(const fs::path& dir, unsigned threads, Check& c) {
  const std::string space = BIASFORGE_DATA_DIR "/example_space.json";
  const std::string d = dir.string();
  int rc = sh("generate --space " + space + " --eval-dim color --eval-dim camera_pose --eval-dim camera_euler"
              " --eval-dim dist_scale --factorial camera_pose,color --out " + d + "/gen");
  rc |= sh("simulate --manifest " + d + "/gen/manifest.jsonl --model " BIASFORGE_DATA_DIR "/example_model.json"
           " --space " + space + " --reps 4 --seed 17 --threads " + std::to_string(threads) + " --out " + d + "/sim");
  rc |= sh("analyze --space " + space + " --trials " + d + "/sim/trials.jsonl --out " + d + "/ana");
  rc |= sh("report " + d + "/ana/report.json --out " + d + "/rep");
  c.expect(rc == 0, "pipeline exit codes in " + d);
}

void criterion_determinism(Check& c) {
  const fs::path root = fs::temp_directory_path() / "biasforge_acceptance_e2e";
  fs::remove_all(root);
  pipeline(root / "run1", 1, c);
  pipeline(root / "run2", 1, c);
  pipeline(root / "run8", 8, c);
  const auto a = read_tree(root / "run1");
  const auto b = read_tree(root / "run2");
  const auto t8 = read_tree(root / "run8");
  c.expect(!a.empty() && a == b, "byte-identical artifacts across reruns");
  c.expect(a.contains("sim/trials.jsonl") && a.at("sim/trials.jsonl") == t8.at("sim/trials.jsonl"),
           "1 vs 8 threads identical trial log");
  c.expect(a == t8, "1 vs 8 threads identical downstream artifacts");
  std::size_t bytes = 0;
  for (const auto& [_, v] : a) bytes += v.size();
  c.note(std::to_string(a.size()) + " artifacts, " + std::to_string(bytes) + " bytes");
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"structured union", criterion_union},
      {"subspace cardinalities", criterion_cardinalities},
      {"camera geometry", criterion_geometry},
      {"metric closed forms", criterion_metrics},
      {"estimator consistency", criterion_consistency},
      {"IEC asymmetry", criterion_asymmetry},
      {"fairness state machine", criterion_state_machine},
      {"adjudication parsing", criterion_parsing},
      {"SGL refinement", criterion_sgl},
      {"end-to-end determinism", criterion_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.passed();
    std::cout << "criterion " << (i + 1) << ": " << (c.passed() ? "PASS" : "FAIL") << "  " << criteria[i].first
              << "  (" << c.summary() << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
