#include "biasforge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "biasforge/context_builder.hpp"
#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

std::size_t visual_rank(const FactorSpace& space, const std::string& dim) {
  const auto& dims = space.visual_dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].name == dim) return i;
  }
  return dims.size();
}

// Warn about contexts that lack some values of the varied dimension.
void check_coverage(const RateTable& cells, const FactorDimension& dim, std::string_view label,
                    std::vector<std::string>& warnings) {
  std::map<std::string, std::size_t> per_group;
  for (const auto& [key, _] : cells) {
    std::string group = key.context_key;
    for (const auto& [d, v] : key.varied) {
      if (d != dim.name) group += "|" + d + "=" + v;
    }
    ++per_group[group];
  }
  for (const auto& [group, n] : per_group) {
    if (n < dim.values.size()) {
      warnings.push_back(std::string(label) + ": " + std::to_string(n) + " of " +
                         std::to_string(dim.values.size()) + " '" + dim.name +
                         "' values observed at " + group);
    }
  }
}

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ordered_json opt_to(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_percent(std::optional<double> value) {
  if (!value) return "N/A";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", *value);
  return buf;
}

AgentReport analyze_rates(const RateTable& table, const FactorSpace& space,
                          const MetricConfig& cfg, std::string agent_id, std::size_t trials) {
  AgentReport out;
  out.agent_id = std::move(agent_id);
  out.trials = trials;

  for (const FactorDimension& dim : space.visual_dims()) {
    const RateTable cells = slice(table, {dim.name});
    if (cells.empty()) continue;
    DimensionMetrics m;
    m.dim = dim.name;
    m.mu_sr = mean_success_rate(cells);
    m.cv_sr = bias_coefficient(cells, dim.name, cfg);
    m.cells = cells.size();
    std::set<std::string_view> contexts;
    for (const auto& [key, _] : cells) contexts.insert(key.context_key);
    m.contexts = contexts.size();
    check_coverage(cells, dim, dim.name, out.warnings);
    out.dims.push_back(std::move(m));
  }

  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [key, _] : table) {
    if (key.varied.size() != 2) continue;
    std::string a = key.varied.begin()->first;
    std::string b = std::next(key.varied.begin())->first;
    if (visual_rank(space, b) < visual_rank(space, a)) std::swap(a, b);
    pairs.emplace(std::move(a), std::move(b));
  }
  std::vector<std::pair<std::string, std::string>> ordered(pairs.begin(), pairs.end());
  std::sort(ordered.begin(), ordered.end(), [&](const auto& x, const auto& y) {
    return std::pair{visual_rank(space, x.first), visual_rank(space, x.second)} <
           std::pair{visual_rank(space, y.first), visual_rank(space, y.second)};
  });
  for (const auto& [i, j] : ordered) {
    const RateTable cells = slice(table, {i, j});
    PairMetrics p;
    p.dim_i = i;
    p.dim_j = j;
    p.mu_sr = mean_success_rate(cells);
    p.cv_i = factorial_bias(cells, i, j, cfg);
    p.iec_ij = interaction_effect(cells, i, j, cfg);
    p.cv_j = factorial_bias(cells, j, i, cfg);
    p.iec_ji = interaction_effect(cells, j, i, cfg);
    p.cells = cells.size();
    const std::string label = i + "x" + j;
    if (const FactorDimension* di = space.find(i)) check_coverage(cells, *di, label, out.warnings);
    out.pairs.push_back(std::move(p));
  }

  if (const FactorDimension* color = space.dimension_with(PayloadKind::color)) {
    const RateTable cells = slice(table, {color->name});
    if (!cells.empty()) {
      out.color_categories = color_category_summary(cells, *color, categorize_color);
    }
  }
  return out;
}

void validate_trials(std::span<const TrialRecord> trials, const FactorSpace& space) {
  auto fail = [](std::size_t index, const std::string& why) {
    throw Error(Errc::InconsistentLog, "trial #" + std::to_string(index + 1) + ": " + why);
  };
  auto check_values = [&](std::size_t index, const Assignment& a, DimensionKind kind) {
    for (const auto& [dim, value] : a) {
      const FactorDimension* d = space.find(dim);
      if (d == nullptr || d->kind != kind) {
        fail(index, "'" + dim + "' is not a " + std::string(dimension_kind_name(kind)) +
                        " dimension of the space");
      }
      if (d->find(value) == nullptr) fail(index, "unknown value '" + value + "' for '" + dim + "'");
    }
  };
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const TrialRecord& t = trials[i];
    EvaluationContext ctx;
    try {
      ctx = parse_context_key(t.context_key);
    } catch (const Error& e) {
      fail(i, e.what());
    }
    check_values(i, t.varied, DimensionKind::visual);
    check_values(i, ctx.visual_fixed, DimensionKind::visual);
    check_values(i, ctx.context, DimensionKind::context);
    if (instance_id_for(t.varied, ctx) != t.instance_id) {
      fail(i, "unknown instance id '" + t.instance_id + "'");
    }
  }
}

BiasReport analyze_trials(std::span<const TrialRecord> trials, const FactorSpace& space,
                          const MetricConfig& cfg) {
  if (trials.empty()) throw Error(Errc::EmptyLog, "trial log has no records");
  validate_trials(trials, space);
  BiasReport report;
  report.config = cfg;
  for (const auto& [agent, table] : build_success_tables(trials)) {
    std::size_t n = 0;
    for (const auto& [_, tally] : table.cells) n += static_cast<std::size_t>(tally.trials);
    report.agents.push_back(analyze_rates(rates(table), space, cfg, agent, n));
  }
  return report;
}

std::string report_json(const BiasReport& report) {
  ordered_json doc;
  doc["format"] = kReportFormat;
  doc["config"] = {{"epsilon", report.config.epsilon},
                   {"degenerate_policy", report.config.degenerate_policy ==
                                                 DegeneratePolicy::report_na
                                             ? "report_na"
                                             : "report_zero"},
                   {"scale", "percent"}};
  ordered_json agents = ordered_json::array();
  for (const AgentReport& a : report.agents) {
    ordered_json ja;
    ja["agent_id"] = a.agent_id;
    ja["trials"] = a.trials;
    ordered_json dims = ordered_json::array();
    for (const DimensionMetrics& d : a.dims) {
      dims.push_back({{"dim", d.dim},
                      {"mu_sr", d.mu_sr},
                      {"cv_sr", opt_to(d.cv_sr)},
                      {"cells", d.cells},
                      {"contexts", d.contexts}});
    }
    ja["dims"] = std::move(dims);
    ordered_json pairs = ordered_json::array();
    for (const PairMetrics& p : a.pairs) {
      pairs.push_back({{"dim_i", p.dim_i},
                       {"dim_j", p.dim_j},
                       {"mu_sr", p.mu_sr},
                       {"cv_i", opt_to(p.cv_i)},
                       {"iec_ij", opt_to(p.iec_ij)},
                       {"cv_j", opt_to(p.cv_j)},
                       {"iec_ji", opt_to(p.iec_ji)},
                       {"cells", p.cells}});
    }
    ja["pairs"] = std::move(pairs);
    ordered_json cats = ordered_json::object();
    for (const auto& [c, v] : a.color_categories) cats[c] = v;
    ja["color_categories"] = std::move(cats);
    ja["warnings"] = a.warnings;
    agents.push_back(std::move(ja));
  }
  doc["agents"] = std::move(agents);
  return doc.dump(2) + "\n";
}

BiasReport parse_report(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "report");
  detail::check_format(doc, kReportFormat, "$");
  BiasReport r;
  const json& cfg = detail::require(doc, "config", "$");
  r.config.epsilon = detail::require_number(cfg, "epsilon", "$.config");
  r.config.degenerate_policy = detail::require_string(cfg, "degenerate_policy", "$.config") ==
                                       "report_zero"
                                   ? DegeneratePolicy::report_zero
                                   : DegeneratePolicy::report_na;
  const json& agents = detail::require(doc, "agents", "$");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const json& ja = agents[k];
    const std::string path = "$.agents[" + std::to_string(k) + "]";
    AgentReport a;
    a.agent_id = detail::require_string(ja, "agent_id", path);
    a.trials = static_cast<std::size_t>(detail::require_integer(ja, "trials", path));
    for (const json& d : detail::require(ja, "dims", path)) {
      a.dims.push_back({detail::require_string(d, "dim", path), d.at("mu_sr").get<double>(),
                        opt_from(d.at("cv_sr")), d.at("cells").get<std::size_t>(),
                        d.at("contexts").get<std::size_t>()});
    }
    for (const json& p : detail::require(ja, "pairs", path)) {
      a.pairs.push_back({p.at("dim_i").get<std::string>(), p.at("dim_j").get<std::string>(),
                         p.at("mu_sr").get<double>(), opt_from(p.at("cv_i")),
                         opt_from(p.at("iec_ij")), opt_from(p.at("cv_j")),
                         opt_from(p.at("iec_ji")), p.at("cells").get<std::size_t>()});
    }
    for (const auto& [c, v] : detail::require(ja, "color_categories", path).items()) {
      a.color_categories.emplace(c, v.get<double>());
    }
    for (const json& w : detail::require(ja, "warnings", path)) a.warnings.push_back(w.get<std::string>());
    r.agents.push_back(std::move(a));
  }
  return r;
}

namespace {

std::vector<std::string> report_dims(const BiasReport& report) {
  std::vector<std::string> dims;
  for (const AgentReport& a : report.agents) {
    for (const DimensionMetrics& d : a.dims) {
      if (std::find(dims.begin(), dims.end(), d.dim) == dims.end()) dims.push_back(d.dim);
    }
  }
  return dims;
}

const DimensionMetrics* find_dim(const AgentReport& a, const std::string& dim) {
  for (const DimensionMetrics& d : a.dims) {
    if (d.dim == dim) return &d;
  }
  return nullptr;
}

struct Row {
  std::string agent;
  std::vector<std::optional<double>> values;
};

// SR, CV per dimension, then averages.
std::vector<Row> table1_rows(const BiasReport& report, const std::vector<std::string>& dims) {
  std::vector<Row> rows;
  for (const AgentReport& a : report.agents) {
    Row row{a.agent_id, {}};
    std::vector<double> srs;
    std::vector<double> cvs;
    for (const std::string& dim : dims) {
      const DimensionMetrics* d = find_dim(a, dim);
      row.values.push_back(d ? std::optional<double>(d->mu_sr) : std::nullopt);
      row.values.push_back(d ? d->cv_sr : std::nullopt);
      if (d) srs.push_back(d->mu_sr);
      if (d && d->cv_sr) cvs.push_back(*d->cv_sr);
    }
    auto mean = [](const std::vector<double>& v) -> std::optional<double> {
      if (v.empty()) return std::nullopt;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    row.values.push_back(mean(srs));
    row.values.push_back(mean(cvs));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string table1_csv(const BiasReport& report) {
  const auto dims = report_dims(report);
  std::string out = "agent";
  for (const std::string& d : dims) out += "," + csv_field(d + "_SR") + "," + csv_field(d + "_CV");
  out += ",average_SR,average_CV\n";
  for (const Row& row : table1_rows(report, dims)) {
    out += csv_field(row.agent);
    for (const auto& v : row.values) out += "," + format_percent(v);
    out += '\n';
  }
  return out;
}

std::string iec_csv(const BiasReport& report) {
  std::string out = "agent,dim_i,dim_j,mu_sr,cv_i,iec_ij,cv_j,iec_ji\n";
  for (const AgentReport& a : report.agents) {
    for (const PairMetrics& p : a.pairs) {
      out += csv_field(a.agent_id) + "," + csv_field(p.dim_i) + "," + csv_field(p.dim_j) + "," +
             format_percent(p.mu_sr) + "," + format_percent(p.cv_i) + "," +
             format_percent(p.iec_ij) + "," + format_percent(p.cv_j) + "," +
             format_percent(p.iec_ji) + "\n";
    }
  }
  return out;
}

std::string color_category_csv(const BiasReport& report) {
  std::string out = "agent,category,mean_sr\n";
  for (const AgentReport& a : report.agents) {
    for (const auto& [c, v] : a.color_categories) {
      out += csv_field(a.agent_id) + "," + csv_field(c) + "," + format_percent(v) + "\n";
    }
  }
  return out;
}

std::string heatmap_csv(const SuccessTable& table, const FactorSpace& space,
                        std::string_view dim_i, std::string_view dim_j) {
  const FactorDimension& di = space.at(dim_i);
  const FactorDimension& dj = space.at(dim_j);
  std::map<std::pair<std::string, std::string>, std::int64_t> counts;
  for (const auto& [key, tally] : table.cells) {
    if (key.varied.size() != 2) continue;
    auto it = key.varied.find(di.name);
    auto jt = key.varied.find(dj.name);
    if (it == key.varied.end() || jt == key.varied.end()) continue;
    counts[{it->second, jt->second}] += tally.successes;
  }
  std::string out = csv_field(di.name + "\\" + dj.name);
  for (const FactorValue& vj : dj.values) out += "," + csv_field(vj.id);
  out += '\n';
  for (const FactorValue& vi : di.values) {
    out += csv_field(vi.id);
    for (const FactorValue& vj : dj.values) {
      auto it = counts.find({vi.id, vj.id});
      out += "," + (it == counts.end() ? std::string("0") : std::to_string(it->second));
    }
    out += '\n';
  }
  return out;
}

namespace {

// Lays out a text table; columns flagged in `starred` get '*' on their
// minimum when there are at least two rows.
std::string layout(const std::vector<std::string>& header, const std::vector<Row>& rows,
                   const std::vector<bool>& starred) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back(header);
  std::vector<std::optional<double>> best(header.size() - 1);
  if (rows.size() >= 2) {
    for (std::size_t c = 0; c + 1 < header.size(); ++c) {
      if (!starred[c]) continue;
      for (const Row& r : rows) {
        if (r.values[c] && (!best[c] || *r.values[c] < *best[c])) best[c] = r.values[c];
      }
    }
  }
  for (const Row& r : rows) {
    std::vector<std::string> line{r.agent};
    for (std::size_t c = 0; c < r.values.size(); ++c) {
      std::string cell = format_percent(r.values[c]);
      if (best[c] && r.values[c] && format_percent(r.values[c]) == format_percent(best[c])) {
        cell += "*";
      }
      line.push_back(std::move(cell));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      const std::string& cell = grid[r][c];
      if (c == 0) {
        out += cell + std::string(width[c] - cell.size(), ' ');
      } else {
        out += "  " + std::string(width[c] - cell.size(), ' ') + cell;
      }
    }
    out += '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c == 0 ? 0 : 2);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

}  // namespace

std::string render_text(const BiasReport& report) {
  std::string out;
  const auto dims = report_dims(report);
  if (!dims.empty()) {
    std::vector<std::string> header{"agent"};
    std::vector<bool> starred;
    for (const std::string& d : dims) {
      header.push_back(d + " SR");
      header.push_back(d + " CV");
      starred.push_back(false);
      starred.push_back(true);
    }
    header.push_back("avg SR");
    header.push_back("avg CV");
    starred.push_back(false);
    starred.push_back(true);
    out += "Success rate (SR) and bias coefficient (CV), percent\n";
    out += layout(header, table1_rows(report, dims), starred);
  }

  std::set<std::pair<std::string, std::string>> pair_names;
  for (const AgentReport& a : report.agents) {
    for (const PairMetrics& p : a.pairs) pair_names.emplace(p.dim_i, p.dim_j);
  }
  for (const auto& [i, j] : pair_names) {
    std::vector<Row> rows;
    for (const AgentReport& a : report.agents) {
      for (const PairMetrics& p : a.pairs) {
        if (p.dim_i == i && p.dim_j == j) {
          rows.push_back({a.agent_id, {p.cv_i, p.iec_ij, p.cv_j, p.iec_ji}});
        }
      }
    }
    if (!out.empty()) out += '\n';
    out += "Interaction " + i + " x " + j + ", percent\n";
    out += layout({"agent", "CV(" + i + ")", "IEC(" + i + ";" + j + ")", "CV(" + j + ")",
                   "IEC(" + j + ";" + i + ")"},
                  rows, {true, true, true, true});
  }

  for (const AgentReport& a : report.agents) {
    for (const std::string& w : a.warnings) out += "warning [" + a.agent_id + "]: " + w + "\n";
  }
  return out;
}

}  // namespace biasforge
