#include "biasforge/context_builder.hpp"

#include <cstdint>
#include <cstdio>
#include <set>

#include "biasforge/error.hpp"

namespace biasforge {

namespace {

void append_pairs(std::string& out, const Assignment& a) {
  bool first = true;
  for (const auto& [dim, value] : a) {
    if (!first) out += ';';
    first = false;
    out += dim;
    out += '=';
    out += value;
  }
}

const FactorDimension& require_context_dim(const FactorSpace& space, std::string_view dim) {
  const FactorDimension* d = space.find(dim);
  if (d == nullptr || d->kind != DimensionKind::context) {
    throw Error(Errc::NotAContextDimension, "'" + std::string(dim) + "' is not a context dimension");
  }
  return *d;
}

const FactorDimension& require_visual_dim(const FactorSpace& space, std::string_view dim) {
  const FactorDimension* d = space.find(dim);
  if (d == nullptr || d->kind != DimensionKind::visual) {
    throw Error(Errc::NotAVisualDimension, "'" + std::string(dim) + "' is not a visual dimension");
  }
  return *d;
}

Assignment baselines_except(const FactorSpace& space, std::string_view a, std::string_view b) {
  Assignment out;
  for (const FactorDimension& d : space.visual_dims()) {
    if (d.name != a && d.name != b) out.emplace(d.name, d.baseline().id);
  }
  return out;
}

TaskInstance make_instance(const FactorSpace& space, Assignment varied,
                           const EvaluationContext& ctx) {
  TaskInstance inst;
  inst.varied = std::move(varied);
  inst.eval_context = ctx;
  inst.instance_id = instance_id_for(inst.varied, ctx);
  inst.scene = expand_variants(space, inst.full_assignment());
  return inst;
}

}  // namespace

std::string EvaluationContext::key() const {
  std::string out = "context:";
  append_pairs(out, context);
  out += "|visual:";
  append_pairs(out, visual_fixed);
  return out;
}

Assignment TaskInstance::full_assignment() const {
  Assignment out = varied;
  out.insert(eval_context.context.begin(), eval_context.context.end());
  out.insert(eval_context.visual_fixed.begin(), eval_context.visual_fixed.end());
  return out;
}

std::string instance_id_for(const Assignment& varied, const EvaluationContext& context) {
  Assignment full = varied;
  full.insert(context.context.begin(), context.context.end());
  full.insert(context.visual_fixed.begin(), context.visual_fixed.end());

  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [dim, value] : full) {
    if (varied.contains(dim)) feed("*");
    feed(dim);
    feed("=");
    feed(value);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ContextAssignment> variation_subspace(const FactorSpace& space, std::string_view dim) {
  const FactorDimension& swept = require_context_dim(space, dim);
  const ContextAssignment g = context_baseline(space);
  std::vector<ContextAssignment> out;
  out.reserve(swept.values.size());
  for (const FactorValue& v : swept.values) {
    ContextAssignment a = g;
    a[swept.name] = v.id;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<ContextAssignment> context_union(const FactorSpace& space) {
  if (space.context_dims().empty()) {
    throw Error(Errc::NoContextDimensions, "space declares no context dimensions");
  }
  std::vector<ContextAssignment> out;
  std::set<ContextAssignment> seen;
  for (const FactorDimension& d : space.context_dims()) {
    for (ContextAssignment& a : variation_subspace(space, d.name)) {
      if (seen.insert(a).second) out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<EvaluationContext> generalization_context_space(const FactorSpace& space,
                                                            std::string_view visual_dim) {
  const FactorDimension& dim = require_visual_dim(space, visual_dim);
  const Assignment fixed = baselines_except(space, dim.name, dim.name);
  std::vector<EvaluationContext> out;
  for (ContextAssignment& c : context_union(space)) {
    out.push_back({std::move(c), fixed});
  }
  return out;
}

std::vector<TaskInstance> task_subspace(const FactorSpace& space, std::string_view visual_dim) {
  const FactorDimension& dim = require_visual_dim(space, visual_dim);
  const auto contexts = generalization_context_space(space, visual_dim);
  std::vector<TaskInstance> out;
  out.reserve(dim.values.size() * contexts.size());
  for (const FactorValue& v : dim.values) {
    for (const EvaluationContext& c : contexts) {
      out.push_back(make_instance(space, Assignment{{dim.name, v.id}}, c));
    }
  }
  return out;
}

EvaluationContext baseline_factorial_context(const FactorSpace& space, std::string_view dim_i,
                                             std::string_view dim_j) {
  require_visual_dim(space, dim_i);
  require_visual_dim(space, dim_j);
  return {context_baseline(space), baselines_except(space, dim_i, dim_j)};
}

std::vector<TaskInstance> factorial_subspace(const FactorSpace& space, std::string_view dim_i,
                                             std::string_view dim_j,
                                             const EvaluationContext& c_star) {
  const FactorDimension& di = require_visual_dim(space, dim_i);
  const FactorDimension& dj = require_visual_dim(space, dim_j);
  if (di.name == dj.name) {
    throw Error(Errc::SameDimension, "factorial study needs two different dimensions");
  }

  // c_star must bind exactly the context dims and the other visual dims.
  auto check_exact = [](const Assignment& a, const std::vector<const FactorDimension*>& dims,
                        std::string_view what) {
    if (a.size() != dims.size()) {
      throw Error(Errc::IncompleteContext, std::string(what) + " binds " +
                                               std::to_string(a.size()) + " dimensions, expected " +
                                               std::to_string(dims.size()));
    }
    for (const FactorDimension* d : dims) {
      auto it = a.find(d->name);
      if (it == a.end()) {
        throw Error(Errc::IncompleteContext, std::string(what) + " lacks '" + d->name + "'");
      }
      if (d->find(it->second) == nullptr) {
        throw Error(Errc::UnknownValueId,
                    "'" + it->second + "' is not a value of dimension '" + d->name + "'");
      }
    }
  };
  std::vector<const FactorDimension*> ctx_dims;
  for (const FactorDimension& d : space.context_dims()) ctx_dims.push_back(&d);
  std::vector<const FactorDimension*> fixed_dims;
  for (const FactorDimension& d : space.visual_dims()) {
    if (d.name != di.name && d.name != dj.name) fixed_dims.push_back(&d);
  }
  check_exact(c_star.context, ctx_dims, "c_star context");
  check_exact(c_star.visual_fixed, fixed_dims, "c_star visual_fixed");

  VariantTaskManager grid;
  grid.add_axis(di).add_axis(dj);
  std::vector<TaskInstance> out;
  out.reserve(grid.size());
  grid.for_each({}, [&](const Assignment& varied) {
    out.push_back(make_instance(space, varied, c_star));
  });
  return out;
}

}  // namespace biasforge
