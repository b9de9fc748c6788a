#include "smfg_cli/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include <smfg/error.hpp>

namespace smfg::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(fmt::format("{}: not a number: '{}'", key, v));
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: not a nonnegative integer: '{}'", key, v));
  }
  return out;
}

BoundaryTag to_tag(const std::string& key, const std::string& v) {
  if (v == "neumann") return BoundaryTag::neumann;
  if (v == "dirichlet") return BoundaryTag::dirichlet;
  if (v == "none") return BoundaryTag::none;
  throw ConfigError(fmt::format("{}: expected neumann, dirichlet or none, got '{}'", key, v));
}

std::string_view tag_name(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::neumann: return "neumann";
    case BoundaryTag::dirichlet: return "dirichlet";
    case BoundaryTag::none: return "none";
  }
  return "none";
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "interval") {
           c.domain = DomainKind::interval;
         } else if (v == "rect") {
           c.domain = DomainKind::rect;
         } else {
           throw ConfigError(fmt::format("{}: expected interval or rect, got '{}'", k, v));
         }
       }},
      {"interval.a", [](RunConfig& c, const std::string& k, const std::string& v) { c.a = to_double(k, v); }},
      {"interval.b", [](RunConfig& c, const std::string& k, const std::string& v) { c.b = to_double(k, v); }},
      {"interval.n", [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_uint(k, v); }},
      {"rect.lx", [](RunConfig& c, const std::string& k, const std::string& v) { c.lx = to_double(k, v); }},
      {"rect.ly", [](RunConfig& c, const std::string& k, const std::string& v) { c.ly = to_double(k, v); }},
      {"rect.nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.nx = to_uint(k, v); }},
      {"rect.ny", [](RunConfig& c, const std::string& k, const std::string& v) { c.ny = to_uint(k, v); }},
      {"tags.left", [](RunConfig& c, const std::string& k, const std::string& v) { c.tags.left = to_tag(k, v); }},
      {"tags.right", [](RunConfig& c, const std::string& k, const std::string& v) { c.tags.right = to_tag(k, v); }},
      {"tags.bottom", [](RunConfig& c, const std::string& k, const std::string& v) { c.tags.bottom = to_tag(k, v); }},
      {"tags.top", [](RunConfig& c, const std::string& k, const std::string& v) { c.tags.top = to_tag(k, v); }},
      {"model", [](RunConfig& c, const std::string&, const std::string& v) { c.model = v; }},
      {"model.alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
      {"model.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta = to_double(k, v); }},
      {"j", [](RunConfig& c, const std::string& k, const std::string& v) { c.j = to_double(k, v); }},
      {"j.values", [](RunConfig& c, const std::string& k, const std::string& v) { c.j_values = to_list(k, v); }},
      {"schedule.eps_start",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.schedule.eps_start = to_double(k, v); }},
      {"schedule.eps_factor",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.schedule.eps_factor = to_double(k, v); }},
      {"schedule.eps_count",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.schedule.eps_count = to_uint(k, v); }},
      {"solver.tol_grad",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.tol_grad = to_double(k, v); }},
      {"solver.max_iters",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.max_iters = to_uint(k, v); }},
      {"solver.armijo_c",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.armijo_c = to_double(k, v); }},
      {"solver.backtrack_factor",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.backtrack_factor = to_double(k, v); }},
      {"solver.initial_step",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.initial_step = to_double(k, v); }},
      {"solver.memory",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.memory = to_uint(k, v); }},
      {"diagnostics.minty_samples",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.minty_samples = to_uint(k, v); }},
      {"diagnostics.monotonicity_samples",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.monotonicity_samples = to_uint(k, v); }},
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_uint(k, v); }},
      {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"oracle.tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_tolerance = to_double(k, v); }},
      {"sweep.slope_tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.slope_tolerance = to_double(k, v); }},
      {"sweep.drift_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.drift_max = to_double(k, v); }},
      {"check.fd_states", [](RunConfig& c, const std::string& k, const std::string& v) { c.fd_states = to_uint(k, v); }},
      {"check.fd_delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.fd_delta = to_double(k, v); }},
      {"check.fd_tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.fd_tolerance = to_double(k, v); }},
      {"check.monotonicity_floor",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.monotonicity_floor = to_double(k, v); }},
  };
  return table;
}

std::map<std::string, ModelFactory>& registry() {
  static std::map<std::string, ModelFactory> models = {
      {"prototype", [](const RunConfig& c) { return prototype_models(c.alpha, c.beta); }},
  };
  return models;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));

    const auto& table = setters();
    if (const auto it = table.find(key); it != table.end()) {
      it->second(cfg, key, value);
    } else if (key.rfind("model.", 0) == 0) {
      cfg.model_params[key.substr(6)] = value;
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", lineno, key));
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig& c) {
  const auto num = [](double v) { return fmt::format("{:.17g}", v); };
  std::vector<std::pair<std::string, std::string>> e = {
      {"domain", c.domain == DomainKind::interval ? "interval" : "rect"},
  };
  if (c.domain == DomainKind::interval) {
    e.insert(e.end(), {{"interval.a", num(c.a)},
                       {"interval.b", num(c.b)},
                       {"interval.n", std::to_string(c.n)},
                       {"tags.left", std::string(tag_name(c.tags.left))},
                       {"tags.right", std::string(tag_name(c.tags.right))}});
  } else {
    e.insert(e.end(), {{"rect.lx", num(c.lx)},
                       {"rect.ly", num(c.ly)},
                       {"rect.nx", std::to_string(c.nx)},
                       {"rect.ny", std::to_string(c.ny)},
                       {"tags.left", std::string(tag_name(c.tags.left))},
                       {"tags.right", std::string(tag_name(c.tags.right))},
                       {"tags.bottom", std::string(tag_name(c.tags.bottom))},
                       {"tags.top", std::string(tag_name(c.tags.top))}});
  }
  e.insert(e.end(), {{"model", c.model}, {"model.alpha", num(c.alpha)}, {"model.beta", num(c.beta)}});
  for (const auto& [k, v] : c.model_params) e.emplace_back("model." + k, v);
  if (c.j_values.empty()) {
    e.emplace_back("j", num(c.j));
  } else {
    std::string list;
    for (std::size_t i = 0; i < c.j_values.size(); ++i) list += (i ? "," : "") + num(c.j_values[i]);
    e.emplace_back("j.values", list);
  }
  e.insert(e.end(), {{"schedule.eps_start", num(c.schedule.eps_start)},
                     {"schedule.eps_factor", num(c.schedule.eps_factor)},
                     {"schedule.eps_count", std::to_string(c.schedule.eps_count)},
                     {"solver.tol_grad", num(c.solver.tol_grad)},
                     {"solver.max_iters", std::to_string(c.solver.max_iters)},
                     {"solver.armijo_c", num(c.solver.armijo_c)},
                     {"solver.backtrack_factor", num(c.solver.backtrack_factor)},
                     {"solver.initial_step", num(c.solver.initial_step)},
                     {"solver.memory", std::to_string(c.solver.memory)},
                     {"diagnostics.minty_samples", std::to_string(c.minty_samples)},
                     {"diagnostics.monotonicity_samples", std::to_string(c.monotonicity_samples)},
                     {"seed", std::to_string(c.seed)},
                     {"oracle.tolerance", num(c.oracle_tolerance)},
                     {"sweep.slope_tolerance", num(c.slope_tolerance)},
                     {"sweep.drift_max", num(c.drift_max)},
                     {"check.fd_states", std::to_string(c.fd_states)},
                     {"check.fd_delta", num(c.fd_delta)},
                     {"check.fd_tolerance", num(c.fd_tolerance)},
                     {"check.monotonicity_floor", num(c.monotonicity_floor)}});
  return e;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [k, v] : canonical_entries(cfg)) {
    for (const char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void register_model(const std::string& name, ModelFactory factory) { registry()[name] = std::move(factory); }

ModelSet make_models(const RunConfig& cfg) {
  const auto it = registry().find(cfg.model);
  if (it == registry().end()) throw ConfigError(fmt::format("unknown model '{}'", cfg.model));
  return it->second(cfg);
}

Problem build_problem(const RunConfig& cfg) {
  ModelSet models = make_models(cfg);
  cfg.schedule.validate();
  cfg.solver.validate();

  std::shared_ptr<const Mesh> mesh;
  if (cfg.domain == DomainKind::interval) {
    if (cfg.tags.bottom != BoundaryTag::none || cfg.tags.top != BoundaryTag::none) {
      throw ConfigError("tags.bottom/tags.top do not apply to an interval");
    }
    mesh = std::make_shared<const Mesh>(build_interval_mesh(cfg.a, cfg.b, cfg.n, cfg.tags.left, cfg.tags.right));
  } else {
    mesh = std::make_shared<const Mesh>(build_rect_mesh(cfg.lx, cfg.ly, cfg.nx, cfg.ny, cfg.tags));
  }

  std::vector<double> j;
  if (cfg.j_values.empty()) {
    j = nodal_inflow(*mesh, cfg.j);
  } else {
    if (cfg.j_values.size() != mesh->vertex_count()) {
      throw ConfigError(fmt::format("j.values has {} entries, mesh has {} vertices", cfg.j_values.size(),
                                    mesh->vertex_count()));
    }
    j = cfg.j_values;
  }
  ProblemData data(mesh, models.hamiltonian, models.coupling, models.exponents, std::move(j), cfg.schedule.eps_start);
  return Problem{std::move(models), mesh, std::move(data)};
}

}  // namespace smfg::cli
