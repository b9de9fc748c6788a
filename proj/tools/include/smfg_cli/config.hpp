#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <smfg/diagnostics.hpp>
#include <smfg/mesh.hpp>
#include <smfg/model.hpp>
#include <smfg/operator.hpp>
#include <smfg/solver.hpp>

namespace smfg::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DomainKind { interval, rect };

/// Resolved configuration. Files are flat `key = value` lines; `#` starts a
/// comment. Keys under `model.` other than alpha/beta are passed through to
/// the model factory untouched.
struct RunConfig {
  DomainKind domain = DomainKind::interval;
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 64;
  double lx = 1.0;
  double ly = 1.0;
  std::size_t nx = 16;
  std::size_t ny = 16;
  RectTags tags;

  std::string model = "prototype";
  double alpha = 2.0;
  double beta = 2.0;
  std::map<std::string, std::string> model_params;

  double j = 1.0;
  std::vector<double> j_values;  // per-node override when non-empty

  ContinuationSchedule schedule;
  SolverOptions solver;
  std::size_t minty_samples = 1000;
  std::size_t monotonicity_samples = 1000;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  double oracle_tolerance = 1e-6;
  double slope_tolerance = 0.02;
  double drift_max = 10.0;
  std::size_t fd_states = 50;
  double fd_delta = 1e-6;
  double fd_tolerance = 1e-5;
  double monotonicity_floor = -1e-10;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// One `key = value` line per field in a fixed order; the manifest echoes
/// this and the config hash is taken over it.
std::vector<std::pair<std::string, std::string>> canonical_entries(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical entries.
std::uint64_t config_hash(const RunConfig& cfg);

using ModelFactory = std::function<ModelSet(const RunConfig&)>;

/// Makes `name` selectable through `model = name`. "prototype" is built in.
void register_model(const std::string& name, ModelFactory factory);
ModelSet make_models(const RunConfig& cfg);

struct Problem {
  ModelSet models;
  std::shared_ptr<const Mesh> mesh;
  ProblemData data;  // at schedule.eps_start
};

/// Validates exponents, tags and inflow. Errors surface as smfg::Error or
/// ConfigError.
Problem build_problem(const RunConfig& cfg);

}  // namespace smfg::cli
