#include "planarmvs/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "planarmvs/errors.hpp"
#include "planarmvs/io_util.hpp"
#include "planarmvs/photometric.hpp"

namespace planarmvs {

namespace {

double parse_double(const std::string &v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception &) {
    throw ConfigError("not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("trailing characters in number: '" + v + "'");
  if (!std::isfinite(out)) throw ConfigError("number must be finite: '" + v + "'");
  return out;
}

long long parse_int(const std::string &v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception &) {
    throw ConfigError("not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("trailing characters in integer: '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string &v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception &) {
    throw ConfigError("not an unsigned integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("trailing characters in integer: '" + v + "'");
  return out;
}

bool parse_bool(const std::string &v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ConfigError("not a boolean (use 0/1/true/false/on/off): '" + v + "'");
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PipelineConfig::validate() const {
  const auto positive = [](double v, const char *name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(epsilon, "epsilon");
  positive(alpha, "alpha");
  positive(gamma, "gamma");
  positive(lambda_n_deg, "lambda_n_deg");
  positive(sigma, "sigma");
  positive(lambda_geo, "lambda_geo");
  positive(tau_geo, "tau_geo");
  positive(lambda_d_divisor, "lambda_d_divisor");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  try {
    PatchSpec{patch_radius, patch_step}.validate();
  } catch (const ValidationError &e) {
    throw ConfigError(e.what());
  }
  if (t_photo < 1)
    throw ConfigError("t_photo must be at least 1 (credible costs need one sweep)");
  if (t_p_photo < 0) throw ConfigError("t_p_photo must be non-negative");
  if (t_geo < 0) throw ConfigError("t_geo must be non-negative");
  if (geom_rounds < 1) throw ConfigError("geom_rounds must be at least 1");
  try {
    fusion.validate();
  } catch (const ValidationError &e) {
    throw ConfigError(e.what());
  }
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (max_dim < 0) throw ConfigError("max_dim must be non-negative");
}

int PipelineConfig::resolved_threads() const {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void apply_config_entry(PipelineConfig &c, const std::string &key, const std::string &value) {
  static const std::map<std::string, std::function<void(PipelineConfig &, const std::string &)>>
      kSetters = {
          {"epsilon", [](PipelineConfig &c, const std::string &v) { c.epsilon = parse_double(v); }},
          {"alpha", [](PipelineConfig &c, const std::string &v) { c.alpha = parse_double(v); }},
          {"gamma", [](PipelineConfig &c, const std::string &v) { c.gamma = parse_double(v); }},
          {"lambda_n_deg",
           [](PipelineConfig &c, const std::string &v) { c.lambda_n_deg = parse_double(v); }},
          {"sigma", [](PipelineConfig &c, const std::string &v) { c.sigma = parse_double(v); }},
          {"eta", [](PipelineConfig &c, const std::string &v) { c.eta = parse_double(v); }},
          {"lambda_geo",
           [](PipelineConfig &c, const std::string &v) { c.lambda_geo = parse_double(v); }},
          {"tau_geo", [](PipelineConfig &c, const std::string &v) { c.tau_geo = parse_double(v); }},
          {"lambda_d_divisor",
           [](PipelineConfig &c, const std::string &v) { c.lambda_d_divisor = parse_double(v); }},
          {"top_k",
           [](PipelineConfig &c, const std::string &v) { c.top_k = static_cast<int>(parse_int(v)); }},
          {"patch_radius",
           [](PipelineConfig &c, const std::string &v) {
             c.patch_radius = static_cast<int>(parse_int(v));
           }},
          {"patch_step",
           [](PipelineConfig &c, const std::string &v) {
             c.patch_step = static_cast<int>(parse_int(v));
           }},
          {"t_photo",
           [](PipelineConfig &c, const std::string &v) { c.t_photo = static_cast<int>(parse_int(v)); }},
          {"t_p_photo",
           [](PipelineConfig &c, const std::string &v) {
             c.t_p_photo = static_cast<int>(parse_int(v));
           }},
          {"t_geo",
           [](PipelineConfig &c, const std::string &v) { c.t_geo = static_cast<int>(parse_int(v)); }},
          {"geom_rounds",
           [](PipelineConfig &c, const std::string &v) {
             c.geom_rounds = static_cast<int>(parse_int(v));
           }},
          {"fusion_max_rel_depth_diff",
           [](PipelineConfig &c, const std::string &v) {
             c.fusion.max_rel_depth_diff = parse_double(v);
           }},
          {"fusion_max_normal_deg",
           [](PipelineConfig &c, const std::string &v) {
             c.fusion.max_normal_diff = parse_double(v) * 0.017453292519943295;
           }},
          {"fusion_max_reproj_err",
           [](PipelineConfig &c, const std::string &v) {
             c.fusion.max_reproj_err = parse_double(v);
           }},
          {"fusion_min_consistent",
           [](PipelineConfig &c, const std::string &v) {
             c.fusion.min_consistent = static_cast<int>(parse_int(v));
           }},
          {"seed", [](PipelineConfig &c, const std::string &v) { c.seed = parse_u64(v); }},
          {"threads",
           [](PipelineConfig &c, const std::string &v) { c.threads = static_cast<int>(parse_int(v)); }},
          {"max_dim",
           [](PipelineConfig &c, const std::string &v) { c.max_dim = static_cast<int>(parse_int(v)); }},
          {"use_prior",
           [](PipelineConfig &c, const std::string &v) { c.use_prior = parse_bool(v); }},
          {"use_geom",
           [](PipelineConfig &c, const std::string &v) { c.use_geom = parse_bool(v); }},
      };
  const auto it = kSetters.find(key);
  if (it == kSetters.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(c, value);
}

PipelineConfig parse_config(const std::string &text, PipelineConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    try {
      apply_config_entry(base, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

PipelineConfig load_config(const std::string &path, PipelineConfig base) {
  return parse_config(read_file(path), std::move(base));
}

std::string config_to_text(const PipelineConfig &c) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon = " << c.epsilon << "\n"
     << "alpha = " << c.alpha << "\n"
     << "gamma = " << c.gamma << "\n"
     << "lambda_n_deg = " << c.lambda_n_deg << "\n"
     << "sigma = " << c.sigma << "\n"
     << "eta = " << c.eta << "\n"
     << "lambda_geo = " << c.lambda_geo << "\n"
     << "tau_geo = " << c.tau_geo << "\n"
     << "lambda_d_divisor = " << c.lambda_d_divisor << "\n"
     << "top_k = " << c.top_k << "\n"
     << "patch_radius = " << c.patch_radius << "\n"
     << "patch_step = " << c.patch_step << "\n"
     << "t_photo = " << c.t_photo << "\n"
     << "t_p_photo = " << c.t_p_photo << "\n"
     << "t_geo = " << c.t_geo << "\n"
     << "geom_rounds = " << c.geom_rounds << "\n"
     << "fusion_max_rel_depth_diff = " << c.fusion.max_rel_depth_diff << "\n"
     << "fusion_max_normal_deg = " << c.fusion.max_normal_diff / 0.017453292519943295 << "\n"
     << "fusion_max_reproj_err = " << c.fusion.max_reproj_err << "\n"
     << "fusion_min_consistent = " << c.fusion.min_consistent << "\n"
     << "seed = " << c.seed << "\n"
     << "threads = " << c.threads << "\n"
     << "max_dim = " << c.max_dim << "\n"
     << "use_prior = " << (c.use_prior ? 1 : 0) << "\n"
     << "use_geom = " << (c.use_geom ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace planarmvs
