#pragma once

#include <cstdint>
#include <string>

#include "planarmvs/fusion.hpp"

namespace planarmvs {

// Every tunable constant of the pipeline.  Angles are stored in degrees (the
// unit used by the config file); the engine converts where needed.
struct PipelineConfig {
  // Aggregation and prior constants.
  double epsilon = 0.1;        // credible-correspondence cost threshold
  double alpha = 0.18;         // photometric likelihood bandwidth
  double gamma = 0.5;          // prior floor
  double lambda_n_deg = 5.0;   // prior normal bandwidth
  double sigma = 0.3;          // view-selection good-match bandwidth
  double eta = 0.9;            // view-selection visibility vote
  double lambda_geo = 0.1;     // reprojection penalty weight
  double tau_geo = 5.0;        // reprojection penalty truncation (pixels)
  double lambda_d_divisor = 64.0;  // lambda_d = depth range / divisor

  // Matching window and aggregation.
  int top_k = 4;
  int patch_radius = 5;
  int patch_step = 2;

  // Sweep iteration counts per phase and geometric rounds.
  int t_photo = 3;
  int t_p_photo = 3;
  int t_geo = 2;
  int geom_rounds = 2;

  FusionParams fusion;

  std::uint64_t seed = 0;
  int threads = 0;    // 0 = one worker per hardware thread
  int max_dim = 0;    // 0 = never downscale

  bool use_prior = true;  // cleared by --no-prior
  bool use_geom = true;   // cleared by --no-geom

  // Throws ConfigError on out-of-range values (t_photo >= 1, positive
  // bandwidths, at least one geometric round, valid window).
  void validate() const;

  int resolved_threads() const;
};

// Applies one key=value override; throws ConfigError for unknown keys or
// unparsable values.  Keys mirror the field names (fusion_* for fusion
// thresholds, e.g. fusion_max_normal_deg).
void apply_config_entry(PipelineConfig &config, const std::string &key,
                        const std::string &value);

// Flat key=value text with '#' comments; later entries override earlier
// ones.  Throws ConfigError with the offending line number.
PipelineConfig parse_config(const std::string &text, PipelineConfig base = {});
PipelineConfig load_config(const std::string &path, PipelineConfig base = {});

// The full configuration as parseable key=value text (round-trips through
// parse_config).
std::string config_to_text(const PipelineConfig &config);

}  // namespace planarmvs
