// planar-mvs: planar-prior-assisted PatchMatch multi-view stereo.
//
// Subcommands: synth, depthmap, fuse, eval-depth, eval-cloud, pipeline.
// Exit codes: 0 success, 2 bad input or configuration, 3 runtime failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "planarmvs/config.hpp"
#include "planarmvs/dataset.hpp"
#include "planarmvs/errors.hpp"
#include "planarmvs/eval.hpp"
#include "planarmvs/fusion.hpp"
#include "planarmvs/io_util.hpp"
#include "planarmvs/pipeline.hpp"
#include "planarmvs/ply.hpp"
#include "planarmvs/prior.hpp"
#include "planarmvs/synthetic.hpp"

namespace {

using namespace planarmvs;

std::string view_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", index);
  return buf;
}

// Options shared by the depthmap and pipeline subcommands.
struct RunOptions {
  std::string scene_dir;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> max_dim;
  bool no_prior = false;
  bool no_geom = false;
};

void add_run_options(CLI::App *cmd, RunOptions &o) {
  cmd->add_option("--scene", o.scene_dir, "Scene directory (images/, cams/, optional gt/)")
      ->required();
  cmd->add_option("--out", o.out_dir, "Output directory")->required();
  cmd->add_option("--config", o.config_path, "key=value config file");
  cmd->add_option("--seed", o.seed, "Random seed (overrides config)");
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = all cores (overrides config)");
  cmd->add_option("--max-dim", o.max_dim,
                  "Downscale so max(width, height) <= N before processing");
  cmd->add_flag("--no-prior", o.no_prior, "Skip the planar prior (photometric + geometric only)");
  cmd->add_flag("--no-geom", o.no_geom, "Stop after the prior-assisted sweep");
}

PipelineConfig build_config(const RunOptions &o) {
  PipelineConfig config;
  if (!o.config_path.empty()) config = load_config(o.config_path, config);
  if (o.seed) config.seed = *o.seed;
  if (o.threads) config.threads = *o.threads;
  if (o.max_dim) config.max_dim = *o.max_dim;
  if (o.no_prior) config.use_prior = false;
  if (o.no_geom) config.use_geom = false;
  config.validate();
  return config;
}

void write_run_outputs(const PipelineResult &result, const SceneDataset &scene,
                       const PipelineConfig &config, const std::string &out_dir) {
  for (std::size_t i = 0; i < result.depth.size(); ++i) {
    const std::string name = view_name(static_cast<int>(i));
    save_depth_map(result.depth[i], out_dir + "/depth/" + name + ".dmap");
    save_normal_map(result.normal[i], out_dir + "/normals/" + name + ".nmap");
    save_depth_map(result.cost[i], out_dir + "/cost/" + name + ".dmap");
    if (i < result.prior_used.size() && result.prior_used[i])
      save_triangulation_off(result.triangulations[i], scene.cameras[i],
                             out_dir + "/prior/" + name + ".off");
  }
  std::string timings;
  for (const StageTiming &t : result.timings)
    timings += t.name + "=" + std::to_string(t.seconds) + "\n";
  write_file_atomic(out_dir + "/timings.txt", timings);
  write_file_atomic(out_dir + "/config.txt", config_to_text(config));
  if (!result.warnings.empty()) {
    std::string text;
    for (const std::string &w : result.warnings) {
      text += w + "\n";
      std::cerr << "warning: " << w << "\n";
    }
    write_file_atomic(out_dir + "/warnings.txt", text);
  }
}

int run_synth(const std::string &out_dir, const std::string &preset, int width, int height,
              int views, std::uint64_t seed) {
  SceneGeometry geo;
  if (preset == "textured")
    geo = preset_textured(width, height, views);
  else if (preset == "lowtex")
    geo = preset_lowtex(width, height, views);
  else
    throw ConfigError("unknown preset '" + preset + "' (use textured or lowtex)");
  save_scene(render_synthetic_scene(geo, seed), out_dir);
  std::cout << "wrote " << views << "-view '" << preset << "' scene to " << out_dir << "\n";
  return 0;
}

int run_depthmap(const RunOptions &o) {
  PipelineConfig config = build_config(o);
  const SceneDataset scene = downscale_scene(load_scene(o.scene_dir), config.max_dim);
  PipelineResult result = run_pipeline(scene, config);
  result.cloud = PointCloud{};  // depthmap stops before fusion output
  write_run_outputs(result, scene, config, o.out_dir);
  std::cout << "wrote depth/normal/cost maps for " << scene.view_count() << " views to "
            << o.out_dir << "\n";
  return 0;
}

int run_pipeline_cmd(const RunOptions &o) {
  PipelineConfig config = build_config(o);
  const SceneDataset scene = downscale_scene(load_scene(o.scene_dir), config.max_dim);
  const PipelineResult result = run_pipeline(scene, config);
  write_run_outputs(result, scene, config, o.out_dir);
  save_ply(result.cloud, o.out_dir + "/cloud.ply");
  std::cout << "fused " << result.cloud.size() << " points from " << scene.view_count()
            << " views into " << o.out_dir << "/cloud.ply\n";
  for (const StageTiming &t : result.timings)
    std::cout << "  " << t.name << ": " << t.seconds << " s\n";
  return 0;
}

int run_fuse(const std::string &scene_dir, const std::string &maps_dir,
             const std::string &out_file, const std::string &config_path) {
  PipelineConfig config;
  if (!config_path.empty()) config = load_config(config_path, config);
  config.validate();
  const SceneDataset scene = load_scene(scene_dir);
  std::vector<DepthMap> depths;
  std::vector<NormalMap> normals;
  for (int i = 0; i < scene.view_count(); ++i) {
    const std::string name = view_name(i);
    depths.push_back(load_depth_map(maps_dir + "/depth/" + name + ".dmap"));
    normals.push_back(load_normal_map(maps_dir + "/normals/" + name + ".nmap"));
  }
  const PointCloud cloud = fuse(depths, normals, scene.cameras, config.fusion, &scene.images,
                                scene.rgb.empty() ? nullptr : &scene.rgb);
  save_ply(cloud, out_file);
  std::cout << "fused " << cloud.size() << " points into " << out_file << "\n";
  return 0;
}

int run_eval_depth(const std::string &est_path, const std::string &gt_path,
                   std::vector<double> thresholds, std::optional<double> rel,
                   const std::string &out_dir) {
  const DepthMap est = load_depth_map(est_path);
  const DepthMap gt = load_depth_map(gt_path);
  if (thresholds.empty()) thresholds = {0.02, 0.1};
  const DepthMetrics m = depth_metrics(est, gt, std::move(thresholds));
  std::string kv = report_kv(m);
  if (rel) {
    std::ostringstream os;
    os.precision(17);
    os << "relative_fraction_below_" << *rel << "="
       << relative_error_fraction(est, gt, *rel) << "\n";
    kv += os.str();
  }
  std::cout << kv;
  if (!out_dir.empty()) {
    write_file_atomic(out_dir + "/depth_metrics.txt", kv);
    write_file_atomic(out_dir + "/depth_metrics.json", report_json(m));
  }
  return 0;
}

int run_eval_cloud(const std::string &est_path, const std::string &gt_path, double tau,
                   const std::string &out_dir) {
  const CloudMetrics m = cloud_metrics(load_ply(est_path), load_ply(gt_path), tau);
  std::cout << report_kv(m);
  if (!out_dir.empty()) {
    write_file_atomic(out_dir + "/cloud_metrics.txt", report_kv(m));
    write_file_atomic(out_dir + "/cloud_metrics.json", report_json(m));
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"planar-mvs: planar-prior-assisted PatchMatch multi-view stereo"};
  app.require_subcommand(1);

  // synth
  auto *synth = app.add_subcommand("synth", "Render a synthetic calibrated scene");
  std::string synth_out, synth_preset = "textured";
  int synth_w = 320, synth_h = 240, synth_views = 5;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "Scene output directory")->required();
  synth->add_option("--preset", synth_preset, "textured | lowtex")
      ->check(CLI::IsMember({"textured", "lowtex"}));
  synth->add_option("--width", synth_w, "Image width");
  synth->add_option("--height", synth_h, "Image height");
  synth->add_option("--views", synth_views, "Number of cameras");
  synth->add_option("--seed", synth_seed, "Texture noise seed");

  // depthmap / pipeline
  auto *depthmap = app.add_subcommand("depthmap", "Estimate depth/normal maps (no fusion)");
  RunOptions depthmap_opts;
  add_run_options(depthmap, depthmap_opts);

  auto *pipeline = app.add_subcommand("pipeline", "Full run: sweeps, prior, fusion");
  RunOptions pipeline_opts;
  add_run_options(pipeline, pipeline_opts);

  // fuse
  auto *fuse_cmd = app.add_subcommand("fuse", "Fuse precomputed maps into a point cloud");
  std::string fuse_scene, fuse_maps, fuse_out, fuse_config;
  fuse_cmd->add_option("--scene", fuse_scene, "Scene directory (for cameras/colors)")->required();
  fuse_cmd->add_option("--maps", fuse_maps, "Directory holding depth/ and normals/")->required();
  fuse_cmd->add_option("--out", fuse_out, "Output PLY file")->required();
  fuse_cmd->add_option("--config", fuse_config, "key=value config file (fusion_* keys)");

  // eval-depth
  auto *eval_depth = app.add_subcommand("eval-depth", "Depth-map error fractions vs GT");
  std::string ed_est, ed_gt, ed_out;
  std::vector<double> ed_thresholds;
  std::optional<double> ed_rel;
  eval_depth->add_option("--est", ed_est, "Estimated .dmap")->required();
  eval_depth->add_option("--gt", ed_gt, "Ground-truth .dmap")->required();
  eval_depth->add_option("--threshold", ed_thresholds,
                         "Absolute error threshold (repeatable; default 0.02 0.1)");
  eval_depth->add_option("--rel", ed_rel, "Also report the fraction below this relative error");
  eval_depth->add_option("--out", ed_out, "Directory for report files");

  // eval-cloud
  auto *eval_cloud = app.add_subcommand("eval-cloud", "Accuracy/completeness/F1 vs GT cloud");
  std::string ec_est, ec_gt, ec_out;
  double ec_tau = 0.0;
  eval_cloud->add_option("--est", ec_est, "Estimated .ply")->required();
  eval_cloud->add_option("--gt", ec_gt, "Ground-truth .ply")->required();
  eval_cloud->add_option("--tau", ec_tau, "Distance threshold")->required();
  eval_cloud->add_option("--out", ec_out, "Directory for report files");

  try {
    app.parse(argc, argv);
    if (*synth) return run_synth(synth_out, synth_preset, synth_w, synth_h, synth_views,
                                 synth_seed);
    if (*depthmap) return run_depthmap(depthmap_opts);
    if (*pipeline) return run_pipeline_cmd(pipeline_opts);
    if (*fuse_cmd) return run_fuse(fuse_scene, fuse_maps, fuse_out, fuse_config);
    if (*eval_depth)
      return run_eval_depth(ed_est, ed_gt, ed_thresholds, ed_rel, ed_out);
    if (*eval_cloud) return run_eval_cloud(ec_est, ec_gt, ec_tau, ec_out);
    return 2;
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InternalError &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
