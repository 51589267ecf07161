#include "planarmvs/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "planarmvs/errors.hpp"
#include "planarmvs/io_util.hpp"

namespace fs = std::filesystem;

namespace planarmvs {

void SceneDataset::validate() const {
  if (images.size() < 2)
    throw ValidationError("scene: need at least 2 views, got " + std::to_string(images.size()));
  if (images.size() != cameras.size())
    throw ValidationError("scene: image count " + std::to_string(images.size()) +
                          " != camera count " + std::to_string(cameras.size()));
  if (!rgb.empty() && rgb.size() != images.size())
    throw ValidationError("scene: RGB raster count mismatch");
  if (!gt_depth.empty() && gt_depth.size() != images.size())
    throw ValidationError("scene: ground-truth depth count mismatch");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto &cam = cameras[i];
    cam.validate();
    if (cam.width != images[i].width() || cam.height != images[i].height())
      throw ValidationError("scene: view " + std::to_string(i) +
                            " camera size does not match its image");
    if (!gt_depth.empty() && !gt_depth[i].empty() &&
        (gt_depth[i].width() != images[i].width() || gt_depth[i].height() != images[i].height()))
      throw ValidationError("scene: view " + std::to_string(i) +
                            " ground-truth depth size does not match its image");
  }
}

CameraModel load_camera(const std::string &path) {
  const std::string data = read_file(path);
  std::istringstream in(data);
  double vals[18];
  for (int i = 0; i < 18; ++i)
    if (!(in >> vals[i]))
      throw IoError("camera file " + path + ": expected 18 numbers, got " + std::to_string(i));
  double extra;
  if (in >> extra) throw IoError("camera file " + path + ": trailing data");

  CameraModel cam;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cam.R(r, c) = vals[r * 3 + c];
  for (int r = 0; r < 3; ++r) cam.t(r) = vals[9 + r];
  cam.fx = vals[12];
  cam.fy = vals[13];
  cam.cx = vals[14];
  cam.cy = vals[15];
  cam.depth_min = vals[16];
  cam.depth_max = vals[17];
  return cam;
}

void save_camera(const CameraModel &cam, const std::string &path) {
  std::ostringstream out;
  out.precision(17);
  for (int r = 0; r < 3; ++r)
    out << cam.R(r, 0) << " " << cam.R(r, 1) << " " << cam.R(r, 2) << "\n";
  out << cam.t(0) << " " << cam.t(1) << " " << cam.t(2) << "\n";
  out << cam.fx << " " << cam.fy << " " << cam.cx << " " << cam.cy << "\n";
  out << cam.depth_min << " " << cam.depth_max << "\n";
  write_file_atomic(path, out.str());
}

namespace {

// Shared reader for the DMAP1/NMAP1 containers.
void parse_map_header(const std::string &data, const std::string &path, const char *magic,
                      int channels, int *w, int *h, std::size_t *payload_at) {
  const std::string want = std::string(magic) + "\n";
  if (data.size() < want.size() || data.compare(0, want.size(), want) != 0)
    throw IoError(path + ": bad magic (want " + magic + ")");
  const std::size_t eol = data.find('\n', want.size());
  if (eol == std::string::npos) throw IoError(path + ": truncated header");
  const std::string dims = data.substr(want.size(), eol - want.size());
  if (std::sscanf(dims.c_str(), "%d %d", w, h) != 2 || *w <= 0 || *h <= 0)
    throw IoError(path + ": malformed dimensions '" + dims + "'");
  *payload_at = eol + 1;
  const std::size_t need = static_cast<std::size_t>(*w) * *h * channels * 4;
  if (data.size() - *payload_at != need)
    throw IoError(path + ": payload size mismatch (want " + std::to_string(need) + " bytes, got " +
                  std::to_string(data.size() - *payload_at) + ")");
}

}  // namespace

DepthMap load_depth_map(const std::string &path) {
  const std::string data = read_file(path);
  int w = 0, h = 0;
  std::size_t at = 0;
  parse_map_header(data, path, "DMAP1", 1, &w, &h, &at);
  DepthMap map(w, h);
  std::memcpy(map.data(), data.data() + at, static_cast<std::size_t>(w) * h * 4);
  return map;
}

void save_depth_map(const DepthMap &map, const std::string &path) {
  std::string out = "DMAP1\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  const std::size_t bytes = map.size() * 4;
  out.resize(out.size() + bytes);
  std::memcpy(out.data() + out.size() - bytes, map.data(), bytes);
  write_file_atomic(path, out);
}

NormalMap load_normal_map(const std::string &path) {
  const std::string data = read_file(path);
  int w = 0, h = 0;
  std::size_t at = 0;
  parse_map_header(data, path, "NMAP1", 3, &w, &h, &at);
  NormalMap map(w, h);
  const char *p = data.data() + at;
  for (auto &n : map) {
    n = Eigen::Vector3f(read_le_float(p), read_le_float(p + 4), read_le_float(p + 8));
    p += 12;
  }
  return map;
}

void save_normal_map(const NormalMap &map, const std::string &path) {
  std::string out = "NMAP1\n" + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  out.reserve(out.size() + map.size() * 12);
  for (const auto &n : map) {
    append_le_float(out, n.x());
    append_le_float(out, n.y());
    append_le_float(out, n.z());
  }
  write_file_atomic(path, out);
}

namespace {

std::vector<fs::path> sorted_files(const fs::path &dir) {
  if (!fs::is_directory(dir)) throw IoError("missing directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

SceneDataset load_scene(const std::string &dir) {
  const fs::path root(dir);
  SceneDataset scene;
  const auto image_files = sorted_files(root / "images");
  if (image_files.empty()) throw IoError("scene " + dir + ": no images");

  bool any_rgb = false;
  for (const auto &img_path : image_files) {
    const std::string ext = img_path.extension().string();
    if (ext != ".pgm" && ext != ".ppm")
      throw IoError("scene image " + img_path.string() + ": unsupported extension " + ext);
    const fs::path cam_path = root / "cams" / (img_path.stem().string() + ".txt");
    if (!fs::exists(cam_path))
      throw IoError("scene: missing camera file " + cam_path.string() + " for image " +
                    img_path.filename().string());
    ImageRgb rgb;
    scene.images.push_back(load_image(img_path.string(), &rgb));
    scene.rgb.push_back(std::move(rgb));
    if (ext == ".ppm") any_rgb = true;
    CameraModel cam = load_camera(cam_path.string());
    cam.width = scene.images.back().width();
    cam.height = scene.images.back().height();
    scene.cameras.push_back(cam);
  }
  if (!any_rgb) scene.rgb.clear();  // grayscale scene; colors replicate gray on demand

  const fs::path cams_dir = root / "cams";
  for (const auto &cam_file : sorted_files(cams_dir)) {
    const fs::path img_pgm = root / "images" / (cam_file.stem().string() + ".pgm");
    const fs::path img_ppm = root / "images" / (cam_file.stem().string() + ".ppm");
    if (!fs::exists(img_pgm) && !fs::exists(img_ppm))
      throw IoError("scene: camera file " + cam_file.string() + " has no matching image");
  }

  const fs::path gt_dir = root / "gt";
  if (fs::is_directory(gt_dir)) {
    for (const auto &img_path : image_files) {
      const fs::path gt_path = gt_dir / (img_path.stem().string() + ".dmap");
      if (!fs::exists(gt_path))
        throw IoError("scene: gt/ exists but " + gt_path.string() + " is missing");
      scene.gt_depth.push_back(load_depth_map(gt_path.string()));
    }
  }

  scene.validate();
  return scene;
}

void save_scene(const SceneDataset &scene, const std::string &dir) {
  scene.validate();
  const fs::path root(dir);
  char name[16];
  for (int i = 0; i < scene.view_count(); ++i) {
    std::snprintf(name, sizeof(name), "%04d", i);
    if (!scene.rgb.empty())
      save_ppm(scene.rgb[i], (root / "images" / (std::string(name) + ".ppm")).string());
    else
      save_pgm(scene.images[i], (root / "images" / (std::string(name) + ".pgm")).string());
    save_camera(scene.cameras[i], (root / "cams" / (std::string(name) + ".txt")).string());
    if (!scene.gt_depth.empty())
      save_depth_map(scene.gt_depth[i], (root / "gt" / (std::string(name) + ".dmap")).string());
  }
}

}  // namespace planarmvs
