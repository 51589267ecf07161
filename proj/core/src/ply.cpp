#include "planarmvs/ply.hpp"

#include <cstring>
#include <map>
#include <sstream>

#include "planarmvs/errors.hpp"
#include "planarmvs/io_util.hpp"

namespace planarmvs {

namespace {

std::size_t scalar_size(const std::string &type) {
  static const std::map<std::string, std::size_t> kSizes = {
      {"char", 1},  {"int8", 1},    {"uchar", 1},  {"uint8", 1},  {"short", 2},
      {"int16", 2}, {"ushort", 2},  {"uint16", 2}, {"int", 4},    {"int32", 4},
      {"uint", 4},  {"uint32", 4},  {"float", 4},  {"float32", 4}, {"double", 8},
      {"float64", 8}};
  const auto it = kSizes.find(type);
  if (it == kSizes.end()) throw IoError("ply: unsupported property type '" + type + "'");
  return it->second;
}

double decode_scalar(const unsigned char *p, const std::string &type) {
  auto as = [&](auto v) {
    std::memcpy(&v, p, sizeof v);
    return static_cast<double>(v);
  };
  if (type == "char" || type == "int8") return as(std::int8_t{});
  if (type == "uchar" || type == "uint8") return as(std::uint8_t{});
  if (type == "short" || type == "int16") return as(std::int16_t{});
  if (type == "ushort" || type == "uint16") return as(std::uint16_t{});
  if (type == "int" || type == "int32") return as(std::int32_t{});
  if (type == "uint" || type == "uint32") return as(std::uint32_t{});
  if (type == "float" || type == "float32") return as(float{});
  return as(double{});
}

struct Property {
  std::string type;
  std::string name;
  std::size_t offset = 0;  // within a binary vertex record
};

}  // namespace

void save_ply(const PointCloud &cloud, const std::string &path) {
  const std::size_t n = cloud.size();
  if (!cloud.normals.empty() && cloud.normals.size() != n)
    throw ValidationError("ply: normal count does not match point count");
  if (!cloud.colors.empty() && cloud.colors.size() != n)
    throw ValidationError("ply: color count does not match point count");

  std::string out;
  {
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\nelement vertex " << n
           << "\nproperty float x\nproperty float y\nproperty float z\n"
              "property float nx\nproperty float ny\nproperty float nz\n"
              "property uchar red\nproperty uchar green\nproperty uchar blue\n"
              "end_header\n";
    out = header.str();
  }
  out.reserve(out.size() + n * 27);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3f &p = cloud.positions[i];
    const Eigen::Vector3f nrm = cloud.normals.empty() ? Eigen::Vector3f::Zero()
                                                      : cloud.normals[i];
    const std::array<std::uint8_t, 3> rgb =
        cloud.colors.empty() ? std::array<std::uint8_t, 3>{128, 128, 128} : cloud.colors[i];
    for (float v : {p.x(), p.y(), p.z(), nrm.x(), nrm.y(), nrm.z()}) append_le_float(out, v);
    out.push_back(static_cast<char>(rgb[0]));
    out.push_back(static_cast<char>(rgb[1]));
    out.push_back(static_cast<char>(rgb[2]));
  }
  write_file_atomic(path, out);
}

PointCloud load_ply(const std::string &path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= data.size()) throw IoError("ply: truncated header in " + path);
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "ply") throw IoError("ply: missing magic in " + path);
  bool binary = false;
  bool format_seen = false;
  std::size_t vertex_count = 0;
  std::vector<Property> props;
  bool in_vertex_element = false;
  std::size_t stride = 0;
  std::size_t skip_elements_after = 0;

  for (;;) {
    const std::string line = next_line();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii")
        binary = false;
      else if (fmt == "binary_little_endian")
        binary = true;
      else
        throw IoError("ply: unsupported format '" + fmt + "' in " + path);
      format_seen = true;
    } else if (tok == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      if (name == "vertex") {
        in_vertex_element = true;
        vertex_count = count;
      } else {
        if (in_vertex_element || !props.empty()) skip_elements_after += count;
        in_vertex_element = false;
      }
    } else if (tok == "property") {
      std::string type;
      ls >> type;
      if (type == "list") {
        if (in_vertex_element) throw IoError("ply: list property on vertices in " + path);
        continue;
      }
      if (!in_vertex_element) continue;
      Property p;
      p.type = type;
      ls >> p.name;
      p.offset = stride;
      stride += scalar_size(type);
      props.push_back(p);
    } else if (tok == "end_header") {
      break;
    } else {
      throw IoError("ply: unexpected header token '" + tok + "' in " + path);
    }
  }
  if (!format_seen) throw IoError("ply: missing format line in " + path);
  if (props.empty()) throw IoError("ply: no vertex properties in " + path);
  (void)skip_elements_after;  // trailing elements are simply not read

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1, ir = -1, ig = -1, ib = -1;
  for (std::size_t k = 0; k < props.size(); ++k) {
    const std::string &nm = props[k].name;
    int *slot = nullptr;
    if (nm == "x") slot = &ix;
    else if (nm == "y") slot = &iy;
    else if (nm == "z") slot = &iz;
    else if (nm == "nx") slot = &inx;
    else if (nm == "ny") slot = &iny;
    else if (nm == "nz") slot = &inz;
    else if (nm == "red") slot = &ir;
    else if (nm == "green") slot = &ig;
    else if (nm == "blue") slot = &ib;
    if (slot) *slot = static_cast<int>(k);
  }
  if (ix < 0 || iy < 0 || iz < 0) throw IoError("ply: missing x/y/z properties in " + path);
  const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
  const bool has_colors = ir >= 0 && ig >= 0 && ib >= 0;

  PointCloud cloud;
  cloud.positions.reserve(vertex_count);
  if (has_normals) cloud.normals.reserve(vertex_count);
  if (has_colors) cloud.colors.reserve(vertex_count);

  std::vector<double> record(props.size());
  if (binary) {
    if (data.size() - pos < stride * vertex_count)
      throw IoError("ply: truncated vertex data in " + path);
    const unsigned char *base = reinterpret_cast<const unsigned char *>(data.data()) + pos;
    for (std::size_t v = 0; v < vertex_count; ++v, base += stride) {
      for (std::size_t k = 0; k < props.size(); ++k)
        record[k] = decode_scalar(base + props[k].offset, props[k].type);
      cloud.positions.emplace_back(record[ix], record[iy], record[iz]);
      if (has_normals) cloud.normals.emplace_back(record[inx], record[iny], record[inz]);
      if (has_colors)
        cloud.colors.push_back({static_cast<std::uint8_t>(record[ir]),
                                static_cast<std::uint8_t>(record[ig]),
                                static_cast<std::uint8_t>(record[ib])});
    }
  } else {
    std::istringstream body(data.substr(pos));
    for (std::size_t v = 0; v < vertex_count; ++v) {
      for (std::size_t k = 0; k < props.size(); ++k)
        if (!(body >> record[k])) throw IoError("ply: truncated vertex data in " + path);
      cloud.positions.emplace_back(record[ix], record[iy], record[iz]);
      if (has_normals) cloud.normals.emplace_back(record[inx], record[iny], record[inz]);
      if (has_colors)
        cloud.colors.push_back({static_cast<std::uint8_t>(record[ir]),
                                static_cast<std::uint8_t>(record[ig]),
                                static_cast<std::uint8_t>(record[ib])});
    }
  }
  return cloud;
}

}  // namespace planarmvs
