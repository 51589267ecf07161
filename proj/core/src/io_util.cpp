#include "planarmvs/io_util.hpp"

#include <unistd.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "planarmvs/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary file formats are little-endian; big-endian hosts are unsupported");

namespace planarmvs {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure: " + path);
  return data;
}

void write_file_atomic(const std::string &path, const void *data, std::size_t size) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create file: " + tmp);
    out.write(static_cast<const char *>(data), static_cast<std::streamsize>(size));
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write failure: " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

void write_file_atomic(const std::string &path, const std::string &data) {
  write_file_atomic(path, data.data(), data.size());
}

void append_le_float(std::string &out, float v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

void append_le_u32(std::string &out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

float read_le_float(const char *p) {
  float v;
  std::memcpy(&v, p, 4);
  return v;
}

}  // namespace planarmvs
