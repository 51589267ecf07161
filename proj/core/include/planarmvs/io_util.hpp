#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace planarmvs {

// Reads a whole file; throws IoError when unreadable.
std::string read_file(const std::string &path);

// Writes atomically: data goes to "<path>.tmp-<pid>" first, then rename.
// Interrupted runs therefore never leave partially written outputs.
void write_file_atomic(const std::string &path, const std::string &data);
void write_file_atomic(const std::string &path, const void *data, std::size_t size);

// Little-endian scalar append/read for binary payloads (the build targets
// little-endian hosts; asserted at startup by the loaders).
void append_le_float(std::string &out, float v);
void append_le_u32(std::string &out, std::uint32_t v);
float read_le_float(const char *p);

}  // namespace planarmvs
