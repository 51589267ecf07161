#include "planarmvs/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "planarmvs/errors.hpp"
#include "planarmvs/io_util.hpp"

namespace planarmvs {

double sample_bilinear(const ImageF &img, double x, double y) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  x0 = std::clamp(x0, 0, img.width() - 2 >= 0 ? img.width() - 2 : 0);
  y0 = std::clamp(y0, 0, img.height() - 2 >= 0 ? img.height() - 2 : 0);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1.0 - fy) * ((1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
         fy * ((1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
}

namespace {

// Reads the next whitespace/comment-delimited token of a PNM header.
std::size_t next_token(const std::string &data, std::size_t pos, std::string *token) {
  while (pos < data.size()) {
    if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  *token = data.substr(start, pos - start);
  return pos;
}

int parse_int(const std::string &token, const std::string &path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception &) {
    throw IoError("malformed PNM header in " + path);
  }
}

}  // namespace

ImageF load_image(const std::string &path, ImageRgb *rgb) {
  const std::string data = read_file(path);
  std::string magic, tok_w, tok_h, tok_max;
  std::size_t pos = next_token(data, 0, &magic);
  if (magic != "P5" && magic != "P6")
    throw IoError("unsupported image format (want binary PGM/PPM): " + path);
  pos = next_token(data, pos, &tok_w);
  pos = next_token(data, pos, &tok_h);
  pos = next_token(data, pos, &tok_max);
  const int w = parse_int(tok_w, path);
  const int h = parse_int(tok_h, path);
  const int maxval = parse_int(tok_max, path);
  if (w <= 0 || h <= 0) throw IoError("non-positive image dimensions: " + path);
  if (maxval != 255) throw IoError("only 8-bit PNM supported (maxval 255): " + path);
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
    throw IoError("malformed PNM header in " + path);
  ++pos;  // single whitespace byte before the raster

  const int channels = (magic == "P6") ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (data.size() - pos < need) throw IoError("truncated image payload: " + path);

  ImageF gray(w, h);
  if (rgb) *rgb = ImageRgb(w, h);
  const unsigned char *p = reinterpret_cast<const unsigned char *>(data.data() + pos);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (channels == 1) {
        const unsigned char g = *p++;
        gray.at(x, y) = static_cast<float>(g / 255.0);
        if (rgb) rgb->at(x, y) = {g, g, g};
      } else {
        const unsigned char r = p[0], g = p[1], b = p[2];
        p += 3;
        gray.at(x, y) = static_cast<float>((0.299 * r + 0.587 * g + 0.114 * b) / 255.0);
        if (rgb) rgb->at(x, y) = {r, g, b};
      }
    }
  }
  return gray;
}

void save_pgm(const ImageF &img, const std::string &path) {
  std::ostringstream header;
  header << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::string out = header.str();
  out.reserve(out.size() + img.size());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double v = std::clamp(static_cast<double>(img.at(x, y)), 0.0, 1.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  write_file_atomic(path, out);
}

void save_ppm(const ImageRgb &img, const std::string &path) {
  std::ostringstream header;
  header << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  std::string out = header.str();
  out.reserve(out.size() + img.size() * 3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        out.push_back(static_cast<char>(img.at(x, y)[c]));
  write_file_atomic(path, out);
}

ImageF downscale(const ImageF &img, int factor) {
  if (factor <= 1) return img;
  const int w = std::max(1, img.width() / factor);
  const int h = std::max(1, img.height() / factor);
  ImageF out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = 0; dy < factor; ++dy)
        for (int dx = 0; dx < factor; ++dx)
          acc += img.at(std::min(x * factor + dx, img.width() - 1),
                        std::min(y * factor + dy, img.height() - 1));
      out.at(x, y) = static_cast<float>(acc / (factor * factor));
    }
  return out;
}

ImageRgb downscale(const ImageRgb &img, int factor) {
  if (factor <= 1) return img;
  const int w = std::max(1, img.width() / factor);
  const int h = std::max(1, img.height() / factor);
  ImageRgb out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int dy = 0; dy < factor; ++dy)
        for (int dx = 0; dx < factor; ++dx) {
          const auto &px = img.at(std::min(x * factor + dx, img.width() - 1),
                                  std::min(y * factor + dy, img.height() - 1));
          for (int c = 0; c < 3; ++c) acc[c] += px[c];
        }
      for (int c = 0; c < 3; ++c)
        out.at(x, y)[c] = static_cast<std::uint8_t>(std::lround(acc[c] / (factor * factor)));
    }
  return out;
}

}  // namespace planarmvs
