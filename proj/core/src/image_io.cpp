#include "dtt/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "dtt/error.hpp"

namespace dtt {
namespace {

constexpr double kWr = 0.299;
constexpr double kWg = 0.587;
constexpr double kWb = 0.114;

[[noreturn]] void undecodable(const std::filesystem::path& path, const std::string& why) {
  throw IngestError(IngestErrc::undecodable, "cannot decode " + path.string() + ": " + why);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

float to_unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

Frame read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) undecodable(path, "cannot open");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    undecodable(path, "not a PNG");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) undecodable(path, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    undecodable(path, "libpng init failed");
  }
  std::vector<unsigned char> buffer;
  std::vector<png_bytep> rows;
  int width = 0;
  int height = 0;
  int channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    undecodable(path, "corrupt PNG data");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + stride * y;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) undecodable(path, "unsupported channel layout");
  std::vector<float> luma(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const unsigned char* row = rows[y];
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      if (channels == 1) {
        v = row[x] / 255.0;
      } else {
        const unsigned char* p = row + 3 * x;
        v = (kWr * p[0] + kWg * p[1] + kWb * p[2]) / 255.0;
      }
      luma[static_cast<std::size_t>(y) * width + x] = to_unit(v);
    }
  }
  return Frame(width, height, std::move(luma));
}

// Skips whitespace and '#' comments in a PNM header.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      tok.push_back(c);
      break;
    }
  }
  while (in.get(c)) {
    if (std::isspace(static_cast<unsigned char>(c))) break;
    tok.push_back(c);
  }
  return !tok.empty();
}

struct PgmData {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<unsigned> values;
};

PgmData read_pgm_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) undecodable(path, "cannot open");
  std::string magic;
  std::string tw;
  std::string th;
  std::string tm;
  if (!next_token(in, magic) || (magic != "P5" && magic != "P2")) undecodable(path, "not a PGM");
  if (!next_token(in, tw) || !next_token(in, th) || !next_token(in, tm)) {
    undecodable(path, "truncated header");
  }
  PgmData d;
  try {
    d.width = std::stoi(tw);
    d.height = std::stoi(th);
    d.maxval = std::stoi(tm);
  } catch (const std::exception&) {
    undecodable(path, "bad header field");
  }
  if (d.width <= 0 || d.height <= 0 || d.maxval <= 0 || d.maxval > 65535) {
    undecodable(path, "bad header values");
  }
  const std::size_t n = static_cast<std::size_t>(d.width) * d.height;
  d.values.resize(n);
  if (magic == "P5") {
    const int bytes = d.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      undecodable(path, "truncated pixel data");
    }
    for (std::size_t i = 0; i < n; ++i) {
      d.values[i] = bytes == 1 ? raw[i] : (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
    }
  } else {
    std::string tok;
    for (std::size_t i = 0; i < n; ++i) {
      if (!next_token(in, tok)) undecodable(path, "truncated pixel data");
      d.values[i] = static_cast<unsigned>(std::stoul(tok));
    }
  }
  return d;
}

Frame read_pgm(const std::filesystem::path& path) {
  PgmData d = read_pgm_raw(path);
  std::vector<float> luma(d.values.size());
  for (std::size_t i = 0; i < luma.size(); ++i) {
    luma[i] = to_unit(static_cast<double>(d.values[i]) / d.maxval);
  }
  return Frame(d.width, d.height, std::move(luma));
}

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0F, 1.0F) * 255.0F));
}

void write_png_impl(const std::filesystem::path& path, int width, int height, int color_type,
                    const std::uint8_t* data, std::size_t stride) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png == nullptr ? nullptr : png_create_info_struct(png);
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + stride * y));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Frame read_image(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  undecodable(path, "unsupported extension");
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  std::vector<std::uint8_t> bytes(frame.size());
  std::transform(frame.luma().begin(), frame.luma().end(), bytes.begin(), to_byte);
  write_png_impl(path, frame.width(), frame.height(), PNG_COLOR_TYPE_GRAY, bytes.data(),
                 static_cast<std::size_t>(frame.width()));
}

void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) {
    throw InvalidArgument("rgb buffer size mismatch");
  }
  write_png_impl(path, width, height, PNG_COLOR_TYPE_RGB, rgb.data(),
                 static_cast<std::size_t>(width) * 3);
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  for (float v : frame.luma()) out.put(static_cast<char>(to_byte(v)));
}

void write_mask_pgm(const std::filesystem::path& path, const Mask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  for (auto b : mask.bits) out.put(static_cast<char>(b ? 255 : 0));
}

Mask read_mask_pgm(const std::filesystem::path& path) {
  PgmData d = read_pgm_raw(path);
  Mask m(d.width, d.height);
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    m.bits[i] = 2 * d.values[i] >= static_cast<unsigned>(d.maxval) ? 1 : 0;
  }
  return m;
}

}  // namespace dtt
