#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "partpq/codec.hpp"
#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"

namespace partpq {

enum class MapFormat { Packed, Planar };

inline MapFormat map_format_from_string(std::string_view s) {
  if (s == "packed") return MapFormat::Packed;
  if (s == "planar") return MapFormat::Planar;
  throw IoError("unknown label-map format \"" + std::string(s) + "\" (expected packed|planar)");
}

struct GrayImage16 {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> samples;

  GrayImage16() = default;
  GrayImage16(int w, int h) : width(w), height(h), samples(static_cast<size_t>(w) * h, 0) {}
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void png_abort(png_structp, png_const_charp msg) {
  throw IoError(std::string("png: ") + (msg ? msg : "unknown error"));
}

inline void png_ignore(png_structp, png_const_charp) {}

}  // namespace detail

inline GrayImage16 read_png16(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_abort, detail::png_ignore);
  if (!png) throw IoError("png: failed to create read struct");
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_GRAY)
      throw IoError(path + ": expected a grayscale PNG, got color type " + std::to_string(color));
    const int depth = png_get_bit_depth(png, info);
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png);  // PNG stores big-endian samples
    png_read_update_info(png, info);
    GrayImage16 img(int(png_get_image_width(png, info)), int(png_get_image_height(png, info)));
    if (depth == 16) {
      std::vector<png_bytep> rows(img.height);
      for (int y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(img.samples.data() + size_t(y) * img.width);
      png_read_image(png, rows.data());
    } else {
      std::vector<uint8_t> buf(size_t(img.width) * img.height);
      std::vector<png_bytep> rows(img.height);
      for (int y = 0; y < img.height; ++y) rows[y] = buf.data() + size_t(y) * img.width;
      png_read_image(png, rows.data());
      std::copy(buf.begin(), buf.end(), img.samples.begin());
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

inline void write_png16(const std::string& path, const GrayImage16& img) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_abort,
                                            detail::png_ignore);
  if (!png) throw IoError("png: failed to create write struct");
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
      rows[y] = reinterpret_cast<png_bytep>(
          const_cast<uint16_t*>(img.samples.data() + size_t(y) * img.width));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
}

inline void write_png_rgb8(const std::string& path, int width, int height,
                           const std::vector<uint8_t>& rgb) {
  if (rgb.size() != size_t(width) * height * 3) throw IoError("rgb buffer size mismatch");
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, detail::png_abort,
                                            detail::png_ignore);
  if (!png) throw IoError("png: failed to create write struct");
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
      rows[y] = const_cast<uint8_t*>(rgb.data() + size_t(y) * width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
}

// --- raw u32 sidecar (packed maps whose uids exceed 65535) ---

inline constexpr std::string_view kU32Extension = ".u32";

inline void write_u32_raw(const std::string& path, int width, int height,
                          const std::vector<uint32_t>& values) {
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path);
  auto put32 = [&](uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    if (std::fwrite(b, 1, 4, fp.get()) != 4) throw IoError("short write: " + path);
  };
  put32(uint32_t(width));
  put32(uint32_t(height));
  for (uint32_t v : values) put32(v);
}

inline std::vector<uint32_t> read_u32_raw(const std::string& path, int& width, int& height) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);
  auto get32 = [&]() {
    uint8_t b[4];
    if (std::fread(b, 1, 4, fp.get()) != 4) throw IoError("truncated u32 file: " + path);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
  };
  width = int(get32());
  height = int(get32());
  if (width <= 0 || height <= 0) throw IoError("bad u32 header in " + path);
  std::vector<uint32_t> values(size_t(width) * height);
  for (auto& v : values) v = get32();
  return values;
}

// --- label-map files ---

inline constexpr uint16_t kPlanarNone = 65535;

namespace detail {

inline std::string planar_plane_path(const std::string& stem, const char* plane) {
  return stem + "_" + plane + ".png";
}

// Accepts either a bare stem or any one of the three plane paths.
inline std::string planar_stem(const std::string& path) {
  for (const char* suffix : {"_sem.png", "_inst.png", "_part.png"}) {
    if (path.size() > std::strlen(suffix) && path.ends_with(suffix))
      return path.substr(0, path.size() - std::strlen(suffix));
  }
  return path;
}

inline bool has_png_magic(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) return false;
  uint8_t magic[8] = {};
  const size_t n = std::fread(magic, 1, 8, fp.get());
  return n == 8 && png_sig_cmp(magic, 0, 8) == 0;
}

}  // namespace detail

// Writes a label map and returns the paths produced. Packed maps become a
// 16-bit grayscale PNG, or a raw .u32 sidecar when some uid exceeds 65535.
// Planar maps become three 16-bit planes <stem>_{sem,inst,part}.png with
// 65535 as the "none" sentinel.
inline std::vector<std::string> write_label_map(const LabelMap& map, const std::string& path,
                                                MapFormat format) {
  if (map.size() <= 0) throw IoError("refusing to write an empty label map");
  if (format == MapFormat::Packed) {
    std::vector<uint32_t> uids(map.pixels.size());
    uint32_t max_uid = 0;
    for (size_t i = 0; i < map.pixels.size(); ++i) {
      uids[i] = encode_uid(map.pixels[i]);
      max_uid = std::max(max_uid, uids[i]);
    }
    if (max_uid < 65536) {
      GrayImage16 img(map.width, map.height);
      for (size_t i = 0; i < uids.size(); ++i) img.samples[i] = uint16_t(uids[i]);
      write_png16(path, img);
      return {path};
    }
    std::filesystem::path p(path);
    p.replace_extension(kU32Extension);
    write_u32_raw(p.string(), map.width, map.height, uids);
    return {p.string()};
  }
  const std::string stem = detail::planar_stem(path);
  GrayImage16 sem(map.width, map.height), inst(map.width, map.height), part(map.width, map.height);
  for (int64_t i = 0; i < map.size(); ++i) {
    const LabelTriple& t = map.pixels[i];
    sem.samples[i] = t.sid == kVoidClass ? kPlanarNone : t.sid;
    inst.samples[i] = t.has_instance() ? t.iid : kPlanarNone;
    part.samples[i] = t.has_part() ? t.pid : kPlanarNone;
  }
  std::vector<std::string> out;
  for (auto& [plane, img] :
       {std::pair<const char*, GrayImage16*>{"sem", &sem}, {"inst", &inst}, {"part", &part}}) {
    out.push_back(detail::planar_plane_path(stem, plane));
    write_png16(out.back(), *img);
  }
  return out;
}

inline LabelMap read_label_map(const std::string& path, MapFormat format, const DatasetSpec& spec) {
  if (format == MapFormat::Packed) {
    std::string actual = path;
    if (!std::filesystem::exists(actual)) {
      std::filesystem::path sidecar(path);
      sidecar.replace_extension(kU32Extension);
      if (std::filesystem::exists(sidecar))
        actual = sidecar.string();
      else
        throw IoError("no such file: " + path);
    }
    std::vector<uint32_t> uids;
    int w = 0, h = 0;
    if (detail::has_png_magic(actual)) {
      GrayImage16 img = read_png16(actual);
      w = img.width;
      h = img.height;
      uids.assign(img.samples.begin(), img.samples.end());
    } else {
      uids = read_u32_raw(actual, w, h);
    }
    LabelMap map(w, h);
    for (size_t i = 0; i < uids.size(); ++i) {
      try {
        map.pixels[i] = decode_uid(uids[i], spec);
      } catch (const CodecError& e) {
        throw IoError(actual + ", pixel " + std::to_string(i) + ": " + e.what());
      }
    }
    return map;
  }
  const std::string stem = detail::planar_stem(path);
  GrayImage16 sem = read_png16(detail::planar_plane_path(stem, "sem"));
  GrayImage16 inst = read_png16(detail::planar_plane_path(stem, "inst"));
  GrayImage16 part = read_png16(detail::planar_plane_path(stem, "part"));
  if (inst.width != sem.width || inst.height != sem.height)
    throw IoError(stem + ": instance plane " + std::to_string(inst.width) + "x" +
                  std::to_string(inst.height) + " does not match semantic plane " +
                  std::to_string(sem.width) + "x" + std::to_string(sem.height));
  if (part.width != sem.width || part.height != sem.height)
    throw IoError(stem + ": part plane " + std::to_string(part.width) + "x" +
                  std::to_string(part.height) + " does not match semantic plane " +
                  std::to_string(sem.width) + "x" + std::to_string(sem.height));
  LabelMap map(sem.width, sem.height);
  for (int64_t i = 0; i < map.size(); ++i) {
    LabelTriple t;
    t.sid = sem.samples[i] == kPlanarNone ? kVoidClass : sem.samples[i];
    t.iid = inst.samples[i] == kPlanarNone ? kNoInstance : inst.samples[i];
    t.pid = part.samples[i] == kPlanarNone ? kNoPart : part.samples[i];
    map.pixels[i] = t;
  }
  return map;
}

}  // namespace partpq
