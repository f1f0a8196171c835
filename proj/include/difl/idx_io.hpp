#pragma once

#include <zlib.h>

#include <cstdint>
#include <string>
#include <vector>

#include "difl/core.hpp"
#include "difl/image.hpp"

namespace difl {

namespace detail {

// All IDX reads go through zlib, which transparently handles both plain and
// gzip-compressed files, so *.gz datasets need no special casing.
class GzReader {
 public:
  explicit GzReader(const std::string& path) : path_(path), file_(gzopen(path.c_str(), "rb")) {
    if (!file_) throw format_error("cannot open " + path);
  }
  ~GzReader() {
    if (file_) gzclose(file_);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;

  void read(void* dst, std::size_t bytes) {
    const int got = gzread(file_, dst, static_cast<unsigned>(bytes));
    if (got < 0 || static_cast<std::size_t>(got) != bytes)
      throw format_error("truncated or corrupt IDX file: " + path_);
  }

  std::uint32_t read_u32_be() {
    unsigned char b[4];
    read(b, 4);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
  }

 private:
  std::string path_;
  gzFile file_;
};

class GzWriter {
 public:
  explicit GzWriter(const std::string& path) : path_(path) {
    // "T" writes raw bytes with no gzip wrapper; only use compression when
    // the caller asked for it by naming the file *.gz.
    const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    file_ = gzopen(path.c_str(), gz ? "wb" : "wbT");
    if (!file_) throw format_error("cannot open " + path + " for writing");
  }
  ~GzWriter() {
    if (file_) gzclose(file_);
  }
  GzWriter(const GzWriter&) = delete;
  GzWriter& operator=(const GzWriter&) = delete;

  void write(const void* src, std::size_t bytes) {
    if (gzwrite(file_, src, static_cast<unsigned>(bytes)) != static_cast<int>(bytes))
      throw format_error("short write to " + path_);
  }

  void write_u32_be(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    write(b, 4);
  }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

inline ImageStack load_idx_images(const std::string& path) {
  detail::GzReader in(path);
  if (in.read_u32_be() != kIdxImageMagic)
    throw format_error("bad IDX image magic in " + path);
  const std::uint32_t count = in.read_u32_be();
  const std::uint32_t rows = in.read_u32_be();
  const std::uint32_t cols = in.read_u32_be();
  if (count == 0 || rows == 0 || cols == 0)
    throw format_error("empty IDX image file: " + path);
  ImageStack stack(static_cast<int>(rows), static_cast<int>(cols), count);
  std::vector<unsigned char> buf(stack.pixels_per_image());
  for (std::size_t i = 0; i < count; ++i) {
    in.read(buf.data(), buf.size());
    double* dst = stack.image_data(i);
    for (std::size_t j = 0; j < buf.size(); ++j) dst[j] = static_cast<double>(buf[j]);
  }
  return stack;
}

inline std::vector<int> load_idx_labels(const std::string& path) {
  detail::GzReader in(path);
  if (in.read_u32_be() != kIdxLabelMagic)
    throw format_error("bad IDX label magic in " + path);
  const std::uint32_t count = in.read_u32_be();
  std::vector<unsigned char> buf(count);
  in.read(buf.data(), buf.size());
  return std::vector<int>(buf.begin(), buf.end());
}

inline LabeledImageSet load_idx(const std::string& image_path, const std::string& label_path) {
  LabeledImageSet set;
  set.images = load_idx_images(image_path);
  set.labels = load_idx_labels(label_path);
  if (set.labels.size() != set.images.count)
    throw format_error("IDX image/label counts differ: " + image_path + " vs " + label_path);
  return set;
}

/// Write pixels rounded to the nearest byte. A trailing ".gz" on the path
/// turns on gzip compression.
inline void save_idx_images(const std::string& path, const ImageStack& stack) {
  detail::GzWriter out(path);
  out.write_u32_be(kIdxImageMagic);
  out.write_u32_be(static_cast<std::uint32_t>(stack.count));
  out.write_u32_be(static_cast<std::uint32_t>(stack.rows));
  out.write_u32_be(static_cast<std::uint32_t>(stack.cols));
  std::vector<unsigned char> buf(stack.pixels_per_image());
  for (std::size_t i = 0; i < stack.count; ++i) {
    const double* src = stack.image_data(i);
    for (std::size_t j = 0; j < buf.size(); ++j) {
      const double v = std::clamp(src[j], 0.0, 255.0);
      buf[j] = static_cast<unsigned char>(std::lround(v));
    }
    out.write(buf.data(), buf.size());
  }
}

inline void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  detail::GzWriter out(path);
  out.write_u32_be(kIdxLabelMagic);
  out.write_u32_be(static_cast<std::uint32_t>(labels.size()));
  std::vector<unsigned char> buf(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && labels[i] <= 255, "save_idx_labels: label out of byte range");
    buf[i] = static_cast<unsigned char>(labels[i]);
  }
  out.write(buf.data(), buf.size());
}

}  // namespace difl
