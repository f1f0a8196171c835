#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "difl/core.hpp"
#include "difl/image.hpp"

namespace difl {

namespace detail {

// Skips whitespace and '#' comment lines, then reads one ASCII integer.
inline int pgm_next_int(std::istream& in, const std::string& path) {
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  if (ch == EOF || !std::isdigit(ch)) throw format_error("malformed PGM header: " + path);
  int value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    ch = in.get();
  }
  return value;
}

}  // namespace detail

/// Read one binary (P5) PGM image with maxval <= 255.
inline ImageStack load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw format_error("not a binary PGM (P5) file: " + path);
  const int cols = detail::pgm_next_int(in, path);
  const int rows = detail::pgm_next_int(in, path);
  const int maxval = detail::pgm_next_int(in, path);
  if (rows < 1 || cols < 1 || maxval < 1 || maxval > 255)
    throw format_error("unsupported PGM geometry or maxval in " + path);
  // pgm_next_int consumed the single whitespace byte that terminates the
  // header, so the stream now sits on the first pixel

  ImageStack stack(rows, cols, 1);
  std::vector<unsigned char> buf(stack.pixels_per_image());
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw format_error("truncated PGM pixel data: " + path);
  double* dst = stack.image_data(0);
  for (std::size_t j = 0; j < buf.size(); ++j) dst[j] = static_cast<double>(buf[j]);
  return stack;
}

/// Load every *.pgm in a directory. File names must look like
/// <class>_<index>.pgm, e.g. 7_031.pgm; <class> becomes the label. Files are
/// visited in sorted name order so loading is reproducible. When resize_to is
/// given, every image is bilinearly resampled to that geometry; otherwise all
/// files must already share one geometry.
inline LabeledImageSet load_pgm_dir(const std::string& dir,
                                    std::optional<std::pair<int, int>> resize_to = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw format_error("not a directory: " + dir);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  }
  if (files.empty()) throw format_error("no .pgm files in " + dir);
  std::sort(files.begin(), files.end());

  LabeledImageSet set;
  std::vector<ImageStack> loaded;
  loaded.reserve(files.size());
  for (const auto& path : files) {
    const std::string stem = path.stem().string();
    const auto underscore = stem.find('_');
    if (underscore == std::string::npos || underscore == 0)
      throw format_error("PGM name is not <class>_<index>.pgm: " + path.string());
    int label = 0;
    try {
      std::size_t used = 0;
      label = std::stoi(stem.substr(0, underscore), &used);
      if (used != underscore || label < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw format_error("PGM name is not <class>_<index>.pgm: " + path.string());
    }
    ImageStack img = load_pgm(path.string());
    if (resize_to) img = resize_bilinear(img, resize_to->first, resize_to->second);
    loaded.push_back(std::move(img));
    set.labels.push_back(label);
  }

  const int rows = loaded.front().rows;
  const int cols = loaded.front().cols;
  for (const auto& img : loaded)
    if (img.rows != rows || img.cols != cols)
      throw format_error("PGM images in " + dir + " have mixed sizes; pass a resize target");

  set.images = ImageStack(rows, cols, loaded.size());
  for (std::size_t i = 0; i < loaded.size(); ++i)
    std::copy_n(loaded[i].image_data(0), loaded[i].pixels_per_image(),
                set.images.image_data(i));
  return set;
}

}  // namespace difl
