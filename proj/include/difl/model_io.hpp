#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "difl/core.hpp"
#include "difl/stack.hpp"

namespace difl {

namespace detail {

class BinWriter {
 public:
  explicit BinWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw format_error("cannot open " + path + " for writing");
  }
  void bytes(const void* src, std::size_t n) {
    out_.write(static_cast<const char*>(src), static_cast<std::streamsize>(n));
    if (!out_) throw format_error("short write to " + path_);
  }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void matrix_row_major(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw format_error("cannot open " + path);
  }
  void bytes(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw format_error("truncated file: " + path_);
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  Matrix matrix_row_major(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

inline constexpr std::uint32_t kModelMagic = 0x4C464944;    // "DIFL" little-endian
inline constexpr std::uint32_t kFeatureMagic = 0x46464944;  // "DIFF"
inline constexpr std::uint32_t kFormatVersion = 1;

}  // namespace detail

/// Little-endian binary model file: magic "DIFL", version, geometry, then
/// per layer the patch dims, rule/output counts, centers, widths, projection
/// matrix, and eigenvalue ladder; histogram settings close the file.
inline void save_model(const TrainedModel& model, const std::string& path) {
  detail::BinWriter out(path);
  out.u32(detail::kModelMagic);
  out.u32(detail::kFormatVersion);
  out.u32(static_cast<std::uint32_t>(model.m));
  out.u32(static_cast<std::uint32_t>(model.n));
  out.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (const LayerModel& layer : model.layers) {
    out.u32(static_cast<std::uint32_t>(layer.config.h1));
    out.u32(static_cast<std::uint32_t>(layer.config.h2));
    out.u32(static_cast<std::uint32_t>(layer.config.rules));
    out.u32(static_cast<std::uint32_t>(layer.config.outputs));
    out.matrix_row_major(layer.antecedent.centers);
    out.matrix_row_major(layer.antecedent.widths);
    out.matrix_row_major(layer.bank.P);
    for (Eigen::Index i = 0; i < layer.bank.eigenvalues.size(); ++i)
      out.f64(layer.bank.eigenvalues(i));
  }
  out.u32(static_cast<std::uint32_t>(model.output.block_h1));
  out.u32(static_cast<std::uint32_t>(model.output.block_h2));
  out.f64(model.output.overlap);
  out.u32(static_cast<std::uint32_t>(model.output.bits));
}

inline TrainedModel load_model(const std::string& path) {
  detail::BinReader in(path);
  if (in.u32() != detail::kModelMagic) throw format_error("bad model magic in " + path);
  const std::uint32_t version = in.u32();
  if (version != detail::kFormatVersion)
    throw format_error("unsupported model version " + std::to_string(version) + " in " + path);

  TrainedModel model;
  model.format_version = version;
  model.m = static_cast<int>(in.u32());
  model.n = static_cast<int>(in.u32());
  const std::uint32_t S = in.u32();
  if (model.m < 1 || model.n < 1 || S < 1) throw format_error("corrupt model header in " + path);
  for (std::uint32_t s = 0; s < S; ++s) {
    LayerModel layer;
    layer.config.h1 = static_cast<int>(in.u32());
    layer.config.h2 = static_cast<int>(in.u32());
    layer.config.rules = static_cast<int>(in.u32());
    layer.config.outputs = static_cast<int>(in.u32());
    try {
      layer.config.validate();
    } catch (const std::invalid_argument& e) {
      throw format_error("corrupt layer header in " + path + ": " + e.what());
    }
    const Eigen::Index K = layer.config.rules;
    const Eigen::Index d = static_cast<Eigen::Index>(layer.config.h1) * layer.config.h2;
    const Eigen::Index L = layer.config.outputs;
    layer.antecedent.centers = in.matrix_row_major(K, d);
    layer.antecedent.widths = in.matrix_row_major(K, d);
    layer.bank.P = in.matrix_row_major(K * (d + 1), L);
    layer.bank.eigenvalues.resize(L);
    for (Eigen::Index i = 0; i < L; ++i) layer.bank.eigenvalues(i) = in.f64();
    model.layers.push_back(std::move(layer));
  }
  model.output.block_h1 = static_cast<int>(in.u32());
  model.output.block_h2 = static_cast<int>(in.u32());
  model.output.overlap = in.f64();
  model.output.bits = static_cast<int>(in.u32());
  try {
    model.output.validate();
  } catch (const std::invalid_argument& e) {
    throw format_error("corrupt histogram config in " + path + ": " + e.what());
  }
  return model;
}

/// Feature file: magic "DIFF", version, image count, dimension, then the
/// raw histogram counts of each image as u32 (pre-normalization values).
inline void save_features(const Matrix& features, const std::string& path) {
  detail::BinWriter out(path);
  out.u32(detail::kFeatureMagic);
  out.u32(detail::kFormatVersion);
  out.u64(static_cast<std::uint64_t>(features.cols()));
  out.u64(static_cast<std::uint64_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.cols(); ++i)
    for (Eigen::Index j = 0; j < features.rows(); ++j)
      out.u32(static_cast<std::uint32_t>(features(j, i)));
}

inline Matrix load_features(const std::string& path) {
  detail::BinReader in(path);
  if (in.u32() != detail::kFeatureMagic) throw format_error("bad feature magic in " + path);
  const std::uint32_t version = in.u32();
  if (version != detail::kFormatVersion)
    throw format_error("unsupported feature version " + std::to_string(version) + " in " + path);
  const std::uint64_t count = in.u64();
  const std::uint64_t dim = in.u64();
  if (count == 0 || dim == 0) throw format_error("empty feature file: " + path);
  Matrix features(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < features.cols(); ++i)
    for (Eigen::Index j = 0; j < features.rows(); ++j)
      features(j, i) = static_cast<double>(in.u32());
  return features;
}

}  // namespace difl
