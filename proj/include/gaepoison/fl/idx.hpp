#pragma once

// Readers for the IDX (MNIST / fashion-MNIST) and CIFAR-10 binary formats,
// plus an IDX writer used for fixtures and dataset conversion.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/fl/dataset.hpp"

namespace gaepoison::fl {

inline constexpr std::uint32_t idx_images_magic = 0x00000803;
inline constexpr std::uint32_t idx_labels_magic = 0x00000801;
inline constexpr std::size_t cifar_record_bytes = 1 + 3072;

namespace io_detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t at) {
  return (std::uint32_t{buf[at]} << 24) | (std::uint32_t{buf[at + 1]} << 16) |
         (std::uint32_t{buf[at + 2]} << 8) | std::uint32_t{buf[at + 3]};
}

inline void write_be32(std::ofstream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), b.size());
}

}  // namespace io_detail

/// Loads an IDX image/label file pair. Pixels are scaled to [0,1].
inline Dataset load_idx_dataset(const std::filesystem::path& images_path,
                                const std::filesystem::path& labels_path) {
  const auto images = io_detail::read_file(images_path);
  const auto labels = io_detail::read_file(labels_path);
  const auto fail = [](const std::filesystem::path& p, const std::string& why) {
    return format_error(p.string() + ": " + why);
  };

  if (images.size() < 16) throw fail(images_path, "truncated header");
  if (io_detail::read_be32(images, 0) != idx_images_magic) throw fail(images_path, "bad magic (expected 0x00000803)");
  if (labels.size() < 8) throw fail(labels_path, "truncated header");
  if (io_detail::read_be32(labels, 0) != idx_labels_magic) throw fail(labels_path, "bad magic (expected 0x00000801)");

  const std::size_t n = io_detail::read_be32(images, 4);
  const std::size_t rows = io_detail::read_be32(images, 8);
  const std::size_t cols = io_detail::read_be32(images, 12);
  const std::size_t n_labels = io_detail::read_be32(labels, 4);
  const std::size_t d = rows * cols;

  if (n != n_labels)
    throw fail(labels_path, "holds " + std::to_string(n_labels) + " labels but " + images_path.string() +
                                " holds " + std::to_string(n) + " images");
  if (images.size() < 16 + n * d) throw fail(images_path, "truncated pixel data");
  if (labels.size() < 8 + n) throw fail(labels_path, "truncated label data");

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  ds.labels.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = images[16 + i * d + k] / 255.0;
    ds.labels[i] = labels[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  // MNIST-family datasets have 10 classes; smaller fixtures use what they contain.
  ds.n_classes = std::max(10, max_label + 1);
  return ds;
}

/// Loads and concatenates CIFAR-10 binary batches (1 label byte + 3072 pixel bytes per record).
inline Dataset load_cifar10(const std::vector<std::filesystem::path>& batch_paths) {
  std::vector<std::vector<unsigned char>> blobs;
  std::size_t total = 0;
  for (const auto& p : batch_paths) {
    auto blob = io_detail::read_file(p);
    if (blob.size() % cifar_record_bytes != 0)
      throw format_error(p.string() + ": length " + std::to_string(blob.size()) + " is not a multiple of " +
                         std::to_string(cifar_record_bytes));
    total += blob.size() / cifar_record_bytes;
    blobs.push_back(std::move(blob));
  }
  if (total == 0) throw format_error("CIFAR-10 input contains 0 samples");

  Dataset ds;
  ds.n_classes = 10;
  ds.features.resize(static_cast<Eigen::Index>(total), 3072);
  ds.labels.reserve(total);
  Eigen::Index row = 0;
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    const auto& blob = blobs[b];
    for (std::size_t r = 0; r < blob.size() / cifar_record_bytes; ++r, ++row) {
      const std::size_t at = r * cifar_record_bytes;
      if (blob[at] > 9) throw format_error(batch_paths[b].string() + ": label byte " + std::to_string(blob[at]) + " > 9");
      ds.labels.push_back(blob[at]);
      for (Eigen::Index k = 0; k < 3072; ++k) ds.features(row, k) = blob[at + 1 + static_cast<std::size_t>(k)] / 255.0;
    }
  }
  return ds;
}

/// Writes `ds` as an IDX pair with square images; features are quantised to bytes.
inline void write_idx_dataset(const Dataset& ds, const std::filesystem::path& images_path,
                              const std::filesystem::path& labels_path, std::uint32_t rows, std::uint32_t cols) {
  if (std::size_t{rows} * cols != ds.n_features())
    throw contract_error("image geometry does not match feature count");
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img) throw io_error("cannot write " + images_path.string());
  if (!lab) throw io_error("cannot write " + labels_path.string());
  io_detail::write_be32(img, idx_images_magic);
  io_detail::write_be32(img, static_cast<std::uint32_t>(ds.size()));
  io_detail::write_be32(img, rows);
  io_detail::write_be32(img, cols);
  io_detail::write_be32(lab, idx_labels_magic);
  io_detail::write_be32(lab, static_cast<std::uint32_t>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (Eigen::Index k = 0; k < ds.features.cols(); ++k) {
      const double v = std::clamp(ds.features(static_cast<Eigen::Index>(i), k), 0.0, 1.0);
      img.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
    lab.put(static_cast<char>(ds.labels[i]));
  }
}

}  // namespace gaepoison::fl
