#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molu/matrix.hpp"
#include "molu/prng.hpp"

namespace molu::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

class IdxError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, Truncated, DimensionOverflow, WrongRank, Io };

  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Unsigned-byte IDX tensor. Only the two container types MNIST uses are
/// accepted: rank-3 images (0x0803) and rank-1 labels (0x0801).
struct IdxTensor {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  std::size_t element_count() const;
  friend bool operator==(const IdxTensor&, const IdxTensor&) = default;
};

IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor);
IdxTensor read_idx_file(const std::filesystem::path& path);

/// n x (h*w) matrix with each byte mapped to byte/255.
Matrix normalize_images(const IdxTensor& raw);
std::vector<std::uint32_t> labels_of(const IdxTensor& raw);

/// Fisher-Yates permutation of 0..n-1 cut into batches of `batch_size`; the
/// last batch may be short. Each call draws a fresh permutation from `prng`.
std::vector<std::vector<std::size_t>> shuffled_batches(std::size_t n, std::size_t batch_size,
                                                       SeededPrng& prng);

/// Train/test split in the standard MNIST file layout.
struct MnistData {
  Matrix train_images;
  std::vector<std::uint32_t> train_labels;
  Matrix test_images;
  std::vector<std::uint32_t> test_labels;
};

/// Loads train-images-idx3-ubyte, train-labels-idx1-ubyte,
/// t10k-images-idx3-ubyte and t10k-labels-idx1-ubyte from `dir`.
MnistData load_mnist(const std::filesystem::path& dir);

}  // namespace molu::data
