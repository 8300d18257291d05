#include "molu/datasets.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

namespace molu::data {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::size_t rank_for_magic(std::uint32_t magic) {
  if (magic == kIdxImageMagic) return 3;
  if (magic == kIdxLabelMagic) return 1;
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", magic);
  throw IdxError(IdxError::Kind::BadMagic, std::string("IDX: unsupported magic ") + buf);
}

}  // namespace

std::size_t IdxTensor::element_count() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t d) { return a * d; });
}

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw IdxError(IdxError::Kind::Truncated, "IDX: missing magic number");
  const std::size_t rank = rank_for_magic(read_be32(bytes, 0));
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header)
    throw IdxError(IdxError::Kind::Truncated, "IDX: truncated dimension header");

  IdxTensor t;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    const std::uint32_t d = read_be32(bytes, 4 + 4 * i);
    t.dims.push_back(d);
    count *= d;
    if (count > std::numeric_limits<std::uint32_t>::max())
      throw IdxError(IdxError::Kind::DimensionOverflow, "IDX: element count exceeds 2^32-1");
  }
  if (bytes.size() - header < count)
    throw IdxError(IdxError::Kind::Truncated,
                   "IDX: payload has " + std::to_string(bytes.size() - header) +
                       " bytes, expected " + std::to_string(count));
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header),
                bytes.begin() + static_cast<std::ptrdiff_t>(header + count));
  return t;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor) {
  std::uint32_t magic = 0;
  if (tensor.dims.size() == 3)
    magic = kIdxImageMagic;
  else if (tensor.dims.size() == 1)
    magic = kIdxLabelMagic;
  else
    throw IdxError(IdxError::Kind::WrongRank, "IDX: only rank 1 and rank 3 are supported");
  if (tensor.element_count() != tensor.data.size())
    throw IdxError(IdxError::Kind::Truncated, "IDX: dims do not match payload length");

  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * tensor.dims.size() + tensor.data.size());
  write_be32(out, magic);
  for (std::uint32_t d : tensor.dims) write_be32(out, d);
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

IdxTensor read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_idx(bytes);
  } catch (const IdxError& e) {
    throw IdxError(e.kind(), path.string() + ": " + e.what());
  }
}

Matrix normalize_images(const IdxTensor& raw) {
  if (raw.dims.size() != 3)
    throw IdxError(IdxError::Kind::WrongRank, "normalize_images: expected a rank-3 tensor");
  const std::size_t n = raw.dims[0];
  const std::size_t pixels = std::size_t{raw.dims[1]} * raw.dims[2];
  Matrix m(n, pixels);
  auto out = m.data();
  for (std::size_t i = 0; i < raw.data.size(); ++i) out[i] = raw.data[i] / 255.0;
  return m;
}

std::vector<std::uint32_t> labels_of(const IdxTensor& raw) {
  if (raw.dims.size() != 1)
    throw IdxError(IdxError::Kind::WrongRank, "labels_of: expected a rank-1 tensor");
  return {raw.data.begin(), raw.data.end()};
}

std::vector<std::vector<std::size_t>> shuffled_batches(std::size_t n, std::size_t batch_size,
                                                       SeededPrng& prng) {
  if (n == 0) throw std::invalid_argument("shuffled_batches: n must be positive");
  if (batch_size == 0) throw std::invalid_argument("shuffled_batches: batch_size must be >= 1");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[prng.below(i + 1)]);

  std::vector<std::vector<std::size_t>> batches;
  batches.reserve((n + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                         perm.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

MnistData load_mnist(const std::filesystem::path& dir) {
  MnistData d;
  d.train_images = normalize_images(read_idx_file(dir / "train-images-idx3-ubyte"));
  d.train_labels = labels_of(read_idx_file(dir / "train-labels-idx1-ubyte"));
  d.test_images = normalize_images(read_idx_file(dir / "t10k-images-idx3-ubyte"));
  d.test_labels = labels_of(read_idx_file(dir / "t10k-labels-idx1-ubyte"));
  if (d.train_images.rows() != d.train_labels.size() ||
      d.test_images.rows() != d.test_labels.size())
    throw IdxError(IdxError::Kind::Truncated, "MNIST: image and label counts differ");
  return d;
}

}  // namespace molu::data
