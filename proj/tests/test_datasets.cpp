#include <doctest.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "molu/datasets.hpp"

using namespace molu;
using namespace molu::data;

namespace {

std::vector<std::uint8_t> image_fixture() {
  // magic 0x00000803, dims 1 x 2 x 2, payload 0 128 255 7
  return {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 128, 255, 7};
}

IdxError::Kind parse_error_kind(const std::vector<std::uint8_t>& bytes) {
  try {
    parse_idx(bytes);
  } catch (const IdxError& e) {
    return e.kind();
  }
  FAIL("expected an IdxError");
  return IdxError::Kind::Io;
}

std::filesystem::path mnist_dir() {
  if (const char* env = std::getenv("MOLU_DATA_DIR")) return env;
  return "data/mnist";
}

}  // namespace

TEST_CASE("hand-built image file") {
  const IdxTensor t = parse_idx(image_fixture());
  CHECK(t.dims == std::vector<std::uint32_t>{1, 2, 2});
  CHECK(t.data == std::vector<std::uint8_t>{0, 128, 255, 7});
}

TEST_CASE("hand-built label file") {
  const std::vector<std::uint8_t> bytes{0, 0, 8, 1, 0, 0, 0, 3, 4, 0, 9};
  const IdxTensor t = parse_idx(bytes);
  CHECK(t.dims == std::vector<std::uint32_t>{3});
  CHECK(labels_of(t) == std::vector<std::uint32_t>{4, 0, 9});
}

TEST_CASE("malformed files raise distinct errors") {
  auto bytes = image_fixture();
  bytes[0] = 0xDE;
  bytes[1] = 0xAD;
  bytes[2] = 0xBE;
  bytes[3] = 0xEF;
  CHECK(parse_error_kind(bytes) == IdxError::Kind::BadMagic);

  auto truncated = image_fixture();
  truncated.pop_back();
  CHECK(parse_error_kind(truncated) == IdxError::Kind::Truncated);
  CHECK(parse_error_kind({0, 0, 8, 3, 0, 0}) == IdxError::Kind::Truncated);
  CHECK(parse_error_kind({0, 0}) == IdxError::Kind::Truncated);

  // 65536 x 65536 x 2 elements does not fit in 32 bits
  const std::vector<std::uint8_t> huge{0, 0, 8, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 2};
  CHECK(parse_error_kind(huge) == IdxError::Kind::DimensionOverflow);
}

TEST_CASE("trailing bytes after the payload are ignored") {
  auto bytes = image_fixture();
  bytes.push_back(99);
  CHECK(parse_idx(bytes).data.size() == 4);
}

TEST_CASE("serialize and parse round trip") {
  IdxTensor images{{2, 3, 2}, {}};
  for (int i = 0; i < 12; ++i) images.data.push_back(static_cast<std::uint8_t>(i * 21));
  CHECK(parse_idx(serialize_idx(images)) == images);
  const IdxTensor labels{{4}, {1, 2, 3, 9}};
  CHECK(parse_idx(serialize_idx(labels)) == labels);
  CHECK(serialize_idx(parse_idx(image_fixture())) == image_fixture());
  CHECK_THROWS_AS(serialize_idx(IdxTensor{{2, 2}, {0, 0, 0, 0}}), IdxError);
}

TEST_CASE("read_idx_file reports missing files as I/O errors") {
  try {
    read_idx_file("/nonexistent/train-images-idx3-ubyte");
    FAIL("expected an IdxError");
  } catch (const IdxError& e) {
    CHECK(e.kind() == IdxError::Kind::Io);
  }
  const auto path = std::filesystem::temp_directory_path() / "molu_fixture.idx";
  {
    std::ofstream f(path, std::ios::binary);
    const auto b = image_fixture();
    f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }
  CHECK(read_idx_file(path).dims == std::vector<std::uint32_t>{1, 2, 2});
  std::filesystem::remove(path);
}

TEST_CASE("normalize_images maps bytes to [0, 1]") {
  const Matrix m = normalize_images(parse_idx(image_fixture()));
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 4);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == doctest::Approx(0.50196).epsilon(1e-5));
  CHECK(m(0, 1) == 128.0 / 255.0);
  CHECK(m(0, 2) == 1.0);
  const IdxTensor blank{{2, 2, 2}, std::vector<std::uint8_t>(8, 0)};
  CHECK(normalize_images(blank).max_abs() == 0.0);
  CHECK_THROWS_AS(normalize_images(IdxTensor{{3}, {1, 2, 3}}), IdxError);
  CHECK_THROWS_AS(labels_of(parse_idx(image_fixture())), IdxError);
}

TEST_CASE("shuffled batches") {
  SeededPrng p(1);
  const auto one = shuffled_batches(5, 64, p);
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 5);

  SeededPrng a(10, streams::kShuffle), b(10, streams::kShuffle);
  const auto ba = shuffled_batches(1000, 64, a);
  CHECK(ba.size() == 16);
  CHECK(ba.back().size() == 1000 - 15 * 64);
  std::set<std::size_t> seen;
  for (const auto& batch : ba)
    for (std::size_t i : batch) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 1000);
  CHECK(*seen.rbegin() == 999);

  CHECK(shuffled_batches(1000, 64, b) == ba);
  // the next epoch draws a fresh permutation
  CHECK_FALSE(shuffled_batches(1000, 64, a) == ba);

  CHECK_THROWS_AS(shuffled_batches(0, 64, p), std::invalid_argument);
  CHECK_THROWS_AS(shuffled_batches(5, 0, p), std::invalid_argument);
}

TEST_CASE("MNIST sanity when the files are present") {
  const auto dir = mnist_dir();
  if (!std::filesystem::exists(dir / "train-images-idx3-ubyte")) {
    MESSAGE("MNIST files not found in " << dir << "; skipping");
    return;
  }
  const MnistData d = load_mnist(dir);
  CHECK(d.train_images.rows() == 60000);
  CHECK(d.train_images.cols() == 28 * 28);
  CHECK(d.test_images.rows() == 10000);
  std::array<int, 10> hist{};
  for (auto l : d.train_labels) {
    REQUIRE(l < 10);
    ++hist[l];
  }
  for (int h : hist) CHECK(h > 0);
  CHECK(d.train_images.max_abs() <= 1.0);
}
