#include "safebench/npy.hpp"
#include "safebench/zip_archive.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace safebench;

namespace {

// Bitwise reflected CRC-32 (poly 0xEDB88320).
std::uint32_t slow_crc32(std::span<const std::uint8_t> bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (auto b : bytes) {
    c ^= b;
    for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
  }
  return ~c;
}

std::vector<std::uint8_t> fixture(const std::string& name) {
  return zip::read_file(std::string(SAFEBENCH_TEST_DATA) + "/" + name);
}

void expect_numpy_pair(const std::vector<zip::Member>& members) {
  ASSERT_EQ(members.size(), 2u);
  EXPECT_EQ(members[0].name, "alpha.npy");
  EXPECT_EQ(members[1].name, "beta.npy");
  EXPECT_EQ(npy::decode(members[0].data).to_doubles(),
            (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto beta = npy::decode(members[1].data);
  EXPECT_EQ(beta.descriptor.shape, (std::vector<std::uint64_t>{2, 2}));
  EXPECT_EQ(beta.to_int64s(), (std::vector<std::int64_t>{0, 1, 2, 3}));
}

}  // namespace

TEST(Crc32, MatchesBitwiseReference) {
  std::mt19937 gen(3);
  for (int n : {0, 1, 9, 1000}) {
    std::vector<std::uint8_t> b(static_cast<std::size_t>(n));
    for (auto& x : b) x = static_cast<std::uint8_t>(gen());
    EXPECT_EQ(zip::crc32(b), slow_crc32(b));
  }
  const std::string check = "123456789";
  EXPECT_EQ(zip::crc32({reinterpret_cast<const std::uint8_t*>(check.data()), check.size()}),
            0xCBF43926u);
}

TEST(ZipRead, NumpyStoredArchive) { expect_numpy_pair(zip::read_all(fixture("stored.npz"))); }

TEST(ZipRead, NumpyDeflatedArchive) {
  const auto bytes = fixture("deflated.npz");
  for (const auto& e : zip::list(bytes)) EXPECT_EQ(e.method, 8);
  expect_numpy_pair(zip::read_all(bytes));
}

TEST(ZipWrite, RoundTripAndDeterminism) {
  std::vector<zip::Member> members{{"a.npy", {1, 2, 3}}, {"b.npy", {}}, {"c.bin", std::vector<std::uint8_t>(5000, 7)}};
  const auto bytes = zip::write_stored(members);
  EXPECT_EQ(bytes, zip::write_stored(members));
  const auto back = zip::read_all(bytes);
  ASSERT_EQ(back.size(), members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    EXPECT_EQ(back[i].name, members[i].name);
    EXPECT_EQ(back[i].data, members[i].data);
  }
  const auto entries = zip::list(bytes);
  for (std::size_t i = 0; i < members.size(); ++i) {
    EXPECT_EQ(entries[i].method, 0);
    EXPECT_EQ(entries[i].crc32, slow_crc32(members[i].data));
  }
}

TEST(ZipRead, CorruptedCrcRejected) {
  std::vector<zip::Member> members{{"a.npy", {1, 2, 3, 4}}};
  auto bytes = zip::write_stored(members);
  const auto entries = zip::list(bytes);
  bytes[entries[0].data_offset] ^= 0xff;
  EXPECT_THROW(zip::read_all(bytes), zip::Error);
}

TEST(ZipRead, GarbageRejected) {
  EXPECT_THROW(zip::list(std::vector<std::uint8_t>{}), zip::Error);
  EXPECT_THROW(zip::list(std::vector<std::uint8_t>(100, 0x50)), zip::Error);
  auto bytes = zip::write_stored(std::vector<zip::Member>{{"x", {1}}});
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(zip::read_all(bytes), zip::Error);
}

TEST(ZipRead, MissingFileIsIoError) {
  EXPECT_THROW(zip::read_file("/nonexistent/dir/file.npz"), std::runtime_error);
}
