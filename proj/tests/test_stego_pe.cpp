#include <doctest.h>
#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pe_fixture.hpp"
#include "pestego/carrier_io.hpp"
#include "pestego/crc32.hpp"
#include "pestego/error.hpp"
#include "pestego/stego_pe.hpp"

using namespace pestego;
using pestego::testing::FixtureSpec;
using pestego::testing::make_fixture;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pestego::Error");
  return ErrorCode::ParseFailure;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

std::uint32_t zlib_crc(ByteView a, ByteView b) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib treats a null buffer as a request for the initial value.
  if (!a.empty()) c = ::crc32(c, a.data(), static_cast<uInt>(a.size()));
  if (!b.empty()) c = ::crc32(c, b.data(), static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(c);
}

std::filesystem::path scratch_dir(const std::string& leaf) {
  auto p = std::filesystem::temp_directory_path() / ("pestego_test_" + leaf);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("crc32 matches the IEEE reference") {
  const std::string check = "123456789";
  const ByteView v(reinterpret_cast<const std::uint8_t*>(check.data()), check.size());
  CHECK(crc32(v) == 0xCBF43926u);
  CHECK(crc32(ByteView{}) == 0u);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Bytes a = random_bytes(rng, rng() % 300);
    const Bytes b = random_bytes(rng, rng() % 300);
    CHECK(crc32(b, crc32(a)) == zlib_crc(a, b));
  }
}

TEST_CASE("record wire format") {
  const PayloadRecord rec{"ab", Bytes{0x01, 0x02, 0x03}};
  const Bytes enc = rec.encode();
  const std::uint32_t crc = zlib_crc(ByteView(reinterpret_cast<const std::uint8_t*>("ab"), 2), rec.data);
  const Bytes expected{'S', 'P', 'E', '1', 2, 0, 'a', 'b', 3, 0, 0, 0, 1, 2, 3,
                       static_cast<std::uint8_t>(crc), static_cast<std::uint8_t>(crc >> 8),
                       static_cast<std::uint8_t>(crc >> 16), static_cast<std::uint8_t>(crc >> 24)};
  CHECK(enc == expected);
  CHECK(enc.size() == rec.encoded_size());
  CHECK(PayloadRecord::decode(enc) == rec);
}

TEST_CASE("capacity") {
  const auto img = parse_pe(make_fixture().bytes);
  const auto rep = capacity(img, "k.txt");
  CHECK(rep.total == 0x88);
  CHECK(rep.overhead == 19);
  CHECK(rep.usable == 117);
  CHECK(rep.region == Region{0x178, 0x88});

  FixtureSpec tight;
  tight.e_lfanew = 0x68;
  tight.sections.assign(4, pestego::testing::SectionSpec{});
  const auto zero = capacity(parse_pe(make_fixture(tight).bytes), "k.txt");
  CHECK(zero.total == 0);
  CHECK(zero.usable == 0);

  CHECK(code_of([&] { capacity(img, std::string(300, 'a')); }) == ErrorCode::NameTooLong);
  CHECK(code_of([&] { capacity(img, ""); }) == ErrorCode::InvalidName);
  CHECK(code_of([&] { capacity(img, "\xC3\x28"); }) == ErrorCode::InvalidName);
  CHECK_NOTHROW(capacity(img, "r\xC3\xA9sum\xC3\xA9.txt"));
  CHECK_NOTHROW(capacity(img, std::string(255, 'a')));
}

TEST_CASE("hide writes only inside the header slack") {
  const auto fx = make_fixture();
  const auto img = parse_pe(fx.bytes);
  std::mt19937_64 rng(5);
  const Bytes data = random_bytes(rng, 50);
  const auto stego = hide(img, "p.bin", data);
  const Bytes out = stego.serialize();
  REQUIRE(out.size() == fx.bytes.size());
  const Region record{0x178, 19 + 50};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] != fx.bytes[i]) CHECK(record.contains(i));
  CHECK(std::equal(out.begin() + 0x178, out.begin() + 0x17C, "SPE1"));
  CHECK(stego.sections() == img.sections());
  CHECK(stego.nt_headers() == img.nt_headers());

  const auto back = retract(stego);
  CHECK(back.name == "p.bin");
  CHECK(back.data == data);
}

TEST_CASE("hide capacity boundary and guards") {
  const auto img = parse_pe(make_fixture().bytes);
  const auto usable = capacity(img, "p.bin").usable;
  CHECK_NOTHROW(hide(img, "p.bin", Bytes(usable, 0x41)));
  CHECK(code_of([&] { hide(img, "p.bin", Bytes(usable + 1, 0x41)); }) == ErrorCode::InsufficientSlack);

  const auto once = hide(img, "p.bin", Bytes(10, 1));
  CHECK(code_of([&] { hide(once, "p.bin", Bytes(10, 2)); }) == ErrorCode::SlackOccupied);
  const auto twice = hide(once, "q.bin", Bytes(3, 2), HideOptions{true});
  const auto rec = retract(twice);
  CHECK(rec.name == "q.bin");
  CHECK(rec.data == Bytes(3, 2));
  // Tail of the longer first record is cleared.
  const Bytes out = twice.serialize();
  const std::size_t new_len = rec.encoded_size();
  for (std::size_t i = 0x178 + new_len; i < 0x178 + 19 + 10; ++i) CHECK(out[i] == 0);

  FixtureSpec junk;
  junk.header_slack_fill = 0xCC;
  const auto dirty = parse_pe(make_fixture(junk).bytes);
  CHECK(code_of([&] { hide(dirty, "p.bin", Bytes(4, 1)); }) == ErrorCode::SlackOccupied);
  CHECK_NOTHROW(hide(dirty, "p.bin", Bytes(4, 1), HideOptions{true}));

  CHECK(code_of([&] { hide(img, std::string(256, 'n'), Bytes(1)); }) == ErrorCode::NameTooLong);
}

TEST_CASE("retract errors") {
  const auto img = parse_pe(make_fixture().bytes);
  CHECK(code_of([&] { retract(img); }) == ErrorCode::NoPayload);

  const auto stego = hide(img, "p.bin", Bytes{1, 2, 3, 4, 5, 6, 7, 8});
  Bytes flipped = stego.serialize();
  const std::size_t data_at = 0x178 + 4 + 2 + 5 + 4;
  flipped[data_at + 3] ^= 0x01;
  // Reference CRC of the tampered name ++ data differs from the stored one.
  const Bytes tampered_data(flipped.begin() + data_at, flipped.begin() + data_at + 8);
  const std::uint32_t stored = load_le32(flipped, data_at + 8);
  CHECK(zlib_crc(ByteView(reinterpret_cast<const std::uint8_t*>("p.bin"), 5), tampered_data) != stored);
  CHECK(code_of([&] { retract(parse_pe(flipped)); }) == ErrorCode::CorruptPayload);

  Bytes oversize = stego.serialize();
  store_le32(oversize, 0x178 + 4 + 2 + 5, 0x10000);
  CHECK(code_of([&] { retract(parse_pe(oversize)); }) == ErrorCode::CorruptPayload);

  Bytes zero_name = stego.serialize();
  store_le16(zero_name, 0x178 + 4, 0);
  CHECK(code_of([&] { retract(parse_pe(zero_name)); }) == ErrorCode::CorruptPayload);
}

TEST_CASE("round trip property over random names and payloads") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    FixtureSpec spec = pestego::testing::random_spec(rng, 512u << (trial % 3), 4);
    spec.e_lfanew = 0x40;
    const auto fx = make_fixture(spec);
    const auto img = parse_pe(fx.bytes);
    std::string name = "f" + std::to_string(rng() % 100000) + ".dat";
    const auto cap = capacity(img, name);
    if (cap.usable == 0) continue;
    const Bytes data = random_bytes(rng, rng() % (cap.usable + 1));
    const auto stego = hide(img, name, data);
    CHECK(stego.size() == img.size());
    CHECK(retract(stego) == PayloadRecord{name, data});
  }
}

TEST_CASE("write_extracted_file") {
  const auto dir = scratch_dir("extract");
  const Bytes data(50, 0x5A);
  const auto path = write_extracted_file("p.bin", data, dir);
  CHECK(path == dir / "p.bin");
  CHECK(read_file(path) == data);

  CHECK(code_of([&] { write_extracted_file("../x", data, dir); }) == ErrorCode::UnsafeName);
  CHECK(code_of([&] { write_extracted_file("a/b", data, dir); }) == ErrorCode::UnsafeName);
  CHECK(code_of([&] { write_extracted_file("..", data, dir); }) == ErrorCode::UnsafeName);
  CHECK(code_of([&] { write_extracted_file("a\\b", data, dir); }) == ErrorCode::UnsafeName);

  // A regular file where the directory should be.
  const auto blocker = dir / "blocker";
  std::ofstream(blocker) << "x";
  CHECK(code_of([&] { write_extracted_file("p.bin", data, blocker / "sub"); }) == ErrorCode::IoFailure);
  std::filesystem::remove_all(dir);
}
