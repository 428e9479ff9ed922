#include <doctest.h>

#include <string>

#include "pestego/carrier_io.hpp"
#include "pestego/error.hpp"

using namespace pestego;

namespace {

Bytes text(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST_CASE("pgm round trip") {
  stat::Carrier c{3, 2, {0, 1, 2, 253, 254, 255}};
  const Bytes enc = write_pgm(c);
  Bytes expected = text("P5\n3 2\n255\n");
  expected.insert(expected.end(), c.pixels.begin(), c.pixels.end());
  CHECK(enc == expected);
  CHECK(read_pgm(enc) == c);
}

TEST_CASE("pgm header comments and whitespace") {
  Bytes b = text("P5 # made by hand\n# another\n2\t2\n255\n");
  b.insert(b.end(), {'\n', 10, 20, 30});
  const auto c = read_pgm(b);
  CHECK(c.width == 2);
  CHECK(c.height == 2);
  CHECK(c.pixels == Bytes{'\n', 10, 20, 30});
}

TEST_CASE("pgm errors") {
  auto bad = [](const Bytes& b) {
    try {
      read_pgm(b);
    } catch (const Error& e) {
      return e.code() == ErrorCode::BadCarrier;
    }
    return false;
  };
  CHECK(bad(text("P2\n1 1\n255\n0")));
  CHECK(bad(text("P5\n2 2\n65535\n")));
  CHECK(bad(text("P5\n2 2\n255\n\x01")));
  CHECK(bad(text("P5\nx 2\n255\n")));
  CHECK(bad(Bytes{}));
}

TEST_CASE("raw grid") {
  const Bytes px{1, 2, 3, 4, 5, 6};
  const auto c = read_raw_grid(px, 3, 2);
  CHECK(c.width == 3);
  CHECK(c.at(2, 1) == 6);
  try {
    read_raw_grid(px, 4, 2);
    FAIL("expected BadCarrier");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadCarrier);
  }
}
