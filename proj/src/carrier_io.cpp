#include "pestego/carrier_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "pestego/error.hpp"

namespace pestego {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(ByteView b) : b_(b) {}

  std::uint64_t number() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw Error(ErrorCode::BadCarrier, "malformed PGM header");
    std::uint64_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > 0xFFFFFFFFull) throw Error(ErrorCode::BadCarrier, "PGM header value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_])) throw Error(ErrorCode::BadCarrier, "malformed PGM header");
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  ByteView b_;
};

}  // namespace

stat::Carrier read_pgm(ByteView bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw Error(ErrorCode::BadCarrier, "not a binary PGM (P5) file");
  HeaderReader hdr(bytes);
  const auto width = hdr.number();
  const auto height = hdr.number();
  const auto maxval = hdr.number();
  if (maxval != 255) throw Error(ErrorCode::BadCarrier, "only maxval 255 is supported, got " + std::to_string(maxval));
  const std::size_t start = hdr.raster_start();
  const std::uint64_t need = width * height;
  if (bytes.size() - start < need) throw Error(ErrorCode::BadCarrier, "PGM raster is truncated");

  stat::Carrier c;
  c.width = static_cast<std::uint32_t>(width);
  c.height = static_cast<std::uint32_t>(height);
  c.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                  bytes.begin() + static_cast<std::ptrdiff_t>(start + need));
  return c;
}

Bytes write_pgm(const stat::Carrier& carrier) {
  if (std::size_t{carrier.width} * carrier.height != carrier.pixels.size())
    throw Error(ErrorCode::BadCarrier, "carrier pixel count does not match width * height");
  const std::string header = "P5\n" + std::to_string(carrier.width) + " " + std::to_string(carrier.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), carrier.pixels.begin(), carrier.pixels.end());
  return out;
}

stat::Carrier read_raw_grid(ByteView bytes, std::uint32_t width, std::uint32_t height) {
  if (std::uint64_t{width} * height != bytes.size())
    throw Error(ErrorCode::BadCarrier, "raw grid has " + std::to_string(bytes.size()) + " bytes, expected " +
                                           std::to_string(std::uint64_t{width} * height));
  return stat::Carrier{width, height, Bytes(bytes.begin(), bytes.end())};
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "failed reading " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

}  // namespace pestego
