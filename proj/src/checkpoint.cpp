#include "fragkin/checkpoint.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "fragkin/errors.hpp"

namespace fragkin {

namespace {

constexpr char kMagic[] = "FRAGKINv1";
constexpr std::size_t kMagicSize = sizeof(kMagic) - 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::vector<unsigned char>& buf, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& buf) : buf_(buf) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > buf_.size()) throw CorruptionError("checkpoint truncated");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, buf_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
  std::size_t position() const noexcept { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::vector<unsigned char>& buf_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, data, static_cast<uInt>(n));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void write_checkpoint(const RunState& state, std::ostream& out) {
  const SpaceGrid& sp = state.u.space();
  const SizeGrid& sg = state.u.sizes();
  std::vector<unsigned char> buf(kMagic, kMagic + kMagicSize);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(sp.dim()));
  put<double>(buf, sp.length());
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(sp.points_per_axis()));
  put<double>(buf, sg.xi_min());
  put<double>(buf, sg.xi_max());
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(sg.size()));
  put<double>(buf, state.t);
  put<std::uint64_t>(buf, state.step_count);
  put<double>(buf, state.underflow);
  put<double>(buf, state.overflow);
  for (double v : state.u.values()) put<double>(buf, v);
  put<std::uint32_t>(buf, crc_of(buf.data(), buf.size()));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("checkpoint write failed");
}

void write_checkpoint(const RunState& state, const std::string& path) {
  // Write to a sibling file and rename so a crash never leaves a torn checkpoint.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open checkpoint for writing: " + path);
    write_checkpoint(state, f);
    f.flush();
    if (!f) throw Error("checkpoint write failed: " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot move checkpoint into place: " + path);
}

RunState read_checkpoint(std::istream& in) {
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kMagicSize + 4 || std::memcmp(buf.data(), kMagic, kMagicSize) != 0)
    throw CorruptionError("checkpoint magic mismatch");
  Reader r(buf);
  r.skip(kMagicSize);
  const auto dim = r.get<std::uint32_t>();
  const auto length = r.get<double>();
  const auto n = r.get<std::uint32_t>();
  const auto xi_min = r.get<double>();
  const auto xi_max = r.get<double>();
  const auto m = r.get<std::uint32_t>();
  const auto t = r.get<double>();
  const auto steps = r.get<std::uint64_t>();
  const auto under = r.get<double>();
  const auto over = r.get<double>();

  std::shared_ptr<const SpaceGrid> space;
  std::shared_ptr<const SizeGrid> sizes;
  try {
    space = std::make_shared<const SpaceGrid>(static_cast<int>(dim), length, n);
    sizes = std::make_shared<const SizeGrid>(xi_min, xi_max, m);
  } catch (const InvalidArgument& e) {
    throw CorruptionError(std::string("checkpoint grid descriptor invalid: ") + e.what());
  }
  const std::size_t count = space->num_cells() * sizes->size();
  const std::size_t expected = r.position() + count * sizeof(double) + sizeof(std::uint32_t);
  if (buf.size() != expected) throw CorruptionError("checkpoint length does not match its grid descriptors");

  const std::size_t body = buf.size() - sizeof(std::uint32_t);
  Reader tail(buf);
  tail.skip(body);
  if (tail.get<std::uint32_t>() != crc_of(buf.data(), body)) throw CorruptionError("checkpoint CRC mismatch");

  Field u(space, sizes);
  for (double& v : u.values()) v = r.get<double>();
  RunState s{t, steps, std::move(u), under, over};
  return s;
}

RunState read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CorruptionError("cannot open checkpoint: " + path);
  return read_checkpoint(f);
}

}  // namespace fragkin
