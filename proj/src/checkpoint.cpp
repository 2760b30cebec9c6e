#include "cbsq/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "cbsq/errors.hpp"
#include "cbsq/io.hpp"

namespace cbsq::checkpoint {

namespace {

constexpr char magic[5] = {'C', 'B', 'S', 'Q', '1'};

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw Error(ErrorKind::io, "checkpoint truncated");
  }
  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const SimState& s) {
  require_compatible(s.omega, s.theta, "checkpoint::encode");
  const auto& lat = s.omega.lattice();
  std::vector<std::uint8_t> out;
  out.reserve(64 + 32 * lat.size());
  out.insert(out.end(), magic, magic + 5);
  out.push_back(version);
  put_le(out, static_cast<std::uint32_t>(lat.kmax));
  put_le(out, static_cast<std::uint32_t>(lat.jmax));
  put_f64(out, lat.ly);
  put_f64(out, s.t);
  put_f64(out, s.params.nu);
  put_f64(out, s.params.mu);
  out.push_back(static_cast<std::uint8_t>(s.params.sigma));
  put_f64(out, s.params.b);
  for (const SpectralField* f : {&s.omega, &s.theta})
    for (const cplx& c : f->coeffs()) {
      put_f64(out, c.real());
      put_f64(out, c.imag());
    }
  return out;
}

SimState decode(std::span<const std::uint8_t> bytes, const PhysicsParams& params) {
  Reader r(bytes);
  const auto m = r.take(5);
  if (std::memcmp(m.data(), magic, 5) != 0) throw Error(ErrorKind::io, "checkpoint: bad magic");
  const auto ver = r.le<std::uint8_t>();
  if (ver != version)
    throw Error(ErrorKind::io, "checkpoint: unsupported version " + std::to_string(ver));
  const auto kmax = r.le<std::uint32_t>();
  const auto jmax = r.le<std::uint32_t>();
  const double ly = r.f64();
  const double t = r.f64();
  PhysicsParams p = params;
  p.nu = r.f64();
  p.mu = r.f64();
  p.sigma = r.le<std::uint8_t>();
  p.b = r.f64();
  if (kmax == 0 || jmax == 0 || kmax > (1u << 20) || jmax > (1u << 24) || !(ly > 0.0))
    throw Error(ErrorKind::io, "checkpoint: invalid lattice header");
  const FrequencyLattice lat(static_cast<int>(kmax), static_cast<int>(jmax), ly);
  r.need(2 * 16 * lat.size());
  SimState s{SpectralField(lat, t), SpectralField(lat, t), p, t, 0};
  for (SpectralField* f : {&s.omega, &s.theta})
    for (cplx& c : f->coeffs()) {
      const double re = r.f64();
      const double im = r.f64();
      c = cplx{re, im};
    }
  if (!r.done()) throw Error(ErrorKind::io, "checkpoint: trailing bytes");
  return s;
}

void write(const std::filesystem::path& path, const SimState& state) {
  const auto bytes = encode(state);
  io::write_atomic(path, std::span<const std::uint8_t>(bytes));
}

SimState read(const std::filesystem::path& path, const PhysicsParams& params) {
  const auto bytes = io::read_bytes(path);
  return decode(bytes, params);
}

std::string state_hash(const SimState& state) {
  const auto bytes = encode(state);
  return io::git_blob_hash(std::span<const std::uint8_t>(bytes));
}

}  // namespace cbsq::checkpoint
