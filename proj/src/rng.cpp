#include "santalo/rng.hpp"

#include <cmath>

namespace santalo {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi, std::uint32_t* lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Block round_once(Philox4x32::Block c, Philox4x32::Key k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], &hi0, &lo0);
  mulhilo(kMul1, c[2], &hi1, &lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Philox4x32::Block Philox4x32::generate(Block counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    counter = round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

NormalStream::NormalStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream)
    : stream_(stream) {
  // Per-(seed, purpose) key derivation: one extra block keeps the 128-bit
  // counter free for (block, stream) addressing.
  Philox4x32::Block d = Philox4x32::generate(
      {static_cast<std::uint32_t>(purpose), 0u, 0u, 0u},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  key_ = {d[0], d[1]};
}

void NormalStream::load_block(std::uint64_t block) const {
  Philox4x32::Block w = Philox4x32::generate(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
      key_);
  std::uint64_t m1 = ((static_cast<std::uint64_t>(w[1]) << 32) | w[0]) >> 11;
  std::uint64_t m2 = ((static_cast<std::uint64_t>(w[3]) << 32) | w[2]) >> 11;
  double u1 = static_cast<double>(m1 + 1) * kInv53;  // (0, 1]: log stays finite
  double u2 = static_cast<double>(m2) * kInv53;      // [0, 1)
  double r = std::sqrt(-2.0 * std::log(u1));
  cached_[0] = r * std::cos(kTwoPi * u2);
  cached_[1] = r * std::sin(kTwoPi * u2);
  cached_block_ = block;
}

double NormalStream::normal(std::uint64_t k) const {
  std::uint64_t block = k >> 1;
  if (block != cached_block_) load_block(block);
  return cached_[k & 1];
}

void NormalStream::fill_normals(std::uint64_t first, int count, double* out) const {
  for (int i = 0; i < count; ++i) out[i] = normal(first + static_cast<std::uint64_t>(i));
}

}  // namespace santalo
