#pragma once

#include <array>
#include <cstdint>

namespace santalo {

inline constexpr const char* kGeneratorTag = "philox4x32-10+box-muller";

// Philox 4x32, 10 rounds. Counter-based: the same (counter, key) pair always
// produces the same 128-bit block, so every draw in the library is addressed
// by index instead of by generator state. That is what makes results
// independent of the worker count and lets tests replay any single sample.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key);
};

// Independent uses of one seed get disjoint stream families.
enum class StreamPurpose : std::uint32_t {
  kMcSamples = 1,
  kPathIncrements = 2,
  kScratch = 3,
};

// Stream of N(0,1) draws addressed by (seed, purpose, stream, index).
// Each Philox block yields two normals via Box-Muller; the last block is
// cached so sequential access costs one block per two draws.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream);

  // k-th standard normal of this stream, k >= 0. Random access.
  double normal(std::uint64_t k) const;

  void fill_normals(std::uint64_t first, int count, double* out) const;

 private:
  void load_block(std::uint64_t block) const;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  mutable std::uint64_t cached_block_ = ~std::uint64_t{0};
  mutable std::array<double, 2> cached_{};
};

}  // namespace santalo
