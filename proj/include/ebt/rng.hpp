#pragma once

#include <cstdint>

namespace ebt {

// Counter-based RNG (Philox4x32, 10 rounds). Every consumer owns a stream
// keyed by (seed, purpose, substream), so draws are reproducible bit for bit
// regardless of evaluation order or thread count. Purposes are small integers
// defined at the call sites; substream is typically a day index.
//
// One block yields four 32-bit words; the generator buffers them and hands out
// 64-bit chunks.

void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]);

class Philox {
  public:
    Philox(std::uint64_t seed, std::uint32_t purpose, std::uint32_t substream = 0);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); safe to feed into quantile functions.
    double uniform();

    // Standard normal via the inverse CDF.
    double normal();

    // Integer in [0, n). Fixed-point multiply; bias is O(2^-64), irrelevant here.
    std::uint64_t below(std::uint64_t n);

  private:
    void refill();

    std::uint32_t key_[2];
    std::uint32_t prefix_[2]; // purpose, substream
    std::uint64_t index_ = 0; // block counter
    std::uint32_t buf_[4];
    int pos_ = 4; // words consumed from buf_
};

// Inverse standard normal CDF, full double accuracy (Wichura's AS241 PPND16).
double norm_quantile(double p);

double norm_pdf(double x);
double norm_cdf(double x);

} // namespace ebt
