#include "ebt/rng.hpp"

#include <cmath>
#include <limits>

#include "ebt/errors.hpp"

namespace ebt {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWey0 = 0x9E3779B9u;
constexpr std::uint32_t kWey1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void round_once(std::uint32_t c[4], const std::uint32_t k[2]) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    std::uint32_t n0 = hi1 ^ c[1] ^ k[0];
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c[3] ^ k[1];
    std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

} // namespace

void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                   std::uint32_t out[4]) {
    std::uint32_t c[4] = {ctr[0], ctr[1], ctr[2], ctr[3]};
    std::uint32_t k[2] = {key[0], key[1]};
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kWey0;
            k[1] += kWey1;
        }
        round_once(c, k);
    }
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
    out[3] = c[3];
}

Philox::Philox(std::uint64_t seed, std::uint32_t purpose, std::uint32_t substream) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    prefix_[0] = purpose;
    prefix_[1] = substream;
}

void Philox::refill() {
    std::uint32_t ctr[4] = {static_cast<std::uint32_t>(index_),
                            static_cast<std::uint32_t>(index_ >> 32), prefix_[0],
                            prefix_[1]};
    philox4x32_10(ctr, key_, buf_);
    ++index_;
    pos_ = 0;
}

std::uint64_t Philox::next_u64() {
    if (pos_ > 2) refill();
    std::uint64_t lo = buf_[pos_];
    std::uint64_t hi = buf_[pos_ + 1];
    pos_ += 2;
    return lo | (hi << 32);
}

double Philox::uniform() {
    // 53 random bits, then offset by half an ulp so 0 is excluded.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double Philox::normal() { return norm_quantile(uniform()); }

std::uint64_t Philox::below(std::uint64_t n) {
    // Fixed-point scaling of a 64-bit draw into [0, n).
    unsigned __int128 wide = static_cast<unsigned __int128>(next_u64());
    return static_cast<std::uint64_t>((wide * n) >> 64);
}

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("norm_quantile: p outside [0,1]");
    }
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        double num = (((((((2.5090809287301226727e3 * r +
                            3.3430575583588128105e4) * r +
                           6.7265770927008700853e4) * r +
                          4.5921953931549871457e4) * r +
                         1.3731693765509461125e4) * r +
                        1.9715909503065514427e3) * r +
                       1.3314166789178437745e2) * r +
                      3.3871328727963666080e0);
        double den = (((((((5.2264952788528545610e3 * r +
                            2.8729085735721942674e4) * r +
                           3.9307895800092710610e4) * r +
                          2.1213794301586595867e4) * r +
                         5.3941960214247511077e3) * r +
                        6.8718700749205790830e2) * r +
                       4.2313330701600911252e1) * r +
                      1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        double num = (((((((7.74545014278341407640e-4 * r +
                            2.27238449892691845833e-2) * r +
                           2.41780725177450611770e-1) * r +
                          1.27045825245236838258e0) * r +
                         3.64784832476320460504e0) * r +
                        5.76949722146069140550e0) * r +
                       4.63033784615654529590e0) * r +
                      1.42343711074968357734e0);
        double den = (((((((1.05075007164441684324e-9 * r +
                            5.47593808499534494600e-4) * r +
                           1.51986665636164571966e-2) * r +
                          1.48103976427480074590e-1) * r +
                         6.89767334985100004550e-1) * r +
                        1.67638483018380384940e0) * r +
                       2.05319162663775882187e0) * r +
                      1.0);
        val = num / den;
    } else {
        r -= 5.0;
        double num = (((((((2.01033439929228813265e-7 * r +
                            2.71155556874348757815e-5) * r +
                           1.24266094738807843860e-3) * r +
                          2.65321895265761230930e-2) * r +
                         2.96560571828504891230e-1) * r +
                        1.78482653991729133580e0) * r +
                       5.46378491116411436990e0) * r +
                      6.65790464350110377720e0);
        double den = (((((((2.04426310338993978564e-15 * r +
                            1.42151175831644588870e-7) * r +
                           1.84631831751005468180e-5) * r +
                          7.86869131145613259100e-4) * r +
                         1.48753612908506148525e-2) * r +
                        1.36929880922735805310e-1) * r +
                       5.99832206555887937690e-1) * r +
                      1.0);
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

} // namespace ebt
