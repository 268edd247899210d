#pragma once

#include <array>
#include <cstdint>

namespace rrl {

// Philox4x32-10 counter-based generator. A stream is fixed by (key, counter
// prefix), so any replica can be regenerated without touching the others.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block bijection(Block ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    // Stream `stream` of generator `seed`; draws advance the low 64 counter bits.
    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          hi_(stream) {}

    std::uint64_t next_u64() {
        if (pos_ == 2) {
            buf_ = bijection({static_cast<std::uint32_t>(lo_), static_cast<std::uint32_t>(lo_ >> 32),
                              static_cast<std::uint32_t>(hi_), static_cast<std::uint32_t>(hi_ >> 32)},
                             key_);
            ++lo_;
            pos_ = 0;
        }
        const std::uint64_t v = (std::uint64_t{buf_[2 * pos_ + 1]} << 32) | buf_[2 * pos_];
        ++pos_;
        return v;
    }

    // Uniform on (0, 1], 53-bit resolution.
    double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

private:
    Key key_;
    std::uint64_t hi_;
    std::uint64_t lo_ = 0;
    Block buf_{};
    int pos_ = 2;
};

}  // namespace rrl
