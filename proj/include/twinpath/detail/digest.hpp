#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "twinpath/detail/sha256.hpp"

namespace twinpath {

// Order-independent digest of a multiset of byte strings: each element is
// hashed with SHA-256 and the hashes are summed as 256-bit integers mod 2^256.
// Two multisets compare equal iff their digests match (up to hash collisions).
class MultisetDigest {
public:
    void add(std::string_view element) {
        auto h = detail::Sha256::digest(element);
        uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t limb = 0;
            for (int b = 0; b < 8; ++b) limb |= uint64_t(h[8 * i + b]) << (8 * b);
            uint64_t prev = sum_[i];
            sum_[i] = prev + limb;
            uint64_t c1 = sum_[i] < prev ? 1 : 0;
            uint64_t prev2 = sum_[i];
            sum_[i] += carry;
            carry = c1 + (sum_[i] < prev2 ? 1 : 0);
        }
        ++count_;
    }

    uint64_t count() const { return count_; }

    std::string hex() const {
        std::array<uint8_t, 32> bytes{};
        for (int i = 0; i < 4; ++i)
            for (int b = 0; b < 8; ++b) bytes[8 * i + b] = uint8_t(sum_[i] >> (8 * b));
        return detail::to_hex(bytes.data(), bytes.size());
    }

    bool operator==(const MultisetDigest& o) const { return sum_ == o.sum_ && count_ == o.count_; }
    bool operator!=(const MultisetDigest& o) const { return !(*this == o); }

private:
    std::array<uint64_t, 4> sum_{};
    uint64_t count_ = 0;
};

}  // namespace twinpath
