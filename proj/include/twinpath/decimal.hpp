#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twinpath {

using bigint = boost::multiprecision::cpp_int;

class DecimalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DecimalDivideByZero : public DecimalError {
public:
    DecimalDivideByZero() : DecimalError("decimal division by zero") {}
};

// Exact base-10 decimal: value = mantissa * 10^-scale, mantissa an arbitrary
// precision integer, scale >= 0 and minimal (no trailing fractional zeros).
// Addition, subtraction and multiplication are exact. Division is exact when
// the quotient terminates within kMaxExactFractionDigits fractional digits;
// otherwise it rounds to kDivisionSignificantDigits significant digits,
// half-even. Comparisons are always exact.
class Decimal {
public:
    static constexpr int kMaxExactFractionDigits = 34;
    static constexpr int kDivisionSignificantDigits = 28;

    Decimal() = default;

    static Decimal from_int(int64_t v) {
        Decimal d;
        d.mant_ = v;
        return d;
    }

    // Plain notation only: [+-]? digits [. digits]?  No exponents.
    static std::optional<Decimal> try_parse(std::string_view s) {
        size_t i = 0;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            neg = s[i] == '-';
            ++i;
        }
        size_t int_begin = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        if (i == int_begin) return std::nullopt;
        std::string digits(s.substr(int_begin, i - int_begin));
        int32_t scale = 0;
        if (i < s.size() && s[i] == '.') {
            ++i;
            size_t frac_begin = i;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
            if (i == frac_begin) return std::nullopt;
            digits.append(s.substr(frac_begin, i - frac_begin));
            scale = int32_t(i - frac_begin);
        }
        if (i != s.size()) return std::nullopt;
        // Strip leading zeros: cpp_int would read them as an octal prefix.
        size_t nz = digits.find_first_not_of('0');
        if (nz == std::string::npos) nz = digits.size() - 1;
        Decimal d;
        d.mant_ = bigint(digits.substr(nz));
        d.scale_ = scale;
        if (neg) d.mant_ = -d.mant_;
        d.normalize();
        return d;
    }

    static Decimal parse(std::string_view s) {
        auto d = try_parse(s);
        if (!d) throw DecimalError("invalid decimal literal: '" + std::string(s) + "'");
        return *d;
    }

    std::string str() const {
        std::string digits = bigint(boost::multiprecision::abs(mant_)).str();
        std::string out;
        if (mant_ < 0) out.push_back('-');
        if (scale_ == 0) {
            out += digits;
            return out;
        }
        if (digits.size() <= size_t(scale_))
            digits.insert(0, size_t(scale_) + 1 - digits.size(), '0');
        out.append(digits, 0, digits.size() - size_t(scale_));
        out.push_back('.');
        out.append(digits, digits.size() - size_t(scale_), size_t(scale_));
        return out;
    }

    bool is_zero() const { return mant_ == 0; }
    bool is_negative() const { return mant_ < 0; }

    int cmp(const Decimal& o) const {
        if (scale_ == o.scale_) return spaceship(mant_, o.mant_);
        return spaceship(mant_ * pow10(o.scale_), o.mant_ * pow10(scale_));
    }

    bool operator==(const Decimal& o) const { return cmp(o) == 0; }
    bool operator!=(const Decimal& o) const { return cmp(o) != 0; }
    bool operator<(const Decimal& o) const { return cmp(o) < 0; }
    bool operator<=(const Decimal& o) const { return cmp(o) <= 0; }
    bool operator>(const Decimal& o) const { return cmp(o) > 0; }
    bool operator>=(const Decimal& o) const { return cmp(o) >= 0; }

    Decimal add(const Decimal& o) const {
        Decimal r;
        int32_t s = std::max(scale_, o.scale_);
        r.mant_ = mant_ * pow10(s - scale_) + o.mant_ * pow10(s - o.scale_);
        r.scale_ = s;
        r.normalize();
        return r;
    }

    Decimal sub(const Decimal& o) const { return add(o.negated()); }

    Decimal mul(const Decimal& o) const {
        Decimal r;
        r.mant_ = mant_ * o.mant_;
        r.scale_ = scale_ + o.scale_;
        r.normalize();
        return r;
    }

    Decimal div(const Decimal& o) const {
        if (o.is_zero()) throw DecimalDivideByZero();
        if (is_zero()) return Decimal();

        bool neg = (mant_ < 0) != (o.mant_ < 0);
        bigint n = boost::multiprecision::abs(mant_) * pow10(o.scale_);
        bigint d = boost::multiprecision::abs(o.mant_) * pow10(scale_);
        bigint g = boost::multiprecision::gcd(n, d);
        n /= g;
        d /= g;

        // Terminating expansion iff the reduced denominator is 2^a * 5^b.
        bigint d2 = d;
        int twos = 0, fives = 0;
        while (d2 % 2 == 0) { d2 /= 2; ++twos; }
        while (d2 % 5 == 0) { d2 /= 5; ++fives; }
        Decimal r;
        if (d2 == 1 && std::max(twos, fives) <= kMaxExactFractionDigits) {
            int k = std::max(twos, fives);
            r.mant_ = n * pow10(k) / d;
            r.scale_ = k;
        } else {
            // Round to a fixed number of significant digits, half to even.
            int dn = digit_count(n);
            int dd = digit_count(d);
            int shift = kDivisionSignificantDigits - (dn - dd);
            bigint q, rem;
            for (;;) {
                if (shift >= 0) {
                    bigint scaled = n * pow10(shift);
                    q = scaled / d;
                    rem = scaled % d;
                } else {
                    bigint dd2 = d * pow10(-shift);
                    q = n / dd2;
                    rem = n % dd2;
                    // Rounding below compares against the effective denominator.
                    d = dd2;
                }
                int dq = digit_count(q);
                if (dq == kDivisionSignificantDigits || shift < 0) break;
                if (dq > kDivisionSignificantDigits) {
                    shift -= dq - kDivisionSignificantDigits;
                } else {
                    shift += kDivisionSignificantDigits - dq;
                }
            }
            int c = spaceship(rem * 2, d);
            if (c > 0 || (c == 0 && (q & 1) != 0)) ++q;
            if (shift >= 0) {
                r.mant_ = q;
                r.scale_ = shift;
            } else {
                r.mant_ = q * pow10(-shift);
                r.scale_ = 0;
            }
        }
        if (neg) r.mant_ = -r.mant_;
        r.normalize();
        return r;
    }

    Decimal negated() const {
        Decimal r = *this;
        r.mant_ = -r.mant_;
        return r;
    }

    // Exposed for exact cross-checks in tests.
    const bigint& mantissa() const { return mant_; }
    int32_t scale() const { return scale_; }

private:
    static bigint pow10(int32_t k) {
        bigint p = 1;
        for (int32_t i = 0; i < k; ++i) p *= 10;
        return p;
    }

    static int digit_count(const bigint& v) {
        if (v == 0) return 1;
        return int(bigint(boost::multiprecision::abs(v)).str().size());
    }

    static int spaceship(const bigint& a, const bigint& b) {
        if (a < b) return -1;
        if (a > b) return 1;
        return 0;
    }

    void normalize() {
        if (mant_ == 0) {
            scale_ = 0;
            return;
        }
        while (scale_ > 0 && mant_ % 10 == 0) {
            mant_ /= 10;
            --scale_;
        }
    }

    bigint mant_ = 0;
    int32_t scale_ = 0;
};

}  // namespace twinpath
