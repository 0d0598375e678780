#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "twinpath/decimal.hpp"

using twinpath::Decimal;
using rational = boost::multiprecision::cpp_rational;
using twinpath::bigint;

namespace {

bigint pow10(int k) {
    bigint p = 1;
    for (int i = 0; i < k; ++i) p *= 10;
    return p;
}

bigint digits_to_bigint(std::string s) {
    bool neg = !s.empty() && s[0] == '-';
    if (neg || (!s.empty() && s[0] == '+')) s.erase(0, 1);
    size_t nz = s.find_first_not_of('0');
    if (nz == std::string::npos) nz = s.size() - 1;
    bigint v(s.substr(nz));
    return neg ? bigint(-v) : v;
}

// Independent arbitrary-precision rational view of a decimal string.
rational to_rational(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return rational(digits_to_bigint(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    int scale = int(s.size() - dot - 1);
    return rational(digits_to_bigint(digits), pow10(scale));
}

std::string random_decimal_string(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> int_digits(1, 12);
    std::uniform_int_distribution<int> frac_digits(0, 10);
    std::uniform_int_distribution<int> digit(0, 9);
    std::string s;
    if (rng() & 1) s.push_back('-');
    int n = int_digits(rng);
    for (int i = 0; i < n; ++i) s.push_back(char('0' + digit(rng)));
    int f = frac_digits(rng);
    if (f > 0) {
        s.push_back('.');
        for (int i = 0; i < f; ++i) s.push_back(char('0' + digit(rng)));
    }
    return s;
}

}  // namespace

TEST_CASE("decimal parsing and canonical form") {
    CHECK(Decimal::parse("11.2").str() == "11.2");
    CHECK(Decimal::parse("11.20").str() == "11.2");
    CHECK(Decimal::parse("007.500").str() == "7.5");
    CHECK(Decimal::parse("-0.0").str() == "0");
    CHECK(Decimal::parse("-0").str() == "0");
    CHECK(Decimal::parse("0.5").str() == "0.5");
    CHECK(Decimal::parse("+3.25").str() == "3.25");
    CHECK(Decimal::parse("10240.20526").str() == "10240.20526");
    CHECK(Decimal::parse("0.0000001").str() == "0.0000001");
    CHECK(Decimal::from_int(-42).str() == "-42");

    for (const char* bad : {"", ".", "1.", ".5", "1e5", "abc", "--1", "1.2.3", "1 "})
        CHECK_FALSE(Decimal::try_parse(bad).has_value());
}

TEST_CASE("decimal round-trips through its string form") {
    std::mt19937_64 rng(7101);
    for (int i = 0; i < 2000; ++i) {
        std::string s = random_decimal_string(rng);
        Decimal d = Decimal::parse(s);
        CHECK(Decimal::parse(d.str()) == d);
        CHECK(to_rational(d.str()) == to_rational(s));
    }
}

TEST_CASE("exact comparison, including paper boundary values") {
    CHECK(Decimal::parse("11.2") <= Decimal::parse("11.2"));
    CHECK(Decimal::parse("10240.20525") < Decimal::parse("10240.20526"));
    CHECK_FALSE(Decimal::parse("10240.20526") < Decimal::parse("10240.20526"));
    CHECK(Decimal::parse("0.1").add(Decimal::parse("0.2")) == Decimal::parse("0.3"));
    CHECK(Decimal::parse("-1.5") < Decimal::parse("-1.4"));
    CHECK(Decimal::parse("2") > Decimal::parse("1.999999999999999999999999"));
}

TEST_CASE("decimal comparisons agree with a rational oracle") {
    std::mt19937_64 rng(40799);
    for (int i = 0; i < 4000; ++i) {
        std::string sa = random_decimal_string(rng);
        std::string sb = random_decimal_string(rng);
        Decimal a = Decimal::parse(sa), b = Decimal::parse(sb);
        rational ra = to_rational(sa), rb = to_rational(sb);
        int want = ra < rb ? -1 : (ra > rb ? 1 : 0);
        CHECK(a.cmp(b) == want);
    }
}

TEST_CASE("exact add/sub/mul") {
    std::mt19937_64 rng(90210);
    for (int i = 0; i < 1000; ++i) {
        std::string sa = random_decimal_string(rng);
        std::string sb = random_decimal_string(rng);
        Decimal a = Decimal::parse(sa), b = Decimal::parse(sb);
        rational ra = to_rational(sa), rb = to_rational(sb);
        CHECK(to_rational(a.add(b).str()) == ra + rb);
        CHECK(to_rational(a.sub(b).str()) == ra - rb);
        CHECK(to_rational(a.mul(b).str()) == ra * rb);
    }
}

TEST_CASE("division") {
    SECTION("terminating quotients are exact") {
        CHECK(Decimal::parse("1.5").div(Decimal::parse("0.2")).str() == "7.5");
        CHECK(Decimal::parse("10").div(Decimal::parse("4")).str() == "2.5");
        CHECK(Decimal::parse("100").div(Decimal::parse("8")).str() == "12.5");
        CHECK(Decimal::parse("-9").div(Decimal::parse("3")).str() == "-3");
    }
    SECTION("non-terminating quotients round to 28 significant digits") {
        CHECK(Decimal::from_int(1).div(Decimal::from_int(3)).str() ==
              "0.3333333333333333333333333333");
        CHECK(Decimal::from_int(2).div(Decimal::from_int(3)).str() ==
              "0.6666666666666666666666666667");
        CHECK(Decimal::from_int(1).div(Decimal::from_int(7)).str() ==
              "0.1428571428571428571428571429");
    }
    SECTION("division by zero throws") {
        CHECK_THROWS_AS(Decimal::from_int(1).div(Decimal()), twinpath::DecimalDivideByZero);
    }
    SECTION("rounded quotients are within half an ulp of the rational value") {
        std::mt19937_64 rng(5150);
        for (int i = 0; i < 500; ++i) {
            std::string sa = random_decimal_string(rng);
            std::string sb = random_decimal_string(rng);
            Decimal b = Decimal::parse(sb);
            if (b.is_zero()) continue;
            Decimal q = Decimal::parse(sa).div(b);
            rational exact = to_rational(sa) / to_rational(sb);
            rational got = to_rational(q.str());
            rational err = got - exact;
            if (err < 0) err = -err;
            if (exact < 0) exact = -exact;
            // 28 significant digits: relative error at most 5 * 10^-28.
            CHECK(err * pow10(28) <= exact * 5 + rational(5, pow10(28)));
        }
    }
}
