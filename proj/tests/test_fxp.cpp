#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "chaoslink/fxp.hpp"

using namespace chaoslink;

TEST_SUITE("fxp") {

TEST_CASE("quantize examples") {
    FxpFormat f;
    CHECK(quantize(-1.0, f).raw == -3107);
    CHECK(quantize(1032.0 / 3107.0, f).raw == 1032);
    CHECK(quantize(100.0, f).raw == 32767);
    CHECK(quantize(-100.0, f).raw == -32767);
    CHECK(quantize(std::numeric_limits<double>::infinity(), f).raw == 32767);
    CHECK_THROWS_AS(quantize(std::nan(""), f), std::domain_error);
}

TEST_CASE("quantize rounds half to even") {
    FxpFormat f{16, 1};
    CHECK(quantize(0.5, f).raw == 0);
    CHECK(quantize(1.5, f).raw == 2);
    CHECK(quantize(2.5, f).raw == 2);
    CHECK(quantize(-0.5, f).raw == 0);
    CHECK(quantize(-1.5, f).raw == -2);
    CHECK(quantize(-2.5, f).raw == -2);
    CHECK(quantize(2.5000001, f).raw == 3);
}

TEST_CASE("saturation counter is per context") {
    FxpFormat f;
    SaturationCounter a, b;
    quantize(50.0, f, &a);
    sat_add(FxpSample{32000}, FxpSample{1000}, f, &a);
    quantize(1.0, f, &b);
    CHECK(a.events == 2);
    CHECK(b.events == 0);
}

TEST_CASE("dequantize") {
    FxpFormat f;
    CHECK(dequantize(FxpSample{-3107}, f) == -1.0);
    CHECK(dequantize(FxpSample{0}, f) == 0.0);
    CHECK(dequantize(FxpSample{1032}, f) == 1032.0 / 3107.0);
}

TEST_CASE("bit word vectors") {
    FxpFormat f;
    CHECK(to_bitword(FxpSample{1032}, f).text() == "1000010000001000");
    CHECK(to_bitword(FxpSample{-3107}, f).text() == "0000110000100011");
    CHECK(to_bitword(FxpSample{0}, f).text() == "1000000000000000");
    CHECK(from_bitword("1000010000001000", f).raw == 1032);
    CHECK(from_bitword("0000000000000000", f).raw == 0);
    CHECK(from_bitword("1111111111111111", f).raw == 32767);
    CHECK(from_bitword("0111111111111111", f).raw == -32767);
}

TEST_CASE("bit word sign bit and magnitude bits") {
    FxpFormat f;
    BitWord w = to_bitword(FxpSample{-5}, f);
    CHECK(w.bit(15) == 0);
    CHECK(w.bit(0) == 1);
    CHECK(w.bit(1) == 0);
    CHECK(w.bit(2) == 1);
}

TEST_CASE("bit word rejects bad input") {
    FxpFormat f;
    CHECK_THROWS_AS(from_bitword("101", f), std::invalid_argument);
    CHECK_THROWS_AS(from_bitword("10000000000000002", f), std::invalid_argument);
    CHECK_THROWS_AS(BitWord("10x"), std::invalid_argument);
}

TEST_CASE("bit word round trip for other word lengths") {
    for (int bits : {2, 8, 12, 24}) {
        FxpFormat f{bits, 3};
        for (std::int64_t r = -f.max_raw(); r <= f.max_raw(); r += std::max<std::int64_t>(1, f.max_raw() / 500)) {
            FxpSample s{static_cast<std::int32_t>(r)};
            BitWord w = to_bitword(s, f);
            REQUIRE(w.size() == static_cast<std::size_t>(bits));
            CHECK(from_bitword(w, f) == s);
        }
    }
}

TEST_CASE("sat_add examples and monotonicity") {
    FxpFormat f;
    CHECK(sat_add(FxpSample{32000}, FxpSample{1000}, f).raw == 32767);
    CHECK(sat_add(FxpSample{-32000}, FxpSample{-1000}, f).raw == -32767);
    CHECK(sat_add(FxpSample{1032}, FxpSample{-1032}, f).raw == 0);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> d(-32767, 32767);
    for (int i = 0; i < 20000; ++i) {
        FxpSample a{d(rng)}, b{d(rng)};
        FxpSample b2{std::min(32767, b.raw + std::abs(d(rng)) % 100)};
        CHECK(sat_add(a, b, f).raw <= sat_add(a, b2, f).raw);
        CHECK(sat_add(b, a, f).raw <= sat_add(b2, a, f).raw);
    }
}

TEST_CASE("mul_scaled examples") {
    FxpFormat f;
    CHECK(mul_scaled(FxpSample{3107}, FxpSample{3107}, f).raw == 3107);
    CHECK(mul_scaled(FxpSample{12345}, FxpSample{0}, f).raw == 0);
    CHECK(mul_scaled(FxpSample{6214}, FxpSample{-3107}, f).raw == -6214);
    CHECK(mul_scaled(FxpSample{32767}, FxpSample{32767}, f).raw == 32767);
    // 1.5 counts rounds to 2, 2.5 counts to 2
    FxpFormat g{16, 2};
    CHECK(mul_scaled(FxpSample{3}, FxpSample{1}, g).raw == 2);
    CHECK(mul_scaled(FxpSample{5}, FxpSample{1}, g).raw == 2);
    CHECK(mul_scaled(FxpSample{-5}, FxpSample{1}, g).raw == -2);
}

TEST_CASE("div_round_even against a rational oracle") {
    for (long long n = -50; n <= 50; ++n)
        for (long long d : {1LL, 2LL, 3LL, 4LL, 7LL}) {
            // oracle: exact rational in long double, tie broken to even
            long double q = static_cast<long double>(n) / d;
            long double fl = std::floor(q);
            long double fr = q - fl;
            long long want = static_cast<long long>(fl);
            if (fr > 0.5L || (fr == 0.5L && (want % 2 != 0)))
                ++want;
            CHECK(div_round_even(n, d) == want);
        }
}

TEST_CASE("format validation") {
    CHECK_THROWS(FxpFormat{1, 3107}.validate());
    CHECK_THROWS(FxpFormat{16, 0}.validate());
    CHECK_NOTHROW(FxpFormat{}.validate());
    CHECK(FxpFormat{}.max_raw() == 32767);
}

}
