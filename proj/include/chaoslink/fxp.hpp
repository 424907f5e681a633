#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chaoslink {

using wide_t = __int128;

/// Word length and scaling factor of the fixed-point signal format.
struct FxpFormat {
    int word_bits = 16;
    std::int64_t scale = 3107;

    std::int64_t max_raw() const { return (std::int64_t{1} << (word_bits - 1)) - 1; }
    double max_value() const { return static_cast<double>(max_raw()) / static_cast<double>(scale); }
    // throws std::invalid_argument
    void validate() const;
};

struct FxpSample {
    std::int32_t raw = 0;

    friend constexpr bool operator==(FxpSample, FxpSample) = default;
};

/// Counts clamp events. One instance per simulation context.
struct SaturationCounter {
    std::uint64_t events = 0;
};

// Round-half-to-even division of a wide numerator by a positive denominator.
std::int64_t div_round_even(wide_t num, wide_t den);
double round_half_even(double v);

FxpSample saturate(wide_t raw, const FxpFormat& fmt, SaturationCounter* sat = nullptr);

FxpSample quantize(double value, const FxpFormat& fmt, SaturationCounter* sat = nullptr);
double dequantize(FxpSample s, const FxpFormat& fmt);

FxpSample sat_add(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat = nullptr);
FxpSample sat_sub(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat = nullptr);
FxpSample mul_scaled(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat = nullptr);

/// Sign-magnitude word, MSB first. The top bit is set for values >= 0.
class BitWord {
public:
    BitWord() = default;
    explicit BitWord(std::string bits);

    const std::string& text() const { return bits_; }
    std::size_t size() const { return bits_.size(); }
    // i counts from the LSB, as in b_i.
    int bit(std::size_t i) const { return bits_[bits_.size() - 1 - i] == '1' ? 1 : 0; }

    friend bool operator==(const BitWord&, const BitWord&) = default;

private:
    std::string bits_;
};

BitWord to_bitword(FxpSample s, const FxpFormat& fmt);
FxpSample from_bitword(const BitWord& b, const FxpFormat& fmt);
FxpSample from_bitword(std::string_view text, const FxpFormat& fmt);

}  // namespace chaoslink
