#include "chaoslink/fxp.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslink {

void FxpFormat::validate() const {
    if (word_bits < 2 || word_bits > 32)
        throw std::invalid_argument("word_bits must be in [2, 32]");
    if (scale < 1)
        throw std::invalid_argument("scale must be >= 1");
}

std::int64_t div_round_even(wide_t num, wide_t den) {
    wide_t q = num / den;
    wide_t r = num % den;
    if (r < 0) {
        q -= 1;
        r += den;
    }
    // now num = q*den + r with 0 <= r < den
    wide_t twice = 2 * r;
    if (twice > den || (twice == den && (q & 1) != 0))
        q += 1;
    return static_cast<std::int64_t>(q);
}

double round_half_even(double v) {
    double fl = std::floor(v);
    double diff = v - fl;
    if (diff > 0.5)
        return fl + 1.0;
    if (diff < 0.5)
        return fl;
    return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
}

FxpSample saturate(wide_t raw, const FxpFormat& fmt, SaturationCounter* sat) {
    const wide_t lim = fmt.max_raw();
    if (raw > lim || raw < -lim) {
        if (sat)
            ++sat->events;
        return FxpSample{static_cast<std::int32_t>(raw > 0 ? lim : -lim)};
    }
    return FxpSample{static_cast<std::int32_t>(raw)};
}

FxpSample quantize(double value, const FxpFormat& fmt, SaturationCounter* sat) {
    if (std::isnan(value))
        throw std::domain_error("quantize: NaN input");
    const double lim = static_cast<double>(fmt.max_raw());
    double scaled = value * static_cast<double>(fmt.scale);
    if (scaled > lim + 1.0 || scaled < -lim - 1.0) {
        if (sat)
            ++sat->events;
        return FxpSample{static_cast<std::int32_t>(scaled > 0 ? lim : -lim)};
    }
    return saturate(static_cast<wide_t>(round_half_even(scaled)), fmt, sat);
}

double dequantize(FxpSample s, const FxpFormat& fmt) {
    return static_cast<double>(s.raw) / static_cast<double>(fmt.scale);
}

FxpSample sat_add(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat) {
    return saturate(static_cast<wide_t>(a.raw) + b.raw, fmt, sat);
}

FxpSample sat_sub(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat) {
    return saturate(static_cast<wide_t>(a.raw) - b.raw, fmt, sat);
}

FxpSample mul_scaled(FxpSample a, FxpSample b, const FxpFormat& fmt, SaturationCounter* sat) {
    wide_t prod = static_cast<wide_t>(a.raw) * b.raw;
    return saturate(div_round_even(prod, fmt.scale), fmt, sat);
}

BitWord::BitWord(std::string bits) : bits_(std::move(bits)) {
    for (char c : bits_)
        if (c != '0' && c != '1')
            throw std::invalid_argument("bit word may contain only '0' and '1'");
}

BitWord to_bitword(FxpSample s, const FxpFormat& fmt) {
    const int n = fmt.word_bits;
    std::string out(static_cast<std::size_t>(n), '0');
    out[0] = s.raw >= 0 ? '1' : '0';
    std::uint64_t mag = s.raw < 0 ? static_cast<std::uint64_t>(-static_cast<std::int64_t>(s.raw))
                                  : static_cast<std::uint64_t>(s.raw);
    for (int i = 0; i < n - 1; ++i)
        out[static_cast<std::size_t>(n - 1 - i)] = ((mag >> i) & 1U) ? '1' : '0';
    return BitWord(std::move(out));
}

FxpSample from_bitword(const BitWord& b, const FxpFormat& fmt) {
    if (b.size() != static_cast<std::size_t>(fmt.word_bits))
        throw std::invalid_argument("bit word length " + std::to_string(b.size()) + " does not match word_bits " +
                                    std::to_string(fmt.word_bits));
    std::int64_t mag = 0;
    for (std::size_t i = 1; i < b.size(); ++i)
        mag = (mag << 1) | (b.text()[i] == '1' ? 1 : 0);
    // the all-zero word is a negative zero and decodes to 0
    return FxpSample{static_cast<std::int32_t>(b.bit(b.size() - 1) ? mag : -mag)};
}

FxpSample from_bitword(std::string_view text, const FxpFormat& fmt) {
    return from_bitword(BitWord(std::string(text)), fmt);
}

}  // namespace chaoslink
