#include "chaoslink/modem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaoslink {

void InfoSignal::validate() const {
    if (!(rate_hz > 0) || !(system_rate_hz > 0))
        throw std::invalid_argument("signal rates must be positive");
    if (rate_hz > system_rate_hz)
        throw std::invalid_argument("information rate must not exceed the system rate");
    if (kind == InfoKind::bitstream)
        for (double v : samples)
            if (v != 0.0 && v != 1.0)
                throw std::invalid_argument("bitstream values must be 0 or 1");
}

std::size_t InfoSignal::source_index(std::size_t n) const {
    double ratio = system_rate_hz / rate_hz;
    double r = std::round(ratio);
    if (std::abs(ratio - r) < 1e-9 * ratio)
        return n / static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::floor(static_cast<long double>(n) * rate_hz / system_rate_hz));
}

double InfoSignal::at(std::size_t n) const {
    std::size_t k = source_index(n);
    if (k >= samples.size())
        return 0.0;
    double v = samples[k];
    return kind == InfoKind::bitstream ? amplitude * v : v;
}

std::size_t InfoSignal::system_length() const {
    return static_cast<std::size_t>(
        std::ceil(static_cast<long double>(samples.size()) * system_rate_hz / rate_hz - 1e-9));
}

double quantize_resolution(double v, double amplitude, int bits) {
    if (bits < 1 || bits > 52)
        throw std::invalid_argument("resolution_bits must be in [1, 52]");
    if (amplitude == 0.0 || v == 0.0)
        return 0.0;
    if (bits == 1)
        return v > 0 ? amplitude : -amplitude;
    double step = amplitude / std::ldexp(1.0, bits - 1);
    return round_half_even(v / step) * step;
}

InfoSignal make_sine(double freq_hz, double amplitude, int resolution_bits, double rate_hz, double system_rate_hz,
                     std::size_t n_system_samples) {
    if (!(freq_hz >= 0) || freq_hz > rate_hz)
        throw std::invalid_argument("sine frequency must not exceed the sampling frequency");
    if (resolution_bits < 1)
        throw std::invalid_argument("resolution_bits must be >= 1");
    InfoSignal s;
    s.kind = InfoKind::waveform;
    s.rate_hz = rate_hz;
    s.system_rate_hz = system_rate_hz;
    s.resolution_bits = resolution_bits;
    s.amplitude = amplitude;
    s.validate();
    std::size_t n_src = n_system_samples == 0 ? 0 : s.source_index(n_system_samples - 1) + 1;
    s.samples.reserve(n_src);
    for (std::size_t k = 0; k < n_src; ++k) {
        double v = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(k) / rate_hz);
        s.samples.push_back(quantize_resolution(v, amplitude, resolution_bits));
    }
    return s;
}

InfoSignal make_bitstream(const std::vector<int>& bits, double bit_rate_hz, double system_rate_hz,
                          double amplitude) {
    InfoSignal s;
    s.kind = InfoKind::bitstream;
    s.rate_hz = bit_rate_hz;
    s.system_rate_hz = system_rate_hz;
    s.amplitude = amplitude;
    s.samples.assign(bits.begin(), bits.end());
    s.validate();
    return s;
}

FxpSample modulate(FxpSample wz, FxpSample info_sample, const FxpFormat& fmt, SaturationCounter* sat) {
    return sat_add(wz, info_sample, fmt, sat);
}

void DetectorConfig::validate() const {
    if (!(a_threshold > 0))
        throw std::invalid_argument("a_threshold must be > 0");
    if (refractory < 1)
        throw std::invalid_argument("refractory must be >= 1");
    if (window < 1)
        throw std::invalid_argument("window must be >= 1");
    if (initial_bit != 0 && initial_bit != 1)
        throw std::invalid_argument("initial_bit must be 0 or 1");
}

BitDetector::BitDetector(const DetectorConfig& cfg, const FxpFormat& fmt) : cfg_(cfg), fmt_(fmt) {
    cfg.validate();
    st_.delay_line.assign(2 * cfg.window, 0);
    st_.last_bit = cfg.initial_bit;
    threshold_sum_ = cfg.a_threshold * static_cast<double>(fmt.scale) * static_cast<double>(cfg.window);
}

int BitDetector::detect(FxpSample e3) {
    const std::size_t n = st_.samples_seen++;
    if (st_.holdoff > 0)
        --st_.holdoff;

    // Ring of 2L samples: [old window | new window]. Slide both sums by one.
    const std::size_t L = cfg_.window;
    auto& ring = st_.delay_line;
    const std::size_t cap = 2 * L;
    if (st_.filled == cap) {
        std::int32_t oldest = ring[st_.head];
        std::int32_t middle = ring[(st_.head + L) % cap];
        st_.sum_old += middle - oldest;
        st_.sum_new += e3.raw - middle;
    } else if (st_.filled >= L) {
        std::int32_t middle = ring[st_.head - L];
        st_.sum_old += middle;
        st_.sum_new += e3.raw - middle;
    } else {
        st_.sum_new += e3.raw;
    }
    ring[st_.head] = e3.raw;
    st_.head = (st_.head + 1) % cap;
    if (st_.filled < cap)
        ++st_.filled;
    if (st_.filled < cap) {
        last_stat_ = 0.0;
        return 0;
    }

    const double diff = std::abs(static_cast<double>(st_.sum_new - st_.sum_old));
    last_stat_ = diff / (static_cast<double>(fmt_.scale) * static_cast<double>(L));
    const bool above = diff > threshold_sum_;
    int pulse = 0;
    // element D: nothing is marked until the receiver has synchronized
    if (n >= cfg_.delay_d && above && !st_.above && st_.holdoff == 0) {
        pulse = 1;
        st_.holdoff = cfg_.refractory;
    }
    st_.above = above;
    return pulse;
}

int BitDetector::decide(int pulse) {
    // Output reflects pulses up to the previous sample (memory M).
    st_.last_bit = static_cast<int>((st_.memory + static_cast<std::uint64_t>(cfg_.initial_bit)) % 2);
    st_.edge_count += pulse ? 1 : 0;
    st_.memory = st_.edge_count;
    return st_.last_bit;
}

DemodResult demodulate_bits(const std::vector<FxpSample>& e3, const DetectorConfig& cfg, const FxpFormat& fmt,
                            std::size_t bit_period, std::size_t first_bit_start, std::size_t n_bits,
                            std::optional<std::size_t> measured_settling) {
    if (bit_period < 2)
        throw std::invalid_argument("bit_period must be >= 2");
    DemodResult out;
    out.unsettled = !measured_settling.has_value() || cfg.delay_d < *measured_settling;
    BitDetector det(cfg, fmt);
    const std::size_t half = bit_period / 2;
    std::size_t next = first_bit_start + half;
    for (std::size_t n = 0; n < e3.size() && out.bits.size() < n_bits; ++n) {
        int bit = det.push(e3[n]);
        if (n == next) {
            out.bits.push_back(bit);
            next += bit_period;
        }
    }
    out.pulses = det.state().edge_count;
    return out;
}

void SmootherConfig::validate() const {
    if (!(alpha > 0) || alpha > 1)
        throw std::invalid_argument("alpha must be in (0, 1]");
}

std::vector<double> recover_waveform(const std::vector<FxpSample>& e3, const SmootherConfig& cfg,
                                     const FxpFormat& fmt, std::size_t delay_d) {
    ExpSmoother sm(cfg);
    std::vector<double> out;
    if (e3.size() > delay_d)
        out.reserve(e3.size() - delay_d);
    for (std::size_t n = delay_d; n < e3.size(); ++n)
        out.push_back(sm.push(dequantize(e3[n], fmt)));
    return out;
}

double fit_gain(const std::vector<double>& y, const std::vector<double>& ref, std::size_t n) {
    n = std::min({n, y.size(), ref.size()});
    double yy = 0.0, yr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        yy += y[i] * y[i];
        yr += y[i] * ref[i];
    }
    return yy > 0.0 ? yr / yy : 1.0;
}

}  // namespace chaoslink
