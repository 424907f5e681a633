#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chaoslink/fxp.hpp"

namespace chaoslink {

enum class InfoKind { bitstream, waveform };

/// Information signal at its own source rate; at() applies sample-and-hold
/// to the system rate.
struct InfoSignal {
    InfoKind kind = InfoKind::bitstream;
    std::vector<double> samples;
    double rate_hz = 1e6;
    double system_rate_hz = 450e6;
    int resolution_bits = 1;
    double amplitude = 1.0;

    // throws std::invalid_argument
    void validate() const;
    std::size_t source_index(std::size_t n) const;
    /// Value at system sample n; zero past the end of the signal.
    double at(std::size_t n) const;
    std::size_t system_length() const;
};

InfoSignal make_sine(double freq_hz, double amplitude, int resolution_bits, double rate_hz,
                     double system_rate_hz, std::size_t n_system_samples);
InfoSignal make_bitstream(const std::vector<int>& bits, double bit_rate_hz, double system_rate_hz,
                          double amplitude);

/// Mid-tread quantizer with step amplitude / 2^(bits-1), round half to even.
/// One bit keeps only the sign: +-amplitude, with exact zero left at 0.
double quantize_resolution(double v, double amplitude, int bits);

FxpSample modulate(FxpSample wz, FxpSample info_sample, const FxpFormat& fmt, SaturationCounter* sat = nullptr);

struct DetectorConfig {
    std::size_t delay_d = 0;
    double a_threshold = 0.5;
    std::size_t refractory = 225;
    // Length of each of the two averaging windows of the step statistic.
    std::size_t window = 100;
    int initial_bit = 0;

    void validate() const;
};

struct DetectorState {
    std::uint64_t edge_count = 0;
    std::size_t holdoff = 0;
    int last_bit = 0;
    // E_c as seen one sample ago (element M).
    std::uint64_t memory = 0;
    std::size_t samples_seen = 0;
    bool above = false;
    // Last 2*window inputs, ring buffer written at head.
    std::vector<std::int32_t> delay_line;
    std::size_t head = 0;
    std::size_t filled = 0;
    std::int64_t sum_new = 0;
    std::int64_t sum_old = 0;
};

/// F1 edge detector followed by the E_c counter, memory M and parity decision F2.
///
/// F1 compares the means of the last two windows of e3 and emits a
/// one-sample pulse when their absolute difference rises through
/// a_threshold, then stays silent for refractory samples. No pulse is emitted
/// during the first delay_d samples.
class BitDetector {
public:
    BitDetector(const DetectorConfig& cfg, const FxpFormat& fmt);

    int detect(FxpSample e3);
    int decide(int pulse);
    /// detect + decide; returns the current decision.
    int push(FxpSample e3) { return decide(detect(e3)); }
    double statistic() const { return last_stat_; }

    const DetectorState& state() const { return st_; }
    const DetectorConfig& config() const { return cfg_; }

private:
    DetectorConfig cfg_;
    FxpFormat fmt_;
    DetectorState st_;
    double threshold_sum_ = 0.0;
    double last_stat_ = 0.0;
};

struct DemodResult {
    std::vector<int> bits;
    std::uint64_t pulses = 0;
    bool unsettled = false;
};

/// Runs the detector over e3 and samples the decision at the midpoint of each
/// bit period, counting bit periods from first_bit_start.
DemodResult demodulate_bits(const std::vector<FxpSample>& e3, const DetectorConfig& cfg, const FxpFormat& fmt,
                            std::size_t bit_period, std::size_t first_bit_start, std::size_t n_bits,
                            std::optional<std::size_t> measured_settling = std::nullopt);

struct SmootherConfig {
    double alpha = 0.01;
    double gain = 1.0;
    // When set, gain is replaced by a least-squares fit on a training preamble.
    bool fit_gain = true;

    void validate() const;
};

class ExpSmoother {
public:
    explicit ExpSmoother(const SmootherConfig& cfg) : cfg_(cfg) { cfg.validate(); }
    double push(double x) {
        y_ = cfg_.alpha * x + (1.0 - cfg_.alpha) * y_;
        return cfg_.gain * y_;
    }

private:
    SmootherConfig cfg_;
    double y_ = 0.0;
};

std::vector<double> recover_waveform(const std::vector<FxpSample>& e3, const SmootherConfig& cfg,
                                     const FxpFormat& fmt, std::size_t delay_d);

/// Signed least-squares gain g minimizing sum (g*y - ref)^2 over the first n samples.
double fit_gain(const std::vector<double>& y, const std::vector<double>& ref, std::size_t n);

}  // namespace chaoslink
