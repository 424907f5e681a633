#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chaoslink/adaptsync.hpp"
#include "chaoslink/channel.hpp"
#include "chaoslink/dynamics.hpp"
#include "chaoslink/fxp.hpp"
#include "chaoslink/modem.hpp"

namespace chaoslink {

/// Everything needed to run the transmitter, channel and receiver together.
struct LinkConfig {
    FxpFormat fmt;
    DynamicsParams dynamics = default_system();
    IntegratorConfig integ;
    ControllerGains gains;
    AdaptConfig adapt;
    FxpState tx_ic = kTransmitterIc;
    FxpState rx_ic = kReceiverIc;
    DetectorConfig detector;  // delay_d == 0 selects the calibrated delay
    SmootherConfig smoother;
    double bit_amplitude = 1.0;
    double bit_rate_hz = 1e6;
    std::int32_t settle_tol = 10;
    double delay_margin = 1.1;
    std::size_t calibration_steps = 500000;
    std::size_t power_window = 200000;

    void validate() const;
    std::size_t bit_period() const;
};

struct Calibration {
    std::optional<std::size_t> settling_step;
    std::size_t delay_d = 0;
    double signal_power = 0.0;
    std::uint64_t saturation_events = 0;

    bool settled() const { return settling_step.has_value(); }
};

/// Measures the settling time of the noise-free unmodulated loop, derives
/// the delay D and estimates the transmitted signal power (mean variance of
/// the three components over power_window samples starting at D).
Calibration calibrate(const LinkConfig& cfg);

/// Runs the unmodulated closed loop and returns the error trace (n rows).
std::vector<FxpState> run_sync(const LinkConfig& cfg, std::size_t n, std::uint64_t* saturation_events = nullptr);

struct BitTrialResult {
    std::vector<int> recovered;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t pulses = 0;
    std::uint64_t transitions = 0;
    bool invalid = false;
    double sigma = 0.0;
    BindingConstraint binding = BindingConstraint::none;
    std::uint64_t saturation_events = 0;
};

/// Message bits occupy [D + k*P, D + (k+1)*P) with amplitude bit_amplitude on z.
BitTrialResult run_bits(const LinkConfig& cfg, const Calibration& cal, const ChannelConfig& ch,
                        const std::vector<int>& message);

struct WaveResult {
    std::vector<double> recovered;  // gain applied, starts at D
    std::vector<double> original;   // transmitted information samples, starts at D
    std::size_t training = 0;       // samples used for the gain fit
    double gain = 1.0;
    double rms_error = 0.0;
    double correlation = 0.0;
    double amplitude_ratio = 0.0;
};

/// Noise-free waveform transmission; metrics exclude the training period.
WaveResult run_wave(const LinkConfig& cfg, const Calibration& cal, const InfoSignal& info, double freq_hz,
                    std::size_t n_samples);

std::vector<int> random_bits(std::size_t n, std::uint64_t seed);

}  // namespace chaoslink
