#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "chaoslink/dynamics.hpp"
#include "chaoslink/fxp.hpp"

namespace chaoslink {

enum class ChannelMode { ideal, awgn };
enum class BindingConstraint { none, ebn0, noise_floor };

const char* to_string(ChannelMode m);
const char* to_string(BindingConstraint b);
ChannelMode parse_channel_mode(const std::string& s);
BindingConstraint parse_binding(const std::string& s);

struct ChannelConfig {
    double ebn0_db = 20.0;
    double noise_power_dbm = 30.0;
    double bit_rate_hz = 1e6;
    double system_rate_hz = 450e6;
    std::uint64_t seed = 1;
    ChannelMode mode = ChannelMode::awgn;
};

/// Power in the normalized convention 1 analog unit^2 = 1 W.
double dbm_to_power(double p_dbm);

/// Gaussian noise source for one link. Holds its own generator.
class NoiseModel {
public:
    NoiseModel() = default;
    NoiseModel(double sigma, std::uint64_t seed, BindingConstraint binding = BindingConstraint::none);

    double sigma() const { return sigma_; }
    BindingConstraint binding() const { return binding_; }
    double ebn0_variance() const { return ebn0_var_; }
    double floor_variance() const { return floor_var_; }

    double draw() { return sigma_ * normal_(rng_); }
    FxpSample apply(FxpSample s, const FxpFormat& fmt, SaturationCounter* sat = nullptr);
    FxpState apply(const FxpState& s, const FxpFormat& fmt, SaturationCounter* sat = nullptr);

private:
    friend NoiseModel derive_sigma(const ChannelConfig& cfg, double measured_signal_power);

    double sigma_ = 0.0;
    BindingConstraint binding_ = BindingConstraint::none;
    double ebn0_var_ = 0.0;
    double floor_var_ = 0.0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Eb = P/bit_rate, N0 = Eb/10^(ebn0/10), sigma^2 = N0*fs/2, floored at the
/// dBm noise power. Ideal mode yields sigma = 0.
NoiseModel derive_sigma(const ChannelConfig& cfg, double measured_signal_power);

std::vector<FxpSample> awgn_apply(const std::vector<FxpSample>& s, NoiseModel& nm, const FxpFormat& fmt,
                                  SaturationCounter* sat = nullptr);

}  // namespace chaoslink
