#include "chaoslink/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslink {

const char* to_string(ChannelMode m) { return m == ChannelMode::ideal ? "ideal" : "awgn"; }

const char* to_string(BindingConstraint b) {
    switch (b) {
    case BindingConstraint::ebn0:
        return "ebn0";
    case BindingConstraint::noise_floor:
        return "noise_floor";
    default:
        return "none";
    }
}

ChannelMode parse_channel_mode(const std::string& s) {
    if (s == "ideal")
        return ChannelMode::ideal;
    if (s == "awgn")
        return ChannelMode::awgn;
    throw std::invalid_argument("unknown channel mode '" + s + "'");
}

BindingConstraint parse_binding(const std::string& s) {
    if (s == "none")
        return BindingConstraint::none;
    if (s == "ebn0")
        return BindingConstraint::ebn0;
    if (s == "noise_floor")
        return BindingConstraint::noise_floor;
    throw std::invalid_argument("unknown binding constraint '" + s + "'");
}

double dbm_to_power(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

NoiseModel::NoiseModel(double sigma, std::uint64_t seed, BindingConstraint binding)
    : sigma_(sigma), binding_(binding), rng_(seed) {
    if (!(sigma >= 0) || !std::isfinite(sigma))
        throw std::invalid_argument("noise sigma must be finite and >= 0");
}

FxpSample NoiseModel::apply(FxpSample s, const FxpFormat& fmt, SaturationCounter* sat) {
    if (sigma_ == 0.0)
        return s;
    return quantize(dequantize(s, fmt) + draw(), fmt, sat);
}

FxpState NoiseModel::apply(const FxpState& s, const FxpFormat& fmt, SaturationCounter* sat) {
    return {apply(s[0], fmt, sat), apply(s[1], fmt, sat), apply(s[2], fmt, sat)};
}

NoiseModel derive_sigma(const ChannelConfig& cfg, double measured_signal_power) {
    if (!(measured_signal_power > 0))
        throw std::invalid_argument("measured signal power must be > 0");
    if (!(cfg.bit_rate_hz > 0) || !(cfg.system_rate_hz > 0))
        throw std::invalid_argument("channel rates must be positive");
    if (cfg.mode == ChannelMode::ideal)
        return NoiseModel(0.0, cfg.seed);

    const double eb = measured_signal_power / cfg.bit_rate_hz;
    const double n0 = eb / std::pow(10.0, cfg.ebn0_db / 10.0);
    const double var_ebn0 = n0 * cfg.system_rate_hz / 2.0;
    const double var_floor = dbm_to_power(cfg.noise_power_dbm);
    BindingConstraint b = BindingConstraint::none;
    double var = 0.0;
    if (var_ebn0 > 0.0 || var_floor > 0.0)
        b = var_ebn0 >= var_floor ? BindingConstraint::ebn0 : BindingConstraint::noise_floor;
    var = std::max(var_ebn0, var_floor);
    NoiseModel nm(std::sqrt(var), cfg.seed, b);
    nm.ebn0_var_ = var_ebn0;
    nm.floor_var_ = var_floor;
    return nm;
}

std::vector<FxpSample> awgn_apply(const std::vector<FxpSample>& s, NoiseModel& nm, const FxpFormat& fmt,
                                  SaturationCounter* sat) {
    std::vector<FxpSample> out;
    out.reserve(s.size());
    for (FxpSample v : s)
        out.push_back(nm.apply(v, fmt, sat));
    return out;
}

}  // namespace chaoslink
