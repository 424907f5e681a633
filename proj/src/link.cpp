#include "chaoslink/link.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace chaoslink {

void LinkConfig::validate() const {
    fmt.validate();
    integ.validate();
    dynamics.validate(fmt);
    gains.validate();
    adapt.validate(dynamics.param_count());
    detector.validate();
    smoother.validate();
    if (!(bit_rate_hz > 0) || bit_rate_hz > integ.system_rate_hz)
        throw std::invalid_argument("bit_rate_hz must be in (0, system_rate_hz]");
    if (bit_period() < 2)
        throw std::invalid_argument("bit period must be at least 2 samples");
    if (settle_tol <= 0)
        throw std::invalid_argument("settle_tol must be > 0");
    if (!(delay_margin >= 1.0))
        throw std::invalid_argument("delay_margin must be >= 1");
    if (calibration_steps == 0 || power_window == 0)
        throw std::invalid_argument("calibration windows must be nonempty");
}

std::size_t LinkConfig::bit_period() const {
    return static_cast<std::size_t>(std::llround(integ.system_rate_hz / bit_rate_hz));
}

std::vector<FxpState> run_sync(const LinkConfig& cfg, std::size_t n, std::uint64_t* saturation_events) {
    FxpModel model(cfg.dynamics, cfg.integ, cfg.fmt);
    AdaptiveSync sync(model, cfg.gains, cfg.adapt);
    ControllerState cs = sync.initial_state(cfg.rx_ic);
    RegState tx = model.load(cfg.tx_ic);
    SaturationCounter sat;
    std::vector<FxpState> trace;
    trace.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        trace.push_back(sync.step(model.output(tx), cs, &sat));
        model.advance(tx, &sat);
    }
    if (saturation_events)
        *saturation_events = sat.events;
    return trace;
}

Calibration calibrate(const LinkConfig& cfg) {
    cfg.validate();
    FxpModel model(cfg.dynamics, cfg.integ, cfg.fmt);
    AdaptiveSync sync(model, cfg.gains, cfg.adapt);
    ControllerState cs = sync.initial_state(cfg.rx_ic);
    RegState tx = model.load(cfg.tx_ic);
    SaturationCounter sat;
    SettlingTracker tracker(cfg.settle_tol);
    for (std::size_t k = 0; k < cfg.calibration_steps; ++k) {
        tracker.push(sync.step(model.output(tx), cs, &sat));
        model.advance(tx, &sat);
    }
    Calibration cal;
    cal.settling_step = tracker.settled_at();
    cal.saturation_events = sat.events;
    if (cfg.detector.delay_d > 0)
        cal.delay_d = cfg.detector.delay_d;
    else if (cal.settling_step)
        cal.delay_d = static_cast<std::size_t>(std::ceil(static_cast<double>(*cal.settling_step) * cfg.delay_margin));
    else
        cal.delay_d = cfg.calibration_steps;

    // AC power of the unmodulated transmitter over the message region.
    RegState w = model.load(cfg.tx_ic);
    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    const std::size_t end = cal.delay_d + cfg.power_window;
    for (std::size_t k = 0; k < end; ++k) {
        if (k >= cal.delay_d) {
            FxpState o = model.output(w);
            for (std::size_t i = 0; i < 3; ++i) {
                double v = dequantize(o[i], cfg.fmt);
                sum[i] += v;
                sq[i] += v * v;
            }
        }
        model.advance(w);
    }
    const double n = static_cast<double>(cfg.power_window);
    double p = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        p += sq[i] / n - (sum[i] / n) * (sum[i] / n);
    cal.signal_power = p / 3.0;
    return cal;
}

BitTrialResult run_bits(const LinkConfig& cfg, const Calibration& cal, const ChannelConfig& ch,
                        const std::vector<int>& message) {
    if (message.empty())
        throw std::invalid_argument("message must not be empty");
    for (int b : message)
        if (b != 0 && b != 1)
            throw std::invalid_argument("message bits must be 0 or 1");
    FxpModel model(cfg.dynamics, cfg.integ, cfg.fmt);
    AdaptiveSync sync(model, cfg.gains, cfg.adapt);
    ControllerState cs = sync.initial_state(cfg.rx_ic);
    RegState tx = model.load(cfg.tx_ic);
    NoiseModel noise = derive_sigma(ch, cal.signal_power);

    DetectorConfig dcfg = cfg.detector;
    dcfg.delay_d = cal.delay_d;
    BitDetector det(dcfg, cfg.fmt);

    const std::size_t period = cfg.bit_period();
    const std::size_t start = cal.delay_d;
    const std::size_t total = start + message.size() * period;
    const FxpSample amp = quantize(cfg.bit_amplitude, cfg.fmt);
    SaturationCounter sat;
    SaturationCounter rx_sat;

    BitTrialResult res;
    res.sigma = noise.sigma();
    res.binding = noise.binding();
    res.recovered.reserve(message.size());
    std::size_t next = start + period / 2;
    for (std::size_t n = 0; n < total; ++n) {
        FxpState out = model.output(tx);
        if (n >= start) {
            int b = message[(n - start) / period];
            out[2] = modulate(out[2], b ? amp : FxpSample{0}, cfg.fmt, &sat);
        }
        const FxpState received = noise.apply(out, cfg.fmt, &sat);
        const FxpState e = sync.step(received, cs, n >= start ? &rx_sat : &sat);
        const int bit = det.push(e[2]);
        if (n == next) {
            res.recovered.push_back(bit);
            next += period;
        }
        model.advance(tx, &sat);
    }
    int prev = dcfg.initial_bit;
    for (std::size_t k = 0; k < message.size(); ++k) {
        res.errors += res.recovered[k] != message[k] ? 1 : 0;
        res.transitions += message[k] != prev ? 1 : 0;
        prev = message[k];
    }
    res.bits = message.size();
    res.pulses = det.state().edge_count;
    res.saturation_events = sat.events + rx_sat.events;
    res.invalid = !cal.settled();
    return res;
}

WaveResult run_wave(const LinkConfig& cfg, const Calibration& cal, const InfoSignal& info, double freq_hz,
                    std::size_t n_samples) {
    info.validate();
    FxpModel model(cfg.dynamics, cfg.integ, cfg.fmt);
    AdaptiveSync sync(model, cfg.gains, cfg.adapt);
    ControllerState cs = sync.initial_state(cfg.rx_ic);
    RegState tx = model.load(cfg.tx_ic);
    SaturationCounter sat;

    SmootherConfig sc = cfg.smoother;
    const bool fit = sc.fit_gain;
    if (fit)
        sc.gain = 1.0;
    ExpSmoother sm(sc);

    WaveResult res;
    res.recovered.reserve(n_samples);
    res.original.reserve(n_samples);
    const std::size_t start = cal.delay_d;
    for (std::size_t n = 0; n < start + n_samples; ++n) {
        FxpState out = model.output(tx);
        if (n >= start) {
            FxpSample m = quantize(info.at(n - start), cfg.fmt, &sat);
            out[2] = modulate(out[2], m, cfg.fmt, &sat);
            res.original.push_back(dequantize(m, cfg.fmt));
        }
        const FxpState e = sync.step(out, cs, &sat);
        if (n >= start)
            res.recovered.push_back(sm.push(dequantize(e[2], cfg.fmt)));
        model.advance(tx, &sat);
    }

    res.training = freq_hz > 0 ? static_cast<std::size_t>(std::llround(cfg.integ.system_rate_hz / freq_hz)) : 0;
    res.training = std::min(res.training, n_samples / 2);
    // amplitude ratio uses the unit-gain smoother output
    double yy = 0.0, vv = 0.0;
    for (std::size_t i = res.training; i < n_samples; ++i) {
        yy += res.recovered[i] * res.recovered[i];
        vv += res.original[i] * res.original[i];
    }
    res.amplitude_ratio = vv > 0 ? std::sqrt(yy / vv) : 0.0;

    res.gain = fit ? fit_gain(res.recovered, res.original, res.training) : cfg.smoother.gain;
    for (double& y : res.recovered)
        y *= res.gain;

    const std::size_t m = n_samples - res.training;
    double se = 0.0, mr = 0.0, mo = 0.0;
    for (std::size_t i = res.training; i < n_samples; ++i) {
        double d = res.recovered[i] - res.original[i];
        se += d * d;
        mr += res.recovered[i];
        mo += res.original[i];
    }
    if (m > 0) {
        res.rms_error = std::sqrt(se / static_cast<double>(m));
        mr /= static_cast<double>(m);
        mo /= static_cast<double>(m);
        double cov = 0.0, vr = 0.0, vo = 0.0;
        for (std::size_t i = res.training; i < n_samples; ++i) {
            double a = res.recovered[i] - mr, b = res.original[i] - mo;
            cov += a * b;
            vr += a * a;
            vo += b * b;
        }
        res.correlation = (vr > 0 && vo > 0) ? cov / std::sqrt(vr * vo) : 0.0;
    }
    return res;
}

std::vector<int> random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> bits(n);
    for (auto& b : bits)
        b = static_cast<int>(rng() >> 63);
    return bits;
}

}  // namespace chaoslink
