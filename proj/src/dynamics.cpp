#include "chaoslink/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslink {

void DynamicsParams::validate(const FxpFormat& fmt) const {
    if (param_names.size() != theta.size())
        throw std::invalid_argument("dynamics: param_names and theta differ in length");
    if (!known.empty() && known.size() != theta.size())
        throw std::invalid_argument("dynamics: known flags and theta differ in length");
    for (const Term& t : terms) {
        if (t.component < 0 || t.component > 2)
            throw std::invalid_argument("dynamics: term component out of range");
        if (t.param != kKnown && (t.param < 0 || static_cast<std::size_t>(t.param) >= theta.size()))
            throw std::invalid_argument("dynamics: term parameter index out of range");
        if (t.var_a < -1 || t.var_a > 2 || t.var_b < -1 || t.var_b > 2)
            throw std::invalid_argument("dynamics: term variable index out of range");
    }
    if (!(attractor_bound > 0) || attractor_bound * static_cast<double>(fmt.scale) > static_cast<double>(fmt.max_raw()))
        throw std::invalid_argument("dynamics: attractor_bound does not fit the fixed-point range");
}

void IntegratorConfig::validate() const {
    if (!(h > 0))
        throw std::invalid_argument("h must be > 0");
    if (!(system_rate_hz > 0))
        throw std::invalid_argument("system_rate_hz must be > 0");
}

DynamicsParams default_system() {
    // X = x/5, Y = y/5, Z = z/5 of the classical Lorenz flow.
    DynamicsParams p;
    p.name = "lorenz-scaled-1/5";
    p.param_names = {"sigma", "rho", "beta"};
    p.theta = {10.0, 28.0, 8.0 / 3.0};
    p.terms = {
        {0, 0, 1.0, 1, -1},   // sigma*Y
        {0, 0, -1.0, 0, -1},  // -sigma*X
        {1, 1, 1.0, 0, -1},   // rho*X
        {1, kKnown, -5.0, 0, 2},
        {1, kKnown, -1.0, 1, -1},
        {2, kKnown, 5.0, 0, 1},
        {2, 2, -1.0, 2, -1},  // -beta*Z
    };
    p.attractor_bound = 10.0;
    return p;
}

DynamicsParams linear_decay_system(double rate) {
    DynamicsParams p;
    p.name = "linear-decay";
    p.param_names = {"rate"};
    p.theta = {rate};
    p.terms = {{0, 0, -1.0, 0, -1}};
    p.attractor_bound = 1.0;
    return p;
}

namespace {

double monomial(const RealState& s, const Term& t) {
    double v = 1.0;
    if (t.var_a >= 0)
        v *= s[static_cast<std::size_t>(t.var_a)];
    if (t.var_b >= 0)
        v *= s[static_cast<std::size_t>(t.var_b)];
    return v;
}

}  // namespace

RealState derivative(const RealState& s, const DynamicsParams& p, const std::vector<double>& theta) {
    RealState d{0.0, 0.0, 0.0};
    for (const Term& t : p.terms) {
        double coef = t.param == kKnown ? 1.0 : theta[static_cast<std::size_t>(t.param)];
        d[static_cast<std::size_t>(t.component)] += t.multiplier * coef * monomial(s, t);
    }
    return d;
}

RealState derivative(const RealState& s, const DynamicsParams& p) { return derivative(s, p, p.theta); }

RealState euler_step(const RealState& s, const DynamicsParams& p, const IntegratorConfig& cfg) {
    RealState d = derivative(s, p);
    return {s[0] + cfg.h * d[0], s[1] + cfg.h * d[1], s[2] + cfg.h * d[2]};
}

std::vector<double> regressor(const RealState& s, const DynamicsParams& p) {
    std::vector<double> phi(3 * p.param_count(), 0.0);
    for (const Term& t : p.terms) {
        if (t.param == kKnown)
            continue;
        phi[static_cast<std::size_t>(t.component) * p.param_count() + static_cast<std::size_t>(t.param)] +=
            t.multiplier * monomial(s, t);
    }
    return phi;
}

FxpModel::FxpModel(const DynamicsParams& p, const IntegratorConfig& cfg, const FxpFormat& fmt)
    : fmt_(fmt), params_(p) {
    fmt.validate();
    cfg.validate();
    p.validate(fmt);
    const double one = std::ldexp(1.0, kCoefBits);
    for (const Term& t : p.terms) {
        coef_h_.push_back(static_cast<std::int64_t>(round_half_even(cfg.h * t.multiplier * one)));
        coef_.push_back(static_cast<std::int64_t>(round_half_even(t.multiplier * one)));
    }
    for (double th : p.theta)
        theta_true_.push_back(param_register(th));
    h_ = cfg.h;
    h_coef_ = static_cast<std::int64_t>(round_half_even(cfg.h * one));
    denom_ = (wide_t{1} << (kCoefBits + kParamBits)) * fmt.scale;
    reg_denom_ = (wide_t{1} << (kCoefBits + kParamBits - kRegisterBits)) * fmt.scale;
}

std::int64_t FxpModel::param_register(double value) {
    return static_cast<std::int64_t>(round_half_even(std::ldexp(value, kParamBits)));
}

double FxpModel::param_value(std::int64_t reg) { return std::ldexp(static_cast<double>(reg), -kParamBits); }

Vec3<wide_t> FxpModel::accumulate(const FxpState& s, const std::vector<std::int64_t>& theta,
                                  const std::vector<std::int64_t>& coefs) const {
    Vec3<wide_t> acc{0, 0, 0};
    const wide_t unit = wide_t{1} << kParamBits;
    for (std::size_t i = 0; i < params_.terms.size(); ++i) {
        const Term& t = params_.terms[i];
        // bring every monomial to raw^2 units so all terms share one denominator
        wide_t mono = 1;
        int d = 0;
        if (t.var_a >= 0) {
            mono *= s[static_cast<std::size_t>(t.var_a)].raw;
            ++d;
        }
        if (t.var_b >= 0) {
            mono *= s[static_cast<std::size_t>(t.var_b)].raw;
            ++d;
        }
        for (int k = d; k < 2; ++k)
            mono *= fmt_.scale;
        wide_t th = t.param == kKnown ? unit : theta[static_cast<std::size_t>(t.param)];
        acc[static_cast<std::size_t>(t.component)] += static_cast<wide_t>(coefs[i]) * th * mono;
    }
    return acc;
}

Vec3<wide_t> FxpModel::step_numerator(const FxpState& s, const std::vector<std::int64_t>& theta) const {
    return accumulate(s, theta, coef_h_);
}

Vec3<wide_t> FxpModel::rate_numerator(const FxpState& s, const std::vector<std::int64_t>& theta) const {
    return accumulate(s, theta, coef_);
}

RegState FxpModel::load(const FxpState& s) const {
    return {std::int64_t{s[0].raw} << kRegisterBits, std::int64_t{s[1].raw} << kRegisterBits,
            std::int64_t{s[2].raw} << kRegisterBits};
}

FxpState FxpModel::output(const RegState& r, SaturationCounter* sat) const {
    FxpState out;
    for (std::size_t i = 0; i < 3; ++i)
        out[i] = saturate(div_round_even(r[i], wide_t{1} << kRegisterBits), fmt_, sat);
    return out;
}

std::int64_t FxpModel::clamp_register(wide_t v, SaturationCounter* sat) const {
    const wide_t lim = static_cast<wide_t>(fmt_.max_raw()) << kRegisterBits;
    if (v > lim || v < -lim) {
        if (sat)
            ++sat->events;
        return static_cast<std::int64_t>(v > 0 ? lim : -lim);
    }
    return static_cast<std::int64_t>(v);
}

void FxpModel::advance(RegState& reg, const std::vector<std::int64_t>& theta, SaturationCounter* sat) const {
    const Vec3<wide_t> num = step_numerator(output(reg), theta);
    for (std::size_t i = 0; i < 3; ++i)
        reg[i] = clamp_register(static_cast<wide_t>(reg[i]) + div_round_even(num[i], reg_denom_), sat);
}

FxpState FxpModel::euler_step(const FxpState& s, SaturationCounter* sat) const {
    RegState reg = load(s);
    advance(reg, sat);
    return output(reg);
}

FxpTrajectory simulate(const FxpState& s0, const DynamicsParams& p, const IntegratorConfig& cfg,
                       const FxpFormat& fmt, std::size_t n) {
    FxpModel model(p, cfg, fmt);
    SaturationCounter sat;
    FxpTrajectory tr;
    tr.states.reserve(n + 1);
    tr.states.push_back(s0);
    RegState reg = model.load(s0);
    for (std::size_t k = 0; k < n; ++k) {
        model.advance(reg, &sat);
        tr.states.push_back(model.output(reg));
    }
    tr.saturation_events = sat.events;
    return tr;
}

std::vector<RealState> simulate(const RealState& s0, const DynamicsParams& p, const IntegratorConfig& cfg,
                                std::size_t n) {
    cfg.validate();
    std::vector<RealState> out;
    out.reserve(n + 1);
    out.push_back(s0);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(euler_step(out.back(), p, cfg));
    return out;
}

FxpState quantize_state(const RealState& s, const FxpFormat& fmt, SaturationCounter* sat) {
    return {quantize(s[0], fmt, sat), quantize(s[1], fmt, sat), quantize(s[2], fmt, sat)};
}

RealState dequantize_state(const FxpState& s, const FxpFormat& fmt) {
    return {dequantize(s[0], fmt), dequantize(s[1], fmt), dequantize(s[2], fmt)};
}

}  // namespace chaoslink
