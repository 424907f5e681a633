#include "chaoslink/adaptsync.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace chaoslink {

ControllerGains ControllerGains::defaults(const FxpFormat& fmt) {
    const auto s = static_cast<std::int32_t>(fmt.scale);
    return {FxpSample{2 * s}, FxpSample{s}, FxpSample{3 * s}};
}

void ControllerGains::validate() const {
    if (k1.raw <= 0 || k2.raw <= 0 || k3.raw <= 0)
        throw std::invalid_argument("controller gains must be positive");
}

std::vector<double> ControllerState::theta_hat() const {
    std::vector<double> out;
    out.reserve(adapt_accum.size());
    for (std::int64_t r : adapt_accum)
        out.push_back(FxpModel::param_value(r));
    return out;
}

void AdaptConfig::validate(std::size_t param_count) const {
    if (gamma.size() != param_count)
        throw std::invalid_argument("gamma must have one entry per dynamics parameter");
    for (double g : gamma)
        if (!(g > 0) || !std::isfinite(g))
            throw std::invalid_argument("gamma entries must be positive");
    if (!theta_hat0.empty() && theta_hat0.size() != param_count)
        throw std::invalid_argument("theta_hat0 must be empty or match the parameter count");
}

FxpState sync_error(const FxpState& tx_out, const FxpState& rx, const FxpFormat& fmt, SaturationCounter* sat) {
    return {sat_sub(rx[0], tx_out[0], fmt, sat), sat_sub(rx[1], tx_out[1], fmt, sat),
            sat_sub(rx[2], tx_out[2], fmt, sat)};
}

AdaptiveSync::AdaptiveSync(const FxpModel& model, const ControllerGains& gains, const AdaptConfig& adapt)
    : model_(model), gains_(gains), adapt_(adapt) {
    gains.validate();
    ctrl_fmt_ = FxpFormat{kControlBits, model_.format().scale};
    const DynamicsParams& p = model_.params();
    adapt.validate(p.param_count());
    const double one = std::ldexp(1.0, kCoefBits);
    const double h = model_.h();
    for (const Term& t : p.terms) {
        double g = t.param == kKnown ? 0.0 : adapt.gamma[static_cast<std::size_t>(t.param)];
        gamma_coef_.push_back(static_cast<std::int64_t>(round_half_even(h * g * t.multiplier * one)));
    }
    const wide_t s = model_.format().scale;
    adapt_den_ = (wide_t{1} << (kCoefBits - kParamBits)) * s * s * s;
}

ControllerState AdaptiveSync::initial_state(const FxpState& rx0) const {
    const DynamicsParams& p = model_.params();
    ControllerState cs;
    cs.gamma = adapt_.gamma;
    cs.receiver = rx0;
    cs.receiver_reg = model_.load(rx0);
    for (std::size_t j = 0; j < p.param_count(); ++j) {
        if (p.is_known(j))
            cs.adapt_accum.push_back(model_.true_theta()[j]);
        else
            cs.adapt_accum.push_back(adapt_.theta_hat0.empty() ? 0 : FxpModel::param_register(adapt_.theta_hat0[j]));
    }
    return cs;
}

ControlSignal AdaptiveSync::control(const FxpState& e, const FxpState& rx, const ControllerState& cs,
                                    SaturationCounter* sat) const {
    const FxpFormat& fmt = model_.format();
    const FxpState r = sync_error(e, rx, fmt);  // rx - e: the received signal
    Vec3<wide_t> fr = model_.rate_numerator(r, cs.adapt_accum);
    Vec3<wide_t> fs = model_.rate_numerator(rx, cs.adapt_accum);
    ControlSignal out;
    for (std::size_t i = 0; i < 3; ++i) {
        wide_t fb = mul_scaled(gains_[i], e[i], fmt).raw;
        wide_t comp = div_round_even(fr[i] - fs[i], model_.step_denominator());
        out.u[i] = saturate(comp - fb, ctrl_fmt_, sat);
    }
    return out;
}

void AdaptiveSync::adapt_step(const FxpState& e, const FxpState& rx, ControllerState& cs) const {
    const DynamicsParams& p = model_.params();
    const FxpFormat& fmt = model_.format();
    const FxpState r = sync_error(e, rx, fmt);
    std::vector<wide_t> num(p.param_count(), 0);
    bool any = false;
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const Term& t = p.terms[i];
        if (t.param == kKnown || p.is_known(static_cast<std::size_t>(t.param)))
            continue;
        wide_t mono = e[static_cast<std::size_t>(t.component)].raw;
        if (mono == 0)
            continue;
        int d = 0;
        if (t.var_a >= 0) {
            mono *= r[static_cast<std::size_t>(t.var_a)].raw;
            ++d;
        }
        if (t.var_b >= 0) {
            mono *= r[static_cast<std::size_t>(t.var_b)].raw;
            ++d;
        }
        for (int k = d; k < 2; ++k)
            mono *= fmt.scale;
        num[static_cast<std::size_t>(t.param)] += static_cast<wide_t>(gamma_coef_[i]) * mono;
        any = true;
    }
    if (!any)
        return;
    for (std::size_t j = 0; j < num.size(); ++j)
        if (num[j] != 0)
            cs.adapt_accum[j] -= div_round_even(num[j], adapt_den_);
}

void AdaptiveSync::receiver_step(const ControlSignal& u, ControllerState& cs, SaturationCounter* sat) const {
    const FxpFormat& fmt = model_.format();
    Vec3<wide_t> num = model_.step_numerator(cs.receiver, cs.adapt_accum);
    const wide_t uscale = static_cast<wide_t>(model_.h_coef()) * (wide_t{1} << kParamBits) * fmt.scale;
    for (std::size_t i = 0; i < 3; ++i) {
        wide_t n = num[i] + uscale * u.u[i].raw;
        cs.receiver_reg[i] = model_.clamp_register(
            static_cast<wide_t>(cs.receiver_reg[i]) + div_round_even(n, model_.register_denominator()), sat);
    }
    cs.receiver = model_.output(cs.receiver_reg);
}

FxpState AdaptiveSync::step(const FxpState& received, ControllerState& cs, SaturationCounter* sat) const {
    const FxpState e = sync_error(received, cs.receiver, model_.format(), sat);
    const ControlSignal u = control(e, cs.receiver, cs, sat);
    const FxpState rx = cs.receiver;
    receiver_step(u, cs, sat);
    adapt_step(e, rx, cs);
    return e;
}

std::optional<std::size_t> settling_time(const std::vector<FxpState>& trace, std::int32_t tol) {
    SettlingTracker t(tol);
    for (const FxpState& e : trace)
        t.push(e);
    return t.settled_at();
}

void SettlingTracker::push(const FxpState& e) {
    ++n_;
    for (const FxpSample& c : e)
        if (std::abs(c.raw) > tol_) {
            first_ok_ = n_;
            return;
        }
}

std::optional<std::size_t> SettlingTracker::settled_at() const {
    if (first_ok_ >= n_ && n_ > 0)
        return std::nullopt;
    return first_ok_;
}

void reference_step(ReferenceLoop& loop, const DynamicsParams& p, const IntegratorConfig& cfg,
                    const RealState& gains, const std::vector<double>& gamma) {
    const RealState e = loop.error();
    const RealState fr = derivative(loop.tx, p, loop.theta_hat);
    const RealState ftx = derivative(loop.tx, p);
    const std::vector<double> phi = regressor(loop.tx, p);
    const std::size_t np = p.param_count();
    for (std::size_t i = 0; i < 3; ++i) {
        // f(rx; theta_hat) + u = f(r; theta_hat) - K e
        loop.rx[i] += cfg.h * (fr[i] - gains[i] * e[i]);
        loop.tx[i] += cfg.h * ftx[i];
    }
    for (std::size_t j = 0; j < np; ++j) {
        if (p.is_known(j))
            continue;
        double g = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            g += phi[i * np + j] * e[i];
        loop.theta_hat[j] -= cfg.h * gamma[j] * g;
    }
}

double lyapunov(const ReferenceLoop& loop, const DynamicsParams& p, const std::vector<double>& gamma) {
    const RealState e = loop.error();
    double v = 0.5 * (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
    for (std::size_t j = 0; j < p.param_count(); ++j) {
        if (p.is_known(j))
            continue;
        double d = loop.theta_hat[j] - p.theta[j];
        v += 0.5 * d * d / gamma[j];
    }
    return v;
}

}  // namespace chaoslink
