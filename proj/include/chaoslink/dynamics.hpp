#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chaoslink/fxp.hpp"

namespace chaoslink {

template <class T>
using Vec3 = std::array<T, 3>;
using FxpState = Vec3<FxpSample>;
using RealState = Vec3<double>;

inline constexpr int kKnown = -1;

/// One monomial term of a polynomial vector field:
///   f[component] += multiplier * theta[param] * s[var_a] * s[var_b]
/// with param == kKnown meaning a coefficient of 1 and var == -1 an absent factor.
struct Term {
    int component = 0;
    int param = kKnown;
    double multiplier = 1.0;
    int var_a = -1;
    int var_b = -1;

    int degree() const { return (var_a >= 0) + (var_b >= 0); }
};

struct DynamicsParams {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<double> theta;
    std::vector<Term> terms;
    // Parameters flagged here are known to the receiver and never adapted.
    std::vector<bool> known;
    double attractor_bound = 10.0;

    bool is_known(std::size_t j) const { return j < known.size() && known[j]; }

    // throws std::invalid_argument
    void validate(const FxpFormat& fmt) const;
    std::size_t param_count() const { return theta.size(); }
};

struct IntegratorConfig {
    double h = 0.001;
    double system_rate_hz = 450e6;

    void validate() const;
};

/// Lorenz system with states divided by 5 so the attractor stays within +-10.
DynamicsParams default_system();
/// dx/dt = -x on the first component only.
DynamicsParams linear_decay_system(double rate = 1.0);

RealState derivative(const RealState& s, const DynamicsParams& p);
RealState derivative(const RealState& s, const DynamicsParams& p, const std::vector<double>& theta);
RealState euler_step(const RealState& s, const DynamicsParams& p, const IntegratorConfig& cfg);

/// Regressor: f(s; theta) = Phi(s) * theta + known(s). Row-major, 3 x param_count.
std::vector<double> regressor(const RealState& s, const DynamicsParams& p);

// Binary point of baked coefficients and of parameter registers.
inline constexpr int kCoefBits = 40;
inline constexpr int kParamBits = 32;
// Extra fractional bits carried by integrator state registers below 1 raw count.
inline constexpr int kRegisterBits = 16;

/// Integrator register: raw counts scaled by 2^kRegisterBits. Its 16-bit
/// output (round half to even) is the signal seen by every other block.
using RegState = Vec3<std::int64_t>;

/// Fixed-point evaluator of a DynamicsParams model. Coefficients (with and
/// without the step size folded in) are quantized once at construction;
/// parameters are passed as registers with kParamBits fractional bits.
class FxpModel {
public:
    FxpModel(const DynamicsParams& p, const IntegratorConfig& cfg, const FxpFormat& fmt);

    const FxpFormat& format() const { return fmt_; }
    const DynamicsParams& params() const { return params_; }
    const std::vector<std::int64_t>& true_theta() const { return theta_true_; }
    std::int64_t h_coef() const { return h_coef_; }
    double h() const { return h_; }

    // Numerators over step_denominator(): h * f(s; theta) in raw counts.
    Vec3<wide_t> step_numerator(const FxpState& s, const std::vector<std::int64_t>& theta) const;
    // Numerators over step_denominator(): f(s; theta) in raw counts per unit time.
    Vec3<wide_t> rate_numerator(const FxpState& s, const std::vector<std::int64_t>& theta) const;
    wide_t step_denominator() const { return denom_; }

    wide_t register_denominator() const { return reg_denom_; }

    RegState load(const FxpState& s) const;
    FxpState output(const RegState& r, SaturationCounter* sat = nullptr) const;
    std::int64_t clamp_register(wide_t v, SaturationCounter* sat = nullptr) const;

    /// reg <- reg + h f(output(reg); theta), rounded once per component.
    void advance(RegState& reg, const std::vector<std::int64_t>& theta, SaturationCounter* sat = nullptr) const;
    void advance(RegState& reg, SaturationCounter* sat = nullptr) const { advance(reg, theta_true_, sat); }

    /// Single step on a 16-bit state: output(load(s) + h f(s)).
    FxpState euler_step(const FxpState& s, SaturationCounter* sat = nullptr) const;

    static std::int64_t param_register(double value);
    static double param_value(std::int64_t reg);

private:
    Vec3<wide_t> accumulate(const FxpState& s, const std::vector<std::int64_t>& theta,
                            const std::vector<std::int64_t>& coefs) const;

    FxpFormat fmt_;
    DynamicsParams params_;
    std::vector<std::int64_t> coef_h_;
    std::vector<std::int64_t> coef_;
    std::vector<std::int64_t> theta_true_;
    std::int64_t h_coef_ = 0;
    double h_ = 0.0;
    wide_t denom_ = 1;
    wide_t reg_denom_ = 1;
};

struct FxpTrajectory {
    std::vector<FxpState> states;
    std::uint64_t saturation_events = 0;
};

FxpTrajectory simulate(const FxpState& s0, const DynamicsParams& p, const IntegratorConfig& cfg,
                       const FxpFormat& fmt, std::size_t n);
std::vector<RealState> simulate(const RealState& s0, const DynamicsParams& p, const IntegratorConfig& cfg,
                                std::size_t n);

FxpState quantize_state(const RealState& s, const FxpFormat& fmt, SaturationCounter* sat = nullptr);
RealState dequantize_state(const FxpState& s, const FxpFormat& fmt);

}  // namespace chaoslink
