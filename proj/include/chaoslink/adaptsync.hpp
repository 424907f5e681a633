#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chaoslink/dynamics.hpp"
#include "chaoslink/fxp.hpp"

namespace chaoslink {

struct ControllerGains {
    FxpSample k1{6214};
    FxpSample k2{3107};
    FxpSample k3{9321};

    static ControllerGains defaults(const FxpFormat& fmt);
    // throws std::invalid_argument on non-positive gains
    void validate() const;
    FxpSample operator[](std::size_t i) const { return i == 0 ? k1 : (i == 1 ? k2 : k3); }
};

struct ControlSignal {
    Vec3<FxpSample> u{};
};

struct ControllerState {
    // Parameter estimate registers, kParamBits fractional bits. These are the
    // adaptation integrators; theta_hat() reads them out in analog units.
    std::vector<std::int64_t> adapt_accum;
    std::vector<double> gamma;
    // Receiver integrator register; its 16-bit output is the receiver state.
    RegState receiver_reg{};
    FxpState receiver{};

    std::vector<double> theta_hat() const;
};

struct AdaptConfig {
    std::vector<double> gamma{5.0, 0.1, 0.02};
    // Initial estimates of adapted parameters; empty means all zero.
    std::vector<double> theta_hat0;

    void validate(std::size_t param_count) const;
};

inline constexpr FxpState kReceiverIc{FxpSample{0}, FxpSample{-4660}, FxpSample{1553}};
inline constexpr FxpState kTransmitterIc{FxpSample{1032}, FxpSample{-3107}, FxpSample{0}};

/// e = rx - tx_out, componentwise and saturating.
FxpState sync_error(const FxpState& tx_out, const FxpState& rx, const FxpFormat& fmt,
                    SaturationCounter* sat = nullptr);

/// Fixed-point adaptive receiver. The control law is
///   u = -K e + f(r; theta_hat) - f(rx; theta_hat),  r = rx - e,
/// and the estimates follow theta_hat <- theta_hat - h Gamma Phi(r)^T e.
class AdaptiveSync {
public:
    /// Word length of control inputs. They live in the derivative domain,
    /// whose range exceeds the state range, so they use a wider word at the
    /// same scale.
    static constexpr int kControlBits = 24;

    AdaptiveSync(const FxpModel& model, const ControllerGains& gains, const AdaptConfig& adapt);

    ControllerState initial_state(const FxpState& rx0) const;

    ControlSignal control(const FxpState& e, const FxpState& rx, const ControllerState& cs,
                          SaturationCounter* sat = nullptr) const;
    void adapt_step(const FxpState& e, const FxpState& rx, ControllerState& cs) const;
    /// Advances cs.receiver_reg by h (f(rx; theta_hat) + u) and refreshes cs.receiver.
    void receiver_step(const ControlSignal& u, ControllerState& cs, SaturationCounter* sat = nullptr) const;

    /// One system sample: error, control, receiver update, adaptation.
    /// Returns the error computed at the start of the sample.
    FxpState step(const FxpState& received, ControllerState& cs, SaturationCounter* sat = nullptr) const;

    const FxpModel& model() const { return model_; }
    const ControllerGains& gains() const { return gains_; }

private:
    FxpModel model_;
    ControllerGains gains_;
    AdaptConfig adapt_;
    FxpFormat ctrl_fmt_;
    std::vector<std::int64_t> gamma_coef_;  // per term, h*Gamma*multiplier at kCoefBits
    wide_t adapt_den_ = 1;
};

/// Index after which every component stays within +-tol to the end of the
/// trace; nullopt when the trace ends outside the band.
std::optional<std::size_t> settling_time(const std::vector<FxpState>& trace, std::int32_t tol);

/// Streaming form of settling_time.
class SettlingTracker {
public:
    explicit SettlingTracker(std::int32_t tol) : tol_(tol) {}
    void push(const FxpState& e);
    std::optional<std::size_t> settled_at() const;
    std::size_t count() const { return n_; }

private:
    std::int32_t tol_;
    std::size_t n_ = 0;
    std::size_t first_ok_ = 0;
};

/// Real-arithmetic closed loop with the same law, used as the reference path.
struct ReferenceLoop {
    RealState tx{};
    RealState rx{};
    std::vector<double> theta_hat;

    RealState error() const { return {rx[0] - tx[0], rx[1] - tx[1], rx[2] - tx[2]}; }
};

void reference_step(ReferenceLoop& loop, const DynamicsParams& p, const IntegratorConfig& cfg,
                    const RealState& gains, const std::vector<double>& gamma);

/// V = 1/2 e'e + 1/2 sum (theta_hat - theta)^2 / gamma over adapted parameters.
double lyapunov(const ReferenceLoop& loop, const DynamicsParams& p, const std::vector<double>& gamma);

}  // namespace chaoslink
