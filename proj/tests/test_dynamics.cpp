#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "chaoslink/dynamics.hpp"

using namespace chaoslink;

namespace {

// Classical Lorenz flow in unscaled coordinates.
RealState lorenz(const RealState& s, double a, double r, double b) {
    return {a * (s[1] - s[0]), s[0] * (r - s[2]) - s[1], s[0] * s[1] - b * s[2]};
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("default system fits the fixed-point range") {
    DynamicsParams p = default_system();
    CHECK(p.attractor_bound * 3107 <= 32767);
    CHECK_NOTHROW(p.validate(FxpFormat{}));
    CHECK(p.param_count() == 3);
}

TEST_CASE("origin is an equilibrium") {
    RealState d = derivative({0, 0, 0}, default_system());
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);
}

TEST_CASE("nontrivial equilibria vanish") {
    const double b = 8.0 / 3.0, r = 28.0;
    const double c = std::sqrt(b * (r - 1)) / 5.0, z = (r - 1) / 5.0;
    for (double sgn : {1.0, -1.0}) {
        RealState d = derivative({sgn * c, sgn * c, z}, default_system());
        CHECK(d[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(d[1]) < 1e-12);
        CHECK(std::abs(d[2]) < 1e-12);
    }
}

TEST_CASE("scaled field equals the classical field divided by 5") {
    // reference point (1,1,1) of the classical flow: derivative (0, 26, -5/3)
    RealState ref = lorenz({1, 1, 1}, 10, 28, 8.0 / 3.0);
    CHECK(ref[0] == 0.0);
    CHECK(ref[1] == 26.0);
    CHECK(ref[2] == doctest::Approx(-5.0 / 3.0));
    RealState d = derivative({0.2, 0.2, 0.2}, default_system());
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(d[i] == doctest::Approx(ref[i] / 5.0).epsilon(1e-12));
    for (RealState s : {RealState{1.3, -0.4, 2.2}, RealState{-2.0, 3.1, 7.5}}) {
        RealState big{5 * s[0], 5 * s[1], 5 * s[2]};
        RealState want = lorenz(big, 10, 28, 8.0 / 3.0);
        RealState got = derivative(s, default_system());
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(got[i] == doctest::Approx(want[i] / 5.0).epsilon(1e-12));
    }
}

TEST_CASE("regressor reproduces the parameter-linear part") {
    DynamicsParams p = default_system();
    RealState s{0.7, -1.1, 4.0};
    std::vector<double> phi = regressor(s, p);
    std::vector<double> zero(p.param_count(), 0.0);
    RealState known = derivative(s, p, zero);
    RealState full = derivative(s, p);
    for (std::size_t i = 0; i < 3; ++i) {
        double lin = 0.0;
        for (std::size_t j = 0; j < p.param_count(); ++j)
            lin += phi[i * p.param_count() + j] * p.theta[j];
        CHECK(full[i] == doctest::Approx(known[i] + lin).epsilon(1e-12));
    }
}

TEST_CASE("zero field leaves the state unchanged") {
    DynamicsParams p = linear_decay_system(0.0);
    FxpFormat f;
    FxpModel m(p, IntegratorConfig{}, f);
    FxpState s{FxpSample{1234}, FxpSample{-77}, FxpSample{5}};
    CHECK(m.euler_step(s) == s);
    CHECK(euler_step(RealState{0.5, 1, 2}, p, IntegratorConfig{})[0] == 0.5);
}

TEST_CASE("linear decay: one Euler step and closed form") {
    DynamicsParams p = linear_decay_system();
    IntegratorConfig cfg;
    CHECK(euler_step(RealState{1, 0, 0}, p, cfg)[0] == doctest::Approx(0.999).epsilon(1e-15));
    auto tr = simulate(RealState{1, 0, 0}, p, cfg, 1000);
    CHECK(tr.back()[0] == doctest::Approx(std::pow(0.999, 1000)).epsilon(1e-12));
    // global error against exp(-t) is O(h)
    double err = std::abs(tr.back()[0] - std::exp(-1.0));
    CHECK(err < 1e-3);
    CHECK(err > 1e-5);
}

TEST_CASE("fixed-point linear decay tracks the real path") {
    DynamicsParams p = linear_decay_system();
    FxpFormat f;
    auto fx = simulate(FxpState{FxpSample{3107}, {}, {}}, p, IntegratorConfig{}, f, 1000);
    auto rl = simulate(RealState{1, 0, 0}, p, IntegratorConfig{}, 1000);
    CHECK(std::abs(fx.states.back()[0].raw - 3107 * rl.back()[0]) <= 1.0);
}

TEST_CASE("simulate with n = 0 returns the initial state") {
    FxpFormat f;
    auto tr = simulate(FxpState{FxpSample{1032}, FxpSample{-3107}, FxpSample{0}}, default_system(),
                       IntegratorConfig{}, f, 0);
    REQUIRE(tr.states.size() == 1);
    CHECK(tr.states[0][0].raw == 1032);
}

TEST_CASE("fixed-point trajectory is reproducible and close to the reference") {
    FxpFormat f;
    FxpState s0{FxpSample{1032}, FxpSample{-3107}, FxpSample{0}};
    auto a = simulate(s0, default_system(), IntegratorConfig{}, f, 1000);
    auto b = simulate(s0, default_system(), IntegratorConfig{}, f, 1000);
    CHECK(a.states == b.states);
    auto r = simulate(dequantize_state(s0, f), default_system(), IntegratorConfig{}, 1000);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 1000; ++k)
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(a.states[k][i].raw - 3107.0 * r[k][i]));
    MESSAGE("max fixed vs real deviation over 1000 steps: " << worst << " counts");
    CHECK(worst <= 50.0);
}

TEST_CASE("free run stays inside the range") {
    FxpFormat f;
    auto tr = simulate(FxpState{FxpSample{1032}, FxpSample{-3107}, FxpSample{0}}, default_system(),
                       IntegratorConfig{}, f, 200000);
    CHECK(tr.saturation_events == 0);
    int zmax = 0;
    for (const auto& s : tr.states)
        zmax = std::max(zmax, std::abs(s[2].raw));
    CHECK(zmax > 3107 * 5);  // actually visits the attractor
}

TEST_CASE("largest Lyapunov exponent is positive") {
    DynamicsParams p = default_system();
    IntegratorConfig cfg;
    RealState a{1032.0 / 3107, -1.0, 0.0};
    for (int k = 0; k < 5000; ++k)
        a = euler_step(a, p, cfg);
    const double d0 = 1e-6;
    RealState b{a[0] + d0, a[1], a[2]};
    double sum = 0.0;
    const int blocks = 200, per = 100;
    for (int blk = 0; blk < blocks; ++blk) {
        for (int k = 0; k < per; ++k) {
            a = euler_step(a, p, cfg);
            b = euler_step(b, p, cfg);
        }
        RealState d{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        sum += std::log(n / d0);
        for (std::size_t i = 0; i < 3; ++i)
            b[i] = a[i] + d[i] * d0 / n;
    }
    double lambda = sum / (blocks * per * cfg.h);
    MESSAGE("largest Lyapunov exponent estimate: " << lambda);
    CHECK(lambda > 0.3);
}

TEST_CASE("one-count perturbation separates to attractor scale") {
    FxpFormat f;
    FxpModel m(default_system(), IntegratorConfig{}, f);
    RegState a = m.load({FxpSample{1032}, FxpSample{-3107}, FxpSample{0}});
    RegState b = m.load({FxpSample{1033}, FxpSample{-3107}, FxpSample{0}});
    std::size_t horizon = 0;
    for (std::size_t k = 1; k <= 200000 && horizon == 0; ++k) {
        m.advance(a);
        m.advance(b);
        if (std::abs(m.output(a)[0].raw - m.output(b)[0].raw) > 3107)
            horizon = k;
    }
    MESSAGE("separation horizon: " << horizon << " steps");
    CHECK(horizon > 0);
}

TEST_CASE("validation") {
    DynamicsParams p = default_system();
    p.attractor_bound = 20.0;
    CHECK_THROWS(p.validate(FxpFormat{}));
    p = default_system();
    p.terms.push_back({3, kKnown, 1.0, -1, -1});
    CHECK_THROWS(p.validate(FxpFormat{}));
    CHECK_THROWS(IntegratorConfig{0.0, 1.0}.validate());
    CHECK_THROWS(IntegratorConfig{0.001, -1.0}.validate());
}

}
