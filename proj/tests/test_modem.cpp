#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "chaoslink/link.hpp"
#include "chaoslink/modem.hpp"

using namespace chaoslink;

TEST_SUITE("modem") {

TEST_CASE("modulate") {
    FxpFormat f;
    CHECK(modulate(FxpSample{777}, FxpSample{0}, f).raw == 777);
    CHECK(quantize(0.5, f).raw == 1554);
    CHECK(modulate(FxpSample{0}, quantize(0.5, f), f).raw == 1554);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(-32767, 32767);
    for (int i = 0; i < 10000; ++i) {
        FxpSample w{d(rng)}, m{d(rng) / 4};
        CHECK(std::abs(modulate(w, m, f).raw - w.raw) <= std::abs(m.raw));
    }
}

TEST_CASE("constant sub-threshold input gives no pulses") {
    FxpFormat f;
    for (std::size_t win : {1u, 100u}) {
        DetectorConfig c;
        c.window = win;
        BitDetector det(c, f);
        std::uint64_t pulses = 0;
        for (int k = 0; k < 5000; ++k)
            pulses += static_cast<std::uint64_t>(det.detect(FxpSample{1000}));
        CHECK(pulses == 0);
    }
}

TEST_CASE("a three-sample spike gives one pulse") {
    FxpFormat f;
    DetectorConfig c;
    c.window = 1;
    c.refractory = 450;
    BitDetector det(c, f);
    int pulses = 0;
    for (int k = 0; k < 2000; ++k)
        pulses += det.detect(FxpSample{(k >= 500 && k < 503) ? 3107 : 0});
    CHECK(pulses == 1);
}

TEST_CASE("no pulses before the delay") {
    FxpFormat f;
    DetectorConfig c;
    c.window = 1;
    c.delay_d = 100;
    BitDetector det(c, f);
    int early = 0, late = 0;
    for (int k = 0; k < 1000; ++k) {
        int p = det.detect(FxpSample{(k / 50) % 2 ? 3107 : 0});
        (k < 100 ? early : late) += p;
    }
    CHECK(early == 0);
    CHECK(late > 0);
}

TEST_CASE("window statistic marks a step once") {
    FxpFormat f;
    DetectorConfig c;  // window 100, refractory 225
    BitDetector det(c, f);
    std::vector<int> at;
    for (int k = 0; k < 3000; ++k)
        if (det.detect(FxpSample{k >= 1000 && k < 2000 ? -3107 : 0}))
            at.push_back(k);
    REQUIRE(at.size() == 2);
    CHECK(at[0] > 1000);
    CHECK(at[0] < 1100);
    CHECK(at[1] > 2000);
    CHECK(at[1] < 2100);
}

TEST_CASE("decision is the parity of edges seen before the current sample") {
    FxpFormat f;
    BitDetector det(DetectorConfig{}, f);
    CHECK(det.decide(0) == 0);
    CHECK(det.decide(1) == 0);  // memory M delays by one sample
    CHECK(det.decide(0) == 1);
    CHECK(det.decide(1) == 1);
    CHECK(det.decide(0) == 0);
    std::mt19937_64 rng(9);
    std::uint64_t before = det.state().edge_count;
    for (int k = 0; k < 10000; ++k) {
        int p = static_cast<int>(rng() & 1);
        int bit = det.decide(p);
        CHECK(bit == static_cast<int>(before % 2));
        before = det.state().edge_count;
    }
}

TEST_CASE("initial parity") {
    FxpFormat f;
    DetectorConfig c;
    c.initial_bit = 1;
    BitDetector det(c, f);
    CHECK(det.decide(0) == 1);
    CHECK(det.decide(1) == 1);
    CHECK(det.decide(0) == 0);
    c.initial_bit = 2;
    CHECK_THROWS(c.validate());
}

TEST_CASE("detector config validation") {
    DetectorConfig c;
    c.a_threshold = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.refractory = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("demodulate an ideal error waveform") {
    FxpFormat f;
    const std::size_t P = 450, start = 1000;
    std::vector<int> msg = random_bits(200, 4);
    std::vector<FxpSample> e3(start + msg.size() * P);
    for (std::size_t n = start; n < e3.size(); ++n)
        e3[n] = FxpSample{msg[(n - start) / P] ? -3107 : 0};
    DetectorConfig c;
    c.delay_d = start;
    DemodResult r = demodulate_bits(e3, c, f, P, start, msg.size(), start);
    CHECK(r.bits == msg);
    CHECK_FALSE(r.unsettled);
    DemodResult early = demodulate_bits(e3, c, f, P, start, msg.size(), start + 1);
    CHECK(early.unsettled);
}

TEST_CASE("make_sine") {
    InfoSignal s = make_sine(50e3, 0.5, 16, 4.5e6, 450e6, 9000);
    CHECK(s.at(0) == 0.0);
    CHECK(s.samples.size() == 90);  // one period at 4.5 MHz
    for (std::size_t n = 0; n < 100; ++n)
        CHECK(s.at(n) == s.samples[0]);
    CHECK(s.at(100) == s.samples[1]);
    CHECK(s.at(199) == s.samples[1]);
    CHECK(s.samples[1] == doctest::Approx(0.5 * std::sin(2 * M_PI / 90)).epsilon(1e-4));
    CHECK_THROWS_AS(make_sine(5e6, 0.5, 16, 4.5e6, 450e6, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_sine(50e3, 0.5, 0, 4.5e6, 450e6, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_sine(50e3, 0.5, 16, 900e6, 450e6, 10), std::invalid_argument);
}

TEST_CASE("one-bit sine is two-level") {
    InfoSignal s = make_sine(50e3, 0.5, 1, 450e6, 450e6, 9000);
    for (std::size_t k = 1; k < s.samples.size(); ++k)
        if (k != 4500)
            CHECK(std::abs(s.samples[k]) == 0.5);
    CHECK(s.samples[0] == 0.0);
}

TEST_CASE("resolution quantizer step") {
    CHECK(quantize_resolution(0.3, 0.5, 2) == 0.25);
    CHECK(quantize_resolution(0.375, 0.5, 2) == 0.5);  // tie to even multiple
    CHECK(quantize_resolution(0.125, 0.5, 2) == 0.0);
    CHECK(quantize_resolution(0.12345678, 0.5, 16) == doctest::Approx(0.12345678).epsilon(1e-4));
}

TEST_CASE("bitstream signal") {
    InfoSignal b = make_bitstream({1, 0, 1}, 1e6, 450e6, 1.0);
    CHECK(b.at(0) == 1.0);
    CHECK(b.at(449) == 1.0);
    CHECK(b.at(450) == 0.0);
    CHECK(b.at(900) == 1.0);
    CHECK(b.at(1350) == 0.0);
    CHECK(b.system_length() == 1350);
    CHECK_THROWS(make_bitstream({2}, 1e6, 450e6, 1.0));
}

TEST_CASE("smoother") {
    FxpFormat f;
    std::vector<FxpSample> x{FxpSample{3107}, FxpSample{-3107}, FxpSample{1554}};
    auto id = recover_waveform(x, SmootherConfig{1.0, 1.0, false}, f, 0);
    REQUIRE(id.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(id[i] == dequantize(x[i], f));
    std::vector<FxpSample> c(2000, FxpSample{3107});
    SmootherConfig sc{0.01, 2.0, false};
    auto y = recover_waveform(c, sc, f, 500);
    REQUIRE(y.size() == 1500);
    for (std::size_t n : {0u, 10u, 100u})
        CHECK(y[n] == doctest::Approx(2.0 * (1.0 - std::pow(0.99, n + 1))).epsilon(1e-9));
    CHECK(y.back() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS(SmootherConfig{0.0, 1.0, false}.validate());
    CHECK_THROWS(SmootherConfig{1.5, 1.0, false}.validate());
}

TEST_CASE("gain fit") {
    std::vector<double> y{1, 2, 3, 4}, r{-2, -4, -6, -8};
    CHECK(fit_gain(y, r, 4) == doctest::Approx(-2.0));
    CHECK(fit_gain({0, 0}, {1, 1}, 2) == 1.0);
}

}

TEST_SUITE("link") {

TEST_CASE("noise-free link: all-zero and pseudorandom messages") {
    LinkConfig cfg;
    Calibration cal = calibrate(cfg);
    REQUIRE(cal.settled());
    CHECK(cal.delay_d == static_cast<std::size_t>(std::ceil(1.1 * static_cast<double>(*cal.settling_step))));
    ChannelConfig ideal;
    ideal.mode = ChannelMode::ideal;

    BitTrialResult z = run_bits(cfg, cal, ideal, std::vector<int>(300, 0));
    CHECK(z.errors == 0);
    CHECK(z.pulses == 0);

    BitTrialResult ones = run_bits(cfg, cal, ideal, std::vector<int>(300, 1));
    CHECK(ones.errors == 0);

    std::vector<int> alt(400);
    for (std::size_t i = 0; i < alt.size(); ++i)
        alt[i] = static_cast<int>(i % 2);
    BitTrialResult a = run_bits(cfg, cal, ideal, alt);
    CHECK(a.errors == 0);
    CHECK(a.pulses == a.transitions);

    BitTrialResult r = run_bits(cfg, cal, ideal, random_bits(1000, 77));
    CHECK(r.errors == 0);
    CHECK(r.pulses == r.transitions);

    // inverted message: recovered exactly as well, given the known preamble parity
    std::vector<int> inv = random_bits(1000, 77);
    for (int& b : inv)
        b ^= 1;
    BitTrialResult ri = run_bits(cfg, cal, ideal, inv);
    CHECK(ri.errors == 0);
    for (std::size_t i = 0; i < inv.size(); ++i)
        REQUIRE(ri.recovered[i] != r.recovered[i]);

    CHECK_THROWS_AS(run_bits(cfg, cal, ideal, {}), std::invalid_argument);
}

TEST_CASE("waveform recovery correlates with the transmitted sine") {
    LinkConfig cfg;
    Calibration cal = calibrate(cfg);
    const std::size_t n = 200000;
    InfoSignal s = make_sine(50e3, 0.5, 16, 450e6, 450e6, n);
    WaveResult w = run_wave(cfg, cal, s, 50e3, n);
    MESSAGE("corr " << w.correlation << " rms " << w.rms_error << " gain " << w.gain);
    CHECK(w.correlation >= 0.95);
    CHECK(w.gain < 0.0);
    InfoSignal zero = make_sine(50e3, 0.0, 16, 450e6, 450e6, 20000);
    WaveResult wz = run_wave(cfg, cal, zero, 50e3, 20000);
    CHECK(wz.rms_error <= 1.0 / 3107);
}

}
