#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chaoslink/berlab.hpp"
#include "chaoslink/config.hpp"
#include "chaoslink/link.hpp"

namespace py = pybind11;
using namespace chaoslink;

namespace {

using Triple = std::tuple<int, int, int>;

FxpState to_state(const Triple& t) {
    return {FxpSample{std::get<0>(t)}, FxpSample{std::get<1>(t)}, FxpSample{std::get<2>(t)}};
}

Triple from_state(const FxpState& s) {
    return {s[0].raw, s[1].raw, s[2].raw};
}

std::vector<Triple> rows(const std::vector<FxpState>& v) {
    std::vector<Triple> out;
    out.reserve(v.size());
    for (const FxpState& s : v)
        out.push_back(from_state(s));
    return out;
}

}  // namespace

PYBIND11_MODULE(_chaoslink, m) {
    m.doc() = "Fixed-point chaotic masking link";
    m.attr("__version__") = kVersion;

    py::class_<LinkConfig>(m, "LinkConfig")
        .def(py::init<>())
        .def_property(
            "tx_ic", [](const LinkConfig& c) { return from_state(c.tx_ic); },
            [](LinkConfig& c, const Triple& t) { c.tx_ic = to_state(t); })
        .def_property(
            "rx_ic", [](const LinkConfig& c) { return from_state(c.rx_ic); },
            [](LinkConfig& c, const Triple& t) { c.rx_ic = to_state(t); })
        .def_readwrite("bit_amplitude", &LinkConfig::bit_amplitude)
        .def_readwrite("bit_rate_hz", &LinkConfig::bit_rate_hz)
        .def_readwrite("settle_tol", &LinkConfig::settle_tol)
        .def_readwrite("calibration_steps", &LinkConfig::calibration_steps)
        .def_property(
            "a_threshold", [](const LinkConfig& c) { return c.detector.a_threshold; },
            [](LinkConfig& c, double v) { c.detector.a_threshold = v; })
        .def("bit_period", &LinkConfig::bit_period);

    py::class_<Calibration>(m, "Calibration")
        .def_readonly("settling_step", &Calibration::settling_step)
        .def_readonly("delay_d", &Calibration::delay_d)
        .def_readonly("signal_power", &Calibration::signal_power)
        .def_property_readonly("settled", &Calibration::settled);

    py::class_<BitTrialResult>(m, "BitTrialResult")
        .def_readonly("recovered", &BitTrialResult::recovered)
        .def_readonly("errors", &BitTrialResult::errors)
        .def_readonly("bits", &BitTrialResult::bits)
        .def_readonly("pulses", &BitTrialResult::pulses)
        .def_readonly("transitions", &BitTrialResult::transitions)
        .def_readonly("invalid", &BitTrialResult::invalid)
        .def_readonly("sigma", &BitTrialResult::sigma)
        .def_property_readonly("binding", [](const BitTrialResult& r) { return to_string(r.binding); });

    py::class_<BerPoint>(m, "BerPoint")
        .def_readonly("ebn0_db", &BerPoint::ebn0_db)
        .def_readonly("noise_dbm", &BerPoint::noise_dbm)
        .def_readonly("bits", &BerPoint::bits)
        .def_readonly("errors", &BerPoint::errors)
        .def_readonly("ber", &BerPoint::ber)
        .def_readonly("invalid_trials", &BerPoint::invalid_trials)
        .def_property_readonly("binding", [](const BerPoint& p) { return to_string(p.binding); });

    m.def("quantize", [](double v) { return quantize(v, FxpFormat{}).raw; }, py::arg("value"));
    m.def("dequantize", [](int raw) { return dequantize(FxpSample{raw}, FxpFormat{}); }, py::arg("raw"));
    m.def("to_bitword", [](int raw) { return to_bitword(FxpSample{raw}, FxpFormat{}).text(); }, py::arg("raw"));
    m.def("from_bitword", [](const std::string& w) { return from_bitword(w, FxpFormat{}).raw; }, py::arg("word"));

    m.def(
        "simulate",
        [](const Triple& s0, std::size_t n) {
            LinkConfig c;
            return rows(simulate(to_state(s0), c.dynamics, c.integ, c.fmt, n).states);
        },
        py::arg("s0"), py::arg("n"), "Free-running transmitter: n + 1 raw states starting with s0.");
    m.def(
        "run_sync", [](const LinkConfig& c, std::size_t n) { return rows(run_sync(c, n)); }, py::arg("config"),
        py::arg("n"), "Unmodulated synchronization error trace, n rows of raw counts.");
    m.def(
        "settling_time",
        [](const std::vector<Triple>& trace, std::int32_t tol) {
            std::vector<FxpState> t;
            t.reserve(trace.size());
            for (const Triple& r : trace)
                t.push_back(to_state(r));
            return settling_time(t, tol);
        },
        py::arg("trace"), py::arg("tol") = 10);
    m.def("calibrate", &calibrate, py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("random_bits", &random_bits, py::arg("n"), py::arg("seed"));
    m.def(
        "run_bits",
        [](const LinkConfig& c, const Calibration& cal, const std::vector<int>& message, const std::string& mode,
           double ebn0_db, double noise_dbm, std::uint64_t seed) {
            ChannelConfig ch;
            ch.mode = parse_channel_mode(mode);
            ch.ebn0_db = ebn0_db;
            ch.noise_power_dbm = noise_dbm;
            ch.seed = seed;
            py::gil_scoped_release release;
            return run_bits(c, cal, ch, message);
        },
        py::arg("config"), py::arg("calibration"), py::arg("message"), py::arg("mode") = "ideal",
        py::arg("ebn0_db") = 20.0, py::arg("noise_dbm") = 30.0, py::arg("seed") = 1);
    m.def(
        "sweep",
        [](const LinkConfig& c, const Calibration& cal, const std::vector<double>& ebn0_grid,
           const std::vector<double>& noise_powers_dbm, std::size_t bits_per_trial, std::size_t trials,
           std::uint64_t seed, unsigned threads) {
            SweepConfig sc;
            sc.link = c;
            sc.ebn0_grid = ebn0_grid;
            sc.noise_powers_dbm = noise_powers_dbm;
            sc.bits_per_trial = bits_per_trial;
            sc.trials_per_point = trials;
            sc.master_seed = seed;
            sc.threads = threads;
            py::gil_scoped_release release;
            return sweep(sc, cal).points;
        },
        py::arg("config"), py::arg("calibration"), py::arg("ebn0_grid"), py::arg("noise_powers_dbm"),
        py::arg("bits_per_trial") = 2000, py::arg("trials") = 1, py::arg("seed") = 1, py::arg("threads") = 0);
}
