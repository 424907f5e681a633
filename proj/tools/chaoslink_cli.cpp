#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chaoslink/berlab.hpp"
#include "chaoslink/config.hpp"
#include "chaoslink/link.hpp"

using namespace chaoslink;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kIo = 3 };

struct Common {
    std::string config;
    std::string seed;
    std::string steps;
    std::string out;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;  // key -> value from dedicated flags
};

RunConfig build_config(const Common& c) {
    ConfigStore store;
    if (!c.config.empty())
        store.load_file(c.config);
    for (const std::string& kv : c.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        store.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [k, v] : c.flags)
        store.set(k, v);
    if (!c.seed.empty())
        store.set("seed", c.seed);
    if (!c.steps.empty())
        store.set("steps", c.steps);
    return store.resolve();
}

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw IoError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    // summary lines go to stdout unless stdout carries the data
    std::ostream& log() { return path_.empty() ? std::cerr : std::cout; }
    void close() {
        if (!path_.empty()) {
            file_.close();
            if (!file_)
                throw IoError("write failed for '" + path_ + "'");
        } else {
            std::cout.flush();
        }
    }

private:
    std::string path_;
    std::ofstream file_;
};

int cmd_sync(const RunConfig& rc, const std::string& out_path) {
    std::uint64_t sat = 0;
    std::vector<FxpState> trace = run_sync(rc.link, rc.steps, &sat);
    std::optional<std::size_t> settle;
    if (!trace.empty())
        settle = settling_time(trace, rc.link.settle_tol);
    Output out(out_path);
    std::ostream& os = out.stream();
    os << echo_block(rc.echo);
    os << "# settling_step = " << (trace.empty() ? "n/a" : settle ? std::to_string(*settle) : "unsettled") << '\n';
    os << "step,e1,e2,e3\n";
    for (std::size_t k = 0; k < trace.size(); ++k)
        os << k << ',' << trace[k][0].raw << ',' << trace[k][1].raw << ',' << trace[k][2].raw << '\n';
    out.close();
    if (trace.empty()) {
        out.log() << "steps=0\n";
        return kOk;
    }
    if (!settle) {
        out.log() << "unsettled: error did not stay within +-" << rc.link.settle_tol << " counts\n";
        return kInvalid;
    }
    out.log() << "settling_step=" << *settle << " saturation_events=" << sat << '\n';
    return kOk;
}

int cmd_bits(const RunConfig& rc, const std::string& out_path) {
    Output out(out_path);
    std::ostream& os = out.stream();
    os << echo_block(rc.echo);
    if (rc.steps > 0) {
        FxpTrajectory tr = simulate(rc.link.tx_ic, rc.link.dynamics, rc.link.integ, rc.link.fmt, rc.steps - 1);
        for (const FxpState& s : tr.states)
            os << to_bitword(s[static_cast<std::size_t>(rc.component)], rc.link.fmt).text() << '\n';
        out.close();
        out.log() << "words=" << tr.states.size() << " saturation_events=" << tr.saturation_events << '\n';
    } else {
        out.close();
        out.log() << "words=0\n";
    }
    return kOk;
}

int cmd_txbits(const RunConfig& rc, const std::string& out_path) {
    std::vector<int> msg = rc.message;
    if (msg.empty()) {
        if (rc.message_bits == 0) {
            std::cerr << "error: empty message\n";
            return kUsage;
        }
        msg = random_bits(rc.message_bits,
                          mix64(trial_seed(rc.seed, rc.channel.ebn0_db, rc.channel.noise_power_dbm, 0) ^ 1));
    }
    ChannelConfig ch = rc.channel;
    ch.seed = mix64(trial_seed(rc.seed, ch.ebn0_db, ch.noise_power_dbm, 0) ^ 2);
    const Calibration cal = calibrate(rc.link);
    const BitTrialResult r = run_bits(rc.link, cal, ch, msg);

    std::ostringstream summary;
    summary << "errors=" << r.errors << " bits=" << r.bits << " ber=" << format_double(compute_ber(r.errors, r.bits))
            << " pulses=" << r.pulses << " transitions=" << r.transitions << " sigma=" << format_double(r.sigma)
            << " binding=" << to_string(r.binding)
            << " settling_step=" << (cal.settled() ? std::to_string(*cal.settling_step) : "unsettled")
            << " delay_d=" << cal.delay_d << '\n';
    if (!out_path.empty()) {
        Output out(out_path);
        std::ostream& os = out.stream();
        os << echo_block(rc.echo);
        os << "# " << summary.str();
        for (int b : r.recovered)
            os << (b ? '1' : '0');
        os << '\n';
        out.close();
    }
    std::cout << summary.str();
    return r.invalid ? kInvalid : kOk;
}

int cmd_txwave(const RunConfig& rc, const std::string& out_path) {
    const InfoSignal sine = make_sine(rc.sine_freq_hz, rc.sine_amplitude, rc.sine_resolution_bits, rc.sine_rate_hz,
                                      rc.link.integ.system_rate_hz, rc.wave_samples);
    const Calibration cal = calibrate(rc.link);
    const WaveResult w = run_wave(rc.link, cal, sine, rc.sine_freq_hz, rc.wave_samples);
    std::ostringstream summary;
    summary << "rms_error=" << format_double(w.rms_error) << " correlation=" << format_double(w.correlation)
            << " gain=" << format_double(w.gain) << " amplitude_ratio=" << format_double(w.amplitude_ratio)
            << " training=" << w.training << " delay_d=" << cal.delay_d << '\n';
    Output out(out_path);
    std::ostream& os = out.stream();
    os << echo_block(rc.echo);
    os << "# " << summary.str();
    os << "step,recovered,original\n";
    for (std::size_t i = 0; i < w.recovered.size(); ++i)
        os << i << ',' << format_double(w.recovered[i]) << ',' << format_double(w.original[i]) << '\n';
    out.close();
    out.log() << summary.str();
    return cal.settled() ? kOk : kInvalid;
}

int cmd_bersweep(const RunConfig& rc, const std::string& out_path, const std::string& plot_path) {
    const std::string csv = out_path.empty() ? "ber.csv" : out_path;
    std::string svg = plot_path;
    if (svg.empty()) {
        auto dot = csv.rfind('.');
        svg = (dot == std::string::npos ? csv : csv.substr(0, dot)) + ".svg";
    }
    BerReport rep = sweep(rc.sweep);
    rep.config = rc.echo;
    try {
        write_report(rep, csv);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    if (svg != "none") {
        std::ofstream f(svg, std::ios::binary);
        if (f)
            f << report_svg(rep);
        else
            std::cerr << "warning: could not write plot '" << svg << "'\n";
    }
    std::uint64_t invalid = 0;
    for (const BerPoint& p : rep.points)
        invalid += p.invalid_trials;
    std::cout << "points=" << rep.points.size() << " invalid_trials=" << invalid << " settling_step="
              << (rep.settled ? std::to_string(rep.settling_step) : "unsettled") << " delay_d=" << rep.delay_d
              << " signal_power=" << format_double(rep.signal_power) << " csv=" << csv << '\n';
    return rep.settled ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed-point chaotic masking link simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common c;
    std::string plot;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", c.config, "key = value configuration file");
        sub->add_option("--seed", c.seed, "master seed (u64)");
        sub->add_option("--steps", c.steps, "step or sample count");
        sub->add_option("--out", c.out, "output file (default: stdout)");
        sub->add_option("--set", c.sets, "override any config key: key=value")->take_all();
    };
    auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            name, [&c, key](const std::string& v) { c.flags[key] = v; }, help);
    };

    CLI::App* sync = app.add_subcommand("sync", "unmodulated synchronization error trace");
    add_common(sync);
    CLI::App* bits = app.add_subcommand("bits", "bit words of a transmitter state component");
    add_common(bits);
    flag(bits, "--component", "component", "x, y or z");
    CLI::App* txbits = app.add_subcommand("txbits", "single end-to-end bit transmission");
    add_common(txbits);
    flag(txbits, "--message", "message", "message bits, e.g. 0110");
    flag(txbits, "--message-bits", "message_bits", "length of a seeded random message");
    flag(txbits, "--channel", "channel", "ideal or awgn");
    flag(txbits, "--ebn0", "ebn0_db", "Eb/N0 in dB");
    flag(txbits, "--noise-dbm", "noise_power_dbm", "noise floor in dBm");
    CLI::App* txwave = app.add_subcommand("txwave", "sine transmission and recovery");
    add_common(txwave);
    flag(txwave, "--freq", "sine_freq_hz", "sine frequency in Hz");
    flag(txwave, "--rate", "sine_rate_hz", "sine sample rate in Hz");
    flag(txwave, "--resolution", "sine_resolution_bits", "sine resolution in bits");
    flag(txwave, "--amplitude", "sine_amplitude", "sine amplitude");
    flag(txwave, "--samples", "wave_samples", "samples after the delay D");
    CLI::App* bersweep = app.add_subcommand("bersweep", "Monte Carlo BER sweep");
    add_common(bersweep);
    bersweep->add_option("--plot", plot, "SVG plot path ('none' to skip)");
    flag(bersweep, "--threads", "threads", "worker threads");
    flag(bersweep, "--bits", "bits_per_trial", "bits per trial");
    flag(bersweep, "--trials", "trials_per_point", "trials per grid cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        RunConfig rc = build_config(c);
        if (sync->parsed())
            return cmd_sync(rc, c.out);
        if (bits->parsed())
            return cmd_bits(rc, c.out);
        if (txbits->parsed())
            return cmd_txbits(rc, c.out);
        if (txwave->parsed())
            return cmd_txwave(rc, c.out);
        if (bersweep->parsed())
            return cmd_bersweep(rc, c.out, plot);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kUsage;
}
