#include "chaoslink/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chaoslink {

const std::vector<KeyInfo>& ConfigStore::keys() {
    static const std::vector<KeyInfo> k = {
        {"word_bits", "16", "fixed-point word length"},
        {"scale", "3107", "fixed-point scaling factor s_f"},
        {"system", "lorenz-scaled-1/5", "dynamics model"},
        {"h", "0.001", "Euler step size"},
        {"system_rate_hz", "450e6", "system sample rate"},
        {"k1", "6214", "controller gain k1 in raw counts"},
        {"k2", "3107", "controller gain k2 in raw counts"},
        {"k3", "9321", "controller gain k3 in raw counts"},
        {"gamma", "5,0.1,0.02", "adaptation rate per parameter"},
        {"theta_hat0", "0,0,0", "initial parameter estimates"},
        {"known_params", "", "comma list of parameter names treated as known"},
        {"tx_ic", "1032,-3107,0", "transmitter initial state, raw counts"},
        {"rx_ic", "0,-4660,1553", "receiver initial state, raw counts"},
        {"settle_tol", "10", "settling tolerance in raw counts"},
        {"delay_margin", "1.1", "delay D as a multiple of the settling time"},
        {"calibration_steps", "500000", "length of the settling calibration run"},
        {"power_window", "200000", "samples used to estimate signal power"},
        {"delay_d", "auto", "detector delay D in samples"},
        {"a_threshold", "0.5", "edge detector threshold, analog units"},
        {"refractory", "auto", "edge detector refractory samples (auto: half a bit period)"},
        {"window", "100", "edge detector averaging window"},
        {"initial_bit", "0", "decision before the first detected edge"},
        {"bit_amplitude", "1.0", "modulation amplitude of a one bit"},
        {"bit_rate_hz", "1e6", "information bit rate"},
        {"alpha", "0.01", "exponential smoothing coefficient"},
        {"gain", "auto", "waveform output gain (auto: fit on the first period)"},
        {"channel", "ideal", "channel mode: ideal or awgn"},
        {"ebn0_db", "20", "Eb/N0 in dB"},
        {"noise_power_dbm", "30", "noise power floor in dBm"},
        {"seed", "1", "master seed"},
        {"ebn0_grid", "0:35:1", "sweep Eb/N0 values, list or start:stop:step"},
        {"noise_powers_dbm", "10,20,30,40", "sweep noise power levels"},
        {"bits_per_trial", "2000", "bits per Monte Carlo trial"},
        {"trials_per_point", "1", "trials per grid cell"},
        {"threads", "0", "sweep worker threads (0: all cores)"},
        {"steps", "200000", "step or sample count for sync and bits"},
        {"component", "x", "state component for bits: x, y or z"},
        {"message", "", "explicit message bits for txbits"},
        {"message_bits", "2000", "length of the seeded random message"},
        {"sine_freq_hz", "50e3", "sine frequency"},
        {"sine_amplitude", "0.5", "sine amplitude"},
        {"sine_resolution_bits", "16", "sine amplitude resolution"},
        {"sine_rate_hz", "450e6", "sine sample rate"},
        {"wave_samples", "1000000", "waveform samples after D"},
    };
    return k;
}

ConfigStore::ConfigStore() {
    for (const KeyInfo& k : keys())
        values_[k.key] = k.default_value;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::string s = trim(v);
    double out = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+')
        ++first;
    auto res = std::from_chars(first, s.data() + s.size(), out);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    std::string s = trim(v);
    std::int64_t out = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    std::int64_t n = to_int(key, v);
    if (n < 0)
        throw ConfigError("key '" + key + "' must be >= 0");
    return static_cast<std::size_t>(n);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::string s = trim(v);
    std::uint64_t out = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': not an unsigned integer: '" + v + "'");
    return out;
}

std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::string s = trim(v);
    if (s.empty())
        return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const std::string& s : split(v, ','))
        out.push_back(to_double(key, s));
    return out;
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
    if (v.find(':') == std::string::npos)
        return to_doubles(key, v);
    auto parts = split(v, ':');
    if (parts.size() != 3)
        throw ConfigError("key '" + key + "': range must be start:stop:step");
    double a = to_double(key, parts[0]), b = to_double(key, parts[1]), st = to_double(key, parts[2]);
    if (!(st > 0))
        throw ConfigError("key '" + key + "': range step must be > 0");
    std::vector<double> out;
    const auto n = static_cast<std::int64_t>(std::floor((b - a) / st + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i)
        out.push_back(a + static_cast<double>(i) * st);
    return out;
}

FxpState to_state(const std::string& key, const std::string& v) {
    auto parts = split(v, ',');
    if (parts.size() != 3)
        throw ConfigError("key '" + key + "' needs three raw counts");
    FxpState s;
    for (std::size_t i = 0; i < 3; ++i)
        s[i] = FxpSample{static_cast<std::int32_t>(to_int(key, parts[i]))};
    return s;
}

}  // namespace

void ConfigStore::load_text(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void ConfigStore::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    load_text(ss.str(), path);
}

void ConfigStore::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown config key '" + key + "'");
    it->second = value;
}

const std::string& ConfigStore::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

RunConfig ConfigStore::resolve() const {
    RunConfig rc;
    auto v = [&](const char* k) -> const std::string& { return get(k); };
    LinkConfig& L = rc.link;

    L.fmt.word_bits = static_cast<int>(to_int("word_bits", v("word_bits")));
    L.fmt.scale = to_int("scale", v("scale"));
    if (v("system") == "lorenz-scaled-1/5" || v("system") == "lorenz")
        L.dynamics = default_system();
    else
        throw ConfigError("unknown dynamics system '" + v("system") + "'");
    L.integ.h = to_double("h", v("h"));
    L.integ.system_rate_hz = to_double("system_rate_hz", v("system_rate_hz"));
    L.gains.k1 = FxpSample{static_cast<std::int32_t>(to_int("k1", v("k1")))};
    L.gains.k2 = FxpSample{static_cast<std::int32_t>(to_int("k2", v("k2")))};
    L.gains.k3 = FxpSample{static_cast<std::int32_t>(to_int("k3", v("k3")))};
    L.adapt.gamma = to_doubles("gamma", v("gamma"));
    L.adapt.theta_hat0 = to_doubles("theta_hat0", v("theta_hat0"));
    L.dynamics.known.assign(L.dynamics.param_count(), false);
    for (const std::string& name : split(v("known_params"), ',')) {
        bool found = false;
        for (std::size_t j = 0; j < L.dynamics.param_names.size(); ++j)
            if (L.dynamics.param_names[j] == name) {
                L.dynamics.known[j] = true;
                found = true;
            }
        if (!found)
            throw ConfigError("known_params: unknown parameter '" + name + "'");
    }
    L.tx_ic = to_state("tx_ic", v("tx_ic"));
    L.rx_ic = to_state("rx_ic", v("rx_ic"));
    L.settle_tol = static_cast<std::int32_t>(to_int("settle_tol", v("settle_tol")));
    L.delay_margin = to_double("delay_margin", v("delay_margin"));
    L.calibration_steps = to_count("calibration_steps", v("calibration_steps"));
    L.power_window = to_count("power_window", v("power_window"));
    L.bit_amplitude = to_double("bit_amplitude", v("bit_amplitude"));
    L.bit_rate_hz = to_double("bit_rate_hz", v("bit_rate_hz"));
    L.detector.delay_d = v("delay_d") == "auto" ? 0 : to_count("delay_d", v("delay_d"));
    L.detector.a_threshold = to_double("a_threshold", v("a_threshold"));
    L.detector.window = to_count("window", v("window"));
    L.detector.initial_bit = static_cast<int>(to_int("initial_bit", v("initial_bit")));
    if (!(L.bit_rate_hz > 0))
        throw ConfigError("bit_rate_hz must be > 0");
    L.detector.refractory =
        v("refractory") == "auto" ? std::max<std::size_t>(1, L.bit_period() / 2) : to_count("refractory", v("refractory"));
    L.smoother.alpha = to_double("alpha", v("alpha"));
    L.smoother.fit_gain = v("gain") == "auto";
    L.smoother.gain = L.smoother.fit_gain ? 1.0 : to_double("gain", v("gain"));

    rc.seed = to_u64("seed", v("seed"));
    rc.channel.mode = parse_channel_mode(v("channel"));
    rc.channel.ebn0_db = to_double("ebn0_db", v("ebn0_db"));
    rc.channel.noise_power_dbm = to_double("noise_power_dbm", v("noise_power_dbm"));
    rc.channel.bit_rate_hz = L.bit_rate_hz;
    rc.channel.system_rate_hz = L.integ.system_rate_hz;
    rc.channel.seed = rc.seed;

    rc.sweep.ebn0_grid = to_grid("ebn0_grid", v("ebn0_grid"));
    rc.sweep.noise_powers_dbm = to_doubles("noise_powers_dbm", v("noise_powers_dbm"));
    rc.sweep.bits_per_trial = to_count("bits_per_trial", v("bits_per_trial"));
    rc.sweep.trials_per_point = to_count("trials_per_point", v("trials_per_point"));
    rc.sweep.threads = static_cast<unsigned>(to_count("threads", v("threads")));
    rc.sweep.master_seed = rc.seed;
    // a sweep over a channel configured as ideal still adds noise
    rc.sweep.mode = ChannelMode::awgn;

    rc.steps = to_count("steps", v("steps"));
    const std::string& comp = v("component");
    if (comp == "x")
        rc.component = 0;
    else if (comp == "y")
        rc.component = 1;
    else if (comp == "z")
        rc.component = 2;
    else
        throw ConfigError("component must be x, y or z");
    for (char c : v("message")) {
        if (c == '0' || c == '1')
            rc.message.push_back(c - '0');
        else
            throw ConfigError("message may contain only '0' and '1'");
    }
    rc.message_bits = to_count("message_bits", v("message_bits"));
    rc.sine_freq_hz = to_double("sine_freq_hz", v("sine_freq_hz"));
    rc.sine_amplitude = to_double("sine_amplitude", v("sine_amplitude"));
    rc.sine_resolution_bits = static_cast<int>(to_int("sine_resolution_bits", v("sine_resolution_bits")));
    rc.sine_rate_hz = to_double("sine_rate_hz", v("sine_rate_hz"));
    rc.wave_samples = to_count("wave_samples", v("wave_samples"));

    try {
        L.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    rc.sweep.link = L;
    rc.echo = echo();
    return rc;
}

ConfigEcho ConfigStore::echo() const {
    ConfigEcho e;
    e.emplace_back("version", kVersion);
    for (const KeyInfo& k : keys())
        e.emplace_back(k.key, values_.at(k.key));
    return e;
}

std::string echo_block(const ConfigEcho& echo, const std::string& prefix) {
    std::string out;
    for (const auto& [k, v] : echo)
        out += prefix + k + " = " + v + "\n";
    return out;
}

}  // namespace chaoslink
