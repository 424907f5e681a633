#include "chaoslink/berlab.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chaoslink {

SweepConfig::SweepConfig() {
    for (int i = 0; i <= 35; ++i)
        ebn0_grid.push_back(i);
}

void SweepConfig::validate() const {
    link.validate();
    if (bits_per_trial < 100)
        throw std::invalid_argument("bits_per_trial must be >= 100");
    if (trials_per_point < 1)
        throw std::invalid_argument("trials_per_point must be >= 1");
}

TrialOutcome run_trial(const LinkConfig& link, const Calibration& cal, const ChannelConfig& ch,
                       const std::vector<int>& message) {
    BitTrialResult r = run_bits(link, cal, ch, message);
    return {r.errors, r.bits, r.invalid};
}

double compute_ber(std::uint64_t errors, std::uint64_t bits) {
    if (bits == 0)
        throw std::invalid_argument("compute_ber: bits must be > 0");
    return static_cast<double>(errors) / static_cast<double>(bits);
}

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, double ebn0_db, double noise_dbm, std::uint64_t trial) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ std::bit_cast<std::uint64_t>(ebn0_db + 0.0));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(noise_dbm + 0.0));
    return mix64(h ^ trial);
}

namespace {

BerPoint run_cell(const SweepConfig& cfg, const Calibration& cal, double ebn0, double noise) {
    BerPoint pt;
    pt.ebn0_db = ebn0;
    pt.noise_dbm = noise;
    for (std::size_t t = 0; t < cfg.trials_per_point; ++t) {
        const std::uint64_t seed = trial_seed(cfg.master_seed, ebn0, noise, t);
        ChannelConfig ch;
        ch.ebn0_db = ebn0;
        ch.noise_power_dbm = noise;
        ch.bit_rate_hz = cfg.link.bit_rate_hz;
        ch.system_rate_hz = cfg.link.integ.system_rate_hz;
        ch.seed = mix64(seed ^ 2);
        ch.mode = cfg.mode;
        const std::vector<int> msg = random_bits(cfg.bits_per_trial, mix64(seed ^ 1));
        BitTrialResult r = run_bits(cfg.link, cal, ch, msg);
        pt.bits += r.bits;
        pt.errors += r.errors;
        pt.invalid_trials += r.invalid ? 1 : 0;
        pt.binding = r.binding;
    }
    pt.ber = compute_ber(pt.errors, pt.bits);
    return pt;
}

}  // namespace

BerReport sweep(const SweepConfig& cfg) {
    cfg.validate();
    return sweep(cfg, calibrate(cfg.link));
}

BerReport sweep(const SweepConfig& cfg, const Calibration& cal) {
    cfg.validate();
    std::vector<std::pair<double, double>> cells;
    for (double n : cfg.noise_powers_dbm)
        for (double e : cfg.ebn0_grid)
            cells.emplace_back(n, e);

    BerReport rep;
    rep.settled = cal.settled();
    rep.settling_step = cal.settling_step.value_or(0);
    rep.delay_d = cal.delay_d;
    rep.signal_power = cal.signal_power;
    rep.points.resize(cells.size());

    unsigned nthreads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, std::max<std::size_t>(cells.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            rep.points[i] = run_cell(cfg, cal, cells[i].second, cells[i].first);
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
    }
    std::stable_sort(rep.points.begin(), rep.points.end(), [](const BerPoint& a, const BerPoint& b) {
        return a.noise_dbm != b.noise_dbm ? a.noise_dbm < b.noise_dbm : a.ebn0_db < b.ebn0_db;
    });
    return rep;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s[0] == '+')
        ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not an unsigned integer: '" + s + "'");
    return v;
}

}  // namespace

std::string report_csv(const BerReport& r) {
    std::ostringstream os;
    for (const auto& [k, v] : r.config)
        os << "# " << k << " = " << v << '\n';
    os << "# settled = " << (r.settled ? "true" : "false") << '\n';
    os << "# settling_step = " << r.settling_step << '\n';
    os << "# delay_d = " << r.delay_d << '\n';
    os << "# signal_power = " << format_double(r.signal_power) << '\n';
    os << kBerCsvHeader << '\n';
    for (const BerPoint& p : r.points)
        os << format_double(p.ebn0_db) << ',' << format_double(p.noise_dbm) << ',' << p.bits << ',' << p.errors
           << ',' << format_double(p.ber) << ',' << p.invalid_trials << ',' << to_string(p.binding) << '\n';
    return os.str();
}

BerReport parse_report_csv(const std::string& text) {
    BerReport r;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            auto eq = line.find(" = ");
            if (eq == std::string::npos || line.size() < 2)
                continue;
            std::string key = line.substr(2, eq - 2), val = line.substr(eq + 3);
            if (key == "settled")
                r.settled = val == "true";
            else if (key == "settling_step")
                r.settling_step = parse_u64(val);
            else if (key == "delay_d")
                r.delay_d = parse_u64(val);
            else if (key == "signal_power")
                r.signal_power = parse_double(val);
            else
                r.config.emplace_back(key, val);
            continue;
        }
        if (!header) {
            if (line != kBerCsvHeader)
                throw std::invalid_argument("unexpected CSV header: " + line);
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 7)
            throw std::invalid_argument("malformed CSV row: " + line);
        BerPoint p;
        p.ebn0_db = parse_double(f[0]);
        p.noise_dbm = parse_double(f[1]);
        p.bits = parse_u64(f[2]);
        p.errors = parse_u64(f[3]);
        p.ber = parse_double(f[4]);
        p.invalid_trials = parse_u64(f[5]);
        p.binding = parse_binding(f[6]);
        r.points.push_back(p);
    }
    if (!header)
        throw std::invalid_argument("CSV header missing");
    return r;
}

std::string report_svg(const BerReport& r) {
    const double W = 640, H = 420, L = 70, R = 150, T = 30, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    const double ymin = -4.0, ymax = 0.0;  // log10 BER
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    for (const BerPoint& p : r.points)
        if (std::isfinite(p.ebn0_db)) {
            xmin = std::min(xmin, p.ebn0_db);
            xmax = std::max(xmax, p.ebn0_db);
        }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
    }
    if (xmax == xmin)
        xmax = xmin + 1;
    auto X = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double ber) {
        double l = ber > 0 ? std::max(std::log10(ber), ymin) : ymin;
        return T + (ymax - l) / (ymax - ymin) * ph;
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = 0; d <= 4; ++d) {
        double y = T + d / 4.0 * ph;
        os << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" font-size=\"11\" text-anchor=\"end\">1e-" << d
           << "</text>\n";
    }
    os << "<text x=\"" << L << "\" y=\"" << H - 20 << "\" font-size=\"11\">" << format_double(xmin) << "</text>\n";
    os << "<text x=\"" << L + pw << "\" y=\"" << H - 20 << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_double(xmax) << "</text>\n";
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 8
       << "\" font-size=\"12\" text-anchor=\"middle\">Eb/N0 (dB)</text>\n";
    os << "<text x=\"14\" y=\"" << T + ph / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << T + ph / 2
       << ")\" text-anchor=\"middle\">BER (0 drawn at 1e-4)</text>\n";
    std::vector<double> levels;
    for (const BerPoint& p : r.points)
        if (std::find(levels.begin(), levels.end(), p.noise_dbm) == levels.end())
            levels.push_back(p.noise_dbm);
    for (std::size_t c = 0; c < levels.size(); ++c) {
        const char* col = colors[c % 6];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (const BerPoint& p : r.points)
            if (p.noise_dbm == levels[c] && std::isfinite(p.ebn0_db))
                os << X(p.ebn0_db) << ',' << Y(p.ber) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << L + pw + 10 << "\" y=\"" << T + 16 + 16 * static_cast<double>(c)
           << "\" font-size=\"12\" fill=\"" << col << "\">" << format_double(levels[c]) << " dBm</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_report(const BerReport& r, const std::string& csv_path, const std::string& svg_path) {
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open '" + csv_path + "' for writing");
        f << report_csv(r);
        if (!f)
            throw std::runtime_error("write failed for '" + csv_path + "'");
    }
    if (!svg_path.empty()) {
        std::ofstream f(svg_path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open '" + svg_path + "' for writing");
        f << report_svg(r);
    }
}

}  // namespace chaoslink
