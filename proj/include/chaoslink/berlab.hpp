#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chaoslink/channel.hpp"
#include "chaoslink/link.hpp"

namespace chaoslink {

struct SweepConfig {
    std::vector<double> ebn0_grid;
    std::vector<double> noise_powers_dbm{10, 20, 30, 40};
    std::size_t bits_per_trial = 2000;
    std::size_t trials_per_point = 1;
    std::uint64_t master_seed = 1;
    LinkConfig link;
    ChannelMode mode = ChannelMode::awgn;
    // 0 selects std::thread::hardware_concurrency()
    unsigned threads = 0;

    SweepConfig();
    void validate() const;
};

struct BerPoint {
    double ebn0_db = 0.0;
    double noise_dbm = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    std::uint64_t invalid_trials = 0;
    BindingConstraint binding = BindingConstraint::none;

    friend bool operator==(const BerPoint&, const BerPoint&) = default;
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct BerReport {
    std::vector<BerPoint> points;
    ConfigEcho config;
    std::size_t settling_step = 0;
    bool settled = false;
    std::size_t delay_d = 0;
    double signal_power = 0.0;
};

struct TrialOutcome {
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    bool invalid = false;
};

TrialOutcome run_trial(const LinkConfig& link, const Calibration& cal, const ChannelConfig& ch,
                       const std::vector<int>& message);

double compute_ber(std::uint64_t errors, std::uint64_t bits);

std::uint64_t mix64(std::uint64_t x);
/// Seed of one trial, from the grid values (not their positions) and the trial index.
std::uint64_t trial_seed(std::uint64_t master, double ebn0_db, double noise_dbm, std::uint64_t trial);

BerReport sweep(const SweepConfig& cfg);
BerReport sweep(const SweepConfig& cfg, const Calibration& cal);

inline constexpr const char* kBerCsvHeader = "ebn0_db,noise_dbm,bits,errors,ber,invalid_trials,binding_constraint";

std::string format_double(double v);
std::string report_csv(const BerReport& r);
BerReport parse_report_csv(const std::string& text);
std::string report_svg(const BerReport& r);

/// Writes the CSV and, when svg_path is non-empty, the plot.
/// throws std::runtime_error with the path on I/O failure
void write_report(const BerReport& r, const std::string& csv_path, const std::string& svg_path = "");

}  // namespace chaoslink
