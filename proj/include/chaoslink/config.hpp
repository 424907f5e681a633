#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaoslink/berlab.hpp"
#include "chaoslink/channel.hpp"
#include "chaoslink/link.hpp"

namespace chaoslink {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KeyInfo {
    const char* key;
    const char* default_value;
    const char* help;
};

/// Fully resolved, typed configuration of one run.
struct RunConfig {
    LinkConfig link;
    ChannelConfig channel;
    SweepConfig sweep;
    std::uint64_t seed = 1;
    std::size_t steps = 200000;
    int component = 0;
    std::vector<int> message;  // empty: use message_bits seeded bits
    std::size_t message_bits = 2000;
    double sine_freq_hz = 50e3;
    double sine_amplitude = 0.5;
    int sine_resolution_bits = 16;
    double sine_rate_hz = 450e6;
    std::size_t wave_samples = 1000000;
    ConfigEcho echo;
};

/// Key-value configuration: defaults, then a file, then explicit overrides.
class ConfigStore {
public:
    ConfigStore();

    static const std::vector<KeyInfo>& keys();

    /// Lines of the form "key = value"; '#' starts a comment.
    void load_text(const std::string& text, const std::string& origin = "<text>");
    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;

    RunConfig resolve() const;
    ConfigEcho echo() const;

private:
    std::map<std::string, std::string> values_;
};

std::string echo_block(const ConfigEcho& echo, const std::string& prefix = "# ");

}  // namespace chaoslink
