#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gridev {

inline constexpr int kHoursPerDay = 24;

/// Input file could not be read or does not match the expected format.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A domain invariant is violated; the message names the offending entity.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Demand exceeds deliverable supply in some hour.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& msg, int hour, double shortfall_mw)
        : std::runtime_error(msg), hour(hour), shortfall_mw(shortfall_mw) {}
    int hour = -1;
    double shortfall_mw = 0.0;
};

/// Internal failure that should not occur on valid inputs.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest round-trippable decimal representation; keeps emitted CSV
// byte-stable across reruns.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("not a number in " + what + ": '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s, const std::string& what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("not an integer in " + what + ": '" + std::string(s) + "'");
    return v;
}

// Log verbosity from GRID_EV_COSIM_LOG: silent (default), info, debug.
inline int log_level() {
    static int level = [] {
        const char* v = std::getenv("GRID_EV_COSIM_LOG");
        if (!v) return 0;
        std::string s(v);
        if (s == "debug") return 2;
        if (s == "info") return 1;
        return 0;
    }();
    return level;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[gridev] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[gridev:debug] %s\n", msg.c_str());
}

} // namespace gridev
