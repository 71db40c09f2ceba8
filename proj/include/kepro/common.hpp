#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace kepro {

using Rational = boost::multiprecision::cpp_rational;

// Error taxonomy shared by the library and the CLI. The CLI maps each kind to
// a distinct process exit code so batch drivers can tell failures apart.
enum class ErrorKind {
    Usage,       // bad flags / missing arguments
    Parse,       // malformed input stream
    Validation,  // well-formed but semantically invalid input
    SizeGuard,   // an exhaustive oracle refused an instance above its guard
    TimeLimit,   // a solve hit its deadline
    Internal,    // broken invariant inside the library
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return 2;
        case ErrorKind::Parse: return 3;
        case ErrorKind::Validation: return 3;
        case ErrorKind::SizeGuard: return 4;
        case ErrorKind::TimeLimit: return 5;
        case ErrorKind::Internal: return 1;
    }
    return 1;
}

// Deterministic RNG wrapper. std::uniform_int_distribution is not portable
// across standard libraries, so bounded draws are done by rejection sampling
// on the raw 64-bit stream; identical seeds give identical draws everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    double unit_real() {  // uniform in [0,1) with 53-bit resolution
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

// Deadline used by every iterative solver. An unset deadline never expires.
class Deadline {
public:
    Deadline() = default;
    explicit Deadline(double seconds)
        : armed_(seconds >= 0.0),
          when_(std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(seconds < 0.0 ? 0.0 : seconds))) {}

    static Deadline unlimited() { return Deadline(); }

    bool expired() const {
        return armed_ && std::chrono::steady_clock::now() >= when_;
    }

private:
    bool armed_ = false;
    std::chrono::steady_clock::time_point when_{};
};

}  // namespace kepro
