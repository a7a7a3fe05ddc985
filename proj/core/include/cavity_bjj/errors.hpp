#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavity_bjj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (|z| > 1, negative xi, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A vector field or closed form is singular at the requested point.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double z, double theta)
        : Error(what), z_(z), theta_(theta) {}

    double z() const noexcept { return z_; }
    double theta() const noexcept { return theta_; }

private:
    double z_;
    double theta_;
};

/// Adaptive integration could not proceed (step underflow, step budget exhausted).
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time)
        : Error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A discretisation is too coarse for the requested quantity.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// The photon Fock cutoff truncates too much probability.
class CutoffError : public Error {
public:
    using Error::Error;
};

/// Configuration could not be parsed or validated. Carries every problem found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += '\n';
            out += item;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

} // namespace cavity_bjj
