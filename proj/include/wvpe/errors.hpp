#pragma once

#include <stdexcept>
#include <string>

namespace wvpe {

// Error taxonomy. The CLI maps each family onto a stable exit code:
// config -> 2, physics -> 3, calibration -> 4, estimation range -> 5.
enum class ErrorKind {
    config,
    physics,
    calibration,
    estimation_range,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidConfiguration : Error {
    explicit InvalidConfiguration(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct IncompatibleGrids : Error {
    explicit IncompatibleGrids(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DegenerateSpectrum : Error {
    explicit DegenerateSpectrum(const std::string& what) : Error(ErrorKind::physics, what) {}
};

// Pre- and post-selected states exactly orthogonal: zero post-selection probability.
struct OrthogonalPostselection : Error {
    explicit OrthogonalPostselection(const std::string& what) : Error(ErrorKind::physics, what) {}
};

struct NoPhotons : Error {
    explicit NoPhotons(const std::string& what) : Error(ErrorKind::physics, what) {}
};

struct CalibrationDomainError : Error {
    explicit CalibrationDomainError(const std::string& what) : Error(ErrorKind::calibration, what) {}
};

// Zero slope of the calibration at the requested point.
struct InfinitePrecision : Error {
    explicit InfinitePrecision(const std::string& what) : Error(ErrorKind::calibration, what) {}
};

struct ExtrapolationRefused : Error {
    ExtrapolationRefused(const std::string& what, double lo, double hi)
        : Error(ErrorKind::estimation_range, what), lo(lo), hi(hi) {}
    double lo;
    double hi;
};

}  // namespace wvpe
