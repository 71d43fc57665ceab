#pragma once

#include <stdexcept>
#include <string>

namespace beamtrack {

// Input data admits no valid answer (constant image fed to otsu, empty series).
struct DegenerateInput : std::runtime_error {
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

// Clamp pads could not be found in a frame.
struct LocateFailure : std::runtime_error {
    explicit LocateFailure(const std::string& what) : std::runtime_error(what) {}
};

// Curve fit could not be performed (too few points, singular system).
struct FitFailure : std::runtime_error {
    explicit FitFailure(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration value; reported before any frame is processed.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File system / decode problems.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace beamtrack
