#pragma once

#include <stdexcept>
#include <string>

namespace mesonsim {

// Base class for all simulator errors. Subclasses carry the failure
// category; the message carries the specifics.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidCount : public Error {
public:
    using Error::Error;
};

class SpacingTooSmall : public Error {
public:
    using Error::Error;
};

class PBCUnsupportedForLadder : public Error {
public:
    using Error::Error;
};

class ScheduleNotScalarAtTime : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& msg, int iterations, double residual)
        : Error(msg), iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

class KrylovBreakdown : public Error {
public:
    KrylovBreakdown(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;
};

class GridOutsideSchedule : public Error {
public:
    using Error::Error;
};

class FrontNotDetected : public Error {
public:
    using Error::Error;
};

class MissingEigenvectors : public Error {
public:
    using Error::Error;
};

class RidgeNotFound : public Error {
public:
    using Error::Error;
};

class InsufficientRidge : public Error {
public:
    using Error::Error;
};

class NoPeaks : public Error {
public:
    using Error::Error;
};

class PeakNotFound : public Error {
public:
    using Error::Error;
};

class NoFeasibleAssignment : public Error {
public:
    using Error::Error;
};

class FewerPeaksThanRequested : public Error {
public:
    using Error::Error;
};

class DivergenceDetected : public Error {
public:
    using Error::Error;
};

class ResampleLimitExceeded : public Error {
public:
    using Error::Error;
};

class UnnormalizedState : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& field, const std::string& msg)
        : Error(field + ": " + msg), field(field) {}
    std::string field;
};

} // namespace mesonsim
