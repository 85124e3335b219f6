#pragma once

#include <stdexcept>
#include <string>

namespace clev {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition violation (bad argument, out-of-domain value).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// An internal identity failed beyond numerical slack.
class InternalConsistencyError : public Error {
public:
    explicit InternalConsistencyError(const std::string& msg) : Error(msg) {}
};

// Requested pairwise correlation cannot be produced by any latent Gaussian pair.
class IncompatibleCorrelation : public Error {
public:
    IncompatibleCorrelation(const std::string& msg) : Error(msg) {}
};

// Latent correlation matrix fell below the PSD tolerance.
class NonPsdLatentCorrelation : public Error {
public:
    NonPsdLatentCorrelation(const std::string& msg, double min_eigenvalue)
        : Error(msg), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

// A pairwise cell probability collapsed to zero at the evaluation point.
class DegenerateCell : public Error {
public:
    explicit DegenerateCell(const std::string& msg) : Error(msg) {}
};

// Variability matrix too ill-conditioned to invert.
class SingularVariability : public Error {
public:
    explicit SingularVariability(const std::string& msg) : Error(msg) {}
};

// Adjustment factor came out nonpositive; information estimates unusable.
class InvalidInformation : public Error {
public:
    explicit InvalidInformation(const std::string& msg) : Error(msg) {}
};

// Requested value lies outside the profiled grid.
class OutOfProfiledRange : public Error {
public:
    explicit OutOfProfiledRange(const std::string& msg) : Error(msg) {}
};

// Malformed input file; carries 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = -1) : Error(msg), line(line) {}
    long line;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace clev
