#ifndef XTRAP_TYPES_HPP
#define XTRAP_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace xtrap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Thrown when a lambda=0 solve hits a numerically singular system; callers
// are expected to regularize or shrink their window.
struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

// The sum-to-one normalization of a constrained solve is numerically unachievable.
struct DegenerateNormalization : std::runtime_error {
    explicit DegenerateNormalization(const std::string& what) : std::runtime_error(what) {}
};

// A window query referenced iterates that were already evicted (or never stored).
struct OutOfWindow : std::out_of_range {
    explicit OutOfWindow(const std::string& what) : std::out_of_range(what) {}
};

// Every grid-search candidate produced a non-finite residual.
struct AllCandidatesFailed : std::runtime_error {
    explicit AllCandidatesFailed(const std::string& what) : std::runtime_error(what) {}
};

// trace(I - A(lambda)) vanished for every grid point of a GCV selection.
struct DegenerateTrace : std::runtime_error {
    explicit DegenerateTrace(const std::string& what) : std::runtime_error(what) {}
};

struct NotStochastic : std::runtime_error {
    explicit NotStochastic(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

struct EmptyMatrix : std::runtime_error {
    explicit EmptyMatrix(const std::string& what) : std::runtime_error(what) {}
};

// A fixed-point problem could not be constructed (e.g. I - M singular).
struct SingularProblem : std::runtime_error {
    explicit SingularProblem(const std::string& what) : std::runtime_error(what) {}
};

struct LinearSolveFailed : std::runtime_error {
    explicit LinearSolveFailed(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config field '" + field + "': " + what), field_path(field) {}
    std::string field_path;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace xtrap

#endif
