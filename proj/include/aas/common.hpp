#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace aas {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string &msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string &msg) : std::invalid_argument(msg) {}
};

struct LengthMismatch : std::invalid_argument {
    explicit LengthMismatch(const std::string &msg) : std::invalid_argument(msg) {}
};

struct InvalidTheta : std::invalid_argument {
    explicit InvalidTheta(const std::string &msg) : std::invalid_argument(msg) {}
};

// I/O errors carry file and (1-based) line where parsing stopped.
struct FormatError : std::runtime_error {
    FormatError(const std::string &file, long line, const std::string &msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg),
          file(file), line(line) {}
    std::string file;
    long line;
};

struct InconsistentN : std::runtime_error {
    explicit InconsistentN(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace aas
