#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irsmc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Invalid or inconsistent configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

/// Block diagonalization has no room for the requested streams.
class InfeasibleError : public std::runtime_error {
public:
  explicit InfeasibleError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace irsmc
