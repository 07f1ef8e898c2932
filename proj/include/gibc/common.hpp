#ifndef GIBC_COMMON_HPP
#define GIBC_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gibc {

using cplx = std::complex<double>;

// Dense complex matrices are row-major; vectors are plain Eigen column vectors.
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline constexpr const char* kVersion = "1.0.0";

/// Base class of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (radius, sample count, point outside the disk).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A closed-form denominator vanished for the given parameters.
class SingularParameterError : public Error {
public:
    using Error::Error;
};

/// sigma_n = -1 for some mode; the series solution does not exist.
class ResonanceError : public Error {
public:
    using Error::Error;
};

/// The finite-difference oracle could not produce a solution.
class OracleFailure : public Error {
public:
    using Error::Error;
};

/// A linear system is rank deficient or too ill-conditioned to trust.
class IllPosedError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or configuration.
class FormatError : public Error {
public:
    using Error::Error;
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Equispaced left-endpoint angle theta_j = 2*pi*j/M.
inline double grid_angle(int j, int m) { return kTwoPi * static_cast<double>(j) / static_cast<double>(m); }

}  // namespace gibc

#endif  // GIBC_COMMON_HPP
