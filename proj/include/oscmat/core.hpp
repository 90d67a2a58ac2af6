#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace oscmat {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using VectorXr = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every numerical or validation failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (maps to CLI exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// lambda lies on the Dirichlet spectrum, so the boundary value problem
/// u'' + k u' = lambda u, u(0)=x0, u(1)=x1 has no unique solution.
class SpectrumHit : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class WindowTooSmall : public Error {
public:
    using Error::Error;
};

class NearSingular : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class NotInvertible : public Error {
public:
    using Error::Error;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class MisalignedDelay : public Error {
public:
    using Error::Error;
};

class OutsideHalfplane : public Error {
public:
    using Error::Error;
};

/// Coefficients of the diffusion-transport system with dynamical boundary
/// conditions:
///   u_t = u'' + k u'          on (0,1)
///   u_t(0) =  u'(0) + alpha u(0)
///   u_t(1) = -u'(1) + beta  u(1)
struct SystemParams {
    Complex alpha{0.0, 0.0};
    Complex beta{0.0, 0.0};
    double k = 0.0;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;

    bool has_real_coefficients() const { return alpha.imag() == 0.0 && beta.imag() == 0.0; }
};

inline void SystemParams::validate() const
{
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(alpha) || !finite(beta) || !std::isfinite(k)) {
        throw ValidationError("SystemParams: coefficients must be finite");
    }
    if (k < 0.0) {
        throw ValidationError("SystemParams: transport coefficient k must satisfy k >= 0");
    }
}

} // namespace oscmat
