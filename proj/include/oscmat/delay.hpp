#pragma once

// Characteristic equations of finite-dimensional delay equations
//   u'(t) = A u(t) + sum_j Psi_j u(t - r_j),   u = h on [-1, 0]
// and of Volterra integro-differential equations with kernel
//   C(s) = sum_i exp(-a_i s) C_i.

#include "oscmat/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace oscmat {

struct DelayTerm {
    MatrixXc psi;
    double r = 0.0;
};

struct DelaySystem {
    MatrixXc A;
    std::vector<DelayTerm> terms;

    void validate() const;
    int dim() const { return static_cast<int>(A.rows()); }
    /// A + sum Psi_j
    MatrixXc undelayed() const;
    /// A real with nonnegative off-diagonal entries, every Psi_j real and >= 0.
    bool positivity_regime() const;
};

struct ExpTerm {
    double a = 1.0;
    MatrixXc c;
};

struct ExpKernel {
    std::vector<ExpTerm> terms;

    void validate(int dim) const;
    double min_rate() const;
    /// C(s)
    MatrixXc value(double s) const;
};

/// det(lambda I - A - sum Psi_j exp(-lambda r_j))
Complex adde_char_det(const DelaySystem& sys, Complex lambda);

/// Largest real root of adde_char_det on [re_min, inf). Returns -inf if none.
/// Requires real A and Psi_j (NotApplicable otherwise); the result is the
/// spectral bound only in the positivity regime.
double adde_rightmost_real_root(const DelaySystem& sys, double re_min = -50.0);

/// Largest real part among eigenvalues of a square matrix.
double spectral_abscissa(const MatrixXc& m);

struct DelayIndependenceReport {
    struct Row {
        double r = 0.0;
        double root = 0.0;
        int sign = 0;
    };
    std::vector<Row> rows;
    double undelayed_abscissa = 0.0; ///< s(A + Psi)
    int undelayed_sign = 0;
    bool positivity_regime = false;
    bool independent = false; ///< every row sign equals undelayed_sign

    std::string to_json() const;
};

/// -1, 0 or +1 with |x| < 1e-12 counted as zero; -inf counts as negative.
int root_sign(double x);

DelayIndependenceReport delay_independence_report(const MatrixXc& A, const MatrixXc& psi,
                                                  const std::vector<double>& r_values, double re_min = -50.0);

struct DelayTrajectory {
    std::vector<double> times;
    std::vector<VectorXc> states;
    std::vector<double> norms;
};

using History = std::function<VectorXc(double)>;

/// Trapezoidal rule with delayed values read from the stored solution (or the
/// history for t <= 0). Each r_j must be an integer multiple of dt to 1e-12.
DelayTrajectory method_of_steps(const DelaySystem& sys, const History& history, double T, double dt);

/// det(lambda I - A - sum C_i / (lambda + a_i)); OutsideHalfplane if
/// Re lambda <= -min a_i.
Complex vide_char_det(const MatrixXc& A, const ExpKernel& kernel, Complex lambda);

/// All zeros of vide_char_det with Re lambda > -min a_i by a 1e-10 margin, from the eigenvalues
/// of the augmented state matrix [[A, C_1..C_p], [I, -a_1 I], ...] polished by
/// Newton on the determinant. Sorted by descending real part.
std::vector<Complex> vide_roots(const MatrixXc& A, const ExpKernel& kernel);

} // namespace oscmat
