#pragma once

/**
 * @file analytic.hpp
 * @brief Closed-form Dirichlet and feedback operators of the 1-D
 *        diffusion-transport system with dynamical boundary conditions.
 *
 * For lambda outside the Dirichlet spectrum the boundary value problem
 *
 *   u'' + k u' - lambda u = 0,   u(0) = x0,  u(1) = x1
 *
 * has the solution u = c1 exp(mu1 x) + c2 exp(mu2 x) where mu1, mu2 are the
 * roots of mu^2 + k mu - lambda. The feedback matrix maps (x0, x1) to
 * (u'(0), -u'(1)). Adding diag(alpha, beta) gives the 2x2 pencil whose
 * eigenvalue problem lambda = eig(pencil(lambda)) is the characteristic
 * equation of the full operator matrix.
 */

#include "oscmat/core.hpp"

namespace oscmat {

/// Roots of mu^2 + k mu - lambda = 0 (principal square root for mu1).
struct CharRoots {
    Complex mu1;
    Complex mu2;
    bool degenerate = false;
};

struct FeedbackMatrix {
    Matrix2c entries;
    Complex lambda;
    double k = 0.0;
};

/// |k^2 + 4 lambda| below this (relative to max(1, |lambda|, k^2)) selects
/// the confluent formulas.
inline constexpr double kCoalescenceTol = 1e-10;

/// lambda within this relative distance of -pi^2 n^2 - k^2/4 is treated as a
/// Dirichlet eigenvalue.
inline constexpr double kSpectrumHitTol = 1e-12;

CharRoots char_roots(Complex lambda, double k);

bool is_confluent(Complex lambda, double k);

/// Throws SpectrumHit when lambda coincides with a Dirichlet eigenvalue.
void check_dirichlet_resolvent(Complex lambda, double k);

/// Solution of the Dirichlet problem evaluated at x in [0,1].
Complex dirichlet_apply(const SystemParams& params, Complex lambda, Complex x0, Complex x1, double x);

/// Feedback matrix from explicitly supplied roots (no branch normalization),
/// evaluated with exp(mu1) factored out of numerator and denominator.
Matrix2c feedback_from_roots(Complex mu1, Complex mu2);

/// Confluent feedback matrix at lambda = -k^2/4.
Matrix2c feedback_confluent(double k);

FeedbackMatrix feedback_matrix(const SystemParams& params, Complex lambda);

/// diag(alpha, beta) + feedback_matrix(params, lambda).
Matrix2c pencil(const SystemParams& params, Complex lambda);

/// det(lambda I - pencil(lambda)). At lambda = -k^2/4 this equals
/// confluent_quartic(params) / 16.
Complex char_det(const SystemParams& params, Complex lambda);

/// k^4 + 4k^2(alpha+beta-3) + 8k(alpha-beta) + 16(alpha beta - alpha - beta);
/// vanishes iff -k^2/4 is a spectral value.
Complex confluent_quartic(const SystemParams& params);

/// Value and lambda-derivative of the entire characteristic function
///
///   G(lambda) = [(lambda-alpha+k/2)(lambda-beta-k/2) + s^2] sinh(s)/s
///               + (2 lambda - alpha - beta) cosh(s),   s^2 = lambda + k^2/4,
///
/// which equals char_det(lambda) * sinh(s)/s. Both value and derivative are
/// multiplied by the same positive factor exp(-|Re s|) to avoid overflow;
/// `scale_log` holds that exponent so value * exp(scale_log) is unscaled.
struct EntireCharValue {
    Complex value;
    Complex derivative;
    double scale_log = 0.0;
};

EntireCharValue entire_char(const SystemParams& params, Complex lambda);

} // namespace oscmat
