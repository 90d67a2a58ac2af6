#pragma once

/**
 * @file discrete.hpp
 * @brief Finite-difference realization of the operator matrix on C^2 x L^2(0,1).
 *
 * Unknowns are nodal values u_0..u_{N+1} on x_i = i h, h = 1/(N+1). Nodes 0
 * and N+1 carry the boundary component of the product state (the domain
 * constraint P u = v is built in). The discrete generator is A_h = W^{-1} K:
 *
 *   interior:  h u_i'   = (u_{i+1} - 2u_i + u_{i-1})/h + k (u_{i+1} - u_{i-1})/2
 *   x = 0:     w u_0'   = (1 + hk/2)(u_1 - u_0)/h + alpha u_0
 *   x = 1:     w u_N+1' = -(1 - hk/2)(u_N+1 - u_N)/h + beta u_N+1
 *
 * with w = 1 + h/2. The boundary rows are the half-cell balance of the
 * trapezoid rule, which makes the closure second order and gives
 *
 *   Re <K u, u> = -sum |u_{i+1} - u_i|^2 / h
 *                 + (Re alpha - k/2)|u_0|^2 + (Re beta + k/2)|u_N+1|^2,
 *
 * the discrete counterpart of the form identity used for dissipativity and
 * symmetry. K is symmetric when k = 0 and alpha, beta are real.
 */

#include "oscmat/analytic.hpp"

#include <array>
#include <vector>

namespace oscmat {

struct Grid {
    int n_interior = 0;
    double h = 0.0;

    static Grid make(int n_interior);
    int size() const { return n_interior + 2; }
    double node(int i) const { return i * h; }
};

struct ProductState {
    std::array<Complex, 2> boundary{};
    VectorXc interior;

    static ProductState from_vector(const VectorXc& nodal);
    VectorXc to_vector() const;
    double weighted_norm(const VectorXr& weights) const;
};

double weighted_norm(const VectorXc& v, const VectorXr& weights);

class DiscreteOperator {
public:
    DiscreteOperator(SystemParams params, Grid grid, MatrixXc stiffness, VectorXr weights);

    const MatrixXc& matrix() const { return matrix_; }
    /// W A_h, exactly K as assembled.
    const MatrixXc& stiffness() const { return stiffness_; }
    const VectorXr& weights() const { return weights_; }
    const SystemParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    int size() const { return grid_.size(); }
    bool is_real() const;

    /// Interior Dirichlet block D_h (rows and columns 1..N).
    MatrixXc dirichlet_block() const;

private:
    SystemParams params_;
    Grid grid_;
    MatrixXc stiffness_;
    VectorXr weights_;
    MatrixXc matrix_;
};

DiscreteOperator assemble(const SystemParams& params, int n_interior);

/// All eigenvalues, sorted by descending real part.
std::vector<Complex> discrete_spectrum(const DiscreteOperator& op);

/// Eigenvalues of an arbitrary square matrix, sorted by descending real part.
std::vector<Complex> sorted_eigenvalues(const MatrixXc& m);

/// (lambda I - A_h)^{-1}; throws NearSingular above condition 1e12.
MatrixXc discrete_resolvent(const DiscreteOperator& op, Complex lambda);

/// Boundary block of (lambda - A_h)^{-1} W^{-1}: boundary data y enters the
/// discrete resolvent equation as (lambda W - K) u = (y_0, 0, ..., 0, y_1), so
/// this is the counterpart of (lambda - pencil(lambda))^{-1}.
Matrix2c boundary_resolvent(const DiscreteOperator& op, Complex lambda);

/// The 2x2 block on the boundary nodes (0, N+1) of a nodal matrix.
Matrix2c boundary_block(const MatrixXc& m);

/// M_bb + M_bi (lambda - M_ii)^{-1} M_ib: the discrete A + B D_lambda.
Matrix2c discrete_pencil(const DiscreteOperator& op, Complex lambda);

/// Relative residuals of the two block identities at fixed N:
///   lambda - A_h = [[lambda - P, -M_bi], [0, lambda - D_h]] [[I, 0], [-D_lambda, I]]
///   R(lambda, A_h) = block formula built from R(lambda, P) and R(lambda, D_h)
struct FactorizationResidual {
    double operator_identity = 0.0;
    double resolvent_formula = 0.0;
};

FactorizationResidual resolvent_factorization_residual(const DiscreteOperator& op, Complex lambda);

/// Max-norm difference on the interior nodes between the analytic D_lambda x
/// and (I - lambda R(lambda, D_h)) D_0 x for x = (1,0) and (0,1).
double dirichlet_relation_residual(const SystemParams& params, Complex lambda, int n_interior);

/// max |W A - (W A)^*| over entries.
double weighted_symmetry_defect(const DiscreteOperator& op);

/// Largest eigenvalue of the W-symmetric part of A_h, i.e. sup Re<A_h u,u>_W / <u,u>_W.
double numerical_abscissa(const DiscreteOperator& op);

} // namespace oscmat
