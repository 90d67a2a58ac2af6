#pragma once

// Finite-dimensional checks of the block-matrix structure results:
// the characterization of one-sided coupled matrices through the blocks of
// the inverse, and the lower-triangular semigroup formula.

#include "oscmat/core.hpp"

#include <random>

namespace oscmat {

inline constexpr double kRankTol = 1e-8;

/// Numerical rank with singular values below tol * scale dropped; scale
/// defaults to the largest singular value of m.
int numerical_rank(const MatrixXr& m, double tol = kRankTol, double scale = -1.0);

struct OscCheck {
    bool d_invertible = false;
    bool u_injective = false;
    bool rgv_in_rgu = false;
    /// max entry of [[A + B L, B], [D L, D]] - M when D is invertible, else 0
    double factorization_residual = 0.0;

    bool consistent() const { return d_invertible == (u_injective && rgv_in_rgu); }
};

/// Blocks U (nx x nx), V, W, S of M^{-1}. M is recovered by inversion and
/// split conformally; D is its lower-right block. Ranks of D are measured
/// against |M|, ranks of U and [U V] against |M^{-1}|.
OscCheck osc_check(const MatrixXr& U, const MatrixXr& V, const MatrixXr& W, const MatrixXr& S);

struct InverseBlocks {
    MatrixXr U, V, W, S;
    MatrixXr M;
};

/// Random invertible 4x4 block matrix with cond(M) <= 1e4, split at nx in
/// {1,2,3}. When `deficient` is set the lower-right block has rank < its size;
/// otherwise it is invertible with condition number <= 1e4.
InverseBlocks random_block_instance(std::mt19937_64& rng, bool deficient);

/// Random n x n real matrix with spectral abscissa <= -0.1.
MatrixXr random_stable_matrix(std::mt19937_64& rng, int n);

MatrixXr matrix_exp(const MatrixXr& m);

/// Q(t) = D int_0^t e^{(t-s)D} L e^{sA} ds by composite Simpson.
MatrixXr coupling_block(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, int panels);

/// Max entry difference between coupling_block and the lower-left block of
/// exp(t [[A, 0], [D L, D]]).
double triangular_semigroup_check(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, int panels);

/// Max entry of T(t) T(s) - T(t+s) with T(t) = [[e^{tA}, 0], [Q(t), e^{tD}]].
double semigroup_law_residual(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, double s,
                              int panels);

} // namespace oscmat
