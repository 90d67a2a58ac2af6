#include "oscmat/structure.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <vector>

namespace oscmat {

namespace {

double cond(const MatrixXr& m)
{
    Eigen::JacobiSVD<MatrixXr> svd(m);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1) == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / sv(sv.size() - 1);
}

MatrixXr gaussian(std::mt19937_64& rng, int r, int c)
{
    std::normal_distribution<double> nd;
    MatrixXr m(r, c);
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < r; ++i) {
            m(i, j) = nd(rng);
        }
    }
    return m;
}

MatrixXr block_matrix(const MatrixXr& a, const MatrixXr& b, const MatrixXr& c, const MatrixXr& d)
{
    MatrixXr m(a.rows() + c.rows(), a.cols() + b.cols());
    m << a, b, c, d;
    return m;
}

} // namespace

int numerical_rank(const MatrixXr& m, double tol, double scale)
{
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<MatrixXr> svd(m);
    const auto& sv = svd.singularValues();
    if (scale < 0.0) {
        scale = sv(0);
    }
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol * scale) {
            ++r;
        }
    }
    return r;
}

OscCheck osc_check(const MatrixXr& U, const MatrixXr& V, const MatrixXr& W, const MatrixXr& S)
{
    const Eigen::Index nx = U.rows();
    const Eigen::Index ny = S.rows();
    if (U.cols() != nx || V.rows() != nx || V.cols() != ny || W.rows() != ny || W.cols() != nx ||
        S.cols() != ny) {
        throw ValidationError("osc_check: block sizes do not conform");
    }
    const MatrixXr inv = block_matrix(U, V, W, S);
    Eigen::FullPivLU<MatrixXr> lu(inv);
    if (!lu.isInvertible() || cond(inv) > 1e12) {
        throw NotInvertible("osc_check: block matrix is singular");
    }
    const MatrixXr M = lu.inverse();
    const MatrixXr D = M.bottomRightCorner(ny, ny);
    const double m_norm = Eigen::JacobiSVD<MatrixXr>(M).singularValues()(0);
    const double inv_norm = Eigen::JacobiSVD<MatrixXr>(inv).singularValues()(0);

    OscCheck out;
    out.d_invertible = numerical_rank(D, kRankTol, m_norm) == ny;
    const int ru = numerical_rank(U, kRankTol, inv_norm);
    out.u_injective = ru == nx;
    MatrixXr uv(nx, nx + ny);
    uv << U, V;
    out.rgv_in_rgu = numerical_rank(uv, kRankTol, inv_norm) == ru;

    if (out.d_invertible && out.u_injective) {
        const MatrixXr a_tilde = U.inverse();
        const MatrixXr L = -W * a_tilde;
        const MatrixXr B = M.topRightCorner(nx, ny);
        const MatrixXr rebuilt = block_matrix(a_tilde + B * L, B, D * L, D);
        out.factorization_residual = (rebuilt - M).cwiseAbs().maxCoeff();
    }
    return out;
}

InverseBlocks random_block_instance(std::mt19937_64& rng, bool deficient)
{
    constexpr int n = 4;
    std::uniform_int_distribution<int> split(1, 3);
    const int nx = split(rng);
    const int ny = n - nx;
    for (;;) {
        MatrixXr M = gaussian(rng, n, n);
        if (deficient) {
            // rank ny - 1 lower-right block
            MatrixXr d = MatrixXr::Zero(ny, ny);
            if (ny > 1) {
                d = gaussian(rng, ny, ny - 1) * gaussian(rng, ny - 1, ny);
            }
            M.bottomRightCorner(ny, ny) = d;
        } else if (cond(M.bottomRightCorner(ny, ny)) > 1e4) {
            continue;
        }
        if (cond(M) > 1e4) {
            continue;
        }
        InverseBlocks b;
        b.M = M;
        const MatrixXr inv = M.inverse();
        b.U = inv.topLeftCorner(nx, nx);
        b.V = inv.topRightCorner(nx, ny);
        b.W = inv.bottomLeftCorner(ny, nx);
        b.S = inv.bottomRightCorner(ny, ny);
        return b;
    }
}

MatrixXr random_stable_matrix(std::mt19937_64& rng, int n)
{
    MatrixXr m = gaussian(rng, n, n);
    Eigen::EigenSolver<MatrixXr> es(m, false);
    const double abscissa = es.eigenvalues().real().maxCoeff();
    m -= (abscissa + 0.1) * MatrixXr::Identity(n, n);
    return m;
}

MatrixXr matrix_exp(const MatrixXr& m)
{
    return m.exp();
}

MatrixXr coupling_block(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, int panels)
{
    if (panels < 2 || panels % 2 != 0) {
        throw ValidationError("coupling_block: panels must be even and >= 2");
    }
    if (t < 0.0) {
        throw ValidationError("coupling_block: t >= 0 required");
    }
    const double ds = t / panels;
    const MatrixXr step_a = matrix_exp(ds * A);
    const MatrixXr step_d = matrix_exp(ds * D);

    // e^{j ds D} for j = 0..panels
    std::vector<MatrixXr> pow_d(panels + 1);
    pow_d[0] = MatrixXr::Identity(D.rows(), D.cols());
    for (int j = 1; j <= panels; ++j) {
        pow_d[j] = step_d * pow_d[j - 1];
    }

    MatrixXr sum = MatrixXr::Zero(D.rows(), A.cols());
    MatrixXr ea = MatrixXr::Identity(A.rows(), A.cols());
    for (int j = 0; j <= panels; ++j) {
        const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        sum += w * (pow_d[panels - j] * L * ea);
        ea = step_a * ea;
    }
    return D * sum * (ds / 3.0);
}

double triangular_semigroup_check(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, int panels)
{
    const MatrixXr q = coupling_block(A, D, L, t, panels);
    const MatrixXr gen = block_matrix(A, MatrixXr::Zero(A.rows(), D.cols()), D * L, D);
    const MatrixXr ref = matrix_exp(t * gen).bottomLeftCorner(D.rows(), A.cols());
    return (q - ref).cwiseAbs().maxCoeff();
}

double semigroup_law_residual(const MatrixXr& A, const MatrixXr& D, const MatrixXr& L, double t, double s,
                              int panels)
{
    auto family = [&](double tau) {
        return block_matrix(matrix_exp(tau * A), MatrixXr::Zero(A.rows(), D.cols()),
                            coupling_block(A, D, L, tau, panels), matrix_exp(tau * D));
    };
    return (family(t) * family(s) - family(t + s)).cwiseAbs().maxCoeff();
}

} // namespace oscmat
