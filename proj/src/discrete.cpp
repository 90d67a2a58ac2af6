#include "oscmat/discrete.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace oscmat {

Grid Grid::make(int n_interior)
{
    if (n_interior < 8) {
        throw ValidationError("Grid: N >= 8 required");
    }
    Grid g;
    g.n_interior = n_interior;
    g.h = 1.0 / (n_interior + 1);
    return g;
}

ProductState ProductState::from_vector(const VectorXc& nodal)
{
    if (nodal.size() < 3) {
        throw ValidationError("ProductState: at least three nodes required");
    }
    ProductState s;
    const Eigen::Index n = nodal.size();
    s.boundary = {nodal(0), nodal(n - 1)};
    s.interior = nodal.segment(1, n - 2);
    return s;
}

VectorXc ProductState::to_vector() const
{
    VectorXc v(interior.size() + 2);
    v(0) = boundary[0];
    v.segment(1, interior.size()) = interior;
    v(v.size() - 1) = boundary[1];
    return v;
}

double ProductState::weighted_norm(const VectorXr& weights) const
{
    return oscmat::weighted_norm(to_vector(), weights);
}

double weighted_norm(const VectorXc& v, const VectorXr& weights)
{
    if (v.size() != weights.size()) {
        throw ValidationError("weighted_norm: size mismatch");
    }
    return std::sqrt((v.cwiseAbs2().array() * weights.array()).sum());
}

DiscreteOperator::DiscreteOperator(SystemParams params, Grid grid, MatrixXc stiffness, VectorXr weights)
    : params_(params), grid_(grid), stiffness_(std::move(stiffness)), weights_(std::move(weights))
{
    matrix_ = weights_.cwiseInverse().asDiagonal() * stiffness_;
}

bool DiscreteOperator::is_real() const
{
    return params_.has_real_coefficients();
}

MatrixXc DiscreteOperator::dirichlet_block() const
{
    const int n = grid_.n_interior;
    return matrix_.block(1, 1, n, n);
}

DiscreteOperator assemble(const SystemParams& params, int n_interior)
{
    params.validate();
    const Grid grid = Grid::make(n_interior);
    const int n = grid.size();
    const double inv_h = n_interior + 1;
    const double half_k = 0.5 * params.k;

    MatrixXc K = MatrixXc::Zero(n, n);
    for (int i = 1; i <= n_interior; ++i) {
        K(i, i - 1) = inv_h - half_k;
        K(i, i) = -2.0 * inv_h;
        K(i, i + 1) = inv_h + half_k;
    }
    K(0, 0) = params.alpha - (inv_h + half_k);
    K(0, 1) = inv_h + half_k;
    K(n - 1, n - 1) = params.beta - (inv_h - half_k);
    K(n - 1, n - 2) = inv_h - half_k;

    VectorXr w = VectorXr::Constant(n, grid.h);
    w(0) = 1.0 + 0.5 * grid.h;
    w(n - 1) = 1.0 + 0.5 * grid.h;
    return DiscreteOperator(params, grid, std::move(K), std::move(w));
}

std::vector<Complex> sorted_eigenvalues(const MatrixXc& m)
{
    std::vector<Complex> out;
    const bool real = (m.imag().array() == 0.0).all();
    if (real) {
        Eigen::EigenSolver<MatrixXr> es(m.real(), false);
        if (es.info() != Eigen::Success) {
            throw EigenFailure("eigenvalue solver did not converge");
        }
        const auto& ev = es.eigenvalues();
        out.assign(ev.data(), ev.data() + ev.size());
    } else {
        Eigen::ComplexEigenSolver<MatrixXc> es(m, false);
        if (es.info() != Eigen::Success) {
            throw EigenFailure("eigenvalue solver did not converge");
        }
        const auto& ev = es.eigenvalues();
        out.assign(ev.data(), ev.data() + ev.size());
    }
    std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return out;
}

std::vector<Complex> discrete_spectrum(const DiscreteOperator& op)
{
    return sorted_eigenvalues(op.matrix());
}

namespace {

Eigen::PartialPivLU<MatrixXc> guarded_lu(const MatrixXc& m, const char* what)
{
    Eigen::PartialPivLU<MatrixXc> lu(m);
    if (!(lu.rcond() >= 1e-12)) {
        throw NearSingular(std::string(what) + ": condition estimate exceeds 1e12");
    }
    return lu;
}

struct Blocks {
    Matrix2c bb;
    MatrixXc bi;
    MatrixXc ib;
    MatrixXc ii;
};

Blocks split(const MatrixXc& m)
{
    const Eigen::Index n = m.rows() - 2;
    const Eigen::Index last = m.rows() - 1;
    Blocks b;
    b.bb = boundary_block(m);
    b.bi.resize(2, n);
    b.bi.row(0) = m.block(0, 1, 1, n);
    b.bi.row(1) = m.block(last, 1, 1, n);
    b.ib.resize(n, 2);
    b.ib.col(0) = m.block(1, 0, n, 1);
    b.ib.col(1) = m.block(1, last, n, 1);
    b.ii = m.block(1, 1, n, n);
    return b;
}

} // namespace

MatrixXc discrete_resolvent(const DiscreteOperator& op, Complex lambda)
{
    const int n = op.size();
    MatrixXc shifted = lambda * MatrixXc::Identity(n, n) - op.matrix();
    return guarded_lu(shifted, "discrete_resolvent").inverse();
}

Matrix2c boundary_resolvent(const DiscreteOperator& op, Complex lambda)
{
    const VectorXr& w = op.weights();
    Matrix2c b = boundary_block(discrete_resolvent(op, lambda));
    b.col(0) /= w(0);
    b.col(1) /= w(w.size() - 1);
    return b;
}

Matrix2c boundary_block(const MatrixXc& m)
{
    const Eigen::Index last = m.rows() - 1;
    Matrix2c b;
    b << m(0, 0), m(0, last), m(last, 0), m(last, last);
    return b;
}

Matrix2c discrete_pencil(const DiscreteOperator& op, Complex lambda)
{
    const Blocks b = split(op.matrix());
    const Eigen::Index n = b.ii.rows();
    const MatrixXc shifted = lambda * MatrixXc::Identity(n, n) - b.ii;
    const MatrixXc dir = guarded_lu(shifted, "discrete_pencil").solve(b.ib);
    return b.bb + b.bi * dir;
}

FactorizationResidual resolvent_factorization_residual(const DiscreteOperator& op, Complex lambda)
{
    const Blocks b = split(op.matrix());
    const Eigen::Index n = b.ii.rows();
    const Eigen::Index total = n + 2;
    const MatrixXc id_n = MatrixXc::Identity(n, n);

    // operator in (boundary, interior) ordering
    MatrixXc m(total, total);
    m << b.bb, b.bi, b.ib, b.ii;
    const MatrixXc lhs = lambda * MatrixXc::Identity(total, total) - m;

    const auto lu_d = guarded_lu(lambda * id_n - b.ii, "resolvent_factorization_residual");
    const MatrixXc rd = lu_d.inverse();
    const MatrixXc dir = rd * b.ib;
    const Matrix2c p = b.bb + b.bi * dir;
    const Matrix2c s = lambda * Matrix2c::Identity() - p;
    if (std::abs(s.determinant()) == 0.0) {
        throw NearSingular("resolvent_factorization_residual: lambda is an eigenvalue");
    }
    const Matrix2c s_inv = s.inverse();

    MatrixXc upper(total, total);
    upper << s, -b.bi, MatrixXc::Zero(n, 2), lambda * id_n - b.ii;
    MatrixXc lower(total, total);
    lower << Matrix2c::Identity(), MatrixXc::Zero(2, n), -dir, id_n;

    FactorizationResidual out;
    const double lnorm = lhs.cwiseAbs().maxCoeff();
    out.operator_identity = (upper * lower - lhs).cwiseAbs().maxCoeff() / lnorm;

    const MatrixXc cross = s_inv * b.bi * rd;
    MatrixXc r(total, total);
    r << s_inv, cross, dir * s_inv, rd + dir * cross;
    const MatrixXc direct = guarded_lu(lhs, "resolvent_factorization_residual").inverse();
    out.resolvent_formula = (r - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff();
    return out;
}

double dirichlet_relation_residual(const SystemParams& params, Complex lambda, int n_interior)
{
    params.validate();
    check_dirichlet_resolvent(lambda, params.k);
    const DiscreteOperator op = assemble(params, n_interior);
    const Grid& g = op.grid();
    const int n = g.n_interior;
    const MatrixXc dh = op.dirichlet_block();
    const auto lu = guarded_lu(lambda * MatrixXc::Identity(n, n) - dh, "dirichlet_relation_residual");

    double worst = 0.0;
    const Complex inputs[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    for (const auto& in : inputs) {
        VectorXc d0(n);
        VectorXc dl(n);
        for (int i = 0; i < n; ++i) {
            const double x = g.node(i + 1);
            d0(i) = dirichlet_apply(params, 0.0, in[0], in[1], x);
            dl(i) = dirichlet_apply(params, lambda, in[0], in[1], x);
        }
        const VectorXc rhs = d0 - lambda * lu.solve(d0);
        worst = std::max(worst, (dl - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

double weighted_symmetry_defect(const DiscreteOperator& op)
{
    const MatrixXc wa = op.weights().asDiagonal() * op.matrix();
    return (wa - wa.adjoint()).cwiseAbs().maxCoeff();
}

double numerical_abscissa(const DiscreteOperator& op)
{
    const VectorXr s = op.weights().cwiseSqrt();
    const MatrixXc wa = op.weights().asDiagonal() * op.matrix();
    const MatrixXc herm = 0.5 * (wa + wa.adjoint());
    const MatrixXc scaled = s.cwiseInverse().asDiagonal() * herm * s.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(scaled, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw EigenFailure("numerical_abscissa: eigenvalue solver did not converge");
    }
    return es.eigenvalues().maxCoeff();
}

} // namespace oscmat
