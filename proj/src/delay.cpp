#include "oscmat/delay.hpp"

#include "json.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oscmat {

namespace {

bool is_real_matrix(const MatrixXc& m)
{
    return (m.imag().array() == 0.0).all();
}

bool all_finite(const MatrixXc& m)
{
    return m.real().allFinite() && m.imag().allFinite();
}

} // namespace

void DelaySystem::validate() const
{
    if (A.rows() < 1 || A.rows() != A.cols()) {
        throw ValidationError("DelaySystem: A must be square with m >= 1");
    }
    if (!all_finite(A)) {
        throw ValidationError("DelaySystem: A must be finite");
    }
    for (const auto& t : terms) {
        if (t.psi.rows() != A.rows() || t.psi.cols() != A.cols()) {
            throw ValidationError("DelaySystem: Psi must match the size of A");
        }
        if (!all_finite(t.psi)) {
            throw ValidationError("DelaySystem: Psi must be finite");
        }
        if (!(t.r >= 0.0 && t.r <= 1.0)) {
            throw ValidationError("DelaySystem: delays must satisfy 0 <= r <= 1");
        }
    }
}

MatrixXc DelaySystem::undelayed() const
{
    MatrixXc m = A;
    for (const auto& t : terms) {
        m += t.psi;
    }
    return m;
}

bool DelaySystem::positivity_regime() const
{
    if (!is_real_matrix(A)) {
        return false;
    }
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (i != j && A(i, j).real() < 0.0) {
                return false;
            }
        }
    }
    for (const auto& t : terms) {
        if (!is_real_matrix(t.psi) || (t.psi.real().array() < 0.0).any()) {
            return false;
        }
    }
    return true;
}

void ExpKernel::validate(int dim) const
{
    for (const auto& t : terms) {
        if (!(t.a > 0.0) || !std::isfinite(t.a)) {
            throw ValidationError("ExpKernel: rates a_i > 0 required");
        }
        if (t.c.rows() != dim || t.c.cols() != dim || !all_finite(t.c)) {
            throw ValidationError("ExpKernel: C_i must be finite and match the size of A");
        }
    }
}

double ExpKernel::min_rate() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
        m = std::min(m, t.a);
    }
    return m;
}

MatrixXc ExpKernel::value(double s) const
{
    if (terms.empty()) {
        throw ValidationError("ExpKernel: empty kernel has no size");
    }
    MatrixXc m = MatrixXc::Zero(terms.front().c.rows(), terms.front().c.cols());
    for (const auto& t : terms) {
        m += std::exp(-t.a * s) * t.c;
    }
    return m;
}

Complex adde_char_det(const DelaySystem& sys, Complex lambda)
{
    sys.validate();
    const int m = sys.dim();
    MatrixXc M = lambda * MatrixXc::Identity(m, m) - sys.A;
    for (const auto& t : sys.terms) {
        M -= std::exp(-lambda * t.r) * t.psi;
    }
    return M.determinant();
}

double adde_rightmost_real_root(const DelaySystem& sys, double re_min)
{
    sys.validate();
    if (!is_real_matrix(sys.A) ||
        std::any_of(sys.terms.begin(), sys.terms.end(), [](const DelayTerm& t) { return !is_real_matrix(t.psi); })) {
        throw NotApplicable("adde_rightmost_real_root: A and Psi must be real");
    }
    auto f = [&](double x) { return adde_char_det(sys, Complex(x, 0.0)).real(); };

    // for lambda >= 0 every real root satisfies lambda <= |A| + sum |Psi|
    double upper = sys.A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    for (const auto& t : sys.terms) {
        upper += t.psi.cwiseAbs().rowwise().sum().maxCoeff();
    }
    if (!(re_min < upper)) {
        throw ValidationError("adde_rightmost_real_root: re_min lies above the scan start");
    }
    const double edge = f(re_min);
    if (edge == 0.0 || !std::isfinite(edge)) {
        throw WindowTooSmall("adde_rightmost_real_root: characteristic function vanishes or overflows at re_min");
    }

    constexpr double step = 1e-2;
    double hi = upper;
    double fhi = f(hi);
    while (hi > re_min) {
        if (fhi == 0.0) {
            return hi;
        }
        const double lo = std::max(hi - step, re_min);
        const double flo = f(lo);
        if (flo != 0.0 && (flo < 0.0) != (fhi < 0.0)) {
            double l = lo;
            double r = hi;
            double fl = flo;
            for (int it = 0; it < 200 && r - l > 4e-16 * (1.0 + std::abs(r)); ++it) {
                const double mid = 0.5 * (l + r);
                const double fm = f(mid);
                if (fm == 0.0) {
                    return mid;
                }
                if ((fm < 0.0) == (fl < 0.0)) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            }
            return 0.5 * (l + r);
        }
        hi = lo;
        fhi = flo;
    }
    return -std::numeric_limits<double>::infinity();
}

double spectral_abscissa(const MatrixXc& m)
{
    Eigen::ComplexEigenSolver<MatrixXc> es(m, false);
    if (es.info() != Eigen::Success) {
        throw EigenFailure("spectral_abscissa: eigenvalue solver did not converge");
    }
    return es.eigenvalues().real().maxCoeff();
}

int root_sign(double x)
{
    if (x == -std::numeric_limits<double>::infinity()) {
        return -1;
    }
    if (std::abs(x) < 1e-12) {
        return 0;
    }
    return x < 0.0 ? -1 : 1;
}

DelayIndependenceReport delay_independence_report(const MatrixXc& A, const MatrixXc& psi,
                                                  const std::vector<double>& r_values, double re_min)
{
    if (r_values.empty()) {
        throw ValidationError("delay_independence_report: no delays given");
    }
    DelayIndependenceReport rep;
    DelaySystem base{A, {{psi, r_values.front()}}};
    base.validate();
    rep.positivity_regime = base.positivity_regime();
    rep.undelayed_abscissa = spectral_abscissa(base.undelayed());
    rep.undelayed_sign = root_sign(rep.undelayed_abscissa);
    rep.independent = true;
    for (double r : r_values) {
        DelaySystem sys{A, {{psi, r}}};
        DelayIndependenceReport::Row row;
        row.r = r;
        row.root = adde_rightmost_real_root(sys, re_min);
        row.sign = root_sign(row.root);
        rep.independent = rep.independent && row.sign == rep.undelayed_sign;
        rep.rows.push_back(row);
    }
    return rep;
}

std::string DelayIndependenceReport::to_json() const
{
    nlohmann::json j;
    j["schema_version"] = 1;
    j["positivity_regime"] = positivity_regime;
    j["undelayed_abscissa"] = undelayed_abscissa;
    j["undelayed_sign"] = undelayed_sign;
    j["independent"] = independent;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json rj;
        rj["r"] = row.r;
        if (std::isfinite(row.root)) {
            rj["root"] = row.root;
        } else {
            rj["root"] = nullptr;
        }
        rj["sign"] = row.sign;
        rj["matches_undelayed"] = row.sign == undelayed_sign;
        j["rows"].push_back(rj);
    }
    return j.dump(2);
}

DelayTrajectory method_of_steps(const DelaySystem& sys, const History& history, double T, double dt)
{
    sys.validate();
    if (!(dt > 0.0) || !std::isfinite(dt) || !(T >= dt) || !std::isfinite(T)) {
        throw ValidationError("method_of_steps: dt > 0 and T >= dt required");
    }
    const long steps = std::lround(T / dt);
    if (std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T)) {
        throw ValidationError("method_of_steps: T must be a multiple of dt");
    }
    const int m = sys.dim();

    MatrixXc a0 = sys.A;
    std::vector<std::pair<long, MatrixXc>> lagged;
    long max_lag = 0;
    for (const auto& t : sys.terms) {
        const long lag = std::lround(t.r / dt);
        if (std::abs(t.r - lag * dt) > 1e-12) {
            throw MisalignedDelay("method_of_steps: dt does not divide the delay r = " + std::to_string(t.r));
        }
        if (lag == 0) {
            a0 += t.psi;
        } else {
            lagged.emplace_back(lag, t.psi);
            max_lag = std::max(max_lag, lag);
        }
    }

    const MatrixXc id = MatrixXc::Identity(m, m);
    Eigen::PartialPivLU<MatrixXc> lu(id - 0.5 * dt * a0);
    if (!(lu.rcond() >= 1e-12)) {
        throw NearSingular("method_of_steps: step matrix condition estimate exceeds 1e12");
    }
    const MatrixXc expl = id + 0.5 * dt * a0;

    // u[j + max_lag] holds the value at t = j dt
    std::vector<VectorXc> u(max_lag + steps + 1);
    for (long j = -max_lag; j <= 0; ++j) {
        u[j + max_lag] = history(j * dt);
        if (u[j + max_lag].size() != m) {
            throw ValidationError("method_of_steps: history has the wrong dimension");
        }
    }

    DelayTrajectory out;
    auto record = [&](long j) {
        const VectorXc& v = u[j + max_lag];
        out.times.push_back(j * dt);
        out.states.push_back(v);
        out.norms.push_back(v.norm());
    };
    record(0);
    for (long n = 0; n < steps; ++n) {
        VectorXc rhs = expl * u[n + max_lag];
        for (const auto& [lag, psi] : lagged) {
            rhs += 0.5 * dt * psi * (u[n - lag + max_lag] + u[n + 1 - lag + max_lag]);
        }
        u[n + 1 + max_lag] = lu.solve(rhs);
        record(n + 1);
    }
    return out;
}

namespace {

void check_halfplane(const ExpKernel& kernel, Complex lambda)
{
    if (!kernel.terms.empty() && !(lambda.real() > -kernel.min_rate())) {
        throw OutsideHalfplane("vide_char_det: Re lambda must exceed -min a_i");
    }
}

MatrixXc vide_matrix(const MatrixXc& A, const ExpKernel& kernel, Complex lambda)
{
    MatrixXc M = lambda * MatrixXc::Identity(A.rows(), A.cols()) - A;
    for (const auto& t : kernel.terms) {
        M -= t.c / (lambda + t.a);
    }
    return M;
}

} // namespace

Complex vide_char_det(const MatrixXc& A, const ExpKernel& kernel, Complex lambda)
{
    if (A.rows() < 1 || A.rows() != A.cols()) {
        throw ValidationError("vide_char_det: A must be square");
    }
    kernel.validate(static_cast<int>(A.rows()));
    check_halfplane(kernel, lambda);
    return vide_matrix(A, kernel, lambda).determinant();
}

std::vector<Complex> vide_roots(const MatrixXc& A, const ExpKernel& kernel)
{
    if (A.rows() < 1 || A.rows() != A.cols()) {
        throw ValidationError("vide_roots: A must be square");
    }
    const Eigen::Index m = A.rows();
    kernel.validate(static_cast<int>(m));
    const Eigen::Index p = static_cast<Eigen::Index>(kernel.terms.size());
    const Eigen::Index n = m * (p + 1);

    // y_i = x / (lambda + a_i) turns the rational eigenproblem into a linear one
    MatrixXc big = MatrixXc::Zero(n, n);
    big.topLeftCorner(m, m) = A;
    for (Eigen::Index i = 0; i < p; ++i) {
        const auto& t = kernel.terms[i];
        const Eigen::Index off = m * (i + 1);
        big.block(0, off, m, m) = t.c;
        big.block(off, 0, m, m) = MatrixXc::Identity(m, m);
        big.block(off, off, m, m) = -t.a * MatrixXc::Identity(m, m);
    }
    Eigen::ComplexEigenSolver<MatrixXc> es(big, false);
    if (es.info() != Eigen::Success) {
        throw EigenFailure("vide_roots: eigenvalue solver did not converge");
    }

    // eigenvalues sitting on the pole -a_i up to roundoff are not roots
    const double bound = kernel.terms.empty() ? -std::numeric_limits<double>::infinity()
                                              : -kernel.min_rate() * (1.0 - 1e-10) + 1e-10;
    std::vector<Complex> roots;
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex z = es.eigenvalues()(i);
        if (!(z.real() > bound)) {
            continue;
        }
        // Newton on det M: det'/det = tr(M^{-1} M')
        for (int it = 0; it < 50; ++it) {
            const MatrixXc M = vide_matrix(A, kernel, z);
            Eigen::PartialPivLU<MatrixXc> lu(M);
            if (lu.determinant() == 0.0) {
                break;
            }
            MatrixXc dM = MatrixXc::Identity(m, m);
            for (const auto& t : kernel.terms) {
                dM += t.c / ((z + t.a) * (z + t.a));
            }
            const Complex tr = lu.solve(dM).trace();
            if (tr == 0.0) {
                break;
            }
            const Complex step = 1.0 / tr;
            if (!(std::abs(step) < 1e-2 * (1.0 + std::abs(z)))) {
                break; // far from a simple root; keep the eigenvalue
            }
            z -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
                break;
            }
        }
        if (z.real() > bound) {
            roots.push_back(z);
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    return roots;
}

} // namespace oscmat
