#include "doctest.h"

#include "oracles.hpp"
#include "oscmat/delay.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <random>

using namespace oscmat;

namespace {

MatrixXc scalar(double v)
{
    return MatrixXc::Constant(1, 1, v);
}

DelaySystem scalar_system(double a, double psi, double r)
{
    return {scalar(a), {{scalar(psi), r}}};
}

std::vector<double> r_grid()
{
    std::vector<double> r;
    for (int i = 1; i <= 10; ++i) {
        r.push_back(0.1 * i);
    }
    return r;
}

double nearest(const std::vector<Complex>& set, Complex z)
{
    double best = std::numeric_limits<double>::infinity();
    for (Complex w : set) {
        best = std::min(best, std::abs(w - z));
    }
    return best;
}

} // namespace

TEST_CASE("scalar characteristic function")
{
    const DelaySystem sys = scalar_system(-1.0, 0.5, 0.3);
    for (Complex lam : {Complex(0.2), Complex(-0.4, 1.0), Complex(2.0, -3.0)}) {
        const Complex expected = lam + 1.0 - 0.5 * std::exp(-0.3 * lam);
        CHECK(std::abs(adde_char_det(sys, lam) - expected) <= 1e-15 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("zero delay reduces to the undelayed pencil")
{
    MatrixXc A(2, 2);
    A << -2.0, 0.5, 0.3, -1.0;
    MatrixXc psi(2, 2);
    psi << 0.2, 0.1, 0.0, 0.4;
    const DelaySystem sys{A, {{psi, 0.0}}};
    const Complex lam(0.7, -0.2);
    const Complex expected = (lam * MatrixXc::Identity(2, 2) - A - psi).determinant();
    CHECK(std::abs(adde_char_det(sys, lam) - expected) <= 1e-14);
    CHECK((sys.undelayed() - (A + psi)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rightmost real root against bisection")
{
    for (auto [a, psi, r] : {std::tuple{-1.0, 0.5, 0.5}, std::tuple{-1.0, 1.5, 0.5}, std::tuple{-2.0, 1.0, 1.0},
                             std::tuple{0.5, 0.2, 0.1}}) {
        const DelaySystem sys = scalar_system(a, psi, r);
        // lambda - a - psi e^{-lambda r} is increasing for psi >= 0, so the real root is unique
        const double ref = oracle::bisect([&](double x) { return x - a - psi * std::exp(-x * r); }, -20.0, 20.0);
        CHECK(adde_rightmost_real_root(sys) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("no delay term gives the largest eigenvalue")
{
    MatrixXc A(2, 2);
    A << -3.0, 1.0, 2.0, -1.0;
    const DelaySystem sys{A, {{MatrixXc::Zero(2, 2), 0.5}}};
    const double expected = -2.0 + std::sqrt(3.0);
    CHECK(adde_rightmost_real_root(sys) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(spectral_abscissa(A) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rightmost root errors")
{
    const DelaySystem complex_sys{MatrixXc::Constant(1, 1, Complex(0.0, 1.0)), {}};
    CHECK_THROWS_AS(adde_rightmost_real_root(complex_sys), NotApplicable);
    CHECK_THROWS_AS(adde_rightmost_real_root(scalar_system(-1.0, 0.0, 0.5), -1.0), WindowTooSmall);
    CHECK_THROWS_AS(adde_char_det(scalar_system(-1.0, 0.5, 1.5), 0.0), ValidationError);
    CHECK(adde_rightmost_real_root(scalar_system(-10.0, 0.0, 0.5), -5.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("delay-independence report: scalar examples")
{
    const DelayIndependenceReport stable = delay_independence_report(scalar(-1.0), scalar(0.5), r_grid());
    CHECK(stable.positivity_regime);
    CHECK(stable.independent);
    CHECK(stable.undelayed_abscissa == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(stable.rows.size() == 10);
    for (const auto& row : stable.rows) {
        CHECK(row.root < 0.0);
    }

    const DelayIndependenceReport unstable = delay_independence_report(scalar(-1.0), scalar(1.5), r_grid());
    CHECK(unstable.independent);
    for (const auto& row : unstable.rows) {
        CHECK(row.root > 0.0);
    }
    CHECK(stable.to_json().find("\"independent\": true") != std::string::npos);
}

TEST_CASE("delay-independence report: 2x2 example")
{
    MatrixXc A(2, 2);
    A << -2.0, 1.0, 0.5, -1.5;
    MatrixXc psi(2, 2);
    psi << 0.3, 0.0, 0.2, 0.4;
    const DelayIndependenceReport rep = delay_independence_report(A, psi, r_grid());
    CHECK(rep.positivity_regime);
    CHECK(rep.undelayed_sign == -1);
    CHECK(rep.independent);
}

TEST_CASE("delay independence for random positive systems")
{
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> off(0.0, 1.0);
    std::uniform_real_distribution<double> diag(-3.0, 0.5);
    for (int i = 0; i < 50; ++i) {
        const int m = dim(rng);
        MatrixXc A(m, m);
        MatrixXc psi(m, m);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                A(r, c) = r == c ? diag(rng) : off(rng);
                psi(r, c) = 0.5 * off(rng);
            }
        }
        const DelayIndependenceReport rep = delay_independence_report(A, psi, r_grid());
        REQUIRE(rep.positivity_regime);
        CHECK(rep.independent);
        for (const auto& row : rep.rows) {
            CHECK(row.sign == rep.undelayed_sign);
            const DelaySystem sys{A, {{psi, row.r}}};
            CHECK(std::abs(adde_char_det(sys, row.root)) <= 1e-10 * (1.0 + std::pow(std::abs(row.root), m)));
        }

        // the root moves continuously to s(A + Psi) as r -> 0
        const DelaySystem tiny{A, {{psi, 1e-6}}};
        CHECK(std::abs(adde_rightmost_real_root(tiny) - rep.undelayed_abscissa) <= 1e-4);
    }
}

TEST_CASE("method of steps")
{
    // no delayed coupling: trapezoidal solution of u' = -u
    const DelaySystem plain = scalar_system(-1.0, 0.0, 0.5);
    const DelayTrajectory t = method_of_steps(plain, [](double) { return VectorXc::Ones(1); }, 2.0, 1e-3);
    CHECK(t.times.size() == 2001);
    double err = 0.0;
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        err = std::max(err, std::abs(t.states[i](0) - std::exp(-t.times[i])));
    }
    CHECK(err <= 1e-6);

    // constant history, u(t) = 1 + ... on [0, r]: compare the first interval with
    // the exact solution of u' = -u + psi
    const DelaySystem sys = scalar_system(-1.0, 0.5, 0.5);
    const DelayTrajectory t1 = method_of_steps(sys, [](double) { return VectorXc::Ones(1); }, 0.5, 1e-3);
    const double exact = 0.5 + 0.5 * std::exp(-0.5);
    CHECK(std::abs(t1.states.back()(0) - exact) <= 1e-6);

    for (double psi : {0.5, 1.5}) {
        const DelaySystem s = scalar_system(-1.0, psi, 0.5);
        const DelayTrajectory tr = method_of_steps(s, [](double) { return VectorXc::Ones(1); }, 20.0, 1e-3);
        std::vector<double> times;
        std::vector<double> logs;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            if (tr.times[i] < 10.0) {
                continue;
            }
            const double x = tr.times[i];
            const double y = std::log(tr.norms[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(std::abs(slope - adde_rightmost_real_root(s)) <= 5e-2);
    }

    CHECK_THROWS_AS(method_of_steps(scalar_system(-1.0, 0.5, 0.5), [](double) { return VectorXc::Ones(1); }, 1.0, 0.3),
                    ValidationError);
    CHECK_THROWS_AS(
        method_of_steps(scalar_system(-1.0, 0.5, 0.5), [](double) { return VectorXc::Ones(1); }, 1.2, 0.3),
        MisalignedDelay);
    CHECK_THROWS_AS(
        method_of_steps(scalar_system(-1.0, 0.5, 0.5), [](double) { return VectorXc::Ones(2); }, 1.0, 0.1),
        ValidationError);
}

TEST_CASE("VIDE roots against the quadratic formula")
{
    std::mt19937_64 rng(62);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int compared = 0;
    for (int i = 0; i < 50; ++i) {
        const double a = u(rng);
        const double c = u(rng);
        const ExpKernel kernel{{{1.0, scalar(c)}}};
        const std::vector<Complex> roots = vide_roots(scalar(a), kernel);
        // (lambda - a)(lambda + 1) - c = lambda^2 + (1 - a) lambda - (a + c)
        for (Complex z : oracle::quadratic_roots(1.0 - a, -(a + c))) {
            if (z.real() > -1.0 + 1e-6) {
                CHECK(nearest(roots, z) <= 1e-12 * (1.0 + std::abs(z)));
                ++compared;
            }
        }
        for (Complex z : roots) {
            CHECK(z.real() > -1.0);
        }
    }
    CHECK(compared >= 50);
}

TEST_CASE("VIDE special cases")
{
    // c = 0: the kernel term drops out except for the removed pole
    const std::vector<Complex> r0 = vide_roots(scalar(-0.5), ExpKernel{{{1.0, scalar(0.0)}}});
    REQUIRE(r0.size() == 1);
    CHECK(std::abs(r0.front() + 0.5) <= 1e-14);

    // diagonal data: the determinant factors into two scalar problems
    MatrixXc A(2, 2);
    A << 0.5, 0.0, 0.0, -2.0;
    MatrixXc C(2, 2);
    C << 1.0, 0.0, 0.0, 0.5;
    const std::vector<Complex> roots = vide_roots(A, ExpKernel{{{2.0, C}}});
    int expected = 0;
    for (auto [a, c] : {std::pair{0.5, 1.0}, std::pair{-2.0, 0.5}}) {
        for (Complex z : oracle::quadratic_roots(2.0 - a, -(2.0 * a + c))) {
            if (z.real() > -2.0) {
                CHECK(nearest(roots, z) <= 1e-12);
                ++expected;
            }
        }
    }
    CHECK(static_cast<int>(roots.size()) == expected);

    CHECK_THROWS_AS(vide_char_det(scalar(0.0), ExpKernel{{{1.0, scalar(1.0)}}}, -1.0), OutsideHalfplane);
    CHECK_THROWS_AS(vide_char_det(scalar(0.0), ExpKernel{{{-1.0, scalar(1.0)}}}, 0.0), ValidationError);
    CHECK_THROWS_AS(vide_char_det(scalar(0.0), ExpKernel{{{1.0, MatrixXc::Ones(2, 2)}}}, 0.0), ValidationError);
}

TEST_CASE("VIDE transform against quadrature")
{
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> rate(0.5, 3.0);
    using boost::math::quadrature::gauss_kronrod;
    for (int inst = 0; inst < 20; ++inst) {
        const int m = 1 + inst % 2;
        MatrixXc A(m, m);
        ExpKernel kernel;
        for (int e = 0; e < m * m; ++e) {
            A(e) = u(rng);
        }
        for (int t = 0; t < 2; ++t) {
            MatrixXc c(m, m);
            for (int e = 0; e < m * m; ++e) {
                c(e) = u(rng);
            }
            kernel.terms.push_back({rate(rng), c});
        }
        const Complex lam(1.0 + u(rng), 2.0 * u(rng));
        const double s_max = 50.0 / kernel.min_rate();

        MatrixXc hat(m, m);
        for (int e = 0; e < m * m; ++e) {
            auto part = [&](bool imag) {
                return gauss_kronrod<double, 61>::integrate(
                    [&](double s) {
                        const Complex v = std::exp(-lam * s) * kernel.value(s)(e);
                        return imag ? v.imag() : v.real();
                    },
                    0.0, s_max, 15, 1e-14);
            };
            hat(e) = Complex(part(false), part(true));
        }
        const Complex quad = (lam * MatrixXc::Identity(m, m) - A - hat).determinant();
        CHECK(std::abs(quad - vide_char_det(A, kernel, lam)) <= 1e-8);
    }
}
