#include "oscmat/spectral.hpp"

#include "oscmat/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscmat {

namespace {

bool near_dirichlet_point(Complex lambda, double k, double radius)
{
    const Complex shifted = lambda + 0.25 * k * k;
    if (shifted.real() > 0.0) {
        return false;
    }
    const double n = std::max(1.0, std::round(std::sqrt(-shifted.real()) / kPi));
    return std::abs(shifted + kPi * kPi * n * n) < radius;
}

double log_abs_g(const EntireCharValue& g)
{
    const double a = std::abs(g.value);
    if (a == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(a) + g.scale_log;
}

double residual_of(const SystemParams& params, Complex lambda)
{
    return std::abs(char_det(params, lambda));
}

double residual_tol(Complex lambda)
{
    return 1e-10 * (1.0 + std::abs(lambda));
}

// Sign of G on the real line; the scale factor is positive.
double real_g(const SystemParams& params, double x)
{
    return entire_char(params, Complex(x, 0.0)).value.real();
}

} // namespace

void SearchWindow::validate() const
{
    const bool finite = std::isfinite(re_min) && std::isfinite(re_max) && std::isfinite(im_min) &&
                        std::isfinite(im_max);
    if (!finite) {
        throw ValidationError("SearchWindow: bounds must be finite");
    }
    if (!(re_min < re_max)) {
        throw ValidationError("SearchWindow: re_min < re_max required");
    }
    if (!(im_min <= im_max)) {
        throw ValidationError("SearchWindow: im_min <= im_max required");
    }
    if (grid_density < 4) {
        throw ValidationError("SearchWindow: grid_density >= 4 required");
    }
}

bool SearchWindow::contains(Complex z, double slack) const
{
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::UES:
        return "UES";
    case Verdict::NotUES:
        return "NotUES";
    case Verdict::Undetermined:
        break;
    }
    return "Undetermined";
}

double sigma_D(const SystemParams& params, int n)
{
    if (n < 1) {
        throw ValidationError("sigma_D: n >= 1 required");
    }
    return -kPi * kPi * n * n - 0.25 * params.k * params.k;
}

Complex refine_root(const SystemParams& params, Complex seed, int max_iter)
{
    Complex z = seed;
    EntireCharValue g = entire_char(params, z);
    double lg = log_abs_g(g);
    for (int it = 0; it < max_iter; ++it) {
        if (g.value == 0.0) {
            break;
        }
        if (g.derivative == 0.0 || !std::isfinite(lg)) {
            throw NoConvergence("refine_root: zero derivative");
        }
        const Complex step = g.value / g.derivative;
        Complex next = z - step;
        EntireCharValue gn = entire_char(params, next);
        double lgn = log_abs_g(gn);
        double damp = 1.0;
        int halvings = 0;
        while (!(lgn < lg) && halvings < 30) {
            damp *= 0.5;
            next = z - damp * step;
            gn = entire_char(params, next);
            lgn = log_abs_g(gn);
            ++halvings;
        }
        const double moved = std::abs(next - z);
        z = next;
        g = gn;
        lg = lgn;
        if (std::abs(z) > 1e6 || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw NoConvergence("refine_root: iterate escaped");
        }
        if (moved <= 1e-14 * (1.0 + std::abs(z))) {
            break;
        }
        if (halvings == 30) {
            break; // stalled at the attainable accuracy
        }
    }
    if (near_dirichlet_point(z, params.k, kDirichletGuard)) {
        throw NoConvergence("refine_root: converged onto the Dirichlet spectrum");
    }
    if (!(residual_of(params, z) <= residual_tol(z))) {
        throw NoConvergence("refine_root: residual above tolerance");
    }
    return z;
}

SpectrumReport find_spectrum(const SystemParams& params, const SearchWindow& window)
{
    params.validate();
    window.validate();
    const bool real_coeffs = params.has_real_coefficients();

    SpectrumReport report;
    std::vector<Complex> found;

    const double h = 1.0 / window.grid_density;
    const int nre = static_cast<int>(std::ceil((window.re_max - window.re_min) / h));
    const int nim = static_cast<int>(std::ceil((window.im_max - window.im_min) / h));
    for (int i = 0; i <= nre; ++i) {
        const double x = std::min(window.re_min + i * h, window.re_max);
        for (int j = 0; j <= nim; ++j) {
            const double y = std::min(window.im_min + j * h, window.im_max);
            // conjugate pairs are recovered from the upper half-plane
            if (real_coeffs && y < 0.0 && window.im_max >= -y) {
                continue;
            }
            Complex seed(x, y);
            if (near_dirichlet_point(seed, params.k, kDirichletGuard)) {
                seed += Complex(0.0, 10.0 * kDirichletGuard);
            }
            try {
                found.push_back(refine_root(params, seed));
            } catch (const NoConvergence&) {
                ++report.dropped_seeds;
            } catch (const SpectrumHit&) {
                ++report.dropped_seeds;
            }
        }
    }

    const double conf = -0.25 * params.k * params.k;
    const Complex q = confluent_quartic(params);
    if (std::abs(q) <= 1e-10 * 16.0 * (1.0 + std::abs(conf))) {
        found.emplace_back(conf, 0.0);
    }

    if (real_coeffs) {
        const std::size_t n = found.size();
        for (std::size_t i = 0; i < n; ++i) {
            Complex& z = found[i];
            if (std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z))) {
                z.imag(0.0);
            } else {
                found.push_back(std::conj(z));
            }
        }
    }

    std::sort(found.begin(), found.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
    for (Complex z : found) {
        if (!window.contains(z, 1e-9)) {
            continue;
        }
        const bool dup = std::any_of(report.roots.begin(), report.roots.end(),
                                     [&](Complex r) { return std::abs(r - z) <= kRootMergeTol; });
        if (!dup) {
            report.roots.push_back(z);
            report.residuals.push_back(residual_of(params, z));
        }
    }

    for (int n = 1;; ++n) {
        const double p = sigma_D(params, n);
        if (p < window.re_min) {
            break;
        }
        if (window.contains(Complex(p, 0.0))) {
            report.dirichlet_points.push_back(p);
        }
    }

    if (!report.roots.empty()) {
        report.spectral_bound = report.roots.front().real();
        report.verdict = verdict_from_bound(report.spectral_bound);
    }
    return report;
}

double default_re_min(double k)
{
    return std::min(-0.25 * k * k - 1.0, -50.0);
}

double real_spectral_bound(const SystemParams& params)
{
    return real_spectral_bound(params, default_re_min(params.k));
}

double real_spectral_bound(const SystemParams& params, double re_min)
{
    params.validate();
    if (!params.has_real_coefficients()) {
        throw NotApplicable("real_spectral_bound: alpha and beta must be real");
    }
    const double k = params.k;
    const double a = params.alpha.real();
    const double b = params.beta.real();
    // Real spectral values lie below the largest eigenvalue of A + B D_0,
    // which this bounds through the Gershgorin discs of the pencil.
    double upper = std::max({a, b, 0.0}) + 0.5 * k + std::exp(0.5 * k) + 1.0;
    if (!(re_min < upper)) {
        throw ValidationError("real_spectral_bound: re_min lies above the scan start");
    }

    const double edge = real_g(params, re_min);
    if (edge == 0.0 || !std::isfinite(edge)) {
        throw WindowTooSmall("real_spectral_bound: characteristic function vanishes or is undefined at re_min");
    }

    constexpr double step = 1e-2;
    double hi = upper;
    double ghi = real_g(params, hi);
    while (hi > re_min) {
        const double lo = std::max(hi - step, re_min);
        const double glo = real_g(params, lo);
        if (ghi == 0.0 && !near_dirichlet_point(Complex(hi), k, kDirichletGuard)) {
            return hi;
        }
        if ((glo < 0.0) != (ghi < 0.0) && ghi != 0.0 && glo != 0.0) {
            double l = lo;
            double r = hi;
            double gl = glo;
            for (int it = 0; it < 200 && r - l > 4e-16 * (1.0 + std::abs(r)); ++it) {
                const double m = 0.5 * (l + r);
                const double gm = real_g(params, m);
                if (gm == 0.0) {
                    l = r = m;
                    break;
                }
                if ((gm < 0.0) == (gl < 0.0)) {
                    l = m;
                    gl = gm;
                } else {
                    r = m;
                }
            }
            const double root = 0.5 * (l + r);
            if (!near_dirichlet_point(Complex(root), k, kDirichletGuard)) {
                return root;
            }
        }
        hi = lo;
        ghi = glo;
    }
    return -std::numeric_limits<double>::infinity();
}

Verdict verdict_from_bound(double bound)
{
    if (std::isnan(bound)) {
        return Verdict::Undetermined;
    }
    if (std::abs(bound) < kVerdictBand) {
        return Verdict::Undetermined;
    }
    return bound < 0.0 ? Verdict::UES : Verdict::NotUES;
}

double boundary_generator_bound(const SystemParams& params)
{
    params.validate();
    const Matrix2c p = pencil(params, Complex(0.0));
    const Complex half_tr = 0.5 * (p(0, 0) + p(1, 1));
    const Complex det = p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
    const Complex root = std::sqrt(half_tr * half_tr - det);
    return std::max((half_tr + root).real(), (half_tr - root).real());
}

bool ues_closed_form(const SystemParams& params)
{
    params.validate();
    if (!params.has_real_coefficients()) {
        throw NotApplicable("ues_closed_form: alpha and beta must be real");
    }
    const double a = params.alpha.real();
    const double b = params.beta.real();
    const double k = params.k;
    if (k == 0.0) {
        return a + b < std::min(2.0, a * b);
    }
    const double e = std::exp(-k);
    const double one_minus_e = -std::expm1(-k);
    // -trace and determinant of A + B D_0
    const double t = k * (1.0 + e) / one_minus_e - a - b;
    const double d = a * b - k * (a * e + b) / one_minus_e;
    return t > 0.0 && d > 0.0;
}

bool ues_chained_inequality(const SystemParams& params)
{
    params.validate();
    if (!params.has_real_coefficients() || params.k <= 0.0) {
        throw NotApplicable("ues_chained_inequality: requires real alpha, beta and k > 0");
    }
    const double a = params.alpha.real();
    const double b = params.beta.real();
    const double k = params.k;
    const double e = std::exp(-k);
    const double mid = k / -std::expm1(-k);
    const double den = b + a * e;
    if (den == 0.0) {
        return false;
    }
    return (a + b) / (1.0 + e) < mid && mid < a * b / den;
}

bool is_contractive(const SystemParams& params)
{
    params.validate();
    const double half = 0.5 * params.k;
    return params.alpha.real() <= half && half <= -params.beta.real();
}

bool is_selfadjoint(const SystemParams& params)
{
    params.validate();
    return params.k == 0.0 && params.has_real_coefficients();
}

bool is_markovian(const SystemParams& params)
{
    params.validate();
    return params.k == 0.0 && params.alpha == 0.0 && params.beta == 0.0;
}

namespace {

double complex_spectral_bound(const SystemParams& params)
{
    const DiscreteOperator op = assemble(params, 128);
    const std::vector<Complex> eig = discrete_spectrum(op);
    double bound = -std::numeric_limits<double>::infinity();
    const std::size_t count = std::min<std::size_t>(eig.size(), 12);
    for (std::size_t i = 0; i < count; ++i) {
        try {
            bound = std::max(bound, refine_root(params, eig[i]).real());
        } catch (const Error&) {
        }
    }
    if (!std::isfinite(bound)) {
        throw NoConvergence("classify: no characteristic root found from discrete seeds");
    }
    return bound;
}

} // namespace

StabilityVerdict classify(const SystemParams& params)
{
    params.validate();
    return classify(params, params.has_real_coefficients() ? StabilityMethod::ClosedForm
                                                           : StabilityMethod::SpectralBound);
}

StabilityVerdict classify(const SystemParams& params, StabilityMethod method)
{
    params.validate();
    StabilityVerdict v;
    v.contractive = is_contractive(params);
    v.selfadjoint = is_selfadjoint(params);
    v.markovian = is_markovian(params);
    if (method == StabilityMethod::ClosedForm && !params.has_real_coefficients()) {
        method = StabilityMethod::SpectralBound;
    }
    v.method = method;
    if (method == StabilityMethod::ClosedForm) {
        v.ues = ues_closed_form(params);
    } else {
        const double bound = params.has_real_coefficients() ? real_spectral_bound(params)
                                                            : complex_spectral_bound(params);
        v.ues = bound < 0.0;
    }
    return v;
}

} // namespace oscmat
