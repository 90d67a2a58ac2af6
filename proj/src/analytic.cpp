#include "oscmat/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscmat {

namespace {

// exp(z) - 1 without cancellation for small |z|.
Complex cexpm1(Complex z)
{
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    const double re = std::expm1(x) * std::cos(y) - 2.0 * s * s;
    const double im = std::exp(x) * std::sin(y);
    return {re, im};
}

// sinh(z)/z and its z^2-derivative by Taylor series, valid for |z| < 0.5.
// Terms up to z^14 keep the truncation error below 1e-17 there.
void sinhc_series(Complex z2, Complex& value, Complex& dvalue)
{
    // 1/(2n+1)! for n = 0..7
    static constexpr double c[] = {1.0,
                                   1.0 / 6.0,
                                   1.0 / 120.0,
                                   1.0 / 5040.0,
                                   1.0 / 362880.0,
                                   1.0 / 39916800.0,
                                   1.0 / 6227020800.0,
                                   1.0 / 1307674368000.0};
    value = 0.0;
    dvalue = 0.0;
    for (int n = 7; n >= 0; --n) {
        value = value * z2 + c[n];
    }
    for (int n = 7; n >= 1; --n) {
        dvalue = dvalue * z2 + static_cast<double>(n) * c[n];
    }
}

Complex principal_sqrt(Complex z)
{
    return std::sqrt(z);
}

} // namespace

CharRoots char_roots(Complex lambda, double k)
{
    const Complex disc = principal_sqrt(Complex(k * k, 0.0) + 4.0 * lambda);
    CharRoots roots;
    roots.mu1 = 0.5 * (-k + disc);
    roots.mu2 = 0.5 * (-k - disc);
    roots.degenerate = is_confluent(lambda, k);
    return roots;
}

bool is_confluent(Complex lambda, double k)
{
    const double scale = std::max({1.0, std::abs(lambda), k * k});
    return std::abs(k * k + 4.0 * lambda) < kCoalescenceTol * scale;
}

void check_dirichlet_resolvent(Complex lambda, double k)
{
    // sigma(D) = { -pi^2 n^2 - k^2/4 : n >= 1 }
    const Complex shifted = lambda + 0.25 * k * k;
    if (shifted.real() >= 0.0) {
        return;
    }
    const double n = std::round(std::sqrt(-shifted.real()) / kPi);
    if (n < 1.0) {
        return;
    }
    const double point = -kPi * kPi * n * n;
    if (std::abs(shifted - point) <= kSpectrumHitTol * std::max(1.0, std::abs(point))) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " lies on the Dirichlet spectrum (n = " << n << ")";
        throw SpectrumHit(msg.str());
    }
}

Complex dirichlet_apply(const SystemParams& params, Complex lambda, Complex x0, Complex x1, double x)
{
    params.validate();
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError("dirichlet_apply: x must lie in [0, 1]");
    }
    const double k = params.k;
    check_dirichlet_resolvent(lambda, k);

    const double decay = std::exp(-0.5 * k * x);
    if (is_confluent(lambda, k)) {
        return x0 * decay + (x1 * std::exp(0.5 * k) - x0) * x * decay;
    }

    // c1 e^{mu1 x} + c2 e^{mu2 x} with e^{mu1} divided out of numerator and
    // denominator; Re(mu1 - mu2) >= 0 keeps every exponential bounded.
    const CharRoots r = char_roots(lambda, k);
    const Complex den = -cexpm1(r.mu2 - r.mu1);
    const Complex t1 = (x1 - x0 * std::exp(r.mu2)) * std::exp(r.mu1 * (x - 1.0));
    const Complex t2 = (x0 - x1 * std::exp(-r.mu1)) * std::exp(r.mu2 * x);
    return (t1 + t2) / den;
}

Matrix2c feedback_from_roots(Complex mu1, Complex mu2)
{
    // Entries of (9.3) divided by e^{mu1}; with q = e^{mu2 - mu1}:
    //   (mu2 e^{mu1} - mu1 e^{mu2}) / (e^{mu1} - e^{mu2}) = mu1 - delta/(1-q)
    //   (mu2 e^{mu2} - mu1 e^{mu1}) / (e^{mu1} - e^{mu2}) = -mu2 - delta/(1-q)
    const Complex delta = mu1 - mu2;
    const Complex one_minus_q = -cexpm1(-delta);
    if (std::abs(one_minus_q) == 0.0) {
        throw SpectrumHit("feedback matrix: e^{mu1} == e^{mu2}");
    }
    const Complex ratio = delta / one_minus_q;
    Matrix2c m;
    m(0, 0) = mu1 - ratio;
    m(0, 1) = ratio * std::exp(-mu1);
    m(1, 0) = ratio * std::exp(mu2);
    m(1, 1) = -mu2 - ratio;
    return m;
}

Matrix2c feedback_confluent(double k)
{
    Matrix2c m;
    m(0, 0) = -1.0 - 0.5 * k;
    m(0, 1) = std::exp(0.5 * k);
    m(1, 0) = std::exp(-0.5 * k);
    m(1, 1) = -1.0 + 0.5 * k;
    return m;
}

FeedbackMatrix feedback_matrix(const SystemParams& params, Complex lambda)
{
    params.validate();
    check_dirichlet_resolvent(lambda, params.k);
    FeedbackMatrix fb;
    fb.lambda = lambda;
    fb.k = params.k;
    if (is_confluent(lambda, params.k)) {
        fb.entries = feedback_confluent(params.k);
    } else {
        const CharRoots r = char_roots(lambda, params.k);
        fb.entries = feedback_from_roots(r.mu1, r.mu2);
    }
    return fb;
}

Matrix2c pencil(const SystemParams& params, Complex lambda)
{
    Matrix2c p = feedback_matrix(params, lambda).entries;
    p(0, 0) += params.alpha;
    p(1, 1) += params.beta;
    return p;
}

Complex char_det(const SystemParams& params, Complex lambda)
{
    const Matrix2c p = pencil(params, lambda);
    const Complex a = lambda - p(0, 0);
    const Complex d = lambda - p(1, 1);
    return a * d - p(0, 1) * p(1, 0);
}

Complex confluent_quartic(const SystemParams& params)
{
    const double k = params.k;
    const Complex a = params.alpha;
    const Complex b = params.beta;
    return k * k * k * k + 4.0 * k * k * (a + b - 3.0) + 8.0 * k * (a - b) + 16.0 * (a * b - a - b);
}

EntireCharValue entire_char(const SystemParams& params, Complex lambda)
{
    const double k = params.k;
    const Complex alpha = params.alpha;
    const Complex beta = params.beta;

    const Complex z = lambda + 0.25 * k * k; // s^2
    const Complex s = principal_sqrt(z);
    const double re_s = s.real();

    // cosh, sinh, sinh(s)/s and d/dz[sinh(s)/s], all times e^{-Re s}.
    Complex ch;
    Complex shc;
    Complex dshc;
    if (std::abs(s) < 0.5) {
        const Complex ep = std::exp(s - re_s);
        const Complex em = std::exp(-s - re_s);
        ch = 0.5 * (ep + em);
        Complex v;
        Complex dv;
        sinhc_series(z, v, dv);
        const double scale = std::exp(-re_s);
        shc = v * scale;
        dshc = dv * scale;
    } else {
        const Complex ep = std::exp(Complex(0.0, s.imag()));
        const Complex em = std::exp(Complex(-2.0 * re_s, -s.imag()));
        ch = 0.5 * (ep + em);
        const Complex sh = 0.5 * (ep - em);
        shc = sh / s;
        dshc = (ch - shc) / (2.0 * z);
    }

    const Complex p = (lambda - alpha + 0.5 * k) * (lambda - beta - 0.5 * k) + z;
    const Complex dp = 2.0 * lambda - alpha - beta + 1.0;
    const Complex q = 2.0 * lambda - alpha - beta;

    EntireCharValue out;
    out.value = p * shc + q * ch;
    out.derivative = dp * shc + p * dshc + 2.0 * ch + 0.5 * q * shc;
    out.scale_log = re_s;
    return out;
}

} // namespace oscmat
