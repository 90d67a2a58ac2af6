#pragma once

#include "oscmat/analytic.hpp"

#include <limits>
#include <vector>

namespace oscmat {

struct SearchWindow {
    double re_min = -50.0;
    double re_max = 5.0;
    double im_min = -10.0;
    double im_max = 10.0;
    int grid_density = 4; ///< seeds per unit length

    void validate() const;
    bool contains(Complex z, double slack = 0.0) const;
};

enum class Verdict { UES, NotUES, Undetermined };

const char* to_string(Verdict v);

struct SpectrumReport {
    std::vector<Complex> roots;   ///< sorted by descending real part
    std::vector<double> residuals; ///< |char_det| at each root
    double spectral_bound = -std::numeric_limits<double>::infinity();
    Verdict verdict = Verdict::Undetermined;
    std::vector<double> dirichlet_points; ///< points of sigma(D) inside the window
    int dropped_seeds = 0;                ///< seeds whose Newton iteration failed
};

enum class StabilityMethod { ClosedForm, SpectralBound };

struct StabilityVerdict {
    bool ues = false;
    bool contractive = false;
    bool selfadjoint = false;
    bool markovian = false;
    StabilityMethod method = StabilityMethod::ClosedForm;
};

/// Verdicts within this distance of zero spectral bound are Undetermined.
inline constexpr double kVerdictBand = 1e-9;

/// Newton seeds approaching a Dirichlet eigenvalue closer than this are dropped.
inline constexpr double kDirichletGuard = 1e-6;

/// Roots closer than this are merged.
inline constexpr double kRootMergeTol = 1e-8;

/// n-th Dirichlet eigenvalue -pi^2 n^2 - k^2/4, n >= 1.
double sigma_D(const SystemParams& params, int n);

/// All zeros of char_det inside the window, by grid-seeded damped Newton.
SpectrumReport find_spectrum(const SystemParams& params, const SearchWindow& window);

/// Newton polish of a single seed; throws NoConvergence on failure.
Complex refine_root(const SystemParams& params, Complex seed, int max_iter = 100);

double default_re_min(double k);

/// Largest real zero of char_det on [re_min, inf) for real alpha, beta.
/// Returns -inf when there is none.
double real_spectral_bound(const SystemParams& params, double re_min);
double real_spectral_bound(const SystemParams& params);

Verdict verdict_from_bound(double bound);

/// Largest eigenvalue of A + B D_0 (real alpha, beta). Its sign is the
/// stability criterion; its magnitude measures distance to the criterion
/// boundary.
double boundary_generator_bound(const SystemParams& params);

/// Closed-form uniform exponential stability test for real alpha, beta:
///   k = 0: alpha + beta < min(2, alpha beta)
///   k > 0: trace and determinant of A + B D_0 negative resp. positive.
/// Throws NotApplicable for complex coefficients.
bool ues_closed_form(const SystemParams& params);

/// (alpha+beta)/(1+e^-k) < k/(1-e^-k) < alpha beta/(beta + alpha e^-k), the
/// chained inequality form. Agrees with ues_closed_form only when
/// beta + alpha e^-k > 0.
bool ues_chained_inequality(const SystemParams& params);

/// Re alpha <= k/2 <= -Re beta
bool is_contractive(const SystemParams& params);

/// k == 0 and alpha, beta real
bool is_selfadjoint(const SystemParams& params);

/// k == alpha == beta == 0
bool is_markovian(const SystemParams& params);

/// Flags for all four properties. The ues flag uses the closed form when
/// alpha and beta are real, the spectral bound otherwise.
StabilityVerdict classify(const SystemParams& params);
StabilityVerdict classify(const SystemParams& params, StabilityMethod method);

} // namespace oscmat
