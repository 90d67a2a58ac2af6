#pragma once

#include "oscmat/discrete.hpp"

#include <iosfwd>
#include <vector>

namespace oscmat {

enum class Scheme { BackwardEuler, CrankNicolson };

const char* to_string(Scheme s);

struct Trajectory {
    std::vector<double> times;
    std::vector<ProductState> states;
    std::vector<double> norms;      ///< weighted norms
    std::vector<double> min_values; ///< minimum real part over entries
};

/// One implicit scheme applied n = round(T/dt) times, starting from u0 at t = 0.
Trajectory evolve(const DiscreteOperator& op, const ProductState& u0, double T, double dt, Scheme scheme);

/// Least-squares slope of log(norm) over samples with time >= t_start.
/// Returns -inf if a norm in range is zero.
double log_slope(const std::vector<double>& times, const std::vector<double>& norms, double t_start);

double decay_rate(const Trajectory& traj, double t_start);

/// time,norm,min_value,boundary0_re,boundary0_im,boundary1_re,boundary1_im
void write_csv(const Trajectory& traj, std::ostream& out);

struct WaveState {
    ProductState displacement;
    ProductState velocity;
};

/// Implicit trapezoidal rule for u'' = A u, with A the assembled k = 0
/// operator. Negative dt steps backwards with the same step matrix.
class WaveIntegrator {
public:
    WaveIntegrator(const SystemParams& params, int n_interior, double dt);

    void step(VectorXc& u, VectorXc& v) const;

    /// -Re <A u, u>_W + |v|_W^2
    double energy(const VectorXc& u, const VectorXc& v) const;

    const DiscreteOperator& op() const { return op_; }
    double dt() const { return dt_; }

private:
    DiscreteOperator op_;
    double dt_;
    Eigen::PartialPivLU<MatrixXc> lu_;
};

/// f and g are nodal vectors of length N + 2.
std::vector<WaveState> wave_evolve(const SystemParams& params, const VectorXc& f, const VectorXc& g, double T,
                                   double dt);

} // namespace oscmat
