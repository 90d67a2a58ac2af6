#include "oscmat/evolution.hpp"

#include <Eigen/LU>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace oscmat {

namespace {

int step_count(double T, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt > 0 required");
    }
    if (!(T >= dt) || !std::isfinite(T)) {
        throw ValidationError("T >= dt required");
    }
    return static_cast<int>(std::lround(T / dt));
}

double min_real(const VectorXc& v)
{
    return v.real().minCoeff();
}

} // namespace

const char* to_string(Scheme s)
{
    return s == Scheme::BackwardEuler ? "backward-euler" : "crank-nicolson";
}

Trajectory evolve(const DiscreteOperator& op, const ProductState& u0, double T, double dt, Scheme scheme)
{
    const int steps = step_count(T, dt);
    const int n = op.size();
    VectorXc u = u0.to_vector();
    if (u.size() != n) {
        throw ValidationError("evolve: initial state does not match the grid");
    }

    const MatrixXc id = MatrixXc::Identity(n, n);
    const double theta = scheme == Scheme::BackwardEuler ? 1.0 : 0.5;
    const MatrixXc step_matrix = id - theta * dt * op.matrix();
    Eigen::PartialPivLU<MatrixXc> lu(step_matrix);
    if (!(lu.rcond() >= 1e-12)) {
        throw NearSingular("evolve: step matrix condition estimate exceeds 1e12");
    }
    MatrixXc explicit_part;
    if (scheme == Scheme::CrankNicolson) {
        explicit_part = id + 0.5 * dt * op.matrix();
    }

    Trajectory traj;
    traj.times.reserve(steps + 1);
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(ProductState::from_vector(u));
        traj.norms.push_back(weighted_norm(u, op.weights()));
        traj.min_values.push_back(min_real(u));
    };
    record(0.0);
    for (int j = 1; j <= steps; ++j) {
        const VectorXc rhs = scheme == Scheme::CrankNicolson ? VectorXc(explicit_part * u) : u;
        u = lu.solve(rhs);
        // one refinement sweep keeps fixed points fixed to roundoff
        u += lu.solve(rhs - step_matrix * u);
        record(j * dt);
    }
    return traj;
}

double log_slope(const std::vector<double>& times, const std::vector<double>& norms, double t_start)
{
    if (times.size() != norms.size()) {
        throw ValidationError("log_slope: size mismatch");
    }
    double st = 0.0;
    double sy = 0.0;
    double stt = 0.0;
    double sty = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_start) {
            continue;
        }
        if (!(norms[i] > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        const double y = std::log(norms[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++count;
    }
    if (count < 10) {
        throw ValidationError("log_slope: at least 10 samples after t_start required");
    }
    const double denom = count * stt - st * st;
    return (count * sty - st * sy) / denom;
}

double decay_rate(const Trajectory& traj, double t_start)
{
    return log_slope(traj.times, traj.norms, t_start);
}

void write_csv(const Trajectory& traj, std::ostream& out)
{
    out << "time,norm,min_value,boundary0_re,boundary0_im,boundary1_re,boundary1_im\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& b = traj.states[i].boundary;
        out << traj.times[i] << ',' << traj.norms[i] << ',' << traj.min_values[i] << ',' << b[0].real() << ','
            << b[0].imag() << ',' << b[1].real() << ',' << b[1].imag() << '\n';
    }
}

WaveIntegrator::WaveIntegrator(const SystemParams& params, int n_interior, double dt)
    : op_(assemble(params, n_interior)), dt_(dt)
{
    if (params.k != 0.0) {
        throw ValidationError("wave system requires k = 0");
    }
    if (!(dt != 0.0) || !std::isfinite(dt)) {
        throw ValidationError("wave: dt must be finite and nonzero");
    }
    const int n = op_.size();
    lu_.compute(MatrixXc::Identity(n, n) - 0.25 * dt * dt * op_.matrix());
    if (!(lu_.rcond() >= 1e-12)) {
        throw NearSingular("wave: step matrix condition estimate exceeds 1e12");
    }
}

void WaveIntegrator::step(VectorXc& u, VectorXc& v) const
{
    const MatrixXc& a = op_.matrix();
    const VectorXc au = a * u;
    const VectorXc next_u = lu_.solve(u + dt_ * v + 0.25 * dt_ * dt_ * au);
    v += 0.5 * dt_ * (au + a * next_u);
    u = next_u;
}

double WaveIntegrator::energy(const VectorXc& u, const VectorXc& v) const
{
    const Complex form = u.dot(op_.stiffness() * u); // conjugates u
    return -form.real() + std::pow(weighted_norm(v, op_.weights()), 2);
}

std::vector<WaveState> wave_evolve(const SystemParams& params, const VectorXc& f, const VectorXc& g, double T,
                                   double dt)
{
    const int steps = step_count(T, dt);
    if (f.size() != g.size()) {
        throw ValidationError("wave_evolve: f and g must have equal length");
    }
    const WaveIntegrator integ(params, static_cast<int>(f.size()) - 2, dt);
    VectorXc u = f;
    VectorXc v = g;
    std::vector<WaveState> out;
    out.reserve(steps + 1);
    out.push_back({ProductState::from_vector(u), ProductState::from_vector(v)});
    for (int j = 0; j < steps; ++j) {
        integ.step(u, v);
        out.push_back({ProductState::from_vector(u), ProductState::from_vector(v)});
    }
    return out;
}

} // namespace oscmat
