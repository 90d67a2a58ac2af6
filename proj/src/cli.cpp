#include "oscmat/cli.hpp"

#include "oscmat/delay.hpp"
#include "oscmat/discrete.hpp"
#include "oscmat/evolution.hpp"
#include "oscmat/spectral.hpp"
#include "oscmat/structure.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace oscmat::cli {

using nlohmann::json;

namespace {

struct ParamArgs {
    double alpha = 0.0;
    double alpha_im = 0.0;
    double beta = 0.0;
    double beta_im = 0.0;
    double k = 0.0;

    void add(CLI::App* app)
    {
        app->add_option("--alpha", alpha, "boundary coefficient at x = 0 (real part)");
        app->add_option("--alpha-im", alpha_im, "imaginary part of alpha");
        app->add_option("--beta", beta, "boundary coefficient at x = 1 (real part)");
        app->add_option("--beta-im", beta_im, "imaginary part of beta");
        app->add_option("--k", k, "transport coefficient, k >= 0");
    }

    SystemParams get() const
    {
        SystemParams p{{alpha, alpha_im}, {beta, beta_im}, k};
        p.validate();
        return p;
    }
};

json complex_json(Complex z)
{
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json params_json(const SystemParams& p)
{
    return json{{"alpha", complex_json(p.alpha)}, {"beta", complex_json(p.beta)}, {"k", p.k}};
}

json finite_or_null(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

// Writes to the named file, or to `fallback` when the path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback)
    {
        if (path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw ValidationError("cannot open output file " + path);
            }
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

void require_interior(int n)
{
    if (n < 8) {
        throw ValidationError("N >= 8 required");
    }
}

int cmd_spectrum(const ParamArgs& pa, int n, const SearchWindow& window, const std::string& output,
                 std::ostream& out)
{
    const SystemParams p = pa.get();
    require_interior(n);
    window.validate();

    const SpectrumReport rep = find_spectrum(p, window);
    const std::vector<Complex> disc = discrete_spectrum(assemble(p, n));
    const StabilityVerdict cls = classify(p);

    json j;
    j["schema_version"] = 1;
    j["command"] = "spectrum";
    j["params"] = params_json(p);
    j["n"] = n;
    j["window"] = {{"re_min", window.re_min},
                   {"re_max", window.re_max},
                   {"im_min", window.im_min},
                   {"im_max", window.im_max},
                   {"grid_density", window.grid_density}};
    j["roots"] = json::array();
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        json r = complex_json(rep.roots[i]);
        r["residual"] = rep.residuals[i];
        j["roots"].push_back(r);
    }
    j["spectral_bound"] = finite_or_null(rep.spectral_bound);
    j["verdict"] = to_string(rep.verdict);
    j["dirichlet_points"] = rep.dirichlet_points;
    j["dropped_seeds"] = rep.dropped_seeds;

    j["discrete"] = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(5, disc.size()); ++i) {
        json d = complex_json(disc[i]);
        double best = std::numeric_limits<double>::infinity();
        for (Complex r : rep.roots) {
            best = std::min(best, std::abs(r - disc[i]));
        }
        d["pairing_error"] = finite_or_null(best);
        j["discrete"].push_back(d);
    }
    j["classification"] = {{"ues", cls.ues},
                           {"contractive", cls.contractive},
                           {"selfadjoint", cls.selfadjoint},
                           {"markovian", cls.markovian},
                           {"method", cls.method == StabilityMethod::ClosedForm ? "closed_form" : "spectral_bound"}};

    Sink sink(output, out);
    sink.get() << j.dump(2) << '\n';
    return kExitOk;
}

std::vector<double> linspace(double lo, double hi, int count)
{
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    }
    return v;
}

int cmd_stability_map(double k, double a_lo, double a_hi, double b_lo, double b_hi, int points,
                      const std::string& output, std::ostream& out, std::ostream& err)
{
    SystemParams probe{0.0, 0.0, k};
    probe.validate();
    if (points < 1) {
        throw ValidationError("--points >= 1 required");
    }
    if (!(a_lo <= a_hi) || !(b_lo <= b_hi)) {
        throw ValidationError("grid bounds must satisfy min <= max");
    }

    Sink sink(output, out);
    std::ostream& os = sink.get();
    os << "alpha,beta,closed_form_ues,spectral_bound,agree\n" << std::setprecision(17);
    int disagree = 0;
    int disagree_outside = 0;
    int band = 0;
    for (double a : linspace(a_lo, a_hi, points)) {
        for (double b : linspace(b_lo, b_hi, points)) {
            const SystemParams p{a, b, k};
            const bool closed = ues_closed_form(p);
            double bound = 0.0;
            try {
                bound = real_spectral_bound(p);
            } catch (const Error& e) {
                os.flush();
                err << "stability-map: alpha=" << a << " beta=" << b << ": " << e.what() << '\n';
                return kExitNumerical;
            }
            const bool agree = closed == (bound < 0.0);
            const bool in_band = std::abs(boundary_generator_bound(p)) < 1e-6;
            band += in_band;
            disagree += !agree;
            disagree_outside += !agree && !in_band;
            os << a << ',' << b << ',' << int(closed) << ',' << bound << ',' << int(agree) << '\n';
        }
    }
    err << "stability-map: points=" << points * points << " disagreements=" << disagree
        << " band_points=" << band << " disagreements_outside_band=" << disagree_outside << '\n';
    return kExitOk;
}

VectorXc initial_profile(const Grid& g, bool constant)
{
    VectorXc u(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.node(i);
        u(i) = constant ? 1.0 : 1.0 + 0.5 * std::cos(kPi * x);
    }
    return u;
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "be" || s == "backward-euler") {
        return Scheme::BackwardEuler;
    }
    if (s == "cn" || s == "crank-nicolson") {
        return Scheme::CrankNicolson;
    }
    throw ValidationError("--scheme must be be or cn");
}

int cmd_evolve(const ParamArgs& pa, int n, double T, double dt, const std::string& scheme, bool constant,
               const std::string& output, std::ostream& out)
{
    const SystemParams p = pa.get();
    require_interior(n);
    const Scheme s = parse_scheme(scheme);
    if (!(dt > 0.0) || !(T >= dt)) {
        throw ValidationError("dt > 0 and T >= dt required");
    }
    const DiscreteOperator op = assemble(p, n);
    const Trajectory traj = evolve(op, ProductState::from_vector(initial_profile(op.grid(), constant)), T, dt, s);
    Sink sink(output, out);
    write_csv(traj, sink.get());
    return kExitOk;
}

int cmd_wave(const ParamArgs& pa, int n, double T, double dt, const std::string& output, std::ostream& out)
{
    const SystemParams p = pa.get();
    require_interior(n);
    if (p.k != 0.0) {
        throw ValidationError("wave requires k = 0");
    }
    if (!(dt > 0.0) || !(T >= dt)) {
        throw ValidationError("dt > 0 and T >= dt required");
    }
    const Grid g = Grid::make(n);
    VectorXc f(g.size());
    for (int i = 0; i < g.size(); ++i) {
        f(i) = std::sin(kPi * g.node(i)) + 0.25;
    }
    const VectorXc v0 = VectorXc::Zero(g.size());
    const WaveIntegrator integ(p, n, dt);
    const std::vector<WaveState> states = wave_evolve(p, f, v0, T, dt);

    Sink sink(output, out);
    std::ostream& os = sink.get();
    os << "time,energy,displacement_norm,boundary0,boundary1\n" << std::setprecision(17);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const VectorXc u = states[i].displacement.to_vector();
        const VectorXc v = states[i].velocity.to_vector();
        os << i * dt << ',' << integ.energy(u, v) << ',' << weighted_norm(u, integ.op().weights()) << ','
           << u(0).real() << ',' << u(u.size() - 1).real() << '\n';
    }
    return kExitOk;
}

MatrixXc to_matrix(const std::vector<std::vector<double>>& rows)
{
    MatrixXc m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(i, j) = rows[i][j];
        }
    }
    return m;
}

int cmd_delay(const std::string& a_text, const std::string& psi_text, const std::string& sweep, double re_min,
              double simulate_r, double dt, double T, const std::string& output, std::ostream& out)
{
    const MatrixXc A = to_matrix(parse_matrix(a_text));
    const MatrixXc psi = to_matrix(parse_matrix(psi_text));
    if (A.rows() != A.cols() || psi.rows() != A.rows() || psi.cols() != A.cols()) {
        throw ValidationError("--a and --psi must be square matrices of equal size");
    }
    const std::vector<double> rs = parse_range(sweep);
    for (double r : rs) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw ValidationError("delays must satisfy 0 <= r <= 1");
        }
    }

    const DelayIndependenceReport rep = delay_independence_report(A, psi, rs, re_min);
    json j = json::parse(rep.to_json());
    j["command"] = "delay";
    if (simulate_r >= 0.0) {
        const DelaySystem sys{A, {{psi, simulate_r}}};
        const auto hist = [&](double) { return VectorXc::Ones(A.rows()).eval(); };
        const DelayTrajectory traj = method_of_steps(sys, hist, T, dt);
        const double slope = log_slope(traj.times, traj.norms, 0.5 * T);
        const double root = adde_rightmost_real_root(sys, re_min);
        j["simulation"] = {{"r", simulate_r},
                           {"dt", dt},
                           {"T", T},
                           {"log_slope", finite_or_null(slope)},
                           {"rightmost_root", finite_or_null(root)}};
    }
    Sink sink(output, out);
    sink.get() << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_verify(bool quick, std::uint64_t seed, const std::string& output, std::ostream& out)
{
    const std::vector<CheckLine> lines = verify_checks(quick, seed);
    Sink sink(output, out);
    std::ostream& os = sink.get();
    os << "# verify seed=0x" << std::hex << std::uppercase << seed << std::dec << std::nouppercase
       << (quick ? " quick" : " full") << '\n';
    bool ok = true;
    for (const auto& c : lines) {
        os << std::left << std::setw(34) << c.name << ' ' << std::setw(14) << std::setprecision(6) << c.value << ' '
           << std::setw(10) << c.threshold << ' ' << (c.pass ? "PASS" : "FAIL") << '\n';
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitNumerical;
}

} // namespace

std::vector<std::vector<double>> parse_matrix(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::stringstream rs(text);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::vector<double> vals;
        std::stringstream cs(row);
        std::string cell;
        while (std::getline(cs, cell, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw ValidationError("cannot parse matrix entry '" + cell + "'");
            }
            if (cell.find_first_not_of(" \t", pos) != std::string::npos || !std::isfinite(v)) {
                throw ValidationError("cannot parse matrix entry '" + cell + "'");
            }
            vals.push_back(v);
        }
        if (vals.empty() || (!rows.empty() && vals.size() != rows.front().size())) {
            throw ValidationError("matrix rows must be nonempty and of equal length");
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) {
        throw ValidationError("empty matrix");
    }
    return rows;
}

std::vector<double> parse_range(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            parts.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("cannot parse range '" + text + "'");
        }
    }
    if (parts.size() == 1) {
        return parts;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0])) {
        throw ValidationError("range must be start:stop:step with step > 0 and stop >= start");
    }
    std::vector<double> out;
    const long count = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) {
        // round to 12 digits so 0.1*3 prints and compares as 0.3
        out.push_back(std::round((parts[0] + i * parts[2]) * 1e12) / 1e12);
    }
    return out;
}

std::vector<CheckLine> verify_checks(bool quick, std::uint64_t seed)
{
    std::vector<CheckLine> lines;
    auto add = [&](std::string name, double value, double threshold, bool pass) {
        lines.push_back({std::move(name), value, threshold, pass});
    };
    std::mt19937_64 rng(seed);
    const int n = quick ? 64 : 200;

    {
        const int samples = quick ? 100 : 10000;
        int violations = 0;
        double residual = 0.0;
        for (int i = 0; i < samples; ++i) {
            const InverseBlocks b = random_block_instance(rng, i % 2 == 1);
            const OscCheck c = osc_check(b.U, b.V, b.W, b.S);
            violations += !c.consistent();
            residual = std::max(residual, c.factorization_residual);
        }
        add("osc_equivalence_violations", violations, 0.0, violations == 0);
        add("osc_factorization_residual", residual, 1e-8, residual <= 1e-8);
    }
    {
        const int triples = quick ? 5 : 100;
        double worst = 0.0;
        double law = 0.0;
        for (int i = 0; i < triples; ++i) {
            const MatrixXr A = random_stable_matrix(rng, 3);
            const MatrixXr D = random_stable_matrix(rng, 3);
            std::normal_distribution<double> nd;
            MatrixXr L(3, 3);
            for (int e = 0; e < 9; ++e) {
                L(e) = nd(rng);
            }
            worst = std::max(worst, triangular_semigroup_check(A, D, L, 1.0, 512));
            law = std::max(law, semigroup_law_residual(A, D, L, 0.4, 0.6, 512));
        }
        add("triangular_semigroup_formula", worst, 1e-6, worst <= 1e-6);
        add("triangular_semigroup_law", law, 1e-8, law <= 1e-8);
    }
    {
        const double r1 = dirichlet_relation_residual({1.0, -2.0, 1.0}, 1.0, 200);
        const double r2 = dirichlet_relation_residual({1.0, -2.0, 0.0}, -5.0, 200);
        add("dirichlet_relation_lambda1_k1", r1, 1e-3, r1 <= 1e-3);
        add("dirichlet_relation_lambda-5_k0", r2, 1e-3, r2 <= 1e-3);
    }
    {
        const DiscreteOperator op = assemble({1.0, 1.0, 0.0}, n);
        double worst = std::numeric_limits<double>::infinity();
        for (double lam : {1e2, 1e3}) {
            worst = std::min(worst, discrete_resolvent(op, lam).real().minCoeff());
        }
        add("resolvent_positivity_min_entry", worst, -1e-12, worst >= -1e-12);
    }
    {
        std::uniform_real_distribution<double> ud(-3.0, 3.0);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            worst = std::max(worst, weighted_symmetry_defect(assemble({ud(rng), ud(rng), 0.0}, n)));
        }
        add("symmetry_defect_k0", worst, 1e-12, worst <= 1e-12);
        const double transport = weighted_symmetry_defect(assemble({0.0, 0.0, 1.0}, n));
        add("symmetry_defect_k1_lower", transport, 1e-4, transport > 1e-4);
    }
    {
        const DiscreteOperator op = assemble({1.0, -2.0, 1.0}, n);
        const FactorizationResidual f = resolvent_factorization_residual(op, Complex(1.0, 0.5));
        const double v = std::max(f.operator_identity, f.resolvent_formula);
        add("resolvent_factorization", v, 1e-10, v <= 1e-10);
    }
    {
        const double abscissa = numerical_abscissa(assemble({0.4, -0.6, 1.0}, n));
        add("dissipativity_abscissa", abscissa, 1e-8, abscissa <= 1e-8);
        const VectorXc ones = VectorXc::Ones(n + 2);
        const double markov = (assemble({0.0, 0.0, 0.0}, n).matrix() * ones).cwiseAbs().maxCoeff();
        add("markovian_constant_kernel", markov, 1e-13, markov <= 1e-13);
    }
    return lines;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spectral and stability analysis for diffusion-transport systems with dynamical boundary conditions"};
    app.require_subcommand(1);

    ParamArgs pa;
    int n = 256;
    SearchWindow window;
    window.re_min = -50.0;
    std::string output;

    auto* spectrum = app.add_subcommand("spectrum", "characteristic roots and discrete eigenvalues (JSON)");
    pa.add(spectrum);
    spectrum->add_option("--n", n, "interior grid points");
    spectrum->add_option("--re-min", window.re_min);
    spectrum->add_option("--re-max", window.re_max);
    spectrum->add_option("--im-min", window.im_min);
    spectrum->add_option("--im-max", window.im_max);
    spectrum->add_option("--density", window.grid_density, "Newton seeds per unit length");
    spectrum->add_option("-o,--output", output);

    double map_k = 0.0;
    double a_lo = -3.0;
    double a_hi = 3.0;
    double b_lo = -3.0;
    double b_hi = 3.0;
    int points = 41;
    auto* smap = app.add_subcommand("stability-map", "closed-form verdict against the real spectral bound (CSV)");
    smap->add_option("--k", map_k);
    smap->add_option("--alpha-min", a_lo);
    smap->add_option("--alpha-max", a_hi);
    smap->add_option("--beta-min", b_lo);
    smap->add_option("--beta-max", b_hi);
    smap->add_option("--points", points, "grid points per axis");
    smap->add_option("-o,--output", output);

    double T = 1.0;
    double dt = 1e-3;
    std::string scheme = "cn";
    bool constant_ic = false;
    int evolve_n = 64;
    auto* ev = app.add_subcommand("evolve", "time integration of the discretized system (CSV)");
    pa.add(ev);
    ev->add_option("--n", evolve_n);
    ev->add_option("--T", T);
    ev->add_option("--dt", dt);
    ev->add_option("--scheme", scheme, "be or cn");
    ev->add_flag("--constant-ic", constant_ic, "start from the constant state 1");
    ev->add_option("-o,--output", output);

    int wave_n = 200;
    auto* wave = app.add_subcommand("wave", "second-order system with dynamical boundary conditions, k = 0 (CSV)");
    pa.add(wave);
    wave->add_option("--n", wave_n);
    wave->add_option("--T", T);
    wave->add_option("--dt", dt);
    wave->add_option("-o,--output", output);

    std::string a_text = "-1";
    std::string psi_text = "0.5";
    std::string sweep = "0.1:1.0:0.1";
    double re_min = -50.0;
    double simulate_r = -1.0;
    double delay_T = 20.0;
    auto* delay = app.add_subcommand("delay", "delay-independence of stability (JSON)");
    delay->add_option("--a", a_text, "matrix A, rows separated by ';'");
    delay->add_option("--psi", psi_text, "delay matrix Psi");
    delay->add_option("--r-sweep", sweep, "start:stop:step");
    delay->add_option("--re-min", re_min);
    delay->add_option("--simulate", simulate_r, "run the method of steps at this delay");
    delay->add_option("--dt", dt);
    delay->add_option("--T", delay_T);
    delay->add_option("-o,--output", output);

    bool quick = false;
    std::uint64_t seed = kDefaultSeed;
    auto* verify = app.add_subcommand("verify", "run the identity and property checks");
    verify->add_flag("--quick", quick);
    verify->add_option("--seed", seed);
    verify->add_option("-o,--output", output);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    try {
        if (*spectrum) {
            return cmd_spectrum(pa, n, window, output, out);
        }
        if (*smap) {
            return cmd_stability_map(map_k, a_lo, a_hi, b_lo, b_hi, points, output, out, err);
        }
        if (*ev) {
            return cmd_evolve(pa, evolve_n, T, dt, scheme, constant_ic, output, out);
        }
        if (*wave) {
            return cmd_wave(pa, wave_n, T, dt, output, out);
        }
        if (*delay) {
            return cmd_delay(a_text, psi_text, sweep, re_min, simulate_r, dt, delay_T, output, out);
        }
        return cmd_verify(quick, seed, output, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        out.flush();
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace oscmat::cli
