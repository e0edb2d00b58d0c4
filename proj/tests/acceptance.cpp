// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace nodal;
using nodal::testing::boundary_balance;
using nodal::testing::bundled_fixtures;
using nodal::testing::load_fixture;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IntegratorConfig config(double dt, double theta, double tol) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.theta = theta;
    cfg.coupling_tolerance = tol;
    cfg.max_coupling_iterations = 500;
    return cfg;
}

// Every flux channel the building accepts, set to fixed values.
WeatherRecord loaded_record(const BuildingDescription& b, double t, double T_ae, double T_sky, double T_ground) {
    WeatherRecord r{t, T_ae, T_sky, T_ground, {}};
    for (const auto& w : b.walls)
        if (w.side1.kind == BoundaryRef::Kind::exterior || w.side2.kind == BoundaryRef::Kind::exterior) r.channels["sw_" + w.name] = 180.0;
    for (const auto& g : b.windows)
        if (g.side1.kind == BoundaryRef::Kind::exterior || g.side2.kind == BoundaryRef::Kind::exterior) r.channels["sw_" + g.name] = 90.0;
    for (const auto& z : b.zones) {
        r.channels["swi_" + z.id] = 60.0;
        r.channels["gain_" + z.gain_channel()] = 250.0;
    }
    return r;
}

Outcome fixture_reproduction() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = generate_nodes(load_fixture("two_zone_unit.json"));
    o.check(s.size() == 18, "18 nodes");
    o.check(s.zone_dims.at("z1") == 10 && s.zone_dims.at("z2") == 10, "dims 10 and 10");
    for (const auto& n : s.nodes) o.check((n.zones.size() == 2) == (n.abs_number == 7 || n.abs_number == 8), "shared nodes 7 and 8");

    const double K = 0.5;
    Eigen::MatrixXd reference = Eigen::MatrixXd::Zero(10, 10);
    for (int i = 0; i < 8; i += 2) reference.block(i, i, 2, 2) << -K, K, K, -K;
    o.check(assemble_A_cond("z1", s) == reference, "A_cond entry-for-entry");

    BoundaryInputs in = nodal::testing::uniform_inputs(s, 0.0);
    const double T17 = 23.0, T18 = 21.5, h_ci = 3.0, h_ri = 5.0;
    in.neighbors["z2"] = {T17, T18};
    const auto c = assemble_connex("z1", s, in);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(10, 10);
    A(7, 7) = -(h_ci + h_ri);
    Eigen::VectorXd B = Eigen::VectorXd::Zero(10);
    B(7) = h_ci * T17 + h_ri * T18;
    o.check(c.A_connex == A, "A_connex single diagonal entry");
    o.check(c.B_connex == B, "B_connex entry");
    const double dt = seconds_since(t0);
    o.check(dt < 1.0, "runtime < 1 s");
    o.detail << " runtime " << dt << " s";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto b = load_fixture("two_zone.json");
    auto w = nodal::testing::sine_weather(48, 600, 12, 8);
    // asymmetric loads so that heat actually crosses the partition
    const double pi = std::acos(-1.0);
    for (auto& rec : w.records) {
        const double sun = std::max(0.0, std::sin(2 * pi * (rec.t / 86400.0 - 0.25)));
        rec.channels = {{"sw_south1", 450 * sun}, {"swi_z1", 120 * sun}, {"gain_z2", 300.0}};
    }
    auto cfg = config(600, 1.0, 1e-6);
    cfg.horizon = 48 * 3600.0;
    const auto r = simulate(b, w, cfg, {true});
    const double dt = seconds_since(t0);
    o.check(r.steps.size() == 288, "288 steps");
    o.check(r.all_converged(), "all steps converged");
    o.check(r.max_oracle_diff() <= 1e-5, "max diff <= 1e-5 K");
    o.check(dt < 5.0, "runtime < 5 s");
    o.detail << " max |iterative - direct| " << r.max_oracle_diff() << " K, runtime " << dt << " s";
    return o;
}

Outcome steady_state_correctness() {
    Outcome o;
    double worst = 0.0, worst_uniform = 0.0;
    for (const auto& name : bundled_fixtures()) {
        const auto b = load_fixture(name);
        const auto s = generate_nodes(b);
        const auto f = FilmCoefficients::from(b);

        WeatherSeries w;
        w.records.push_back(loaded_record(b, 0.0, 4.0, -6.0, 10.0));
        auto cfg = config(86400.0, 1.0, 1e-11);
        cfg.horizon = 365 * 86400.0;
        cfg.initial_temperature = 20.0;
        const auto r = simulate(s, f, w, cfg);
        const auto Ts = steady_state(s, f, solicitation_for_step(w, 0.0, s).inputs);
        const double d = (r.temperatures.back() - Ts).cwiseAbs().maxCoeff();
        worst = std::max(worst, d);
        o.check(d <= 1e-6, name + " terminal vs steady");

        const double Tstar = 15.0;
        const auto wu = constant_weather(Tstar, Tstar, Tstar);
        cfg.horizon = 10 * 86400.0;
        cfg.initial_temperature = Tstar;
        const auto ru = simulate(s, f, wu, cfg);
        const auto Tu = steady_state(s, f, solicitation_for_step(wu, 0.0, s).inputs);
        const double du = std::max((ru.temperatures.back().array() - Tstar).abs().maxCoeff(), (Tu.array() - Tstar).abs().maxCoeff()) / Tstar;
        worst_uniform = std::max(worst_uniform, du);
        o.check(du <= 1e-10, name + " uniform field");
    }
    o.detail << " max terminal-vs-steady " << worst << " K, uniform relative deviation " << worst_uniform;
    return o;
}

Outcome analytic_wall() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double L = 0.2, lambda = 1.0, rho = 2000.0, c = 1000.0;
    const double alpha = lambda / (rho * c), tau = L * L / alpha;
    BuildingDescription b;
    b.materials = {{"slab", lambda, rho, c}};
    b.zones = {{"z", 30, 0.5, 3, 5}};
    const WallSpec wall{"w", 1.0, {{"slab", L}}, BoundaryRef::exterior(), BoundaryRef::of_zone("z"), Orientation::vertical,
                        ConductionModel::nodes(20)};
    const auto chain = discretize_wall(wall, b);
    const int m = static_cast<int>(chain.capacities.size()) - 2;

    // Dirichlet surfaces: side 1 stepped to 1, side 2 held at 0; the
    // internal nodes form the state.
    ZoneStateSystem sys;
    sys.zone = "slab";
    sys.C = Eigen::VectorXd::Zero(m);
    sys.A = Eigen::MatrixXd::Zero(m, m);
    sys.B = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        sys.C(i) = chain.capacities[static_cast<std::size_t>(i + 1)];
        const double kl = chain.conductances[static_cast<std::size_t>(i)], kr = chain.conductances[static_cast<std::size_t>(i + 1)];
        sys.A(i, i) = -(kl + kr);
        if (i > 0) sys.A(i, i - 1) = kl;
        if (i < m - 1) sys.A(i, i + 1) = kr;
        sys.row_map.push_back(i + 2);
    }
    sys.B(0) = chain.conductances[0] * 1.0;

    const double pi = std::acos(-1.0);
    auto analytic_mid = [&](double t) {
        double v = 0.5;
        for (int n = 1; n <= 401; n += 2) v -= 2.0 / (n * pi) * std::sin(n * pi / 2) * std::exp(-n * n * pi * pi * t / tau);
        return v;
    };
    // nodes sit at x = i L / (m + 1); the mid-plane lies halfway between the two central ones
    auto numeric_mid = [&](const Eigen::VectorXd& T) { return 0.5 * (T(m / 2 - 1) + T(m / 2)); };

    const int steps_per_tau = 20000;
    auto cfg = config(tau / steps_per_tau, 1.0, 1e-6);
    Eigen::VectorXd T = Eigen::VectorXd::Zero(m);
    int k = 0;
    double worst = 0.0;
    for (double f : {0.1, 0.5, 1.0}) {
        const int target = static_cast<int>(std::lround(f * steps_per_tau));
        for (; k < target; ++k) T = step_zone(sys, T, cfg);
        const double a = analytic_mid(f * tau), n = numeric_mid(T);
        const double rel = std::abs(n - a) / std::abs(a);
        worst = std::max(worst, rel);
        o.check(rel <= 0.02, "t = " + std::to_string(f) + " tau");
        o.detail << " t=" << f << "tau: numeric " << n << " analytic " << a << ";";
    }
    const double dt = seconds_since(t0);
    o.check(dt < 5.0, "runtime < 5 s");
    o.detail << " worst relative error " << worst << ", runtime " << dt << " s";
    return o;
}

double fitted_slope(double theta) {
    const double C = 1.0e5, K = 10.0, Ts = 1.0, T0 = 0.0, tau = C / K, t_end = tau;
    ZoneStateSystem sys;
    sys.zone = "rc";
    sys.C = Eigen::VectorXd::Constant(1, C);
    sys.A = Eigen::MatrixXd::Constant(1, 1, -K);
    sys.B = Eigen::VectorXd::Constant(1, K * Ts);
    sys.row_map = {1};
    std::vector<double> x, y;
    for (int n : {10, 20, 40, 80, 160}) {
        const auto cfg = config(t_end / n, theta, 1e-6);
        Eigen::VectorXd T = Eigen::VectorXd::Constant(1, T0);
        for (int k = 0; k < n; ++k) T = step_zone(sys, T, cfg);
        const double exact = Ts + (T0 - Ts) * std::exp(-t_end / tau);
        x.push_back(std::log(t_end / n));
        y.push_back(std::log(std::abs(T(0) - exact)));
    }
    const double N = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (N * sxy - sx * sy) / (N * sxx - sx * sx);
}

Outcome scheme_order() {
    Outcome o;
    const double s1 = fitted_slope(1.0), s2 = fitted_slope(0.5);
    o.check(std::abs(s1 - 1.0) <= 0.3, "theta=1 slope");
    o.check(std::abs(s2 - 2.0) <= 0.3, "theta=0.5 slope");
    o.detail << " slope theta=1: " << s1 << ", theta=0.5: " << s2;
    return o;
}

Outcome invariant_suite() {
    Outcome o;
    double worst_balance = 0.0, worst_mismatch = 0.0, worst_excursion = 0.0;
    for (const auto& name : bundled_fixtures()) {
        const auto b = load_fixture(name);
        const auto s = generate_nodes(b);
        const auto f = FilmCoefficients::from(b);

        WeatherSeries loaded;
        loaded.records.push_back(loaded_record(b, 0.0, 4.0, -6.0, 10.0));
        const auto inputs = solicitation_for_step(loaded, 0.0, s).inputs;

        // sign pattern on every zone
        BoundaryInputs zi = inputs;
        for (const auto& z : s.zones) zi.neighbors[z.id] = {18.0, 17.0};
        bool signs = true;
        for (const auto& z : s.zones) {
            const auto sys = compose_state_system(assemble_elementary(z.id, s, f, zi), s, z.id);
            for (Eigen::Index i = 0; i < sys.dim(); ++i)
                for (Eigen::Index j = 0; j < sys.dim(); ++j) signs = signs && (i == j ? sys.A(i, j) <= 0 : sys.A(i, j) >= 0);
        }
        o.check(signs, name + " M-matrix sign pattern");

        // link symmetry
        bool symmetric = true;
        for (const auto& n : s.nodes)
            for (const auto& l : n.links) {
                int back = 0;
                for (const auto& r : s.node(l.neighbor).links) back += (r.neighbor == n.abs_number && r.conductance == l.conductance);
                symmetric = symmetric && back == 1;
            }
        o.check(symmetric, name + " link symmetry");

        // capacity and resistance additivity per wall
        bool additive = true;
        for (const auto& w : b.walls) {
            const auto rc = wall_rc_parameters(w, b);
            double C = 0.0, R = 0.0;
            for (const auto& n : s.nodes) {
                if (n.parent != w.name) continue;
                C += n.capacity;
                for (const auto& l : n.links)
                    if (l.neighbor > n.abs_number && s.node(l.neighbor).parent == w.name) R += 1.0 / l.conductance;
            }
            additive = additive && std::abs(C - rc.capacitance) <= 1e-12 * rc.capacitance && std::abs(R - rc.resistance) <= 1e-12 * rc.resistance;
        }
        o.check(additive, name + " capacity/resistance additivity");

        // discrete maximum principle, theta = 1, no flux sources
        const auto w = nodal::testing::sine_weather(48, 1800, 6, 9);
        auto cfg = config(600, 1.0, 1e-8);
        cfg.initial_temperature = 20.0;
        const auto r = simulate(s, f, w, cfg);
        double lo = 20.0, hi = 20.0;
        for (const auto& rec : w.records) {
            lo = std::min({lo, rec.T_ae, rec.T_sky, rec.T_ground});
            hi = std::max({hi, rec.T_ae, rec.T_sky, rec.T_ground});
        }
        for (const auto& T : r.temperatures) worst_excursion = std::max({worst_excursion, lo - T.minCoeff(), T.maxCoeff() - hi});
        o.check(worst_excursion <= 1e-9, name + " maximum principle");

        // recovery-place consistency
        cfg.coupling_tolerance = 1e-6;
        WeatherSeries lw = w;
        for (auto& rec : lw.records) rec.channels = loaded_record(b, 0, 0, 0, 0).channels;
        const auto rl = simulate(s, f, lw, cfg);
        bool consistent = rl.all_converged();
        for (const auto& d : rl.steps) {
            consistent = consistent && d.shared_mismatch < cfg.coupling_tolerance;
            worst_mismatch = std::max(worst_mismatch, d.shared_mismatch);
        }
        o.check(consistent, name + " recovery-place consistency");

        // steady-state energy balance, flows computed from node records
        const auto T = steady_state(s, f, inputs);
        const auto bal = boundary_balance(s, f, inputs, T);
        const double rel = std::abs(bal.net) / bal.largest;
        worst_balance = std::max(worst_balance, rel);
        o.check(rel <= 1e-8, name + " energy balance");
    }
    o.detail << " worst balance " << worst_balance << " (relative), worst shared mismatch " << worst_mismatch
             << " K, worst bound excursion " << worst_excursion << " K";
    return o;
}

Outcome merge_sanity() {
    Outcome o;
    const auto b = load_fixture("two_zone.json");
    const auto s = generate_nodes(b);
    const auto merged = merge_zones(s, "z1", "z2");
    const auto f = FilmCoefficients::from(b);

    auto w = nodal::testing::sine_weather(48, 1800, 10, 8);
    const double pi = std::acos(-1.0);
    for (auto& rec : w.records) {
        const double sun = std::max(0.0, std::sin(2 * pi * (rec.t / 86400.0 - 0.25)));
        rec.channels = {{"sw_north1", 150 * sun}, {"sw_north2", 150 * sun}, {"sw_south1", 400 * sun}, {"sw_south2", 400 * sun},
                        {"swi_z1", 80 * sun},     {"swi_z2", 80 * sun},     {"gain_z1", 200.0},       {"gain_z2", 200.0}};
    }
    auto cfg = config(600, 1.0, 1e-10);
    cfg.initial_temperature = 18.0;
    const auto r = simulate(s, f, w, cfg);
    const auto rm = simulate(merged, f, w, cfg);
    const int a1 = s.zone("z1").air_node - 1, a2 = s.zone("z2").air_node - 1, am = merged.zones[0].air_node - 1;
    double worst = 0.0;
    for (std::size_t k = 0; k < r.temperatures.size(); ++k) {
        worst = std::max({worst, std::abs(rm.temperatures[k](am) - r.temperatures[k](a1)), std::abs(rm.temperatures[k](am) - r.temperatures[k](a2))});
    }
    o.check(r.temperatures.size() == rm.temperatures.size(), "same step count");
    o.check(worst <= 1e-6, "merged air within 1e-6 K");
    o.detail << " max |merged - original| air " << worst << " K over " << r.steps.size() << " steps";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 fixture reproduction", fixture_reproduction}, {"2 oracle equivalence", oracle_equivalence},
        {"3 steady-state correctness", steady_state_correctness}, {"4 analytic wall benchmark", analytic_wall},
        {"5 scheme order", scheme_order},               {"6 invariant suite", invariant_suite},
        {"7 zone-merge sanity", merge_sanity}};
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s criterion %s:%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
