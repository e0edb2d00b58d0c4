#include "nodal/solver.hpp"
#include "nodal/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nodal {

namespace {

std::string describe_rows(const std::vector<int>& row_map, const std::vector<int>& rows) {
    std::ostringstream os;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        os << (k ? ", " : "") << "row " << rows[k] + 1;
        if (rows[k] < static_cast<int>(row_map.size())) os << " (node " << row_map[rows[k]] << ")";
    }
    return os.str();
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs, LinearSolver kind,
                             const std::string& context, const std::vector<int>& row_map) {
    std::vector<int> empty_rows;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        if (M.row(i).cwiseAbs().maxCoeff() == 0.0) empty_rows.push_back(static_cast<int>(i));
    if (!empty_rows.empty())
        throw SolverError("singular system in " + context + ": empty " + describe_rows(row_map, empty_rows));

    Eigen::VectorXd x;
    if (kind == LinearSolver::dense_lu) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        if (!(lu.rcond() > 1e-15)) throw SolverError("singular system in " + context + " (reciprocal condition " + std::to_string(lu.rcond()) + ")");
        x = lu.solve(rhs);
    } else {
        Eigen::SparseMatrix<double> sm = M.sparseView();
        sm.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(sm);
        if (lu.info() != Eigen::Success) throw SolverError("singular system in " + context + ": " + lu.lastErrorMessage());
        x = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw SolverError("sparse solve failed in " + context);
    }
    if (!x.allFinite()) throw SolverError("non-finite solution in " + context);
    return x;
}

Eigen::VectorXd gather(const Eigen::VectorXd& global, const std::vector<int>& row_map) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(row_map.size()));
    for (std::size_t i = 0; i < row_map.size(); ++i) v(static_cast<Eigen::Index>(i)) = global(row_map[i] - 1);
    return v;
}

void scatter(Eigen::VectorXd& global, const Eigen::VectorXd& v, const std::vector<int>& row_map) {
    for (std::size_t i = 0; i < row_map.size(); ++i) global(row_map[i] - 1) = v(static_cast<Eigen::Index>(i));
}

NeighborTemperatures zone_temperatures(const NodalStructure& s, const ZoneInfo& z, const Eigen::VectorXd& global) {
    return {global(s.node(z.air_node).abs_number - 1), global(s.node(z.radiant_node).abs_number - 1)};
}

} // namespace

IntegratorConfig IntegratorConfig::from(const SimulationDefaults& d) {
    IntegratorConfig c;
    c.dt = d.dt;
    c.theta = d.theta;
    c.coupling_tolerance = d.tolerance;
    c.max_coupling_iterations = d.max_iterations;
    c.horizon = d.horizon;
    c.initial_temperature = d.initial_temperature;
    return c;
}

void IntegratorConfig::validate() const {
    if (!(dt > 0)) throw Error("dt must be > 0");
    if (!(theta >= 0.5 && theta <= 1.0)) throw Error("theta must lie in [0.5, 1], got " + std::to_string(theta));
    if (!(coupling_tolerance > 0)) throw Error("coupling tolerance must be > 0");
    if (max_coupling_iterations < 1) throw Error("max coupling iterations must be >= 1");
    if (horizon && !(*horizon >= 0)) throw Error("horizon must be >= 0");
}

bool SimulationResult::all_converged() const {
    return std::all_of(steps.begin(), steps.end(), [](const StepDiagnostics& d) { return d.converged; });
}

double SimulationResult::max_oracle_diff() const {
    double m = 0.0;
    for (double d : oracle_diff) m = std::max(m, d);
    return m;
}

Eigen::VectorXd step_zone(const ZoneStateSystem& sys, const Eigen::VectorXd& T_prev, const IntegratorConfig& cfg) {
    const int n = sys.dim();
    if (sys.A.rows() != n || sys.A.cols() != n || sys.B.size() != n || T_prev.size() != n)
        throw Error("zone '" + sys.zone + "': inconsistent state system dimensions");
    if (!(cfg.dt > 0)) throw Error("dt must be > 0");
    const double theta = cfg.theta;
    const bool algebraic_rows = (sys.C.array() == 0.0).any();
    if (!(theta > 0) && algebraic_rows)
        throw SolverError("zone '" + sys.zone + "': explicit scheme (theta = 0) cannot handle zero-capacity rows");

    const Eigen::VectorXd c_dt = sys.C / cfg.dt;
    Eigen::MatrixXd M = -theta * sys.A;
    M.diagonal() += c_dt;
    Eigen::VectorXd rhs = c_dt.cwiseProduct(T_prev) + (1.0 - theta) * (sys.A * T_prev) + sys.B;
    if (algebraic_rows) {
        for (int i = 0; i < n; ++i) {
            if (sys.C(i) != 0.0) continue;
            M.row(i) = -sys.A.row(i);
            rhs(i) = sys.B(i);
        }
    }
    return solve_linear(M, rhs, cfg.linear_solver, "zone '" + sys.zone + "'", sys.row_map);
}

ZoneModels::ZoneModels(const NodalStructure& s, const FilmCoefficients& f) : s_(s), f_(f) {
    for (const auto& z : s_.zones) {
        auto& e = parts_[z.id] = ElementaryMatrices::zeros(s_.zone_dims.at(z.id));
        e.A_cond = assemble_A_cond(z.id, s_);
        auto in = assemble_interior_exchange(z.id, s_);
        e.A_cvi = std::move(in.A_cvi);
        e.A_lwi = std::move(in.A_lwi);
        e.A_rm = std::move(in.A_rm);
    }
}

void ZoneModels::refresh(const BoundaryInputs& inputs) {
    for (const auto& z : s_.zones) refresh_boundary_vectors(parts_.at(z.id), z.id, s_, f_, inputs);
}

SimulationState initial_state(const NodalStructure& s, double temperature) {
    SimulationState st;
    st.nodes = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(s.size()), temperature);
    for (const auto& z : s.zones) st.zones[z.id] = gather(st.nodes, s.zone_index.at(z.id));
    return st;
}

StepDiagnostics couple_step(ZoneModels& models, SimulationState& state, const IntegratorConfig& cfg) {
    const NodalStructure& s = models.structure();
    const Eigen::VectorXd T_prev = state.nodes;

    BoundaryInputs previous, current;
    for (const auto& z : s.zones) previous.neighbors[z.id] = zone_temperatures(s, z, T_prev);
    current.neighbors = previous.neighbors;

    std::map<std::string, std::vector<std::string>> neighbors;
    for (const auto& z : s.zones) neighbors[z.id] = neighbor_zones(z.id, s);

    Eigen::VectorXd next = T_prev;
    std::map<std::string, Eigen::VectorXd> solutions;
    StepDiagnostics diag;
    diag.converged = false;

    for (int sweep = 1; sweep <= cfg.max_coupling_iterations; ++sweep) {
        std::vector<std::pair<std::string, NeighborTemperatures>> consumed;
        for (const auto& z : s.zones) {
            ElementaryMatrices& parts = models.parts(z.id);
            const auto& row_map = s.zone_index.at(z.id);

            Connexion fresh = assemble_connex(z.id, s, current);
            const Connexion old = assemble_connex(z.id, s, previous);
            // dynamic rows blend neighbor values like the theta scheme does for
            // genuine couplings; algebraic rows use the fresh values only
            for (int i = 0; i < fresh.B_connex.size(); ++i)
                if (s.node(row_map[i]).capacity != 0.0)
                    fresh.B_connex(i) = cfg.theta * fresh.B_connex(i) + (1.0 - cfg.theta) * old.B_connex(i);
            parts.A_connex = std::move(fresh.A_connex);
            parts.B_connex = std::move(fresh.B_connex);
            for (const auto& nb : neighbors.at(z.id)) consumed.emplace_back(nb, current.neighbors.at(nb));

            const ZoneStateSystem sys = compose_state_system(parts, s, z.id);
            Eigen::VectorXd T = step_zone(sys, gather(T_prev, row_map), cfg);
            scatter(next, T, row_map);
            current.neighbors[z.id] = zone_temperatures(s, z, next);
            solutions[z.id] = std::move(T);
        }

        double residual = 0.0;
        for (const auto& [zone, used] : consumed) {
            const auto& latest = current.neighbors.at(zone);
            residual = std::max({residual, std::abs(latest.air - used.air), std::abs(latest.radiant - used.radiant)});
        }
        diag.iterations = sweep;
        diag.residual = residual;
        if (residual < cfg.coupling_tolerance) {
            diag.converged = true;
            break;
        }
    }

    for (const auto& n : s.nodes) {
        if (n.zones.size() < 2) continue;
        const double a = solutions.at(n.zones[0])(n.relative_numbers[0]);
        const double b = solutions.at(n.zones[1])(n.relative_numbers[1]);
        diag.shared_mismatch = std::max(diag.shared_mismatch, std::abs(a - b));
    }

    state.nodes = std::move(next);
    state.zones = std::move(solutions);
    state.time += cfg.dt;
    return diag;
}

GlobalSystem assemble_global(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs) {
    const auto n = static_cast<Eigen::Index>(s.size());
    GlobalSystem g{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};

    std::map<std::string, double> interior_area;
    for (const auto& node : s.nodes)
        if (!node.facing_zone.empty()) interior_area[node.facing_zone] += node.area;

    for (const auto& node : s.nodes) {
        const Eigen::Index k = node.abs_number - 1;
        g.C(k) = node.capacity;
        if (is_zone_node(node.type)) continue;

        for (const auto& l : node.links) {
            g.A(k, l.neighbor - 1) += l.conductance;
            g.A(k, k) -= l.conductance;
        }
        g.A(k, k) -= node.ground_conductance;
        g.B(k) += node.ground_conductance * inputs.T_ground;

        if (is_outdoor_surface(node.type)) {
            g.A(k, k) -= (f.h_ce + f.h_re) * node.area;
            g.B(k) += f.h_ce * node.area * inputs.T_ae + f.h_re * node.area * inputs.T_sky;
            if (auto it = inputs.sw_exterior.find(node.abs_number); it != inputs.sw_exterior.end()) g.B(k) += it->second * node.area;
        }

        if (!node.facing_zone.empty()) {
            const ZoneInfo& z = s.zone(node.facing_zone);
            const Eigen::Index air = z.air_node - 1, rm = z.radiant_node - 1;
            const double hc = node.h_ci * node.area, hr = node.h_ri * node.area;
            g.A(k, k) -= hc + hr;
            g.A(k, air) += hc;
            g.A(k, rm) += hr;
            g.A(air, k) += hc;
            g.A(air, air) -= hc;
            g.A(rm, k) += hr;
            g.A(rm, rm) -= hr;
            const double area = interior_area[node.facing_zone];
            if (area > 0) g.B(k) += inputs.zone(node.facing_zone).sw_interior * node.area / area;
        }
    }

    for (const auto& z : s.zones) {
        const ZoneSolicitation& in = inputs.zone(z.id);
        const Eigen::Index air = z.air_node - 1, rm = z.radiant_node - 1;
        g.A(air, air) -= f.air_specific_heat * in.airflow;
        g.B(air) += f.air_specific_heat * in.airflow * inputs.T_ae + in.gain_convective + in.convective_source;
        g.B(rm) += in.gain_radiant;
    }
    return g;
}

Eigen::VectorXd direct_global_solve(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs,
                                    const IntegratorConfig& cfg, const Eigen::VectorXd& T_prev) {
    GlobalSystem g = assemble_global(s, f, inputs);
    ZoneStateSystem sys;
    sys.zone = "building";
    sys.C = std::move(g.C);
    sys.A = std::move(g.A);
    sys.B = std::move(g.B);
    sys.row_map.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) sys.row_map[i] = static_cast<int>(i) + 1;
    return step_zone(sys, T_prev, cfg);
}

Eigen::VectorXd steady_state(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& inputs, LinearSolver solver) {
    const GlobalSystem g = assemble_global(s, f, inputs);
    std::vector<int> row_map(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) row_map[i] = static_cast<int>(i) + 1;
    return solve_linear(-g.A, g.B, solver, "steady-state system", row_map);
}

SimulationResult simulate(const NodalStructure& s, const FilmCoefficients& f, const WeatherSeries& w, const IntegratorConfig& cfg,
                          const SimulateOptions& opts) {
    cfg.validate();
    if (w.records.empty()) throw Error("empty weather series");

    const double horizon = cfg.horizon.value_or(w.span());
    const auto steps = static_cast<long>(std::floor(horizon / cfg.dt + 1e-9));
    const double t0 = w.start();

    SimulationState state = initial_state(s, cfg.initial_temperature.value_or(w.records.front().T_ae));
    state.time = t0;
    ZoneModels models(s, f);
    Eigen::VectorXd oracle = state.nodes;

    SimulationResult r;
    r.times.push_back(t0);
    r.temperatures.push_back(state.nodes);
    for (long k = 0; k < steps; ++k) {
        // inputs averaged over the step are sampled where the scheme weights them
        const double t_eval = t0 + (static_cast<double>(k) + cfg.theta) * cfg.dt;
        try {
            const Solicitation sol = solicitation_for_step(w, t_eval, s);
            models.refresh(sol.inputs);
            StepDiagnostics d = couple_step(models, state, cfg);
            d.extrapolated = sol.extrapolated;
            if (opts.oracle) {
                oracle = direct_global_solve(s, f, sol.inputs, cfg, oracle);
                r.oracle_diff.push_back((oracle - state.nodes).cwiseAbs().maxCoeff());
            }
            r.steps.push_back(d);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(k + 1) + " (t = " + std::to_string(t_eval) + " s): " + e.what());
        } catch (const IoError&) {
            throw;
        } catch (const Error& e) {
            throw Error("step " + std::to_string(k + 1) + " (t = " + std::to_string(t_eval) + " s): " + e.what());
        }
        state.time = t0 + static_cast<double>(k + 1) * cfg.dt;
        r.times.push_back(state.time);
        r.temperatures.push_back(state.nodes);
    }
    return r;
}

SimulationResult simulate(const BuildingDescription& b, const WeatherSeries& w, const IntegratorConfig& cfg, const SimulateOptions& opts) {
    return simulate(generate_nodes(b), FilmCoefficients::from(b), w, cfg, opts);
}

} // namespace nodal
