#include "nodal/cli.hpp"
#include "nodal/building.hpp"
#include "nodal/error.hpp"
#include "nodal/format.hpp"
#include "nodal/nodes.hpp"
#include "nodal/solver.hpp"
#include "nodal/weather.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>

namespace nodal {

namespace {

namespace fs = std::filesystem;

struct RunManifest {
    std::string building;
    std::string weather;
    std::optional<double> dt, theta, tolerance, horizon;
    std::optional<int> max_iterations;
    std::string out_dir = ".";
    std::vector<std::string> merges;
    bool oracle = false;
    bool dump_matrices = false;
    bool dump_nodes = false;
    bool allow_nonconverged = false;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

NodalStructure apply_merges(NodalStructure s, const std::vector<std::string>& merges) {
    for (const auto& m : merges) {
        const auto comma = m.find(',');
        if (comma == std::string::npos || m.find(',', comma + 1) != std::string::npos)
            throw Error("--merge expects two zone ids separated by a comma, got '" + m + "'");
        s = merge_zones(s, m.substr(0, comma), m.substr(comma + 1));
    }
    return s;
}

// Loads the building and refuses to go on when it violates invariants.
BuildingDescription load_valid(const std::string& path, std::ostream& err) {
    BuildingDescription b = load_building(path);
    const auto violations = validate(b);
    if (!violations.empty()) {
        for (const auto& v : violations) err << v.entity << ": " << v.rule << '\n';
        throw Error(std::to_string(violations.size()) + " violations in '" + path + "'");
    }
    return b;
}

int cmd_validate(const std::string& path, std::ostream& out) {
    std::vector<Violation> violations;
    try {
        violations = validate(load_building(path));
    } catch (const IoError&) {
        throw;
    } catch (const ReferenceError& e) {
        violations.push_back({e.name(), "reference resolves"});
    } catch (const DuplicateError& e) {
        violations.push_back({e.name(), "unique name"});
    } catch (const ParseError& e) {
        violations.push_back({path, e.what()});
    }
    for (const auto& v : violations) out << v.entity << ": " << v.rule << '\n';
    out << violations.size() << " violations\n";
    return violations.empty() ? exit_ok : exit_domain_error;
}

int cmd_nodes(const std::string& path, const std::vector<std::string>& merges, std::ostream& out, std::ostream& err) {
    const BuildingDescription b = load_valid(path, err);
    out << nodes_csv(apply_merges(generate_nodes(b), merges));
    return exit_ok;
}

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err) {
    const BuildingDescription b = load_valid(m.building, err);
    const WeatherSeries w = load_weather(m.weather, b, parse_interpolation(b.simulation.interpolation));

    IntegratorConfig cfg = IntegratorConfig::from(b.simulation);
    if (m.dt) cfg.dt = *m.dt;
    if (m.theta) cfg.theta = *m.theta;
    if (m.tolerance) cfg.coupling_tolerance = *m.tolerance;
    if (m.max_iterations) cfg.max_coupling_iterations = *m.max_iterations;
    if (m.horizon) cfg.horizon = *m.horizon;
    cfg.validate();

    const NodalStructure s = apply_merges(generate_nodes(b), m.merges);
    const FilmCoefficients f = FilmCoefficients::from(b);

    const fs::path dir(m.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + m.out_dir + "': " + ec.message());

    if (m.dump_nodes) write_file(dir / "nodes.csv", nodes_csv(s));
    if (m.dump_matrices) {
        // elementary parts as assembled for the first step, neighbors at the initial temperature
        const double T0 = cfg.initial_temperature.value_or(w.records.front().T_ae);
        BoundaryInputs inputs = solicitation_for_step(w, w.start() + cfg.theta * cfg.dt, s).inputs;
        for (const auto& z : s.zones) inputs.neighbors[z.id] = {T0, T0};
        fs::create_directories(dir / "matrices");
        for (const auto& z : s.zones) {
            const ElementaryMatrices e = assemble_elementary(z.id, s, f, inputs);
            for (const auto& [name, mat] : e.matrices()) write_file(dir / "matrices" / (z.id + "_" + name + ".csv"), matrix_csv(*mat));
            for (const auto& [name, vec] : e.vectors())
                write_file(dir / "matrices" / (z.id + "_" + name + ".csv"), matrix_csv(Eigen::MatrixXd(*vec)));
            const ZoneStateSystem sys = compose_state_system(e, s, z.id);
            write_file(dir / "matrices" / (z.id + "_C.csv"), matrix_csv(Eigen::MatrixXd(sys.C)));
        }
    }

    const SimulationResult r = simulate(s, f, w, cfg, {m.oracle});

    std::string temps = "t";
    for (const auto& n : s.nodes) temps += ",n" + std::to_string(n.abs_number) + "_" + std::to_string(type_ref(n.type));
    temps += '\n';
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        temps += format_double(r.times[k]);
        for (Eigen::Index i = 0; i < r.temperatures[k].size(); ++i) temps += "," + format_double(r.temperatures[k](i));
        temps += '\n';
    }
    write_file(dir / "temperatures.csv", temps);

    std::string conv = "t,iterations,residual,converged\n";
    std::size_t nonconverged = 0;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const auto& d = r.steps[k];
        nonconverged += d.converged ? 0 : 1;
        conv += format_double(r.times[k + 1]) + "," + std::to_string(d.iterations) + "," + format_double(d.residual) + "," +
                (d.converged ? "1" : "0") + "\n";
    }
    write_file(dir / "convergence.csv", conv);

    if (m.oracle) {
        std::string diff = "t,max_abs_diff\n";
        for (std::size_t k = 0; k < r.oracle_diff.size(); ++k) diff += format_double(r.times[k + 1]) + "," + format_double(r.oracle_diff[k]) + "\n";
        write_file(dir / "oracle_diff.csv", diff);
    }

    out << "steps: " << r.steps.size() << '\n';
    out << "nodes: " << s.size() << '\n';
    out << "non-converged steps: " << nonconverged << '\n';
    if (m.oracle) out << "max oracle diff: " << format_double(r.max_oracle_diff()) << " K\n";
    if (nonconverged > 0 && !m.allow_nonconverged) {
        err << "coupling did not converge on " << nonconverged << " steps\n";
        return exit_domain_error;
    }
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nodal multizone building thermal simulator", "nodalsim"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a building description");
    validate_cmd->add_option("building", validate_path, "Building JSON file")->required();

    std::string nodes_path;
    std::vector<std::string> nodes_merges;
    auto* nodes_cmd = app.add_subcommand("nodes", "Print the nodal structure as CSV");
    nodes_cmd->add_option("building", nodes_path, "Building JSON file")->required();
    nodes_cmd->add_option("--merge", nodes_merges, "Merge two zones, as a,b (repeatable)")->expected(1)->take_all();

    RunManifest m;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation");
    run_cmd->add_option("building", m.building, "Building JSON file")->required();
    run_cmd->add_option("weather", m.weather, "Weather CSV file")->required();
    run_cmd->add_option("--dt", m.dt, "Time step (s)");
    run_cmd->add_option("--theta", m.theta, "Theta of the time scheme, in [0.5, 1]");
    run_cmd->add_option("--tol", m.tolerance, "Coupling tolerance (K)");
    run_cmd->add_option("--max-iter", m.max_iterations, "Maximum coupling sweeps per step");
    run_cmd->add_option("--horizon", m.horizon, "Simulated duration (s)");
    run_cmd->add_option("--merge", m.merges, "Merge two zones, as a,b (repeatable)")->expected(1)->take_all();
    run_cmd->add_option("--out", m.out_dir, "Output directory");
    run_cmd->add_flag("--oracle", m.oracle, "Also run the direct whole-building solve and report differences");
    run_cmd->add_flag("--dump-matrices", m.dump_matrices, "Write elementary matrices per zone");
    run_cmd->add_flag("--dump-nodes", m.dump_nodes, "Write the nodal structure");
    run_cmd->add_flag("--allow-nonconverged", m.allow_nonconverged, "Exit 0 even if some steps did not converge");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return exit_domain_error;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(validate_path, out);
        if (nodes_cmd->parsed()) return cmd_nodes(nodes_path, nodes_merges, out, err);
        if (run_cmd->parsed()) return cmd_run(m, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_domain_error;
    }
    return exit_domain_error;
}

} // namespace nodal
