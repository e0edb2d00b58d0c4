#include "nodal/building.hpp"
#include "nodal/error.hpp"
#include "nodal/nodes.hpp"
#include "nodal/solver.hpp"
#include "nodal/weather.hpp"

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace py::literals;
using namespace nodal;

namespace {

// Temperatures as a (steps + 1, nodes) array.
Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows) {
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t k = 0; k < rows.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    return m;
}

std::vector<std::pair<std::string, std::string>> violations(const BuildingDescription& b) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate(b)) out.emplace_back(v.entity, v.rule);
    return out;
}

} // namespace

PYBIND11_MODULE(nodalsim, m) {
    m.doc() = "Nodal multizone building thermal simulator";

    auto error = py::register_exception<Error>(m, "NodalError");
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<ReferenceError>(m, "ReferenceError", error.ptr());
    py::register_exception<DuplicateError>(m, "DuplicateError", error.ptr());
    py::register_exception<SolverError>(m, "SolverError", error.ptr());

    py::class_<BuildingDescription>(m, "Building")
        .def_property_readonly("zones", [](const BuildingDescription& b) {
            std::vector<std::string> ids;
            for (const auto& z : b.zones) ids.push_back(z.id);
            return ids;
        })
        .def_property_readonly("walls", [](const BuildingDescription& b) {
            std::vector<std::string> names;
            for (const auto& w : b.walls) names.push_back(w.name);
            return names;
        })
        .def_property_readonly("windows", [](const BuildingDescription& b) {
            std::vector<std::string> names;
            for (const auto& w : b.windows) names.push_back(w.name);
            return names;
        })
        .def("validate", &violations, "List of (entity, rule) violations; empty when valid")
        .def("serialize", &serialize_building)
        .def("wall_rc", [](const BuildingDescription& b, const std::string& name) {
            const WallSpec* w = b.find_wall(name);
            if (!w) throw ReferenceError(name, "wall_rc");
            const auto rc = wall_rc_parameters(*w, b);
            return py::make_tuple(rc.resistance, rc.capacitance);
        }, "name"_a, "(R_total K/W, C_total J/K) of a wall")
        .def(py::self == py::self);

    m.def("load_building", &load_building, "path"_a);
    m.def("parse_building", [](const std::string& text) { return parse_building(text); }, "text"_a);

    py::class_<NodalStructure>(m, "NodalStructure")
        .def("__len__", &NodalStructure::size)
        .def_property_readonly("zones", [](const NodalStructure& s) {
            std::vector<std::string> ids;
            for (const auto& z : s.zones) ids.push_back(z.id);
            return ids;
        })
        .def_property_readonly("types", [](const NodalStructure& s) {
            std::vector<int> t;
            for (const auto& n : s.nodes) t.push_back(type_ref(n.type));
            return t;
        })
        .def_property_readonly("capacities", [](const NodalStructure& s) {
            std::vector<double> c;
            for (const auto& n : s.nodes) c.push_back(n.capacity);
            return c;
        })
        .def("node_zones", [](const NodalStructure& s, int abs_number) { return s.node(abs_number).zones; }, "abs_number"_a)
        .def("zone_nodes", [](const NodalStructure& s, const std::string& zone) { return s.zone_index.at(zone); }, "zone"_a,
             "Absolute numbers of a zone's state, in row order")
        .def("air_node", [](const NodalStructure& s, const std::string& zone) { return s.zone(zone).air_node; }, "zone"_a)
        .def("radiant_node", [](const NodalStructure& s, const std::string& zone) { return s.zone(zone).radiant_node; }, "zone"_a)
        .def("to_csv", &nodes_csv);

    m.def("generate_nodes", &generate_nodes, "building"_a);
    m.def("merge_zones", &merge_zones, "structure"_a, "a"_a, "b"_a);

    py::class_<WeatherSeries>(m, "WeatherSeries")
        .def("__len__", [](const WeatherSeries& w) { return w.records.size(); })
        .def_property_readonly("start", &WeatherSeries::start)
        .def_property_readonly("span", &WeatherSeries::span)
        .def("at", [](const WeatherSeries& w, double t) {
            const auto s = w.at(t);
            py::dict d;
            d["t"] = s.record.t;
            d["T_ae"] = s.record.T_ae;
            d["T_sky"] = s.record.T_sky;
            d["T_ground"] = s.record.T_ground;
            for (const auto& [k, v] : s.record.channels) d[py::str(k)] = v;
            d["extrapolated"] = s.extrapolated;
            return d;
        }, "t"_a);

    m.def("load_weather", [](const std::string& path, const BuildingDescription& b, const std::string& mode) {
        return load_weather(path, b, parse_interpolation(mode));
    }, "path"_a, "building"_a, "mode"_a = "linear");
    m.def("parse_weather", [](const std::string& text, const BuildingDescription& b, const std::string& mode) {
        return parse_weather(text, b, parse_interpolation(mode));
    }, "text"_a, "building"_a, "mode"_a = "linear");
    m.def("constant_weather", &constant_weather, "T_ae"_a, "T_sky"_a, "T_ground"_a);

    py::enum_<LinearSolver>(m, "LinearSolver").value("dense_lu", LinearSolver::dense_lu).value("sparse_lu", LinearSolver::sparse_lu);

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_static("from_building", [](const BuildingDescription& b) { return IntegratorConfig::from(b.simulation); }, "building"_a)
        .def_readwrite("dt", &IntegratorConfig::dt)
        .def_readwrite("theta", &IntegratorConfig::theta)
        .def_readwrite("coupling_tolerance", &IntegratorConfig::coupling_tolerance)
        .def_readwrite("max_coupling_iterations", &IntegratorConfig::max_coupling_iterations)
        .def_readwrite("linear_solver", &IntegratorConfig::linear_solver)
        .def_readwrite("horizon", &IntegratorConfig::horizon)
        .def_readwrite("initial_temperature", &IntegratorConfig::initial_temperature)
        .def("validate", &IntegratorConfig::validate);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_property_readonly("times", [](const SimulationResult& r) { return r.times; })
        .def_property_readonly("temperatures", [](const SimulationResult& r) { return stack(r.temperatures); })
        .def_property_readonly("iterations", [](const SimulationResult& r) {
            std::vector<int> v;
            for (const auto& d : r.steps) v.push_back(d.iterations);
            return v;
        })
        .def_property_readonly("residuals", [](const SimulationResult& r) {
            std::vector<double> v;
            for (const auto& d : r.steps) v.push_back(d.residual);
            return v;
        })
        .def_property_readonly("converged", [](const SimulationResult& r) {
            std::vector<bool> v;
            for (const auto& d : r.steps) v.push_back(d.converged);
            return v;
        })
        .def_property_readonly("oracle_diff", [](const SimulationResult& r) { return r.oracle_diff; })
        .def("all_converged", &SimulationResult::all_converged)
        .def("max_oracle_diff", &SimulationResult::max_oracle_diff);

    m.def("simulate", [](const BuildingDescription& b, const WeatherSeries& w, const IntegratorConfig& cfg,
                         const std::optional<NodalStructure>& structure, bool oracle) {
        py::gil_scoped_release release;
        if (structure) return simulate(*structure, FilmCoefficients::from(b), w, cfg, {oracle});
        return simulate(b, w, cfg, {oracle});
    }, "building"_a, "weather"_a, "config"_a, "structure"_a = py::none(), "oracle"_a = false,
          "Runs the coupled simulation; pass a (merged) structure to override the generated one");

    m.def("steady_state", [](const BuildingDescription& b, const WeatherSeries& w, double t,
                             const std::optional<NodalStructure>& structure) {
        const NodalStructure s = structure ? *structure : generate_nodes(b);
        return steady_state(s, FilmCoefficients::from(b), solicitation_for_step(w, t, s).inputs);
    }, "building"_a, "weather"_a, "t"_a = 0.0, "structure"_a = py::none(),
          "Steady temperatures under the inputs at time t, abs-number order");
}
