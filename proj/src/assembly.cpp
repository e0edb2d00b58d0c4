#include "nodal/assembly.hpp"
#include "nodal/error.hpp"
#include "nodal/format.hpp"

#include <algorithm>
#include <sstream>

namespace nodal {

namespace {

int dim_of(const std::string& zone, const NodalStructure& s) {
    auto it = s.zone_dims.find(zone);
    if (it == s.zone_dims.end()) throw Error("unknown zone '" + zone + "'");
    return it->second;
}

// Walks the wall and window nodes owned by `zone`, handing each with its row.
template <class F>
void for_each_wall_node(const std::string& zone, const NodalStructure& s, F&& f) {
    for (int abs : s.zone_index.at(zone)) {
        const NodeRecord& n = s.node(abs);
        if (is_zone_node(n.type)) continue;
        f(n, *n.relative_in(zone));
    }
}

int row_of(const NodalStructure& s, int abs, const std::string& zone) { return *s.node(abs).relative_in(zone); }

} // namespace

FilmCoefficients FilmCoefficients::from(const BuildingDescription& b) {
    return {b.exterior.h_ce, b.exterior.h_re, b.simulation.air_specific_heat, b.simulation.air_density};
}

const ZoneSolicitation& BoundaryInputs::zone(const std::string& id) const {
    static const ZoneSolicitation none{};
    auto it = zones.find(id);
    return it == zones.end() ? none : it->second;
}

ElementaryMatrices ElementaryMatrices::zeros(int dim) {
    ElementaryMatrices e;
    for (auto* m : {&e.A_cond, &e.A_cvi, &e.A_cve, &e.A_lwi, &e.A_lwe, &e.A_air, &e.A_rm, &e.A_connex})
        *m = Eigen::MatrixXd::Zero(dim, dim);
    for (auto* v : {&e.B_swi, &e.B_swe, &e.B_cvi_src, &e.B_cve, &e.B_lwe, &e.B_air, &e.B_gains, &e.B_ground, &e.B_connex})
        *v = Eigen::VectorXd::Zero(dim);
    return e;
}

std::vector<std::pair<std::string, const Eigen::MatrixXd*>> ElementaryMatrices::matrices() const {
    return {{"A_cond", &A_cond}, {"A_cvi", &A_cvi}, {"A_cve", &A_cve}, {"A_lwi", &A_lwi},
            {"A_lwe", &A_lwe},   {"A_air", &A_air}, {"A_rm", &A_rm},   {"A_connex", &A_connex}};
}

std::vector<std::pair<std::string, const Eigen::VectorXd*>> ElementaryMatrices::vectors() const {
    return {{"B_swi", &B_swi}, {"B_swe", &B_swe}, {"B_cvi_src", &B_cvi_src}, {"B_cve", &B_cve},      {"B_lwe", &B_lwe},
            {"B_air", &B_air}, {"B_gains", &B_gains}, {"B_ground", &B_ground}, {"B_connex", &B_connex}};
}

Eigen::MatrixXd assemble_A_cond(const std::string& zone, const NodalStructure& s) {
    const int dim = dim_of(zone, s);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int i) {
        for (const auto& l : n.links) {
            const auto j = s.node(l.neighbor).relative_in(zone);
            if (!j) throw Error("node " + std::to_string(n.abs_number) + " links outside zone '" + zone + "'");
            A(i, *j) += l.conductance;
            A(i, i) -= l.conductance;
        }
        // ground source term goes to B_ground
        A(i, i) -= n.ground_conductance;
    });
    return A;
}

InteriorExchange assemble_interior_exchange(const std::string& zone, const NodalStructure& s) {
    const int dim = dim_of(zone, s);
    InteriorExchange x{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
    const ZoneInfo& z = s.zone(zone);
    const int air = row_of(s, z.air_node, zone);
    const int rm = row_of(s, z.radiant_node, zone);
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int j) {
        if (n.facing_zone != zone) return;
        const double hc = n.h_ci * n.area;
        const double hr = n.h_ri * n.area;
        x.A_cvi(j, j) -= hc;
        x.A_cvi(j, air) += hc;
        x.A_cvi(air, j) += hc;
        x.A_cvi(air, air) -= hc;
        x.A_lwi(j, j) -= hr;
        x.A_lwi(j, rm) += hr;
        x.A_rm(rm, j) += hr;
        x.A_rm(rm, rm) -= hr;
    });
    return x;
}

ExteriorExchange assemble_exterior_exchange(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                            const BoundaryInputs& inputs) {
    const int dim = dim_of(zone, s);
    ExteriorExchange x{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim), Eigen::VectorXd::Zero(dim),
                       Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int i) {
        if (!is_outdoor_surface(n.type)) return;
        x.A_cve(i, i) = -f.h_ce * n.area;
        x.A_lwe(i, i) = -f.h_re * n.area;
        x.B_cve(i) = f.h_ce * n.area * inputs.T_ae;
        x.B_lwe(i) = f.h_re * n.area * inputs.T_sky;
        auto sw = inputs.sw_exterior.find(n.abs_number);
        if (sw != inputs.sw_exterior.end()) x.B_swe(i) = sw->second * n.area;
    });
    return x;
}

AirBalance assemble_air_balance(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                const BoundaryInputs& inputs) {
    const int dim = dim_of(zone, s);
    AirBalance x{Eigen::MatrixXd::Zero(dim, dim), Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    const ZoneInfo& z = s.zone(zone);
    const int air = row_of(s, z.air_node, zone);
    const int rm = row_of(s, z.radiant_node, zone);
    const ZoneSolicitation& in = inputs.zone(zone);
    if (in.airflow < 0) throw Error("zone '" + zone + "': negative airflow");
    x.A_air(air, air) = -f.air_specific_heat * in.airflow;
    x.B_air(air) = f.air_specific_heat * in.airflow * inputs.T_ae;
    x.B_gains(air) = in.gain_convective;
    x.B_gains(rm) = in.gain_radiant;
    x.B_cvi_src(air) = in.convective_source;
    return x;
}

Eigen::VectorXd assemble_B_swi(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs) {
    // A connexion row receives the share of the zone its surface faces, so
    // both copies of a recovery-place node carry the same balance.
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_of(zone, s));
    std::map<std::string, double> area;
    for (const auto& n : s.nodes)
        if (!n.facing_zone.empty()) area[n.facing_zone] += n.area;
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int i) {
        if (n.facing_zone.empty() || area[n.facing_zone] <= 0.0) return;
        b(i) = inputs.zone(n.facing_zone).sw_interior * n.area / area[n.facing_zone];
    });
    return b;
}

Eigen::VectorXd assemble_B_ground(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim_of(zone, s));
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int i) { b(i) = n.ground_conductance * inputs.T_ground; });
    return b;
}

Connexion assemble_connex(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs) {
    const int dim = dim_of(zone, s);
    Connexion x{Eigen::MatrixXd::Zero(dim, dim), Eigen::VectorXd::Zero(dim)};
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int i) {
        if (!n.is_connexion_for(zone)) return;
        auto it = inputs.neighbors.find(n.facing_zone);
        if (it == inputs.neighbors.end())
            throw Error("zone '" + zone + "': missing temperatures of neighbor zone '" + n.facing_zone + "'");
        x.A_connex(i, i) = -(n.h_ci + n.h_ri) * n.area;
        x.B_connex(i) = (n.h_ci * it->second.air + n.h_ri * it->second.radiant) * n.area;
    });
    return x;
}

void refresh_boundary_vectors(ElementaryMatrices& e, const std::string& zone, const NodalStructure& s,
                              const FilmCoefficients& f, const BoundaryInputs& inputs) {
    auto ext = assemble_exterior_exchange(zone, s, f, inputs);
    e.A_cve = std::move(ext.A_cve);
    e.A_lwe = std::move(ext.A_lwe);
    e.B_cve = std::move(ext.B_cve);
    e.B_lwe = std::move(ext.B_lwe);
    e.B_swe = std::move(ext.B_swe);
    auto air = assemble_air_balance(zone, s, f, inputs);
    e.A_air = std::move(air.A_air);
    e.B_air = std::move(air.B_air);
    e.B_gains = std::move(air.B_gains);
    e.B_cvi_src = std::move(air.B_cvi_src);
    e.B_swi = assemble_B_swi(zone, s, inputs);
    e.B_ground = assemble_B_ground(zone, s, inputs);
}

ElementaryMatrices assemble_elementary(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                       const BoundaryInputs& inputs) {
    ElementaryMatrices e = ElementaryMatrices::zeros(dim_of(zone, s));
    e.A_cond = assemble_A_cond(zone, s);
    auto in = assemble_interior_exchange(zone, s);
    e.A_cvi = std::move(in.A_cvi);
    e.A_lwi = std::move(in.A_lwi);
    e.A_rm = std::move(in.A_rm);
    refresh_boundary_vectors(e, zone, s, f, inputs);
    auto cx = assemble_connex(zone, s, inputs);
    e.A_connex = std::move(cx.A_connex);
    e.B_connex = std::move(cx.B_connex);
    return e;
}

ZoneStateSystem compose_state_system(const ElementaryMatrices& parts, const NodalStructure& s, const std::string& zone) {
    const int dim = dim_of(zone, s);
    ZoneStateSystem sys;
    sys.zone = zone;
    sys.A = Eigen::MatrixXd::Zero(dim, dim);
    sys.B = Eigen::VectorXd::Zero(dim);
    for (const auto& [name, m] : parts.matrices()) {
        if (m->rows() != dim || m->cols() != dim)
            throw Error("zone '" + zone + "': " + name + " is " + std::to_string(m->rows()) + "x" + std::to_string(m->cols()) +
                        ", expected " + std::to_string(dim));
        sys.A += *m;
    }
    for (const auto& [name, v] : parts.vectors()) {
        if (v->size() != dim)
            throw Error("zone '" + zone + "': " + name + " has size " + std::to_string(v->size()) + ", expected " + std::to_string(dim));
        sys.B += *v;
    }
    sys.row_map = s.zone_index.at(zone);
    sys.C.resize(dim);
    for (int i = 0; i < dim; ++i) sys.C(i) = s.node(sys.row_map[i]).capacity;
    return sys;
}

std::vector<std::string> neighbor_zones(const std::string& zone, const NodalStructure& s) {
    std::vector<std::string> out;
    for_each_wall_node(zone, s, [&](const NodeRecord& n, int) {
        if (n.is_connexion_for(zone) && std::find(out.begin(), out.end(), n.facing_zone) == out.end())
            out.push_back(n.facing_zone);
    });
    return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
        os << '\n';
    }
    return os.str();
}

} // namespace nodal
