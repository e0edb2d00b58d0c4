#pragma once

#include "nodal/building.hpp"
#include "nodal/nodes.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace nodal {

// Exterior films and air properties. Interior films live on the surface
// node records because they depend on the facing zone and orientation.
struct FilmCoefficients {
    double h_ce = 0.0;
    double h_re = 0.0;
    double air_specific_heat = 1005.0;
    double air_density = 1.2;

    static FilmCoefficients from(const BuildingDescription& b);
};

struct NeighborTemperatures {
    double air = 0.0;
    double radiant = 0.0;
};

struct ZoneSolicitation {
    double sw_interior = 0.0;        // W, spread over interior surfaces by area
    double gain_convective = 0.0;    // W to the air node
    double gain_radiant = 0.0;       // W to the radiant mean node
    double convective_source = 0.0;  // W imposed on the air node (plant input)
    double airflow = 0.0;            // kg/s of exterior air
};

struct BoundaryInputs {
    double T_ae = 0.0;
    double T_sky = 0.0;
    double T_ground = 0.0;
    std::map<int, double> sw_exterior;  // outdoor surface abs number -> W/m2
    std::map<std::string, ZoneSolicitation> zones;
    std::map<std::string, NeighborTemperatures> neighbors;  // latest (T_ai, T_rm) per zone

    const ZoneSolicitation& zone(const std::string& id) const;
};

struct ElementaryMatrices {
    Eigen::MatrixXd A_cond, A_cvi, A_cve, A_lwi, A_lwe, A_air, A_rm, A_connex;
    Eigen::VectorXd B_swi, B_swe, B_cvi_src, B_cve, B_lwe, B_air, B_gains, B_ground, B_connex;

    static ElementaryMatrices zeros(int dim);

    // Named views in a fixed order, for summation and dumps.
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> matrices() const;
    std::vector<std::pair<std::string, const Eigen::VectorXd*>> vectors() const;
};

struct ZoneStateSystem {
    std::string zone;
    Eigen::VectorXd C;  // diagonal of the capacity matrix
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    std::vector<int> row_map;  // relative index -> abs number

    int dim() const { return static_cast<int>(C.size()); }
};

struct InteriorExchange {
    Eigen::MatrixXd A_cvi, A_lwi, A_rm;
};

struct ExteriorExchange {
    Eigen::MatrixXd A_cve, A_lwe;
    Eigen::VectorXd B_cve, B_lwe, B_swe;
};

struct AirBalance {
    Eigen::MatrixXd A_air;
    Eigen::VectorXd B_air, B_gains, B_cvi_src;
};

struct Connexion {
    Eigen::MatrixXd A_connex;
    Eigen::VectorXd B_connex;
};

Eigen::MatrixXd assemble_A_cond(const std::string& zone, const NodalStructure& s);
InteriorExchange assemble_interior_exchange(const std::string& zone, const NodalStructure& s);
ExteriorExchange assemble_exterior_exchange(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                            const BoundaryInputs& inputs);
AirBalance assemble_air_balance(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                const BoundaryInputs& inputs);
Eigen::VectorXd assemble_B_swi(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs);
Eigen::VectorXd assemble_B_ground(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs);

// B_connex uses inputs.neighbors; throws if a facing zone has no entry.
Connexion assemble_connex(const std::string& zone, const NodalStructure& s, const BoundaryInputs& inputs);

// Refreshes only the input-dependent vectors (everything but B_connex).
void refresh_boundary_vectors(ElementaryMatrices& parts, const std::string& zone, const NodalStructure& s,
                              const FilmCoefficients& f, const BoundaryInputs& inputs);

ElementaryMatrices assemble_elementary(const std::string& zone, const NodalStructure& s, const FilmCoefficients& f,
                                       const BoundaryInputs& inputs);

ZoneStateSystem compose_state_system(const ElementaryMatrices& parts, const NodalStructure& s, const std::string& zone);

// Zones whose air and radiant temperatures enter this zone's connexion rows.
std::vector<std::string> neighbor_zones(const std::string& zone, const NodalStructure& s);

std::string matrix_csv(const Eigen::MatrixXd& m);

} // namespace nodal
