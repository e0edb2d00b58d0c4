#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nodal {

struct Material {
    std::string name;
    double conductivity = 0.0;   // W/(m.K)
    double density = 0.0;        // kg/m3
    double specific_heat = 0.0;  // J/(kg.K)

    bool operator==(const Material&) const = default;
};

struct Layer {
    std::string material;
    double thickness = 0.0;  // m

    bool operator==(const Layer&) const = default;
};

struct BoundaryRef {
    enum class Kind { zone, exterior, ground };

    Kind kind = Kind::exterior;
    std::string zone;  // set only when kind == zone

    static BoundaryRef exterior() { return {Kind::exterior, {}}; }
    static BoundaryRef ground() { return {Kind::ground, {}}; }
    static BoundaryRef of_zone(std::string id) { return {Kind::zone, std::move(id)}; }

    bool is_zone() const { return kind == Kind::zone; }
    bool operator==(const BoundaryRef&) const = default;
};

enum class Orientation { vertical, horizontal_floor, horizontal_ceiling };

// R2C: one resistance between two capacitive surface nodes.
// nodes(m): m internal nodes plus two surface nodes.
struct ConductionModel {
    enum class Kind { r2c, nodes };

    Kind kind = Kind::r2c;
    int internal_nodes = 0;

    static ConductionModel r2c() { return {Kind::r2c, 0}; }
    static ConductionModel nodes(int m) { return {Kind::nodes, m}; }

    bool operator==(const ConductionModel&) const = default;
};

struct WallSpec {
    std::string name;
    double area = 0.0;  // m2
    std::vector<Layer> layers;  // side1 to side2
    BoundaryRef side1;
    BoundaryRef side2;
    Orientation orientation = Orientation::vertical;
    ConductionModel conduction_model;

    bool touches_ground() const {
        return side1.kind == BoundaryRef::Kind::ground || side2.kind == BoundaryRef::Kind::ground;
    }
    bool operator==(const WallSpec&) const = default;
};

struct WindowSpec {
    std::string name;
    double area = 0.0;
    double conductance_per_area = 0.0;  // W/(m2.K)
    BoundaryRef side1;
    BoundaryRef side2;

    bool operator==(const WindowSpec&) const = default;
};

// Optional interior convection coefficients per surface orientation; unset
// entries fall back to the zone's h_ci.
struct ConvectionOverrides {
    std::optional<double> vertical;
    std::optional<double> floor;
    std::optional<double> ceiling;

    bool operator==(const ConvectionOverrides&) const = default;
};

struct ZoneSpec {
    std::string id;
    double air_volume = 0.0;       // m3
    double air_change_rate = 0.0;  // 1/h, exchange with exterior air
    double h_ci = 0.0;             // W/(m2.K)
    double h_ri = 0.0;             // W/(m2.K)
    // Name of the gain channel feeding this zone (weather column gain_<name>);
    // the zone id is used when unset.
    std::optional<std::string> internal_gain_schedule;
    ConvectionOverrides h_ci_overrides;
    double air_capacity_multiplier = 1.0;
    double gain_convective_fraction = 1.0;

    const std::string& gain_channel() const { return internal_gain_schedule ? *internal_gain_schedule : id; }
    bool operator==(const ZoneSpec&) const = default;
};

struct ExteriorFilm {
    double h_ce = 0.0;
    double h_re = 0.0;
    double h_ground = 20.0;  // W/(m2.K), terminal ground node to imposed ground temperature

    bool operator==(const ExteriorFilm&) const = default;
};

struct SimulationDefaults {
    double dt = 600.0;
    double theta = 1.0;
    double tolerance = 1e-3;
    int max_iterations = 100;
    std::optional<double> horizon;              // s, defaults to the weather span
    std::optional<double> initial_temperature;  // degC, defaults to the first T_ae
    double air_density = 1.2;                   // kg/m3
    double air_specific_heat = 1005.0;          // J/(kg.K)
    std::string interpolation = "linear";       // "hold" | "linear"

    bool operator==(const SimulationDefaults&) const = default;
};

struct BuildingDescription {
    std::vector<Material> materials;
    std::vector<ZoneSpec> zones;
    std::vector<WallSpec> walls;
    std::vector<WindowSpec> windows;
    ExteriorFilm exterior;
    SimulationDefaults simulation;

    const Material* find_material(std::string_view name) const;
    const ZoneSpec* find_zone(std::string_view id) const;
    const WallSpec* find_wall(std::string_view name) const;
    const WindowSpec* find_window(std::string_view name) const;

    bool operator==(const BuildingDescription&) const = default;
};

struct Violation {
    std::string entity;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

struct RcParameters {
    double resistance = 0.0;   // K/W
    double capacitance = 0.0;  // J/K
};

// Parses the JSON building document. Throws ParseError on syntax or schema
// problems, ReferenceError on dangling identifiers, DuplicateError on
// repeated names. Numeric invariants are left to validate().
BuildingDescription parse_building(std::string_view text);
BuildingDescription load_building(const std::string& path);

std::string serialize_building(const BuildingDescription& b);

std::vector<Violation> validate(const BuildingDescription& b);

RcParameters wall_rc_parameters(const WallSpec& w, const BuildingDescription& b);

std::string_view to_string(Orientation o);
std::string to_string(const ConductionModel& m);
std::string to_string(const BoundaryRef& r);

} // namespace nodal
