#pragma once

#include "nodal/building.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nodal {

// Absolute node types; the numeric value is the type reference number.
enum class NodeType : int {
    outside_wall_outdoor_surface = 1,
    outside_wall_indoor_surface = 2,
    outside_wall_internal = 3,
    outside_window_outdoor_surface = 4,
    outside_window_indoor_surface = 5,
    internal_wall_surface = 6,
    internal_wall_internal = 7,
    interzone_wall_vertical_surface = 8,
    interzone_wall_internal = 9,
    ground_wall_surface = 10,
    ground_wall_internal = 11,
    ground_wall_terminal = 12,
    interzone_horizontal_below_surface = 13,
    interzone_horizontal_under_surface = 14,
    interzone_window_surface = 15,
    indoor_air = 16,
    radiant_mean = 17,
};

inline constexpr int node_type_count = 17;

inline int type_ref(NodeType t) { return static_cast<int>(t); }
std::string_view describe(NodeType t);

bool is_zone_node(NodeType t);       // air or radiant mean
bool is_outdoor_surface(NodeType t); // exchanges with exterior air and sky
bool is_interzone(NodeType t);       // may belong to two zones

// What a surface node looks at; interior convection coefficients depend on it.
enum class SurfaceOrientation { none, vertical, floor, ceiling };

struct NodeLink {
    int neighbor = 0;          // absolute number
    double conductance = 0.0;  // W/K

    bool operator==(const NodeLink&) const = default;
};

struct NodeRecord {
    int abs_number = 0;
    NodeType type = NodeType::indoor_air;
    std::vector<std::string> zones;     // one or two owning zones
    std::vector<int> relative_numbers;  // row in each owning zone's state system (0-based)
    std::vector<bool> connexion_flags;  // per owning zone
    double capacity = 0.0;              // J/K
    std::vector<NodeLink> links;
    std::string parent;                 // wall, window or zone id
    double area = 0.0;                  // m2, surface nodes only

    // Zone whose air and radiant nodes this surface exchanges with; empty for
    // internal, outdoor, terminal and zone nodes.
    std::string facing_zone;
    SurfaceOrientation orientation = SurfaceOrientation::none;
    double h_ci = 0.0;  // interior films resolved from the facing zone
    double h_ri = 0.0;
    double ground_conductance = 0.0;  // W/K to the imposed ground temperature

    bool belongs_to(const std::string& zone) const;
    std::optional<int> relative_in(const std::string& zone) const;
    bool is_connexion_for(const std::string& zone) const;
};

struct GainChannel {
    std::string channel;
    double convective_fraction = 1.0;

    bool operator==(const GainChannel&) const = default;
};

// Per-zone data the assembly and weather mapping need after generation. A
// merged zone lists every original zone it absorbed in `sources`.
struct ZoneInfo {
    std::string id;
    double air_volume = 0.0;
    double air_change_rate = 0.0;  // 1/h, volume-weighted after merges
    std::vector<std::string> sources;
    std::vector<GainChannel> gains;
    int air_node = 0;
    int radiant_node = 0;

    bool operator==(const ZoneInfo&) const = default;
};

struct NodalStructure {
    std::vector<NodeRecord> nodes;                     // index = abs_number - 1
    std::vector<ZoneInfo> zones;                       // description order
    std::map<std::string, std::vector<int>> zone_index;  // zone -> abs numbers in row order
    std::map<std::string, int> zone_dims;
    std::vector<std::string> original_zones;  // description order, kept across merges
    double air_density = 1.2;
    double air_specific_heat = 1005.0;

    const NodeRecord& node(int abs_number) const { return nodes.at(abs_number - 1); }
    NodeRecord& node(int abs_number) { return nodes.at(abs_number - 1); }
    const ZoneInfo& zone(const std::string& id) const;
    const ZoneInfo* find_zone(const std::string& id) const;
    std::size_t size() const { return nodes.size(); }
};

// A wall or window chain before global numbering: node 0 is on side 1.
struct WallChain {
    std::vector<double> capacities;
    std::vector<double> conductances;  // between consecutive nodes, size = nodes - 1
};

WallChain discretize_wall(const WallSpec& w, const BuildingDescription& b);
WallChain discretize_window(const WindowSpec& w);

NodalStructure generate_nodes(const BuildingDescription& b);

// Fuses zones a and b. The merged zone is named after its source zones joined
// with '+' in description order and takes the position of whichever of a, b
// comes first. Absolute numbers are compacted.
NodalStructure merge_zones(const NodalStructure& s, const std::string& a, const std::string& b);

// One row per node in absolute order, relative numbers printed 1-based.
std::string nodes_csv(const NodalStructure& s);

} // namespace nodal
