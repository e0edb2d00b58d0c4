#include "nodal/nodes.hpp"
#include "nodal/error.hpp"
#include "nodal/format.hpp"

#include <algorithm>
#include <sstream>

namespace nodal {

namespace {

struct ChainSlot {
    NodeType type;
    std::vector<std::string> zones;
    std::string facing_zone;
    SurfaceOrientation orientation = SurfaceOrientation::none;
    double ground_conductance = 0.0;
    bool surface = false;
};

SurfaceOrientation indoor_orientation(Orientation o) {
    switch (o) {
    case Orientation::vertical: return SurfaceOrientation::vertical;
    case Orientation::horizontal_floor: return SurfaceOrientation::floor;
    case Orientation::horizontal_ceiling: return SurfaceOrientation::ceiling;
    }
    return SurfaceOrientation::vertical;
}

double interior_h_ci(const ZoneSpec& z, SurfaceOrientation o) {
    const auto& ov = z.h_ci_overrides;
    switch (o) {
    case SurfaceOrientation::vertical: return ov.vertical.value_or(z.h_ci);
    case SurfaceOrientation::floor: return ov.floor.value_or(z.h_ci);
    case SurfaceOrientation::ceiling: return ov.ceiling.value_or(z.h_ci);
    case SurfaceOrientation::none: break;
    }
    return z.h_ci;
}

// Types and attachments for each position of a wall chain, side 1 first.
std::vector<ChainSlot> wall_slots(const WallSpec& w, std::size_t count, double h_ground) {
    std::vector<ChainSlot> slots(count);
    const auto& s1 = w.side1;
    const auto& s2 = w.side2;
    auto fill = [&](NodeType first, NodeType middle, NodeType last, std::vector<std::string> zones) {
        for (std::size_t i = 0; i < count; ++i) {
            slots[i].type = i == 0 ? first : (i + 1 == count ? last : middle);
            slots[i].zones = zones;
        }
        slots.front().surface = slots.back().surface = true;
    };

    if (s1.is_zone() && s2.is_zone()) {
        NodeType first = NodeType::interzone_wall_vertical_surface, last = first;
        SurfaceOrientation o1 = SurfaceOrientation::vertical, o2 = o1;
        if (w.orientation == Orientation::horizontal_floor) {
            // floor of the side-1 zone: side 1 sits on top of the slab
            first = NodeType::interzone_horizontal_below_surface;
            last = NodeType::interzone_horizontal_under_surface;
            o1 = SurfaceOrientation::floor;
            o2 = SurfaceOrientation::ceiling;
        } else if (w.orientation == Orientation::horizontal_ceiling) {
            first = NodeType::interzone_horizontal_under_surface;
            last = NodeType::interzone_horizontal_below_surface;
            o1 = SurfaceOrientation::ceiling;
            o2 = SurfaceOrientation::floor;
        }
        fill(first, NodeType::interzone_wall_internal, last, {s1.zone, s2.zone});
        slots.front().facing_zone = s1.zone;
        slots.front().orientation = o1;
        slots.back().facing_zone = s2.zone;
        slots.back().orientation = o2;
        return slots;
    }

    const bool zone_first = s1.is_zone();
    const std::string& zone = zone_first ? s1.zone : s2.zone;
    const auto& other = zone_first ? s2 : s1;
    NodeType outer, inner, internal;
    if (other.kind == BoundaryRef::Kind::ground) {
        outer = NodeType::ground_wall_terminal;
        inner = NodeType::ground_wall_surface;
        internal = NodeType::ground_wall_internal;
    } else {
        outer = NodeType::outside_wall_outdoor_surface;
        inner = NodeType::outside_wall_indoor_surface;
        internal = NodeType::outside_wall_internal;
    }
    fill(zone_first ? inner : outer, internal, zone_first ? outer : inner, {zone});
    ChainSlot& in = zone_first ? slots.front() : slots.back();
    ChainSlot& out = zone_first ? slots.back() : slots.front();
    in.facing_zone = zone;
    in.orientation = indoor_orientation(w.orientation);
    if (out.type == NodeType::ground_wall_terminal) out.ground_conductance = h_ground * w.area;
    return slots;
}

std::vector<ChainSlot> window_slots(const WindowSpec& w) {
    std::vector<ChainSlot> slots(2);
    slots[0].surface = slots[1].surface = true;
    if (w.side1.is_zone() && w.side2.is_zone()) {
        for (int i = 0; i < 2; ++i) {
            slots[i].type = NodeType::interzone_window_surface;
            slots[i].zones = {w.side1.zone, w.side2.zone};
            slots[i].orientation = SurfaceOrientation::vertical;
        }
        slots[0].facing_zone = w.side1.zone;
        slots[1].facing_zone = w.side2.zone;
        return slots;
    }
    const bool zone_first = w.side1.is_zone();
    const std::string& zone = zone_first ? w.side1.zone : w.side2.zone;
    ChainSlot& in = slots[zone_first ? 0 : 1];
    ChainSlot& out = slots[zone_first ? 1 : 0];
    in.type = NodeType::outside_window_indoor_surface;
    in.facing_zone = zone;
    in.orientation = SurfaceOrientation::vertical;
    out.type = NodeType::outside_window_outdoor_surface;
    in.zones = out.zones = {zone};
    return slots;
}

// Rebuilds zone_index, zone_dims, relative numbers and connexion flags from
// the node ownership lists. Zone nodes are placed last: air then radiant.
void index_zones(NodalStructure& s) {
    s.zone_index.clear();
    s.zone_dims.clear();
    for (const auto& z : s.zones) s.zone_index[z.id];
    for (const auto& n : s.nodes) {
        if (is_zone_node(n.type)) continue;
        for (const auto& z : n.zones) s.zone_index.at(z).push_back(n.abs_number);
    }
    for (const auto& z : s.zones) {
        auto& list = s.zone_index.at(z.id);
        list.push_back(z.air_node);
        list.push_back(z.radiant_node);
        s.zone_dims[z.id] = static_cast<int>(list.size());
    }
    for (auto& n : s.nodes) {
        n.relative_numbers.assign(n.zones.size(), -1);
        n.connexion_flags.assign(n.zones.size(), false);
        for (std::size_t k = 0; k < n.zones.size(); ++k) {
            const auto& list = s.zone_index.at(n.zones[k]);
            auto it = std::find(list.begin(), list.end(), n.abs_number);
            n.relative_numbers[k] = static_cast<int>(it - list.begin());
            n.connexion_flags[k] = !n.facing_zone.empty() && n.facing_zone != n.zones[k];
        }
    }
}

void link(NodalStructure& s, int a, int b, double k) {
    s.node(a).links.push_back({b, k});
    s.node(b).links.push_back({a, k});
}

} // namespace

std::string_view describe(NodeType t) {
    switch (t) {
    case NodeType::outside_wall_outdoor_surface: return "outdoor surfacic node of outside wall";
    case NodeType::outside_wall_indoor_surface: return "indoor surfacic node of outside wall";
    case NodeType::outside_wall_internal: return "internal node of outside wall";
    case NodeType::outside_window_outdoor_surface: return "outdoor surfacic node of outside glass-window";
    case NodeType::outside_window_indoor_surface: return "indoor surfacic node of outside glass-window";
    case NodeType::internal_wall_surface: return "surfacic node of internal wall";
    case NodeType::internal_wall_internal: return "internal node of internal wall";
    case NodeType::interzone_wall_vertical_surface: return "surfacic node of vertical interzone wall";
    case NodeType::interzone_wall_internal: return "internal node of interzone wall";
    case NodeType::ground_wall_surface: return "surfacic node of ground wall";
    case NodeType::ground_wall_internal: return "internal node of ground wall";
    case NodeType::ground_wall_terminal: return "terminal node of ground wall";
    case NodeType::interzone_horizontal_below_surface: return "surfacic below node of horizontal interzone wall";
    case NodeType::interzone_horizontal_under_surface: return "surfacic under node of horizontal interzone wall";
    case NodeType::interzone_window_surface: return "surfacic node of interzone glass-window";
    case NodeType::indoor_air: return "dry indoor air temperature";
    case NodeType::radiant_mean: return "radiant mean temperature";
    }
    return "?";
}

bool is_zone_node(NodeType t) { return t == NodeType::indoor_air || t == NodeType::radiant_mean; }

bool is_outdoor_surface(NodeType t) {
    return t == NodeType::outside_wall_outdoor_surface || t == NodeType::outside_window_outdoor_surface;
}

bool is_interzone(NodeType t) {
    switch (t) {
    case NodeType::interzone_wall_vertical_surface:
    case NodeType::interzone_wall_internal:
    case NodeType::interzone_horizontal_below_surface:
    case NodeType::interzone_horizontal_under_surface:
    case NodeType::interzone_window_surface: return true;
    default: return false;
    }
}

bool NodeRecord::belongs_to(const std::string& zone) const {
    return std::find(zones.begin(), zones.end(), zone) != zones.end();
}

std::optional<int> NodeRecord::relative_in(const std::string& zone) const {
    for (std::size_t k = 0; k < zones.size(); ++k)
        if (zones[k] == zone) return relative_numbers.at(k);
    return std::nullopt;
}

bool NodeRecord::is_connexion_for(const std::string& zone) const {
    for (std::size_t k = 0; k < zones.size(); ++k)
        if (zones[k] == zone) return connexion_flags.at(k);
    return false;
}

const ZoneInfo* NodalStructure::find_zone(const std::string& id) const {
    auto it = std::find_if(zones.begin(), zones.end(), [&](const ZoneInfo& z) { return z.id == id; });
    return it == zones.end() ? nullptr : &*it;
}

const ZoneInfo& NodalStructure::zone(const std::string& id) const {
    const ZoneInfo* z = find_zone(id);
    if (!z) throw Error("unknown zone '" + id + "'");
    return *z;
}

WallChain discretize_wall(const WallSpec& w, const BuildingDescription& b) {
    const RcParameters rc = wall_rc_parameters(w, b);
    WallChain chain;
    if (w.conduction_model.kind == ConductionModel::Kind::r2c) {
        chain.capacities = {rc.capacitance / 2.0, rc.capacitance / 2.0};
        chain.conductances = {1.0 / rc.resistance};
        return chain;
    }

    const int m = w.conduction_model.internal_nodes;
    if (m < 1) throw Error("wall '" + w.name + "': nodes(m) needs m >= 1 internal nodes, use R2C instead");

    // Nodes sit at equal steps of cumulative resistance. Each node owns the
    // control volume reaching half a step to either side; the capacity of that
    // slice is integrated layer by layer.
    const int slices = m + 1;
    const double step = rc.resistance / slices;
    struct Span {
        double r0, r1, capacity_per_resistance;
    };
    std::vector<Span> spans;
    double r = 0.0;
    for (const auto& l : w.layers) {
        const Material& mat = *b.find_material(l.material);
        const double lr = l.thickness / (mat.conductivity * w.area);
        const double lc = mat.density * mat.specific_heat * l.thickness * w.area;
        spans.push_back({r, r + lr, lc / lr});
        r += lr;
    }
    spans.back().r1 = rc.resistance;

    auto capacity_between = [&](double lo, double hi) {
        double c = 0.0;
        for (const auto& s : spans) {
            const double a = std::max(lo, s.r0), z = std::min(hi, s.r1);
            if (z > a) c += (z - a) * s.capacity_per_resistance;
        }
        return c;
    };

    chain.capacities.resize(slices + 1);
    for (int i = 0; i <= slices; ++i) {
        const double lo = i == 0 ? 0.0 : (i - 0.5) * step;
        const double hi = i == slices ? rc.resistance : (i + 0.5) * step;
        chain.capacities[i] = capacity_between(lo, hi);
    }
    chain.conductances.assign(slices, 1.0 / step);
    return chain;
}

WallChain discretize_window(const WindowSpec& w) {
    return WallChain{{0.0, 0.0}, {w.conductance_per_area * w.area}};
}

NodalStructure generate_nodes(const BuildingDescription& b) {
    NodalStructure s;
    s.air_density = b.simulation.air_density;
    s.air_specific_heat = b.simulation.air_specific_heat;
    for (const auto& z : b.zones) s.original_zones.push_back(z.id);

    auto emit_chain = [&](const WallChain& chain, const std::vector<ChainSlot>& slots, const std::string& parent, double area) {
        const int first = static_cast<int>(s.nodes.size()) + 1;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            NodeRecord n;
            n.abs_number = first + static_cast<int>(i);
            n.type = slots[i].type;
            n.zones = slots[i].zones;
            n.capacity = chain.capacities[i];
            n.parent = parent;
            n.area = slots[i].surface ? area : 0.0;
            n.facing_zone = slots[i].facing_zone;
            n.orientation = slots[i].orientation;
            n.ground_conductance = slots[i].ground_conductance;
            if (!n.facing_zone.empty()) {
                const ZoneSpec& z = *b.find_zone(n.facing_zone);
                n.h_ci = interior_h_ci(z, n.orientation);
                n.h_ri = z.h_ri;
            }
            s.nodes.push_back(std::move(n));
        }
        for (std::size_t i = 0; i + 1 < slots.size(); ++i)
            link(s, first + static_cast<int>(i), first + static_cast<int>(i) + 1, chain.conductances[i]);
    };

    for (const auto& w : b.walls) {
        WallChain chain = discretize_wall(w, b);
        emit_chain(chain, wall_slots(w, chain.capacities.size(), b.exterior.h_ground), w.name, w.area);
    }
    for (const auto& w : b.windows) emit_chain(discretize_window(w), window_slots(w), w.name, w.area);

    for (const auto& z : b.zones) {
        ZoneInfo info;
        info.id = z.id;
        info.air_volume = z.air_volume;
        info.air_change_rate = z.air_change_rate;
        info.sources = {z.id};
        info.gains = {{z.gain_channel(), z.gain_convective_fraction}};

        NodeRecord air;
        air.abs_number = static_cast<int>(s.nodes.size()) + 1;
        air.type = NodeType::indoor_air;
        air.zones = {z.id};
        air.capacity = b.simulation.air_density * b.simulation.air_specific_heat * z.air_volume * z.air_capacity_multiplier;
        air.parent = z.id;
        info.air_node = air.abs_number;
        s.nodes.push_back(std::move(air));

        NodeRecord rm;
        rm.abs_number = static_cast<int>(s.nodes.size()) + 1;
        rm.type = NodeType::radiant_mean;
        rm.zones = {z.id};
        rm.parent = z.id;
        info.radiant_node = rm.abs_number;
        s.nodes.push_back(std::move(rm));

        s.zones.push_back(std::move(info));
    }

    index_zones(s);
    return s;
}

NodalStructure merge_zones(const NodalStructure& s, const std::string& a, const std::string& b) {
    if (a == b) throw Error("cannot merge zone '" + a + "' with itself");
    auto pos = [&](const std::string& id) {
        auto it = std::find_if(s.zones.begin(), s.zones.end(), [&](const ZoneInfo& z) { return z.id == id; });
        if (it == s.zones.end()) throw Error("unknown zone '" + id + "'");
        return it - s.zones.begin();
    };
    const auto pa = pos(a), pb = pos(b);
    const ZoneInfo& first = s.zones[std::min(pa, pb)];
    const ZoneInfo& second = s.zones[std::max(pa, pb)];

    ZoneInfo merged;
    // sources (and their gain channels) in description order, so the result
    // does not depend on the order of successive merges
    std::vector<std::pair<std::string, GainChannel>> parts;
    for (const ZoneInfo* z : {&first, &second})
        for (std::size_t i = 0; i < z->sources.size(); ++i) parts.emplace_back(z->sources[i], z->gains.at(i));
    auto rank = [&](const std::string& id) {
        return std::find(s.original_zones.begin(), s.original_zones.end(), id) - s.original_zones.begin();
    };
    std::stable_sort(parts.begin(), parts.end(), [&](const auto& x, const auto& y) { return rank(x.first) < rank(y.first); });
    for (const auto& [src, gain] : parts) {
        merged.id += (merged.sources.empty() ? "" : "+") + src;
        merged.sources.push_back(src);
        merged.gains.push_back(gain);
    }
    merged.air_volume = first.air_volume + second.air_volume;
    merged.air_change_rate =
        (first.air_volume * first.air_change_rate + second.air_volume * second.air_change_rate) / merged.air_volume;

    auto rename = [&](const std::string& z) { return (z == a || z == b) ? merged.id : z; };

    NodalStructure out;
    out.air_density = s.air_density;
    out.air_specific_heat = s.air_specific_heat;
    out.original_zones = s.original_zones;
    std::vector<int> renumber(s.nodes.size() + 1, 0);

    for (const auto& n : s.nodes) {
        if (is_zone_node(n.type)) continue;
        NodeRecord r = n;
        r.abs_number = static_cast<int>(out.nodes.size()) + 1;
        renumber[n.abs_number] = r.abs_number;
        std::vector<std::string> zones;
        for (const auto& z : n.zones) {
            auto nz = rename(z);
            if (std::find(zones.begin(), zones.end(), nz) == zones.end()) zones.push_back(nz);
        }
        if (zones.size() == 1 && n.zones.size() == 2) {
            // the entity now lies inside one zone
            r.type = r.facing_zone.empty() ? NodeType::internal_wall_internal : NodeType::internal_wall_surface;
        }
        r.zones = std::move(zones);
        if (!r.facing_zone.empty()) r.facing_zone = rename(r.facing_zone);
        out.nodes.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < s.zones.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == std::max(pa, pb)) continue;
        const bool is_merged = static_cast<std::ptrdiff_t>(i) == std::min(pa, pb);
        ZoneInfo info = is_merged ? merged : s.zones[i];
        const NodeRecord& old_air = s.node(s.zones[i].air_node);

        NodeRecord air = old_air;
        air.abs_number = static_cast<int>(out.nodes.size()) + 1;
        air.zones = {info.id};
        air.parent = info.id;
        if (is_merged) air.capacity = s.node(first.air_node).capacity + s.node(second.air_node).capacity;
        renumber[old_air.abs_number] = air.abs_number;
        info.air_node = air.abs_number;
        out.nodes.push_back(std::move(air));

        NodeRecord rm = s.node(s.zones[i].radiant_node);
        renumber[rm.abs_number] = static_cast<int>(out.nodes.size()) + 1;
        rm.abs_number = renumber[rm.abs_number];
        rm.zones = {info.id};
        rm.parent = info.id;
        info.radiant_node = rm.abs_number;
        out.nodes.push_back(std::move(rm));

        out.zones.push_back(std::move(info));
    }

    for (auto& n : out.nodes)
        for (auto& l : n.links) l.neighbor = renumber.at(l.neighbor);

    index_zones(out);
    return out;
}

std::string nodes_csv(const NodalStructure& s) {
    std::ostringstream os;
    os << "abs_number,type,zones,relative_numbers,connexion_flags,capacity,links\n";
    for (const auto& n : s.nodes) {
        os << n.abs_number << ',' << type_ref(n.type) << ',';
        for (std::size_t k = 0; k < n.zones.size(); ++k) os << (k ? ";" : "") << n.zones[k];
        os << ',';
        for (std::size_t k = 0; k < n.relative_numbers.size(); ++k) os << (k ? ";" : "") << n.relative_numbers[k] + 1;
        os << ',';
        for (std::size_t k = 0; k < n.connexion_flags.size(); ++k) os << (k ? ";" : "") << (n.connexion_flags[k] ? 1 : 0);
        os << ',' << format_double(n.capacity) << ',';
        for (std::size_t k = 0; k < n.links.size(); ++k)
            os << (k ? ";" : "") << n.links[k].neighbor << ':' << format_double(n.links[k].conductance);
        os << '\n';
    }
    return os.str();
}

} // namespace nodal
