#include "nodal/building.hpp"
#include "nodal/error.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nodal {

using json = nlohmann::json;

namespace {

// Wraps a JSON object and remembers which keys were read so that leftovers
// can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw ParseError(context_ + ": expected an object");
    }

    const json& required(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) throw ParseError(context_ + ": missing field '" + key + "'");
        seen_.insert(key);
        return *it;
    }

    const json* optional(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    double number(const std::string& key) { return as_number(required(key), key); }

    double number_or(const std::string& key, double fallback) {
        const json* v = optional(key);
        return v ? as_number(*v, key) : fallback;
    }

    std::optional<double> maybe_number(const std::string& key) {
        const json* v = optional(key);
        if (!v) return std::nullopt;
        return as_number(*v, key);
    }

    std::string string(const std::string& key) { return as_string(required(key), key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ParseError(context_ + ": unknown key '" + it.key() + "'");
        }
    }

    const std::string& context() const { return context_; }

    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) throw ParseError(context_ + ": field '" + key + "' must be a number");
        return v.get<double>();
    }

    std::string as_string(const json& v, const std::string& key) const {
        if (!v.is_string()) throw ParseError(context_ + ": field '" + key + "' must be a string");
        return v.get<std::string>();
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

const json& array_field(ObjectReader& r, const std::string& key, bool required) {
    static const json empty = json::array();
    const json* v = required ? &r.required(key) : r.optional(key);
    if (!v) return empty;
    if (!v->is_array()) throw ParseError(r.context() + ": field '" + key + "' must be an array");
    return *v;
}

BoundaryRef parse_boundary(const json& v, const std::string& context) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "exterior") return BoundaryRef::exterior();
        if (s == "ground") return BoundaryRef::ground();
        throw ParseError(context + ": boundary must be \"exterior\", \"ground\" or {\"zone\": id}, got '" + s + "'");
    }
    ObjectReader r(v, context);
    auto id = r.string("zone");
    r.finish();
    return BoundaryRef::of_zone(std::move(id));
}

json boundary_json(const BoundaryRef& b) {
    switch (b.kind) {
    case BoundaryRef::Kind::exterior: return "exterior";
    case BoundaryRef::Kind::ground: return "ground";
    case BoundaryRef::Kind::zone: return json{{"zone", b.zone}};
    }
    return nullptr;
}

Orientation parse_orientation(const std::string& s, const std::string& context) {
    if (s == "vertical") return Orientation::vertical;
    if (s == "horizontal-floor") return Orientation::horizontal_floor;
    if (s == "horizontal-ceiling") return Orientation::horizontal_ceiling;
    throw ParseError(context + ": unknown orientation '" + s + "'");
}

ConductionModel parse_model(const std::string& s, const std::string& context) {
    if (s == "R2C") return ConductionModel::r2c();
    static const std::regex pattern(R"(nodes\((\d+)\))");
    std::smatch m;
    if (std::regex_match(s, m, pattern)) return ConductionModel::nodes(std::stoi(m[1].str()));
    throw ParseError(context + ": conduction_model must be \"R2C\" or \"nodes(m)\", got '" + s + "'");
}

Material parse_material(const json& j) {
    ObjectReader r(j, "material");
    Material m;
    m.name = r.string("name");
    ObjectReader named(j, "material '" + m.name + "'");
    named.required("name");
    m.conductivity = named.number("conductivity");
    m.density = named.number("density");
    m.specific_heat = named.number("specific_heat");
    named.finish();
    return m;
}

ZoneSpec parse_zone(const json& j) {
    ObjectReader probe(j, "zone");
    ZoneSpec z;
    z.id = probe.string("id");
    ObjectReader r(j, "zone '" + z.id + "'");
    r.required("id");
    z.air_volume = r.number("air_volume");
    z.air_change_rate = r.number("air_change_rate");
    z.h_ci = r.number("h_ci");
    z.h_ri = r.number("h_ri");
    if (const json* v = r.optional("internal_gain_schedule")) {
        if (!v->is_null()) z.internal_gain_schedule = r.as_string(*v, "internal_gain_schedule");
    }
    if (const json* v = r.optional("h_ci_overrides")) {
        ObjectReader o(*v, r.context() + " h_ci_overrides");
        z.h_ci_overrides.vertical = o.maybe_number("vertical");
        z.h_ci_overrides.floor = o.maybe_number("floor");
        z.h_ci_overrides.ceiling = o.maybe_number("ceiling");
        o.finish();
    }
    z.air_capacity_multiplier = r.number_or("air_capacity_multiplier", 1.0);
    z.gain_convective_fraction = r.number_or("gain_convective_fraction", 1.0);
    r.finish();
    return z;
}

WallSpec parse_wall(const json& j) {
    ObjectReader probe(j, "wall");
    WallSpec w;
    w.name = probe.string("name");
    ObjectReader r(j, "wall '" + w.name + "'");
    r.required("name");
    w.area = r.number("area");
    for (const auto& lj : array_field(r, "layers", true)) {
        ObjectReader lr(lj, r.context() + " layer");
        Layer l;
        l.material = lr.string("material");
        l.thickness = lr.number("thickness");
        lr.finish();
        w.layers.push_back(std::move(l));
    }
    w.side1 = parse_boundary(r.required("side1"), r.context() + " side1");
    w.side2 = parse_boundary(r.required("side2"), r.context() + " side2");
    if (const json* v = r.optional("orientation")) w.orientation = parse_orientation(r.as_string(*v, "orientation"), r.context());
    if (const json* v = r.optional("conduction_model")) w.conduction_model = parse_model(r.as_string(*v, "conduction_model"), r.context());
    r.finish();
    return w;
}

WindowSpec parse_window(const json& j) {
    ObjectReader probe(j, "window");
    WindowSpec w;
    w.name = probe.string("name");
    ObjectReader r(j, "window '" + w.name + "'");
    r.required("name");
    w.area = r.number("area");
    w.conductance_per_area = r.number("conductance_per_area");
    w.side1 = parse_boundary(r.required("side1"), r.context() + " side1");
    w.side2 = parse_boundary(r.required("side2"), r.context() + " side2");
    r.finish();
    return w;
}

void check_unique(std::set<std::string>& seen, const std::string& name) {
    if (!seen.insert(name).second) throw DuplicateError(name);
}

void check_zone_ref(const BuildingDescription& b, const BoundaryRef& ref, const std::string& context) {
    if (ref.is_zone() && !b.find_zone(ref.zone)) throw ReferenceError(ref.zone, context);
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

template <class T, class Key>
const T* find_by(const std::vector<T>& items, std::string_view key, Key T::*member) {
    auto it = std::find_if(items.begin(), items.end(), [&](const T& t) { return t.*member == key; });
    return it == items.end() ? nullptr : &*it;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

const Material* BuildingDescription::find_material(std::string_view name) const { return find_by(materials, name, &Material::name); }
const ZoneSpec* BuildingDescription::find_zone(std::string_view id) const { return find_by(zones, id, &ZoneSpec::id); }
const WallSpec* BuildingDescription::find_wall(std::string_view name) const { return find_by(walls, name, &WallSpec::name); }
const WindowSpec* BuildingDescription::find_window(std::string_view name) const { return find_by(windows, name, &WindowSpec::name); }

BuildingDescription parse_building(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("syntax error", line, col);
    }

    BuildingDescription b;
    ObjectReader top(doc, "building");
    for (const auto& m : array_field(top, "materials", true)) b.materials.push_back(parse_material(m));
    for (const auto& z : array_field(top, "zones", true)) b.zones.push_back(parse_zone(z));
    for (const auto& w : array_field(top, "walls", false)) b.walls.push_back(parse_wall(w));
    for (const auto& w : array_field(top, "windows", false)) b.windows.push_back(parse_window(w));

    {
        ObjectReader r(top.required("exterior"), "exterior");
        b.exterior.h_ce = r.number("h_ce");
        b.exterior.h_re = r.number("h_re");
        b.exterior.h_ground = r.number_or("h_ground", b.exterior.h_ground);
        r.finish();
    }
    if (const json* sim = top.optional("simulation")) {
        ObjectReader r(*sim, "simulation");
        auto& s = b.simulation;
        s.dt = r.number_or("dt", s.dt);
        s.theta = r.number_or("theta", s.theta);
        s.tolerance = r.number_or("tolerance", s.tolerance);
        if (const json* v = r.optional("max_iterations")) {
            if (!v->is_number_integer()) throw ParseError("simulation: field 'max_iterations' must be an integer");
            s.max_iterations = v->get<int>();
        }
        if (const json* v = r.optional("horizon"); v && !v->is_null()) s.horizon = r.as_number(*v, "horizon");
        if (const json* v = r.optional("initial_temperature"); v && !v->is_null())
            s.initial_temperature = r.as_number(*v, "initial_temperature");
        s.air_density = r.number_or("air_density", s.air_density);
        s.air_specific_heat = r.number_or("air_specific_heat", s.air_specific_heat);
        if (const json* v = r.optional("interpolation")) {
            s.interpolation = r.as_string(*v, "interpolation");
            if (s.interpolation != "hold" && s.interpolation != "linear")
                throw ParseError("simulation: interpolation must be \"hold\" or \"linear\"");
        }
        r.finish();
    }
    top.finish();

    if (b.zones.empty()) throw ParseError("no zones");

    std::set<std::string> materials, zones, entities;
    for (const auto& m : b.materials) check_unique(materials, m.name);
    for (const auto& z : b.zones) check_unique(zones, z.id);
    for (const auto& w : b.walls) check_unique(entities, w.name);
    for (const auto& w : b.windows) check_unique(entities, w.name);

    for (const auto& w : b.walls) {
        for (const auto& l : w.layers)
            if (!b.find_material(l.material)) throw ReferenceError(l.material, "wall '" + w.name + "'");
        check_zone_ref(b, w.side1, "wall '" + w.name + "'");
        check_zone_ref(b, w.side2, "wall '" + w.name + "'");
    }
    for (const auto& w : b.windows) {
        check_zone_ref(b, w.side1, "window '" + w.name + "'");
        check_zone_ref(b, w.side2, "window '" + w.name + "'");
    }
    return b;
}

BuildingDescription load_building(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read building file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_building(ss.str());
}

std::string serialize_building(const BuildingDescription& b) {
    json doc;
    doc["materials"] = json::array();
    for (const auto& m : b.materials)
        doc["materials"].push_back({{"name", m.name}, {"conductivity", m.conductivity}, {"density", m.density}, {"specific_heat", m.specific_heat}});

    doc["zones"] = json::array();
    for (const auto& z : b.zones) {
        json zj = {{"id", z.id},
                   {"air_volume", z.air_volume},
                   {"air_change_rate", z.air_change_rate},
                   {"h_ci", z.h_ci},
                   {"h_ri", z.h_ri},
                   {"air_capacity_multiplier", z.air_capacity_multiplier},
                   {"gain_convective_fraction", z.gain_convective_fraction}};
        if (z.internal_gain_schedule) zj["internal_gain_schedule"] = *z.internal_gain_schedule;
        const auto& o = z.h_ci_overrides;
        if (o.vertical || o.floor || o.ceiling) {
            json oj = json::object();
            if (o.vertical) oj["vertical"] = *o.vertical;
            if (o.floor) oj["floor"] = *o.floor;
            if (o.ceiling) oj["ceiling"] = *o.ceiling;
            zj["h_ci_overrides"] = oj;
        }
        doc["zones"].push_back(zj);
    }

    doc["walls"] = json::array();
    for (const auto& w : b.walls) {
        json layers = json::array();
        for (const auto& l : w.layers) layers.push_back({{"material", l.material}, {"thickness", l.thickness}});
        doc["walls"].push_back({{"name", w.name},
                                {"area", w.area},
                                {"layers", layers},
                                {"side1", boundary_json(w.side1)},
                                {"side2", boundary_json(w.side2)},
                                {"orientation", std::string(to_string(w.orientation))},
                                {"conduction_model", to_string(w.conduction_model)}});
    }

    doc["windows"] = json::array();
    for (const auto& w : b.windows)
        doc["windows"].push_back({{"name", w.name},
                                  {"area", w.area},
                                  {"conductance_per_area", w.conductance_per_area},
                                  {"side1", boundary_json(w.side1)},
                                  {"side2", boundary_json(w.side2)}});

    doc["exterior"] = {{"h_ce", b.exterior.h_ce}, {"h_re", b.exterior.h_re}, {"h_ground", b.exterior.h_ground}};
    const auto& s = b.simulation;
    doc["simulation"] = {{"dt", s.dt},
                         {"theta", s.theta},
                         {"tolerance", s.tolerance},
                         {"max_iterations", s.max_iterations},
                         {"horizon", optional_json(s.horizon)},
                         {"initial_temperature", optional_json(s.initial_temperature)},
                         {"air_density", s.air_density},
                         {"air_specific_heat", s.air_specific_heat},
                         {"interpolation", s.interpolation}};
    return doc.dump(2);
}

std::vector<Violation> validate(const BuildingDescription& b) {
    std::vector<Violation> out;
    auto fail = [&](const std::string& entity, const std::string& rule) { out.push_back({entity, rule}); };

    if (b.zones.empty()) fail("building", "no zones");

    std::set<std::string> names;
    for (const auto& m : b.materials) {
        if (!names.insert("material:" + m.name).second) fail(m.name, "unique name");
        if (!(m.conductivity > 0)) fail(m.name, "conductivity>0");
        if (!(m.density > 0)) fail(m.name, "density>0");
        if (!(m.specific_heat > 0)) fail(m.name, "specific_heat>0");
    }

    names.clear();
    for (const auto& z : b.zones) {
        if (!names.insert(z.id).second) fail(z.id, "unique name");
        if (!(z.air_volume > 0)) fail(z.id, "air_volume>0");
        if (!(z.air_change_rate >= 0)) fail(z.id, "air_change_rate>=0");
        if (!(z.h_ci > 0)) fail(z.id, "h_ci>0");
        if (!(z.h_ri > 0)) fail(z.id, "h_ri>0");
        for (const auto& o : {z.h_ci_overrides.vertical, z.h_ci_overrides.floor, z.h_ci_overrides.ceiling})
            if (o && !(*o > 0)) fail(z.id, "h_ci override>0");
        if (!(z.air_capacity_multiplier > 0)) fail(z.id, "air_capacity_multiplier>0");
        if (!(z.gain_convective_fraction >= 0 && z.gain_convective_fraction <= 1)) fail(z.id, "gain_convective_fraction in [0,1]");
    }

    auto check_ref = [&](const std::string& entity, const BoundaryRef& r) {
        if (r.is_zone() && !b.find_zone(r.zone)) fail(entity, "reference resolves");
    };
    auto check_sides = [&](const std::string& entity, const BoundaryRef& s1, const BoundaryRef& s2) {
        if (s1 == s2) fail(entity, "sides distinct");
    };
    auto touches = [&](const std::string& zone) {
        auto side = [&](const BoundaryRef& r) { return r.is_zone() && r.zone == zone; };
        return std::any_of(b.walls.begin(), b.walls.end(), [&](const WallSpec& w) { return side(w.side1) || side(w.side2); }) ||
               std::any_of(b.windows.begin(), b.windows.end(), [&](const WindowSpec& w) { return side(w.side1) || side(w.side2); });
    };

    names.clear();
    for (const auto& w : b.walls) {
        if (!names.insert(w.name).second) fail(w.name, "unique name");
        if (!(w.area > 0)) fail(w.name, "area>0");
        if (w.layers.empty()) fail(w.name, "at least one layer");
        for (const auto& l : w.layers) {
            if (!b.find_material(l.material)) fail(w.name, "reference resolves");
            if (!(l.thickness > 0)) fail(w.name, "thickness>0");
        }
        check_ref(w.name, w.side1);
        check_ref(w.name, w.side2);
        check_sides(w.name, w.side1, w.side2);
        if (w.touches_ground() && !(w.side1 == w.side2)) {
            const int zone_sides = int(w.side1.is_zone()) + int(w.side2.is_zone());
            if (zone_sides != 1) fail(w.name, "ground wall single zone side");
        }
        if (!w.side1.is_zone() && !w.side2.is_zone() && !w.touches_ground()) fail(w.name, "at least one zone side");
        if (w.conduction_model.kind == ConductionModel::Kind::nodes && w.conduction_model.internal_nodes < 1)
            fail(w.name, "internal_nodes>=1");
    }
    for (const auto& w : b.windows) {
        if (!names.insert(w.name).second) fail(w.name, "unique name");
        if (!(w.area > 0)) fail(w.name, "area>0");
        if (!(w.conductance_per_area > 0)) fail(w.name, "conductance_per_area>0");
        check_ref(w.name, w.side1);
        check_ref(w.name, w.side2);
        check_sides(w.name, w.side1, w.side2);
        if (w.side1.kind == BoundaryRef::Kind::ground || w.side2.kind == BoundaryRef::Kind::ground) fail(w.name, "window not on ground");
        else if (!w.side1.is_zone() && !w.side2.is_zone()) fail(w.name, "at least one zone side");
    }

    for (const auto& z : b.zones)
        if (!touches(z.id)) fail(z.id, "zone reachable");

    if (!(b.exterior.h_ce > 0)) fail("exterior", "h_ce>0");
    if (!(b.exterior.h_re >= 0)) fail("exterior", "h_re>=0");
    if (!(b.exterior.h_ground > 0)) fail("exterior", "h_ground>0");

    const auto& s = b.simulation;
    if (!(s.dt > 0)) fail("simulation", "dt>0");
    if (!(s.theta >= 0.5 && s.theta <= 1.0)) fail("simulation", "theta in [0.5,1]");
    if (!(s.tolerance > 0)) fail("simulation", "tolerance>0");
    if (s.max_iterations < 1) fail("simulation", "max_iterations>=1");
    if (s.horizon && !(*s.horizon >= 0)) fail("simulation", "horizon>=0");
    if (!(s.air_density > 0)) fail("simulation", "air_density>0");
    if (!(s.air_specific_heat > 0)) fail("simulation", "air_specific_heat>0");
    if (s.interpolation != "hold" && s.interpolation != "linear") fail("simulation", "interpolation mode");
    return out;
}

RcParameters wall_rc_parameters(const WallSpec& w, const BuildingDescription& b) {
    RcParameters rc;
    for (const auto& l : w.layers) {
        const Material* m = b.find_material(l.material);
        if (!m) throw ReferenceError(l.material, "wall '" + w.name + "'");
        rc.resistance += l.thickness / (m->conductivity * w.area);
        rc.capacitance += m->density * m->specific_heat * l.thickness * w.area;
    }
    return rc;
}

std::string_view to_string(Orientation o) {
    switch (o) {
    case Orientation::vertical: return "vertical";
    case Orientation::horizontal_floor: return "horizontal-floor";
    case Orientation::horizontal_ceiling: return "horizontal-ceiling";
    }
    return "?";
}

std::string to_string(const ConductionModel& m) {
    if (m.kind == ConductionModel::Kind::r2c) return "R2C";
    return "nodes(" + std::to_string(m.internal_nodes) + ")";
}

std::string to_string(const BoundaryRef& r) {
    switch (r.kind) {
    case BoundaryRef::Kind::exterior: return "exterior";
    case BoundaryRef::Kind::ground: return "ground";
    case BoundaryRef::Kind::zone: return "zone:" + r.zone;
    }
    return "?";
}

} // namespace nodal
