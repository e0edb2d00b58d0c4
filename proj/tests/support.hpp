#pragma once

#include "nodal/assembly.hpp"
#include "nodal/building.hpp"
#include "nodal/nodes.hpp"
#include "nodal/solver.hpp"
#include "nodal/weather.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace nodal::testing {

inline std::string fixture(const std::string& name) { return std::string(NODAL_FIXTURE_DIR) + "/" + name; }

inline BuildingDescription load_fixture(const std::string& name) { return load_building(fixture(name)); }

inline const std::vector<std::string>& bundled_fixtures() {
    static const std::vector<std::string> names = {"single_zone.json", "two_zone.json", "three_zone_chain.json", "ground_zone.json"};
    return names;
}

// Random but valid buildings: a handful of zones, each with exterior walls,
// optional ground floors and roofs, interzone walls and windows between
// random pairs, mixed conduction models.
inline BuildingDescription random_building(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    auto model = [&]() {
        const int k = static_cast<int>(u(rng) * 4);
        return k == 0 ? ConductionModel::r2c() : ConductionModel::nodes(k);
    };

    BuildingDescription b;
    b.materials = {{"heavy", pick(0.8, 2.0), pick(1500, 2400), pick(800, 1000)},
                   {"light", pick(0.03, 0.06), pick(20, 60), pick(1000, 1500)},
                   {"board", pick(0.2, 0.6), pick(700, 1300), pick(900, 1200)}};
    auto layers = [&]() {
        std::vector<Layer> ls;
        const int n = 1 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < n; ++i) ls.push_back({b.materials[static_cast<std::size_t>(u(rng) * 3)].name, pick(0.01, 0.2)});
        return ls;
    };

    const int zones = 1 + static_cast<int>(u(rng) * 4);
    for (int z = 0; z < zones; ++z) {
        ZoneSpec spec;
        spec.id = "z" + std::to_string(z);
        spec.air_volume = pick(20, 80);
        spec.air_change_rate = u(rng) < 0.2 ? 0.0 : pick(0.1, 2.0);
        spec.h_ci = pick(1.5, 4.0);
        spec.h_ri = pick(4.0, 6.0);
        if (u(rng) < 0.3) spec.h_ci_overrides.ceiling = pick(0.5, 2.0);
        spec.gain_convective_fraction = pick(0.3, 1.0);
        b.zones.push_back(spec);
    }
    int count = 0;
    auto name = [&]() { return "e" + std::to_string(count++); };
    for (const auto& z : b.zones) {
        const int walls = 1 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < walls; ++i) {
            WallSpec w{name(), pick(5, 20), layers(), BoundaryRef::exterior(), BoundaryRef::of_zone(z.id), Orientation::vertical, model()};
            if (u(rng) < 0.5) std::swap(w.side1, w.side2);
            b.walls.push_back(w);
        }
        if (u(rng) < 0.4)
            b.walls.push_back({name(), pick(10, 30), layers(), BoundaryRef::of_zone(z.id), BoundaryRef::ground(),
                               Orientation::horizontal_floor, model()});
        if (u(rng) < 0.4)
            b.walls.push_back({name(), pick(10, 30), layers(), BoundaryRef::exterior(), BoundaryRef::of_zone(z.id),
                               Orientation::horizontal_ceiling, model()});
        if (u(rng) < 0.5) b.windows.push_back({name(), pick(1, 4), pick(1.0, 5.0), BoundaryRef::exterior(), BoundaryRef::of_zone(z.id)});
    }
    for (int z = 1; z < zones; ++z) {
        const int other = static_cast<int>(u(rng) * z);
        const Orientation o = u(rng) < 0.3 ? (u(rng) < 0.5 ? Orientation::horizontal_floor : Orientation::horizontal_ceiling)
                                           : Orientation::vertical;
        b.walls.push_back({name(), pick(5, 20), layers(), BoundaryRef::of_zone(b.zones[other].id), BoundaryRef::of_zone(b.zones[z].id), o,
                           model()});
        if (u(rng) < 0.3)
            b.windows.push_back({name(), pick(1, 3), pick(1.0, 4.0), BoundaryRef::of_zone(b.zones[z].id), BoundaryRef::of_zone(b.zones[other].id)});
    }
    b.exterior = {pick(10, 25), u(rng) < 0.2 ? 0.0 : pick(3, 6), pick(5, 30)};
    return b;
}

// Inputs with every boundary temperature at T and no fluxes; every zone's
// neighbors sit at T as well.
inline BoundaryInputs uniform_inputs(const NodalStructure& s, double T, bool with_airflow = true) {
    BoundaryInputs in;
    in.T_ae = in.T_sky = in.T_ground = T;
    for (const auto& z : s.zones) {
        ZoneSolicitation zs;
        zs.airflow = with_airflow ? airflow_from_air_changes(z.air_volume, z.air_change_rate, s.air_density) : 0.0;
        in.zones[z.id] = zs;
        in.neighbors[z.id] = {T, T};
    }
    for (const auto& n : s.nodes)
        if (is_outdoor_surface(n.type)) in.sw_exterior[n.abs_number] = 0.0;
    return in;
}

// Net heat entering the building through every boundary, and the largest
// single contribution, from the node records and a global temperature field.
struct BoundaryBalance {
    double net = 0.0;
    double largest = 0.0;
};

inline BoundaryBalance boundary_balance(const NodalStructure& s, const FilmCoefficients& f, const BoundaryInputs& in,
                                        const Eigen::VectorXd& T) {
    BoundaryBalance bal;
    auto add = [&](double q) {
        bal.net += q;
        bal.largest = std::max(bal.largest, std::abs(q));
    };
    for (const auto& n : s.nodes) {
        const double Tn = T(n.abs_number - 1);
        if (is_outdoor_surface(n.type)) {
            add(f.h_ce * n.area * (in.T_ae - Tn));
            add(f.h_re * n.area * (in.T_sky - Tn));
            auto it = in.sw_exterior.find(n.abs_number);
            if (it != in.sw_exterior.end()) add(it->second * n.area);
        }
        if (n.ground_conductance > 0) add(n.ground_conductance * (in.T_ground - Tn));
    }
    for (const auto& z : s.zones) {
        const auto& zs = in.zone(z.id);
        add(f.air_specific_heat * zs.airflow * (in.T_ae - T(z.air_node - 1)));
        add(zs.gain_convective);
        add(zs.gain_radiant);
        add(zs.convective_source);
        add(zs.sw_interior);
    }
    return bal;
}

// A weather series sampled every `step` seconds over `hours`, with
// sinusoidal outdoor air of the given period.
inline WeatherSeries sine_weather(double hours, double step, double mean, double amplitude, double period = 86400.0) {
    WeatherSeries w;
    const double pi = std::acos(-1.0);
    for (double t = 0.0; t <= hours * 3600.0 + 1e-9; t += step) {
        const double T = mean + amplitude * std::sin(2 * pi * t / period);
        w.records.push_back({t, T, T - 5.0, mean, {}});
    }
    return w;
}

} // namespace nodal::testing
