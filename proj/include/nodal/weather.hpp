#pragma once

#include "nodal/assembly.hpp"
#include "nodal/building.hpp"
#include "nodal/nodes.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nodal {

enum class Interpolation { hold, linear };

Interpolation parse_interpolation(std::string_view s);

struct WeatherRecord {
    double t = 0.0;  // s from simulation start
    double T_ae = 0.0;
    double T_sky = 0.0;
    double T_ground = 0.0;
    // Keyed by column name: sw_<surface> (W/m2), swi_<zone> and gain_<channel> (W).
    std::map<std::string, double> channels;

    double channel(const std::string& name) const;
};

struct WeatherSeries {
    std::vector<WeatherRecord> records;
    Interpolation mode = Interpolation::linear;

    struct Sample {
        WeatherRecord record;
        bool extrapolated = false;
    };

    // Values at time t. Outside the covered span the nearest record is held
    // and the sample is flagged.
    Sample at(double t) const;
    double start() const { return records.front().t; }
    double span() const { return records.back().t - records.front().t; }
};

// Header: t,T_ae,T_sky[,T_ground][,sw_<surface>...][,swi_<zone>...][,gain_<channel>...]
WeatherSeries parse_weather(std::string_view csv, const BuildingDescription& b, Interpolation mode = Interpolation::linear);
WeatherSeries load_weather(const std::string& path, const BuildingDescription& b, Interpolation mode = Interpolation::linear);

// Uniform series with a single record, handy for steady runs and tests.
WeatherSeries constant_weather(double T_ae, double T_sky, double T_ground);

struct Solicitation {
    BoundaryInputs inputs;
    bool extrapolated = false;
};

Solicitation solicitation_for_step(const WeatherSeries& ws, double t, const NodalStructure& s);

// Exterior air mass flow from a zone's volume and hourly air change rate.
double airflow_from_air_changes(double volume, double air_change_rate, double air_density);

} // namespace nodal
