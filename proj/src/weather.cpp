#include "nodal/weather.hpp"
#include "nodal/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace nodal {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

double to_number(std::string_view field, std::size_t line, const std::string& column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParseError("weather: column '" + column + "' is not a number: '" + std::string(field) + "'", line, 1);
    return v;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

double lerp(double a, double b, double w) { return a + (b - a) * w; }

} // namespace

Interpolation parse_interpolation(std::string_view s) {
    if (s == "hold") return Interpolation::hold;
    if (s == "linear") return Interpolation::linear;
    throw Error("unknown interpolation mode '" + std::string(s) + "'");
}

double WeatherRecord::channel(const std::string& name) const {
    auto it = channels.find(name);
    return it == channels.end() ? 0.0 : it->second;
}

WeatherSeries::Sample WeatherSeries::at(double t) const {
    if (records.empty()) throw Error("empty weather series");
    if (t <= records.front().t) return {records.front(), t < records.front().t};
    if (t >= records.back().t) return {records.back(), t > records.back().t};

    auto hi = std::upper_bound(records.begin(), records.end(), t, [](double v, const WeatherRecord& r) { return v < r.t; });
    const WeatherRecord& b = *hi;
    const WeatherRecord& a = *(hi - 1);
    if (mode == Interpolation::hold || t == a.t) return {a, false};

    const double w = (t - a.t) / (b.t - a.t);
    WeatherRecord r;
    r.t = t;
    r.T_ae = lerp(a.T_ae, b.T_ae, w);
    r.T_sky = lerp(a.T_sky, b.T_sky, w);
    r.T_ground = lerp(a.T_ground, b.T_ground, w);
    for (const auto& [name, v] : a.channels) r.channels[name] = lerp(v, b.channel(name), w);
    return {r, false};
}

WeatherSeries parse_weather(std::string_view csv, const BuildingDescription& b, Interpolation mode) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t pos = 0, number = 0;
    while (pos <= csv.size()) {
        auto nl = csv.find('\n', pos);
        auto line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++number;
        if (!trim(line).empty()) lines.emplace_back(number, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (lines.empty()) throw ParseError("weather: missing header row");

    std::vector<std::string> header;
    for (auto f : split(lines.front().second)) header.emplace_back(f);
    if (!header.empty() && starts_with(header[0], "\xEF\xBB\xBF")) header[0].erase(0, 3);

    std::set<std::string> seen;
    for (const auto& h : header)
        if (!seen.insert(h).second) throw ParseError("weather: duplicate column '" + h + "'");
    for (const char* required : {"t", "T_ae", "T_sky"})
        if (!seen.count(required)) throw ParseError(std::string("weather: missing column '") + required + "'");
    const bool has_ground = seen.count("T_ground") > 0;

    std::set<std::string> gain_channels;
    for (const auto& z : b.zones) gain_channels.insert(z.gain_channel());

    for (const auto& h : header) {
        if (h == "t" || h == "T_ae" || h == "T_sky" || h == "T_ground") continue;
        if (starts_with(h, "swi_")) {
            const auto zone = h.substr(4);
            if (!b.find_zone(zone)) throw ReferenceError(zone, "weather column '" + h + "'");
        } else if (starts_with(h, "sw_")) {
            const auto name = h.substr(3);
            const WallSpec* w = b.find_wall(name);
            const WindowSpec* g = b.find_window(name);
            if (!w && !g) throw ReferenceError(name, "weather column '" + h + "'");
            const bool exterior = w ? (w->side1.kind == BoundaryRef::Kind::exterior || w->side2.kind == BoundaryRef::Kind::exterior)
                                    : (g->side1.kind == BoundaryRef::Kind::exterior || g->side2.kind == BoundaryRef::Kind::exterior);
            if (!exterior) throw ParseError("weather: column '" + h + "' names a surface without an exterior side");
        } else if (starts_with(h, "gain_")) {
            const auto channel = h.substr(5);
            if (!gain_channels.count(channel)) throw ReferenceError(channel, "weather column '" + h + "'");
        } else {
            throw ParseError("weather: unknown column '" + h + "'");
        }
    }

    WeatherSeries ws;
    ws.mode = mode;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto [line_no, line] = lines[k];
        auto fields = split(line);
        if (fields.size() != header.size())
            throw ParseError("weather: expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()),
                             line_no, 1);
        WeatherRecord r;
        for (std::size_t c = 0; c < header.size(); ++c) {
            const double v = to_number(fields[c], line_no, header[c]);
            const auto& h = header[c];
            if (h == "t") r.t = v;
            else if (h == "T_ae") r.T_ae = v;
            else if (h == "T_sky") r.T_sky = v;
            else if (h == "T_ground") r.T_ground = v;
            else r.channels[h] = v;
        }
        if (!ws.records.empty() && !(r.t > ws.records.back().t))
            throw ParseError("weather: timestamps must be strictly increasing", line_no, 1);
        ws.records.push_back(std::move(r));
    }
    if (ws.records.empty()) throw ParseError("weather: no records");

    if (!has_ground) {
        double mean = 0.0;
        for (const auto& r : ws.records) mean += r.T_ae;
        mean /= static_cast<double>(ws.records.size());
        for (auto& r : ws.records) r.T_ground = mean;
    }
    return ws;
}

WeatherSeries load_weather(const std::string& path, const BuildingDescription& b, Interpolation mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read weather file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_weather(ss.str(), b, mode);
}

WeatherSeries constant_weather(double T_ae, double T_sky, double T_ground) {
    WeatherSeries ws;
    ws.records.push_back({0.0, T_ae, T_sky, T_ground, {}});
    return ws;
}

double airflow_from_air_changes(double volume, double air_change_rate, double air_density) {
    return volume * air_density * air_change_rate / 3600.0;
}

Solicitation solicitation_for_step(const WeatherSeries& ws, double t, const NodalStructure& s) {
    const auto sample = ws.at(t);
    const WeatherRecord& r = sample.record;
    Solicitation out;
    out.extrapolated = sample.extrapolated;
    auto& in = out.inputs;
    in.T_ae = r.T_ae;
    in.T_sky = r.T_sky;
    in.T_ground = r.T_ground;

    for (const auto& n : s.nodes)
        if (is_outdoor_surface(n.type)) in.sw_exterior[n.abs_number] = r.channel("sw_" + n.parent);

    for (const auto& z : s.zones) {
        ZoneSolicitation zs;
        for (const auto& src : z.sources) zs.sw_interior += r.channel("swi_" + src);
        for (const auto& g : z.gains) {
            const double p = r.channel("gain_" + g.channel);
            zs.gain_convective += g.convective_fraction * p;
            zs.gain_radiant += (1.0 - g.convective_fraction) * p;
        }
        zs.airflow = airflow_from_air_changes(z.air_volume, z.air_change_rate, s.air_density);
        in.zones[z.id] = zs;
    }
    return out;
}

} // namespace nodal
