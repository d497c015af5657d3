#include "phnet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "phnet/errors.hpp"
#include "phnet/rng.hpp"
#include "phnet/text.hpp"

namespace phnet {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Mean of a normal(mu, sigma) truncated to [a, b].
double truncated_mean(double mu, double sigma, double a, double b) {
    const double alpha = (a - mu) / sigma;
    const double beta = (b - mu) / sigma;
    const double z = normal_cdf(beta) - normal_cdf(alpha);
    if (z <= 0.0) {
        return mu < a ? a : b;
    }
    return mu + sigma * (normal_pdf(alpha) - normal_pdf(beta)) / z;
}

// The truncated mean is monotone in mu; bisect for the center that makes it
// hit the requested mean. Searching one full range beyond each bound covers
// every target mean that is not essentially at a boundary.
double solve_center(double target_mean, double sigma, double a, double b) {
    double lo = a - (b - a);
    double hi = b + (b - a);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (truncated_mean(mid, sigma, a, b) < target_mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void LocationProfile::validate() const {
    if (location_id < 1 || location_id > 10) {
        throw ConfigError("profile: location_id must be 1-10, got " +
                          std::to_string(location_id));
    }
    if (!(ph_min <= ph_mean && ph_mean <= ph_max)) {
        throw ConfigError("profile: requires ph_min <= ph_mean <= ph_max, got mean " +
                          format_g17(ph_mean) + " in [" + format_g17(ph_min) + ", " +
                          format_g17(ph_max) + "]");
    }
    if (params.size() != schema.count()) {
        throw ConfigError("profile: " + std::to_string(params.size()) +
                          " parameter models against schema of " +
                          std::to_string(schema.count()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!(params[i].noise >= 0.0)) {
            throw ConfigError("profile: negative noise for '" + schema.name(i) + "'");
        }
        if (!std::isfinite(params[i].base) || !std::isfinite(params[i].coupling)) {
            throw ConfigError("profile: non-finite model for '" + schema.name(i) + "'");
        }
    }
}

Dataset generate(const LocationProfile& profile, std::size_t n, std::uint64_t seed) {
    profile.validate();
    if (n < 2) {
        throw ConfigError("generate: need n >= 2, got " + std::to_string(n));
    }

    const std::size_t ph_idx = profile.schema.index_of("ph");
    const double range = profile.ph_max - profile.ph_min;
    const double sigma = range / 6.0;
    const double center =
        range > 0.0 ? solve_center(profile.ph_mean, sigma, profile.ph_min, profile.ph_max)
                    : profile.ph_mean;

    Rng rng(seed);
    Dataset out(profile.schema);
    for (std::size_t s = 0; s < n; ++s) {
        double ph = profile.ph_mean;
        if (range > 0.0) {
            double draw = center;
            bool inside = false;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                draw = rng.gaussian(center, sigma);
                if (draw >= profile.ph_min && draw <= profile.ph_max) {
                    inside = true;
                    break;
                }
            }
            ph = inside ? draw : std::clamp(draw, profile.ph_min, profile.ph_max);
        }

        Sample sample;
        sample.location_id = profile.location_id;
        sample.sequence_index = static_cast<int>(s);
        sample.values.resize(profile.schema.count());
        for (std::size_t i = 0; i < profile.schema.count(); ++i) {
            if (i == ph_idx) {
                sample.values[i] = ph;
                continue;
            }
            const ParameterModel& m = profile.params[i];
            double v = m.base + m.coupling * (ph - profile.ph_mean);
            if (m.noise > 0.0) {
                v += rng.gaussian(0.0, m.noise);
            }
            const ParameterRange& r = profile.schema.range(i);
            sample.values[i] = std::clamp(v, r.min, r.max);
        }
        out.add_sample(std::move(sample));
    }
    return out;
}

namespace {

// One parameter table shared by every shipped profile; only the pH
// statistics differ between locations. The four coupled parameters carry
// enough signal that pH is recoverable to roughly +-0.03 units, leaving a
// plain linear fit at R^2 near 0.97.
const std::vector<std::pair<std::string, ParameterModel>>& default_parameter_models() {
    static const std::vector<std::pair<std::string, ParameterModel>> table = {
        {"iron", {0.08, 0.0, 0.02}},
        {"chlorine_total", {0.6, 0.0, 0.15}},
        {"chlorine_free", {0.25, 0.0, 0.08}},
        {"calcium", {45.0, 0.0, 4.0}},
        {"magnesium", {14.0, 0.0, 1.5}},
        {"hardness", {150.0, 45.0, 2.7}},
        {"total_suspended_solids", {12.0, 0.0, 3.0}},
        {"sulfates", {48.0, 0.0, 5.0}},
        {"turbidity", {2.5, 0.0, 0.8}},
        {"ph", {0.0, 0.0, 0.0}},
        {"electrical_conductivity", {420.0, 90.0, 5.4}},
        {"total_dissolved_solids", {270.0, 60.0, 3.6}},
        {"salinity", {0.2, 0.0, 0.03}},
        {"temperature", {24.0, 8.0, 0.48}},
        {"dissolved_oxygen", {7.5, 0.0, 0.7}},
        {"param16", {1.0, 0.0, 0.1}},
        {"param17", {1.0, 0.0, 0.1}},
    };
    return table;
}

LocationProfile make_profile(int location_id, double mean, double lo, double hi,
                             bool paper_derived, std::string note) {
    LocationProfile p;
    p.location_id = location_id;
    p.ph_mean = mean;
    p.ph_min = lo;
    p.ph_max = hi;
    p.paper_derived = paper_derived;
    p.note = std::move(note);
    p.schema = ParameterSchema::default_water_quality();
    p.params.resize(p.schema.count());
    for (const auto& [name, model] : default_parameter_models()) {
        p.params[p.schema.index_of(name)] = model;
    }
    return p;
}

}  // namespace

std::vector<LocationProfile> shipped_profiles() {
    std::vector<LocationProfile> out;
    out.push_back(make_profile(1, 7.37, 6.8, 7.9, true, "location-1 river intake"));
    out.push_back(make_profile(2, 7.4, 6.9, 7.81, true, "location-2 lagoon"));
    out.push_back(make_profile(3, 7.3, 6.9, 7.7, true, "location-3 treatment plant inlet"));
    out.push_back(make_profile(
        4, 7.6, 7.5, 7.7, true,
        "location-4 filtration gallery; published mean 7.34 lies below the published minimum "
        "7.5, so this profile centers the published range instead"));
    out.push_back(make_profile(
        5, 7.5, 7.3, 7.7, false,
        "location-5 placeholder interpolated between locations 4 and 6; no published statistics"));
    out.push_back(make_profile(6, 7.4, 7.1, 7.7, true, "location-6 mixing chamber outlet"));
    out.push_back(make_profile(7, 7.54, 7.1, 7.85, true, "location-7 pumping station"));
    out.push_back(make_profile(
        8, 7.48, 7.05, 7.88, false,
        "location-8 placeholder interpolated between locations 7 and 10; no published "
        "statistics"));
    out.push_back(make_profile(
        9, 7.43, 7.0, 7.9, false,
        "location-9 placeholder interpolated between locations 7 and 10; no published "
        "statistics"));
    out.push_back(make_profile(10, 7.37, 7.0, 7.9, true, "location-10 pumping station outlet"));
    return out;
}

LocationProfile shipped_profile(int location_id) {
    for (auto& p : shipped_profiles()) {
        if (p.location_id == location_id) {
            return p;
        }
    }
    throw ConfigError("no shipped profile for location " + std::to_string(location_id));
}

LocationProfile load_profile(const std::string& path, const ParameterSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("profile not found: " + path);
    }

    LocationProfile profile;
    profile.schema = schema;
    profile.params.assign(schema.count(), ParameterModel{});
    profile.paper_derived = false;

    const std::size_t ph_idx = schema.index_of("ph");
    std::vector<bool> seen(schema.count(), false);
    seen[ph_idx] = true;

    std::string line;
    std::size_t line_no = 0;
    bool header_read = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t[0] == '#') {
            const std::string comment = trim(t.substr(1));
            if (profile.note.empty()) {
                profile.note = comment;
            }
            continue;
        }
        const auto fields = split_commas(t);
        if (!header_read) {
            if (fields.size() != 4) {
                throw ParseError("profile " + path + " line " + std::to_string(line_no) +
                                 ": expected header `location,ph_mean,ph_min,ph_max`");
            }
            const auto loc = parse_int(fields[0]);
            const auto mean = parse_double(fields[1]);
            const auto lo = parse_double(fields[2]);
            const auto hi = parse_double(fields[3]);
            if (!loc || !mean || !lo || !hi) {
                throw ParseError("profile " + path + " line " + std::to_string(line_no) +
                                 ": cannot parse header values");
            }
            profile.location_id = static_cast<int>(*loc);
            profile.ph_mean = *mean;
            profile.ph_min = *lo;
            profile.ph_max = *hi;
            header_read = true;
            continue;
        }
        if (fields.size() != 4) {
            throw ParseError("profile " + path + " line " + std::to_string(line_no) +
                             ": expected `name,base,coupling,noise`");
        }
        const std::string name = trim(fields[0]);
        if (!schema.has(name)) {
            throw SchemaMismatch("profile " + path + " line " + std::to_string(line_no) +
                                 ": parameter '" + name + "' not in schema");
        }
        const std::size_t idx = schema.index_of(name);
        if (seen[idx]) {
            throw ParseError("profile " + path + " line " + std::to_string(line_no) +
                             ": duplicate parameter '" + name + "'");
        }
        const auto base = parse_double(fields[1]);
        const auto coupling = parse_double(fields[2]);
        const auto noise = parse_double(fields[3]);
        if (!base || !coupling || !noise) {
            throw ParseError("profile " + path + " line " + std::to_string(line_no) +
                             ": cannot parse values for '" + name + "'");
        }
        profile.params[idx] = {*base, *coupling, *noise};
        seen[idx] = true;
    }
    if (!header_read) {
        throw ParseError("profile " + path + ": missing header line");
    }
    for (std::size_t i = 0; i < schema.count(); ++i) {
        if (!seen[i]) {
            throw SchemaMismatch("profile " + path + ": missing parameter '" + schema.name(i) +
                                 "'");
        }
    }
    profile.validate();
    return profile;
}

void save_profile(const LocationProfile& profile, const std::string& path) {
    std::ostringstream out;
    if (!profile.note.empty()) {
        out << "# " << profile.note << "\n";
    }
    if (!profile.paper_derived) {
        out << "# placeholder profile, statistics not taken from published data\n";
    }
    out << profile.location_id << "," << format_g17(profile.ph_mean) << ","
        << format_g17(profile.ph_min) << "," << format_g17(profile.ph_max) << "\n";
    const std::size_t ph_idx = profile.schema.index_of("ph");
    for (std::size_t i = 0; i < profile.schema.count(); ++i) {
        if (i == ph_idx) {
            continue;
        }
        out << profile.schema.name(i) << "," << format_g17(profile.params[i].base) << ","
            << format_g17(profile.params[i].coupling) << "," << format_g17(profile.params[i].noise)
            << "\n";
    }
    write_file(path, out.str());
}

}  // namespace phnet
