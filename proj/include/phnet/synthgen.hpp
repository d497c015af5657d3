#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phnet/dataset.hpp"

namespace phnet {

// How one non-target parameter is generated: a base level, a linear coupling
// to the pH deviation, and a Gaussian noise scale, all in native units.
struct ParameterModel {
    double base = 0.0;
    double coupling = 0.0;
    double noise = 0.0;
};

// Per-location generator calibration. pH is drawn from a Gaussian truncated
// to [ph_min, ph_max] whose center is adjusted so the truncated mean equals
// ph_mean; the coupled parameters then make pH recoverable from them, which
// is what gives a trained model something to learn.
struct LocationProfile {
    int location_id = 1;
    double ph_mean = 7.0;
    double ph_min = 6.5;
    double ph_max = 7.5;
    ParameterSchema schema = ParameterSchema::default_water_quality();
    std::vector<ParameterModel> params;  // aligned with schema; target entry unused
    bool paper_derived = false;          // false for interpolated placeholders
    std::string note;

    void validate() const;  // throws ConfigError
};

// Deterministic per seed. Each sample draws pH first (rejection sampling,
// capped at 1000 attempts, then clamped), then every other parameter as
// base + coupling*(pH - ph_mean) + noise, clipped to its plausibility range.
Dataset generate(const LocationProfile& profile, std::size_t n, std::uint64_t seed);

// All ten shipped profiles. Locations 1,2,3,4,6,7,10 carry the published
// per-location statistics (location 4's published mean lies below its
// published minimum, so its profile centers the published range instead and
// says so in its note); locations 5,8,9 are interpolated placeholders.
std::vector<LocationProfile> shipped_profiles();
LocationProfile shipped_profile(int location_id);

// Text format: optional `# comment` lines (the first becomes the note), a
// header line `location,ph_mean,ph_min,ph_max`, then one line per non-target
// parameter `name,base,coupling,noise`. Every non-target schema parameter
// must appear exactly once.
LocationProfile load_profile(const std::string& path, const ParameterSchema& schema);
void save_profile(const LocationProfile& profile, const std::string& path);

}  // namespace phnet
