#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phnet/matrix.hpp"

namespace phnet {

struct ParameterRange {
    double min = 0.0;
    double max = 0.0;

    bool operator==(const ParameterRange& other) const = default;
};

// Ordered list of measured parameter names with per-parameter plausibility
// ranges in native units. Name matching is case-insensitive, so a "pH"
// column header satisfies the canonical "ph" entry.
class ParameterSchema {
public:
    ParameterSchema(std::vector<std::string> names, std::vector<ParameterRange> ranges);

    // The shipped 17-parameter water-quality schema. Fifteen names come from
    // the instrument lists of the sampling campaign; the final two slots are
    // placeholders (param16/param17) the user can rename via a schema file.
    static ParameterSchema default_water_quality();

    // Plain text, one parameter per line: either `name` or `name,min,max`.
    static ParameterSchema load(const std::string& path);
    void save(const std::string& path) const;

    std::size_t count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const ParameterRange& range(std::size_t i) const { return ranges_[i]; }

    bool has(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws SchemaMismatch

    bool operator==(const ParameterSchema& other) const = default;

private:
    std::vector<std::string> names_;
    std::vector<ParameterRange> ranges_;
};

// One sampling record: where it was taken, its per-location observation
// order, and the measured values in schema order (native units).
struct Sample {
    int location_id = 1;        // 1-10
    int sequence_index = 0;     // assigned by per-location order of appearance
    std::vector<double> values;
};

class Dataset {
public:
    explicit Dataset(ParameterSchema schema) : schema_(std::move(schema)) {}

    const ParameterSchema& schema() const { return schema_; }
    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }

    // Validates value count, finiteness, location 1-10 and, when the schema
    // carries a "ph" parameter, its 0-14 range. `context` names the source
    // row in error messages.
    void add_sample(Sample s, const std::string& context = "");

    // Values of one named parameter across all samples.
    std::vector<double> column(const std::string& name) const;

    // n x names.size() matrix of the given parameters, sample-major.
    Matrix columns(const std::vector<std::string>& names) const;

    std::vector<int> location_ids_present() const;
    Dataset filter_location(int location_id) const;

private:
    ParameterSchema schema_;
    std::vector<Sample> samples_;
    std::optional<std::size_t> ph_index_;
    bool ph_index_resolved_ = false;
};

// Affine per-feature map from native units onto [-1, 1], fitted on the
// training partition. Out-of-range inputs extrapolate linearly; clamping
// would silently flatten them. A feature whose min equals its max is flagged
// degenerate and maps to 0.
class Normalizer {
public:
    Normalizer() = default;
    Normalizer(std::vector<double> mins, std::vector<double> maxs);

    static Normalizer identity(std::size_t count);  // [-1,1] -> itself

    std::size_t size() const { return mins_.size(); }
    double min(std::size_t i) const { return mins_[i]; }
    double max(std::size_t i) const { return maxs_[i]; }
    bool degenerate(std::size_t i) const { return mins_[i] == maxs_[i]; }
    double half_range(std::size_t i) const { return (maxs_[i] - mins_[i]) / 2.0; }

    double apply_one(std::size_t i, double v) const;
    double invert_one(std::size_t i, double v) const;
    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> invert(const std::vector<double>& x) const;
    Matrix apply_rows(const Matrix& rows) const;

    // Sub-normalizer for a subset of features, in the given order.
    Normalizer select(const std::vector<std::size_t>& indices) const;

    bool operator==(const Normalizer& other) const = default;

private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

// Per-feature min/max over every schema parameter of d.
Normalizer fit_normalizer(const Dataset& d);

// CSV layout: header `location,seq,<param...>`, one column per schema
// parameter, order-insensitive against the schema. sequence_index is
// assigned by per-location order of appearance regardless of the stored seq
// value, so a save/load round trip is stable.
Dataset load_csv(const std::string& path, const ParameterSchema& schema);
void save_csv(const Dataset& d, const std::string& path);

// Deterministic seeded shuffle, then round(0.7*n) training samples (at least
// one on each side). Partition membership depends only on (n, seed); each
// partition keeps the original sample order.
std::pair<Dataset, Dataset> split_70_30(const Dataset& d, std::uint64_t seed);

}  // namespace phnet
