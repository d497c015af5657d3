#include "phnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "phnet/errors.hpp"
#include "phnet/rng.hpp"
#include "phnet/text.hpp"

namespace phnet {

ParameterSchema::ParameterSchema(std::vector<std::string> names,
                                 std::vector<ParameterRange> ranges)
    : names_(std::move(names)), ranges_(std::move(ranges)) {
    if (names_.empty()) {
        throw ConfigError("schema: needs at least one parameter");
    }
    if (ranges_.size() != names_.size()) {
        throw ConfigError("schema: " + std::to_string(names_.size()) + " names but " +
                          std::to_string(ranges_.size()) + " ranges");
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (trim(n).empty()) {
            throw ConfigError("schema: empty parameter name");
        }
        if (!seen.insert(to_lower(n)).second) {
            throw ConfigError("schema: duplicate parameter name '" + n + "'");
        }
    }
    for (std::size_t i = 0; i < ranges_.size(); ++i) {
        if (!(ranges_[i].max >= ranges_[i].min)) {
            throw ConfigError("schema: parameter '" + names_[i] + "' has max < min");
        }
    }
}

ParameterSchema ParameterSchema::default_water_quality() {
    // Fifteen measured parameters plus two unnamed slots; the sampling
    // campaign states 17 inputs but enumerates only these fifteen.
    static const std::vector<std::pair<std::string, ParameterRange>> spec = {
        {"iron", {0.0, 5.0}},
        {"chlorine_total", {0.0, 5.0}},
        {"chlorine_free", {0.0, 5.0}},
        {"calcium", {0.0, 500.0}},
        {"magnesium", {0.0, 200.0}},
        {"hardness", {0.0, 1000.0}},
        {"total_suspended_solids", {0.0, 500.0}},
        {"sulfates", {0.0, 500.0}},
        {"turbidity", {0.0, 100.0}},
        {"ph", {0.0, 14.0}},
        {"electrical_conductivity", {0.0, 5000.0}},
        {"total_dissolved_solids", {0.0, 2000.0}},
        {"salinity", {0.0, 5.0}},
        {"temperature", {0.0, 50.0}},
        {"dissolved_oxygen", {0.0, 20.0}},
        {"param16", {0.0, 100.0}},
        {"param17", {0.0, 100.0}},
    };
    std::vector<std::string> names;
    std::vector<ParameterRange> ranges;
    for (const auto& [n, r] : spec) {
        names.push_back(n);
        ranges.push_back(r);
    }
    return ParameterSchema(std::move(names), std::move(ranges));
}

ParameterSchema ParameterSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("schema file not found: " + path);
    }
    std::vector<std::string> names;
    std::vector<ParameterRange> ranges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto fields = split_commas(t);
        if (fields.size() == 1) {
            names.push_back(trim(fields[0]));
            ranges.push_back({-1e12, 1e12});
        } else if (fields.size() == 3) {
            const auto lo = parse_double(fields[1]);
            const auto hi = parse_double(fields[2]);
            if (!lo || !hi) {
                throw ParseError("schema file " + path + " line " + std::to_string(line_no) +
                                 ": expected `name,min,max`");
            }
            names.push_back(trim(fields[0]));
            ranges.push_back({*lo, *hi});
        } else {
            throw ParseError("schema file " + path + " line " + std::to_string(line_no) +
                             ": expected `name` or `name,min,max`");
        }
    }
    if (names.empty()) {
        throw ParseError("schema file " + path + ": no parameters");
    }
    return ParameterSchema(std::move(names), std::move(ranges));
}

void ParameterSchema::save(const std::string& path) const {
    std::ostringstream out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        out << names_[i] << "," << format_g17(ranges_[i].min) << "," << format_g17(ranges_[i].max)
            << "\n";
    }
    write_file(path, out.str());
}

bool ParameterSchema::has(const std::string& name) const {
    for (const auto& n : names_) {
        if (iequals(n, name)) {
            return true;
        }
    }
    return false;
}

std::size_t ParameterSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (iequals(names_[i], name)) {
            return i;
        }
    }
    throw SchemaMismatch("schema has no parameter named '" + name + "'");
}

void Dataset::add_sample(Sample s, const std::string& context) {
    const std::string where = context.empty() ? "" : " (" + context + ")";
    if (s.values.size() != schema_.count()) {
        throw ShapeError("sample has " + std::to_string(s.values.size()) + " values, schema has " +
                         std::to_string(schema_.count()) + where);
    }
    if (s.location_id < 1 || s.location_id > 10) {
        throw RangeError("location_id must be 1-10, got " + std::to_string(s.location_id) + where);
    }
    if (s.sequence_index < 0) {
        throw RangeError("sequence_index must be non-negative" + where);
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i])) {
            throw RangeError("non-finite value for parameter '" + schema_.name(i) + "'" + where);
        }
    }
    if (!ph_index_resolved_) {
        ph_index_resolved_ = true;
        if (schema_.has("ph")) {
            ph_index_ = schema_.index_of("ph");
        }
    }
    if (ph_index_) {
        const double ph = s.values[*ph_index_];
        if (ph < 0.0 || ph > 14.0) {
            throw RangeError("pH value " + format_g17(ph) + " outside 0-14" + where);
        }
    }
    samples_.push_back(std::move(s));
}

std::vector<double> Dataset::column(const std::string& name) const {
    const std::size_t idx = schema_.index_of(name);
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) {
        out.push_back(s.values[idx]);
    }
    return out;
}

Matrix Dataset::columns(const std::vector<std::string>& names) const {
    if (samples_.empty()) {
        throw EmptyDataset("columns: dataset is empty");
    }
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) {
        idx.push_back(schema_.index_of(n));
    }
    Matrix out(samples_.size(), names.size());
    for (std::size_t r = 0; r < samples_.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) {
            out(r, c) = samples_[r].values[idx[c]];
        }
    }
    return out;
}

std::vector<int> Dataset::location_ids_present() const {
    std::set<int> seen;
    for (const auto& s : samples_) {
        seen.insert(s.location_id);
    }
    return {seen.begin(), seen.end()};
}

Dataset Dataset::filter_location(int location_id) const {
    Dataset out(schema_);
    for (const auto& s : samples_) {
        if (s.location_id == location_id) {
            out.add_sample(s);
        }
    }
    return out;
}

Normalizer::Normalizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
    if (mins_.size() != maxs_.size()) {
        throw ShapeError("normalizer: min/max length mismatch");
    }
    for (std::size_t i = 0; i < mins_.size(); ++i) {
        if (!std::isfinite(mins_[i]) || !std::isfinite(maxs_[i]) || maxs_[i] < mins_[i]) {
            throw ConfigError("normalizer: invalid bounds for feature " + std::to_string(i));
        }
    }
}

Normalizer Normalizer::identity(std::size_t count) {
    return Normalizer(std::vector<double>(count, -1.0), std::vector<double>(count, 1.0));
}

double Normalizer::apply_one(std::size_t i, double v) const {
    if (degenerate(i)) {
        return 0.0;
    }
    return 2.0 * (v - mins_[i]) / (maxs_[i] - mins_[i]) - 1.0;
}

double Normalizer::invert_one(std::size_t i, double v) const {
    if (degenerate(i)) {
        return mins_[i];
    }
    return mins_[i] + (v + 1.0) * (maxs_[i] - mins_[i]) / 2.0;
}

std::vector<double> Normalizer::apply(const std::vector<double>& x) const {
    if (x.size() != size()) {
        throw ShapeError("normalizer: expected " + std::to_string(size()) + " features, got " +
                         std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = apply_one(i, x[i]);
    }
    return out;
}

std::vector<double> Normalizer::invert(const std::vector<double>& x) const {
    if (x.size() != size()) {
        throw ShapeError("normalizer: expected " + std::to_string(size()) + " features, got " +
                         std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = invert_one(i, x[i]);
    }
    return out;
}

Matrix Normalizer::apply_rows(const Matrix& rows) const {
    if (rows.cols() != size()) {
        throw ShapeError("normalizer: expected " + std::to_string(size()) + " features, got " +
                         std::to_string(rows.cols()) + " columns");
    }
    Matrix out(rows.rows(), rows.cols());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (std::size_t c = 0; c < rows.cols(); ++c) {
            out(r, c) = apply_one(c, rows(r, c));
        }
    }
    return out;
}

Normalizer Normalizer::select(const std::vector<std::size_t>& indices) const {
    std::vector<double> mins;
    std::vector<double> maxs;
    for (std::size_t i : indices) {
        if (i >= size()) {
            throw ShapeError("normalizer select: index " + std::to_string(i) + " out of range");
        }
        mins.push_back(mins_[i]);
        maxs.push_back(maxs_[i]);
    }
    return Normalizer(std::move(mins), std::move(maxs));
}

Normalizer fit_normalizer(const Dataset& d) {
    if (d.empty()) {
        throw EmptyDataset("fit_normalizer: dataset is empty");
    }
    const std::size_t p = d.schema().count();
    std::vector<double> mins(p, std::numeric_limits<double>::infinity());
    std::vector<double> maxs(p, -std::numeric_limits<double>::infinity());
    for (const auto& s : d.samples()) {
        for (std::size_t i = 0; i < p; ++i) {
            mins[i] = std::min(mins[i], s.values[i]);
            maxs[i] = std::max(maxs[i], s.values[i]);
        }
    }
    return Normalizer(std::move(mins), std::move(maxs));
}

namespace {

std::string csv_cell(const std::vector<std::string>& fields, std::size_t i) {
    return i < fields.size() ? trim(fields[i]) : std::string();
}

}  // namespace

Dataset load_csv(const std::string& path, const ParameterSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("data file not found: " + path);
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("csv " + path + ": missing header row");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_commas(line);

    // Resolve every required column, order-insensitively.
    auto find_column = [&](const std::string& want) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (iequals(trim(header[i]), want)) {
                return i;
            }
        }
        return std::nullopt;
    };

    const auto loc_col = find_column("location");
    const auto seq_col = find_column("seq");
    if (!loc_col) {
        throw SchemaMismatch("csv " + path + ": missing required column 'location'");
    }
    if (!seq_col) {
        throw SchemaMismatch("csv " + path + ": missing required column 'seq'");
    }
    std::vector<std::size_t> param_col(schema.count());
    for (std::size_t i = 0; i < schema.count(); ++i) {
        const auto col = find_column(schema.name(i));
        if (!col) {
            throw SchemaMismatch("csv " + path + ": missing column '" + schema.name(i) + "'");
        }
        param_col[i] = *col;
    }
    // Reject columns the schema does not know; they are usually typos.
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = trim(header[i]);
        if (iequals(h, "location") || iequals(h, "seq") || schema.has(h)) {
            continue;
        }
        throw SchemaMismatch("csv " + path + ": unexpected column '" + h + "'");
    }

    Dataset out(schema);
    std::map<int, int> next_seq;  // per-location order of appearance
    std::size_t row_no = 1;       // header was row 1
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_commas(line);
        if (fields.size() != header.size()) {
            throw ParseError("csv " + path + " row " + std::to_string(row_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(fields.size()));
        }

        Sample s;
        const auto loc = parse_int(csv_cell(fields, *loc_col));
        if (!loc) {
            throw ParseError("csv " + path + " row " + std::to_string(row_no) +
                             ": cannot parse 'location' cell '" + csv_cell(fields, *loc_col) +
                             "'");
        }
        const auto seq = parse_int(csv_cell(fields, *seq_col));
        if (!seq || *seq < 0) {
            throw ParseError("csv " + path + " row " + std::to_string(row_no) +
                             ": cannot parse 'seq' cell '" + csv_cell(fields, *seq_col) + "'");
        }
        s.location_id = static_cast<int>(*loc);
        s.values.resize(schema.count());
        for (std::size_t i = 0; i < schema.count(); ++i) {
            const std::string cell = csv_cell(fields, param_col[i]);
            const auto v = parse_double(cell);
            if (!v) {
                throw ParseError("csv " + path + " row " + std::to_string(row_no) +
                                 ": cannot parse '" + schema.name(i) + "' cell '" + cell + "'");
            }
            s.values[i] = *v;
        }
        s.sequence_index = next_seq[s.location_id]++;
        out.add_sample(std::move(s), path + " row " + std::to_string(row_no));
    }
    return out;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ostringstream out;
    out << "location,seq";
    for (const auto& n : d.schema().names()) {
        out << "," << n;
    }
    out << "\n";
    for (const auto& s : d.samples()) {
        out << s.location_id << "," << s.sequence_index;
        for (double v : s.values) {
            out << "," << format_g17(v);
        }
        out << "\n";
    }
    write_file(path, out.str());
}

std::pair<Dataset, Dataset> split_70_30(const Dataset& d, std::uint64_t seed) {
    const std::size_t n = d.size();
    if (n < 4) {
        throw TooFewSamples("split_70_30: need at least 4 samples, got " + std::to_string(n));
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {  // Fisher-Yates
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::size_t n_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
    n_train = std::max<std::size_t>(1, std::min(n_train, n - 1));

    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < n_train; ++i) {
        in_train[order[i]] = true;
    }

    Dataset train(d.schema());
    Dataset test(d.schema());
    for (std::size_t i = 0; i < n; ++i) {  // original order within each side
        if (in_train[i]) {
            train.add_sample(d.samples()[i]);
        } else {
            test.add_sample(d.samples()[i]);
        }
    }
    return {std::move(train), std::move(test)};
}

}  // namespace phnet
