#include "phnet/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "phnet/errors.hpp"
#include "phnet/rng.hpp"
#include "phnet/text.hpp"

namespace phnet {

double tansig(double x) {
    if (x > 20.0) {
        return 1.0;
    }
    if (x < -20.0) {
        return -1.0;
    }
    return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0;
}

namespace {

void check_net(const MlpNetwork& net) {
    if (net.w1.rows() != net.n_hidden || net.w1.cols() != net.n_in ||
        net.b1.size() != net.n_hidden || net.w2.rows() != net.n_out ||
        net.w2.cols() != net.n_hidden || net.b2.size() != net.n_out) {
        throw ShapeError("network: weight shapes disagree with layer sizes");
    }
}

// Hidden activations for one input row of a batch matrix.
void hidden_for_row(const MlpNetwork& net, const Matrix& inputs, std::size_t row,
                    std::vector<double>& h) {
    h.resize(net.n_hidden);
    for (std::size_t j = 0; j < net.n_hidden; ++j) {
        double z = net.b1[j];
        for (std::size_t i = 0; i < net.n_in; ++i) {
            z += net.w1(j, i) * inputs(row, i);
        }
        h[j] = tansig(z);
    }
}

}  // namespace

std::vector<double> forward(const MlpNetwork& net, const std::vector<double>& x) {
    check_net(net);
    if (x.size() != net.n_in) {
        throw ShapeError("forward: input length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(net.n_in));
    }
    std::vector<double> h(net.n_hidden);
    for (std::size_t j = 0; j < net.n_hidden; ++j) {
        double z = net.b1[j];
        for (std::size_t i = 0; i < net.n_in; ++i) {
            z += net.w1(j, i) * x[i];
        }
        h[j] = tansig(z);
    }
    std::vector<double> y(net.n_out);
    for (std::size_t o = 0; o < net.n_out; ++o) {
        double acc = net.b2[o];
        for (std::size_t j = 0; j < net.n_hidden; ++j) {
            acc += net.w2(o, j) * h[j];
        }
        y[o] = acc;
    }
    return y;
}

Matrix forward_batch(const MlpNetwork& net, const Matrix& inputs) {
    check_net(net);
    if (inputs.cols() != net.n_in) {
        throw ShapeError("forward_batch: " + std::to_string(inputs.cols()) +
                         " input columns, expected " + std::to_string(net.n_in));
    }
    Matrix out(inputs.rows(), net.n_out);
    std::vector<double> h;
    for (std::size_t r = 0; r < inputs.rows(); ++r) {
        hidden_for_row(net, inputs, r, h);
        for (std::size_t o = 0; o < net.n_out; ++o) {
            double acc = net.b2[o];
            for (std::size_t j = 0; j < net.n_hidden; ++j) {
                acc += net.w2(o, j) * h[j];
            }
            out(r, o) = acc;
        }
    }
    return out;
}

Matrix jacobian(const MlpNetwork& net, const Matrix& inputs) {
    check_net(net);
    if (inputs.rows() == 0) {
        throw EmptyInput("jacobian: empty batch");
    }
    if (inputs.cols() != net.n_in) {
        throw ShapeError("jacobian: " + std::to_string(inputs.cols()) +
                         " input columns, expected " + std::to_string(net.n_in));
    }

    const std::size_t p = net.parameter_count();
    const std::size_t w1_off = 0;
    const std::size_t b1_off = net.n_hidden * net.n_in;
    const std::size_t w2_off = b1_off + net.n_hidden;
    const std::size_t b2_off = w2_off + net.n_out * net.n_hidden;

    Matrix jac(inputs.rows() * net.n_out, p);
    std::vector<double> h;
    for (std::size_t r = 0; r < inputs.rows(); ++r) {
        hidden_for_row(net, inputs, r, h);
        for (std::size_t o = 0; o < net.n_out; ++o) {
            const std::size_t row = r * net.n_out + o;
            // Output layer: dy_o/dW2(o,j) = h_j, dy_o/db2(o) = 1.
            for (std::size_t j = 0; j < net.n_hidden; ++j) {
                jac(row, w2_off + o * net.n_hidden + j) = h[j];
            }
            jac(row, b2_off + o) = 1.0;
            // Hidden layer through tansig' = 1 - h^2.
            for (std::size_t j = 0; j < net.n_hidden; ++j) {
                const double back = net.w2(o, j) * (1.0 - h[j] * h[j]);
                jac(row, b1_off + j) = back;
                for (std::size_t i = 0; i < net.n_in; ++i) {
                    jac(row, w1_off + j * net.n_in + i) = back * inputs(r, i);
                }
            }
        }
    }
    return jac;
}

MlpNetwork init_weights(std::size_t n_in, std::size_t n_hidden, std::size_t n_out,
                        std::uint64_t seed) {
    if (n_in == 0 || n_hidden == 0 || n_out == 0) {
        throw ConfigError("init_weights: layer sizes must be positive");
    }
    MlpNetwork net;
    net.n_in = n_in;
    net.n_hidden = n_hidden;
    net.n_out = n_out;
    net.w1 = Matrix(n_hidden, n_in);
    net.b1.assign(n_hidden, 0.0);
    net.w2 = Matrix(n_out, n_hidden);
    net.b2.assign(n_out, 0.0);
    net.input_normalizer = Normalizer::identity(n_in);
    net.target_normalizer = Normalizer::identity(n_out);

    Rng rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(n_in));
    for (std::size_t j = 0; j < n_hidden; ++j) {
        for (std::size_t i = 0; i < n_in; ++i) {
            net.w1(j, i) = rng.uniform(-bound1, bound1);
        }
    }
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(n_hidden));
    for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t j = 0; j < n_hidden; ++j) {
            net.w2(o, j) = rng.uniform(-bound2, bound2);
        }
    }
    return net;
}

std::vector<double> pack_params(const MlpNetwork& net) {
    check_net(net);
    std::vector<double> out;
    out.reserve(net.parameter_count());
    out.insert(out.end(), net.w1.data().begin(), net.w1.data().end());
    out.insert(out.end(), net.b1.begin(), net.b1.end());
    out.insert(out.end(), net.w2.data().begin(), net.w2.data().end());
    out.insert(out.end(), net.b2.begin(), net.b2.end());
    return out;
}

void unpack_params(MlpNetwork& net, const std::vector<double>& params) {
    check_net(net);
    if (params.size() != net.parameter_count()) {
        throw ShapeError("unpack_params: got " + std::to_string(params.size()) +
                         " parameters, network has " + std::to_string(net.parameter_count()));
    }
    std::size_t k = 0;
    for (double& v : net.w1.data()) {
        v = params[k++];
    }
    for (double& v : net.b1) {
        v = params[k++];
    }
    for (double& v : net.w2.data()) {
        v = params[k++];
    }
    for (double& v : net.b2) {
        v = params[k++];
    }
}

namespace {

constexpr const char* kModelMagic = "phnet_model_v1";

void write_normalizer(std::ostringstream& out, const std::string& label, const Normalizer& n) {
    out << label << " " << n.size() << "\n";
    for (std::size_t i = 0; i < n.size(); ++i) {
        out << format_g17(n.min(i)) << " " << format_g17(n.max(i)) << "\n";
    }
}

class LineReader {
public:
    LineReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    std::string next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!trim(line).empty()) {
                return line;
            }
        }
        throw ParseError("model file " + path_ + ": unexpected end of file after line " +
                         std::to_string(line_no_));
    }

    std::string context() const { return path_ + " line " + std::to_string(line_no_); }

private:
    std::istream& in_;
    std::string path_;
    std::size_t line_no_ = 0;
};

std::vector<std::string> expect_fields(LineReader& r, const std::string& key,
                                       std::size_t min_fields) {
    const std::string line = r.next();
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) {
        fields.push_back(f);
    }
    if (fields.empty() || fields[0] != key || fields.size() < min_fields + 1) {
        throw ParseError("model file " + r.context() + ": expected '" + key + " ...', got '" +
                         line + "'");
    }
    fields.erase(fields.begin());
    return fields;
}

double expect_double(LineReader& r, const std::string& what) {
    const auto v = parse_double(r.next());
    if (!v) {
        throw ParseError("model file " + r.context() + ": cannot parse " + what);
    }
    return *v;
}

Normalizer read_normalizer(LineReader& r, const std::string& label) {
    const auto fields = expect_fields(r, label, 1);
    const auto count = parse_int(fields[0]);
    if (!count || *count < 0) {
        throw ParseError("model file " + r.context() + ": bad " + label + " count");
    }
    std::vector<double> mins;
    std::vector<double> maxs;
    for (long long i = 0; i < *count; ++i) {
        const std::string line = r.next();
        std::istringstream ss(line);
        std::string lo;
        std::string hi;
        if (!(ss >> lo >> hi)) {
            throw ParseError("model file " + r.context() + ": bad " + label + " entry");
        }
        const auto lov = parse_double(lo);
        const auto hiv = parse_double(hi);
        if (!lov || !hiv) {
            throw ParseError("model file " + r.context() + ": bad " + label + " entry");
        }
        mins.push_back(*lov);
        maxs.push_back(*hiv);
    }
    return Normalizer(std::move(mins), std::move(maxs));
}

}  // namespace

void save_model(const MlpNetwork& net, const ModelMetadata& meta, const std::string& path) {
    check_net(net);
    std::ostringstream out;
    out << kModelMagic << "\n";
    out << "schema " << meta.schema.count() << "\n";
    for (std::size_t i = 0; i < meta.schema.count(); ++i) {
        out << meta.schema.name(i) << "," << format_g17(meta.schema.range(i).min) << ","
            << format_g17(meta.schema.range(i).max) << "\n";
    }
    out << "targets";
    for (const auto& t : net.target_names) {
        out << " " << t;
    }
    out << "\n";
    out << "inputs";
    for (const auto& n : net.input_names) {
        out << " " << n;
    }
    out << "\n";
    out << "include_target_input " << (meta.include_target_input ? 1 : 0) << "\n";
    out << "n_in " << net.n_in << "\n";
    out << "n_hidden " << net.n_hidden << "\n";
    out << "n_out " << net.n_out << "\n";
    write_normalizer(out, "input_normalizer", net.input_normalizer);
    write_normalizer(out, "target_normalizer", net.target_normalizer);
    const auto params = pack_params(net);
    out << "params " << params.size() << "\n";
    for (double v : params) {
        out << format_g17(v) << "\n";
    }
    out << "seed " << meta.seed << "\n";
    out << "config_begin\n";
    for (const auto& [k, v] : meta.config_echo) {
        out << k << " = " << v << "\n";
    }
    out << "config_end\n";
    write_file(path, out.str());
}

std::pair<MlpNetwork, ModelMetadata> load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("model file not found: " + path);
    }
    LineReader r(in, path);
    if (trim(r.next()) != kModelMagic) {
        throw ParseError("model file " + path + ": bad magic line, expected " + kModelMagic);
    }

    ModelMetadata meta;
    const auto schema_fields = expect_fields(r, "schema", 1);
    const auto schema_count = parse_int(schema_fields[0]);
    if (!schema_count || *schema_count <= 0) {
        throw ParseError("model file " + r.context() + ": bad schema count");
    }
    std::vector<std::string> names;
    std::vector<ParameterRange> ranges;
    for (long long i = 0; i < *schema_count; ++i) {
        const auto fields = split_commas(r.next());
        if (fields.size() != 3) {
            throw ParseError("model file " + r.context() + ": bad schema entry");
        }
        const auto lo = parse_double(fields[1]);
        const auto hi = parse_double(fields[2]);
        if (!lo || !hi) {
            throw ParseError("model file " + r.context() + ": bad schema range");
        }
        names.push_back(trim(fields[0]));
        ranges.push_back({*lo, *hi});
    }
    meta.schema = ParameterSchema(std::move(names), std::move(ranges));

    MlpNetwork net;
    net.target_names = expect_fields(r, "targets", 1);
    net.input_names = expect_fields(r, "inputs", 1);
    const auto iti = expect_fields(r, "include_target_input", 1);
    meta.include_target_input = iti[0] == "1";

    auto read_count = [&](const char* key) {
        const auto fields = expect_fields(r, key, 1);
        const auto v = parse_int(fields[0]);
        if (!v || *v <= 0) {
            throw ParseError("model file " + r.context() + ": bad " + std::string(key));
        }
        return static_cast<std::size_t>(*v);
    };
    net.n_in = read_count("n_in");
    net.n_hidden = read_count("n_hidden");
    net.n_out = read_count("n_out");
    if (net.input_names.size() != net.n_in || net.target_names.size() != net.n_out) {
        throw ParseError("model file " + path + ": input/target name counts disagree with sizes");
    }

    net.input_normalizer = read_normalizer(r, "input_normalizer");
    net.target_normalizer = read_normalizer(r, "target_normalizer");
    if (net.input_normalizer.size() != net.n_in || net.target_normalizer.size() != net.n_out) {
        throw ParseError("model file " + path + ": normalizer sizes disagree with layer sizes");
    }

    net.w1 = Matrix(net.n_hidden, net.n_in);
    net.b1.assign(net.n_hidden, 0.0);
    net.w2 = Matrix(net.n_out, net.n_hidden);
    net.b2.assign(net.n_out, 0.0);

    const auto param_fields = expect_fields(r, "params", 1);
    const auto param_count = parse_int(param_fields[0]);
    if (!param_count || static_cast<std::size_t>(*param_count) != net.parameter_count()) {
        throw ParseError("model file " + path + ": parameter count disagrees with layer sizes");
    }
    std::vector<double> params;
    params.reserve(net.parameter_count());
    for (long long i = 0; i < *param_count; ++i) {
        params.push_back(expect_double(r, "parameter " + std::to_string(i)));
    }
    unpack_params(net, params);

    const auto seed_fields = expect_fields(r, "seed", 1);
    const auto seed = parse_uint(seed_fields[0]);
    if (!seed) {
        throw ParseError("model file " + path + ": bad seed");
    }
    meta.seed = *seed;

    if (trim(r.next()) != "config_begin") {
        throw ParseError("model file " + r.context() + ": expected config_begin");
    }
    for (;;) {
        const std::string line = r.next();
        if (trim(line) == "config_end") {
            break;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("model file " + r.context() + ": expected `key = value`");
        }
        meta.config_echo.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return {std::move(net), std::move(meta)};
}

}  // namespace phnet
