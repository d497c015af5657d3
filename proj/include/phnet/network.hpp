#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phnet/dataset.hpp"
#include "phnet/matrix.hpp"

namespace phnet {

// One hidden layer of tansig units feeding a linear output layer, plus the
// normalization fitted at training time so a stored model is self-contained.
// forward/jacobian operate purely in normalized space; the pipeline wraps
// them with the attached normalizers.
struct MlpNetwork {
    std::size_t n_in = 0;
    std::size_t n_hidden = 0;
    std::size_t n_out = 0;
    Matrix w1;               // n_hidden x n_in
    std::vector<double> b1;  // n_hidden
    Matrix w2;               // n_out x n_hidden
    std::vector<double> b2;  // n_out

    Normalizer input_normalizer;            // n_in features, native -> [-1,1]
    Normalizer target_normalizer;           // n_out targets
    std::vector<std::string> input_names;   // dataset columns feeding the net
    std::vector<std::string> target_names;  // predicted columns (default {"ph"})

    std::size_t parameter_count() const {
        return n_hidden * n_in + n_hidden + n_out * n_hidden + n_out;
    }
};

// Hyperbolic-tangent sigmoid 2/(1+exp(-2x)) - 1, saturating cleanly for
// |x| > 20 instead of overflowing exp.
double tansig(double x);

// x must already be normalized and of length n_in; the result is the
// normalized prediction (linear output layer, no squashing).
std::vector<double> forward(const MlpNetwork& net, const std::vector<double>& x);

// Batch of normalized inputs, one sample per row; returns one row of
// predictions per sample.
Matrix forward_batch(const MlpNetwork& net, const Matrix& inputs);

// Exact reverse-mode derivatives of every output with respect to every
// parameter in ParamVector order. Row s*n_out + o is output o of sample s.
Matrix jacobian(const MlpNetwork& net, const Matrix& inputs);

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, biases
// zero, identity normalizers. Deterministic per seed.
MlpNetwork init_weights(std::size_t n_in, std::size_t n_hidden, std::size_t n_out,
                        std::uint64_t seed);

// ParamVector layout: W1 row-major, b1, W2 row-major, b2.
std::vector<double> pack_params(const MlpNetwork& net);
void unpack_params(MlpNetwork& net, const std::vector<double>& params);

// Attached to a stored model so a run can be reproduced from the file alone.
struct ModelMetadata {
    ParameterSchema schema = ParameterSchema::default_water_quality();
    bool include_target_input = false;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config_echo;
};

// Self-describing text format; doubles are written with 17 significant
// digits so save/load round-trips bit-exactly.
void save_model(const MlpNetwork& net, const ModelMetadata& meta, const std::string& path);
std::pair<MlpNetwork, ModelMetadata> load_model(const std::string& path);

}  // namespace phnet
