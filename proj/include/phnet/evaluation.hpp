#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phnet/dataset.hpp"
#include "phnet/network.hpp"

namespace phnet {

// Quality measures for one evaluation run. r_squared is the squared Pearson
// correlation (the convention behind the published scatter-plot values);
// r2_determination is 1 - SSE/SST, carried alongside for transparency. Both
// are absent when a series has no variance (e.g. a single sample).
struct EvalReport {
    std::string scope = "all";  // "location-K" when one location is present
    std::size_t n_samples = 0;
    double mse_normalized = 0.0;
    double mse_native = 0.0;  // squared native target units
    std::optional<double> r_squared;
    std::optional<double> r2_determination;
    std::vector<std::pair<double, double>> pairs;  // (observed, predicted) native
    double mean_observed = 0.0;
    double mean_predicted = 0.0;
    double min_observed = 0.0;
    double max_observed = 0.0;
    // Samples with at least one input outside the training range; predictions
    // for them are linear extrapolations.
    std::size_t extrapolated_inputs = 0;
};

// Squared Pearson correlation, clamped against floating-point overshoot so
// the result stays in [0, 1]. Throws DegenerateVariance when either series
// is constant (or has fewer than two points), ShapeError on length mismatch.
double r_squared(const std::vector<double>& observed, const std::vector<double>& predicted);

// 1 - SSE/SST. Negative for models worse than the mean predictor. Throws
// DegenerateVariance when observed is constant.
double r2_determination(const std::vector<double>& observed,
                        const std::vector<double>& predicted);

// Runs the network over every sample (normalizing inputs, denormalizing the
// prediction) and fills an EvalReport. Requires a single-output network.
EvalReport evaluate(const MlpNetwork& net, const Dataset& d);

struct SummaryStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summary_stats(const Dataset& d, const std::string& parameter);

void write_eval_report(const EvalReport& report, const std::string& path);
// `index,observed_ph,predicted_ph` rows in dataset order.
void write_pairs_csv(const EvalReport& report, const std::string& path);
// `observed,predicted` rows for scatter plots.
void write_scatter_csv(const EvalReport& report, const std::string& path);

}  // namespace phnet
