#include "phnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phnet/errors.hpp"
#include "phnet/text.hpp"

namespace phnet {

namespace {

void check_lengths(const std::vector<double>& observed, const std::vector<double>& predicted,
                   const char* who) {
    if (observed.size() != predicted.size()) {
        throw ShapeError(std::string(who) + ": lengths differ, " +
                         std::to_string(observed.size()) + " vs " +
                         std::to_string(predicted.size()));
    }
    if (observed.empty()) {
        throw EmptyInput(std::string(who) + ": empty series");
    }
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x;
    }
    return acc / static_cast<double>(v.size());
}

}  // namespace

double r_squared(const std::vector<double>& observed, const std::vector<double>& predicted) {
    check_lengths(observed, predicted, "r_squared");
    if (observed.size() < 2) {
        throw DegenerateVariance("r_squared: needs at least two points");
    }
    const double mo = mean_of(observed);
    const double mp = mean_of(predicted);
    double cov = 0.0;
    double var_o = 0.0;
    double var_p = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d_o = observed[i] - mo;
        const double d_p = predicted[i] - mp;
        cov += d_o * d_p;
        var_o += d_o * d_o;
        var_p += d_p * d_p;
    }
    if (var_o == 0.0) {
        throw DegenerateVariance("r_squared: observed series is constant");
    }
    if (var_p == 0.0) {
        throw DegenerateVariance("r_squared: predicted series is constant");
    }
    const double r2 = (cov * cov) / (var_o * var_p);
    return std::min(r2, 1.0);
}

double r2_determination(const std::vector<double>& observed,
                        const std::vector<double>& predicted) {
    check_lengths(observed, predicted, "r2_determination");
    if (observed.size() < 2) {
        throw DegenerateVariance("r2_determination: needs at least two points");
    }
    const double mo = mean_of(observed);
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - predicted[i];
        const double d = observed[i] - mo;
        sse += e * e;
        sst += d * d;
    }
    if (sst == 0.0) {
        throw DegenerateVariance("r2_determination: observed series is constant");
    }
    return 1.0 - sse / sst;
}

EvalReport evaluate(const MlpNetwork& net, const Dataset& d) {
    if (d.empty()) {
        throw EmptyDataset("evaluate: empty dataset");
    }
    if (net.n_out != 1) {
        throw ShapeError("evaluate: reporting expects a single-output network, got n_out = " +
                         std::to_string(net.n_out));
    }

    const Matrix x_native = d.columns(net.input_names);
    const Matrix t_native = d.columns(net.target_names);
    const Matrix x = net.input_normalizer.apply_rows(x_native);
    const Matrix pred_norm = forward_batch(net, x);
    const Matrix t_norm = net.target_normalizer.apply_rows(t_native);

    EvalReport report;
    report.n_samples = d.size();
    const auto locations = d.location_ids_present();
    if (locations.size() == 1) {
        report.scope = "location-" + std::to_string(locations.front());
    }

    std::vector<double> observed;
    std::vector<double> predicted;
    observed.reserve(d.size());
    predicted.reserve(d.size());
    double acc_norm = 0.0;
    double acc_native = 0.0;
    for (std::size_t s = 0; s < d.size(); ++s) {
        for (std::size_t i = 0; i < net.n_in; ++i) {
            const double v = x_native(s, i);
            if (v < net.input_normalizer.min(i) || v > net.input_normalizer.max(i)) {
                ++report.extrapolated_inputs;
                break;
            }
        }
        const double obs = t_native(s, 0);
        const double pre = net.target_normalizer.invert_one(0, pred_norm(s, 0));
        observed.push_back(obs);
        predicted.push_back(pre);
        report.pairs.emplace_back(obs, pre);
        const double dn = pred_norm(s, 0) - t_norm(s, 0);
        acc_norm += dn * dn;
        const double dv = pre - obs;
        acc_native += dv * dv;
    }
    report.mse_normalized = acc_norm / static_cast<double>(d.size());
    report.mse_native = acc_native / static_cast<double>(d.size());
    report.mean_observed = mean_of(observed);
    report.mean_predicted = mean_of(predicted);
    report.min_observed = *std::min_element(observed.begin(), observed.end());
    report.max_observed = *std::max_element(observed.begin(), observed.end());
    try {
        report.r_squared = r_squared(observed, predicted);
    } catch (const DegenerateVariance&) {
        // left empty; the report notes the degeneracy
    }
    try {
        report.r2_determination = r2_determination(observed, predicted);
    } catch (const DegenerateVariance&) {
    }
    return report;
}

SummaryStats summary_stats(const Dataset& d, const std::string& parameter) {
    if (d.empty()) {
        throw EmptyDataset("summary_stats: empty dataset");
    }
    const std::vector<double> values = d.column(parameter);
    SummaryStats out;
    out.mean = mean_of(values);
    out.min = *std::min_element(values.begin(), values.end());
    out.max = *std::max_element(values.begin(), values.end());
    return out;
}

void write_eval_report(const EvalReport& report, const std::string& path) {
    std::ostringstream out;
    out << "phnet_eval_report_v1\n";
    out << "scope " << report.scope << "\n";
    out << "n_samples " << report.n_samples << "\n";
    out << "mse_normalized " << format_g17(report.mse_normalized) << "\n";
    out << "mse_native " << format_g17(report.mse_native) << "\n";
    if (report.r_squared) {
        out << "r_squared " << format_g17(*report.r_squared) << "\n";
    } else {
        out << "r_squared NA degenerate_variance\n";
    }
    if (report.r2_determination) {
        out << "r2_determination " << format_g17(*report.r2_determination) << "\n";
    } else {
        out << "r2_determination NA degenerate_variance\n";
    }
    out << "mean_observed " << format_g17(report.mean_observed) << "\n";
    out << "mean_predicted " << format_g17(report.mean_predicted) << "\n";
    out << "range_observed " << format_g17(report.min_observed) << " "
        << format_g17(report.max_observed) << "\n";
    out << "extrapolated_inputs " << report.extrapolated_inputs << "\n";
    write_file(path, out.str());
}

void write_pairs_csv(const EvalReport& report, const std::string& path) {
    std::ostringstream out;
    out << "index,observed_ph,predicted_ph\n";
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        out << i << "," << format_g17(report.pairs[i].first) << ","
            << format_g17(report.pairs[i].second) << "\n";
    }
    write_file(path, out.str());
}

void write_scatter_csv(const EvalReport& report, const std::string& path) {
    std::ostringstream out;
    out << "observed,predicted\n";
    for (const auto& [obs, pre] : report.pairs) {
        out << format_g17(obs) << "," << format_g17(pre) << "\n";
    }
    write_file(path, out.str());
}

}  // namespace phnet
