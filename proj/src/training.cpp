#include "phnet/training.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "phnet/errors.hpp"
#include "phnet/text.hpp"

namespace phnet {

std::string to_string(Algorithm a) {
    return a == Algorithm::levenberg_marquardt ? "levenberg_marquardt" : "gradient_descent";
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::goal_reached:
            return "goal_reached";
        case Termination::max_epochs:
            return "max_epochs";
        case Termination::gradient_vanished:
            return "gradient_vanished";
        case Termination::lambda_exceeded:
            return "lambda_exceeded";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "levenberg_marquardt" || s == "lm") {
        return Algorithm::levenberg_marquardt;
    }
    if (s == "gradient_descent" || s == "gd") {
        return Algorithm::gradient_descent;
    }
    throw ConfigError("unknown algorithm '" + s +
                      "', expected levenberg_marquardt or gradient_descent");
}

void TrainConfig::validate() const {
    if (max_epochs == 0) {
        throw ConfigError("train config: max_epochs must be positive");
    }
    if (!(mse_goal > 0.0)) {
        throw ConfigError("train config: mse_goal must be positive");
    }
    if (!(lambda_init > 0.0) || !(lambda_max > 0.0)) {
        throw ConfigError("train config: lambda_init and lambda_max must be positive");
    }
    if (!(lambda_up > 1.0)) {
        throw ConfigError("train config: lambda_up must exceed 1");
    }
    if (!(lambda_down > 0.0) || !(lambda_down < 1.0)) {
        throw ConfigError("train config: lambda_down must lie in (0, 1)");
    }
    if (!(min_grad_norm >= 0.0)) {
        throw ConfigError("train config: min_grad_norm must be non-negative");
    }
    if (!(learning_rate >= 0.0)) {
        throw ConfigError("train config: learning_rate must be non-negative");
    }
}

double mse(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size()) {
        throw ShapeError("mse: lengths differ, " + std::to_string(predicted.size()) + " vs " +
                         std::to_string(observed.size()));
    }
    if (predicted.empty()) {
        throw EmptyInput("mse: empty series");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - observed[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predicted.size());
}

namespace {

double mean_square(const std::vector<double>& r) {
    double acc = 0.0;
    for (double v : r) {
        acc += v * v;
    }
    return acc / static_cast<double>(r.size());
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

// J' * r with J given row-major.
std::vector<double> jt_times(const Matrix& jac, const std::vector<double>& r) {
    std::vector<double> g(jac.cols(), 0.0);
    for (std::size_t k = 0; k < jac.rows(); ++k) {
        const double rk = r[k];
        if (rk == 0.0) {
            continue;
        }
        for (std::size_t p = 0; p < jac.cols(); ++p) {
            g[p] += jac(k, p) * rk;
        }
    }
    return g;
}

// J' * J, symmetric.
Matrix normal_matrix(const Matrix& jac) {
    const std::size_t p = jac.cols();
    Matrix a(p, p);
    for (std::size_t k = 0; k < jac.rows(); ++k) {
        for (std::size_t i = 0; i < p; ++i) {
            const double jki = jac(k, i);
            if (jki == 0.0) {
                continue;
            }
            for (std::size_t j = i; j < p; ++j) {
                a(i, j) += jki * jac(k, j);
            }
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            a(i, j) = a(j, i);
        }
    }
    return a;
}

}  // namespace

LinearLeastSquares::LinearLeastSquares(Matrix a, std::vector<double> y)
    : a_(std::move(a)), y_(std::move(y)) {
    if (a_.rows() != y_.size()) {
        throw ShapeError("linear least squares: " + a_.shape_string() + " against rhs of length " +
                         std::to_string(y_.size()));
    }
}

std::vector<double> LinearLeastSquares::residuals(const std::vector<double>& params) const {
    std::vector<double> r = matvec(a_, params);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] -= y_[i];
    }
    return r;
}

MlpLeastSquares::MlpLeastSquares(MlpNetwork prototype, Matrix inputs, Matrix targets)
    : scratch_(std::move(prototype)), inputs_(std::move(inputs)), targets_(std::move(targets)) {
    if (inputs_.rows() == 0) {
        throw EmptyDataset("mlp least squares: empty batch");
    }
    if (inputs_.cols() != scratch_.n_in) {
        throw ShapeError("mlp least squares: " + std::to_string(inputs_.cols()) +
                         " input columns, network expects " + std::to_string(scratch_.n_in));
    }
    if (targets_.rows() != inputs_.rows() || targets_.cols() != scratch_.n_out) {
        throw ShapeError("mlp least squares: targets " + targets_.shape_string() +
                         " do not align with inputs " + inputs_.shape_string() + " and n_out " +
                         std::to_string(scratch_.n_out));
    }
}

std::size_t MlpLeastSquares::residual_count() const {
    return inputs_.rows() * scratch_.n_out;
}

std::vector<double> MlpLeastSquares::residuals(const std::vector<double>& params) const {
    unpack_params(scratch_, params);
    const Matrix pred = forward_batch(scratch_, inputs_);
    std::vector<double> r(residual_count());
    for (std::size_t s = 0; s < pred.rows(); ++s) {
        for (std::size_t o = 0; o < pred.cols(); ++o) {
            r[s * pred.cols() + o] = pred(s, o) - targets_(s, o);
        }
    }
    return r;
}

Matrix MlpLeastSquares::jacobian(const std::vector<double>& params) const {
    unpack_params(scratch_, params);
    return phnet::jacobian(scratch_, inputs_);
}

MlpNetwork MlpLeastSquares::network_with(const std::vector<double>& params) const {
    MlpNetwork net = scratch_;
    unpack_params(net, params);
    return net;
}

LmStepResult lm_step(const LeastSquaresProblem& problem, const std::vector<double>& params,
                     double lambda) {
    if (!(lambda > 0.0)) {
        throw ConfigError("lm_step: lambda must be positive");
    }
    const std::vector<double> r = problem.residuals(params);
    const Matrix jac = problem.jacobian(params);
    if (jac.rows() != r.size() || jac.cols() != params.size()) {
        throw ShapeError("lm_step: jacobian " + jac.shape_string() + " against " +
                         std::to_string(r.size()) + " residuals and " +
                         std::to_string(params.size()) + " parameters");
    }

    Matrix a = normal_matrix(jac);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        a(i, i) += lambda;
    }
    std::vector<double> rhs = jt_times(jac, r);
    for (double& v : rhs) {
        v = -v;
    }
    const std::vector<double> delta = solve_spd(a, rhs);

    LmStepResult out;
    out.candidate_params = params;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        out.candidate_params[i] += delta[i];
    }
    out.predicted_residuals = r;
    const std::vector<double> jd = matvec(jac, delta);
    for (std::size_t k = 0; k < jd.size(); ++k) {
        out.predicted_residuals[k] += jd[k];
    }
    return out;
}

LmStepResult lm_step(const MlpNetwork& net, const Matrix& inputs, const Matrix& targets,
                     double lambda) {
    const MlpLeastSquares problem(net, inputs, targets);
    return lm_step(problem, pack_params(net), lambda);
}

std::pair<std::vector<double>, TrainReport> lm_minimize(const LeastSquaresProblem& problem,
                                                        std::vector<double> initial,
                                                        const TrainConfig& cfg) {
    cfg.validate();
    if (initial.size() != problem.parameter_count()) {
        throw ShapeError("lm_minimize: " + std::to_string(initial.size()) +
                         " initial parameters, problem has " +
                         std::to_string(problem.parameter_count()));
    }

    std::vector<double> params = std::move(initial);
    std::vector<double> r = problem.residuals(params);
    double current = mean_square(r);
    if (!std::isfinite(current)) {
        throw RangeError("lm_minimize: initial parameters give non-finite error");
    }

    TrainReport report;
    report.config = cfg;
    report.seed = cfg.seed;
    report.mse_trace.push_back(current);
    report.termination = Termination::max_epochs;

    double lambda = cfg.lambda_init;
    bool stopped = false;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs && !stopped; ++epoch) {
        if (current <= cfg.mse_goal) {
            report.termination = Termination::goal_reached;
            break;
        }

        const Matrix jac = problem.jacobian(params);
        const std::vector<double> grad = jt_times(jac, r);
        if (norm2(grad) < cfg.min_grad_norm) {
            report.termination = Termination::gradient_vanished;
            break;
        }
        const Matrix normal = normal_matrix(jac);

        // Retry this epoch with growing damping until a step improves the MSE.
        bool accepted = false;
        while (!accepted) {
            Matrix damped = normal;
            for (std::size_t i = 0; i < damped.rows(); ++i) {
                damped(i, i) += lambda;
            }
            std::vector<double> rhs = grad;
            for (double& v : rhs) {
                v = -v;
            }

            std::optional<std::vector<double>> delta;
            try {
                delta = solve_spd(damped, rhs);
            } catch (const NotPositiveDefinite&) {
                // fall through to the rejection branch
            }

            if (delta) {
                std::vector<double> candidate = params;
                for (std::size_t i = 0; i < candidate.size(); ++i) {
                    candidate[i] += (*delta)[i];
                }
                const std::vector<double> r_cand = problem.residuals(candidate);
                const double cand_mse = mean_square(r_cand);
                if (std::isfinite(cand_mse) && cand_mse < current) {
                    params = std::move(candidate);
                    r = r_cand;
                    current = cand_mse;
                    lambda = std::max(lambda * cfg.lambda_down,
                                      std::numeric_limits<double>::min());
                    ++report.epochs_run;
                    report.mse_trace.push_back(current);
                    accepted = true;
                    continue;
                }
            }

            lambda *= cfg.lambda_up;
            if (lambda > cfg.lambda_max) {
                report.termination = Termination::lambda_exceeded;
                stopped = true;
                break;
            }
        }
    }

    if (current <= cfg.mse_goal) {
        report.termination = Termination::goal_reached;
    }
    report.final_train_mse = current;
    report.final_lambda = lambda;
    return {std::move(params), std::move(report)};
}

std::pair<std::vector<double>, TrainReport> gd_minimize(const LeastSquaresProblem& problem,
                                                        std::vector<double> initial,
                                                        const TrainConfig& cfg) {
    cfg.validate();
    if (initial.size() != problem.parameter_count()) {
        throw ShapeError("gd_minimize: " + std::to_string(initial.size()) +
                         " initial parameters, problem has " +
                         std::to_string(problem.parameter_count()));
    }

    std::vector<double> params = std::move(initial);
    std::vector<double> r = problem.residuals(params);
    double current = mean_square(r);
    if (!std::isfinite(current)) {
        throw RangeError("gd_minimize: initial parameters give non-finite error");
    }

    TrainReport report;
    report.config = cfg;
    report.seed = cfg.seed;
    report.mse_trace.push_back(current);
    report.termination = Termination::max_epochs;
    report.final_lambda = 0.0;

    const double n = static_cast<double>(problem.residual_count());
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (current <= cfg.mse_goal) {
            report.termination = Termination::goal_reached;
            break;
        }
        const Matrix jac = problem.jacobian(params);
        const std::vector<double> grad = jt_times(jac, r);
        if (norm2(grad) < cfg.min_grad_norm) {
            report.termination = Termination::gradient_vanished;
            break;
        }
        // dMSE/dp = (2/n) J'r
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= cfg.learning_rate * 2.0 * grad[i] / n;
        }
        r = problem.residuals(params);
        current = mean_square(r);
        ++report.epochs_run;
        report.mse_trace.push_back(current);
    }

    if (current <= cfg.mse_goal) {
        report.termination = Termination::goal_reached;
    }
    report.final_train_mse = current;
    return {std::move(params), std::move(report)};
}

namespace {

// Shared setup: normalize the dataset through the net's normalizers and
// build the residual problem.
MlpLeastSquares make_problem(const MlpNetwork& net, const Dataset& train_set) {
    if (train_set.empty()) {
        throw EmptyDataset("train: empty training set");
    }
    if (net.input_names.size() != net.n_in || net.target_names.size() != net.n_out) {
        throw ShapeError("train: network input/target names not attached");
    }
    const Matrix x_native = train_set.columns(net.input_names);
    const Matrix t_native = train_set.columns(net.target_names);
    return MlpLeastSquares(net, net.input_normalizer.apply_rows(x_native),
                           net.target_normalizer.apply_rows(t_native));
}

}  // namespace

std::pair<MlpNetwork, TrainReport> train(const MlpNetwork& net, const Dataset& train_set,
                                         const TrainConfig& cfg) {
    if (cfg.algorithm == Algorithm::gradient_descent) {
        return train_gd(net, train_set, cfg);
    }
    const MlpLeastSquares problem = make_problem(net, train_set);
    auto [params, report] = lm_minimize(problem, pack_params(net), cfg);
    return {problem.network_with(params), std::move(report)};
}

std::pair<MlpNetwork, TrainReport> train_gd(const MlpNetwork& net, const Dataset& train_set,
                                            const TrainConfig& cfg) {
    const MlpLeastSquares problem = make_problem(net, train_set);
    auto [params, report] = gd_minimize(problem, pack_params(net), cfg);
    return {problem.network_with(params), std::move(report)};
}

std::vector<std::pair<std::string, std::string>> config_echo(const TrainConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("max_epochs", std::to_string(cfg.max_epochs));
    out.emplace_back("mse_goal", format_g17(cfg.mse_goal));
    out.emplace_back("lambda_init", format_g17(cfg.lambda_init));
    out.emplace_back("lambda_up", format_g17(cfg.lambda_up));
    out.emplace_back("lambda_down", format_g17(cfg.lambda_down));
    out.emplace_back("lambda_max", format_g17(cfg.lambda_max));
    out.emplace_back("min_grad_norm", format_g17(cfg.min_grad_norm));
    out.emplace_back("seed", std::to_string(cfg.seed));
    out.emplace_back("algorithm", to_string(cfg.algorithm));
    out.emplace_back("learning_rate", format_g17(cfg.learning_rate));
    return out;
}

void write_train_report(const TrainReport& report,
                        const std::vector<std::pair<std::string, std::string>>& extra_config,
                        const std::string& path) {
    std::ostringstream out;
    out << "phnet_train_report_v1\n";
    out << "algorithm " << to_string(report.config.algorithm) << "\n";
    out << "termination " << to_string(report.termination) << "\n";
    out << "epochs_run " << report.epochs_run << "\n";
    out << "final_train_mse " << format_g17(report.final_train_mse) << "\n";
    out << "final_lambda " << format_g17(report.final_lambda) << "\n";
    out << "seed " << report.seed << "\n";
    out << "config_begin\n";
    for (const auto& [k, v] : config_echo(report.config)) {
        out << k << " = " << v << "\n";
    }
    for (const auto& [k, v] : extra_config) {
        out << k << " = " << v << "\n";
    }
    out << "config_end\n";
    write_file(path, out.str());
}

void write_mse_trace_csv(const TrainReport& report, const std::string& path) {
    std::ostringstream out;
    out << "epoch,mse\n";
    for (std::size_t i = 0; i < report.mse_trace.size(); ++i) {
        out << i << "," << format_g17(report.mse_trace[i]) << "\n";
    }
    write_file(path, out.str());
}

}  // namespace phnet
