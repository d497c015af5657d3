#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phnet/dataset.hpp"
#include "phnet/matrix.hpp"
#include "phnet/network.hpp"

namespace phnet {

enum class Algorithm { levenberg_marquardt, gradient_descent };
enum class Termination { goal_reached, max_epochs, gradient_vanished, lambda_exceeded };

std::string to_string(Algorithm a);
std::string to_string(Termination t);
Algorithm parse_algorithm(const std::string& s);  // throws ConfigError

struct TrainConfig {
    std::size_t max_epochs = 200;
    double mse_goal = 0.0025;  // on normalized targets
    double lambda_init = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e10;
    double min_grad_norm = 1e-10;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::levenberg_marquardt;
    double learning_rate = 0.01;  // gradient descent only

    void validate() const;  // throws ConfigError
};

struct TrainReport {
    std::size_t epochs_run = 0;
    double final_train_mse = 0.0;  // normalized scale
    double final_lambda = 0.0;     // 0 under gradient descent
    std::vector<double> mse_trace;  // entry 0 is the pre-training MSE
    Termination termination = Termination::max_epochs;
    std::uint64_t seed = 0;
    TrainConfig config;
};

// Mean of squared differences.
double mse(const std::vector<double>& predicted, const std::vector<double>& observed);

// Residual interface for the damped Gauss-Newton core. Implementations must
// keep residual ordering consistent between residuals() and jacobian() rows.
class LeastSquaresProblem {
public:
    virtual ~LeastSquaresProblem() = default;
    virtual std::size_t residual_count() const = 0;
    virtual std::size_t parameter_count() const = 0;
    virtual std::vector<double> residuals(const std::vector<double>& params) const = 0;
    virtual Matrix jacobian(const std::vector<double>& params) const = 0;
};

// r(p) = A*p - y. Exercised by the LM exactness checks, where the analytic
// least-squares solution is available.
class LinearLeastSquares : public LeastSquaresProblem {
public:
    LinearLeastSquares(Matrix a, std::vector<double> y);

    std::size_t residual_count() const override { return y_.size(); }
    std::size_t parameter_count() const override { return a_.cols(); }
    std::vector<double> residuals(const std::vector<double>& params) const override;
    Matrix jacobian(const std::vector<double>&) const override { return a_; }

private:
    Matrix a_;
    std::vector<double> y_;
};

// The MLP regression residual: forward(batch) - targets, normalized space.
class MlpLeastSquares : public LeastSquaresProblem {
public:
    // inputs: n x n_in normalized features; targets: n x n_out normalized.
    MlpLeastSquares(MlpNetwork prototype, Matrix inputs, Matrix targets);

    std::size_t residual_count() const override;
    std::size_t parameter_count() const override { return scratch_.parameter_count(); }
    std::vector<double> residuals(const std::vector<double>& params) const override;
    Matrix jacobian(const std::vector<double>& params) const override;

    MlpNetwork network_with(const std::vector<double>& params) const;

private:
    mutable MlpNetwork scratch_;  // trainer is single-threaded by contract
    Matrix inputs_;
    Matrix targets_;
};

struct LmStepResult {
    std::vector<double> candidate_params;      // params + delta
    std::vector<double> predicted_residuals;   // linearized r + J*delta
};

// One damped Gauss-Newton solve (J'J + lambda I) delta = -J'r.
// NotPositiveDefinite propagates; the outer loop raises lambda and retries.
LmStepResult lm_step(const LeastSquaresProblem& problem, const std::vector<double>& params,
                     double lambda);
LmStepResult lm_step(const MlpNetwork& net, const Matrix& inputs, const Matrix& targets,
                     double lambda);

// Levenberg-Marquardt outer loop. Accepted steps strictly decrease the MSE
// and scale lambda down; rejected steps scale it up and retry the same
// epoch until lambda_max. Deterministic given (initial, problem, config).
std::pair<std::vector<double>, TrainReport> lm_minimize(const LeastSquaresProblem& problem,
                                                        std::vector<double> initial,
                                                        const TrainConfig& cfg);

// Full-batch gradient descent on the MSE, same stopping rules minus the
// lambda conditions.
std::pair<std::vector<double>, TrainReport> gd_minimize(const LeastSquaresProblem& problem,
                                                        std::vector<double> initial,
                                                        const TrainConfig& cfg);

// Trains net on train_set (native units; the net's normalizers are applied
// here). Dispatches on cfg.algorithm; levenberg_marquardt is the default.
std::pair<MlpNetwork, TrainReport> train(const MlpNetwork& net, const Dataset& train_set,
                                         const TrainConfig& cfg);
std::pair<MlpNetwork, TrainReport> train_gd(const MlpNetwork& net, const Dataset& train_set,
                                            const TrainConfig& cfg);

// Key/value form of a config, reused by the report writer and model files.
std::vector<std::pair<std::string, std::string>> config_echo(const TrainConfig& cfg);

// Structured text report; extra entries (e.g. n_hidden) join the config echo.
void write_train_report(const TrainReport& report,
                        const std::vector<std::pair<std::string, std::string>>& extra_config,
                        const std::string& path);

// Two-column CSV `epoch,mse`; epoch 0 is the pre-training MSE.
void write_mse_trace_csv(const TrainReport& report, const std::string& path);

}  // namespace phnet
