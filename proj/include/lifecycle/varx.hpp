#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <vector>

namespace lifecycle {

// p-lag vector autoregression with optional exogenous regressors,
// estimated by equation-wise least squares.
struct VarxModel {
    int n = 0; // response dimension
    int p = 1; // lag order
    int l = 0; // exogenous dimension
    int exog_lag = 1;
    Eigen::VectorXd bias;              // n
    std::vector<Eigen::MatrixXd> ar;   // p matrices, n x n
    Eigen::MatrixXd exog;              // n x l
    Eigen::VectorXd residual_scale;    // n, residual standard deviations
};

// y is T x n, x is T x l (or 0 columns). Regressor row for response at
// time t: [1, y_{t-1..t-p}, x_{t-exog_lag}]. Rows touching an invalid
// time index (row_valid) are dropped. Rank-deficient designs resolve to
// the minimum-norm solution.
VarxModel fit_varx(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, int p,
                   int exog_lag = 1,
                   const std::vector<std::uint8_t>* row_valid = nullptr);

// One-step-ahead prediction from histories running through time t.
Eigen::VectorXd predict_one(const VarxModel& model,
                            const Eigen::MatrixXd& y_history,
                            const Eigen::MatrixXd& x_history);

nlohmann::json varx_to_json(const VarxModel& model);

} // namespace lifecycle
