#include "lifecycle/varx.hpp"
#include "lifecycle/errors.hpp"

#include <cmath>

namespace lifecycle {

VarxModel fit_varx(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x, int p,
                   int exog_lag,
                   const std::vector<std::uint8_t>* row_valid) {
    const int t_len = static_cast<int>(y.rows());
    const int n = static_cast<int>(y.cols());
    const int l = static_cast<int>(x.cols());
    if (p < 1) throw std::invalid_argument("lag order must be >= 1");
    if (l > 0 && x.rows() != y.rows())
        throw std::invalid_argument("exogenous length mismatch");
    if (exog_lag < 0) throw std::invalid_argument("exog_lag must be >= 0");

    const int ncols = 1 + n * p + l;
    auto valid = [&](int t) {
        return !row_valid || t >= static_cast<int>(row_valid->size()) ||
               (*row_valid)[static_cast<std::size_t>(t)] != 0;
    };

    std::vector<int> rows;
    const int t0 = std::max(p, l > 0 ? exog_lag : 0);
    for (int t = t0; t < t_len; ++t) {
        bool ok = valid(t);
        for (int i = 1; i <= p && ok; ++i) ok = valid(t - i);
        if (l > 0 && ok) ok = valid(t - exog_lag);
        if (ok) rows.push_back(t);
    }
    if (static_cast<int>(rows.size()) < ncols + 1)
        throw InsufficientDataError("varx fit: " + std::to_string(rows.size()) +
                                    " usable rows for " + std::to_string(ncols) +
                                    " regressors");

    Eigen::MatrixXd design(rows.size(), ncols);
    Eigen::MatrixXd response(rows.size(), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        int t = rows[r];
        design(r, 0) = 1.0;
        int c = 1;
        for (int i = 1; i <= p; ++i)
            for (int j = 0; j < n; ++j) design(r, c++) = y(t - i, j);
        for (int j = 0; j < l; ++j) design(r, c++) = x(t - exog_lag, j);
        response.row(r) = y.row(t);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    Eigen::MatrixXd beta = cod.solve(response); // ncols x n

    VarxModel model;
    model.n = n;
    model.p = p;
    model.l = l;
    model.exog_lag = exog_lag;
    model.bias = beta.row(0).transpose();
    model.ar.resize(static_cast<std::size_t>(p));
    int c = 1;
    for (int i = 0; i < p; ++i) {
        model.ar[static_cast<std::size_t>(i)] =
            beta.middleRows(c, n).transpose();
        c += n;
    }
    model.exog = l > 0 ? Eigen::MatrixXd(beta.middleRows(c, l).transpose())
                       : Eigen::MatrixXd(n, 0);

    Eigen::MatrixXd resid = response - design * beta;
    model.residual_scale.resize(n);
    for (int j = 0; j < n; ++j)
        model.residual_scale(j) =
            std::sqrt(resid.col(j).squaredNorm() /
                      static_cast<double>(resid.rows()));
    return model;
}

Eigen::VectorXd predict_one(const VarxModel& model,
                            const Eigen::MatrixXd& y_history,
                            const Eigen::MatrixXd& x_history) {
    const int t = static_cast<int>(y_history.rows());
    if (t < model.p)
        throw std::invalid_argument("history shorter than lag order");
    Eigen::VectorXd yhat = model.bias;
    for (int i = 1; i <= model.p; ++i)
        yhat += model.ar[static_cast<std::size_t>(i - 1)] *
                y_history.row(t - i).transpose();
    if (model.l > 0) {
        // Fitting used x_{t - exog_lag} for response t; predicting t+1
        // therefore reads x at history end - (exog_lag - 1).
        int idx = static_cast<int>(x_history.rows()) - model.exog_lag;
        if (model.exog_lag == 0) idx = static_cast<int>(x_history.rows()) - 1;
        if (idx < 0) throw std::invalid_argument("exogenous history too short");
        yhat += model.exog * x_history.row(idx).transpose();
    }
    return yhat;
}

nlohmann::json varx_to_json(const VarxModel& model) {
    nlohmann::json j;
    j["n"] = model.n;
    j["p"] = model.p;
    j["l"] = model.l;
    j["exog_lag"] = model.exog_lag;
    j["bias"] = std::vector<double>(model.bias.data(),
                                    model.bias.data() + model.bias.size());
    for (const auto& a : model.ar) {
        std::vector<std::vector<double>> m;
        for (int r = 0; r < a.rows(); ++r) {
            std::vector<double> row;
            for (int c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
            m.push_back(std::move(row));
        }
        j["ar"].push_back(m);
    }
    std::vector<std::vector<double>> b;
    for (int r = 0; r < model.exog.rows(); ++r) {
        std::vector<double> row;
        for (int c = 0; c < model.exog.cols(); ++c)
            row.push_back(model.exog(r, c));
        b.push_back(std::move(row));
    }
    j["exog"] = b;
    j["residual_scale"] = std::vector<double>(
        model.residual_scale.data(),
        model.residual_scale.data() + model.residual_scale.size());
    return j;
}

} // namespace lifecycle
