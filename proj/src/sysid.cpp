#include "thermik/sysid.hpp"

#include <cmath>
#include <vector>

#include "thermik/filters.hpp"

namespace thermik::sysid {

std::string resolve_actuator(const TelemetryLog& log, const std::string& node_id,
                             const std::string& actuator_id) {
    if (!actuator_id.empty()) {
        if (log.actuator_index(actuator_id) < 0)
            throw SchemaError("telemetry has no effort column for actuator '" + actuator_id + "'");
        return actuator_id;
    }
    if (log.actuator_ids.size() == 1) return log.actuator_ids.front();
    throw SchemaError("node '" + node_id + "': actuator id required, log has " +
                      std::to_string(log.actuator_ids.size()) + " effort columns");
}

RegressionSet build_regression(const TelemetryLog& log, const std::string& node_id,
                               const std::string& actuator_id, double temp_cutoff_hz,
                               double effort_cutoff_hz, double transient_drop_taus) {
    log.validate();
    const int node = log.node_index(node_id);
    if (node < 0) {
        std::string known;
        for (const auto& id : log.node_ids) known += (known.empty() ? "" : ", ") + id;
        throw SchemaError("unknown node '" + node_id + "'; log has: " + known);
    }
    const int act = log.actuator_index(resolve_actuator(log, node_id, actuator_id));

    const double fs = log.sample_rate_hz();
    const Eigen::VectorXd temp_raw = log.temperatures.col(node);
    const Eigen::VectorXd temp_filt = lowpass(temp_raw, temp_cutoff_hz, fs);
    const Eigen::VectorXd rate = derivative_filter(temp_raw, temp_cutoff_hz, fs);

    // the model identity is linear in (T, dT/dt, F^2, F, 1), so it survives
    // filtering only when every term passes the same filter: the effort
    // features are denoised at effort_cutoff and then pushed through the
    // temperature-band filter like the left-hand side
    const Eigen::VectorXd effort_denoised = lowpass(log.efforts.col(act), effort_cutoff_hz, fs);
    const Eigen::VectorXd effort_sq_filt =
        lowpass(effort_denoised.array().square().matrix(), temp_cutoff_hz, fs);
    const Eigen::VectorXd effort_filt = lowpass(effort_denoised, temp_cutoff_hz, fs);

    const double tau = filter_time_constant(temp_cutoff_hz);
    const Eigen::Index drop = Eigen::Index(std::ceil(transient_drop_taus * tau * fs));
    const Eigen::Index m = log.samples() - drop;
    if (m < 10)
        throw SchemaError("telemetry too short: " + std::to_string(log.samples()) +
                          " samples leave " + std::to_string(m) +
                          " rows after dropping the filter transient");

    RegressionSet set;
    set.features.resize(m, 4);
    set.targets.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index k = i + drop;
        set.features(i, 0) = -rate(k);
        set.features(i, 1) = effort_sq_filt(k);
        set.features(i, 2) = -effort_filt(k);
        set.features(i, 3) = 1.0;
        set.targets(i) = temp_filt(k) - log.ambient(k);
    }
    set.mean_ambient = log.ambient.tail(m).mean();
    if (!set.features.allFinite() || !set.targets.allFinite())
        throw InvalidInputError("regression rows contain non-finite values");
    return set;
}

std::pair<RegressionSet, ScalingStats> zscore(const RegressionSet& set) {
    const Eigen::Index m = set.rows();
    if (m < 2) throw InvalidInputError("zscore: need at least 2 rows");

    ScalingStats stats;
    stats.mean_ambient = set.mean_ambient;
    RegressionSet scaled = set;
    static const char* names[3] = {"-dT/dt", "F^2", "-F"};
    for (int j = 0; j < 3; ++j) {
        const auto col = set.features.col(j);
        const double mean = col.mean();
        const double sigma = std::sqrt((col.array() - mean).square().sum() / double(m));
        if (sigma <= 1e-12 * (std::abs(mean) + 1.0))
            throw DegenerateDataError(std::string("zscore: feature column ") + names[j] +
                                      " has no variance (sigma=" + std::to_string(sigma) + ")");
        stats.feature_mean(j) = mean;
        stats.feature_sigma(j) = sigma;
        scaled.features.col(j) = (col.array() - mean) / sigma;
    }
    stats.target_mean = set.targets.mean();
    stats.target_sigma =
        std::sqrt((set.targets.array() - stats.target_mean).square().sum() / double(m));
    if (stats.target_sigma <= 1e-12 * (std::abs(stats.target_mean) + 1.0))
        throw DegenerateDataError("zscore: target column has no variance");
    scaled.targets = (set.targets.array() - stats.target_mean) / stats.target_sigma;
    return {std::move(scaled), stats};
}

Eigen::Vector4d unscale_features(const Eigen::Vector4d& scaled, const ScalingStats& stats) {
    Eigen::Vector4d x;
    for (int j = 0; j < 3; ++j) x(j) = scaled(j) * stats.feature_sigma(j) + stats.feature_mean(j);
    x(3) = scaled(3);
    return x;
}

Eigen::Vector4d batch_gradient_descent(const RegressionSet& scaled, double learning_rate,
                                       long max_iterations, double gradient_tolerance,
                                       FitReport* report) {
    if (!(learning_rate > 0.0))
        throw InvalidInputError("batch gradient descent: learning rate must be positive");
    const Eigen::Index m = scaled.rows();
    if (m == 0) throw InvalidInputError("batch gradient descent: empty regression set");

    // L(theta) = 1/(2m) ||X theta - y||^2; with G = X^T X / m and b = X^T y / m
    // the loss and gradient reduce to 4x4 forms, so iterations are O(1) in m.
    const Eigen::Matrix4d gram = scaled.features.transpose() * scaled.features / double(m);
    const Eigen::Vector4d moment = scaled.features.transpose() * scaled.targets / double(m);
    const double target_sq = scaled.targets.squaredNorm() / double(m);

    auto loss_at = [&](const Eigen::Vector4d& t) {
        return 0.5 * (t.dot(gram * t) - 2.0 * moment.dot(t) + target_sq);
    };

    Eigen::Vector4d theta = Eigen::Vector4d::Zero();
    double loss = loss_at(theta);
    std::vector<double> curve;
    const long stride = report ? report->loss_curve_stride : 100;
    int rising = 0;
    long iter = 0;
    for (; iter < max_iterations; ++iter) {
        const Eigen::Vector4d grad = gram * theta - moment;
        if (grad.norm() <= gradient_tolerance) break;
        theta -= learning_rate * grad;
        const double next_loss = loss_at(theta);
        if (report && iter % stride == 0) curve.push_back(next_loss);
        if (next_loss > loss) {
            if (++rising >= 10)
                throw StepSizeError(
                    "batch gradient descent diverged: loss increased for 10 consecutive "
                    "iterations (learning rate " + std::to_string(learning_rate) + ")");
        } else {
            rising = 0;
        }
        loss = next_loss;
    }
    if (report) {
        report->final_loss = loss_at(theta);
        report->iterations = iter;
        report->loss_curve = Eigen::Map<Eigen::VectorXd>(curve.data(), Eigen::Index(curve.size()));
    }
    return theta;
}

thermal::ThermalParams unscale_params(const Eigen::Vector4d& theta_z, const ScalingStats& stats) {
    Eigen::Vector3d theta;
    for (int j = 0; j < 3; ++j) theta(j) = theta_z(j) * stats.target_sigma / stats.feature_sigma(j);
    const double intercept = stats.target_mean - theta.dot(stats.feature_mean) +
                             stats.target_sigma * theta_z(3);

    thermal::ThermalParams p;
    p.rc_time_constant = theta(0);
    p.beta_r = theta(1);
    p.beta_bias_r = theta(2);
    p.t_offset = intercept + stats.mean_ambient;
    if (!(p.rc_time_constant > 0.0))
        throw FitRejectedError("fit rejected: identified RC = " +
                               std::to_string(p.rc_time_constant) + " s is not positive");
    if (!(p.beta_r > 0.0))
        throw FitRejectedError("fit rejected: identified betaR = " + std::to_string(p.beta_r) +
                               " is not positive");
    return p;
}

Eigen::VectorXd open_loop_trace(const thermal::ThermalParams& params, const TelemetryLog& log,
                                const std::string& node_id, const std::string& actuator_id) {
    log.validate(true);
    if (log.node_index(node_id) < 0)
        throw SchemaError("unknown node '" + node_id + "' in open-loop evaluation");
    const int act = log.actuator_index(resolve_actuator(log, node_id, actuator_id));
    const Eigen::Index n = log.samples();
    Eigen::VectorXd pred(n);
    if (n == 0) return pred;
    double t = log.ambient(0);
    pred(0) = t;
    for (Eigen::Index k = 1; k < n; ++k) {
        const double dt = log.sample_times(k) - log.sample_times(k - 1);
        t = thermal::step_euler(params, t, log.efforts(k - 1, act), dt);
        pred(k) = t;
    }
    return pred;
}

double evaluate_open_loop(const thermal::ThermalParams& params, const TelemetryLog& log,
                          const std::string& node_id, const std::string& actuator_id) {
    const Eigen::VectorXd pred = open_loop_trace(params, log, node_id, actuator_id);
    const int node = log.node_index(node_id);
    const Eigen::VectorXd err = pred - log.temperatures.col(node);
    return std::sqrt(err.squaredNorm() / double(err.size()));
}

std::pair<thermal::ThermalParams, FitReport> fit(const TelemetryLog& log,
                                                 const std::string& node_id,
                                                 const FitSettings& settings) {
    const RegressionSet set =
        build_regression(log, node_id, settings.actuator_id, settings.temp_cutoff_hz,
                         settings.effort_cutoff_hz, settings.transient_drop_taus);
    auto [scaled, stats] = zscore(set);
    FitReport report;
    const Eigen::Vector4d theta_z =
        batch_gradient_descent(scaled, settings.learning_rate, settings.max_iterations,
                               settings.gradient_tolerance, &report);
    thermal::ThermalParams params = unscale_params(theta_z, stats);
    report.open_loop_rmse_c = evaluate_open_loop(params, log, node_id, settings.actuator_id);
    return {params, report};
}

}  // namespace thermik::sysid
