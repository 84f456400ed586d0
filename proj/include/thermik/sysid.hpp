#pragma once

#include <string>

#include <Eigen/Core>

#include "thermik/errors.hpp"
#include "thermik/telemetry.hpp"
#include "thermik/thermal_model.hpp"

namespace thermik::sysid {

/// Regression rows for one thermal node:
///   target   y_i = T_i - T_amb,i             (filtered temperature)
///   features x_i = (-dT_i/dt, F_i^2, -F_i, 1) (filtered rate and effort)
struct RegressionSet {
    Eigen::MatrixXd features;  ///< rows x 4, last column identically 1
    Eigen::VectorXd targets;
    double mean_ambient = 0.0;  ///< folded into t_offset when unscaling

    Eigen::Index rows() const { return targets.size(); }
};

/// Z-score statistics of the regression set (population convention,
/// divide by m). The bias column is never scaled.
struct ScalingStats {
    Eigen::Vector3d feature_mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d feature_sigma = Eigen::Vector3d::Ones();
    double target_mean = 0.0;
    double target_sigma = 1.0;
    double mean_ambient = 0.0;
};

struct FitSettings {
    std::string actuator_id;        ///< effort column driving the node; may be
                                    ///< empty when the log has exactly one
    double temp_cutoff_hz = 0.015;
    double effort_cutoff_hz = 1.0;
    double transient_drop_taus = 3.0;  ///< leading filter time constants dropped
    double learning_rate = 0.1;
    long max_iterations = 200000;
    double gradient_tolerance = 1e-9;
};

struct FitReport {
    double final_loss = 0.0;
    long iterations = 0;
    double open_loop_rmse_c = 0.0;
    Eigen::VectorXd loss_curve;  ///< loss sampled every loss_curve_stride iterations
    long loss_curve_stride = 100;
};

/// Assembles the regression set for one node: temperatures low-passed at
/// temp_cutoff, efforts at effort_cutoff, rates from the low-pass derivative
/// filter of the raw temperature; the leading transient (3 temperature-filter
/// time constants by default) is dropped.
RegressionSet build_regression(const TelemetryLog& log, const std::string& node_id,
                               const std::string& actuator_id, double temp_cutoff_hz = 0.015,
                               double effort_cutoff_hz = 1.0, double transient_drop_taus = 3.0);

/// Z-scores features 1..3 and the target in place (population sigma); the
/// bias column is untouched. Throws DegenerateDataError naming any
/// zero-variance column.
std::pair<RegressionSet, ScalingStats> zscore(const RegressionSet& set);

/// Undoes the feature scaling on a scaled feature row or parameter vector.
Eigen::Vector4d unscale_features(const Eigen::Vector4d& scaled, const ScalingStats& stats);

/// Minimizes L = 1/(2m) sum (theta^T x - y)^2 from a zero initial guess.
/// Stops on ||grad L||_2 <= grad_tol or the iteration cap; ten consecutive
/// loss increases raise StepSizeError.
Eigen::Vector4d batch_gradient_descent(const RegressionSet& scaled, double learning_rate,
                                       long max_iterations, double gradient_tolerance,
                                       FitReport* report = nullptr);

/// Maps scaled parameters back to physical ThermalParams:
///   theta_j = (sigma_y / sigma_xj) * theta_zj   (RC, betaR, betaBiasR)
/// with the intercept folded together with the mean ambient into t_offset.
/// Throws FitRejectedError when RC <= 0 or betaR <= 0.
thermal::ThermalParams unscale_params(const Eigen::Vector4d& theta_z, const ScalingStats& stats);

/// Full pipeline: build_regression -> zscore -> batch_gradient_descent ->
/// unscale_params, with the open-loop RMSE evaluated on the same log.
std::pair<thermal::ThermalParams, FitReport> fit(const TelemetryLog& log,
                                                 const std::string& node_id,
                                                 const FitSettings& settings = {});

/// Open-loop prediction error: the model starts at the log's initial ambient
/// temperature, is Euler-integrated with only the logged efforts, and the
/// RMSE against the logged temperature is returned.
double evaluate_open_loop(const thermal::ThermalParams& params, const TelemetryLog& log,
                          const std::string& node_id, const std::string& actuator_id = "");

/// The open-loop predicted trace itself (same integration as
/// evaluate_open_loop), for plot-ready exports.
Eigen::VectorXd open_loop_trace(const thermal::ThermalParams& params, const TelemetryLog& log,
                                const std::string& node_id, const std::string& actuator_id = "");

/// Resolves the effort column for a node: the explicit id when given, else
/// the single effort column, else an error.
std::string resolve_actuator(const TelemetryLog& log, const std::string& node_id,
                             const std::string& actuator_id);

}  // namespace thermik::sysid
