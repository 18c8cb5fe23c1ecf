#pragma once

// System models with first and second state Jacobians, and flows of the
// variational equations:
//   xdot  = f(t, x)
//   S1dot = J(t, x) S1                         S1(t0) = I
//   S2dot = J(t, x) S2 + H(t, x) (S1 kron S1)  S2(t0) = 0
// S1 is the n x n first-order sensitivity of the flow to the initial state;
// S2 is its n x n^2 derivative, laid out so that column k + j*n holds
// d(S1(i, j)) / d(x0(k)) (0-based j, k).

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "sensireach/interval.hpp"
#include "sensireach/ode.hpp"

namespace sensireach {

struct SystemModel {
    int n = 0;
    std::string name;
    // Vector field: writes f(t, x) into dx (pre-sized n).
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx)> f;
    // First Jacobian d f / d x: writes an n x n matrix.
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& jac)> jacobian;
    // Second Jacobian: n x n^2, entry (i, k + j*n) = d^2 f_i / (d x_k d x_j)
    // (0-based j, k).  May be empty for models without second-order data.
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& jac2)> second_jacobian;
    // A-priori bounds on the Jacobians over the relevant state region.
    IntervalMatrix jacobian_bounds;         // n x n
    IntervalMatrix second_jacobian_bounds;  // n x n^2
};

struct FlowResult {
    Eigen::VectorXd state;         // n
    Eigen::MatrixXd first_order;   // n x n, empty if not requested
    Eigen::MatrixXd second_order;  // n x n^2, empty if not requested
};

// Plain state flow x(tf; t0, x0).
Eigen::VectorXd flow(const SystemModel& model, double t0, double tf,
                     const Eigen::VectorXd& x0, const IntegratorConfig& config);

// State plus first-order sensitivity.
FlowResult flow_with_sensitivity(const SystemModel& model, double t0, double tf,
                                 const Eigen::VectorXd& x0, const IntegratorConfig& config);

// State plus first- and second-order sensitivities.  Requires the model to
// provide second_jacobian.
FlowResult flow_with_second_sensitivity(const SystemModel& model, double t0, double tf,
                                        const Eigen::VectorXd& x0,
                                        const IntegratorConfig& config);

// Central finite difference approximation of the first-order sensitivity,
// used as an independent cross-check of the variational flow.
Eigen::MatrixXd finite_diff_sensitivity(const SystemModel& model, double t0, double tf,
                                        const Eigen::VectorXd& x0, double h,
                                        const IntegratorConfig& config);

// Samples the trajectory from x0 at evenly spaced times and measures how far
// the evaluated Jacobians fall outside the model's declared bounds.
struct JacobianBoundsReport {
    bool ok = true;
    double worst_violation = 0.0;  // largest distance outside the bounds
    double at_time = 0.0;
};

JacobianBoundsReport check_jacobian_bounds(const SystemModel& model, double t0, double tf,
                                           const Eigen::VectorXd& x0,
                                           const IntegratorConfig& config,
                                           int checkpoints = 50);

}  // namespace sensireach
