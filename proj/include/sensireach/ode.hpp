#pragma once

// Initial value problem solvers: classic fixed-step RK4 (the default) and an
// adaptive Dormand-Prince 5(4) pair.  Both are deterministic: the same inputs
// always produce bitwise identical outputs.

#include <Eigen/Dense>

#include <functional>

#include "sensireach/errors.hpp"

namespace sensireach {

enum class IntegratorMethod { rk4, rk45 };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rk4;
    int steps = 1000;         // rk4: fixed step count over [t0, tf]
    double rel_tol = 1e-8;    // rk45 error control
    double abs_tol = 1e-10;
};

// d/dt y = rhs(t, y); writes the derivative into dy (pre-sized like y).
using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;

// Integrates from t0 to tf (tf >= t0) and returns y(tf).  Throws BlowUpError
// naming the first time at which the state stops being finite, or at which
// the adaptive solver can no longer make progress.
Eigen::VectorXd integrate(const OdeRhs& rhs, double t0, double tf,
                          const Eigen::VectorXd& y0, const IntegratorConfig& config);

}  // namespace sensireach
