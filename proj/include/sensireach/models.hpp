#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "sensireach/interval.hpp"
#include "sensireach/sensitivity.hpp"

namespace sensireach {

// Planar unicycle with constant speed and turn rate, extended with three
// constant disturbance states acting on the velocities and the turn rate:
//   x = (px, py, heading, dpx, dpy, dheading)
// The trig Jacobian entries are bounded globally by |speed|, so the declared
// bounds hold on every trajectory.
SystemModel make_unicycle(double speed, double turn_rate);

// Linear system xdot = A x.  Jacobian bounds are the point matrix A and the
// second Jacobian vanishes.
SystemModel make_linear(const Eigen::MatrixXd& a);

// Scalar quadratic growth xdot = x^2, whose flow x0 / (1 - t x0) blows up at
// t = 1 / x0 for positive x0.  Jacobian bounds cover initial states in
// `x0_range` over [0, horizon]; throws if the horizon reaches the blow-up.
SystemModel make_riccati(const Interval& x0_range, double horizon);

// Name-keyed construction backing the CLI configs.  Throws
// std::invalid_argument naming the model or the missing parameter.
//   unicycle: v, omega
//   riccati:  x0_lo, x0_hi, horizon
//   linear2:  a11, a12, a21, a22
using ParamMap = std::map<std::string, double>;
SystemModel make_model(const std::string& name, const ParamMap& params);
std::vector<std::string> model_names();

}  // namespace sensireach
