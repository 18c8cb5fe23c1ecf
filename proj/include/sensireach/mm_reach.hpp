#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "sensireach/interval.hpp"
#include "sensireach/ode.hpp"
#include "sensireach/sensitivity.hpp"

namespace sensireach {

// Which endpoint of the state box supplies coordinate j when evaluating
// row i of the decomposition function.
enum class CornerSource { from_x, from_y };

// Row-wise decomposition of the flow map built from interval bounds on the
// first-order sensitivity.  Entry (i, j) of `selector` says whether g_i reads
// x_j from the first or the second argument; `alpha` holds the additive
// slopes that make g_i nondecreasing in the remaining directions.
struct DecompositionSpec {
    IntervalMatrix bounds;   // n x n sensitivity bounds
    Eigen::MatrixXd center;  // midpoint of `bounds`
    std::vector<std::vector<CornerSource>> selector;  // n x n
    Eigen::MatrixXd alpha;   // n x n, nonnegative
};

// Builds the decomposition from sensitivity bounds.  A nonnegative center
// entry keeps the coordinate coupled to the first argument with slope
// max(0, -lower bound); a negative center hands it to the second argument
// with slope max(0, upper bound).
DecompositionSpec build_decomposition(const IntervalMatrix& sx_bounds);

// Evaluates g(x, y): row i integrates the model from the corner z^i assembled
// per `spec.selector` and adds alpha_i . (x - y).  Integrations are cached on
// the bitwise corner vector, so an evaluation pair costs at most 2n flows.
using FlowCache = std::map<std::vector<double>, Eigen::VectorXd>;
Eigen::VectorXd decomposition_eval(const SystemModel& model, double t0,
                                   double tf, const DecompositionSpec& spec,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y,
                                   const IntegratorConfig& config,
                                   FlowCache* cache = nullptr);

// Interval over-approximation of the reachable set of `box` under the flow:
// [g(lo, hi), g(hi, lo)] as an n x 1 interval vector.  Throws OrderingError
// if a component comes out inverted, which signals sensitivity bounds that
// do not actually contain the true sensitivities.
IntervalMatrix reach_oa_mm(const SystemModel& model, double t0, double tf,
                           const IntervalMatrix& box,
                           const DecompositionSpec& spec,
                           const IntegratorConfig& config = {});

// A sensitivity interval is sign-stable when no entry straddles zero.  In
// that case the decomposition slopes vanish and the corner evaluations are
// exact flows, so the enclosure is tight in every coordinate.
struct SignStability {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> entry;
    bool all = false;
};
SignStability is_sign_stable(const IntervalMatrix& sx_bounds);

}  // namespace sensireach
