#pragma once

// One-step interval reachability for uncertain affine systems
//   xdot = A x + u,  A in an interval matrix, u in an interval set.
// The operators enclose the matrix exponential by a truncated Taylor series
// plus a rigorous remainder term, so reach_set_affine / reach_tube_affine
// over-approximate the exact time-tau states / the whole [0, tau] tube.

#include "sensireach/interval.hpp"

namespace sensireach {

// Validated truncation order.  Orders below 2 are rejected outright; the
// horizon-dependent admissibility condition value > norm_inf(A) * tau - 2 is
// checked where the operators are evaluated.
class TaylorOrder {
public:
    explicit TaylorOrder(int value);
    int value() const { return value_; }

private:
    int value_;
};

// Smallest order admissible for the given norm_inf(A) * tau product.
int min_admissible_order(double norm_tau);

// Default order: max(ceil(norm_inf(A) * tau) + 2, 6).
TaylorOrder choose_order(const IntervalMatrix& a, double tau);

// Symmetric enclosure of the truncated exponential series tail; every entry
// is [-eps, eps] with
//   eps = (norm_tau)^(r+1) / (r+1)! * (r+2) / (r+2 - norm_tau).
IntervalMatrix taylor_remainder(const IntervalMatrix& a, double tau, TaylorOrder order);

// State transition enclosure: sum_{i=0..r} (A tau)^i / i! plus the remainder.
IntervalMatrix transition_operator(const IntervalMatrix& a, double tau, TaylorOrder order);

// Integrated input enclosure: sum_{i=0..r} A^i tau^(i+1) / (i+1)! plus the
// remainder scaled by tau.  Maps a constant input set to its contribution to
// the time-tau states.
IntervalMatrix input_operator(const IntervalMatrix& a, double tau, TaylorOrder order);

// Tube correction covering the curvature of trajectories between the initial
// and final time: the hull of sum_{i=2..r} (i^(-i/(i-1)) - i^(-1/(i-1)))
// (A tau)^i / i! with the zero matrix, plus the remainder.
IntervalMatrix curvature_operator(const IntervalMatrix& a, double tau, TaylorOrder order);

struct AffineOperators {
    IntervalMatrix remainder;    // series tail enclosure
    IntervalMatrix transition;   // initial set -> final states
    IntervalMatrix input;        // constant input set -> integrated contribution
    IntervalMatrix curvature;    // tube correction between sample times
    double tau = 0.0;
    int order = 2;
};

AffineOperators make_affine_operators(const IntervalMatrix& a, double tau, TaylorOrder order);

// Time-tau reachable set of matrix initial conditions z0 with constant input
// set u: transition * z0 + input * u.
IntervalMatrix reach_set_affine(const IntervalMatrix& a, const IntervalMatrix& u,
                                const IntervalMatrix& z0, double tau, TaylorOrder order);

// Reach tube over [0, tau] for the input-free system:
// hull(z0, transition * z0) + curvature * z0.
IntervalMatrix reach_tube_affine(const IntervalMatrix& a, const IntervalMatrix& z0,
                                 double tau, TaylorOrder order);

}  // namespace sensireach
