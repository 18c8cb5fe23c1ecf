#pragma once

// Interval scalars and interval matrices represented by entrywise [lo, hi]
// bounds.  Operations use plain round-to-nearest arithmetic by default; an
// optional outward dilation mode additionally widens every computed bound by
// a fixed number of ulps (see set_outward_dilation) for callers that want a
// directed-rounding-style safety margin.

#include <Eigen/Dense>

#include "sensireach/errors.hpp"

namespace sensireach {

class Interval {
public:
    Interval() : lo_(0.0), hi_(0.0) {}
    Interval(double point);            // degenerate [p, p], implicit on purpose
    Interval(double lo, double hi);    // throws unless lo <= hi and both finite

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    double mid() const { return 0.5 * (lo_ + hi_); }
    // Magnitude: largest absolute value of any member.
    double mag() const;
    bool is_point() const { return lo_ == hi_; }
    bool contains(double x, double slack = 0.0) const {
        return lo_ - slack <= x && x <= hi_ + slack;
    }

private:
    double lo_, hi_;
};

class IntervalMatrix {
public:
    IntervalMatrix() : lo_(0, 0), hi_(0, 0) {}
    // Throws unless shapes match, every entry is finite and lo <= hi holds
    // entrywise.
    IntervalMatrix(Eigen::MatrixXd lo, Eigen::MatrixXd hi);

    static IntervalMatrix point(const Eigen::MatrixXd& value);
    static IntervalMatrix zero(Eigen::Index rows, Eigen::Index cols);
    static IntervalMatrix identity(Eigen::Index n);
    static IntervalMatrix constant(Eigen::Index rows, Eigen::Index cols, Interval value);

    Eigen::Index rows() const { return lo_.rows(); }
    Eigen::Index cols() const { return lo_.cols(); }
    bool empty() const { return lo_.size() == 0; }

    const Eigen::MatrixXd& lo() const { return lo_; }
    const Eigen::MatrixXd& hi() const { return hi_; }

    Interval entry(Eigen::Index i, Eigen::Index j) const {
        return Interval(lo_(i, j), hi_(i, j));
    }
    void set_entry(Eigen::Index i, Eigen::Index j, Interval value);

    Eigen::MatrixXd width() const { return hi_ - lo_; }
    Eigen::MatrixXd mid() const { return 0.5 * (lo_ + hi_); }

private:
    Eigen::MatrixXd lo_, hi_;
};

// Outward dilation mode.  k = 0 (the default) leaves results as computed in
// round-to-nearest; k > 0 widens every entry of every operation result by k
// ulps on each side.  The setting is process-global.
void set_outward_dilation(int ulps);
int outward_dilation();

// RAII helper so tests can toggle the mode without leaking state.
class ScopedOutwardDilation {
public:
    explicit ScopedOutwardDilation(int ulps);
    ~ScopedOutwardDilation();

private:
    int previous_;
};

// x moved k ulps toward -inf / +inf.  Exposed for tests.
double step_down(double x, int ulps);
double step_up(double x, int ulps);

// Entrywise sum.
IntervalMatrix iv_add(const IntervalMatrix& a, const IntervalMatrix& b);

// Scalar product: [min, max] over the four endpoint products.
Interval iv_scalar_mul(Interval a, Interval b);
IntervalMatrix iv_scalar_mul(Interval a, const IntervalMatrix& b);

// Matrix product with interval entries.
IntervalMatrix iv_matmul(const IntervalMatrix& a, const IntervalMatrix& b);

// Kronecker product: block (i, j) equals a(i, j) * b.
IntervalMatrix iv_kron(const IntervalMatrix& a, const IntervalMatrix& b);

// Interval hull: entrywise [min(lo), max(hi)].
IntervalMatrix iv_hull(const IntervalMatrix& a, const IntervalMatrix& b);

// Infinity norm of the entrywise magnitude matrix (max absolute row sum).
double iv_norm_inf(const IntervalMatrix& a);

// Entrywise magnitude max(|lo|, |hi|).
Eigen::MatrixXd iv_abs_sup(const IntervalMatrix& a);

// True when lo - slack <= p <= hi + slack holds entrywise.
bool iv_contains(const IntervalMatrix& a, const Eigen::MatrixXd& p, double slack = 0.0);

// True when b is entrywise a subset of a (allowing slack on both sides).
bool iv_subset(const IntervalMatrix& inner, const IntervalMatrix& outer, double slack = 0.0);

}  // namespace sensireach
