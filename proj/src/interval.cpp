#include "sensireach/interval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace sensireach {

namespace {

std::atomic<int> g_dilation_ulps{0};

void check_same_shape(const IntervalMatrix& a, const IntervalMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch (" +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + ")");
    }
}

// Widens [lo, hi] matrices in place by the configured number of ulps.
void apply_dilation(Eigen::MatrixXd& lo, Eigen::MatrixXd& hi) {
    const int k = g_dilation_ulps.load(std::memory_order_relaxed);
    if (k == 0) return;
    for (Eigen::Index j = 0; j < lo.cols(); ++j) {
        for (Eigen::Index i = 0; i < lo.rows(); ++i) {
            lo(i, j) = step_down(lo(i, j), k);
            hi(i, j) = step_up(hi(i, j), k);
        }
    }
}

Interval apply_dilation(Interval x) {
    const int k = g_dilation_ulps.load(std::memory_order_relaxed);
    if (k == 0) return x;
    return Interval(step_down(x.lo(), k), step_up(x.hi(), k));
}

void scalar_mul_bounds(double alo, double ahi, double blo, double bhi,
                       double& out_lo, double& out_hi) {
    const double p1 = alo * blo;
    const double p2 = alo * bhi;
    const double p3 = ahi * blo;
    const double p4 = ahi * bhi;
    out_lo = std::min(std::min(p1, p2), std::min(p3, p4));
    out_hi = std::max(std::max(p1, p2), std::max(p3, p4));
}

}  // namespace

Interval::Interval(double point) : lo_(point), hi_(point) {
    if (!std::isfinite(point)) {
        throw std::invalid_argument("Interval: bounds must be finite");
    }
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("Interval: bounds must be finite");
    }
    if (lo > hi) {
        throw std::invalid_argument("Interval: lower bound " + std::to_string(lo) +
                                    " exceeds upper bound " + std::to_string(hi));
    }
}

double Interval::mag() const {
    return std::max(std::abs(lo_), std::abs(hi_));
}

IntervalMatrix::IntervalMatrix(Eigen::MatrixXd lo, Eigen::MatrixXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.rows() != hi_.rows() || lo_.cols() != hi_.cols()) {
        throw DimensionError("IntervalMatrix: lower and upper bound shapes differ");
    }
    for (Eigen::Index j = 0; j < lo_.cols(); ++j) {
        for (Eigen::Index i = 0; i < lo_.rows(); ++i) {
            if (!std::isfinite(lo_(i, j)) || !std::isfinite(hi_(i, j))) {
                throw std::invalid_argument("IntervalMatrix: non-finite bound at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            if (lo_(i, j) > hi_(i, j)) {
                throw std::invalid_argument("IntervalMatrix: lower bound exceeds upper bound at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

IntervalMatrix IntervalMatrix::point(const Eigen::MatrixXd& value) {
    return IntervalMatrix(value, value);
}

IntervalMatrix IntervalMatrix::zero(Eigen::Index rows, Eigen::Index cols) {
    return IntervalMatrix(Eigen::MatrixXd::Zero(rows, cols), Eigen::MatrixXd::Zero(rows, cols));
}

IntervalMatrix IntervalMatrix::identity(Eigen::Index n) {
    return point(Eigen::MatrixXd::Identity(n, n));
}

IntervalMatrix IntervalMatrix::constant(Eigen::Index rows, Eigen::Index cols, Interval value) {
    return IntervalMatrix(Eigen::MatrixXd::Constant(rows, cols, value.lo()),
                          Eigen::MatrixXd::Constant(rows, cols, value.hi()));
}

void IntervalMatrix::set_entry(Eigen::Index i, Eigen::Index j, Interval value) {
    lo_(i, j) = value.lo();
    hi_(i, j) = value.hi();
}

void set_outward_dilation(int ulps) {
    if (ulps < 0) {
        throw std::invalid_argument("set_outward_dilation: ulp count must be >= 0");
    }
    g_dilation_ulps.store(ulps, std::memory_order_relaxed);
}

int outward_dilation() {
    return g_dilation_ulps.load(std::memory_order_relaxed);
}

ScopedOutwardDilation::ScopedOutwardDilation(int ulps) : previous_(outward_dilation()) {
    set_outward_dilation(ulps);
}

ScopedOutwardDilation::~ScopedOutwardDilation() {
    set_outward_dilation(previous_);
}

double step_down(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) {
        x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    }
    return x;
}

double step_up(double x, int ulps) {
    for (int i = 0; i < ulps; ++i) {
        x = std::nextafter(x, std::numeric_limits<double>::infinity());
    }
    return x;
}

IntervalMatrix iv_add(const IntervalMatrix& a, const IntervalMatrix& b) {
    check_same_shape(a, b, "iv_add");
    Eigen::MatrixXd lo = a.lo() + b.lo();
    Eigen::MatrixXd hi = a.hi() + b.hi();
    apply_dilation(lo, hi);
    return IntervalMatrix(std::move(lo), std::move(hi));
}

Interval iv_scalar_mul(Interval a, Interval b) {
    double lo, hi;
    scalar_mul_bounds(a.lo(), a.hi(), b.lo(), b.hi(), lo, hi);
    return apply_dilation(Interval(lo, hi));
}

IntervalMatrix iv_scalar_mul(Interval a, const IntervalMatrix& b) {
    Eigen::MatrixXd lo(b.rows(), b.cols());
    Eigen::MatrixXd hi(b.rows(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
            scalar_mul_bounds(a.lo(), a.hi(), b.lo()(i, j), b.hi()(i, j), lo(i, j), hi(i, j));
        }
    }
    apply_dilation(lo, hi);
    return IntervalMatrix(std::move(lo), std::move(hi));
}

IntervalMatrix iv_matmul(const IntervalMatrix& a, const IntervalMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("iv_matmul: inner dimensions differ (" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
    }
    Eigen::MatrixXd lo(a.rows(), b.cols());
    Eigen::MatrixXd hi(a.rows(), b.cols());
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double sum_lo = 0.0;
            double sum_hi = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) {
                double p_lo, p_hi;
                scalar_mul_bounds(a.lo()(i, k), a.hi()(i, k), b.lo()(k, j), b.hi()(k, j),
                                  p_lo, p_hi);
                sum_lo += p_lo;
                sum_hi += p_hi;
            }
            lo(i, j) = sum_lo;
            hi(i, j) = sum_hi;
        }
    }
    apply_dilation(lo, hi);
    return IntervalMatrix(std::move(lo), std::move(hi));
}

IntervalMatrix iv_kron(const IntervalMatrix& a, const IntervalMatrix& b) {
    const Eigen::Index q = b.rows();
    const Eigen::Index r = b.cols();
    Eigen::MatrixXd lo(a.rows() * q, a.cols() * r);
    Eigen::MatrixXd hi(a.rows() * q, a.cols() * r);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index bj = 0; bj < r; ++bj) {
                for (Eigen::Index bi = 0; bi < q; ++bi) {
                    scalar_mul_bounds(a.lo()(i, j), a.hi()(i, j),
                                      b.lo()(bi, bj), b.hi()(bi, bj),
                                      lo(i * q + bi, j * r + bj), hi(i * q + bi, j * r + bj));
                }
            }
        }
    }
    apply_dilation(lo, hi);
    return IntervalMatrix(std::move(lo), std::move(hi));
}

IntervalMatrix iv_hull(const IntervalMatrix& a, const IntervalMatrix& b) {
    check_same_shape(a, b, "iv_hull");
    Eigen::MatrixXd lo = a.lo().cwiseMin(b.lo());
    Eigen::MatrixXd hi = a.hi().cwiseMax(b.hi());
    apply_dilation(lo, hi);
    return IntervalMatrix(std::move(lo), std::move(hi));
}

double iv_norm_inf(const IntervalMatrix& a) {
    if (a.empty()) return 0.0;
    return iv_abs_sup(a).cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXd iv_abs_sup(const IntervalMatrix& a) {
    return a.lo().cwiseAbs().cwiseMax(a.hi().cwiseAbs());
}

bool iv_contains(const IntervalMatrix& a, const Eigen::MatrixXd& p, double slack) {
    if (a.rows() != p.rows() || a.cols() != p.cols()) {
        throw DimensionError("iv_contains: shape mismatch");
    }
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (p(i, j) < a.lo()(i, j) - slack || p(i, j) > a.hi()(i, j) + slack) {
                return false;
            }
        }
    }
    return true;
}

bool iv_subset(const IntervalMatrix& inner, const IntervalMatrix& outer, double slack) {
    check_same_shape(inner, outer, "iv_subset");
    for (Eigen::Index j = 0; j < inner.cols(); ++j) {
        for (Eigen::Index i = 0; i < inner.rows(); ++i) {
            if (inner.lo()(i, j) < outer.lo()(i, j) - slack ||
                inner.hi()(i, j) > outer.hi()(i, j) + slack) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace sensireach
