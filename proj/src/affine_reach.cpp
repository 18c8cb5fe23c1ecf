#include "sensireach/affine_reach.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace sensireach {

namespace {

void check_square(const IntervalMatrix& a, const char* op) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionError(std::string(op) + ": system matrix must be square and non-empty");
    }
}

void check_tau(double tau, const char* op) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument(std::string(op) + ": horizon must be finite and >= 0");
    }
}

// Checks the admissibility condition r > norm_inf(A) * tau - 2 and returns
// norm_inf(A) * tau.
double checked_norm_tau(const IntervalMatrix& a, double tau, TaylorOrder order, const char* op) {
    const double norm_tau = iv_norm_inf(a) * tau;
    if (!(order.value() > norm_tau - 2.0)) {
        throw TaylorOrderError(std::string(op) + ": Taylor order " +
                                   std::to_string(order.value()) +
                                   " too small for norm-horizon product " +
                                   std::to_string(norm_tau) + "; need at least " +
                                   std::to_string(min_admissible_order(norm_tau)),
                               min_admissible_order(norm_tau));
    }
    return norm_tau;
}

// Powers (A tau)^0 .. (A tau)^r: A is scaled by tau once, then powered by
// left-associated interval products.
std::vector<IntervalMatrix> scaled_powers(const IntervalMatrix& a, double tau, int r) {
    std::vector<IntervalMatrix> powers;
    powers.reserve(r + 1);
    powers.push_back(IntervalMatrix::identity(a.rows()));
    const IntervalMatrix a_tau = iv_scalar_mul(Interval(tau), a);
    for (int i = 1; i <= r; ++i) {
        powers.push_back(iv_matmul(powers.back(), a_tau));
    }
    return powers;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

TaylorOrder::TaylorOrder(int value) : value_(value) {
    if (value < 2) {
        throw TaylorOrderError("TaylorOrder: order must be >= 2, got " + std::to_string(value), 2);
    }
}

int min_admissible_order(double norm_tau) {
    const int by_horizon = static_cast<int>(std::floor(norm_tau - 2.0)) + 1;
    return std::max(2, by_horizon);
}

TaylorOrder choose_order(const IntervalMatrix& a, double tau) {
    check_square(a, "choose_order");
    check_tau(tau, "choose_order");
    const double norm_tau = iv_norm_inf(a) * tau;
    const int r = std::max(static_cast<int>(std::ceil(norm_tau)) + 2, 6);
    return TaylorOrder(r);
}

IntervalMatrix taylor_remainder(const IntervalMatrix& a, double tau, TaylorOrder order) {
    check_square(a, "taylor_remainder");
    check_tau(tau, "taylor_remainder");
    const double norm_tau = checked_norm_tau(a, tau, order, "taylor_remainder");
    const int r = order.value();
    const double eps = std::pow(norm_tau, r + 1) / factorial(r + 1) *
                       (r + 2.0) / (r + 2.0 - norm_tau);
    return IntervalMatrix::constant(a.rows(), a.rows(), Interval(-eps, eps));
}

IntervalMatrix transition_operator(const IntervalMatrix& a, double tau, TaylorOrder order) {
    check_square(a, "transition_operator");
    check_tau(tau, "transition_operator");
    checked_norm_tau(a, tau, order, "transition_operator");
    const int r = order.value();
    const std::vector<IntervalMatrix> powers = scaled_powers(a, tau, r);
    IntervalMatrix sum = taylor_remainder(a, tau, order);
    for (int i = 0; i <= r; ++i) {
        sum = iv_add(sum, iv_scalar_mul(Interval(1.0 / factorial(i)), powers[i]));
    }
    return sum;
}

IntervalMatrix input_operator(const IntervalMatrix& a, double tau, TaylorOrder order) {
    check_square(a, "input_operator");
    check_tau(tau, "input_operator");
    checked_norm_tau(a, tau, order, "input_operator");
    const int r = order.value();
    const std::vector<IntervalMatrix> powers = scaled_powers(a, tau, r);
    IntervalMatrix sum = iv_scalar_mul(Interval(tau), taylor_remainder(a, tau, order));
    for (int i = 0; i <= r; ++i) {
        sum = iv_add(sum, iv_scalar_mul(Interval(tau / factorial(i + 1)), powers[i]));
    }
    return sum;
}

IntervalMatrix curvature_operator(const IntervalMatrix& a, double tau, TaylorOrder order) {
    check_square(a, "curvature_operator");
    check_tau(tau, "curvature_operator");
    checked_norm_tau(a, tau, order, "curvature_operator");
    const int r = order.value();
    const std::vector<IntervalMatrix> powers = scaled_powers(a, tau, r);
    IntervalMatrix sum = IntervalMatrix::zero(a.rows(), a.rows());
    for (int i = 2; i <= r; ++i) {
        const double coef = std::pow(static_cast<double>(i), -static_cast<double>(i) / (i - 1.0)) -
                            std::pow(static_cast<double>(i), -1.0 / (i - 1.0));
        sum = iv_add(sum, iv_scalar_mul(Interval(coef / factorial(i)), powers[i]));
    }
    sum = iv_hull(sum, IntervalMatrix::zero(a.rows(), a.rows()));
    return iv_add(sum, taylor_remainder(a, tau, order));
}

AffineOperators make_affine_operators(const IntervalMatrix& a, double tau, TaylorOrder order) {
    AffineOperators ops;
    ops.remainder = taylor_remainder(a, tau, order);
    ops.transition = transition_operator(a, tau, order);
    ops.input = input_operator(a, tau, order);
    ops.curvature = curvature_operator(a, tau, order);
    ops.tau = tau;
    ops.order = order.value();
    return ops;
}

IntervalMatrix reach_set_affine(const IntervalMatrix& a, const IntervalMatrix& u,
                                const IntervalMatrix& z0, double tau, TaylorOrder order) {
    check_square(a, "reach_set_affine");
    if (z0.rows() != a.rows() || u.rows() != a.rows() || u.cols() != z0.cols()) {
        throw DimensionError("reach_set_affine: initial set and input set must be p x q with p matching the system matrix");
    }
    const IntervalMatrix transition = transition_operator(a, tau, order);
    const IntervalMatrix input = input_operator(a, tau, order);
    return iv_add(iv_matmul(transition, z0), iv_matmul(input, u));
}

IntervalMatrix reach_tube_affine(const IntervalMatrix& a, const IntervalMatrix& z0,
                                 double tau, TaylorOrder order) {
    check_square(a, "reach_tube_affine");
    if (z0.rows() != a.rows()) {
        throw DimensionError("reach_tube_affine: initial set row count must match the system matrix");
    }
    const IntervalMatrix transition = transition_operator(a, tau, order);
    const IntervalMatrix curvature = curvature_operator(a, tau, order);
    return iv_add(iv_hull(z0, iv_matmul(transition, z0)), iv_matmul(curvature, z0));
}

}  // namespace sensireach
