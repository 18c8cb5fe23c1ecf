#include "sensireach/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sensireach {

namespace {

void check_finite(const Eigen::VectorXd& y, double t) {
    if (!y.allFinite()) {
        throw BlowUpError("integrate: state blew up (non-finite value) at t = " +
                          std::to_string(t), t);
    }
}

Eigen::VectorXd integrate_rk4(const OdeRhs& rhs, double t0, double tf,
                              Eigen::VectorXd y, int steps) {
    const double h = (tf - t0) / steps;
    const Eigen::Index dim = y.size();
    Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        // Land the final step exactly on tf.
        const double hs = (i + 1 == steps) ? (tf - t) : h;
        rhs(t, y, k1);
        tmp = y + 0.5 * hs * k1;
        rhs(t + 0.5 * hs, tmp, k2);
        tmp = y + 0.5 * hs * k2;
        rhs(t + 0.5 * hs, tmp, k3);
        tmp = y + hs * k3;
        rhs(t + hs, tmp, k4);
        y += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_finite(y, t + hs);
    }
    return y;
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

Eigen::VectorXd integrate_rk45(const OdeRhs& rhs, double t0, double tf,
                               Eigen::VectorXd y, double rel_tol, double abs_tol) {
    const double span = tf - t0;
    const Eigen::Index dim = y.size();
    Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim);
    Eigen::VectorXd y_new(dim), err(dim);

    double t = t0;
    double h = span / 100.0;
    const double h_min = span * 1e-14;
    const long max_attempts = 10'000'000;
    long attempts = 0;

    while (t < tf) {
        if (++attempts > max_attempts) {
            throw BlowUpError("integrate: adaptive solver exceeded the step budget at t = " +
                              std::to_string(t), t);
        }
        h = std::min(h, tf - t);
        rhs(t, y, k1);
        tmp = y + h * (a21 * k1);
        rhs(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, tmp, k6);
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, y_new, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = err[i] / scale;
            err_norm += r * r;
        }
        err_norm = std::sqrt(err_norm / std::max<Eigen::Index>(dim, 1));

        if (!std::isfinite(err_norm)) {
            throw BlowUpError("integrate: state blew up (non-finite value) at t = " +
                              std::to_string(t + h), t + h);
        }
        if (err_norm <= 1.0) {
            t += h;
            y.swap(y_new);
            check_finite(y, t);
        }
        const double factor = (err_norm == 0.0)
                                  ? 5.0
                                  : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        h *= factor;
        if (h < h_min && t < tf) {
            throw BlowUpError("integrate: step size underflow at t = " + std::to_string(t), t);
        }
    }
    return y;
}

}  // namespace

Eigen::VectorXd integrate(const OdeRhs& rhs, double t0, double tf,
                          const Eigen::VectorXd& y0, const IntegratorConfig& config) {
    if (!std::isfinite(t0) || !std::isfinite(tf) || tf < t0) {
        throw std::invalid_argument("integrate: need finite t0 <= tf");
    }
    if (y0.size() == 0) {
        throw std::invalid_argument("integrate: empty initial state");
    }
    check_finite(y0, t0);
    if (tf == t0) {
        return y0;
    }
    switch (config.method) {
        case IntegratorMethod::rk4:
            if (config.steps <= 0) {
                throw std::invalid_argument("integrate: step count must be positive");
            }
            return integrate_rk4(rhs, t0, tf, y0, config.steps);
        case IntegratorMethod::rk45:
            if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) {
                throw std::invalid_argument("integrate: tolerances must be positive");
            }
            return integrate_rk45(rhs, t0, tf, y0, config.rel_tol, config.abs_tol);
    }
    throw std::invalid_argument("integrate: unknown method");
}

}  // namespace sensireach
