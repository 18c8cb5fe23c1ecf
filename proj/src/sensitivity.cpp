#include "sensireach/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sensireach {

namespace {

void check_model(const SystemModel& model, const char* op, bool need_second) {
    if (model.n <= 0) {
        throw std::invalid_argument(std::string(op) + ": model dimension must be positive");
    }
    if (!model.f || !model.jacobian) {
        throw std::invalid_argument(std::string(op) + ": model must provide f and jacobian");
    }
    if (need_second && !model.second_jacobian) {
        throw std::invalid_argument(std::string(op) + ": model '" + model.name +
                                    "' does not provide a second Jacobian");
    }
}

void check_state(const SystemModel& model, const Eigen::VectorXd& x0, const char* op) {
    if (x0.size() != model.n) {
        throw DimensionError(std::string(op) + ": initial state has size " +
                             std::to_string(x0.size()) + ", model dimension is " +
                             std::to_string(model.n));
    }
}

// out = (a kron a) for the n x n matrix a; out is n^2 x n^2.
void square_kron(const Eigen::MatrixXd& a, Eigen::MatrixXd& out) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index j1 = 0; j1 < n; ++j1) {
        for (Eigen::Index i1 = 0; i1 < n; ++i1) {
            out.block(i1 * n, j1 * n, n, n) = a(i1, j1) * a;
        }
    }
}

}  // namespace

Eigen::VectorXd flow(const SystemModel& model, double t0, double tf,
                     const Eigen::VectorXd& x0, const IntegratorConfig& config) {
    check_model(model, "flow", false);
    check_state(model, x0, "flow");
    const int n = model.n;
    OdeRhs rhs = [&model, n](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        model.f(t, y, dy);
    };
    return integrate(rhs, t0, tf, x0, config);
}

FlowResult flow_with_sensitivity(const SystemModel& model, double t0, double tf,
                                 const Eigen::VectorXd& x0, const IntegratorConfig& config) {
    check_model(model, "flow_with_sensitivity", false);
    check_state(model, x0, "flow_with_sensitivity");
    const int n = model.n;

    Eigen::VectorXd y0(n + n * n);
    y0.head(n) = x0;
    Eigen::Map<Eigen::MatrixXd>(y0.data() + n, n, n) = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd fx(n);
    OdeRhs rhs = [&model, &jac, &fx, n](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const Eigen::VectorXd x = y.head(n);
        model.f(t, x, fx);
        model.jacobian(t, x, jac);
        dy.head(n) = fx;
        Eigen::Map<const Eigen::MatrixXd> s1(y.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd>(dy.data() + n, n, n) = jac * s1;
    };

    const Eigen::VectorXd yf = integrate(rhs, t0, tf, y0, config);
    FlowResult result;
    result.state = yf.head(n);
    result.first_order = Eigen::Map<const Eigen::MatrixXd>(yf.data() + n, n, n);
    return result;
}

FlowResult flow_with_second_sensitivity(const SystemModel& model, double t0, double tf,
                                        const Eigen::VectorXd& x0,
                                        const IntegratorConfig& config) {
    check_model(model, "flow_with_second_sensitivity", true);
    check_state(model, x0, "flow_with_second_sensitivity");
    const int n = model.n;
    const int n2 = n * n;

    Eigen::VectorXd y0(n + n2 + n * n2);
    y0.setZero();
    y0.head(n) = x0;
    Eigen::Map<Eigen::MatrixXd>(y0.data() + n, n, n) = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd jac(n, n), jac2(n, n2), kron(n2, n2);
    Eigen::VectorXd fx(n);
    OdeRhs rhs = [&model, &jac, &jac2, &kron, &fx, n, n2](double t, const Eigen::VectorXd& y,
                                                          Eigen::VectorXd& dy) {
        const Eigen::VectorXd x = y.head(n);
        model.f(t, x, fx);
        model.jacobian(t, x, jac);
        model.second_jacobian(t, x, jac2);
        dy.head(n) = fx;
        Eigen::Map<const Eigen::MatrixXd> s1(y.data() + n, n, n);
        Eigen::Map<const Eigen::MatrixXd> s2(y.data() + n + n2, n, n2);
        Eigen::Map<Eigen::MatrixXd>(dy.data() + n, n, n) = jac * s1;
        square_kron(s1, kron);
        Eigen::Map<Eigen::MatrixXd>(dy.data() + n + n2, n, n2) = jac * s2 + jac2 * kron;
    };

    const Eigen::VectorXd yf = integrate(rhs, t0, tf, y0, config);
    FlowResult result;
    result.state = yf.head(n);
    result.first_order = Eigen::Map<const Eigen::MatrixXd>(yf.data() + n, n, n);
    result.second_order = Eigen::Map<const Eigen::MatrixXd>(yf.data() + n + n2, n, n2);
    return result;
}

Eigen::MatrixXd finite_diff_sensitivity(const SystemModel& model, double t0, double tf,
                                        const Eigen::VectorXd& x0, double h,
                                        const IntegratorConfig& config) {
    check_model(model, "finite_diff_sensitivity", false);
    check_state(model, x0, "finite_diff_sensitivity");
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite_diff_sensitivity: step must be positive");
    }
    const int n = model.n;
    Eigen::MatrixXd result(n, n);
    Eigen::VectorXd perturbed = x0;
    for (int j = 0; j < n; ++j) {
        perturbed(j) = x0(j) + h;
        const Eigen::VectorXd plus = flow(model, t0, tf, perturbed, config);
        perturbed(j) = x0(j) - h;
        const Eigen::VectorXd minus = flow(model, t0, tf, perturbed, config);
        perturbed(j) = x0(j);
        result.col(j) = (plus - minus) / (2.0 * h);
    }
    return result;
}

JacobianBoundsReport check_jacobian_bounds(const SystemModel& model, double t0, double tf,
                                           const Eigen::VectorXd& x0,
                                           const IntegratorConfig& config,
                                           int checkpoints) {
    check_model(model, "check_jacobian_bounds", false);
    check_state(model, x0, "check_jacobian_bounds");
    if (checkpoints < 1) {
        throw std::invalid_argument("check_jacobian_bounds: need at least one checkpoint");
    }
    const int n = model.n;

    // Integrate piecewise so each checkpoint reuses the previous state.
    IntegratorConfig segment = config;
    if (segment.method == IntegratorMethod::rk4) {
        segment.steps = std::max(1, config.steps / checkpoints);
    }

    JacobianBoundsReport report;
    auto record = [&report](const IntervalMatrix& bounds, const Eigen::MatrixXd& value, double t) {
        if (bounds.empty()) return;
        for (Eigen::Index j = 0; j < value.cols(); ++j) {
            for (Eigen::Index i = 0; i < value.rows(); ++i) {
                const double below = bounds.lo()(i, j) - value(i, j);
                const double above = value(i, j) - bounds.hi()(i, j);
                const double violation = std::max({0.0, below, above});
                if (violation > report.worst_violation) {
                    report.worst_violation = violation;
                    report.at_time = t;
                    report.ok = false;
                }
            }
        }
    };

    Eigen::MatrixXd jac(n, n), jac2(n, n * n);
    Eigen::VectorXd x = x0;
    for (int k = 0; k <= checkpoints; ++k) {
        const double t = t0 + (tf - t0) * k / checkpoints;
        if (k > 0) {
            const double t_prev = t0 + (tf - t0) * (k - 1) / checkpoints;
            x = flow(model, t_prev, t, x, segment);
        }
        model.jacobian(t, x, jac);
        record(model.jacobian_bounds, jac, t);
        if (model.second_jacobian) {
            model.second_jacobian(t, x, jac2);
            record(model.second_jacobian_bounds, jac2, t);
        }
    }
    return report;
}

}  // namespace sensireach
