#include "sensireach/models.hpp"

#include <cmath>
#include <stdexcept>

#include "sensireach/errors.hpp"

namespace sensireach {

SystemModel make_unicycle(double speed, double turn_rate) {
    SystemModel model;
    model.n = 6;
    model.name = "unicycle";
    const double v = speed;
    model.f = [v, turn_rate](double, const Eigen::VectorXd& x,
                             Eigen::VectorXd& dx) {
        dx.setZero();
        dx(0) = v * std::cos(x(2)) + x(3);
        dx(1) = v * std::sin(x(2)) + x(4);
        dx(2) = turn_rate + x(5);
    };
    model.jacobian = [v](double, const Eigen::VectorXd& x,
                         Eigen::MatrixXd& jac) {
        jac.setZero();
        jac(0, 2) = -v * std::sin(x(2));
        jac(1, 2) = v * std::cos(x(2));
        jac(0, 3) = 1.0;
        jac(1, 4) = 1.0;
        jac(2, 5) = 1.0;
    };
    // Only d^2/dx2^2 survives; that block sits in column 2 + 2*6.
    model.second_jacobian = [v](double, const Eigen::VectorXd& x,
                                Eigen::MatrixXd& jac2) {
        jac2.setZero();
        jac2(0, 14) = -v * std::cos(x(2));
        jac2(1, 14) = -v * std::sin(x(2));
    };
    const double vb = std::abs(v);
    auto jx = IntervalMatrix::zero(6, 6);
    jx.set_entry(0, 2, Interval(-vb, vb));
    jx.set_entry(1, 2, Interval(-vb, vb));
    jx.set_entry(0, 3, Interval(1.0));
    jx.set_entry(1, 4, Interval(1.0));
    jx.set_entry(2, 5, Interval(1.0));
    model.jacobian_bounds = jx;
    auto jxx = IntervalMatrix::zero(6, 36);
    jxx.set_entry(0, 14, Interval(-vb, vb));
    jxx.set_entry(1, 14, Interval(-vb, vb));
    model.second_jacobian_bounds = jxx;
    return model;
}

SystemModel make_linear(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionError("system matrix must be square and nonempty");
    }
    const auto n = a.rows();
    SystemModel model;
    model.n = static_cast<int>(n);
    model.name = "linear";
    model.f = [a](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        dx = a * x;
    };
    model.jacobian = [a](double, const Eigen::VectorXd&, Eigen::MatrixXd& jac) {
        jac = a;
    };
    model.second_jacobian = [n](double, const Eigen::VectorXd&,
                                Eigen::MatrixXd& jac2) {
        jac2.setZero(n, n * n);
    };
    model.jacobian_bounds = IntervalMatrix::point(a);
    model.second_jacobian_bounds = IntervalMatrix::zero(n, n * n);
    return model;
}

SystemModel make_riccati(const Interval& x0_range, double horizon) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("riccati horizon must be finite and >= 0");
    }
    if (horizon * x0_range.hi() >= 1.0) {
        const double pole = 1.0 / x0_range.hi();
        throw BlowUpError(
            "riccati jacobian bounds: integration from the upper initial "
            "state blows up at t = " +
            std::to_string(pole) + ", inside the horizon " +
            std::to_string(horizon),
            pole);
    }
    // The flow is nondecreasing in time and in x0, so the reachable states
    // over [0, horizon] stay inside the hull of the endpoint trajectories.
    const double lo0 = x0_range.lo();
    const double hi0 = x0_range.hi();
    const double lo_end = lo0 / (1.0 - horizon * lo0);
    const double hi_end = hi0 / (1.0 - horizon * hi0);
    const double x_lo = std::min(lo0, lo_end);
    const double x_hi = std::max(hi0, hi_end);

    SystemModel model;
    model.n = 1;
    model.name = "riccati";
    model.f = [](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        dx(0) = x(0) * x(0);
    };
    model.jacobian = [](double, const Eigen::VectorXd& x,
                        Eigen::MatrixXd& jac) {
        jac(0, 0) = 2.0 * x(0);
    };
    model.second_jacobian = [](double, const Eigen::VectorXd&,
                               Eigen::MatrixXd& jac2) {
        jac2(0, 0) = 2.0;
    };
    model.jacobian_bounds =
        IntervalMatrix::constant(1, 1, Interval(2.0 * x_lo, 2.0 * x_hi));
    model.second_jacobian_bounds =
        IntervalMatrix::constant(1, 1, Interval(2.0));
    return model;
}

namespace {

double require_param(const std::string& model, const ParamMap& params,
                     const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) {
        throw std::invalid_argument("model '" + model +
                                    "' missing parameter '" + key + "'");
    }
    return it->second;
}

}  // namespace

SystemModel make_model(const std::string& name, const ParamMap& params) {
    if (name == "unicycle") {
        return make_unicycle(require_param(name, params, "v"),
                             require_param(name, params, "omega"));
    }
    if (name == "riccati") {
        const Interval x0(require_param(name, params, "x0_lo"),
                          require_param(name, params, "x0_hi"));
        return make_riccati(x0, require_param(name, params, "horizon"));
    }
    if (name == "linear2") {
        Eigen::MatrixXd a(2, 2);
        a << require_param(name, params, "a11"),
            require_param(name, params, "a12"),
            require_param(name, params, "a21"),
            require_param(name, params, "a22");
        SystemModel model = make_linear(a);
        model.name = "linear2";
        return model;
    }
    throw std::invalid_argument("unknown model '" + name +
                                "'; known models: unicycle, riccati, linear2");
}

std::vector<std::string> model_names() {
    return {"unicycle", "riccati", "linear2"};
}

}  // namespace sensireach
