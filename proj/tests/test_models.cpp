#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sensireach/errors.hpp"
#include "sensireach/models.hpp"
#include "sensireach/sensitivity.hpp"

using namespace sensireach;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd eval_f(const SystemModel& m, double t, const VectorXd& x) {
    VectorXd dx = VectorXd::Zero(m.n);
    m.f(t, x, dx);
    return dx;
}

MatrixXd eval_jac(const SystemModel& m, double t, const VectorXd& x) {
    MatrixXd jac = MatrixXd::Zero(m.n, m.n);
    m.jacobian(t, x, jac);
    return jac;
}

MatrixXd eval_jac2(const SystemModel& m, double t, const VectorXd& x) {
    MatrixXd jac2 = MatrixXd::Zero(m.n, m.n * m.n);
    m.second_jacobian(t, x, jac2);
    return jac2;
}

// Central difference of f; column k approximates df/dx_k.
MatrixXd fd_jacobian(const SystemModel& m, double t, const VectorXd& x, double h) {
    MatrixXd out(m.n, m.n);
    for (int k = 0; k < m.n; ++k) {
        VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        out.col(k) = (eval_f(m, t, xp) - eval_f(m, t, xm)) / (2.0 * h);
    }
    return out;
}

// Central difference of the Jacobian; entry (i, k + j*n) approximates
// d^2 f_i / (dx_k dx_j).
MatrixXd fd_second_jacobian(const SystemModel& m, double t, const VectorXd& x,
                            double h) {
    MatrixXd out(m.n, m.n * m.n);
    for (int k = 0; k < m.n; ++k) {
        VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        MatrixXd dj = (eval_jac(m, t, xp) - eval_jac(m, t, xm)) / (2.0 * h);
        for (int i = 0; i < m.n; ++i) {
            for (int j = 0; j < m.n; ++j) {
                out(i, k + j * m.n) = dj(i, j);
            }
        }
    }
    return out;
}

bool bitwise_equal(const MatrixXd& a, const MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("unicycle vector field and derivative tables") {
    SystemModel uni = make_unicycle(0.25, 0.3);
    CHECK(uni.n == 6);
    CHECK(uni.name == "unicycle");

    VectorXd origin = VectorXd::Zero(6);
    VectorXd f0 = eval_f(uni, 0.0, origin);
    CHECK(f0(0) == 0.25);
    CHECK(f0(1) == 0.0);
    CHECK(f0(2) == 0.3);
    CHECK(f0.tail(3).isZero(0.0));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> span(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        VectorXd x(6);
        for (int i = 0; i < 6; ++i) {
            x(i) = span(rng);
        }
        VectorXd fx = eval_f(uni, 0.0, x);
        CHECK(fx(0) == 0.25 * std::cos(x(2)) + x(3));
        CHECK(fx(1) == 0.25 * std::sin(x(2)) + x(4));
        CHECK(fx(2) == 0.3 + x(5));
        CHECK(fx.tail(3).isZero(0.0));

        // Analytic derivatives against central differences.
        MatrixXd jac = eval_jac(uni, 0.0, x);
        MatrixXd jac_fd = fd_jacobian(uni, 0.0, x, 1e-6);
        CHECK((jac - jac_fd).cwiseAbs().maxCoeff() < 1e-6);
        MatrixXd jac2 = eval_jac2(uni, 0.0, x);
        MatrixXd jac2_fd = fd_second_jacobian(uni, 0.0, x, 1e-6);
        CHECK((jac2 - jac2_fd).cwiseAbs().maxCoeff() < 1e-6);

        // Every evaluation sits inside the declared global bounds.
        CHECK(iv_contains(uni.jacobian_bounds, jac, 0.0));
        CHECK(iv_contains(uni.second_jacobian_bounds, jac2, 0.0));
    }

    // Jacobian bound table: trig entries bounded by the speed, unit couplings
    // from the disturbance states, all else identically zero.
    const IntervalMatrix& jx = uni.jacobian_bounds;
    REQUIRE(jx.rows() == 6);
    REQUIRE(jx.cols() == 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            const bool trig = (i == 0 || i == 1) && j == 2;
            const bool unit = (i == 0 && j == 3) || (i == 1 && j == 4) || (i == 2 && j == 5);
            if (trig) {
                CHECK(jx.lo()(i, j) == -0.25);
                CHECK(jx.hi()(i, j) == 0.25);
            } else if (unit) {
                CHECK(jx.lo()(i, j) == 1.0);
                CHECK(jx.hi()(i, j) == 1.0);
            } else {
                CHECK(jx.lo()(i, j) == 0.0);
                CHECK(jx.hi()(i, j) == 0.0);
            }
        }
    }

    // Second table: only the heading-heading block (column 2 + 2*6 = 14) of the
    // two position rows is nonzero.
    const IntervalMatrix& jxx = uni.second_jacobian_bounds;
    REQUIRE(jxx.rows() == 6);
    REQUIRE(jxx.cols() == 36);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 36; ++j) {
            if ((i == 0 || i == 1) && j == 14) {
                CHECK(jxx.lo()(i, j) == -0.25);
                CHECK(jxx.hi()(i, j) == 0.25);
            } else {
                CHECK(jxx.lo()(i, j) == 0.0);
                CHECK(jxx.hi()(i, j) == 0.0);
            }
        }
    }

    // Negative speed bounds use the magnitude.
    SystemModel rev = make_unicycle(-0.5, 0.1);
    CHECK(rev.jacobian_bounds.lo()(0, 2) == -0.5);
    CHECK(rev.jacobian_bounds.hi()(0, 2) == 0.5);
    CHECK(rev.second_jacobian_bounds.hi()(1, 14) == 0.5);
}

TEST_CASE("linear model wraps the matrix exactly") {
    MatrixXd a(3, 3);
    a << 0.2, -1.0, 0.3,
         0.5, -0.4, 0.0,
         -0.1, 0.2, -0.6;
    SystemModel lin = make_linear(a);
    CHECK(lin.n == 3);
    CHECK(lin.name == "linear");

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> span(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x(3);
        for (int i = 0; i < 3; ++i) {
            x(i) = span(rng);
        }
        CHECK(bitwise_equal(eval_f(lin, 0.0, x), a * x));
        CHECK(bitwise_equal(eval_jac(lin, 0.0, x), a));
        CHECK(eval_jac2(lin, 0.0, x).isZero(0.0));
    }

    CHECK(bitwise_equal(lin.jacobian_bounds.lo(), a));
    CHECK(bitwise_equal(lin.jacobian_bounds.hi(), a));
    CHECK(lin.second_jacobian_bounds.lo().isZero(0.0));
    CHECK(lin.second_jacobian_bounds.hi().isZero(0.0));
    CHECK(lin.second_jacobian_bounds.rows() == 3);
    CHECK(lin.second_jacobian_bounds.cols() == 9);

    CHECK_THROWS_AS(make_linear(MatrixXd::Zero(2, 3)), DimensionError);
    CHECK_THROWS_AS(make_linear(MatrixXd()), DimensionError);
}

TEST_CASE("riccati bounds cover the trajectory hull") {
    SystemModel ric = make_riccati(Interval(0.4, 0.5), 1.0);
    CHECK(ric.n == 1);
    CHECK(ric.name == "riccati");

    // States reachable from [0.4, 0.5] in one time unit stay within
    // [0.4, 0.5 / (1 - 0.5)] = [0.4, 1.0]; Jacobian 2x doubles that.
    CHECK(ric.jacobian_bounds.lo()(0, 0) == 2.0 * 0.4);
    CHECK(ric.jacobian_bounds.hi()(0, 0) == 2.0);
    CHECK(ric.second_jacobian_bounds.lo()(0, 0) == 2.0);
    CHECK(ric.second_jacobian_bounds.hi()(0, 0) == 2.0);

    VectorXd x(1);
    x << 0.7;
    CHECK(eval_f(ric, 0.0, x)(0) == 0.7 * 0.7);
    CHECK(eval_jac(ric, 0.0, x)(0, 0) == 1.4);
    CHECK(eval_jac2(ric, 0.0, x)(0, 0) == 2.0);

    // Negative initial range: flow contracts toward zero, hull keeps the
    // original lower endpoint.
    SystemModel neg = make_riccati(Interval(-2.0, -1.0), 5.0);
    const double lo_end = -2.0 / (1.0 - 5.0 * -2.0);
    const double hi_end = -1.0 / (1.0 - 5.0 * -1.0);
    CHECK(neg.jacobian_bounds.lo()(0, 0) == 2.0 * std::min(-2.0, lo_end));
    CHECK(neg.jacobian_bounds.hi()(0, 0) == 2.0 * std::max(-1.0, hi_end));

    // Horizon reaching the pole of the upper trajectory is rejected with the
    // pole time attached.
    try {
        make_riccati(Interval(0.4, 0.5), 2.0);
        FAIL("expected blow-up rejection");
    } catch (const BlowUpError& e) {
        CHECK(e.time == 2.0);
        CHECK(std::string(e.what()).find("blows up") != std::string::npos);
    }
    CHECK_THROWS_AS(make_riccati(Interval(0.4, 0.5), 10.0), BlowUpError);

    CHECK_THROWS_AS(make_riccati(Interval(0.4, 0.5), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(
        make_riccati(Interval(0.4, 0.5), std::numeric_limits<double>::quiet_NaN()),
        std::invalid_argument);
}

TEST_CASE("name-keyed construction matches the direct builders") {
    SystemModel uni = make_model("unicycle", {{"v", 0.25}, {"omega", 0.3}});
    SystemModel direct = make_unicycle(0.25, 0.3);
    CHECK(uni.n == direct.n);
    CHECK(bitwise_equal(uni.jacobian_bounds.lo(), direct.jacobian_bounds.lo()));
    CHECK(bitwise_equal(uni.jacobian_bounds.hi(), direct.jacobian_bounds.hi()));
    VectorXd x(6);
    x << 0.1, -0.2, 0.7, 0.01, -0.01, 0.0;
    CHECK(bitwise_equal(eval_f(uni, 0.0, x), eval_f(direct, 0.0, x)));

    SystemModel ric = make_model(
        "riccati", {{"x0_lo", 0.4}, {"x0_hi", 0.5}, {"horizon", 1.0}});
    SystemModel ric_direct = make_riccati(Interval(0.4, 0.5), 1.0);
    CHECK(ric.jacobian_bounds.lo()(0, 0) == ric_direct.jacobian_bounds.lo()(0, 0));
    CHECK(ric.jacobian_bounds.hi()(0, 0) == ric_direct.jacobian_bounds.hi()(0, 0));

    SystemModel lin = make_model(
        "linear2", {{"a11", -1.0}, {"a12", 0.5}, {"a21", 0.3}, {"a22", -2.0}});
    CHECK(lin.name == "linear2");
    MatrixXd a(2, 2);
    a << -1.0, 0.5, 0.3, -2.0;
    CHECK(bitwise_equal(lin.jacobian_bounds.lo(), a));
    CHECK(bitwise_equal(lin.jacobian_bounds.hi(), a));

    // Missing parameters are named; unknown models list what exists.
    try {
        make_model("unicycle", {{"v", 0.25}});
        FAIL("expected missing-parameter rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("missing parameter 'omega'") != std::string::npos);
    }
    try {
        make_model("vanderpol", {});
        FAIL("expected unknown-model rejection");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("unknown model") != std::string::npos);
        CHECK(msg.find("unicycle") != std::string::npos);
    }

    auto names = model_names();
    REQUIRE(names.size() == 3);
    CHECK(names[0] == "unicycle");
    CHECK(names[1] == "riccati");
    CHECK(names[2] == "linear2");
}

TEST_CASE("registry-built linear flow matches the matrix exponential") {
    SystemModel lin = make_model(
        "linear2", {{"a11", -0.5}, {"a12", 0.8}, {"a21", -0.3}, {"a22", -1.2}});
    MatrixXd a(2, 2);
    a << -0.5, 0.8, -0.3, -1.2;

    IntegratorConfig cfg;
    cfg.steps = 1000;
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> span(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x0(2);
        x0 << span(rng), span(rng);
        const double tf = 0.5 + 0.1 * trial;
        MatrixXd truth = (tf * a).exp();
        VectorXd xf = flow(lin, 0.0, tf, x0, cfg);
        CHECK((xf - truth * x0).cwiseAbs().maxCoeff() < 1e-8);
        FlowResult res = flow_with_sensitivity(lin, 0.0, tf, x0, cfg);
        CHECK((res.first_order - truth).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("registry-built riccati flow matches the closed form") {
    SystemModel ric = make_model(
        "riccati", {{"x0_lo", 0.1}, {"x0_hi", 0.5}, {"horizon", 1.0}});
    IntegratorConfig cfg;
    cfg.steps = 1000;
    for (double x0v : {0.1, 0.3, 0.5}) {
        VectorXd x0(1);
        x0 << x0v;
        FlowResult res = flow_with_second_sensitivity(ric, 0.0, 1.0, x0, cfg);
        const double denom = 1.0 - x0v;
        CHECK(res.state(0) == doctest::Approx(x0v / denom).epsilon(1e-6));
        CHECK(res.first_order(0, 0) ==
              doctest::Approx(1.0 / (denom * denom)).epsilon(1e-6));
        CHECK(res.second_order(0, 0) ==
              doctest::Approx(2.0 / (denom * denom * denom)).epsilon(1e-5));
    }
}
