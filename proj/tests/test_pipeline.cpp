#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <stdexcept>

#include "sensireach/affine_reach.hpp"
#include "sensireach/errors.hpp"
#include "sensireach/models.hpp"
#include "sensireach/pipeline.hpp"

using namespace sensireach;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

IntervalMatrix vec_box(const VectorXd& lo, const VectorXd& hi) {
    return IntervalMatrix(MatrixXd(lo), MatrixXd(hi));
}

bool bitwise_equal(const MatrixXd& a, const MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool bitwise_equal(const IntervalMatrix& a, const IntervalMatrix& b) {
    return bitwise_equal(a.lo(), b.lo()) && bitwise_equal(a.hi(), b.hi());
}

// Small disturbed-unicycle box, fast integrator settings.
ReachProblem unicycle_problem() {
    ReachProblem p;
    p.model = make_unicycle(0.25, 0.3);
    p.t0 = 0.0;
    p.tf = 2.0;
    VectorXd lo(6), hi(6);
    lo << 0.0, 0.0, 0.39, -0.05, -0.05, -0.03;
    hi << 0.5, 0.5, 0.6, 0.0, 0.0, 0.0;
    p.x0 = vec_box(lo, hi);
    p.per_dim = 2;
    p.integrator.steps = 200;
    return p;
}

}  // namespace

TEST_CASE("problem validation") {
    ReachProblem p = unicycle_problem();

    ReachProblem no_model = p;
    no_model.model = SystemModel{};
    CHECK_THROWS_AS(run_algorithm1(no_model), std::invalid_argument);

    ReachProblem bad_box = p;
    bad_box.x0 = IntervalMatrix::zero(3, 1);
    CHECK_THROWS_AS(run_algorithm1(bad_box), DimensionError);

    ReachProblem bad_span = p;
    bad_span.tf = -1.0;
    CHECK_THROWS_AS(run_algorithm1(bad_span), std::invalid_argument);

    ReachProblem bad_grid = p;
    bad_grid.per_dim = 0;
    CHECK_THROWS_AS(run_algorithm1(bad_grid), std::invalid_argument);

    CHECK_THROWS_AS(run_sampling_falsification(p, -1), std::invalid_argument);

    CHECK(method_name(MethodTag::algorithm1) == "algorithm1");
    CHECK(method_name(MethodTag::ia_only) == "ia_only");
    CHECK(method_name(MethodTag::sampling_falsification) == "sampling_falsification");
}

TEST_CASE("stage one tube is exact for a static system and sound for the unicycle") {
    // Zero dynamics: the sensitivity never moves off the identity, and the
    // affine tube collapses to exactly that point.
    SystemModel still = make_linear(MatrixXd::Zero(2, 2));
    IntervalMatrix tube = step1_sx_tube(still, 1.5, TaylorOrder(6));
    CHECK(bitwise_equal(tube.lo(), MatrixXd::Identity(2, 2)));
    CHECK(bitwise_equal(tube.hi(), MatrixXd::Identity(2, 2)));

    SystemModel uni = make_unicycle(0.25, 0.3);
    const double tau = 2.0;
    TaylorOrder order = choose_order(uni.jacobian_bounds, tau);
    IntervalMatrix uni_tube = step1_sx_tube(uni, tau, order);
    CHECK(iv_contains(uni_tube, MatrixXd::Identity(6, 6), 1e-12));

    // True sensitivities along trajectories from the box stay inside.
    IntegratorConfig cfg;
    cfg.steps = 200;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    VectorXd lo(6), hi(6);
    lo << 0.0, 0.0, 0.39, -0.05, -0.05, -0.03;
    hi << 0.5, 0.5, 0.6, 0.0, 0.0, 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x0(6);
        for (int i = 0; i < 6; ++i) {
            x0(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
        }
        const double t = tau * unit(rng);
        MatrixXd sx = flow_with_sensitivity(uni, 0.0, t, x0, cfg).first_order;
        CHECK(iv_contains(uni_tube, sx, 1e-8));
    }
}

TEST_CASE("stage two vanishes without curvature and covers the scalar closed form") {
    SystemModel lin = make_linear((MatrixXd(2, 2) << -1.0, 0.5, 0.3, -2.0).finished());
    TaylorOrder order = choose_order(lin.jacobian_bounds, 1.0);
    IntervalMatrix tube = step1_sx_tube(lin, 1.0, order);
    IntervalMatrix sxx = step2_sxx_set(lin, tube, 1.0, order);
    REQUIRE(sxx.rows() == 2);
    REQUIRE(sxx.cols() == 4);
    CHECK(sxx.lo().isZero(0.0));
    CHECK(sxx.hi().isZero(0.0));

    CHECK_THROWS_AS(step2_sxx_set(lin, IntervalMatrix::identity(3), 1.0, order),
                    DimensionError);

    // Scalar quadratic model: S2(1; x0) = 2 / (1 - x0)^3 for x0 in [0.4, 0.5].
    SystemModel ric = make_riccati(Interval(0.4, 0.5), 1.0);
    TaylorOrder ric_order = choose_order(ric.jacobian_bounds, 1.0);
    IntervalMatrix ric_tube = step1_sx_tube(ric, 1.0, ric_order);
    for (double x0 : {0.4, 0.45, 0.5}) {
        for (double t : {0.0, 0.3, 0.7, 1.0}) {
            const double s1 = 1.0 / ((1.0 - t * x0) * (1.0 - t * x0));
            CHECK(ric_tube.lo()(0, 0) <= s1 + 1e-9);
            CHECK(ric_tube.hi()(0, 0) >= s1 - 1e-9);
        }
    }
    IntervalMatrix ric_sxx = step2_sxx_set(ric, ric_tube, 1.0, ric_order);
    for (double x0 : {0.4, 0.45, 0.5}) {
        const double d = 1.0 - x0;
        const double s2 = 2.0 / (d * d * d);
        CHECK(ric_sxx.lo()(0, 0) <= s2 + 1e-9);
        CHECK(ric_sxx.hi()(0, 0) >= s2 - 1e-9);
    }

    // Zero horizon: nothing accumulates.
    IntervalMatrix instant = step2_sxx_set(ric, ric_tube, 0.0, ric_order);
    CHECK(instant.lo().isZero(0.0));
    CHECK(instant.hi().isZero(0.0));
}

TEST_CASE("stage three collapses to the sample hull when curvature is absent") {
    ReachProblem p;
    p.model = make_linear((MatrixXd(2, 2) << -1.0, 0.5, 0.3, -2.0).finished());
    p.tf = 1.0;
    VectorXd lo(2), hi(2);
    lo << -1.0, -0.5;
    hi << 1.0, 0.5;
    p.x0 = vec_box(lo, hi);
    p.per_dim = 2;
    p.integrator.steps = 500;

    IntervalMatrix sxx = IntervalMatrix::zero(2, 4);
    SampledSensitivity sampled = step3_sx_set(p, sxx);
    REQUIRE(sampled.samples.size() == 4);

    // A linear system's sensitivity ignores the start point, so the hull is a
    // point and the zero curvature keeps it that way.
    for (const MatrixXd& s : sampled.samples) {
        CHECK(bitwise_equal(s, sampled.samples.front()));
    }
    CHECK(bitwise_equal(sampled.bounds.lo(), sampled.samples.front()));
    CHECK(bitwise_equal(sampled.bounds.hi(), sampled.samples.front()));
    MatrixXd truth = ((MatrixXd(2, 2) << -1.0, 0.5, 0.3, -2.0).finished()).exp();
    CHECK((sampled.samples.front() - truth).cwiseAbs().maxCoeff() < 1e-8);

    // Dispersion follows the widest dimension: half of width 2, split twice.
    CHECK(sampled.dispersion == 0.5);

    // The pipeline wires the stage exactly as the sampling primitive does.
    IntervalMatrix rebuilt = sensitivity_bounds_from_samples(
        sxx, sampled.samples, sampled.dispersion);
    CHECK(bitwise_equal(rebuilt, sampled.bounds));
}

TEST_CASE("stage three bounds contain true sensitivities of the unicycle") {
    ReachProblem p = unicycle_problem();
    TaylorOrder order = choose_order(p.model.jacobian_bounds, p.tf);
    IntervalMatrix tube = step1_sx_tube(p.model, p.tf, order);
    IntervalMatrix sxx = step2_sxx_set(p.model, tube, p.tf, order);

    SampledSensitivity sampled = step3_sx_set(p, sxx);
    REQUIRE(sampled.samples.size() == 64);

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd x0(6);
        for (int i = 0; i < 6; ++i) {
            x0(i) = p.x0.lo()(i, 0) + unit(rng) * (p.x0.hi()(i, 0) - p.x0.lo()(i, 0));
        }
        MatrixXd sx = flow_with_sensitivity(p.model, p.t0, p.tf, x0, p.integrator)
                          .first_order;
        CHECK(iv_contains(sampled.bounds, sx, 1e-8));
    }
}

TEST_CASE("full pipeline collapses on a point box") {
    ReachProblem p = unicycle_problem();
    VectorXd x0(6);
    x0 << 0.2, 0.1, 0.5, -0.02, -0.01, -0.01;
    p.x0 = vec_box(x0, x0);
    p.per_dim = 1;

    ReachResult res = run_algorithm1(p);
    CHECK(res.method == MethodTag::algorithm1);
    CHECK(res.guaranteed);
    CHECK(res.dispersion == 0.0);
    VectorXd end = flow(p.model, p.t0, p.tf, x0, p.integrator);
    CHECK(bitwise_equal(res.reach_box.lo(), MatrixXd(end)));
    CHECK(bitwise_equal(res.reach_box.hi(), MatrixXd(end)));
}

TEST_CASE("full pipeline covers corner images of a linear system") {
    ReachProblem p;
    p.model = make_model("linear2",
                         {{"a11", -1.0}, {"a12", 0.5}, {"a21", 0.3}, {"a22", -2.0}});
    p.tf = 1.0;
    VectorXd lo(2), hi(2);
    lo << -1.0, -0.5;
    hi << 1.0, 0.5;
    p.x0 = vec_box(lo, hi);
    p.per_dim = 2;
    p.integrator.steps = 500;

    ReachResult res = run_algorithm1(p);
    MatrixXd a(2, 2);
    a << -1.0, 0.5, 0.3, -2.0;
    MatrixXd phi = a.exp();
    for (int c = 0; c < 4; ++c) {
        VectorXd corner(2);
        corner << (c & 1 ? hi(0) : lo(0)), (c & 2 ? hi(1) : lo(1));
        CHECK(iv_contains(res.reach_box, MatrixXd(phi * corner), 1e-8));
    }
    CHECK(res.taylor_order >= 6);
    CHECK(res.per_dim == 2);
}

TEST_CASE("coarse baseline skips sampling but still encloses sensitivities") {
    ReachProblem p = unicycle_problem();
    ReachResult res = run_ia_only(p);
    CHECK(res.method == MethodTag::ia_only);
    CHECK(res.guaranteed);
    CHECK(res.bundle.sx_tube.rows() == 0);
    CHECK(res.bundle.sxx_set.rows() == 0);
    REQUIRE(res.bundle.sx_set.rows() == 6);

    // The interval transition matrix is what the baseline advertises.
    TaylorOrder order = choose_order(p.model.jacobian_bounds, p.tf - p.t0);
    IntervalMatrix op = transition_operator(p.model.jacobian_bounds, p.tf - p.t0, order);
    CHECK(bitwise_equal(res.bundle.sx_set, op));

    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd x0(6);
        for (int i = 0; i < 6; ++i) {
            x0(i) = p.x0.lo()(i, 0) + unit(rng) * (p.x0.hi()(i, 0) - p.x0.lo()(i, 0));
        }
        MatrixXd sx = flow_with_sensitivity(p.model, p.t0, p.tf, x0, p.integrator)
                          .first_order;
        CHECK(iv_contains(res.bundle.sx_set, sx, 1e-8));
        CHECK(iv_contains(res.reach_box,
                          MatrixXd(flow(p.model, p.t0, p.tf, x0, p.integrator)), 1e-8));
    }
}

TEST_CASE("falsification baseline widens sampled bounds and never claims a guarantee") {
    // Linear system: sensitivity is constant across the box, so no amount of
    // searching can move the hull.
    ReachProblem lin;
    lin.model = make_model("linear2",
                           {{"a11", -1.0}, {"a12", 0.5}, {"a21", 0.3}, {"a22", -2.0}});
    lin.tf = 1.0;
    VectorXd llo(2), lhi(2);
    llo << -1.0, -0.5;
    lhi << 1.0, 0.5;
    lin.x0 = vec_box(llo, lhi);
    lin.per_dim = 2;
    lin.integrator.steps = 300;

    ReachResult searched = run_sampling_falsification(lin, 2);
    ReachResult hull_only = run_sampling_falsification(lin, 0);
    CHECK_FALSE(searched.guaranteed);
    CHECK_FALSE(hull_only.guaranteed);
    CHECK(searched.method == MethodTag::sampling_falsification);
    CHECK(bitwise_equal(searched.bundle.sx_set, hull_only.bundle.sx_set));
    CHECK(searched.bundle.sx_set.width().isZero(0.0));

    // Scalar quadratic flow: the sensitivity grows toward the upper corner of
    // the box, which a midpoint-only grid misses and the search recovers.
    ReachProblem ric;
    ric.model = make_riccati(Interval(0.4, 0.5), 1.0);
    ric.tf = 1.0;
    VectorXd rlo(1), rhi(1);
    rlo << 0.4;
    rhi << 0.5;
    ric.x0 = vec_box(rlo, rhi);
    ric.per_dim = 1;
    ric.integrator.steps = 400;

    ReachResult point = run_sampling_falsification(ric, 0);
    CHECK(point.bundle.sx_set.width()(0, 0) == 0.0);
    const double mid_s1 = 1.0 / (0.55 * 0.55);
    CHECK(point.bundle.sx_set.lo()(0, 0) == doctest::Approx(mid_s1).epsilon(1e-6));

    ReachResult widened = run_sampling_falsification(ric, 2);
    CHECK(widened.bundle.sx_set.width()(0, 0) > 0.1);
    CHECK(widened.bundle.sx_set.hi()(0, 0) == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(widened.bundle.sx_set.lo()(0, 0) ==
          doctest::Approx(1.0 / 0.36).epsilon(1e-4));
}

TEST_CASE("random endpoint check is a pure function of the seed") {
    ReachProblem p = unicycle_problem();
    p.per_dim = 1;
    ReachResult res = run_algorithm1(p);

    McReport a = monte_carlo_check(p, res.reach_box, 100, 7);
    CHECK(a.samples == 100);
    CHECK(a.violations == 0);
    CHECK(a.fraction_contained == 1.0);
    CHECK(a.worst_violation == 0.0);
    REQUIRE(a.endpoints.size() == 100);

    McReport b = monte_carlo_check(p, res.reach_box, 100, 7);
    for (int s = 0; s < 100; ++s) {
        CHECK(bitwise_equal(MatrixXd(a.endpoints[s]), MatrixXd(b.endpoints[s])));
    }

    ReachProblem threaded = p;
    threaded.threads = 4;
    McReport c = monte_carlo_check(threaded, res.reach_box, 100, 7);
    for (int s = 0; s < 100; ++s) {
        CHECK(bitwise_equal(MatrixXd(a.endpoints[s]), MatrixXd(c.endpoints[s])));
    }

    // A box shrunk to the midpoint must be falsified, and the per-dimension
    // worst distances reduce to the scalar worst.
    MatrixXd mid = 0.5 * (res.reach_box.lo() + res.reach_box.hi());
    McReport shrunk = monte_carlo_check(p, IntervalMatrix::point(mid), 100, 7);
    CHECK(shrunk.violations > 0);
    CHECK(shrunk.fraction_contained < 1.0);
    CHECK(shrunk.worst_violation > 0.0);
    CHECK(shrunk.worst_violation_per_dim.size() == 6);
    CHECK(shrunk.worst_violation_per_dim.maxCoeff() == shrunk.worst_violation);

    CHECK_THROWS_AS(monte_carlo_check(p, res.reach_box, 0, 7), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_check(p, IntervalMatrix::zero(2, 1), 10, 7),
                    DimensionError);
}

TEST_CASE("worker count does not change any result") {
    ReachProblem p = unicycle_problem();
    ReachResult serial = run_algorithm1(p);
    ReachProblem wide = p;
    wide.threads = 4;
    ReachResult parallel = run_algorithm1(wide);

    CHECK(bitwise_equal(serial.reach_box, parallel.reach_box));
    CHECK(bitwise_equal(serial.bundle.sx_tube, parallel.bundle.sx_tube));
    CHECK(bitwise_equal(serial.bundle.sxx_set, parallel.bundle.sxx_set));
    CHECK(bitwise_equal(serial.bundle.sx_set, parallel.bundle.sx_set));
    CHECK(serial.dispersion == parallel.dispersion);

    ReachResult sf1 = run_sampling_falsification(p, 1);
    ReachResult sf4 = run_sampling_falsification(wide, 1);
    CHECK(bitwise_equal(sf1.bundle.sx_set, sf4.bundle.sx_set));
    CHECK(bitwise_equal(sf1.reach_box, sf4.reach_box));
}
