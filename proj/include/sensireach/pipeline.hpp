#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sensireach/affine_reach.hpp"
#include "sensireach/interval.hpp"
#include "sensireach/mm_reach.hpp"
#include "sensireach/ode.hpp"
#include "sensireach/sampling.hpp"
#include "sensireach/sensitivity.hpp"

namespace sensireach {

// One reachability question: where can the model end up at tf, starting
// anywhere in the box x0 at t0.
struct ReachProblem {
    SystemModel model;
    double t0 = 0.0;
    double tf = 1.0;
    IntervalMatrix x0;      // n x 1
    int per_dim = 2;        // grid resolution per dimension for sampling
    int taylor_order = 0;   // 0 picks the order automatically
    IntegratorConfig integrator;
    int threads = 1;        // 0 resolves via environment / hardware
};

enum class MethodTag { algorithm1, ia_only, sampling_falsification };
std::string method_name(MethodTag tag);

// Intermediate sensitivity enclosures produced on the way to the reach box.
// Methods that skip a stage leave the corresponding member empty.
struct SensitivityBundle {
    IntervalMatrix sx_tube;  // n x n, first order over the whole horizon
    IntervalMatrix sxx_set;  // n x n^2, second order at the horizon
    IntervalMatrix sx_set;   // n x n, first order at the horizon
};

// Wall-clock per stage, reported on stdout only so result files stay
// byte-identical across reruns.
struct StepTimings {
    double sx_tube_s = 0.0;
    double sxx_set_s = 0.0;
    double sampling_s = 0.0;
    double reach_s = 0.0;
    double total_s = 0.0;
};

struct ReachResult {
    MethodTag method = MethodTag::algorithm1;
    bool guaranteed = true;
    IntervalMatrix reach_box;  // n x 1
    SensitivityBundle bundle;
    int per_dim = 0;
    int taylor_order = 0;
    double dispersion = 0.0;
    StepTimings timings;
};

// Stage 1: interval tube containing the first-order sensitivity over the
// whole horizon, from its linear variational dynamics.
IntervalMatrix step1_sx_tube(const SystemModel& model, double tau, TaylorOrder order);

// Stage 2: interval enclosure of the second-order sensitivity at the
// horizon.  Its dynamics are linear with the input H (S1 kron S1), bounded
// using the stage-1 tube.
IntervalMatrix step2_sxx_set(const SystemModel& model, const IntervalMatrix& sx_tube,
                             double tau, TaylorOrder order);

// Stage 3: grid-sample the first-order sensitivity across the initial box
// and dilate the hull by the second-order bounds times the grid dispersion.
struct SampledSensitivity {
    std::vector<Eigen::MatrixXd> samples;  // S1 at tf, one per grid point
    IntervalMatrix bounds;                 // n x n
    double dispersion = 0.0;
};
SampledSensitivity step3_sx_set(const ReachProblem& problem, const IntervalMatrix& sxx_set);

// Full pipeline: stages 1-3 then the decomposition-based reach evaluation.
ReachResult run_algorithm1(const ReachProblem& problem);

// Coarse baseline: takes the interval transition matrix itself as the
// first-order sensitivity bounds, skipping sampling entirely.
ReachResult run_ia_only(const ReachProblem& problem);

// Unsound baseline: sensitivity bounds from the hull of grid samples,
// enlarged per entry by a cyclic coordinate search over the initial box that
// tries to falsify the current bound, then fed to the same decomposition
// step.  The result is an empirical estimate, not an over-approximation.
ReachResult run_sampling_falsification(const ReachProblem& problem, int max_iters = 2);

// Random initial states, integrated forward and tested against the claimed
// reach box.  Sample generation is sequential in `seed` so reports do not
// depend on the worker count.
struct McReport {
    int samples = 0;
    int violations = 0;                     // samples landing outside the box
    double fraction_contained = 1.0;
    double worst_violation = 0.0;           // largest distance outside
    Eigen::VectorXd worst_violation_per_dim;  // n, zero where contained
    std::vector<Eigen::VectorXd> endpoints;   // the integrated cloud
};
McReport monte_carlo_check(const ReachProblem& problem, const IntervalMatrix& reach_box,
                           int samples, std::uint64_t seed, double slack = 0.0);

}  // namespace sensireach
