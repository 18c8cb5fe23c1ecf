#include "sensireach/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensireach/errors.hpp"
#include "sensireach/parallel.hpp"

namespace sensireach {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_problem(const ReachProblem& problem) {
    if (problem.model.n <= 0) {
        throw std::invalid_argument("reach problem has no model");
    }
    if (problem.x0.cols() != 1 || problem.x0.rows() != problem.model.n) {
        throw DimensionError("initial box must be " +
                             std::to_string(problem.model.n) + " x 1");
    }
    if (!(problem.tf >= problem.t0)) {
        throw std::invalid_argument("horizon must satisfy tf >= t0");
    }
    if (problem.per_dim < 1) {
        throw std::invalid_argument("grid resolution per dimension must be >= 1");
    }
}

TaylorOrder resolve_order(const ReachProblem& problem, double tau) {
    if (problem.taylor_order > 0) {
        return TaylorOrder(problem.taylor_order);
    }
    return choose_order(problem.model.jacobian_bounds, tau);
}

}  // namespace

std::string method_name(MethodTag tag) {
    switch (tag) {
        case MethodTag::algorithm1:
            return "algorithm1";
        case MethodTag::ia_only:
            return "ia_only";
        case MethodTag::sampling_falsification:
            return "sampling_falsification";
    }
    return "unknown";
}

IntervalMatrix step1_sx_tube(const SystemModel& model, double tau, TaylorOrder order) {
    return reach_tube_affine(model.jacobian_bounds,
                             IntervalMatrix::identity(model.n), tau, order);
}

IntervalMatrix step2_sxx_set(const SystemModel& model, const IntervalMatrix& sx_tube,
                             double tau, TaylorOrder order) {
    const Eigen::Index n = model.n;
    if (sx_tube.rows() != n || sx_tube.cols() != n) {
        throw DimensionError("first-order tube must be n x n");
    }
    // The second-order dynamics are linear in S2 with input H (S1 kron S1);
    // the input is bounded over the horizon via the stage-1 tube.
    const IntervalMatrix input = iv_matmul(model.second_jacobian_bounds,
                                           iv_kron(sx_tube, sx_tube));
    return reach_set_affine(model.jacobian_bounds, input,
                            IntervalMatrix::zero(n, n * n), tau, order);
}

SampledSensitivity step3_sx_set(const ReachProblem& problem, const IntervalMatrix& sxx_set) {
    check_problem(problem);
    const SampleGrid grid = uniform_grid(problem.x0, problem.per_dim);
    SampledSensitivity out;
    out.dispersion = grid.dispersion;
    out.samples.resize(grid.points.size());
    const int threads = resolve_thread_count(problem.threads);
    parallel_for(grid.points.size(), threads, [&](std::size_t i) {
        out.samples[i] = flow_with_sensitivity(problem.model, problem.t0, problem.tf,
                                               grid.points[i], problem.integrator)
                             .first_order;
    });
    out.bounds = sensitivity_bounds_from_samples(sxx_set, out.samples, grid.dispersion);
    return out;
}

ReachResult run_algorithm1(const ReachProblem& problem) {
    check_problem(problem);
    const auto run_start = Clock::now();
    const double tau = problem.tf - problem.t0;
    const TaylorOrder order = resolve_order(problem, tau);

    ReachResult result;
    result.method = MethodTag::algorithm1;
    result.guaranteed = true;
    result.per_dim = problem.per_dim;
    result.taylor_order = order.value();

    auto t = Clock::now();
    result.bundle.sx_tube = step1_sx_tube(problem.model, tau, order);
    result.timings.sx_tube_s = seconds_since(t);

    t = Clock::now();
    result.bundle.sxx_set =
        step2_sxx_set(problem.model, result.bundle.sx_tube, tau, order);
    result.timings.sxx_set_s = seconds_since(t);

    t = Clock::now();
    SampledSensitivity sampled = step3_sx_set(problem, result.bundle.sxx_set);
    result.bundle.sx_set = sampled.bounds;
    result.dispersion = sampled.dispersion;
    result.timings.sampling_s = seconds_since(t);

    t = Clock::now();
    const DecompositionSpec spec = build_decomposition(result.bundle.sx_set);
    result.reach_box = reach_oa_mm(problem.model, problem.t0, problem.tf,
                                   problem.x0, spec, problem.integrator);
    result.timings.reach_s = seconds_since(t);

    result.timings.total_s = seconds_since(run_start);
    return result;
}

ReachResult run_ia_only(const ReachProblem& problem) {
    check_problem(problem);
    const auto run_start = Clock::now();
    const double tau = problem.tf - problem.t0;
    const TaylorOrder order = resolve_order(problem, tau);

    ReachResult result;
    result.method = MethodTag::ia_only;
    result.guaranteed = true;
    result.taylor_order = order.value();

    // The interval transition matrix encloses every first-order sensitivity
    // across the box, so it can stand in for the sampled bounds directly.
    auto t = Clock::now();
    result.bundle.sx_set =
        transition_operator(problem.model.jacobian_bounds, tau, order);
    result.timings.sx_tube_s = seconds_since(t);

    t = Clock::now();
    const DecompositionSpec spec = build_decomposition(result.bundle.sx_set);
    result.reach_box = reach_oa_mm(problem.model, problem.t0, problem.tf,
                                   problem.x0, spec, problem.integrator);
    result.timings.reach_s = seconds_since(t);

    result.timings.total_s = seconds_since(run_start);
    return result;
}

ReachResult run_sampling_falsification(const ReachProblem& problem, int max_iters) {
    check_problem(problem);
    if (max_iters < 0) {
        throw std::invalid_argument("falsification iteration budget must be >= 0");
    }
    const auto run_start = Clock::now();
    const Eigen::Index n = problem.model.n;
    const int threads = resolve_thread_count(problem.threads);

    ReachResult result;
    result.method = MethodTag::sampling_falsification;
    result.guaranteed = false;
    result.per_dim = problem.per_dim;

    auto t = Clock::now();
    const SampleGrid grid = uniform_grid(problem.x0, problem.per_dim);
    result.dispersion = grid.dispersion;
    std::vector<Eigen::MatrixXd> samples(grid.points.size());
    parallel_for(grid.points.size(), threads, [&](std::size_t i) {
        samples[i] = flow_with_sensitivity(problem.model, problem.t0, problem.tf,
                                           grid.points[i], problem.integrator)
                         .first_order;
    });
    result.timings.sampling_s = seconds_since(t);

    Eigen::MatrixXd lo = samples.front();
    Eigen::MatrixXd hi = samples.front();
    for (const Eigen::MatrixXd& sample : samples) {
        lo = lo.cwiseMin(sample);
        hi = hi.cwiseMax(sample);
    }

    t = Clock::now();
    if (max_iters > 0) {
        // Per sensitivity entry and direction, a coordinate search over the
        // initial box tries to push the bound past the sample hull, starting
        // from the most extreme sample.  Search 2(i n + j) minimizes entry
        // (i, j); search 2(i n + j) + 1 maximizes it.
        const Eigen::VectorXd box_lo = problem.x0.lo().col(0);
        const Eigen::VectorXd box_hi = problem.x0.hi().col(0);
        Eigen::VectorXd bests(2 * n * n);
        parallel_for(static_cast<std::size_t>(2 * n * n), threads,
                     [&](std::size_t b) {
            const Eigen::Index i = static_cast<Eigen::Index>(b / 2) / n;
            const Eigen::Index j = static_cast<Eigen::Index>(b / 2) % n;
            const double sense = (b % 2 == 0) ? -1.0 : 1.0;
            const auto entry_of = [&](const Eigen::VectorXd& x) {
                return flow_with_sensitivity(problem.model, problem.t0,
                                             problem.tf, x, problem.integrator)
                    .first_order(i, j);
            };
            std::size_t arg = 0;
            for (std::size_t s = 1; s < samples.size(); ++s) {
                if (sense * samples[s](i, j) > sense * samples[arg](i, j)) {
                    arg = s;
                }
            }
            Eigen::VectorXd z = grid.points[arg];
            double best = sense * samples[arg](i, j);
            Eigen::VectorXd steps = 0.5 * (box_hi - box_lo);
            int halvings = 0;
            for (int pass = 0; pass < max_iters; ++pass) {
                bool improved = false;
                for (Eigen::Index k = 0; k < n; ++k) {
                    for (const double dir : {1.0, -1.0}) {
                        Eigen::VectorXd cand = z;
                        cand(k) = std::clamp(z(k) + dir * steps(k), box_lo(k),
                                             box_hi(k));
                        if (cand(k) == z(k)) {
                            continue;
                        }
                        const double value = sense * entry_of(cand);
                        if (value > best) {
                            best = value;
                            z = cand;
                            improved = true;
                        }
                    }
                }
                if (!improved) {
                    if (halvings >= 8) {
                        break;
                    }
                    steps *= 0.5;
                    ++halvings;
                }
            }
            bests(static_cast<Eigen::Index>(b)) = sense * best;
        });
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                lo(i, j) = std::min(lo(i, j), bests(2 * (i * n + j)));
                hi(i, j) = std::max(hi(i, j), bests(2 * (i * n + j) + 1));
            }
        }
    }
    result.bundle.sx_set = IntervalMatrix(lo, hi);
    result.timings.sampling_s += seconds_since(t);

    t = Clock::now();
    const DecompositionSpec spec = build_decomposition(result.bundle.sx_set);
    result.reach_box = reach_oa_mm(problem.model, problem.t0, problem.tf,
                                   problem.x0, spec, problem.integrator);
    result.timings.reach_s = seconds_since(t);

    result.timings.total_s = seconds_since(run_start);
    return result;
}

McReport monte_carlo_check(const ReachProblem& problem, const IntervalMatrix& reach_box,
                           int samples, std::uint64_t seed, double slack) {
    check_problem(problem);
    if (reach_box.cols() != 1 || reach_box.rows() != problem.model.n) {
        throw DimensionError("reach box must be " +
                             std::to_string(problem.model.n) + " x 1");
    }
    if (samples < 1) {
        throw std::invalid_argument("sample count must be >= 1");
    }
    const Eigen::Index n = problem.model.n;

    // Draw every start sequentially from one generator, then integrate in
    // parallel: the report is a pure function of the seed.
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> starts(samples);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x0(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            x0(i) = problem.x0.lo()(i, 0) +
                    u * (problem.x0.hi()(i, 0) - problem.x0.lo()(i, 0));
        }
        starts[s] = std::move(x0);
    }

    std::vector<Eigen::VectorXd> ends(samples);
    const int threads = resolve_thread_count(problem.threads);
    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
        ends[i] = flow(problem.model, problem.t0, problem.tf, starts[i],
                       problem.integrator);
    });

    McReport report;
    report.samples = samples;
    report.worst_violation_per_dim = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < samples; ++s) {
        double dist = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double out = std::max(
                {reach_box.lo()(i, 0) - ends[s](i),
                 ends[s](i) - reach_box.hi()(i, 0), 0.0});
            report.worst_violation_per_dim(i) =
                std::max(report.worst_violation_per_dim(i), out);
            dist = std::max(dist, out);
        }
        if (dist > slack) {
            ++report.violations;
        }
        report.worst_violation = std::max(report.worst_violation, dist);
    }
    report.fraction_contained =
        1.0 - static_cast<double>(report.violations) / samples;
    report.endpoints = std::move(ends);
    return report;
}

}  // namespace sensireach
