#include "sensireach/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sensireach {

namespace {

void check_box(const IntervalMatrix& box, const char* op) {
    if (box.cols() != 1 || box.rows() == 0) {
        throw DimensionError(std::string(op) + ": box must be an n x 1 interval vector");
    }
}

}  // namespace

SampleGrid uniform_grid(const IntervalMatrix& box, int per_dim) {
    check_box(box, "uniform_grid");
    if (per_dim < 1) {
        throw std::invalid_argument("uniform_grid: samples per dimension must be >= 1");
    }
    const Eigen::Index n = box.rows();

    long total = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        total *= per_dim;
        if (total > 100'000'000) {
            throw std::invalid_argument("uniform_grid: grid of " + std::to_string(per_dim) +
                                        "^" + std::to_string(n) + " points is too large");
        }
    }

    SampleGrid grid;
    grid.per_dim = per_dim;
    // Half of the largest width, divided once, so the dispersion of nested
    // grids scales exactly with the refinement ratio.
    const double half_width = 0.5 * (box.hi() - box.lo()).maxCoeff();
    grid.dispersion = half_width / per_dim;

    grid.points.reserve(total);
    std::vector<int> index(n, 0);
    Eigen::VectorXd point(n);
    for (long c = 0; c < total; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double width = box.hi()(i, 0) - box.lo()(i, 0);
            point(i) = box.lo()(i, 0) + (index[i] + 0.5) * width / per_dim;
        }
        grid.points.push_back(point);
        // Odometer increment, last dimension fastest.
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            if (++index[i] < per_dim) break;
            index[i] = 0;
        }
    }
    return grid;
}

double dispersion_check(const SampleGrid& grid, const IntervalMatrix& box, int resolution) {
    check_box(box, "dispersion_check");
    if (resolution < 2) {
        throw std::invalid_argument("dispersion_check: resolution must be >= 2");
    }
    if (grid.points.empty()) {
        throw std::invalid_argument("dispersion_check: grid has no samples");
    }
    const Eigen::Index n = box.rows();

    long total = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
        total *= resolution;
        if (total > 100'000'000) {
            throw std::invalid_argument("dispersion_check: dense grid is too large");
        }
    }

    double worst = 0.0;
    std::vector<int> index(n, 0);
    Eigen::VectorXd point(n);
    for (long c = 0; c < total; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double width = box.hi()(i, 0) - box.lo()(i, 0);
            point(i) = box.lo()(i, 0) + index[i] * width / (resolution - 1);
        }
        double nearest = std::numeric_limits<double>::infinity();
        for (const Eigen::VectorXd& sample : grid.points) {
            nearest = std::min(nearest, (point - sample).lpNorm<Eigen::Infinity>());
        }
        worst = std::max(worst, nearest);
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            if (++index[i] < resolution) break;
            index[i] = 0;
        }
    }
    return worst;
}

Eigen::MatrixXd sensitivity_dilation(const IntervalMatrix& second_order_bounds,
                                     double dispersion) {
    if (!(dispersion >= 0.0) || !std::isfinite(dispersion)) {
        throw std::invalid_argument("sensitivity_dilation: dispersion must be finite and >= 0");
    }
    const Eigen::Index n = second_order_bounds.rows();
    if (second_order_bounds.cols() != n * n) {
        throw DimensionError("sensitivity_dilation: second-order bounds must be n x n^2");
    }
    // Block-diagonal stacking I kron ones(n, 1): column j picks rows j*n ..
    // j*n + n - 1.  The dispersion multiplies the row sums as one final
    // scaling (see the header).
    Eigen::MatrixXd stack = Eigen::MatrixXd::Zero(n * n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        stack.block(j * n, j, n, 1).setOnes();
    }
    return (iv_abs_sup(second_order_bounds) * stack) * dispersion;
}

IntervalMatrix sensitivity_bounds_from_samples(const IntervalMatrix& second_order_bounds,
                                               const std::vector<Eigen::MatrixXd>& samples,
                                               double dispersion) {
    if (samples.empty()) {
        throw std::invalid_argument("sensitivity_bounds_from_samples: need at least one sample");
    }
    const Eigen::Index n = samples.front().rows();
    if (samples.front().cols() != n) {
        throw DimensionError("sensitivity_bounds_from_samples: samples must be square");
    }
    if (second_order_bounds.rows() != n || second_order_bounds.cols() != n * n) {
        throw DimensionError("sensitivity_bounds_from_samples: second-order bounds must be n x n^2");
    }

    Eigen::MatrixXd lo = samples.front();
    Eigen::MatrixXd hi = samples.front();
    for (const Eigen::MatrixXd& sample : samples) {
        if (sample.rows() != n || sample.cols() != n) {
            throw DimensionError("sensitivity_bounds_from_samples: sample shape mismatch");
        }
        lo = lo.cwiseMin(sample);
        hi = hi.cwiseMax(sample);
    }

    const Eigen::MatrixXd dilation = sensitivity_dilation(second_order_bounds, dispersion);
    return IntervalMatrix(lo - dilation, hi + dilation);
}

}  // namespace sensireach
