#pragma once

// Uniform grid sampling of boxes, the dispersion of such grids (the largest
// infinity-norm distance from any point of the box to its nearest sample),
// and the sample-plus-dilation first-order sensitivity bounds built from
// second-order sensitivity bounds.

#include <Eigen/Dense>

#include <vector>

#include "sensireach/interval.hpp"

namespace sensireach {

struct SampleGrid {
    std::vector<Eigen::VectorXd> points;  // per_dim^n points, lexicographic
    int per_dim = 0;
    double dispersion = 0.0;
};

// Grid with per_dim samples per dimension, each dimension's coordinates at
// lo + (k + 1/2) * width / per_dim.  Points are enumerated lexicographically
// (last dimension fastest).  The dispersion is max width / (2 * per_dim).
SampleGrid uniform_grid(const IntervalMatrix& box, int per_dim);

// Brute-force dispersion estimate: sup over a dense grid (resolution points
// per dimension, endpoints included) of the distance to the nearest sample.
// Always a lower bound on the true dispersion; approaches it as the
// resolution grows.
double dispersion_check(const SampleGrid& grid, const IntervalMatrix& box, int resolution);

// Bounds on the first-order sensitivity over the whole box: the entrywise
// hull of the sampled sensitivities, dilated by M = |S2|_sup * (I kron ones)
// * dispersion, which by the mean value theorem covers the gap between the
// samples and the box.  The dispersion enters as a single final scaling so
// that refining the grid rescales M exactly.
IntervalMatrix sensitivity_bounds_from_samples(const IntervalMatrix& second_order_bounds,
                                               const std::vector<Eigen::MatrixXd>& samples,
                                               double dispersion);

// The dilation matrix M alone: |S2|_sup * (I kron ones(n, 1)) * dispersion.
// Linear in the dispersion, so refining a grid by a factor rescales M by the
// same factor, exactly when the factor is a power of two.
Eigen::MatrixXd sensitivity_dilation(const IntervalMatrix& second_order_bounds,
                                     double dispersion);

}  // namespace sensireach
