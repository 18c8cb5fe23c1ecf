#include "sensireach/mm_reach.hpp"

#include <cmath>
#include <string>

#include "sensireach/errors.hpp"

namespace sensireach {

DecompositionSpec build_decomposition(const IntervalMatrix& sx_bounds) {
    const auto n = sx_bounds.rows();
    if (n != sx_bounds.cols()) {
        throw DimensionError("sensitivity bounds must be square, got " +
                             std::to_string(n) + " x " +
                             std::to_string(sx_bounds.cols()));
    }
    DecompositionSpec spec{sx_bounds, sx_bounds.mid(),
                           std::vector<std::vector<CornerSource>>(
                               n, std::vector<CornerSource>(n)),
                           Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (spec.center(i, j) >= 0.0) {
                spec.selector[i][j] = CornerSource::from_x;
                spec.alpha(i, j) = std::max(0.0, -sx_bounds.lo()(i, j));
            } else {
                spec.selector[i][j] = CornerSource::from_y;
                spec.alpha(i, j) = std::max(0.0, sx_bounds.hi()(i, j));
            }
        }
    }
    return spec;
}

namespace {

Eigen::VectorXd cached_flow(const SystemModel& model, double t0, double tf,
                            const Eigen::VectorXd& z,
                            const IntegratorConfig& config, FlowCache* cache) {
    if (cache == nullptr) {
        return flow(model, t0, tf, z, config);
    }
    std::vector<double> key(z.data(), z.data() + z.size());
    auto it = cache->find(key);
    if (it == cache->end()) {
        it = cache->emplace(std::move(key), flow(model, t0, tf, z, config))
                 .first;
    }
    return it->second;
}

}  // namespace

Eigen::VectorXd decomposition_eval(const SystemModel& model, double t0,
                                   double tf, const DecompositionSpec& spec,
                                   const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y,
                                   const IntegratorConfig& config,
                                   FlowCache* cache) {
    const auto n = spec.bounds.rows();
    if (x.size() != n || y.size() != n || model.n != n) {
        throw DimensionError("decomposition arguments must have dimension " +
                             std::to_string(n));
    }
    Eigen::VectorXd g(n);
    Eigen::VectorXd corner(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            corner(j) =
                spec.selector[i][j] == CornerSource::from_x ? x(j) : y(j);
        }
        const Eigen::VectorXd phi =
            cached_flow(model, t0, tf, corner, config, cache);
        g(i) = phi(i) + spec.alpha.row(i).dot(x - y);
    }
    return g;
}

IntervalMatrix reach_oa_mm(const SystemModel& model, double t0, double tf,
                           const IntervalMatrix& box,
                           const DecompositionSpec& spec,
                           const IntegratorConfig& config) {
    if (box.cols() != 1 || box.rows() != model.n) {
        throw DimensionError("initial box must be " + std::to_string(model.n) +
                             " x 1");
    }
    FlowCache cache;
    const Eigen::VectorXd xl = box.lo().col(0);
    const Eigen::VectorXd xu = box.hi().col(0);
    const Eigen::VectorXd lower =
        decomposition_eval(model, t0, tf, spec, xl, xu, config, &cache);
    const Eigen::VectorXd upper =
        decomposition_eval(model, t0, tf, spec, xu, xl, config, &cache);
    for (Eigen::Index i = 0; i < model.n; ++i) {
        if (lower(i) > upper(i)) {
            throw OrderingError("reach bounds inverted in component " +
                                    std::to_string(i) +
                                    "; sensitivity bounds look unsound",
                                static_cast<int>(i));
        }
    }
    return IntervalMatrix(lower, upper);
}

SignStability is_sign_stable(const IntervalMatrix& sx_bounds) {
    SignStability out;
    out.entry.resize(sx_bounds.rows(), sx_bounds.cols());
    out.all = true;
    for (Eigen::Index i = 0; i < sx_bounds.rows(); ++i) {
        for (Eigen::Index j = 0; j < sx_bounds.cols(); ++j) {
            const bool stable =
                sx_bounds.lo()(i, j) >= 0.0 || sx_bounds.hi()(i, j) <= 0.0;
            out.entry(i, j) = stable;
            out.all = out.all && stable;
        }
    }
    return out;
}

}  // namespace sensireach
