#pragma once

#include <utility>
#include <vector>

#include "dprfs/common.hpp"

namespace dprfs {

/// One set-valued observation: an unordered finite collection of points in
/// R^d. The empty pattern is a valid value; it keeps a dimension tag so that
/// dimension checks remain possible.
class PointPattern {
public:
    /// Empty pattern of the given dimension.
    explicit PointPattern(int dim) : dim_(dim) {
        if (dim < 1)
            throw InputError("PointPattern: dimension must be >= 1");
    }

    /// Pattern from a nonempty list of points; all must share one dimension.
    explicit PointPattern(std::vector<Vec> points)
        : dim_(points.empty() ? 0 : static_cast<int>(points.front().size())),
          points_(std::move(points)) {
        if (points_.empty())
            throw InputError(
                "PointPattern: use PointPattern(dim) for the empty pattern");
        for (const Vec &x : points_)
            if (x.size() != dim_)
                throw InputError("PointPattern: mixed point dimensions");
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(points_.size()); }
    bool empty() const { return points_.empty(); }
    const std::vector<Vec> &points() const { return points_; }
    const Vec &operator[](int i) const { return points_[static_cast<size_t>(i)]; }

    void add_point(const Vec &x) {
        if (x.size() != dim_)
            throw InputError("PointPattern: point dimension mismatch");
        points_.push_back(x);
    }

private:
    int dim_;
    std::vector<Vec> points_;
};

/// Parameters of the Gaussian feature density: mean and SPD covariance.
struct GaussianParams {
    Vec mean;
    Mat covariance;

    int dim() const { return static_cast<int>(mean.size()); }
};

/// Poisson RFS parameters: expected cardinality and the feature density.
struct PoissonRfsParams {
    double rate = 1.0;
    GaussianParams feature;
};

} // namespace dprfs
