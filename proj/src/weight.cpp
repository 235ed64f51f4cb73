#include "schrlat/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schrlat/exact.hpp"

namespace schrlat {

namespace {

bool overlap(const Box& a, const Box& b) {
    for (std::size_t i = 0; i < a.center.size(); ++i)
        if (std::abs(a.center[i] - b.center[i]) >= a.halfwidths[i] + b.halfwidths[i]) return false;
    return true;
}

}  // namespace

BoxUnionWeight BoxUnionWeight::from_boxes(int n, std::vector<Box> boxes) {
    if (n < 1) throw ValidationError("weight dimension must be >= 1");
    for (const auto& b : boxes) {
        if (b.center.size() != static_cast<std::size_t>(n) || b.halfwidths.size() != static_cast<std::size_t>(n))
            throw ValidationError("box dimension does not match weight dimension");
        for (const double hw : b.halfwidths)
            if (!(hw > 0)) throw ValidationError("box halfwidths must be positive");
    }
    // Sweep along axis 0 so only boxes whose first-axis extents meet are compared.
    std::vector<std::size_t> order(boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return boxes[a].center[0] - boxes[a].halfwidths[0] < boxes[b].center[0] - boxes[b].halfwidths[0];
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Box& a = boxes[order[i]];
        const double a_hi = a.center[0] + a.halfwidths[0];
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Box& b = boxes[order[j]];
            if (b.center[0] - b.halfwidths[0] >= a_hi) break;
            if (overlap(a, b)) throw ValidationError("weight boxes overlap");
        }
    }
    BoxUnionWeight w;
    w.n_ = n;
    w.boxes_ = std::move(boxes);
    return w;
}

BoxUnionWeight BoxUnionWeight::product(std::vector<AxisUnion> axes) {
    if (axes.empty()) throw ValidationError("product weight needs at least one axis");
    for (auto& ax : axes) {
        if (!(ax.halfwidth > 0)) throw ValidationError("axis halfwidth must be positive");
        if (ax.centers.empty()) throw ValidationError("axis union must be non-empty");
        if (!std::is_sorted(ax.centers.begin(), ax.centers.end()))
            throw ValidationError("axis centers must be ascending");
        for (std::size_t i = 1; i < ax.centers.size(); ++i)
            if (ax.centers[i] - ax.centers[i - 1] <= 2 * ax.halfwidth)
                throw ValidationError("axis intervals overlap");
    }
    BoxUnionWeight w;
    w.n_ = static_cast<int>(axes.size());
    w.product_ = true;
    w.axes_ = std::move(axes);
    return w;
}

std::size_t BoxUnionWeight::box_count() const {
    if (!product_) return boxes_.size();
    std::size_t count = 1;
    for (const auto& ax : axes_) count *= ax.centers.size();
    return count;
}

double BoxUnionWeight::volume() const {
    if (product_) {
        double v = 1;
        for (const auto& ax : axes_) v *= static_cast<double>(ax.centers.size()) * 2 * ax.halfwidth;
        return v;
    }
    double v = 0;
    for (const auto& b : boxes_) {
        double bv = 1;
        for (const double hw : b.halfwidths) bv *= 2 * hw;
        v += bv;
    }
    return v;
}

std::vector<Box> BoxUnionWeight::boxes(std::size_t limit) const {
    if (!product_) return boxes_;
    const std::size_t count = box_count();
    if (count > limit) throw ValidationError("too many boxes to materialize");
    std::vector<Box> out;
    out.reserve(count);
    std::vector<double> hws;
    for (const auto& ax : axes_) hws.push_back(ax.halfwidth);
    std::vector<std::size_t> idx(axes_.size(), 0);
    for (std::size_t i = 0; i < count; ++i) {
        Box b{std::vector<double>(axes_.size()), hws};
        for (std::size_t d = 0; d < axes_.size(); ++d) b.center[d] = axes_[d].centers[idx[d]];
        out.push_back(std::move(b));
        for (std::size_t d = axes_.size(); d-- > 0;) {
            if (++idx[d] < axes_[d].centers.size()) break;
            idx[d] = 0;
        }
    }
    return out;
}

double BoxUnionWeight::min_halfwidth() const {
    double m = std::numeric_limits<double>::infinity();
    if (product_) {
        for (const auto& ax : axes_) m = std::min(m, ax.halfwidth);
    } else {
        for (const auto& b : boxes_)
            for (const double hw : b.halfwidths) m = std::min(m, hw);
    }
    return m;
}

std::vector<double> BoxUnionWeight::bbox_lo() const {
    std::vector<double> lo(static_cast<std::size_t>(n_), std::numeric_limits<double>::infinity());
    if (product_) {
        for (std::size_t d = 0; d < axes_.size(); ++d) lo[d] = axes_[d].centers.front() - axes_[d].halfwidth;
    } else {
        for (const auto& b : boxes_)
            for (std::size_t d = 0; d < lo.size(); ++d) lo[d] = std::min(lo[d], b.center[d] - b.halfwidths[d]);
    }
    return lo;
}

std::vector<double> BoxUnionWeight::bbox_hi() const {
    std::vector<double> hi(static_cast<std::size_t>(n_), -std::numeric_limits<double>::infinity());
    if (product_) {
        for (std::size_t d = 0; d < axes_.size(); ++d) hi[d] = axes_[d].centers.back() + axes_[d].halfwidth;
    } else {
        for (const auto& b : boxes_)
            for (std::size_t d = 0; d < hi.size(); ++d) hi[d] = std::max(hi[d], b.center[d] + b.halfwidths[d]);
    }
    return hi;
}

BoxUnionWeight scale(const BoxUnionWeight& w, double lambda) {
    if (!(lambda > 0)) throw ValidationError("scale factor must be positive");
    if (w.is_product()) {
        std::vector<AxisUnion> axes = w.axes();
        for (auto& ax : axes) {
            for (double& c : ax.centers) c *= lambda;
            ax.halfwidth *= lambda;
        }
        return BoxUnionWeight::product(std::move(axes));
    }
    std::vector<Box> boxes = w.explicit_boxes();
    for (auto& b : boxes) {
        for (double& c : b.center) c *= lambda;
        for (double& hw : b.halfwidths) hw *= lambda;
    }
    return BoxUnionWeight::from_boxes(w.dimension(), std::move(boxes));
}

}  // namespace schrlat
