#pragma once

#include <cstddef>
#include <vector>

namespace schrlat {

/// Axis-aligned box given by center and per-axis halfwidths.
struct Box {
    std::vector<double> center;
    std::vector<double> halfwidths;

    friend bool operator==(const Box&, const Box&) = default;
};

/// Disjoint intervals of a common halfwidth along one axis, centers ascending.
struct AxisUnion {
    std::vector<double> centers;
    double halfwidth = 0;

    friend bool operator==(const AxisUnion&, const AxisUnion&) = default;
};

/// Indicator of a finite union of pairwise disjoint axis-aligned boxes.
///
/// Two representations share one interface: an explicit box list, and a
/// product form where the union is A_1 x ... x A_n for per-axis interval
/// unions A_i. Thickened lattices use the product form, so their measures
/// factorize and never need the boxes materialized.
class BoxUnionWeight {
public:
    /// Throws ValidationError on dimension mismatch, non-positive
    /// halfwidths, or overlapping boxes.
    static BoxUnionWeight from_boxes(int n, std::vector<Box> boxes);
    static BoxUnionWeight product(std::vector<AxisUnion> axes);

    int dimension() const { return n_; }
    bool is_product() const { return product_; }
    std::size_t box_count() const;
    double volume() const;

    /// Valid only for the product form.
    const std::vector<AxisUnion>& axes() const { return axes_; }
    /// Valid only for the explicit form.
    const std::vector<Box>& explicit_boxes() const { return boxes_; }
    /// Materializes every box; throws ValidationError above `limit` boxes.
    std::vector<Box> boxes(std::size_t limit = 50'000'000) const;

    double min_halfwidth() const;
    std::vector<double> bbox_lo() const;
    std::vector<double> bbox_hi() const;

    friend bool operator==(const BoxUnionWeight&, const BoxUnionWeight&) = default;

private:
    int n_ = 0;
    bool product_ = false;
    std::vector<AxisUnion> axes_;
    std::vector<Box> boxes_;
};

/// Multiplies every center and halfwidth by lambda > 0.
BoxUnionWeight scale(const BoxUnionWeight& w, double lambda);

}  // namespace schrlat
