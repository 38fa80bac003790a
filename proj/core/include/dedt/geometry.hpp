#ifndef DEDT_GEOMETRY_HPP
#define DEDT_GEOMETRY_HPP

#include <utility>
#include <vector>

#include "dedt/rng.hpp"

namespace dedt {

// Axis-aligned box in pixel coordinates, real-valued. (x, y) is the top-left
// corner. w and h must stay positive.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return w * h; }
    bool valid() const { return w > 0.0 && h > 0.0; }
};

// Translation plus log-scale change relative to a box center.
struct Transformation {
    double dx = 0.0;
    double dy = 0.0;
    double ds = 0.0;  // log-scale, clamped to [ln 0.5, ln 2]
};

Transformation negate(const Transformation& t);

// Isotropic Gaussian search distribution over transformations.
struct SearchDistribution {
    double sigma_xy = 0.0;  // pixels
    double sigma_s = 0.0;   // log-scale units
};

// Shift the box center by (dx, dy) and scale width/height by exp(ds) about
// the center.
BoundingBox apply(const BoundingBox& box, const Transformation& t);

// Draws n candidate transformations around prev. Candidate 1 is always the
// identity, so the previous state is evaluated every frame.
std::vector<std::pair<Transformation, BoundingBox>> sample_candidates(
    const BoundingBox& prev, int n, const SearchDistribution& dist, Rng& rng);

// Intersection over union of two boxes, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

double center_distance(const BoundingBox& a, const BoundingBox& b);

double clamp_log_scale(double ds);

}  // namespace dedt

#endif
