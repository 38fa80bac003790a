#include "dedt/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dedt/errors.hpp"

namespace dedt {

double clamp_log_scale(double ds) {
    static const double lo = std::log(0.5);
    static const double hi = std::log(2.0);
    return std::clamp(ds, lo, hi);
}

Transformation negate(const Transformation& t) { return {-t.dx, -t.dy, -t.ds}; }

BoundingBox apply(const BoundingBox& box, const Transformation& t) {
    if (!box.valid()) throw ContractViolation("apply: box with non-positive extent");
    const double s = std::exp(t.ds);
    const double w = box.w * s;
    const double h = box.h * s;
    return {box.cx() + t.dx - 0.5 * w, box.cy() + t.dy - 0.5 * h, w, h};
}

std::vector<std::pair<Transformation, BoundingBox>> sample_candidates(
    const BoundingBox& prev, int n, const SearchDistribution& dist, Rng& rng) {
    if (n < 1) throw ContractViolation("sample_candidates: n must be >= 1");
    if (!prev.valid()) throw ContractViolation("sample_candidates: invalid box");
    std::vector<std::pair<Transformation, BoundingBox>> out;
    out.reserve(static_cast<std::size_t>(n));
    out.emplace_back(Transformation{}, prev);
    for (int j = 1; j < n; ++j) {
        Transformation t;
        t.dx = rng.gaussian(0.0, dist.sigma_xy);
        t.dy = rng.gaussian(0.0, dist.sigma_xy);
        t.ds = clamp_log_scale(rng.gaussian(0.0, dist.sigma_s));
        out.emplace_back(t, apply(prev, t));
    }
    return out;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (!a.valid() || !b.valid()) throw ContractViolation("iou: invalid box");
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
    return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

}  // namespace dedt
