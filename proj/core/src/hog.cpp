#include "dedt/hog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dedt/errors.hpp"

namespace dedt {

FeatureVector hog(const Patch& patch, const HogParams& params) {
    const int ps = params.patch_size;
    if (patch.size != ps) throw ContractViolation("hog: patch size does not match configuration");
    if (ps % params.cell_size != 0 || params.cells() < 2)
        throw ContractViolation("hog: patch_size must be a multiple of cell_size with >= 2 cells");

    const int ncells = params.cells();
    const int bins = params.bins;
    const double cs = params.cell_size;
    std::vector<double> hist(static_cast<std::size_t>(ncells) * ncells * bins, 0.0);

    auto px = [&](int y, int x) {
        return patch.intensities[static_cast<std::size_t>(y) * ps + x];
    };

    for (int y = 0; y < ps; ++y) {
        for (int x = 0; x < ps; ++x) {
            const double gx = px(y, std::min(x + 1, ps - 1)) - px(y, std::max(x - 1, 0));
            const double gy = px(std::min(y + 1, ps - 1), x) - px(std::max(y - 1, 0), x);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += std::numbers::pi;
            if (theta >= std::numbers::pi) theta -= std::numbers::pi;

            // Orientation interpolation between the two nearest bin centers.
            const double pos = theta / std::numbers::pi * bins - 0.5;
            int b0 = static_cast<int>(std::floor(pos));
            const double fb = pos - b0;
            b0 = (b0 % bins + bins) % bins;
            const int b1 = (b0 + 1) % bins;

            // Spatial interpolation between the four nearest cell centers.
            const double cxp = (x + 0.5) / cs - 0.5;
            const double cyp = (y + 0.5) / cs - 0.5;
            const int cx0 = static_cast<int>(std::floor(cxp));
            const int cy0 = static_cast<int>(std::floor(cyp));
            const double fx = cxp - cx0;
            const double fy = cyp - cy0;
            for (int dy = 0; dy < 2; ++dy) {
                const int cy = cy0 + dy;
                if (cy < 0 || cy >= ncells) continue;
                const double wy = dy == 0 ? 1.0 - fy : fy;
                for (int dx = 0; dx < 2; ++dx) {
                    const int cx = cx0 + dx;
                    if (cx < 0 || cx >= ncells) continue;
                    const double wx = dx == 0 ? 1.0 - fx : fx;
                    double* cell = &hist[(static_cast<std::size_t>(cy) * ncells + cx) * bins];
                    cell[b0] += mag * wy * wx * (1.0 - fb);
                    cell[b1] += mag * wy * wx * fb;
                }
            }
        }
    }

    const int nblocks = params.blocks();
    FeatureVector out;
    out.reserve(static_cast<std::size_t>(params.dim()));
    std::vector<double> block(static_cast<std::size_t>(4) * bins);
    for (int by = 0; by < nblocks; ++by) {
        for (int bx = 0; bx < nblocks; ++bx) {
            int idx = 0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const double* cell = &hist[(static_cast<std::size_t>(by + dy) * ncells + bx + dx) * bins];
                    for (int b = 0; b < bins; ++b) block[idx++] = cell[b];
                }
            double norm2 = 0.0;
            for (double v : block) norm2 += v * v;
            if (norm2 > 0.0) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (double& v : block) v = std::min(v * inv, params.clip);
                norm2 = 0.0;
                for (double v : block) norm2 += v * v;
                const double inv2 = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
                for (double& v : block) v *= inv2;
            }
            out.insert(out.end(), block.begin(), block.end());
        }
    }
    return out;
}

}  // namespace dedt
