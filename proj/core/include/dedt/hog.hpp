#ifndef DEDT_HOG_HPP
#define DEDT_HOG_HPP

#include <vector>

#include "dedt/image.hpp"

namespace dedt {

using FeatureVector = std::vector<double>;

struct HogParams {
    int patch_size = 32;
    int cell_size = 8;
    int bins = 9;          // unsigned orientations over [0, pi)
    double clip = 0.2;     // L2-hys clipping threshold

    int cells() const { return patch_size / cell_size; }
    int blocks() const { return cells() - 1; }  // 2x2-cell blocks, stride 1 cell
    int dim() const { return blocks() * blocks() * 4 * bins; }
};

// Dalal-Triggs descriptor: centered [-1,0,1] gradients, trilinear voting into
// cell histograms, 2x2-cell blocks with L2-hys normalization. Every component
// ends up in [0, 1].
FeatureVector hog(const Patch& patch, const HogParams& params);

}  // namespace dedt

#endif
