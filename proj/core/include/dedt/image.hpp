#ifndef DEDT_IMAGE_HPP
#define DEDT_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dedt/geometry.hpp"

namespace dedt {

// One grayscale video frame. Pixels are row-major 8-bit intensities.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    int index = 0;  // 1-based frame number

    std::uint8_t at(int y, int x) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// A candidate region resampled to a fixed grid, intensities in [0, 1].
struct Patch {
    int size = 0;
    std::vector<double> intensities;  // size * size
    BoundingBox source_box;
};

// Loads one raster (8-bit PGM "P5" or 8-bit PNG). Color PNG is converted to
// grayscale with ITU-R 601 luma weights, rounded to nearest.
Frame load_image(const std::filesystem::path& file);

// Loads every .pgm/.png in the directory in lexicographic filename order and
// numbers the frames 1..T. All frames must share dimensions.
std::vector<Frame> load_sequence(const std::filesystem::path& directory);

void save_pgm(const Frame& frame, const std::filesystem::path& file);

// Clips the box against the frame (out-of-frame pixels replicate the nearest
// edge), bilinearly resamples to patch_size x patch_size and scales to [0, 1].
Patch extract_patch(const Frame& frame, const BoundingBox& box, int patch_size);

}  // namespace dedt

#endif
