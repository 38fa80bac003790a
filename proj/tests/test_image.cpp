#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dedt/errors.hpp"
#include "dedt/image.hpp"

using namespace dedt;
namespace fs = std::filesystem;

namespace {

Frame uniform_frame(int w, int h, std::uint8_t v) {
    Frame f;
    f.width = w;
    f.height = h;
    f.index = 1;
    f.pixels.assign(static_cast<std::size_t>(w) * h, v);
    return f;
}

fs::path temp_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("pgm round-trips through save and load") {
    const fs::path dir = temp_dir("dedt_img_roundtrip");
    Frame f = uniform_frame(20, 16, 0);
    for (std::size_t i = 0; i < f.pixels.size(); ++i)
        f.pixels[i] = static_cast<std::uint8_t>(i * 7 % 251);
    save_pgm(f, dir / "a.pgm");
    const Frame g = load_image(dir / "a.pgm");
    CHECK(g.width == f.width);
    CHECK(g.height == f.height);
    CHECK(g.pixels == f.pixels);
}

TEST_CASE("load_sequence orders frames lexicographically and numbers them from 1") {
    const fs::path dir = temp_dir("dedt_img_seq");
    save_pgm(uniform_frame(16, 16, 10), dir / "0002.pgm");
    save_pgm(uniform_frame(16, 16, 20), dir / "0001.pgm");
    save_pgm(uniform_frame(16, 16, 30), dir / "0003.pgm");
    const auto frames = load_sequence(dir);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].index == 1);
    CHECK(frames[0].pixels[0] == 20);
    CHECK(frames[1].pixels[0] == 10);
    CHECK(frames[2].pixels[0] == 30);
}

TEST_CASE("load_sequence rejects an empty directory") {
    const fs::path dir = temp_dir("dedt_img_empty");
    CHECK_THROWS_AS(load_sequence(dir), IngestionError);
}

TEST_CASE("load_sequence rejects mixed dimensions") {
    const fs::path dir = temp_dir("dedt_img_mixed");
    save_pgm(uniform_frame(16, 16, 0), dir / "0001.pgm");
    save_pgm(uniform_frame(18, 16, 0), dir / "0002.pgm");
    CHECK_THROWS_AS(load_sequence(dir), IngestionError);
}

TEST_CASE("frames smaller than 16x16 are rejected") {
    const fs::path dir = temp_dir("dedt_img_small");
    save_pgm(uniform_frame(16, 16, 0), dir / "ok.pgm");  // save needs a valid frame
    std::ofstream out(dir / "tiny.pgm", std::ios::binary);
    out << "P5\n8 8\n255\n";
    for (int i = 0; i < 64; ++i) out.put(0);
    out.close();
    CHECK_THROWS_AS(load_image(dir / "tiny.pgm"), IngestionError);
}

TEST_CASE("red rgb png converts to luma 76") {
    // round(0.299 * 255) = 76.
    const fs::path dir = temp_dir("dedt_img_png");
    const fs::path png = dir / "red.png";
    // Minimal 16x16 all-red 8-bit RGB PNG, generated offline and embedded.
    static const unsigned char png_bytes[] = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x10, 0x00, 0x00, 0x00, 0x10, 0x08, 0x02, 0x00, 0x00,
        0x00, 0x90, 0x91, 0x68, 0x36, 0x00, 0x00, 0x00, 0x16, 0x49, 0x44, 0x41, 0x54, 0x78,
        0xda, 0x63, 0xf8, 0xcf, 0xc0, 0x40, 0x12, 0x62, 0x18, 0xd5, 0x30, 0xaa, 0x61, 0xf8,
        0x6a, 0x00, 0x00, 0x90, 0xf9, 0xff, 0x01, 0xf2, 0xee, 0xe8, 0x57, 0x00, 0x00, 0x00,
        0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    std::ofstream out(png, std::ios::binary);
    out.write(reinterpret_cast<const char*>(png_bytes), sizeof(png_bytes));
    out.close();
    const Frame f = load_image(png);
    REQUIRE(f.width == 16);
    REQUIRE(f.height == 16);
    for (std::uint8_t v : f.pixels) CHECK(v == 76);
}

TEST_CASE("extract_patch of a uniform frame is constant") {
    const Frame f = uniform_frame(64, 64, 128);
    const Patch p = extract_patch(f, BoundingBox{0, 0, 64, 64}, 32);
    for (double v : p.intensities) CHECK(v == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("extract_patch at native size reproduces the source region") {
    Frame f = uniform_frame(40, 40, 0);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x)
            f.pixels[y * 40 + x] = static_cast<std::uint8_t>((x * 3 + y * 5) % 256);
    const Patch p = extract_patch(f, BoundingBox{4, 6, 8, 8}, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(p.intensities[y * 8 + x] ==
                  doctest::Approx(f.at(6 + y, 4 + x) / 255.0).epsilon(1e-12));
}

TEST_CASE("extract_patch replicates the edge outside the frame") {
    // 4x4 toy frame whose first column is 10 and the rest 200; a box hanging
    // half off the left edge must fill its left half with the column value.
    Frame f = uniform_frame(16, 16, 200);
    for (int y = 0; y < 16; ++y) f.pixels[y * 16] = 10;
    const Patch p = extract_patch(f, BoundingBox{-8, 0, 16, 16}, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 7; ++x)  // comfortably left of the blend point
            CHECK(p.intensities[y * 16 + x] == doctest::Approx(10.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("extract_patch rejects degenerate boxes") {
    const Frame f = uniform_frame(32, 32, 0);
    CHECK_THROWS_AS(extract_patch(f, BoundingBox{0, 0, 0, 10}, 16), ContractViolation);
    CHECK_THROWS_AS(extract_patch(f, BoundingBox{0, 0, 10, -1}, 16), ContractViolation);
}
