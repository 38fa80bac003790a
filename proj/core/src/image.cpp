#include "dedt/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dedt/errors.hpp"

namespace dedt {
namespace {

std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

int next_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, returns a nonnegative integer.
    for (;;) {
        int c = in.peek();
        if (c == EOF) return -1;
        if (std::isspace(c)) {
            in.get();
        } else if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            break;
        }
    }
    int value = 0;
    bool any = false;
    for (;;) {
        int c = in.peek();
        if (c == EOF || !std::isdigit(c)) break;
        value = value * 10 + (in.get() - '0');
        any = true;
    }
    return any ? value : -1;
}

Frame load_pgm(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IngestionError("cannot open " + file.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5')
        throw IngestionError("not a binary PGM (P5): " + file.string());
    const int width = next_pnm_token(in);
    const int height = next_pnm_token(in);
    const int maxval = next_pnm_token(in);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw IngestionError("unsupported PGM header in " + file.string());
    in.get();  // single whitespace after maxval
    Frame f;
    f.width = width;
    f.height = height;
    f.pixels.resize(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw IngestionError("truncated PGM data in " + file.string());
    return f;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

Frame load_png(const std::filesystem::path& file) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(file.string().c_str(), "rb");
    if (!ctx.fp) throw IngestionError("cannot open " + file.string());
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IngestionError("libpng init failed for " + file.string());
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IngestionError("libpng init failed for " + file.string());
    if (setjmp(png_jmpbuf(ctx.png))) throw IngestionError("corrupt PNG: " + file.string());

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color_type = png_get_color_type(ctx.png, ctx.info);
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int channels = png_get_channels(ctx.png, ctx.info);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * channels);
    Frame f;
    f.width = static_cast<int>(width);
    f.height = static_cast<int>(height);
    f.pixels.resize(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y) {
        png_read_row(ctx.png, row.data(), nullptr);
        std::uint8_t* dst = f.pixels.data() + static_cast<std::size_t>(y) * width;
        if (channels == 1) {
            std::copy(row.begin(), row.end(), dst);
        } else if (channels == 3) {
            for (png_uint_32 x = 0; x < width; ++x) {
                const double r = row[3 * x], g = row[3 * x + 1], b = row[3 * x + 2];
                dst[x] = static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
            }
        } else {
            throw IngestionError("unsupported PNG channel layout in " + file.string());
        }
    }
    return f;
}

}  // namespace

Frame load_image(const std::filesystem::path& file) {
    const std::string ext = lower_ext(file);
    Frame f;
    if (ext == ".pgm")
        f = load_pgm(file);
    else if (ext == ".png")
        f = load_png(file);
    else
        throw IngestionError("unsupported raster format: " + file.string());
    if (f.width < 16 || f.height < 16)
        throw IngestionError("frame smaller than 16x16: " + file.string());
    return f;
}

std::vector<Frame> load_sequence(const std::filesystem::path& directory) {
    std::error_code ec;
    if (!std::filesystem::is_directory(directory, ec))
        throw IngestionError("not a directory: " + directory.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lower_ext(entry.path());
        if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    if (files.empty())
        throw IngestionError("no .pgm or .png frames in " + directory.string());
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        Frame f = load_image(files[i]);
        if (!frames.empty() && (f.width != frames[0].width || f.height != frames[0].height))
            throw IngestionError("frame dimensions change at " + files[i].string());
        f.index = static_cast<int>(i) + 1;
        frames.push_back(std::move(f));
    }
    return frames;
}

void save_pgm(const Frame& frame, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IngestionError("cannot write " + file.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw IngestionError("write failed: " + file.string());
}

Patch extract_patch(const Frame& frame, const BoundingBox& box, int patch_size) {
    if (!box.valid()) throw ContractViolation("extract_patch: box with non-positive extent");
    if (patch_size < 1) throw ContractViolation("extract_patch: patch_size must be >= 1");
    Patch p;
    p.size = patch_size;
    p.source_box = box;
    p.intensities.resize(static_cast<std::size_t>(patch_size) * patch_size);
    const int w = frame.width, h = frame.height;
    for (int i = 0; i < patch_size; ++i) {
        const double sy = box.y + (i + 0.5) * box.h / patch_size - 0.5;
        for (int j = 0; j < patch_size; ++j) {
            const double sx = box.x + (j + 0.5) * box.w / patch_size - 0.5;
            // Bilinear sample with edge replication outside the frame.
            const double cx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
            const double cy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
            const int x0 = static_cast<int>(std::floor(cx));
            const int y0 = static_cast<int>(std::floor(cy));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = cx - x0;
            const double fy = cy - y0;
            const double v = (1.0 - fy) * ((1.0 - fx) * frame.at(y0, x0) + fx * frame.at(y0, x1)) +
                             fy * ((1.0 - fx) * frame.at(y1, x0) + fx * frame.at(y1, x1));
            p.intensities[static_cast<std::size_t>(i) * patch_size + j] = v / 255.0;
        }
    }
    return p;
}

}  // namespace dedt
