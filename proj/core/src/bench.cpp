#include "dedt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dedt/errors.hpp"

namespace dedt {
namespace {

void require_lengths(const Trajectory& pred, const Trajectory& gt) {
    if (pred.size() != gt.size())
        throw ContractViolation("trajectory length mismatch: pred has " +
                                std::to_string(pred.size()) + " frames, gt has " +
                                std::to_string(gt.size()));
    if (pred.empty()) throw ContractViolation("empty trajectories");
}

std::vector<double> ious(const Trajectory& pred, const Trajectory& gt) {
    std::vector<double> v(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) v[i] = iou(pred[i], gt[i]);
    return v;
}

}  // namespace

double success_auc(const Trajectory& pred, const Trajectory& gt) {
    require_lengths(pred, gt);
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += iou(pred[i], gt[i]);
    return sum / static_cast<double>(pred.size());
}

double success_fraction_at(const Trajectory& pred, const Trajectory& gt, double tau) {
    require_lengths(pred, gt);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (iou(pred[i], gt[i]) > tau) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double success_auc_trapezoid(const Trajectory& pred, const Trajectory& gt) {
    require_lengths(pred, gt);
    const std::vector<double> ov = ious(pred, gt);
    const int points = 101;
    double acc = 0.0;
    double prev = 0.0;
    for (int p = 0; p < points; ++p) {
        const double tau = static_cast<double>(p) / (points - 1);
        std::size_t hits = 0;
        for (double v : ov)
            if (v > tau) ++hits;
        const double frac = static_cast<double>(hits) / static_cast<double>(ov.size());
        if (p > 0) acc += 0.5 * (frac + prev) / (points - 1);
        prev = frac;
    }
    return acc;
}

std::vector<double> precision_at(const Trajectory& pred, const Trajectory& gt,
                                 const std::vector<double>& thresholds) {
    require_lengths(pred, gt);
    std::vector<double> dists(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) dists[i] = center_distance(pred[i], gt[i]);
    std::vector<double> curve(thresholds.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        std::size_t hits = 0;
        for (double d : dists)
            if (d <= thresholds[j]) ++hits;
        curve[j] = static_cast<double>(hits) / static_cast<double>(dists.size());
    }
    return curve;
}

double precision_at_20(const Trajectory& pred, const Trajectory& gt) {
    return precision_at(pred, gt, {20.0})[0];
}

double success_rate_05(const Trajectory& pred, const Trajectory& gt) {
    return success_fraction_at(pred, gt, 0.5);
}

GroundTruth load_groundtruth(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IngestionError("cannot open ground-truth file: " + file.string());
    GroundTruth gt;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& c : line)
            if (c == ',' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ss(line);
        double x, y, w, h;
        if (!(ss >> x >> y >> w >> h)) {
            if (line.find_first_not_of(' ') == std::string::npos) continue;  // blank line
            throw IngestionError("ground-truth parse error at " + file.string() + ":" +
                                 std::to_string(lineno));
        }
        // OTB coordinates are 1-based.
        BoundingBox box{x - 1.0, y - 1.0, w, h};
        if (!box.valid())
            throw IngestionError("non-positive box at " + file.string() + ":" +
                                 std::to_string(lineno));
        gt.boxes.push_back(box);
    }
    if (gt.boxes.empty()) throw IngestionError("ground-truth file is empty: " + file.string());
    return gt;
}

void save_groundtruth(const Trajectory& boxes, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IngestionError("cannot write ground-truth file: " + file.string());
    for (const BoundingBox& b : boxes) {
        char buf[128];
        // Stored 1-based to match the OTB convention expected by load_groundtruth.
        std::snprintf(buf, sizeof(buf), "%.0f,%.0f,%.0f,%.0f\n", b.x + 1.0, b.y + 1.0, b.w, b.h);
        out << buf;
    }
}

Trajectory load_trajectory_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IngestionError("cannot open trajectory file: " + file.string());
    Trajectory traj;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line.rfind("t,", 0) != 0)
                throw IngestionError("missing trajectory header at " + file.string() + ":1");
            continue;
        }
        if (line.find_first_not_of(" \r") == std::string::npos) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ss(line);
        double t, x, y, w, h;
        if (!(ss >> t >> x >> y >> w >> h))
            throw IngestionError("trajectory parse error at " + file.string() + ":" +
                                 std::to_string(lineno));
        traj.push_back(BoundingBox{x, y, w, h});
    }
    if (traj.empty()) throw IngestionError("trajectory file has no rows: " + file.string());
    return traj;
}

EvalReport evaluate(const Trajectory& pred, const Trajectory& gt) {
    require_lengths(pred, gt);
    EvalReport r;
    r.runs = 1;
    r.frames = static_cast<int>(pred.size());
    r.auc = success_auc(pred, gt);
    r.auc_trapezoid = success_auc_trapezoid(pred, gt);
    r.precision20 = precision_at_20(pred, gt);
    r.success_at_05 = success_rate_05(pred, gt);
    std::vector<double> thresholds(51);
    for (int i = 0; i <= 50; ++i) thresholds[i] = i;
    r.precision_curve = precision_at(pred, gt, thresholds);
    r.success_curve.resize(101);
    for (int i = 0; i <= 100; ++i)
        r.success_curve[i] = success_fraction_at(pred, gt, i / 100.0);
    return r;
}

namespace {

// Smooth value-noise texture: bilinear interpolation of a random lattice.
struct Texture {
    int lattice;
    std::vector<double> values;  // lattice * lattice in [0, 1]

    Texture(int lattice_size, Rng& rng) : lattice(lattice_size), values(lattice * lattice) {
        for (double& v : values) v = rng.uniform();
    }

    // u, v in [0, 1), wraps around.
    double at(double u, double v) const {
        const double fu = u * lattice;
        const double fv = v * lattice;
        const int i0 = static_cast<int>(std::floor(fu)) % lattice;
        const int j0 = static_cast<int>(std::floor(fv)) % lattice;
        const int i1 = (i0 + 1) % lattice;
        const int j1 = (j0 + 1) % lattice;
        const double a = fu - std::floor(fu);
        const double b = fv - std::floor(fv);
        const double v00 = values[j0 * lattice + i0];
        const double v10 = values[j0 * lattice + i1];
        const double v01 = values[j1 * lattice + i0];
        const double v11 = values[j1 * lattice + i1];
        return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
    }
};

std::uint8_t to_u8(double v) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(q);
}

}  // namespace

SynthSequence synth_sequence(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.frames < 2) throw ContractViolation("synthetic sequence needs at least 2 frames");
    if (spec.size < 32 || spec.target < 8 || spec.target >= spec.size)
        throw ContractViolation("bad synthetic geometry");

    Rng master(seed);
    Rng texture_rng = Rng(spec.texture_seed).derive(11);
    // High-contrast fine texture for the target, coarse dim texture behind it.
    Texture target_tex(12, texture_rng);
    Texture background_tex(6, texture_rng);
    Rng motion_rng = master.derive(1);
    Rng noise_rng = master.derive(2);

    const bool iv = spec.challenges.count("IV") > 0;
    const bool occ = spec.challenges.count("OCC") > 0;
    const bool sv = spec.challenges.count("SV") > 0;

    const int T = spec.frames;
    const double base = spec.target;

    // Occlusion bar sweeps the target horizontally during the middle 15% of frames.
    const int occ_len = std::max(1, static_cast<int>(std::lround(0.15 * T)));
    const int occ_start = (T - occ_len) / 2;

    SynthSequence seq;
    seq.frames.reserve(T);
    seq.gt.boxes.reserve(T);
    seq.gt.attributes = spec.challenges;

    double cx = spec.size / 2.0;
    double cy = spec.size / 2.0;

    for (int t = 0; t < T; ++t) {
        if (t > 0) {
            cx += motion_rng.gaussian(0.0, spec.motion_sigma);
            cy += motion_rng.gaussian(0.0, spec.motion_sigma);
        }
        const double phase = T > 1 ? static_cast<double>(t) / (T - 1) : 0.0;
        const double scale = sv ? 1.025 + 0.225 * std::sin(2.0 * std::numbers::pi * phase) : 1.0;
        const double side = base * scale;
        // Keep the whole target in frame.
        cx = std::clamp(cx, side / 2.0 + 1.0, spec.size - side / 2.0 - 1.0);
        cy = std::clamp(cy, side / 2.0 + 1.0, spec.size - side / 2.0 - 1.0);
        const BoundingBox box{cx - side / 2.0, cy - side / 2.0, side, side};

        const double gain = iv ? 1.0 + 0.4 * std::sin(2.0 * std::numbers::pi * phase) : 1.0;

        double bar_x0 = 0.0, bar_x1 = 0.0;
        const bool occluded = occ && t >= occ_start && t < occ_start + occ_len;
        if (occluded) {
            // Bar center marches left-to-right across the target box.
            const double p = occ_len > 1
                                 ? static_cast<double>(t - occ_start) / (occ_len - 1)
                                 : 0.5;
            const double bar_w = 0.45 * side;
            const double bar_cx = box.x + p * side;
            bar_x0 = bar_cx - bar_w / 2.0;
            bar_x1 = bar_cx + bar_w / 2.0;
        }

        Frame frame;
        frame.width = spec.size;
        frame.height = spec.size;
        frame.index = t + 1;
        frame.pixels.resize(static_cast<std::size_t>(spec.size) * spec.size);
        for (int y = 0; y < spec.size; ++y) {
            for (int x = 0; x < spec.size; ++x) {
                const double px = x + 0.5;
                const double py = y + 0.5;
                double v;
                const bool inside = px >= box.x && px < box.x + box.w && py >= box.y &&
                                    py < box.y + box.h;
                if (inside) {
                    // Texture coordinates follow the target, so its appearance
                    // is pose-invariant.
                    const double u = (px - box.x) / box.w;
                    const double w = (py - box.y) / box.h;
                    v = 0.35 + 0.6 * target_tex.at(u, w);
                } else {
                    v = 0.10 + 0.25 * background_tex.at(px / spec.size, py / spec.size);
                }
                if (occluded && px >= bar_x0 && px < bar_x1 && py >= box.y && py < box.y + box.h)
                    v = 0.95;  // opaque bright bar
                v = v * gain + 0.008 * noise_rng.gaussian();
                frame.pixels[static_cast<std::size_t>(y) * spec.size + x] = to_u8(v);
            }
        }
        seq.frames.push_back(std::move(frame));
        seq.gt.boxes.push_back(box);
    }
    return seq;
}

namespace {

void accumulate(EvalReport& acc, const EvalReport& r) {
    if (acc.runs == 0) {
        acc = r;
        return;
    }
    acc.auc += r.auc;
    acc.auc_trapezoid += r.auc_trapezoid;
    acc.precision20 += r.precision20;
    acc.success_at_05 += r.success_at_05;
    acc.q_av_mean += r.q_av_mean;
    acc.fps += r.fps;
    acc.frames += r.frames;
    for (std::size_t i = 0; i < acc.precision_curve.size(); ++i)
        acc.precision_curve[i] += r.precision_curve[i];
    for (std::size_t i = 0; i < acc.success_curve.size(); ++i)
        acc.success_curve[i] += r.success_curve[i];
    acc.runs += r.runs;
}

void finalize_mean(EvalReport& acc) {
    if (acc.runs <= 1) return;
    const double n = acc.runs;
    acc.auc /= n;
    acc.auc_trapezoid /= n;
    acc.precision20 /= n;
    acc.success_at_05 /= n;
    acc.q_av_mean /= n;
    acc.fps /= n;
    acc.frames = static_cast<int>(std::lround(acc.frames / n));
    for (double& v : acc.precision_curve) v /= n;
    for (double& v : acc.success_curve) v /= n;
}

}  // namespace

BenchResult run_benchmark(const std::vector<BenchSequence>& sequences, const TrackerConfig& config,
                          int runs) {
    if (runs < 1) throw ContractViolation("runs must be >= 1");
    if (sequences.empty()) throw ContractViolation("no sequences to benchmark");

    BenchResult result;
    std::map<std::string, std::vector<EvalReport>> attr_reports;
    for (const BenchSequence& seq : sequences) {
        if (seq.frames.size() != seq.gt.boxes.size())
            throw ContractViolation("sequence '" + seq.name + "' has " +
                                    std::to_string(seq.frames.size()) + " frames but " +
                                    std::to_string(seq.gt.boxes.size()) + " ground-truth boxes");
        EvalReport seq_acc;
        for (int r = 0; r < runs; ++r) {
            BenchRun run;
            run.sequence = seq.name;
            run.seed = config.seed + static_cast<std::uint64_t>(r);
            try {
                TrackerConfig cfg = config;
                cfg.seed = run.seed;
                const TrackReport track = run_tracker(seq.frames, seq.gt.boxes.front(), cfg);
                run.report = evaluate(track.trajectory, seq.gt.boxes);
                run.report.fps = track.fps;
                double q_sum = 0.0;
                for (const FrameResult& fr : track.frames) q_sum += fr.q_av;
                run.report.q_av_mean =
                    track.frames.empty() ? 0.0 : q_sum / static_cast<double>(track.frames.size());
                accumulate(seq_acc, run.report);
            } catch (const std::exception& e) {
                run.failed = true;
                run.error = e.what();
                result.failures.push_back(seq.name + " seed " + std::to_string(run.seed) + ": " +
                                          e.what());
            }
            result.runs.push_back(std::move(run));
        }
        if (seq_acc.runs > 0) {
            finalize_mean(seq_acc);
            result.per_sequence[seq.name] = seq_acc;
            for (const std::string& attr : seq.gt.attributes)
                attr_reports[attr].push_back(seq_acc);
        }
    }

    // Per-attribute aggregates: mean over the sequences tagged with each attribute.
    for (auto& [attr, reports] : attr_reports) {
        EvalReport acc;
        acc.runs = 0;
        for (EvalReport r : reports) {
            r.runs = 1;
            accumulate(acc, r);
        }
        finalize_mean(acc);
        acc.runs = static_cast<int>(reports.size());
        result.per_attribute[attr] = acc;
    }

    // Aggregate: mean over successful runs across all sequences.
    EvalReport agg;
    for (const BenchRun& run : result.runs)
        if (!run.failed) accumulate(agg, run.report);
    finalize_mean(agg);
    result.aggregate = agg;
    return result;
}

}  // namespace dedt
