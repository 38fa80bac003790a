#ifndef DEDT_BENCH_HPP
#define DEDT_BENCH_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dedt/geometry.hpp"
#include "dedt/image.hpp"
#include "dedt/tracker.hpp"

namespace dedt {

using Trajectory = std::vector<BoundingBox>;

// Per-frame annotation, optionally tagged with OTB-style challenge attributes
// (IV, SV, OCC, DEF, MB, FM, IPR, OPR, OV, LR, BC).
struct GroundTruth {
    Trajectory boxes;
    std::set<std::string> attributes;
};

// Mean IoU over frames; equals the area under the success plot because the
// integral of 1(IoU > tau) over tau in [0, 1] is the IoU itself.
double success_auc(const Trajectory& pred, const Trajectory& gt);

// 101-point trapezoid evaluation of the same integral, kept as a cross-check.
double success_auc_trapezoid(const Trajectory& pred, const Trajectory& gt);

// Fraction of frames with IoU above tau, for a success plot.
double success_fraction_at(const Trajectory& pred, const Trajectory& gt, double tau);

// Fraction of frames whose center displacement is <= each threshold (pixels).
std::vector<double> precision_at(const Trajectory& pred, const Trajectory& gt,
                                 const std::vector<double>& thresholds);

// Scalar "precision" at the conventional 20 px threshold.
double precision_at_20(const Trajectory& pred, const Trajectory& gt);

// Fraction of frames with IoU strictly above 0.5.
double success_rate_05(const Trajectory& pred, const Trajectory& gt);

// OTB text format: one line per frame, "x,y,w,h" separated by comma or
// whitespace, 1-based integer pixels (converted to 0-based here).
GroundTruth load_groundtruth(const std::filesystem::path& file);
void save_groundtruth(const Trajectory& boxes, const std::filesystem::path& file);

// Reads the tracker's trajectory CSV (header + t,x,y,w,h,... rows).
Trajectory load_trajectory_csv(const std::filesystem::path& file);

struct EvalReport {
    double auc = 0.0;
    double auc_trapezoid = 0.0;
    double precision20 = 0.0;
    double success_at_05 = 0.0;
    double q_av_mean = 0.0;
    double fps = 0.0;
    int runs = 0;
    int frames = 0;
    std::vector<double> precision_curve;  // thresholds 0..50 px
    std::vector<double> success_curve;    // tau = 0.00..1.00, 101 points
};

EvalReport evaluate(const Trajectory& pred, const Trajectory& gt);

struct SynthSpec {
    int frames = 100;
    int size = 240;            // square frame side
    int target = 48;           // nominal target side
    std::uint64_t texture_seed = 7;
    std::set<std::string> challenges;  // subset of {"IV", "OCC", "SV"}
    double motion_sigma = 2.0;         // random-walk step, pixels
};

struct SynthSequence {
    std::vector<Frame> frames;
    GroundTruth gt;
};

// Deterministic synthetic challenge sequence: textured square target over a
// textured background. IV = sinusoidal global gain in [0.6, 1.4]; OCC =
// opaque bar sweeping the target for 15% of the frames; SV = sinusoidal
// scale in [0.8, 1.25]. Ground truth is exact by construction.
SynthSequence synth_sequence(const SynthSpec& spec, std::uint64_t seed);

struct BenchSequence {
    std::string name;
    std::vector<Frame> frames;
    GroundTruth gt;
};

struct BenchRun {
    std::string sequence;
    std::uint64_t seed = 0;
    EvalReport report;
    bool failed = false;
    std::string error;
};

struct BenchResult {
    std::vector<BenchRun> runs;
    std::map<std::string, EvalReport> per_sequence;  // averaged over runs
    std::map<std::string, EvalReport> per_attribute;
    EvalReport aggregate;
    std::vector<std::string> failures;
};

// Runs the tracker `runs` times per sequence with seeds seed+0..runs-1 and
// averages the metrics. Failed runs are recorded and excluded.
BenchResult run_benchmark(const std::vector<BenchSequence>& sequences, const TrackerConfig& config,
                          int runs);

}  // namespace dedt

#endif
