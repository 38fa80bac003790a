// Command-line front end: track / synth / eval subcommands.

#include <cctype>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dedt/bench.hpp"
#include "dedt/config.hpp"
#include "dedt/errors.hpp"
#include "dedt/image.hpp"
#include "dedt/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Reproducibility record written to the run directory on both success and
// failure.
struct Manifest {
    json doc;
    fs::path path;

    Manifest(const fs::path& out_dir, const std::string& command) {
        path = out_dir / "manifest.json";
        doc["tool_version"] = kVersion;
        doc["command"] = command;
        doc["started"] = timestamp_now();
        doc["outputs"] = json::array();
    }

    void add_output(const fs::path& p) { doc["outputs"].push_back(p.string()); }

    void finish(const std::string& status, const std::string& error = "") {
        doc["finished"] = timestamp_now();
        doc["status"] = status;
        if (!error.empty()) doc["error"] = error;
        std::ofstream out(path);
        if (out) out << doc.dump(2) << "\n";
    }
};

dedt::BoundingBox parse_init(const std::string& s) {
    double x, y, w, h;
    char extra;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf%c", &x, &y, &w, &h, &extra) != 4)
        throw CLI::ValidationError("--init", "expected x,y,w,h");
    if (w <= 0 || h <= 0) throw CLI::ValidationError("--init", "width and height must be positive");
    return {x, y, w, h};
}

json report_json(const dedt::EvalReport& r) {
    json j;
    j["auc"] = r.auc;
    j["auc_trapezoid"] = r.auc_trapezoid;
    j["precision_20px"] = r.precision20;
    j["success_rate_05"] = r.success_at_05;
    j["q_av_mean"] = r.q_av_mean;
    j["fps"] = r.fps;
    j["runs"] = r.runs;
    j["frames"] = r.frames;
    j["success_curve"] = r.success_curve;
    j["precision_curve"] = r.precision_curve;
    return j;
}

void write_plot_data(const dedt::EvalReport& r, const fs::path& dir, Manifest* manifest) {
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "success.csv");
        out << "tau,success_fraction\n";
        for (std::size_t i = 0; i < r.success_curve.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.2f,%.6f\n", i / 100.0, r.success_curve[i]);
            out << buf;
        }
        if (manifest) manifest->add_output(dir / "success.csv");
    }
    {
        std::ofstream out(dir / "precision.csv");
        out << "pixels,precision_fraction\n";
        for (std::size_t i = 0; i < r.precision_curve.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, r.precision_curve[i]);
            out << buf;
        }
        if (manifest) manifest->add_output(dir / "precision.csv");
    }
}

struct TrackArgs {
    std::string seq;
    std::string init;
    std::string gt;
    std::string config_file;
    std::string out = ".";
    std::string mode;
    double delta_override = -1.0;
    int runs = 1;
    int threads = 0;
    bool threads_set = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool verify_acceptance = false;
};

int cmd_track(const TrackArgs& a) {
    fs::create_directories(a.out);
    Manifest manifest(a.out, "track");
    try {
        dedt::TrackerConfig config;
        if (!a.config_file.empty()) config = dedt::load_config(a.config_file);
        if (!a.mode.empty()) config.mode = dedt::mode_from_string(a.mode);
        if (a.delta_override >= 0.0) config.delta_override = a.delta_override;
        if (a.threads_set) config.threads = a.threads;
        if (a.seed_set) config.seed = a.seed;
        if (a.verify_acceptance) config.verify_acceptance = true;
        config.validate();

        manifest.doc["config"] = dedt::config_text(config);
        manifest.doc["seed"] = config.seed;
        manifest.doc["runs"] = a.runs;
        manifest.doc["inputs"] = {{"seq", a.seq}};

        const std::vector<dedt::Frame> frames = dedt::load_sequence(a.seq);

        dedt::BoundingBox init_box;
        std::vector<dedt::BoundingBox> gt_boxes;
        if (!a.init.empty()) {
            init_box = parse_init(a.init);
            manifest.doc["inputs"]["init"] = a.init;
        } else {
            const dedt::GroundTruth gt = dedt::load_groundtruth(a.gt);
            if (gt.boxes.size() != frames.size())
                throw dedt::IngestionError(
                    "ground truth has " + std::to_string(gt.boxes.size()) + " rows but sequence has " +
                    std::to_string(frames.size()) + " frames");
            init_box = gt.boxes.front();
            gt_boxes = gt.boxes;
            manifest.doc["inputs"]["gt"] = a.gt;
        }

        json runs_json = json::array();
        for (int r = 0; r < a.runs; ++r) {
            dedt::TrackerConfig cfg = config;
            cfg.seed = config.seed + static_cast<std::uint64_t>(r);
            const dedt::TrackReport report = dedt::run_tracker(frames, init_box, cfg);

            const std::string suffix = a.runs > 1 ? "_run" + std::to_string(r) : "";
            const fs::path traj_path = fs::path(a.out) / ("trajectory" + suffix + ".csv");
            const fs::path diag_path = fs::path(a.out) / ("diagnostics" + suffix + ".csv");
            std::ofstream(traj_path) << dedt::trajectory_csv(report);
            std::ofstream(diag_path) << dedt::diagnostics_csv(report);
            manifest.add_output(traj_path);
            manifest.add_output(diag_path);

            json rj;
            rj["seed"] = cfg.seed;
            rj["fps"] = report.fps;
            if (!gt_boxes.empty()) {
                dedt::EvalReport eval = dedt::evaluate(report.trajectory, gt_boxes);
                eval.fps = report.fps;
                rj["auc"] = eval.auc;
                rj["precision_20px"] = eval.precision20;
                rj["success_rate_05"] = eval.success_at_05;
            }
            runs_json.push_back(rj);
            std::fprintf(stderr, "run %d (seed %llu): %.2f fps\n", r,
                         static_cast<unsigned long long>(cfg.seed), report.fps);
        }
        manifest.doc["run_results"] = runs_json;
        manifest.finish("ok");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        manifest.finish("failed", e.what());
        return 2;
    }
}

struct SynthArgs {
    std::string out;
    int frames = 100;
    std::uint64_t seed = 1;
    std::string challenges;
    int size = 240;
    int target = 48;
};

int cmd_synth(const SynthArgs& a) {
    std::error_code ec;
    fs::create_directories(a.out, ec);
    Manifest manifest(a.out, "synth");
    try {
        dedt::SynthSpec spec;
        spec.frames = a.frames;
        spec.size = a.size;
        spec.target = a.target;
        std::string token;
        std::istringstream cs(a.challenges);
        while (std::getline(cs, token, ',')) {
            for (char& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (token.empty()) continue;
            if (token != "IV" && token != "OCC" && token != "SV")
                throw dedt::ContractViolation("unknown challenge: " + token);
            spec.challenges.insert(token);
        }
        manifest.doc["seed"] = a.seed;
        manifest.doc["frames"] = a.frames;
        manifest.doc["challenges"] = spec.challenges;

        const dedt::SynthSequence seq = dedt::synth_sequence(spec, a.seed);
        for (const dedt::Frame& frame : seq.frames) {
            char name[32];
            std::snprintf(name, sizeof(name), "%04d.pgm", frame.index);
            const fs::path p = fs::path(a.out) / name;
            dedt::save_pgm(frame, p);
            manifest.add_output(p);
        }
        const fs::path gt_path = fs::path(a.out) / "groundtruth_rect.txt";
        dedt::save_groundtruth(seq.gt.boxes, gt_path);
        manifest.add_output(gt_path);
        manifest.finish("ok");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        manifest.finish("failed", e.what());
        return 2;
    }
}

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string plot_data;
};

int cmd_eval(const EvalArgs& a) {
    try {
        const dedt::Trajectory pred = dedt::load_trajectory_csv(a.pred);
        const dedt::GroundTruth gt = dedt::load_groundtruth(a.gt);
        const dedt::EvalReport report = dedt::evaluate(pred, gt.boxes);
        if (!a.plot_data.empty()) write_plot_data(report, a.plot_data, nullptr);
        std::cout << report_json(report).dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diverse-ensemble discriminative tracker"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    TrackArgs track;
    CLI::App* t = app.add_subcommand("track", "Track a target through an image sequence");
    t->add_option("--seq", track.seq, "Directory of .pgm/.png frames")->required();
    auto* init_opt = t->add_option("--init", track.init, "Initial box as x,y,w,h (0-based pixels)");
    auto* gt_opt = t->add_option("--gt", track.gt, "Ground-truth file (initial box from line 1)");
    init_opt->excludes(gt_opt);
    t->add_option("--config", track.config_file, "key=value config file");
    t->add_option("--out", track.out, "Output directory (default: .)");
    t->add_option("--mode", track.mode,
                  "Tracker mode: full|bag|art|aux_first|aux_short|aux_isolated");
    t->add_option("--delta-override", track.delta_override,
                  "Replace label thresholds with (-delta, +delta)");
    t->add_option("--runs", track.runs, "Independent runs with seeds seed+0..runs-1")
        ->check(CLI::PositiveNumber);
    t->add_option("--threads", track.threads, "Worker threads (0 = available parallelism)")
        ->capture_default_str();
    t->add_option("--seed", track.seed, "Master seed");
    t->add_flag("--verify-acceptance", track.verify_acceptance,
                "Re-check diversity acceptance decisions with a brute-force scorer");

    SynthArgs synth;
    CLI::App* s = app.add_subcommand("synth", "Generate a synthetic challenge sequence");
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_option("--frames", synth.frames, "Frame count (minimum 2)")->check(CLI::Range(2, 1000000));
    s->add_option("--seed", synth.seed, "Generator seed");
    s->add_option("--challenges", synth.challenges, "Comma-separated subset of iv,occ,sv");
    s->add_option("--size", synth.size, "Frame side length in pixels");
    s->add_option("--target", synth.target, "Nominal target side length in pixels");

    EvalArgs eval;
    CLI::App* e = app.add_subcommand("eval", "Evaluate a trajectory against ground truth");
    e->add_option("--pred", eval.pred, "Predicted trajectory CSV")->required();
    e->add_option("--gt", eval.gt, "Ground-truth file")->required();
    e->add_option("--plot-data", eval.plot_data, "Directory for success/precision plot CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 1;
    }

    if (t->parsed()) {
        if (track.init.empty() == track.gt.empty()) {
            std::cerr << "error: exactly one of --init or --gt is required\n";
            return 1;
        }
        track.threads_set = t->count("--threads") > 0;
        track.seed_set = t->count("--seed") > 0;
        return cmd_track(track);
    }
    if (s->parsed()) return cmd_synth(synth);
    return cmd_eval(eval);
}
