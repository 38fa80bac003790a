#ifndef DEDT_TRACKER_HPP
#define DEDT_TRACKER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dedt/auxiliary.hpp"
#include "dedt/committee.hpp"
#include "dedt/diversifier.hpp"
#include "dedt/geometry.hpp"
#include "dedt/hog.hpp"
#include "dedt/image.hpp"
#include "dedt/rng.hpp"

namespace dedt {

enum class TrackerMode { Full, Bag, Art, AuxFirst, AuxShort, AuxIsolated };
enum class LocalizationRule { ConfidenceSum, SignVote };

const char* to_string(TrackerMode mode);
TrackerMode mode_from_string(const std::string& name);

struct TrackerConfig {
    int committee_size = 15;     // C
    int knn_k = 23;              // k
    int n_candidates = 1000;     // n
    int bag_size = 80;           // m
    int artificial_count = 250;  // m'
    double tau_u = 0.54;
    double tau_l = -0.41;
    int aux_period = 10;  // delta: auxiliary batch-update cadence in frames
    int member_capacity = 2000;
    int max_retries = 10;  // R: diversity redraw cap per member
    double sigma_xy_factor = 0.25;  // sigma_xy = factor * max(w, h) of the current target
    double sigma_s = 0.05;
    TrackerMode mode = TrackerMode::Full;
    double delta_override = -1.0;  // >= 0 replaces (tau_l, tau_u) with (-delta, +delta)
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = available parallelism
    int patch_size = 32;
    int cell_size = 8;
    LocalizationRule localization = LocalizationRule::ConfidenceSum;
    double init_pos_iou = 0.7;
    double init_neg_iou = 0.3;
    bool verify_acceptance = false;

    double effective_tau_u() const { return delta_override >= 0.0 ? delta_override : tau_u; }
    double effective_tau_l() const { return delta_override >= 0.0 ? -delta_override : tau_l; }
    HogParams hog() const { return HogParams{patch_size, cell_size, 9, 0.2}; }
    int effective_threads() const;
    void validate() const;
};

// One scored and labeled candidate.
struct Sample {
    BoundingBox candidate_box;
    Transformation transform;
    FeatureVector feature;
    double score = 0.0;  // normalized ensemble score in [-1, 1]
    int label = 0;
    bool was_uncertain = false;
};

// Thresholded labeling with the auxiliary consulted on disputed scores.
// Returns (label, was_uncertain).
std::pair<int, bool> label_sample(double score, const FeatureVector& f, const AuxiliaryModel& aux,
                                  double tau_l, double tau_u);

// argmax over candidates of the summed member confidences (ties: smallest
// index). Returns (index, box).
std::pair<int, BoundingBox> localize(const std::vector<Sample>& samples, const Committee& committee);

struct FrameDiagnostics {
    int t = 0;
    double eps_baseline = 0.0;
    double uncertain_ratio = 0.0;
    int n_uncertain = 0;
    double q_av = 0.0;
    int aux_queries = 0;
    bool aux_retrained = false;
    bool aux_single_class = false;  // retrain skipped: window had one class
    std::uint64_t aux_hash = 0;
    std::vector<MemberTrialRecord> members;
};

struct FrameResult {
    BoundingBox state;
    double best_score = 0.0;
    int n_uncertain = 0;
    double q_av = 0.0;
    FrameDiagnostics diagnostics;
};

class Tracker {
public:
    Tracker(const Frame& frame1, const BoundingBox& init_box, TrackerConfig config);

    FrameResult step(const Frame& frame);

    const BoundingBox& state() const { return state_; }
    int frame_index() const { return t_; }
    const TrackerConfig& config() const { return config_; }
    const Committee& committee() const { return committee_; }
    Committee& committee() { return committee_; }
    const AuxiliaryModel& auxiliary() const { return aux_; }
    AuxiliaryModel& auxiliary() { return aux_; }

private:
    SearchDistribution current_search() const;

    TrackerConfig config_;
    HogParams hog_;
    Rng master_;
    Committee committee_;
    AuxiliaryModel aux_;
    BoundingBox state_;
    int t_ = 1;
};

struct TrackReport {
    BoundingBox init_state;
    std::vector<FrameResult> frames;       // results for frames 2..T
    std::vector<BoundingBox> trajectory;   // length T, trajectory[0] = init
    double fps = 0.0;                      // measured over the step loop only
};

TrackReport run_tracker(const std::vector<Frame>& frames, const BoundingBox& init_box,
                        const TrackerConfig& config);

// Trajectory CSV: header then one row per frame
// "t,x,y,w,h,best_score,n_uncertain,q_av".
std::string trajectory_csv(const TrackReport& report);

// Per-frame diagnostics CSV (diversifier and auxiliary bookkeeping).
std::string diagnostics_csv(const TrackReport& report);

}  // namespace dedt

#endif
