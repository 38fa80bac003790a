#ifndef DEDT_DIVERSIFIER_HPP
#define DEDT_DIVERSIFIER_HPP

#include <vector>

#include "dedt/committee.hpp"
#include "dedt/rng.hpp"
#include "dedt/scoring.hpp"

namespace dedt {

// Per-dimension Gaussian model of the training features.
struct EmpiricalModel {
    std::vector<double> mean;
    std::vector<double> std;  // floored at 1e-8
};

EmpiricalModel fit_empirical(const std::vector<FeatureVector>& features);
EmpiricalModel fit_empirical(const LabeledSet& features);

// m_prime vectors drawn per-dimension Normal(mean, std^2), clamped to >= 0.
std::vector<FeatureVector> draw_artificial(const EmpiricalModel& model, int m_prime, Rng& rng);
void draw_artificial_into(const EmpiricalModel& model, int m_prime, Rng& rng, std::vector<float>& out);

// Label selection inversely proportional to the ensemble's class membership
// probability. share is the normalized vote share in [-1, 1]; P(+1) is
// smoothed into [eps, 1-eps] with eps = 1/(2C), and the anti-ensemble label
// is preferred accordingly.
double anti_probability_positive(double share, int committee_size);
std::int8_t diverse_label_from_share(double share, int committee_size, Rng& rng);
std::vector<std::int8_t> diverse_labels(const Committee& temp_committee,
                                        const std::vector<FeatureVector>& artificial, Rng& rng);

// Fraction of (member, sample) pairs where the member's sign vote disagrees
// with the reference label: (1/(C n)) sum_c sum_j 1(l_j != sign h_c(x_j)).
double prediction_error(const Committee& committee, const LabeledSet& reference);

struct DiversifyParams {
    int bag_size = 80;
    int artificial_count = 250;
    int max_retries = 10;
    std::int32_t insert_time = 0;  // frame index stamped on appended exemplars
    bool skip_bag = false;         // artificial-only update (ablation)
    bool bag_only = false;         // bag-only update (ablation)
    bool verify_acceptance = false;
    int threads = 1;
};

struct MemberTrialRecord {
    int attempts = 0;
    bool accepted = false;
    double eps_trial = 0.0;        // committee error with the trial member substituted
    double eps_trial_check = -1.0; // independent brute-force recompute (when verification is on)
    double eps_baseline = 0.0;
};

struct DiversifyDiagnostics {
    double eps_baseline = 0.0;    // mismatch-count error of the incoming committee
    double uncertain_ratio = 0.0; // |U_t| / |D_t|, logged only
    std::vector<MemberTrialRecord> members;
};

// The per-frame diversifying update: bag each member with uncertain samples,
// then per member generate diversity sets and accept a set only if the
// committee error (against the incoming committee's baseline) drops.
// With `uncertain` empty the committee is returned unchanged.
void diversify_in_place(Committee& committee, const LabeledSet& uncertain, const LabeledSet& all,
                        const DiversifyParams& params, const Rng& rng,
                        DiversifyDiagnostics* diag = nullptr, FrameScorer* scorer = nullptr);

Committee diversify_update(Committee committee, const LabeledSet& uncertain, const LabeledSet& all,
                           const DiversifyParams& params, const Rng& rng,
                           DiversifyDiagnostics* diag = nullptr);

}  // namespace dedt

#endif
