#include "dedt/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dedt/errors.hpp"
#include "dedt/parallel.hpp"
#include "dedt/scoring.hpp"

namespace dedt {

const char* to_string(TrackerMode mode) {
    switch (mode) {
        case TrackerMode::Full: return "full";
        case TrackerMode::Bag: return "bag";
        case TrackerMode::Art: return "art";
        case TrackerMode::AuxFirst: return "aux_first";
        case TrackerMode::AuxShort: return "aux_short";
        case TrackerMode::AuxIsolated: return "aux_isolated";
    }
    return "full";
}

TrackerMode mode_from_string(const std::string& name) {
    if (name == "full") return TrackerMode::Full;
    if (name == "bag") return TrackerMode::Bag;
    if (name == "art") return TrackerMode::Art;
    if (name == "aux_first") return TrackerMode::AuxFirst;
    if (name == "aux_short") return TrackerMode::AuxShort;
    if (name == "aux_isolated") return TrackerMode::AuxIsolated;
    throw ContractViolation("unknown tracker mode: " + name);
}

int TrackerConfig::effective_threads() const {
    return threads > 0 ? threads : default_thread_count();
}

void TrackerConfig::validate() const {
    if (committee_size < 2) throw ContractViolation("config: committee_size must be >= 2");
    if (knn_k < 1 || knn_k % 2 == 0) throw ContractViolation("config: knn_k must be odd and >= 1");
    if (n_candidates < 1) throw ContractViolation("config: n_candidates must be >= 1");
    if (bag_size < 1) throw ContractViolation("config: bag_size must be >= 1");
    if (artificial_count < 1) throw ContractViolation("config: artificial_count must be >= 1");
    if (!(tau_l < tau_u)) throw ContractViolation("config: tau_l must be < tau_u");
    if (tau_u <= -1.0 || tau_u > 1.0 || tau_l < -1.0 || tau_l >= 1.0)
        throw ContractViolation("config: thresholds must lie in (-1, 1)");
    if (delta_override > 1.0) throw ContractViolation("config: delta_override must be <= 1");
    if (aux_period < 1) throw ContractViolation("config: aux_period must be >= 1");
    if (member_capacity < knn_k) throw ContractViolation("config: member_capacity must be >= knn_k");
    if (max_retries < 1) throw ContractViolation("config: max_retries must be >= 1");
    if (sigma_xy_factor < 0.0 || sigma_s < 0.0) throw ContractViolation("config: sigmas must be >= 0");
    if (patch_size < 2 * cell_size || patch_size % cell_size != 0)
        throw ContractViolation("config: patch_size must be a multiple of cell_size with >= 2 cells");
    if (init_neg_iou >= init_pos_iou) throw ContractViolation("config: init IoU bands overlap");
}

std::pair<int, bool> label_sample(double score, const FeatureVector& f, const AuxiliaryModel& aux,
                                  double tau_l, double tau_u) {
    if (score < -1.0 || score > 1.0) throw ContractViolation("label_sample: score outside [-1, 1]");
    if (score > tau_u) return {1, false};
    if (score < tau_l) return {-1, false};
    return {aux.label(f), true};
}

std::pair<int, BoundingBox> localize(const std::vector<Sample>& samples, const Committee& committee) {
    if (samples.empty()) throw ContractViolation("localize: no samples");
    int best = 0;
    double best_sum = 0.0;
    for (int j = 0; j < static_cast<int>(samples.size()); ++j) {
        double sum = 0.0;
        for (const CommitteeMember& m : committee.members) sum += m.score(samples[static_cast<std::size_t>(j)].feature);
        if (j == 0 || sum > best_sum) {
            best = j;
            best_sum = sum;
        }
    }
    return {best, samples[static_cast<std::size_t>(best)].candidate_box};
}

namespace {

struct InitSet {
    LabeledSet samples;
    int positives = 0;
    int negatives = 0;
};

InitSet label_perturbations(const std::vector<std::pair<Transformation, BoundingBox>>& candidates,
                            const std::vector<FeatureVector>& features, const BoundingBox& init_box,
                            double pos_iou, double neg_iou) {
    InitSet out;
    out.samples.dim = static_cast<int>(features.front().size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double overlap = iou(candidates[i].second, init_box);
        if (overlap >= pos_iou) {
            out.samples.add(std::span<const double>(features[i].data(), features[i].size()), 1);
            ++out.positives;
        } else if (overlap <= neg_iou) {
            out.samples.add(std::span<const double>(features[i].data(), features[i].size()), -1);
            ++out.negatives;
        }
    }
    return out;
}

}  // namespace

Tracker::Tracker(const Frame& frame1, const BoundingBox& init_box, TrackerConfig config)
    : config_(std::move(config)),
      hog_(config_.hog()),
      master_(config_.seed),
      committee_(make_committee(config_.committee_size, hog_.dim(), config_.knn_k,
                                config_.member_capacity)),
      aux_(hog_.dim()),
      state_(init_box) {
    config_.validate();
    if (!init_box.valid()) throw ContractViolation("init: invalid box");
    if (init_box.x < 0 || init_box.y < 0 || init_box.x + init_box.w > frame1.width ||
        init_box.y + init_box.h > frame1.height)
        throw ContractViolation("init: box not within frame bounds");

    const int n2 = 2 * config_.n_candidates;
    Rng init_rng = master_.derive(0);
    const SearchDistribution dist = current_search();
    const auto candidates = sample_candidates(init_box, n2, dist, init_rng);

    std::vector<FeatureVector> features(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), config_.effective_threads(), [&](int i) {
        const Patch p = extract_patch(frame1, candidates[static_cast<std::size_t>(i)].second,
                                      hog_.patch_size);
        features[static_cast<std::size_t>(i)] = hog(p, hog_);
    });

    InitSet init =
        label_perturbations(candidates, features, init_box, config_.init_pos_iou, config_.init_neg_iou);
    if (init.positives < config_.knn_k || init.negatives < config_.knn_k) {
        // Widen the labeling bands once before giving up.
        init = label_perturbations(candidates, features, init_box, 0.6, 0.4);
    }
    if (init.positives < config_.knn_k || init.negatives < config_.knn_k)
        throw TrackingError("degenerate initialization: not enough positive/negative perturbations");

    // Query-by-bagging: each member trains on its own bootstrap resample of
    // the initial set. A committee cloned from identical data votes
    // unanimously on every candidate, so no sample would ever land in the
    // uncertain band and neither the auxiliary queries nor the diversifying
    // updates could ever engage; the bootstrap spreads the members at t=1.
    const int n_init = init.samples.count();
    Rng boot_rng = master_.derive(0x62616767);
    for (int c = 0; c < config_.committee_size; ++c) {
        Rng member_rng = boot_rng.derive(static_cast<std::uint64_t>(c));
        LabeledSet boot;
        boot.dim = init.samples.dim;
        bool ok = false;
        for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
            boot.features.clear();
            boot.labels.clear();
            int pos = 0;
            for (int i = 0; i < n_init; ++i) {
                const int pick = static_cast<int>(
                    member_rng.uniform_index(static_cast<std::uint64_t>(n_init)));
                const int label = init.samples.labels[static_cast<std::size_t>(pick)];
                boot.add(init.samples.feature(pick), label);
                if (label > 0) ++pos;
            }
            ok = pos >= config_.knn_k && n_init - pos >= config_.knn_k;
        }
        if (!ok)
            throw TrackingError("degenerate initialization: bootstrap resample single-sided");
        committee_.members[static_cast<std::size_t>(c)].append(boot, 1);
    }
    if (!aux_.train(init.samples, 1)) {
        throw TrackingError("degenerate initialization: auxiliary training set single-class");
    }
}

SearchDistribution Tracker::current_search() const {
    return {config_.sigma_xy_factor * std::max(state_.w, state_.h), config_.sigma_s};
}

FrameResult Tracker::step(const Frame& frame) {
    if (frame.index != 0 && frame.index != t_ + 1)
        throw ContractViolation("step: frame index must advance by 1");
    const int t = ++t_;
    const int n = config_.n_candidates;
    const int c_count = config_.committee_size;
    const int dim = hog_.dim();
    const int threads = config_.effective_threads();

    Rng frame_rng = master_.derive(static_cast<std::uint64_t>(t));
    Rng cand_rng = frame_rng.derive(1);
    const auto candidates = sample_candidates(state_, n, current_search(), cand_rng);

    // Feature extraction over the candidates (data-parallel).
    std::vector<float> feats(static_cast<std::size_t>(n) * dim);
    parallel_for(n, threads, [&](int j) {
        const Patch p =
            extract_patch(frame, candidates[static_cast<std::size_t>(j)].second, hog_.patch_size);
        const FeatureVector f = hog(p, hog_);
        float* row = feats.data() + static_cast<std::size_t>(j) * dim;
        for (int d = 0; d < dim; ++d) row[d] = static_cast<float>(f[static_cast<std::size_t>(d)]);
    });

    FrameScorer scorer(feats.data(), n, dim, c_count);

    // Committee scoring: per-member confidences and sign votes.
    std::vector<std::vector<double>> member_scores(static_cast<std::size_t>(c_count),
                                                   std::vector<double>(static_cast<std::size_t>(n)));
    parallel_for(c_count, threads, [&](int c) {
        scorer.member_scores(committee_.members[static_cast<std::size_t>(c)], c,
                             std::span<double>(member_scores[static_cast<std::size_t>(c)]));
    });

    std::vector<double> share(static_cast<std::size_t>(n), 0.0);      // normalized sign-vote score
    std::vector<double> confidence(static_cast<std::size_t>(n), 0.0); // summed member confidences
    for (int j = 0; j < n; ++j) {
        int votes = 0;
        double conf = 0.0;
        for (int c = 0; c < c_count; ++c) {
            const double s = member_scores[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
            votes += sign_of(s);
            conf += s;
        }
        share[static_cast<std::size_t>(j)] = static_cast<double>(votes) / c_count;
        confidence[static_cast<std::size_t>(j)] = conf;
    }

    // Labeling (Eq. 3): committee where decisive, auxiliary where disputed.
    const double tau_u = config_.effective_tau_u();
    const double tau_l = config_.effective_tau_l();
    const bool isolated = config_.mode == TrackerMode::AuxIsolated;
    LabeledSet all;
    all.dim = dim;
    all.features = feats;
    all.labels.resize(static_cast<std::size_t>(n));
    LabeledSet uncertain;
    uncertain.dim = dim;
    int n_uncertain = 0;
    int aux_queries = 0;
    for (int j = 0; j < n; ++j) {
        const double s = share[static_cast<std::size_t>(j)];
        int label;
        bool disputed = false;
        if (s > tau_u) {
            label = 1;
        } else if (s < tau_l) {
            label = -1;
        } else {
            disputed = true;
            if (isolated) {
                label = sign_of(s);
            } else {
                label = aux_.label(std::span<const float>(all.feature(j), static_cast<std::size_t>(dim)));
                ++aux_queries;
            }
        }
        all.labels[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(label);
        if (disputed) {
            ++n_uncertain;
            uncertain.add(all.feature(j), label);
        }
    }

    // Localization: highest summed confidence (or highest vote score).
    int best = 0;
    for (int j = 1; j < n; ++j) {
        if (config_.localization == LocalizationRule::ConfidenceSum) {
            if (confidence[static_cast<std::size_t>(j)] > confidence[static_cast<std::size_t>(best)])
                best = j;
        } else if (share[static_cast<std::size_t>(j)] > share[static_cast<std::size_t>(best)]) {
            best = j;
        }
    }
    double best_score = confidence[static_cast<std::size_t>(best)] / c_count;
    BoundingBox new_state = candidates[static_cast<std::size_t>(best)].second;

    if (isolated) {
        // Long and short memory each localize on their own; the more
        // confident argmax wins.
        int aux_best = 0;
        double aux_best_margin = 0.0;
        for (int j = 0; j < n; ++j) {
            const double m =
                aux_.margin(std::span<const float>(all.feature(j), static_cast<std::size_t>(dim)));
            if (j == 0 || m > aux_best_margin) {
                aux_best = j;
                aux_best_margin = m;
            }
        }
        const double aux_conf = std::tanh(aux_best_margin);
        if (aux_conf > best_score) {
            best = aux_best;
            best_score = aux_conf;
            new_state = candidates[static_cast<std::size_t>(aux_best)].second;
        }
    }
    state_ = new_state;

    // Committee update per mode.
    DiversifyParams dparams;
    dparams.bag_size = config_.bag_size;
    dparams.artificial_count = config_.artificial_count;
    dparams.max_retries = config_.max_retries;
    dparams.insert_time = t;
    dparams.skip_bag = config_.mode == TrackerMode::Art;
    dparams.bag_only = config_.mode == TrackerMode::Bag;
    dparams.verify_acceptance = config_.verify_acceptance;
    dparams.threads = threads;
    DiversifyDiagnostics ddiag;
    diversify_in_place(committee_, uncertain, all, dparams, frame_rng.derive(2), &ddiag, &scorer);

    // Auxiliary update cadence.
    bool aux_retrained = false;
    bool aux_single_class = false;
    if (config_.mode == TrackerMode::AuxShort) {
        aux_retrained = aux_.train(all, t);
        aux_single_class = !aux_retrained;
    } else if (config_.mode != TrackerMode::AuxFirst) {
        aux_.buffer_frame(all, t);
        if (t % config_.aux_period == 0) {
            aux_retrained = aux_.batch_update(t);
            aux_single_class = !aux_retrained;
        }
    }

    // Diversity of the updated committee on this frame's samples.
    std::vector<std::vector<std::int8_t>> votes(static_cast<std::size_t>(c_count));
    parallel_for(c_count, threads, [&](int c) {
        std::vector<double> s(static_cast<std::size_t>(n));
        scorer.member_scores(committee_.members[static_cast<std::size_t>(c)], c, std::span<double>(s));
        auto& v = votes[static_cast<std::size_t>(c)];
        v.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            v[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(sign_of(s[static_cast<std::size_t>(j)]));
    });
    const double q_av = q_average_from_votes(votes);

    FrameResult result;
    result.state = state_;
    result.best_score = best_score;
    result.n_uncertain = n_uncertain;
    result.q_av = q_av;
    result.diagnostics.t = t;
    result.diagnostics.eps_baseline = ddiag.eps_baseline;
    result.diagnostics.uncertain_ratio = ddiag.uncertain_ratio;
    result.diagnostics.n_uncertain = n_uncertain;
    result.diagnostics.q_av = q_av;
    result.diagnostics.aux_queries = aux_queries;
    result.diagnostics.aux_retrained = aux_retrained;
    result.diagnostics.aux_single_class = aux_single_class;
    result.diagnostics.aux_hash = aux_.hash();
    result.diagnostics.members = std::move(ddiag.members);
    return result;
}

TrackReport run_tracker(const std::vector<Frame>& frames, const BoundingBox& init_box,
                        const TrackerConfig& config) {
    if (frames.empty()) throw ContractViolation("run_tracker: empty sequence");
    TrackReport report;
    report.init_state = init_box;
    Tracker tracker(frames.front(), init_box, config);
    report.trajectory.push_back(init_box);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        report.frames.push_back(tracker.step(frames[i]));
        report.trajectory.push_back(report.frames.back().state);
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.fps = elapsed > 0.0 ? static_cast<double>(frames.size() - 1) / elapsed : 0.0;
    return report;
}

namespace {

void append_csv_box(std::ostringstream& out, int t, const BoundingBox& b, double best_score,
                    int n_uncertain, double q_av) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%.6f\n", t, b.x, b.y, b.w, b.h,
                  best_score, n_uncertain, q_av);
    out << buf;
}

}  // namespace

std::string trajectory_csv(const TrackReport& report) {
    std::ostringstream out;
    out << "t,x,y,w,h,best_score,n_uncertain,q_av\n";
    append_csv_box(out, 1, report.init_state, 1.0, 0, 1.0);
    for (std::size_t i = 0; i < report.frames.size(); ++i) {
        const FrameResult& r = report.frames[i];
        append_csv_box(out, static_cast<int>(i) + 2, r.state, r.best_score, r.n_uncertain, r.q_av);
    }
    return out.str();
}

std::string diagnostics_csv(const TrackReport& report) {
    std::ostringstream out;
    out << "t,eps_baseline,uncertain_ratio,n_uncertain,q_av,aux_queries,aux_retrained,"
           "aux_hash,members_accepted,total_attempts,per_member\n";
    for (const FrameResult& r : report.frames) {
        const FrameDiagnostics& d = r.diagnostics;
        int accepted = 0, attempts = 0;
        std::string per;
        for (std::size_t c = 0; c < d.members.size(); ++c) {
            accepted += d.members[c].accepted ? 1 : 0;
            attempts += d.members[c].attempts;
            if (c) per += ';';
            per += std::to_string(d.members[c].attempts);
            per += ':';
            per += d.members[c].accepted ? '1' : '0';
        }
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%d,%.6f,%d,%d,%016llx,%d,%d,", d.t,
                      d.eps_baseline, d.uncertain_ratio, d.n_uncertain, d.q_av, d.aux_queries,
                      d.aux_retrained ? 1 : 0, static_cast<unsigned long long>(d.aux_hash), accepted,
                      attempts);
        out << buf << per << "\n";
    }
    return out.str();
}

}  // namespace dedt
