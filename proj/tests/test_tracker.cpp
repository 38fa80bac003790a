#include <doctest.h>

#include <vector>

#include "dedt/bench.hpp"
#include "dedt/errors.hpp"
#include "dedt/tracker.hpp"

using namespace dedt;

namespace {

AuxiliaryModel constant_aux(int dim, double bias) {
    AuxiliaryModel aux(dim);
    std::vector<double> w(dim + 1, 0.0);
    w.back() = bias;
    aux.set_weights(std::move(w), 1);
    return aux;
}

TrackerConfig small_config() {
    TrackerConfig cfg;
    cfg.committee_size = 5;
    cfg.knn_k = 5;
    cfg.n_candidates = 120;
    cfg.bag_size = 20;
    cfg.artificial_count = 30;
    cfg.member_capacity = 400;
    cfg.threads = 1;
    return cfg;
}

SynthSequence small_sequence(int frames, std::uint64_t seed) {
    SynthSpec spec;
    spec.frames = frames;
    spec.size = 120;
    spec.target = 32;
    spec.motion_sigma = 1.0;
    return synth_sequence(spec, seed);
}

}  // namespace

TEST_CASE("score thresholds split labels exactly at the configured bands") {
    const double tau_u = 0.54, tau_l = -0.41;
    const AuxiliaryModel pos_aux = constant_aux(2, 1.0);
    const AuxiliaryModel neg_aux = constant_aux(2, -1.0);
    const FeatureVector f{0.0, 0.0};

    // Exhaustive grid s = -1.00, -0.99, ..., 1.00.
    for (int i = -100; i <= 100; ++i) {
        const double s = i / 100.0;
        const auto [label, uncertain] = label_sample(s, f, pos_aux, tau_l, tau_u);
        if (s > tau_u) {
            CHECK(label == 1);
            CHECK_FALSE(uncertain);
        } else if (s < tau_l) {
            CHECK(label == -1);
            CHECK_FALSE(uncertain);
        } else {
            CHECK(label == 1);  // the positive-bias referee answered
            CHECK(uncertain);
            const auto [nl, nu] = label_sample(s, f, neg_aux, tau_l, tau_u);
            CHECK(nl == -1);
            CHECK(nu);
        }
    }

    // Named cases: 0.60 -> certain +1; -0.50 -> certain -1; 0.10 -> referred.
    CHECK(label_sample(0.60, f, neg_aux, tau_l, tau_u) == std::make_pair(1, false));
    CHECK(label_sample(-0.50, f, pos_aux, tau_l, tau_u) == std::make_pair(-1, false));
    CHECK(label_sample(0.10, f, pos_aux, tau_l, tau_u) == std::make_pair(1, true));
}

TEST_CASE("localization picks the argmax of summed member confidences") {
    Rng rng(67);
    const int dim = 6;
    Committee c = make_committee(3, dim, 3, 50);
    for (auto& m : c.members) {
        LabeledSet s;
        s.dim = dim;
        std::vector<float> f(dim);
        for (int i = 0; i < 20; ++i) {
            for (float& v : f) v = static_cast<float>(rng.uniform());
            s.add(f.data(), rng.uniform() < 0.5 ? 1 : -1);
        }
        m.append(s, 0);
    }
    std::vector<Sample> samples(30);
    for (auto& smp : samples) {
        smp.feature.resize(dim);
        for (double& v : smp.feature) v = rng.uniform();
        smp.candidate_box = BoundingBox{rng.uniform(0, 50), rng.uniform(0, 50), 10, 10};
    }
    const auto [idx, box] = localize(samples, c);

    // Brute-force recomputation.
    int best = 0;
    double best_sum = -1e300;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        double sum = 0.0;
        for (const auto& m : c.members) sum += m.score(samples[j].feature);
        if (sum > best_sum) {
            best_sum = sum;
            best = static_cast<int>(j);
        }
    }
    CHECK(idx == best);
    CHECK(box.x == doctest::Approx(samples[best].candidate_box.x));
}

TEST_CASE("config validation rejects inconsistent settings") {
    TrackerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    TrackerConfig bad = cfg;
    bad.committee_size = 1;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = cfg;
    bad.knn_k = 4;  // must be odd
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = cfg;
    bad.tau_l = 0.6;  // tau_l >= tau_u
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = cfg;
    bad.member_capacity = bad.knn_k - 1;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
    bad = cfg;
    bad.patch_size = 33;  // not divisible by cell size
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("initialization is deterministic and out-of-frame boxes are rejected") {
    const SynthSequence seq = small_sequence(3, 2);
    const TrackerConfig cfg = small_config();

    Tracker a(seq.frames[0], seq.gt.boxes[0], cfg);
    Tracker b(seq.frames[0], seq.gt.boxes[0], cfg);
    for (int c = 0; c < a.committee().size(); ++c) {
        CHECK(a.committee().members[c].size() == b.committee().members[c].size());
        CHECK(a.committee().members[c].size() >= cfg.knn_k);
    }
    CHECK(a.auxiliary().hash() == b.auxiliary().hash());

    CHECK_THROWS_AS(Tracker(seq.frames[0], BoundingBox{-500, -500, 20, 20}, cfg),
                    ContractViolation);
}

TEST_CASE("full runs are reproducible and the state is always a sampled candidate") {
    const SynthSequence seq = small_sequence(8, 4);
    TrackerConfig cfg = small_config();
    cfg.seed = 3;

    const TrackReport r1 = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    const TrackReport r2 = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    CHECK(trajectory_csv(r1) == trajectory_csv(r2));
    CHECK(diagnostics_csv(r1) == diagnostics_csv(r2));
    REQUIRE(r1.trajectory.size() == seq.frames.size());
    for (const auto& fr : r1.frames) {
        CHECK(fr.state.valid());
        CHECK(fr.best_score >= -1.0);
        CHECK(fr.best_score <= 1.0);
        CHECK(fr.n_uncertain >= 0);
        CHECK(fr.n_uncertain <= cfg.n_candidates);
    }
}

TEST_CASE("a zero label margin sends nothing to the referee") {
    const SynthSequence seq = small_sequence(6, 6);
    TrackerConfig cfg = small_config();
    cfg.delta_override = 0.0;  // thresholds collapse to (0, 0)
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    for (const auto& fr : r.frames) {
        CHECK(fr.n_uncertain == 0);
        CHECK(fr.diagnostics.aux_queries == 0);
    }
}

TEST_CASE("a full-width label margin sends every sample to the referee") {
    const SynthSequence seq = small_sequence(6, 6);
    TrackerConfig cfg = small_config();
    cfg.delta_override = 1.0;
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    for (const auto& fr : r.frames) {
        CHECK(fr.n_uncertain == cfg.n_candidates);
        CHECK(fr.diagnostics.aux_queries == cfg.n_candidates);
    }
}

TEST_CASE("bag mode never attempts diversity trials") {
    const SynthSequence seq = small_sequence(6, 8);
    TrackerConfig cfg = small_config();
    cfg.mode = TrackerMode::Bag;
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    for (const auto& fr : r.frames)
        for (const auto& m : fr.diagnostics.members) {
            CHECK(m.attempts == 0);
            CHECK_FALSE(m.accepted);
        }
}

TEST_CASE("frozen-referee mode never retrains the auxiliary") {
    const SynthSequence seq = small_sequence(12, 10);
    TrackerConfig cfg = small_config();
    cfg.mode = TrackerMode::AuxFirst;
    cfg.aux_period = 3;
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    const std::uint64_t h0 = r.frames.front().diagnostics.aux_hash;
    for (const auto& fr : r.frames) {
        CHECK_FALSE(fr.diagnostics.aux_retrained);
        CHECK(fr.diagnostics.aux_hash == h0);
    }
}

TEST_CASE("auxiliary retraining lands exactly on the cadence") {
    const SynthSequence seq = small_sequence(13, 12);
    TrackerConfig cfg = small_config();
    cfg.aux_period = 4;
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], cfg);
    std::uint64_t last_hash = 0;
    bool have_last = false;
    for (const auto& fr : r.frames) {
        const bool cadence = fr.diagnostics.t % cfg.aux_period == 0;
        if (!cadence) {
            CHECK_FALSE(fr.diagnostics.aux_retrained);
            if (have_last) CHECK(fr.diagnostics.aux_hash == last_hash);
        }
        last_hash = fr.diagnostics.aux_hash;
        have_last = true;
    }
}

TEST_CASE("trajectory csv has the documented header and row count") {
    const SynthSequence seq = small_sequence(5, 14);
    const TrackReport r = run_tracker(seq.frames, seq.gt.boxes[0], small_config());
    const std::string csv = trajectory_csv(r);
    CHECK(csv.rfind("t,x,y,w,h,best_score,n_uncertain,q_av\n", 0) == 0);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 1 + static_cast<int>(seq.frames.size()));
}

TEST_CASE("mode names round-trip") {
    for (TrackerMode m : {TrackerMode::Full, TrackerMode::Bag, TrackerMode::Art,
                          TrackerMode::AuxFirst, TrackerMode::AuxShort, TrackerMode::AuxIsolated})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mode_from_string("bogus"), ContractViolation);
}
