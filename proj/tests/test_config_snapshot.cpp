#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "dedt/config.hpp"
#include "dedt/errors.hpp"
#include "dedt/rng.hpp"
#include "dedt/snapshot.hpp"

using namespace dedt;
namespace fs = std::filesystem;

TEST_CASE("config text round-trips through the parser") {
    TrackerConfig c;
    c.committee_size = 7;
    c.knn_k = 9;
    c.n_candidates = 321;
    c.tau_u = 0.61;
    c.tau_l = -0.37;
    c.mode = TrackerMode::Art;
    c.delta_override = 0.25;
    c.seed = 987654321;
    c.localization = LocalizationRule::SignVote;
    c.verify_acceptance = true;
    const TrackerConfig parsed = parse_config(config_text(c));
    CHECK(parsed.committee_size == c.committee_size);
    CHECK(parsed.knn_k == c.knn_k);
    CHECK(parsed.n_candidates == c.n_candidates);
    CHECK(parsed.tau_u == c.tau_u);
    CHECK(parsed.tau_l == c.tau_l);
    CHECK(parsed.mode == c.mode);
    CHECK(parsed.delta_override == c.delta_override);
    CHECK(parsed.seed == c.seed);
    CHECK(parsed.localization == c.localization);
    CHECK(parsed.verify_acceptance == c.verify_acceptance);
}

TEST_CASE("unknown config keys are fatal") {
    CHECK_THROWS_AS(parse_config("committee_size=5\nbogus_key=1\n"), IngestionError);
}

TEST_CASE("comments and blank lines are ignored, malformed values rejected") {
    const TrackerConfig c = parse_config("# a comment\n\n  knn_k = 11  # trailing\n");
    CHECK(c.knn_k == 11);
    CHECK_THROWS_AS(parse_config("knn_k=eleven\n"), IngestionError);
    CHECK_THROWS_AS(parse_config("knn_k\n"), IngestionError);
    CHECK_THROWS_AS(parse_config("mode=warp\n"), IngestionError);
}

TEST_CASE("committee and referee state survive a snapshot round-trip") {
    Rng rng(71);
    const int dim = 12, k = 3, capacity = 20;
    Committee c = make_committee(3, dim, k, capacity);
    std::vector<float> f(dim);
    for (auto& m : c.members)
        for (int i = 0; i < 25; ++i) {  // overflows capacity -> nonzero first_id
            for (float& v : f) v = static_cast<float>(rng.uniform());
            const std::int8_t l = rng.uniform() < 0.5 ? 1 : -1;
            m.append(f.data(), &l, 1, i);
        }

    AuxiliaryModel aux(dim);
    LabeledSet s;
    s.dim = dim;
    for (int i = 0; i < 20; ++i) {
        for (float& v : f) v = static_cast<float>(rng.uniform() + (i % 2 ? 1.5 : -1.5));
        s.add(f.data(), i % 2 ? 1 : -1);
    }
    REQUIRE(aux.train(s, 5));

    const fs::path file = fs::temp_directory_path() / "dedt_snapshot_roundtrip.bin";
    save_snapshot(c, aux, file);
    const TrackerSnapshot snap = load_snapshot(file);

    REQUIRE(snap.committee.size() == c.size());
    for (int i = 0; i < c.size(); ++i) {
        const auto& a = c.members[i];
        const auto& b = snap.committee.members[i];
        REQUIRE(a.size() == b.size());
        CHECK(a.first_id() == b.first_id());
        for (int j = 0; j < a.size() * dim; ++j)
            CHECK(a.features_data()[j] == b.features_data()[j]);
        for (int j = 0; j < a.size(); ++j) {
            CHECK(a.labels_data()[j] == b.labels_data()[j]);
            CHECK(a.times_data()[j] == b.times_data()[j]);
        }
        // Scores agree bitwise on fresh queries.
        FeatureVector q(dim);
        for (double& v : q) v = rng.uniform();
        CHECK(a.score(q) == b.score(q));
    }
    CHECK(snap.aux.trained());
    CHECK(snap.aux.last_trained() == 5);
    CHECK(snap.aux.weights() == aux.weights());
    CHECK(snap.aux.hash() == aux.hash());
}

TEST_CASE("snapshots with a wrong magic are rejected") {
    const fs::path file = fs::temp_directory_path() / "dedt_snapshot_bad.bin";
    std::ofstream(file, std::ios::binary) << "NOPE garbage";
    CHECK_THROWS_AS(load_snapshot(file), IngestionError);
}
