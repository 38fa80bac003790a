#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dedt/committee.hpp"
#include "dedt/errors.hpp"
#include "dedt/rng.hpp"

using namespace dedt;

namespace {

FeatureVector random_vec(int dim, Rng& rng) {
    FeatureVector f(dim);
    for (double& v : f) v = rng.uniform();
    return f;
}

void add_exemplar(CommitteeMember& m, const FeatureVector& f, int label, int time = 0) {
    std::vector<float> ff(f.begin(), f.end());
    const std::int8_t l = static_cast<std::int8_t>(label);
    m.append(ff.data(), &l, 1, time);
}

// Reference kNN vote: exhaustive sort by (distance, insertion order).
double brute_vote(const std::vector<FeatureVector>& store, const std::vector<int>& labels,
                  const FeatureVector& q, int k) {
    std::vector<std::pair<double, int>> d(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double diff = static_cast<float>(store[i][j]) - static_cast<float>(q[j]);
            s += diff * diff;
        }
        d[i] = {s, static_cast<int>(i)};
    }
    std::sort(d.begin(), d.end());
    int pos = 0;
    for (int i = 0; i < k; ++i) pos += labels[d[i].second] > 0 ? 1 : -1;
    return static_cast<double>(pos) / k;
}

}  // namespace

TEST_CASE("member score equals a brute-force k-nearest scan") {
    Rng rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 1 + static_cast<int>(rng.uniform_index(16));
        const int k = 2 * static_cast<int>(rng.uniform_index(5)) + 3;  // odd, 3..11
        const int count = k + static_cast<int>(rng.uniform_index(200));
        CommitteeMember m(dim, k, 500);
        std::vector<FeatureVector> store;
        std::vector<int> labels;
        for (int i = 0; i < count; ++i) {
            store.push_back(random_vec(dim, rng));
            labels.push_back(rng.uniform() < 0.5 ? 1 : -1);
            add_exemplar(m, store.back(), labels.back());
        }
        for (int q = 0; q < 25; ++q) {
            const FeatureVector query = random_vec(dim, rng);
            CHECK(m.score(query) ==
                  doctest::Approx(brute_vote(store, labels, query, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("unanimous neighborhoods give +1 or -1 and the 4-of-5 case gives 0.6") {
    CommitteeMember m(2, 5, 100);
    // Five positives at the origin, five negatives far away.
    for (int i = 0; i < 5; ++i) add_exemplar(m, {0.01 * i, 0.0}, 1);
    for (int i = 0; i < 5; ++i) add_exemplar(m, {100.0 + i, 0.0}, -1);
    CHECK(m.score(FeatureVector{0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(m.score(FeatureVector{102.0, 0.0}) == doctest::Approx(-1.0));

    CommitteeMember mixed(1, 5, 100);
    for (int i = 0; i < 4; ++i) add_exemplar(mixed, {0.1 * i}, 1);
    add_exemplar(mixed, {0.05}, -1);
    CHECK(mixed.score(FeatureVector{0.0}) == doctest::Approx(0.6));  // (4 - 1) / 5
}

TEST_CASE("scoring an under-filled member throws") {
    CommitteeMember m(2, 5, 100);
    add_exemplar(m, {0.0, 0.0}, 1);
    CHECK_THROWS_AS(m.score(FeatureVector{0.0, 0.0}), UntrainedMember);
}

TEST_CASE("fifo eviction on a capacity-5 store keeps the newest exemplars") {
    CommitteeMember m(1, 1, 5);
    for (int i = 0; i < 8; ++i) add_exemplar(m, {static_cast<double>(i)}, i < 4 ? 1 : -1, i);
    CHECK(m.size() == 5);
    CHECK(m.first_id() == 3);
    CHECK(m.end_id() == 8);
    // Oldest three evicted: the store now holds values 3..7.
    CHECK(m.features_data()[0] == doctest::Approx(3.0f));
    CHECK(m.labels_data()[0] == 1);
    CHECK(m.labels_data()[4] == -1);
    // Nearest neighbor of 0.0 is now 3.0 (label +1).
    CHECK(m.score(FeatureVector{0.0}) == doctest::Approx(1.0));
}

TEST_CASE("distance ties break toward the earlier insertion") {
    CommitteeMember m(1, 1, 10);
    add_exemplar(m, {1.0}, -1, 0);
    add_exemplar(m, {1.0}, 1, 1);  // identical feature, later insertion
    CHECK(m.score(FeatureVector{1.0}) == doctest::Approx(-1.0));
}

TEST_CASE("ensemble score is the normalized sign vote") {
    // 3 members in 1-D around distinct anchor points.
    Committee c = make_committee(3, 1, 1, 10);
    auto fill = [](CommitteeMember& m, double anchor, int label) {
        const float f = static_cast<float>(anchor);
        const std::int8_t l = static_cast<std::int8_t>(label);
        m.append(&f, &l, 1, 0);
    };
    fill(c.members[0], 0.0, 1);
    fill(c.members[1], 0.0, 1);
    fill(c.members[2], 0.0, -1);
    CHECK(ensemble_score(c, FeatureVector{0.0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ensemble score lies on the C-vote lattice") {
    Rng rng(77);
    const int C = 15, dim = 4, k = 3;
    Committee c = make_committee(C, dim, k, 100);
    for (auto& m : c.members)
        for (int i = 0; i < 20; ++i)
            add_exemplar(m, random_vec(dim, rng), rng.uniform() < 0.5 ? 1 : -1);
    for (int q = 0; q < 50; ++q) {
        const double s = ensemble_score(c, random_vec(dim, rng));
        const double votes = s * C;
        CHECK(std::round(votes) == doctest::Approx(votes).epsilon(1e-9));
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("pairwise vote statistic oracle values") {
    // N_ff=3, N_bb=3, N_fb=1, N_bf=1 -> (9 - 1) / (9 + 1) = 0.8.
    std::vector<std::int8_t> a = {1, 1, 1, 1, -1, -1, -1, -1};
    std::vector<std::int8_t> b = {1, 1, 1, -1, 1, -1, -1, -1};
    CHECK(q_statistic(a, b) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(q_statistic(b, a) == doctest::Approx(0.8).epsilon(1e-12));

    // Fully coincident -> 1; fully complementary -> -1.
    std::vector<std::int8_t> c = {1, 1, -1, -1, 1};
    CHECK(q_statistic(c, c) == doctest::Approx(1.0));
    std::vector<std::int8_t> d = {-1, -1, 1, 1, -1};
    CHECK(q_statistic(c, d) == doctest::Approx(-1.0));
}

TEST_CASE("pairwise statistic returns 0 on a zero denominator") {
    // One member always votes +1: N_bb = N_bf = 0 -> denominator 0.
    std::vector<std::int8_t> a = {1, 1, 1, 1};
    std::vector<std::int8_t> b = {1, 1, -1, -1};
    CHECK(q_statistic(a, b) == doctest::Approx(0.0));
}

TEST_CASE("vote-average reduces correctly over pairs") {
    // Three members whose vote vectors realize pairwise values {0.8, -0.8, -1}.
    std::vector<std::vector<std::int8_t>> votes = {
        {1, 1, 1, 1, -1, -1, -1, -1},
        {1, 1, 1, -1, 1, -1, -1, -1},
        {-1, -1, -1, 1, -1, 1, 1, 1},
    };
    CHECK(q_statistic(votes[0], votes[1]) == doctest::Approx(0.8));
    CHECK(q_statistic(votes[0], votes[2]) == doctest::Approx(-0.8));
    CHECK(q_statistic(votes[1], votes[2]) == doctest::Approx(-1.0));
    const double expected = (0.8 - 0.8 - 1.0) * 2.0 / (3 * 2);
    CHECK(q_average_from_votes(votes) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical members give a vote-average of 1") {
    Rng rng(5);
    const int dim = 3;
    Committee c = make_committee(4, dim, 3, 50);
    std::vector<FeatureVector> store;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
        store.push_back(random_vec(dim, rng));
        labels.push_back(i % 2 == 0 ? 1 : -1);
    }
    for (auto& m : c.members)
        for (std::size_t i = 0; i < store.size(); ++i) add_exemplar(m, store[i], labels[i]);
    LabeledSet eval;
    eval.dim = dim;
    for (int i = 0; i < 30; ++i) eval.add(std::span<const double>(random_vec(dim, rng)), 1);
    CHECK(q_average(c, eval) == doctest::Approx(1.0));
}

TEST_CASE("make_committee validates the member count") {
    CHECK_THROWS_AS(make_committee(1, 4, 3, 10), ContractViolation);
}
