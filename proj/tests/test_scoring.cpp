#include <doctest.h>

#include <vector>

#include "dedt/committee.hpp"
#include "dedt/rng.hpp"
#include "dedt/scoring.hpp"

using namespace dedt;

namespace {

LabeledSet random_set(int count, int dim, Rng& rng) {
    LabeledSet s;
    s.dim = dim;
    std::vector<float> f(dim);
    for (int i = 0; i < count; ++i) {
        for (float& v : f) v = static_cast<float>(rng.uniform());
        s.add(f.data(), rng.uniform() < 0.5 ? 1 : -1);
    }
    return s;
}

}  // namespace

TEST_CASE("cached batch scores match the member's direct scan") {
    Rng rng(31);
    const int dim = 24, k = 5, capacity = 60;
    Committee c = make_committee(3, dim, k, capacity);
    for (auto& m : c.members) m.append(random_set(30, dim, rng), 0);

    const LabeledSet queries = random_set(40, dim, rng);
    FrameScorer scorer(queries, c.size());
    std::vector<double> out(queries.count());
    for (int ci = 0; ci < c.size(); ++ci) {
        scorer.member_scores(c.members[ci], ci, out);
        for (int q = 0; q < queries.count(); ++q) {
            const double direct =
                c.members[ci].score(std::span<const float>(queries.feature(q), dim));
            CHECK(out[q] == doctest::Approx(direct).epsilon(1e-9));
        }
    }

    SUBCASE("and stays correct after appends with eviction") {
        for (auto& m : c.members) m.append(random_set(50, dim, rng), 1);  // 80 > capacity 60
        for (int ci = 0; ci < c.size(); ++ci) {
            scorer.member_scores(c.members[ci], ci, out);
            for (int q = 0; q < queries.count(); ++q) {
                const double direct =
                    c.members[ci].score(std::span<const float>(queries.feature(q), dim));
                CHECK(out[q] == doctest::Approx(direct).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("trial scores equal scoring a copy with the extras appended") {
    Rng rng(47);
    const int dim = 16, k = 7, capacity = 40;
    CommitteeMember m(dim, k, capacity);
    m.append(random_set(35, dim, rng), 0);

    const LabeledSet queries = random_set(25, dim, rng);
    const LabeledSet extra = random_set(12, dim, rng);  // pushes past capacity

    FrameScorer scorer(queries, 1);
    std::vector<double> warm(queries.count());
    scorer.member_scores(m, 0, warm);  // warm the cache first, as in the hot loop

    std::vector<double> trial(queries.count());
    scorer.trial_scores(m, 0, extra.features.data(), extra.labels.data(), extra.count(), trial);

    CommitteeMember copy = m;
    copy.append(extra, 1);
    for (int q = 0; q < queries.count(); ++q) {
        const double direct = copy.score(std::span<const float>(queries.feature(q), dim));
        CHECK(trial[q] == doctest::Approx(direct).epsilon(1e-9));
    }

    SUBCASE("the trial leaves the cached member view untouched") {
        std::vector<double> again(queries.count());
        scorer.member_scores(m, 0, again);
        for (int q = 0; q < queries.count(); ++q)
            CHECK(again[q] == doctest::Approx(warm[q]).epsilon(1e-12));
    }
}
