#include <benchmark/benchmark.h>

#include <vector>

#include "dedt/bench.hpp"
#include "dedt/hog.hpp"
#include "dedt/rng.hpp"
#include "dedt/scoring.hpp"
#include "dedt/tracker.hpp"

using namespace dedt;

namespace {

Patch random_patch(int size, Rng& rng) {
    Patch p;
    p.size = size;
    p.intensities.resize(static_cast<std::size_t>(size) * size);
    for (double& v : p.intensities) v = rng.uniform();
    return p;
}

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

void bm_hog(benchmark::State& state) {
    Rng rng(1);
    const Patch p = random_patch(32, rng);
    const HogParams params;
    for (auto _ : state) benchmark::DoNotOptimize(hog(p, params));
}
BENCHMARK(bm_hog);

void bm_member_score(benchmark::State& state) {
    Rng rng(2);
    const int dim = 324;
    CommitteeMember m(dim, 23, 2000);
    m.append(random_set(2000, dim, rng), 0);
    const LabeledSet q = random_set(1, dim, rng);
    const std::span<const float> query(q.feature(0), dim);
    for (auto _ : state) benchmark::DoNotOptimize(m.score(query));
}
BENCHMARK(bm_member_score);

void bm_batch_scoring(benchmark::State& state) {
    Rng rng(3);
    const int dim = 324, n = 1000;
    Committee c = make_committee(15, dim, 23, 2000);
    for (auto& m : c.members) m.append(random_set(2000, dim, rng), 0);
    const LabeledSet queries = random_set(n, dim, rng);
    std::vector<double> out(n);
    for (auto _ : state) {
        FrameScorer scorer(queries, c.size());
        for (int ci = 0; ci < c.size(); ++ci) scorer.member_scores(c.members[ci], ci, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(bm_batch_scoring)->Unit(benchmark::kMillisecond);

void bm_tracker_step(benchmark::State& state) {
    SynthSpec spec;
    spec.frames = 400;
    spec.size = 240;
    spec.target = 48;
    const SynthSequence seq = synth_sequence(spec, 5);
    TrackerConfig cfg;
    Tracker tracker(seq.frames[0], seq.gt.boxes[0], cfg);
    std::size_t next = 1;
    for (auto _ : state) {
        if (next >= seq.frames.size()) {
            state.SkipWithError("sequence exhausted");
            break;
        }
        benchmark::DoNotOptimize(tracker.step(seq.frames[next++]));
    }
}
BENCHMARK(bm_tracker_step)->Unit(benchmark::kMillisecond)->Iterations(20);

}  // namespace

BENCHMARK_MAIN();
