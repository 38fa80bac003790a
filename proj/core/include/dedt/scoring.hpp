#ifndef DEDT_SCORING_HPP
#define DEDT_SCORING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dedt/committee.hpp"

namespace dedt {

// Batch scorer for one fixed query set (the frame's candidate features).
// Distances to member exemplars are computed once per (query, exemplar) pair
// and kept for the whole frame, keyed by the exemplar's monotonic id, so the
// committee scoring pass, the bag-updated rescore and the diversification
// trials all share the expensive part. Results are identical to
// CommitteeMember::score up to the algebraic form of the squared distance
// (|q|^2 + |e|^2 - 2 q.e here), which only matters on exact ties - and exact
// duplicates produce bitwise-equal distances under both forms.
class FrameScorer {
public:
    FrameScorer(const float* queries, int count, int dim, int max_members);
    explicit FrameScorer(const LabeledSet& queries, int max_members);

    int query_count() const { return n_; }
    int dim() const { return dim_; }

    // Scores every query against the member's current store. Extends the
    // cache for exemplars appended since the last call.
    void member_scores(const CommitteeMember& m, int member_index, std::span<double> out);

    // Scores every query against a hypothetical member: m with n_extra
    // exemplars appended now (FIFO eviction applied logically). The extra
    // distance columns are computed fresh and discarded.
    void trial_scores(const CommitteeMember& m, int member_index, const float* extra_feats,
                      const std::int8_t* extra_labels, int n_extra, std::span<double> out);

private:
    struct Block {
        std::int64_t id0 = 0;
        int cols = 0;
        std::vector<float> dist;          // n_ * cols, row per query
        std::vector<std::int8_t> labels;  // cols
    };
    struct MemberCache {
        std::int64_t covered_end = -1;
        std::vector<Block> blocks;
    };

    void extend(const CommitteeMember& m, MemberCache& mc);
    Block compute_block(const float* feats, const float* norms, const std::int8_t* labels, int cols,
                        std::int64_t id0) const;
    void select(const MemberCache& mc, std::int64_t first_id, std::int64_t end_id, const Block* extra,
                int k, std::span<double> out) const;

    int n_;
    int dim_;
    std::vector<float> q_;      // n_ * dim_
    std::vector<float> qnorm_;  // n_
    std::vector<MemberCache> caches_;
};

}  // namespace dedt

#endif
