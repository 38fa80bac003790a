#ifndef DEDT_COMMITTEE_HPP
#define DEDT_COMMITTEE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dedt/hog.hpp"

namespace dedt {

// sign with the tie broken toward +1.
inline int sign_of(double v) { return v < 0.0 ? -1 : 1; }

struct LabeledExemplar {
    FeatureVector feature;
    int label = 1;       // +1 target, -1 background
    int insert_time = 0;  // frame index
};

// Flat float matrix of labeled feature vectors; the committee's working
// currency in the per-frame hot path.
struct LabeledSet {
    int dim = 0;
    std::vector<float> features;  // count() * dim, row-major
    std::vector<std::int8_t> labels;

    int count() const { return static_cast<int>(labels.size()); }
    const float* feature(int i) const { return features.data() + static_cast<std::size_t>(i) * dim; }
    void add(std::span<const double> f, int label);
    void add(const float* f, int label);
};

// One slice of a distance row: distances to consecutive exemplars starting at
// monotonic id id0, with their labels.
struct DistSegment {
    const float* dists = nullptr;
    const std::int8_t* labels = nullptr;
    std::int64_t id0 = 0;
    int count = 0;
};

// Vote of the k nearest exemplars across the segments: (k+ - k-) / k.
// Distance ties break by smaller id (= earlier insertion).
double knn_vote(std::span<const DistSegment> segments, int k);

// Bounded FIFO exemplar store with an exact nearest-neighbor scan. Exemplars
// carry monotonically increasing ids; eviction only advances the window start,
// so id order always equals insertion order.
class CommitteeMember {
public:
    CommitteeMember(int dim, int k, int capacity);

    void append(const float* feats, const std::int8_t* labels, int count, std::int32_t insert_time);
    void append(const LabeledSet& batch, std::int32_t insert_time);
    void append(const LabeledExemplar& e);

    int dim() const { return dim_; }
    int k() const { return k_; }
    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(labels_.size()); }
    bool trained() const { return size() >= k_; }

    std::int64_t first_id() const { return first_id_; }
    std::int64_t end_id() const { return first_id_ + size(); }
    // Restores the id window when rebuilding from a snapshot.
    void set_first_id(std::int64_t id) { first_id_ = id; }

    const float* features_data() const { return features_.data(); }
    const float* norms_data() const { return norms_.data(); }
    const std::int8_t* labels_data() const { return labels_.data(); }
    const std::int32_t* times_data() const { return times_.data(); }

    // Exact kNN score in [-1, 1] by direct scan.
    double score(std::span<const float> f) const;
    double score(const FeatureVector& f) const;

private:
    int dim_;
    int k_;
    int capacity_;
    std::int64_t first_id_ = 0;
    std::vector<float> features_;  // size() * dim, oldest first
    std::vector<float> norms_;     // squared L2 norm per exemplar
    std::vector<std::int8_t> labels_;
    std::vector<std::int32_t> times_;
};

struct Committee {
    std::vector<CommitteeMember> members;

    int size() const { return static_cast<int>(members.size()); }
};

Committee make_committee(int members, int dim, int k, int capacity);

// Normalized majority vote: (1/C) * sum_c sign(member score).
double ensemble_score(const Committee& committee, const FeatureVector& f);
double ensemble_score(const Committee& committee, std::span<const float> f);

CommitteeMember update_member(CommitteeMember member, const std::vector<LabeledExemplar>& batch);

// Pairwise coincidence statistic over two members' sign votes, in [-1, 1].
// Zero denominator maps to 0.
double q_statistic(std::span<const std::int8_t> votes_i, std::span<const std::int8_t> votes_j);

// Average Q over all member pairs, votes computed on the evaluation set.
double q_average(const Committee& committee, const LabeledSet& eval);

// Same, from precomputed per-member sign votes (votes[c][j] in {-1, +1}).
double q_average_from_votes(const std::vector<std::vector<std::int8_t>>& votes);

}  // namespace dedt

#endif
