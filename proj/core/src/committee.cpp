#include "dedt/committee.hpp"

#include <algorithm>
#include <cmath>

#include "dedt/errors.hpp"

namespace dedt {

void LabeledSet::add(std::span<const double> f, int label) {
    if (dim == 0) dim = static_cast<int>(f.size());
    if (static_cast<int>(f.size()) != dim) throw ContractViolation("LabeledSet: dimension mismatch");
    for (double v : f) features.push_back(static_cast<float>(v));
    labels.push_back(static_cast<std::int8_t>(label >= 0 ? 1 : -1));
}

void LabeledSet::add(const float* f, int label) {
    features.insert(features.end(), f, f + dim);
    labels.push_back(static_cast<std::int8_t>(label >= 0 ? 1 : -1));
}

namespace {

struct Neighbor {
    float dist;
    std::int64_t id;
    std::int8_t label;
};

// "worse" = larger distance, then larger id.
inline bool worse(const Neighbor& a, const Neighbor& b) {
    if (a.dist != b.dist) return a.dist > b.dist;
    return a.id > b.id;
}

}  // namespace

double knn_vote(std::span<const DistSegment> segments, int k) {
    // Bounded max-heap of the k best neighbors seen so far.
    thread_local std::vector<Neighbor> heap;
    heap.clear();
    heap.reserve(static_cast<std::size_t>(k) + 1);
    auto cmp = [](const Neighbor& a, const Neighbor& b) { return worse(b, a); };  // max-heap on "worse"
    for (const DistSegment& seg : segments) {
        for (int j = 0; j < seg.count; ++j) {
            Neighbor cand{seg.dists[j], seg.id0 + j, seg.labels[j]};
            if (static_cast<int>(heap.size()) < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), cmp);
            } else if (worse(heap.front(), cand)) {
                std::pop_heap(heap.begin(), heap.end(), cmp);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), cmp);
            }
        }
    }
    if (static_cast<int>(heap.size()) < k)
        throw UntrainedMember("knn_vote: fewer than k exemplars available");
    int positives = 0;
    for (const Neighbor& nb : heap)
        if (nb.label > 0) ++positives;
    return static_cast<double>(2 * positives - k) / k;
}

CommitteeMember::CommitteeMember(int dim, int k, int capacity) : dim_(dim), k_(k), capacity_(capacity) {
    if (dim < 1) throw ContractViolation("CommitteeMember: dim must be >= 1");
    if (k < 1 || k % 2 == 0) throw ContractViolation("CommitteeMember: k must be >= 1 and odd");
    if (capacity < k) throw ContractViolation("CommitteeMember: capacity must be >= k");
}

void CommitteeMember::append(const float* feats, const std::int8_t* labels, int count,
                             std::int32_t insert_time) {
    if (count <= 0) throw ContractViolation("CommitteeMember: empty batch");
    for (int i = 0; i < count; ++i) {
        const float* f = feats + static_cast<std::size_t>(i) * dim_;
        features_.insert(features_.end(), f, f + dim_);
        float n2 = 0.0f;
        for (int d = 0; d < dim_; ++d) n2 += f[d] * f[d];
        norms_.push_back(n2);
        labels_.push_back(labels[i]);
        times_.push_back(insert_time);
    }
    const int excess = size() - capacity_;
    if (excess > 0) {
        features_.erase(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(excess) * dim_);
        norms_.erase(norms_.begin(), norms_.begin() + excess);
        labels_.erase(labels_.begin(), labels_.begin() + excess);
        times_.erase(times_.begin(), times_.begin() + excess);
        first_id_ += excess;
    }
}

void CommitteeMember::append(const LabeledSet& batch, std::int32_t insert_time) {
    if (batch.dim != dim_) throw ContractViolation("CommitteeMember: feature dimension mismatch");
    append(batch.features.data(), batch.labels.data(), batch.count(), insert_time);
}

void CommitteeMember::append(const LabeledExemplar& e) {
    if (static_cast<int>(e.feature.size()) != dim_)
        throw ContractViolation("CommitteeMember: feature dimension mismatch");
    std::vector<float> f(e.feature.begin(), e.feature.end());
    const std::int8_t label = e.label >= 0 ? 1 : -1;
    append(f.data(), &label, 1, e.insert_time);
}

double CommitteeMember::score(std::span<const float> f) const {
    if (static_cast<int>(f.size()) != dim_)
        throw ContractViolation("CommitteeMember: query dimension mismatch");
    if (!trained()) throw UntrainedMember("member has fewer than k exemplars");
    thread_local std::vector<float> dists;
    dists.resize(static_cast<std::size_t>(size()));
    for (int i = 0; i < size(); ++i) {
        const float* e = features_.data() + static_cast<std::size_t>(i) * dim_;
        float acc = 0.0f;
        for (int d = 0; d < dim_; ++d) {
            const float diff = f[d] - e[d];
            acc += diff * diff;
        }
        dists[static_cast<std::size_t>(i)] = acc;
    }
    const DistSegment seg{dists.data(), labels_.data(), first_id_, size()};
    return knn_vote(std::span<const DistSegment>(&seg, 1), k_);
}

double CommitteeMember::score(const FeatureVector& f) const {
    thread_local std::vector<float> q;
    q.assign(f.begin(), f.end());
    return score(std::span<const float>(q.data(), q.size()));
}

Committee make_committee(int members, int dim, int k, int capacity) {
    if (members < 2) throw ContractViolation("Committee: at least 2 members required");
    Committee c;
    c.members.reserve(static_cast<std::size_t>(members));
    for (int i = 0; i < members; ++i) c.members.emplace_back(dim, k, capacity);
    return c;
}

double ensemble_score(const Committee& committee, std::span<const float> f) {
    int votes = 0;
    for (const CommitteeMember& m : committee.members) votes += sign_of(m.score(f));
    return static_cast<double>(votes) / committee.size();
}

double ensemble_score(const Committee& committee, const FeatureVector& f) {
    thread_local std::vector<float> q;
    q.assign(f.begin(), f.end());
    return ensemble_score(committee, std::span<const float>(q.data(), q.size()));
}

CommitteeMember update_member(CommitteeMember member, const std::vector<LabeledExemplar>& batch) {
    if (batch.empty()) throw ContractViolation("update_member: empty batch");
    for (const LabeledExemplar& e : batch) member.append(e);
    return member;
}

double q_statistic(std::span<const std::int8_t> votes_i, std::span<const std::int8_t> votes_j) {
    if (votes_i.size() != votes_j.size() || votes_i.empty())
        throw ContractViolation("q_statistic: vote lists must be nonempty and equal length");
    // N^ff: both foreground (+1); N^bb: both background; mixed otherwise.
    double nff = 0, nbb = 0, nfb = 0, nbf = 0;
    for (std::size_t s = 0; s < votes_i.size(); ++s) {
        const bool fi = votes_i[s] > 0;
        const bool fj = votes_j[s] > 0;
        if (fi && fj)
            ++nff;
        else if (!fi && !fj)
            ++nbb;
        else if (fi)
            ++nfb;
        else
            ++nbf;
    }
    const double denom = nff * nbb + nfb * nbf;
    if (denom == 0.0) return 0.0;
    return (nff * nbb - nfb * nbf) / denom;
}

double q_average_from_votes(const std::vector<std::vector<std::int8_t>>& votes) {
    const int c = static_cast<int>(votes.size());
    if (c < 2) throw ContractViolation("q_average: at least 2 members required");
    double sum = 0.0;
    for (int i = 0; i < c - 1; ++i)
        for (int j = i + 1; j < c; ++j) sum += q_statistic(votes[i], votes[j]);
    return 2.0 * sum / (static_cast<double>(c) * (c - 1));
}

double q_average(const Committee& committee, const LabeledSet& eval) {
    if (eval.count() == 0) throw ContractViolation("q_average: empty evaluation set");
    std::vector<std::vector<std::int8_t>> votes(static_cast<std::size_t>(committee.size()));
    for (int c = 0; c < committee.size(); ++c) {
        votes[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(eval.count()));
        for (int j = 0; j < eval.count(); ++j) {
            const double s = committee.members[static_cast<std::size_t>(c)].score(
                std::span<const float>(eval.feature(j), static_cast<std::size_t>(eval.dim)));
            votes[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] =
                static_cast<std::int8_t>(sign_of(s));
        }
    }
    return q_average_from_votes(votes);
}

}  // namespace dedt
