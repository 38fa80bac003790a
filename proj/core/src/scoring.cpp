#include "dedt/scoring.hpp"

#include <cblas.h>

#include <algorithm>
#include <mutex>

#include "dedt/errors.hpp"

extern "C" void openblas_set_num_threads(int);

namespace dedt {
namespace {

void pin_blas_threads() {
    // BLAS parallelism is kept off; the tracker parallelizes over members and
    // candidates itself, which keeps results independent of the worker count.
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
}

}  // namespace

FrameScorer::FrameScorer(const float* queries, int count, int dim, int max_members)
    : n_(count), dim_(dim) {
    pin_blas_threads();
    if (count < 1 || dim < 1) throw ContractViolation("FrameScorer: empty query set");
    q_.assign(queries, queries + static_cast<std::size_t>(count) * dim);
    qnorm_.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const float* q = q_.data() + static_cast<std::size_t>(i) * dim;
        float acc = 0.0f;
        for (int d = 0; d < dim; ++d) acc += q[d] * q[d];
        qnorm_[static_cast<std::size_t>(i)] = acc;
    }
    caches_.resize(static_cast<std::size_t>(max_members));
}

FrameScorer::FrameScorer(const LabeledSet& queries, int max_members)
    : FrameScorer(queries.features.data(), queries.count(), queries.dim, max_members) {}

FrameScorer::Block FrameScorer::compute_block(const float* feats, const float* norms,
                                              const std::int8_t* labels, int cols,
                                              std::int64_t id0) const {
    Block b;
    b.id0 = id0;
    b.cols = cols;
    b.labels.assign(labels, labels + cols);
    b.dist.resize(static_cast<std::size_t>(n_) * cols);
    cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasTrans, n_, cols, dim_, -2.0f, q_.data(), dim_,
                feats, dim_, 0.0f, b.dist.data(), cols);
    for (int i = 0; i < n_; ++i) {
        float* row = b.dist.data() + static_cast<std::size_t>(i) * cols;
        const float qn = qnorm_[static_cast<std::size_t>(i)];
        for (int j = 0; j < cols; ++j) row[j] = std::max(0.0f, row[j] + qn + norms[j]);
    }
    return b;
}

void FrameScorer::extend(const CommitteeMember& m, MemberCache& mc) {
    if (m.dim() != dim_) throw ContractViolation("FrameScorer: member dimension mismatch");
    if (mc.covered_end < 0) mc.covered_end = m.first_id();
    const std::int64_t from = std::max(mc.covered_end, m.first_id());
    const std::int64_t to = m.end_id();
    if (from >= to) {
        mc.covered_end = std::max(mc.covered_end, to);
        return;
    }
    const std::int64_t offset = from - m.first_id();
    const int cols = static_cast<int>(to - from);
    mc.blocks.push_back(compute_block(m.features_data() + offset * dim_, m.norms_data() + offset,
                                      m.labels_data() + offset, cols, from));
    mc.covered_end = to;
}

void FrameScorer::select(const MemberCache& mc, std::int64_t first_id, std::int64_t end_id,
                         const Block* extra, int k, std::span<double> out) const {
    thread_local std::vector<DistSegment> segs;
    for (int i = 0; i < n_; ++i) {
        segs.clear();
        for (const Block& b : mc.blocks) {
            const std::int64_t b_end = b.id0 + b.cols;
            const std::int64_t lo = std::max(b.id0, first_id);
            const std::int64_t hi = std::min(b_end, end_id);
            if (lo >= hi) continue;
            const std::int64_t off = lo - b.id0;
            segs.push_back(DistSegment{b.dist.data() + static_cast<std::size_t>(i) * b.cols + off,
                                       b.labels.data() + off, lo, static_cast<int>(hi - lo)});
        }
        if (extra && extra->cols > 0) {
            segs.push_back(DistSegment{extra->dist.data() + static_cast<std::size_t>(i) * extra->cols,
                                       extra->labels.data(), extra->id0, extra->cols});
        }
        out[static_cast<std::size_t>(i)] = knn_vote(segs, k);
    }
}

void FrameScorer::member_scores(const CommitteeMember& m, int member_index, std::span<double> out) {
    if (static_cast<int>(out.size()) != n_) throw ContractViolation("FrameScorer: output size mismatch");
    MemberCache& mc = caches_.at(static_cast<std::size_t>(member_index));
    extend(m, mc);
    if (!m.trained()) throw UntrainedMember("member has fewer than k exemplars");
    select(mc, m.first_id(), m.end_id(), nullptr, m.k(), out);
}

void FrameScorer::trial_scores(const CommitteeMember& m, int member_index, const float* extra_feats,
                               const std::int8_t* extra_labels, int n_extra, std::span<double> out) {
    if (static_cast<int>(out.size()) != n_) throw ContractViolation("FrameScorer: output size mismatch");
    MemberCache& mc = caches_.at(static_cast<std::size_t>(member_index));
    extend(m, mc);
    std::vector<float> extra_norms(static_cast<std::size_t>(n_extra));
    for (int j = 0; j < n_extra; ++j) {
        const float* f = extra_feats + static_cast<std::size_t>(j) * dim_;
        float acc = 0.0f;
        for (int d = 0; d < dim_; ++d) acc += f[d] * f[d];
        extra_norms[static_cast<std::size_t>(j)] = acc;
    }
    const Block extra =
        compute_block(extra_feats, extra_norms.data(), extra_labels, n_extra, m.end_id());
    // FIFO: appending n_extra may evict the oldest exemplars.
    const std::int64_t first =
        std::max(m.first_id(), m.end_id() + n_extra - static_cast<std::int64_t>(m.capacity()));
    select(mc, first, m.end_id(), &extra, m.k(), out);
}

}  // namespace dedt
