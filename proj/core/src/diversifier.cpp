#include "dedt/diversifier.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "dedt/errors.hpp"
#include "dedt/parallel.hpp"

namespace dedt {

namespace {

EmpiricalModel fit_from_flat(const float* data, int count, int dim) {
    if (count < 2) throw ContractViolation("fit_empirical: need at least 2 feature vectors");
    EmpiricalModel m;
    m.mean.assign(static_cast<std::size_t>(dim), 0.0);
    m.std.assign(static_cast<std::size_t>(dim), 0.0);
    for (int i = 0; i < count; ++i) {
        const float* f = data + static_cast<std::size_t>(i) * dim;
        for (int d = 0; d < dim; ++d) m.mean[static_cast<std::size_t>(d)] += f[d];
    }
    for (double& v : m.mean) v /= count;
    for (int i = 0; i < count; ++i) {
        const float* f = data + static_cast<std::size_t>(i) * dim;
        for (int d = 0; d < dim; ++d) {
            const double diff = f[d] - m.mean[static_cast<std::size_t>(d)];
            m.std[static_cast<std::size_t>(d)] += diff * diff;
        }
    }
    for (double& v : m.std) v = std::max(std::sqrt(v / count), 1e-8);  // population std, floored
    return m;
}

}  // namespace

EmpiricalModel fit_empirical(const std::vector<FeatureVector>& features) {
    if (features.size() < 2) throw ContractViolation("fit_empirical: need at least 2 feature vectors");
    const int dim = static_cast<int>(features[0].size());
    LabeledSet tmp;
    tmp.dim = dim;
    for (const FeatureVector& f : features) tmp.add(std::span<const double>(f.data(), f.size()), 1);
    return fit_from_flat(tmp.features.data(), tmp.count(), dim);
}

EmpiricalModel fit_empirical(const LabeledSet& features) {
    return fit_from_flat(features.features.data(), features.count(), features.dim);
}

void draw_artificial_into(const EmpiricalModel& model, int m_prime, Rng& rng,
                          std::vector<float>& out) {
    if (m_prime < 1) throw ContractViolation("draw_artificial: m_prime must be >= 1");
    const int dim = static_cast<int>(model.mean.size());
    out.resize(static_cast<std::size_t>(m_prime) * dim);
    for (int i = 0; i < m_prime; ++i) {
        float* row = out.data() + static_cast<std::size_t>(i) * dim;
        for (int d = 0; d < dim; ++d) {
            const double v = rng.gaussian(model.mean[static_cast<std::size_t>(d)],
                                          model.std[static_cast<std::size_t>(d)]);
            row[d] = static_cast<float>(std::max(v, 0.0));
        }
    }
}

std::vector<FeatureVector> draw_artificial(const EmpiricalModel& model, int m_prime, Rng& rng) {
    std::vector<float> flat;
    draw_artificial_into(model, m_prime, rng, flat);
    const int dim = static_cast<int>(model.mean.size());
    std::vector<FeatureVector> out(static_cast<std::size_t>(m_prime));
    for (int i = 0; i < m_prime; ++i) {
        out[static_cast<std::size_t>(i)].assign(flat.begin() + static_cast<std::ptrdiff_t>(i) * dim,
                                                flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim);
    }
    return out;
}

double anti_probability_positive(double share, int committee_size) {
    const double eps = 1.0 / (2.0 * committee_size);
    const double p_pos = std::clamp((1.0 + share) / 2.0, eps, 1.0 - eps);
    // Two-class inverse-probability selection reduces to picking the opposite
    // class with the ensemble's own confidence: (1/p+)/((1/p+)+(1/p-)) = p-.
    return 1.0 - p_pos;
}

std::int8_t diverse_label_from_share(double share, int committee_size, Rng& rng) {
    return rng.uniform() < anti_probability_positive(share, committee_size) ? std::int8_t{1}
                                                                            : std::int8_t{-1};
}

std::vector<std::int8_t> diverse_labels(const Committee& temp_committee,
                                        const std::vector<FeatureVector>& artificial, Rng& rng) {
    std::vector<std::int8_t> labels;
    labels.reserve(artificial.size());
    for (const FeatureVector& f : artificial) {
        const double share = ensemble_score(temp_committee, f);
        labels.push_back(diverse_label_from_share(share, temp_committee.size(), rng));
    }
    return labels;
}

double prediction_error(const Committee& committee, const LabeledSet& reference) {
    if (reference.count() == 0) throw ContractViolation("prediction_error: empty reference set");
    long mismatches = 0;
    for (const CommitteeMember& m : committee.members) {
        for (int j = 0; j < reference.count(); ++j) {
            const double s = m.score(
                std::span<const float>(reference.feature(j), static_cast<std::size_t>(reference.dim)));
            if (sign_of(s) != reference.labels[static_cast<std::size_t>(j)]) ++mismatches;
        }
    }
    return static_cast<double>(mismatches) /
           (static_cast<double>(committee.size()) * reference.count());
}

namespace {

// Member error count against the reference labels, from precomputed scores.
long count_mismatches(std::span<const double> scores, const LabeledSet& reference) {
    long n = 0;
    for (int j = 0; j < reference.count(); ++j)
        if (sign_of(scores[static_cast<std::size_t>(j)]) != reference.labels[static_cast<std::size_t>(j)])
            ++n;
    return n;
}

// Uniform subset of `take` distinct indices out of [0, n), by partial
// Fisher-Yates over an index array.
std::vector<int> uniform_subset(int n, int take, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < take; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(take));
    return idx;
}

}  // namespace

void diversify_in_place(Committee& committee, const LabeledSet& uncertain, const LabeledSet& all,
                        const DiversifyParams& params, const Rng& rng, DiversifyDiagnostics* diag,
                        FrameScorer* scorer) {
    const int c_count = committee.size();
    const int n_ref = all.count();
    if (n_ref == 0) throw ContractViolation("diversify_update: empty sample set");

    DiversifyDiagnostics local;
    DiversifyDiagnostics& d = diag ? *diag : local;
    d.members.assign(static_cast<std::size_t>(c_count), MemberTrialRecord{});
    d.uncertain_ratio = static_cast<double>(uncertain.count()) / n_ref;

    if (!params.skip_bag && uncertain.count() == 0) {
        // Nothing disputed: no bag, no diversification.
        d.eps_baseline = 0.0;
        return;
    }

    std::unique_ptr<FrameScorer> own_scorer;
    if (!scorer) {
        own_scorer = std::make_unique<FrameScorer>(all, c_count);
        scorer = own_scorer.get();
    }

    // Baseline: mismatch-count error of the incoming committee on D_t.
    std::vector<long> base_errors(static_cast<std::size_t>(c_count), 0);
    std::vector<double> scores(static_cast<std::size_t>(n_ref));
    for (int c = 0; c < c_count; ++c) {
        scorer->member_scores(committee.members[static_cast<std::size_t>(c)], c,
                              std::span<double>(scores));
        base_errors[static_cast<std::size_t>(c)] = count_mismatches(scores, all);
    }
    const double denom = static_cast<double>(c_count) * n_ref;
    const double eps_baseline =
        static_cast<double>(std::accumulate(base_errors.begin(), base_errors.end(), 0L)) / denom;
    d.eps_baseline = eps_baseline;
    for (auto& rec : d.members) rec.eps_baseline = eps_baseline;

    // Step 1: bag each member with a uniform subset of the uncertain samples.
    if (!params.skip_bag) {
        const int take = std::min(params.bag_size, uncertain.count());
        if (take > 0) {
            for (int c = 0; c < c_count; ++c) {
                Rng bag_rng = rng.derive(500 + static_cast<std::uint64_t>(c));
                const std::vector<int> pick = uniform_subset(uncertain.count(), take, bag_rng);
                LabeledSet bag;
                bag.dim = uncertain.dim;
                for (int i : pick) bag.add(uncertain.feature(i), uncertain.labels[static_cast<std::size_t>(i)]);
                committee.members[static_cast<std::size_t>(c)].append(bag, params.insert_time);
            }
        }
    }
    if (params.bag_only) return;

    // Step 2: errors of the temporary (bagged) committee, reused by every trial.
    std::vector<long> temp_errors(static_cast<std::size_t>(c_count), 0);
    for (int c = 0; c < c_count; ++c) {
        scorer->member_scores(committee.members[static_cast<std::size_t>(c)], c,
                              std::span<double>(scores));
        temp_errors[static_cast<std::size_t>(c)] = count_mismatches(scores, all);
    }
    const long temp_error_sum = std::accumulate(temp_errors.begin(), temp_errors.end(), 0L);

    // Step 3: empirical feature distribution of D_t.
    const EmpiricalModel empirical = fit_empirical(all);

    // Steps 4-5 per member. Members only read the temporary committee, so the
    // accepted sets are collected first and applied afterwards; acceptance
    // decisions are order-independent by construction.
    struct Accepted {
        std::vector<float> feats;
        std::vector<std::int8_t> labels;
    };
    std::vector<Accepted> accepted(static_cast<std::size_t>(c_count));

    parallel_for(c_count, params.threads, [&](int c) {
        Rng member_rng = rng.derive(1000 + static_cast<std::uint64_t>(c));
        MemberTrialRecord& rec = d.members[static_cast<std::size_t>(c)];
        std::vector<float> art;
        std::vector<std::int8_t> labels(static_cast<std::size_t>(params.artificial_count));
        std::vector<double> art_scores(static_cast<std::size_t>(params.artificial_count));
        std::vector<double> member_scores_buf(static_cast<std::size_t>(n_ref));
        for (int attempt = 1; attempt <= params.max_retries; ++attempt) {
            rec.attempts = attempt;
            draw_artificial_into(empirical, params.artificial_count, member_rng, art);

            // Vote share of the temporary ensemble on each artificial sample.
            FrameScorer art_scorer(art.data(), params.artificial_count, all.dim, c_count);
            std::vector<int> vote_sum(static_cast<std::size_t>(params.artificial_count), 0);
            for (int cc = 0; cc < c_count; ++cc) {
                art_scorer.member_scores(committee.members[static_cast<std::size_t>(cc)], cc,
                                         std::span<double>(art_scores));
                for (int j = 0; j < params.artificial_count; ++j)
                    vote_sum[static_cast<std::size_t>(j)] += sign_of(art_scores[static_cast<std::size_t>(j)]);
            }
            for (int j = 0; j < params.artificial_count; ++j) {
                const double share = static_cast<double>(vote_sum[static_cast<std::size_t>(j)]) / c_count;
                labels[static_cast<std::size_t>(j)] = diverse_label_from_share(share, c_count, member_rng);
            }

            // Trial: this member with the diversity set appended.
            scorer->trial_scores(committee.members[static_cast<std::size_t>(c)], c, art.data(),
                                 labels.data(), params.artificial_count,
                                 std::span<double>(member_scores_buf));
            const long trial_errors = count_mismatches(member_scores_buf, all);
            const double eps_trial =
                static_cast<double>(temp_error_sum - temp_errors[static_cast<std::size_t>(c)] +
                                    trial_errors) /
                denom;
            if (eps_trial < eps_baseline) {
                rec.accepted = true;
                rec.eps_trial = eps_trial;
                accepted[static_cast<std::size_t>(c)].feats = art;
                accepted[static_cast<std::size_t>(c)].labels = labels;
                break;
            }
        }
    });

    // Independent acceptance check via the brute-force error path.
    if (params.verify_acceptance) {
        for (int c = 0; c < c_count; ++c) {
            MemberTrialRecord& rec = d.members[static_cast<std::size_t>(c)];
            if (!rec.accepted) continue;
            Committee check = committee;
            check.members[static_cast<std::size_t>(c)].append(
                accepted[static_cast<std::size_t>(c)].feats.data(),
                accepted[static_cast<std::size_t>(c)].labels.data(), params.artificial_count,
                params.insert_time);
            rec.eps_trial_check = prediction_error(check, all);
        }
    }

    for (int c = 0; c < c_count; ++c) {
        if (!d.members[static_cast<std::size_t>(c)].accepted) continue;
        committee.members[static_cast<std::size_t>(c)].append(
            accepted[static_cast<std::size_t>(c)].feats.data(),
            accepted[static_cast<std::size_t>(c)].labels.data(), params.artificial_count,
            params.insert_time);
    }
}

Committee diversify_update(Committee committee, const LabeledSet& uncertain, const LabeledSet& all,
                           const DiversifyParams& params, const Rng& rng,
                           DiversifyDiagnostics* diag) {
    diversify_in_place(committee, uncertain, all, params, rng, diag, nullptr);
    return committee;
}

}  // namespace dedt
