#ifndef DEDT_AUXILIARY_HPP
#define DEDT_AUXILIARY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dedt/committee.hpp"

namespace dedt {

struct AuxTrainParams {
    int epochs = 50;
    double lambda = 1e-3;
};

// Long-memory linear max-margin classifier. Labels disputed samples on demand
// and is batch-retrained from its buffered sample window every delta frames.
// Training is deterministic: hinge-loss subgradient descent from zero weights,
// fixed epoch count, step 1/(lambda * iter), samples visited in buffer order
// (frame, then in-frame index).
class AuxiliaryModel {
public:
    explicit AuxiliaryModel(int dim);

    bool trained() const { return trained_; }
    int last_trained() const { return last_trained_; }
    int dim() const { return dim_; }

    // weights, length dim + 1, bias last
    const std::vector<double>& weights() const { return weights_; }
    void set_weights(std::vector<double> w, int last_trained);

    double margin(std::span<const float> f) const;  // w.f + b
    double margin(const FeatureVector& f) const;

    // sign(w.f + b), sign(0) := +1. Throws if never trained.
    int label(std::span<const float> f) const;
    int label(const FeatureVector& f) const;

    // Buffers one frame's labeled samples for the next batch update.
    void buffer_frame(const LabeledSet& samples, int frame_index);

    int window_size() const { return window_.count(); }

    // Retrains on the buffered window and clears it. Returns false (keeping
    // the previous weights) when the window holds a single class; the caller
    // records that as a diagnostic.
    bool batch_update(int frame_index, const AuxTrainParams& params = {});

    // Trains directly on a labeled set (used at initialization and by tests).
    bool train(const LabeledSet& window, int frame_index, const AuxTrainParams& params = {});

    std::uint64_t hash() const;

private:
    int dim_;
    bool trained_ = false;
    int last_trained_ = 0;
    std::vector<double> weights_;
    LabeledSet window_;
};

// Spec-surface helpers.
int aux_label(const AuxiliaryModel& model, const FeatureVector& f);

}  // namespace dedt

#endif
