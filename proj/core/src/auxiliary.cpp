#include "dedt/auxiliary.hpp"

#include <cstring>

#include "dedt/errors.hpp"

namespace dedt {

AuxiliaryModel::AuxiliaryModel(int dim) : dim_(dim), weights_(static_cast<std::size_t>(dim) + 1, 0.0) {
    if (dim < 1) throw ContractViolation("AuxiliaryModel: dim must be >= 1");
    window_.dim = dim;
}

void AuxiliaryModel::set_weights(std::vector<double> w, int last_trained) {
    if (static_cast<int>(w.size()) != dim_ + 1)
        throw ContractViolation("AuxiliaryModel: weight vector length mismatch");
    weights_ = std::move(w);
    last_trained_ = last_trained;
    trained_ = true;
}

double AuxiliaryModel::margin(std::span<const float> f) const {
    if (static_cast<int>(f.size()) != dim_)
        throw ContractViolation("AuxiliaryModel: feature dimension mismatch");
    double acc = weights_[static_cast<std::size_t>(dim_)];  // bias
    for (int d = 0; d < dim_; ++d) acc += weights_[static_cast<std::size_t>(d)] * f[d];
    return acc;
}

double AuxiliaryModel::margin(const FeatureVector& f) const {
    if (static_cast<int>(f.size()) != dim_)
        throw ContractViolation("AuxiliaryModel: feature dimension mismatch");
    double acc = weights_[static_cast<std::size_t>(dim_)];
    for (int d = 0; d < dim_; ++d) acc += weights_[static_cast<std::size_t>(d)] * f[d];
    return acc;
}

int AuxiliaryModel::label(std::span<const float> f) const {
    if (!trained_) throw UninitializedAuxiliary("auxiliary classifier queried before first training");
    return sign_of(margin(f));
}

int AuxiliaryModel::label(const FeatureVector& f) const {
    if (!trained_) throw UninitializedAuxiliary("auxiliary classifier queried before first training");
    return sign_of(margin(f));
}

void AuxiliaryModel::buffer_frame(const LabeledSet& samples, int frame_index) {
    if (samples.dim != dim_) throw ContractViolation("AuxiliaryModel: window dimension mismatch");
    if (frame_index <= last_trained_)
        throw ContractViolation("AuxiliaryModel: window frame precedes last training");
    window_.features.insert(window_.features.end(), samples.features.begin(), samples.features.end());
    window_.labels.insert(window_.labels.end(), samples.labels.begin(), samples.labels.end());
}

bool AuxiliaryModel::batch_update(int frame_index, const AuxTrainParams& params) {
    const bool ok = train(window_, frame_index, params);
    if (ok) {
        window_.features.clear();
        window_.labels.clear();
    }
    return ok;
}

bool AuxiliaryModel::train(const LabeledSet& window, int frame_index, const AuxTrainParams& params) {
    if (window.count() == 0) throw ContractViolation("AuxiliaryModel: empty training window");
    bool has_pos = false, has_neg = false;
    for (std::int8_t l : window.labels) (l > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) return false;  // single-class window: keep previous weights

    std::vector<double> w(static_cast<std::size_t>(dim_) + 1, 0.0);
    double& bias = w[static_cast<std::size_t>(dim_)];
    long iter = 1;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (int i = 0; i < window.count(); ++i, ++iter) {
            const double eta = 1.0 / (params.lambda * static_cast<double>(iter));
            const float* x = window.feature(i);
            const double y = window.labels[static_cast<std::size_t>(i)];
            double m = bias;
            for (int d = 0; d < dim_; ++d) m += w[static_cast<std::size_t>(d)] * x[d];
            m *= y;
            // The bias rides along as a constant-1 feature and is regularized
            // with the rest; an unregularized bias never recovers from the
            // large early steps of the 1/(lambda*iter) schedule.
            const double shrink = 1.0 - eta * params.lambda;
            for (double& v : w) v *= shrink;
            if (m < 1.0) {
                const double step = eta * y;
                for (int d = 0; d < dim_; ++d) w[static_cast<std::size_t>(d)] += step * x[d];
                bias += step;
            }
        }
    }
    weights_ = std::move(w);
    trained_ = true;
    last_trained_ = frame_index;
    return true;
}

std::uint64_t AuxiliaryModel::hash() const {
    // FNV-1a over the weight bytes and the training stamp.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(weights_.data(), weights_.size() * sizeof(double));
    mix(&last_trained_, sizeof(last_trained_));
    return h;
}

int aux_label(const AuxiliaryModel& model, const FeatureVector& f) { return model.label(f); }

}  // namespace dedt
