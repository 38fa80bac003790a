#include "dedt/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <type_traits>

#include "dedt/errors.hpp"

namespace dedt {
namespace {

constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& file) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw IngestionError("truncated snapshot: " + file.string());
    return v;
}

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& in, void* data, std::size_t n, const std::filesystem::path& file) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in) throw IngestionError("truncated snapshot: " + file.string());
}

}  // namespace

void save_snapshot(const Committee& committee, const AuxiliaryModel& aux,
                   const std::filesystem::path& file) {
    if (committee.members.empty()) throw ContractViolation("cannot snapshot an empty committee");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IngestionError("cannot write snapshot: " + file.string());

    out.write("DEDT", 4);
    put<std::uint16_t>(out, kVersion);
    const CommitteeMember& first = committee.members.front();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(committee.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(first.dim()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(first.k()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(first.capacity()));

    for (const CommitteeMember& m : committee.members) {
        put<std::int64_t>(out, m.first_id());
        put<std::uint32_t>(out, static_cast<std::uint32_t>(m.size()));
        put_bytes(out, m.times_data(), sizeof(std::int32_t) * m.size());
        put_bytes(out, m.labels_data(), sizeof(std::int8_t) * m.size());
        put_bytes(out, m.features_data(), sizeof(float) * static_cast<std::size_t>(m.size()) * m.dim());
    }

    out.write("AUX1", 4);
    put<std::uint8_t>(out, aux.trained() ? 1 : 0);
    put<std::int32_t>(out, aux.last_trained());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(aux.weights().size()));
    put_bytes(out, aux.weights().data(), sizeof(double) * aux.weights().size());

    if (!out) throw IngestionError("write failure on snapshot: " + file.string());
}

TrackerSnapshot load_snapshot(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IngestionError("cannot open snapshot: " + file.string());

    char magic[4];
    get_bytes(in, magic, 4, file);
    if (std::memcmp(magic, "DEDT", 4) != 0)
        throw IngestionError("bad snapshot magic: " + file.string());
    const auto version = get<std::uint16_t>(in, file);
    if (version != kVersion)
        throw IngestionError("unsupported snapshot version " + std::to_string(version) + ": " +
                             file.string());

    const auto members = get<std::uint32_t>(in, file);
    const auto dim = get<std::uint32_t>(in, file);
    const auto k = get<std::uint32_t>(in, file);
    const auto capacity = get<std::uint32_t>(in, file);
    if (members == 0 || dim == 0 || k == 0 || capacity < k)
        throw IngestionError("inconsistent snapshot header: " + file.string());

    TrackerSnapshot snap;
    snap.committee.members.reserve(members);
    for (std::uint32_t c = 0; c < members; ++c) {
        const auto first_id = get<std::int64_t>(in, file);
        const auto count = get<std::uint32_t>(in, file);
        if (count > capacity) throw IngestionError("member overflows capacity: " + file.string());
        std::vector<std::int32_t> times(count);
        std::vector<std::int8_t> labels(count);
        std::vector<float> feats(static_cast<std::size_t>(count) * dim);
        get_bytes(in, times.data(), sizeof(std::int32_t) * count, file);
        get_bytes(in, labels.data(), sizeof(std::int8_t) * count, file);
        get_bytes(in, feats.data(), sizeof(float) * feats.size(), file);

        CommitteeMember m(static_cast<int>(dim), static_cast<int>(k), static_cast<int>(capacity));
        // Exemplars within a member can carry distinct insert times, so append
        // one at a time.
        for (std::uint32_t i = 0; i < count; ++i)
            m.append(feats.data() + static_cast<std::size_t>(i) * dim, &labels[i], 1, times[i]);
        m.set_first_id(first_id);
        snap.committee.members.push_back(std::move(m));
    }

    char tag[4];
    get_bytes(in, tag, 4, file);
    if (std::memcmp(tag, "AUX1", 4) != 0)
        throw IngestionError("missing auxiliary section: " + file.string());
    const auto trained = get<std::uint8_t>(in, file);
    const auto last_trained = get<std::int32_t>(in, file);
    const auto n_weights = get<std::uint32_t>(in, file);
    if (n_weights != dim + 1)
        throw IngestionError("auxiliary weight count mismatch: " + file.string());
    std::vector<double> weights(n_weights);
    get_bytes(in, weights.data(), sizeof(double) * n_weights, file);

    snap.aux = AuxiliaryModel(static_cast<int>(dim));
    if (trained) snap.aux.set_weights(std::move(weights), last_trained);
    return snap;
}

}  // namespace dedt
