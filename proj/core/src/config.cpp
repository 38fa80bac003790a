#include "dedt/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dedt/errors.hpp"

namespace dedt {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw IngestionError("config: bad integer for '" + key + "': " + v);
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw IngestionError("config: bad number for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw IngestionError("config: bad unsigned integer for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw IngestionError("config: bad boolean for '" + key + "': " + v);
}

LocalizationRule localization_from_string(const std::string& v) {
    if (v == "confidence_sum") return LocalizationRule::ConfidenceSum;
    if (v == "sign_vote") return LocalizationRule::SignVote;
    throw IngestionError("config: unknown localization rule: " + v);
}

void apply_key(TrackerConfig& c, const std::string& key, const std::string& value) {
    if (key == "committee_size") c.committee_size = parse_int(value, key);
    else if (key == "knn_k") c.knn_k = parse_int(value, key);
    else if (key == "n_candidates") c.n_candidates = parse_int(value, key);
    else if (key == "bag_size") c.bag_size = parse_int(value, key);
    else if (key == "artificial_count") c.artificial_count = parse_int(value, key);
    else if (key == "tau_u") c.tau_u = parse_double(value, key);
    else if (key == "tau_l") c.tau_l = parse_double(value, key);
    else if (key == "aux_period") c.aux_period = parse_int(value, key);
    else if (key == "member_capacity") c.member_capacity = parse_int(value, key);
    else if (key == "max_retries") c.max_retries = parse_int(value, key);
    else if (key == "sigma_xy_factor") c.sigma_xy_factor = parse_double(value, key);
    else if (key == "sigma_s") c.sigma_s = parse_double(value, key);
    else if (key == "mode") {
        try {
            c.mode = mode_from_string(value);
        } catch (const ContractViolation& e) {
            throw IngestionError(std::string("config: ") + e.what());
        }
    }
    else if (key == "delta_override") c.delta_override = parse_double(value, key);
    else if (key == "seed") c.seed = parse_u64(value, key);
    else if (key == "threads") c.threads = parse_int(value, key);
    else if (key == "patch_size") c.patch_size = parse_int(value, key);
    else if (key == "cell_size") c.cell_size = parse_int(value, key);
    else if (key == "localization") c.localization = localization_from_string(value);
    else if (key == "init_pos_iou") c.init_pos_iou = parse_double(value, key);
    else if (key == "init_neg_iou") c.init_neg_iou = parse_double(value, key);
    else if (key == "verify_acceptance") c.verify_acceptance = parse_bool(value, key);
    else throw IngestionError("config: unknown key '" + key + "'");
}

}  // namespace

TrackerConfig parse_config(const std::string& text, TrackerConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IngestionError("config: missing '=' on line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw IngestionError("config: empty key on line " + std::to_string(lineno));
        apply_key(base, key, value);
    }
    return base;
}

TrackerConfig load_config(const std::filesystem::path& file, TrackerConfig base) {
    std::ifstream in(file);
    if (!in) throw IngestionError("cannot open config file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

const char* to_string(LocalizationRule rule) {
    return rule == LocalizationRule::ConfidenceSum ? "confidence_sum" : "sign_vote";
}

std::string config_text(const TrackerConfig& c) {
    std::ostringstream out;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "committee_size=" << c.committee_size << '\n'
        << "knn_k=" << c.knn_k << '\n'
        << "n_candidates=" << c.n_candidates << '\n'
        << "bag_size=" << c.bag_size << '\n'
        << "artificial_count=" << c.artificial_count << '\n'
        << "tau_u=" << num(c.tau_u) << '\n'
        << "tau_l=" << num(c.tau_l) << '\n'
        << "aux_period=" << c.aux_period << '\n'
        << "member_capacity=" << c.member_capacity << '\n'
        << "max_retries=" << c.max_retries << '\n'
        << "sigma_xy_factor=" << num(c.sigma_xy_factor) << '\n'
        << "sigma_s=" << num(c.sigma_s) << '\n'
        << "mode=" << to_string(c.mode) << '\n'
        << "delta_override=" << num(c.delta_override) << '\n'
        << "seed=" << c.seed << '\n'
        << "threads=" << c.threads << '\n'
        << "patch_size=" << c.patch_size << '\n'
        << "cell_size=" << c.cell_size << '\n'
        << "localization=" << to_string(c.localization) << '\n'
        << "init_pos_iou=" << num(c.init_pos_iou) << '\n'
        << "init_neg_iou=" << num(c.init_neg_iou) << '\n'
        << "verify_acceptance=" << (c.verify_acceptance ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace dedt
