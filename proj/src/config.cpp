#include "voxsel/config.hpp"

#include <cctype>
#include <chrono>
#include <climits>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace voxsel {

const char* const kToolVersion = "1.0.0";

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

class KeyValues {
  public:
    explicit KeyValues(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty key or value");
            if (values_.count(key))
                throw ConfigError("config: duplicate key '" + key + "'");
            values_[key] = value;
        }
    }

    std::optional<std::string> get(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        seen_.insert(key);
        return it->second;
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError("config: missing required key '" + key + "'");
        return *v;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : values_)
            if (!seen_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    }

  private:
    std::map<std::string, std::string> values_;
    std::set<std::string> seen_;
};

long parse_int(const std::string& key, const std::string& value, long lo, long hi) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        if (v < lo || v > hi)
            throw ConfigError("config: '" + key + "' must be in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' must be an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' must be a number, got '" + value + "'");
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    KeyValues kv(text);
    RunConfig cfg;
    cfg.raw_text = text;

    cfg.dataset_path = kv.require("dataset");
    if (auto v = kv.get("id_column")) cfg.id_column = *v;
    if (auto v = kv.get("label_column")) cfg.label_column = *v;
    if (auto v = kv.get("group_override")) cfg.group_override = *v;

    auto& spec = cfg.spec;
    try {
        spec.method = selection_method_from_string(kv.require("method"));
        if (auto v = kv.get("algorithm"))
            spec.train.algorithm = train_algorithm_from_string(*v);
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (auto v = kv.get("top")) spec.top = static_cast<int>(parse_int("top", *v, 1, 1000000));
    if (auto v = kv.get("hidden_units"))
        spec.train.hidden_units = static_cast<int>(parse_int("hidden_units", *v, 1, 100000));
    if (auto v = kv.get("max_epochs"))
        spec.train.max_epochs = static_cast<int>(parse_int("max_epochs", *v, 1, 100000000));
    if (auto v = kv.get("goal_mse")) spec.train.goal_mse = parse_real("goal_mse", *v);
    if (auto v = kv.get("min_gradient")) spec.train.min_gradient = parse_real("min_gradient", *v);
    if (auto v = kv.get("learning_rate"))
        spec.train.learning_rate = parse_real("learning_rate", *v);
    if (auto v = kv.get("momentum")) spec.train.momentum = parse_real("momentum", *v);
    if (auto v = kv.get("reps_stage1"))
        spec.repetitions = static_cast<int>(parse_int("reps_stage1", *v, 1, 1000000));
    if (auto v = kv.get("reps_stage2"))
        cfg.reps_stage2 = static_cast<int>(parse_int("reps_stage2", *v, 1, 1000000));
    if (auto v = kv.get("train_fraction")) {
        spec.train_fraction = parse_real("train_fraction", *v);
        if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
            throw ConfigError("config: 'train_fraction' must be in (0, 1)");
    }
    if (auto v = kv.get("seed"))
        spec.master_seed = static_cast<std::uint64_t>(parse_int("seed", *v, 0, LONG_MAX));
    if (auto v = kv.get("config_id")) spec.config_id = *v;

    auto& mp = spec.method_params;
    if (auto v = kv.get("bins")) mp.bins = static_cast<int>(parse_int("bins", *v, 2, 10000));
    if (auto v = kv.get("relieff_k"))
        mp.relieff_k = static_cast<int>(parse_int("relieff_k", *v, 1, 1000000));
    if (auto v = kv.get("relieff_m"))
        mp.relieff_m = static_cast<int>(parse_int("relieff_m", *v, -1, 1000000));
    if (auto v = kv.get("nca_sigma")) mp.nca.sigma = parse_real("nca_sigma", *v);
    if (auto v = kv.get("nca_lambda")) mp.nca.lambda = parse_real("nca_lambda", *v);
    if (auto v = kv.get("nca_max_iters"))
        mp.nca.max_iters = static_cast<int>(parse_int("nca_max_iters", *v, 1, 1000000));
    if (auto v = kv.get("cfs_max_stale"))
        mp.cfs_max_stale = static_cast<int>(parse_int("cfs_max_stale", *v, 1, 1000000));
    if (auto v = kv.get("sfs_cap"))
        mp.sfs.cap = static_cast<int>(parse_int("sfs_cap", *v, 1, 50));

    if (auto v = kv.get("union_lower"))
        cfg.union_lower = static_cast<std::size_t>(parse_int("union_lower", *v, 1, 1000000));
    if (auto v = kv.get("union_upper"))
        cfg.union_upper = static_cast<std::size_t>(parse_int("union_upper", *v, 1, 1000000));
    if (cfg.union_lower > cfg.union_upper)
        throw ConfigError("config: union_lower must not exceed union_upper");

    kv.reject_unknown();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_run_config(os.str());
}

std::string config_digest(const std::string& bytes) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a64(bytes);
    return os.str();
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["config_digest"] = m.config_digest;
    j["tool_version"] = m.tool_version;
    j["master_seed"] = m.master_seed;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["outputs"] = m.outputs;
    return j.dump(2);
}

}  // namespace voxsel
