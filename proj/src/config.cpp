#include "ovum/io/config.hpp"

#include "ovum/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ovum::io {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

/// Shortest round-trip decimal rendering (what the JSON dump produces).
std::string format_number(double value) { return nlohmann::json(value).dump(); }

std::string format_number(std::size_t value) { return std::to_string(value); }

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "n_unlabeled", "n_graded", "n_kid", "frames_per_video", "frame_size",
        "signal_strength", "rater_noise_std", "target_prevalence",
        "embedding_dim", "ae_epochs", "ae_batch_size", "ae_lr", "ae_frame_limit",
        "encoder_preset",
        "hidden_dim", "grade_epochs", "grade_batch_size", "grade_lr",
        "binary_epochs", "binary_batch_size", "binary_lr",
        "transfer_policy", "trunk_lr_scale",
        "k_folds", "bootstrap_repetitions",
    };
    return keys;
}

} // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
    KeyValueConfig kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        kv.entries[key] = value;
    }
    return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + it->second +
                          "' as a number");
    }
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size() || v < 0) throw std::invalid_argument("bad count");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + it->second +
                          "' as a nonnegative integer");
    }
}

ExperimentConfig ExperimentConfig::from_entries(const KeyValueConfig& kv) {
    for (const auto& [key, _] : kv.entries) {
        if (!known_keys().count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    ExperimentConfig cfg;
    cfg.synth.n_unlabeled = kv.get_size("n_unlabeled", cfg.synth.n_unlabeled);
    cfg.synth.n_graded = kv.get_size("n_graded", cfg.synth.n_graded);
    cfg.synth.n_kid = kv.get_size("n_kid", cfg.synth.n_kid);
    cfg.synth.frames_per_video = kv.get_size("frames_per_video", cfg.synth.frames_per_video);
    cfg.synth.frame_size = kv.get_size("frame_size", cfg.synth.frame_size);
    cfg.synth.signal_strength = kv.get_double("signal_strength", cfg.synth.signal_strength);
    cfg.synth.rater_noise_std = kv.get_double("rater_noise_std", cfg.synth.rater_noise_std);
    cfg.synth.target_prevalence =
        kv.get_double("target_prevalence", cfg.synth.target_prevalence);

    cfg.embedding_dim = kv.get_size("embedding_dim", cfg.embedding_dim);
    cfg.ae_epochs = kv.get_size("ae_epochs", cfg.ae_epochs);
    cfg.ae_batch_size = kv.get_size("ae_batch_size", cfg.ae_batch_size);
    cfg.ae_lr = kv.get_double("ae_lr", cfg.ae_lr);
    cfg.ae_frame_limit = kv.get_size("ae_frame_limit", cfg.ae_frame_limit);
    cfg.encoder_preset = kv.get_string("encoder_preset", "desk");
    if (cfg.encoder_preset != "desk" && cfg.encoder_preset != "full") {
        throw ConfigError("encoder_preset must be 'desk' or 'full', got '" +
                          cfg.encoder_preset + "'");
    }

    cfg.hidden_dim = kv.get_size("hidden_dim", cfg.hidden_dim);
    cfg.grade_epochs = kv.get_size("grade_epochs", cfg.grade_epochs);
    cfg.grade_batch_size = kv.get_size("grade_batch_size", cfg.grade_batch_size);
    cfg.grade_lr = kv.get_double("grade_lr", cfg.grade_lr);

    cfg.binary_epochs = kv.get_size("binary_epochs", cfg.binary_epochs);
    cfg.binary_batch_size = kv.get_size("binary_batch_size", cfg.binary_batch_size);
    cfg.binary_lr = kv.get_double("binary_lr", cfg.binary_lr);
    cfg.transfer_policy =
        transfer_policy_from_name(kv.get_string("transfer_policy", "full-finetune"));
    cfg.trunk_lr_scale = kv.get_double("trunk_lr_scale", cfg.trunk_lr_scale);

    cfg.k_folds = kv.get_size("k_folds", cfg.k_folds);
    cfg.bootstrap_repetitions =
        kv.get_size("bootstrap_repetitions", cfg.bootstrap_repetitions);

    if (cfg.k_folds < 2) throw ConfigError("k_folds must be >= 2");
    if (cfg.bootstrap_repetitions == 0) throw ConfigError("bootstrap_repetitions must be >= 1");
    validate_config(cfg.synth);
    return cfg;
}

std::map<std::string, std::string> ExperimentConfig::to_entries() const {
    std::map<std::string, std::string> e;
    e["n_unlabeled"] = format_number(synth.n_unlabeled);
    e["n_graded"] = format_number(synth.n_graded);
    e["n_kid"] = format_number(synth.n_kid);
    e["frames_per_video"] = format_number(synth.frames_per_video);
    e["frame_size"] = format_number(synth.frame_size);
    e["signal_strength"] = format_number(synth.signal_strength);
    e["rater_noise_std"] = format_number(synth.rater_noise_std);
    e["target_prevalence"] = format_number(synth.target_prevalence);
    e["embedding_dim"] = format_number(embedding_dim);
    e["ae_epochs"] = format_number(ae_epochs);
    e["ae_batch_size"] = format_number(ae_batch_size);
    e["ae_lr"] = format_number(ae_lr);
    e["ae_frame_limit"] = format_number(ae_frame_limit);
    e["encoder_preset"] = encoder_preset;
    e["hidden_dim"] = format_number(hidden_dim);
    e["grade_epochs"] = format_number(grade_epochs);
    e["grade_batch_size"] = format_number(grade_batch_size);
    e["grade_lr"] = format_number(grade_lr);
    e["binary_epochs"] = format_number(binary_epochs);
    e["binary_batch_size"] = format_number(binary_batch_size);
    e["binary_lr"] = format_number(binary_lr);
    e["transfer_policy"] = transfer_policy_name(transfer_policy);
    e["trunk_lr_scale"] = format_number(trunk_lr_scale);
    e["k_folds"] = format_number(k_folds);
    e["bootstrap_repetitions"] = format_number(bootstrap_repetitions);
    return e;
}

EncoderSpec ExperimentConfig::encoder_spec() const {
    if (encoder_preset == "full") {
        if (synth.frame_size != 256 || embedding_dim != 968) {
            throw ConfigError("encoder_preset=full requires frame_size=256 and "
                              "embedding_dim=968");
        }
        return full_scale_encoder_spec();
    }
    EncoderSpec spec;
    spec.frame_size = synth.frame_size;
    spec.embedding_dim = embedding_dim;
    spec.layers = {
        LayerDesc::conv(8, 3, 2, 1),
        LayerDesc::conv(16, 3, 2, 1),
        LayerDesc::conv(32, 3, 2, 1),
        LayerDesc::flatten(),
        LayerDesc::dense(embedding_dim),
    };
    return spec;
}

std::string config_fingerprint(const ExperimentConfig& cfg, std::uint64_t seed) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    const auto feed = [&hash](const std::string& s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 0x00000100000001b3ULL;
        }
    };
    for (const auto& [key, value] : cfg.to_entries()) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    feed("seed=" + std::to_string(seed) + "\n");

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

} // namespace ovum::io
