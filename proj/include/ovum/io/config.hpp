#pragma once

#include "ovum/sequence_model.hpp"
#include "ovum/synthetic.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace ovum::io {

/// Flat `key = value` text file; '#' starts a comment, blank lines ignored.
struct KeyValueConfig {
    std::map<std::string, std::string> entries;

    static KeyValueConfig parse_file(const std::filesystem::path& path);
    static KeyValueConfig parse_text(const std::string& text);

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
};

/// Everything one experiment run needs besides the seed.
struct ExperimentConfig {
    SyntheticConfig synth;

    std::size_t embedding_dim = 32;
    std::size_t ae_epochs = 10;
    std::size_t ae_batch_size = 16;
    double ae_lr = 1e-3;
    std::size_t ae_frame_limit = 4000; // 0 = train on every unlabeled frame
    std::string encoder_preset = "desk"; // desk | full

    std::size_t hidden_dim = 64;
    std::size_t grade_epochs = 12;
    std::size_t grade_batch_size = 8;
    double grade_lr = 3e-3;

    std::size_t binary_epochs = 12;
    std::size_t binary_batch_size = 8;
    double binary_lr = 3e-3;
    TransferPolicy transfer_policy = TransferPolicy::FullFinetune;
    double trunk_lr_scale = 0.1;

    std::size_t k_folds = 10;
    std::size_t bootstrap_repetitions = 1000;

    /// Builds from parsed entries; unknown keys are an error.
    static ExperimentConfig from_entries(const KeyValueConfig& kv);

    /// Canonical key -> value rendering (used for the report and fingerprint).
    std::map<std::string, std::string> to_entries() const;

    EncoderSpec encoder_spec() const;
};

/// FNV-1a 64 hex digest over the canonical config entries plus the seed.
std::string config_fingerprint(const ExperimentConfig& cfg, std::uint64_t seed);

} // namespace ovum::io
