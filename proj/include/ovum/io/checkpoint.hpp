#pragma once

#include "ovum/autoencoder.hpp"
#include "ovum/errors.hpp"
#include "ovum/sequence_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>

namespace ovum::io {

class CheckpointVersionError : public IoError {
public:
    using IoError::IoError;
};

class CheckpointShapeError : public IoError {
public:
    using IoError::IoError;
};

class CheckpointTruncationError : public IoError {
public:
    using IoError::IoError;
};

enum class ModelKind : std::uint8_t { Autoencoder = 0, GradeModel = 1, BinaryModel = 2 };

std::string model_kind_name(ModelKind kind);

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::uint32_t epochs = 0;
    double final_loss = 0.0;
};

/// In-memory form of the on-disk checkpoint: a versioned self-describing
/// header (kind, architecture, named tensor shapes) followed by all tensor
/// payloads as little-endian 32-bit floats. Model parameters live on the
/// binary32 grid, so the round trip is bit-exact.
struct Checkpoint {
    ModelKind kind = ModelKind::Autoencoder;
    CheckpointMeta meta;

    EncoderSpec encoder_spec;  // autoencoder checkpoints
    std::size_t input_dim = 0; // sequence checkpoints
    std::size_t hidden_dim = 0;

    std::map<std::string, Tensor> tensors;
};

Checkpoint make_checkpoint(const Autoencoder& model, const CheckpointMeta& meta);
Checkpoint make_checkpoint(const SequenceModel& model, const CheckpointMeta& meta);

Autoencoder autoencoder_from_checkpoint(const Checkpoint& ckpt);
SequenceModel sequence_model_from_checkpoint(const Checkpoint& ckpt);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace ovum::io
