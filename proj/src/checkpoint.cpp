#include "ovum/io/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace ovum::io {

namespace {

constexpr char kMagic[4] = {'O', 'V', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    ByteReader(std::vector<std::uint8_t> bytes, std::string path)
        : bytes_(std::move(bytes)), path_(std::move(path)) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return static_cast<std::uint16_t>(gather(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(gather(4)); }
    std::uint64_t u64() { return gather(8); }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str(std::size_t n) {
        const std::uint8_t* p = take(n);
        return std::string(reinterpret_cast<const char*>(p), n);
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > bytes_.size()) {
            throw CheckpointTruncationError("checkpoint " + path_ + " truncated at byte " +
                                            std::to_string(pos_) + " (need " +
                                            std::to_string(n) + " more)");
        }
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::uint64_t gather(std::size_t n) {
        const std::uint8_t* p = take(n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }

    std::vector<std::uint8_t> bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

void write_spec(ByteWriter& w, const EncoderSpec& spec) {
    w.u32(static_cast<std::uint32_t>(spec.frame_size));
    w.u32(static_cast<std::uint32_t>(spec.embedding_dim));
    w.u32(static_cast<std::uint32_t>(spec.layers.size()));
    for (const LayerDesc& d : spec.layers) {
        w.u8(static_cast<std::uint8_t>(d.kind));
        w.u32(static_cast<std::uint32_t>(d.channels));
        w.u32(static_cast<std::uint32_t>(d.kernel));
        w.u32(static_cast<std::uint32_t>(d.stride));
        w.u32(static_cast<std::uint32_t>(d.padding));
        w.u32(static_cast<std::uint32_t>(d.units));
    }
}

EncoderSpec read_spec(ByteReader& r) {
    EncoderSpec spec;
    spec.frame_size = r.u32();
    spec.embedding_dim = r.u32();
    const std::uint32_t count = r.u32();
    spec.layers.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        LayerDesc d;
        d.kind = static_cast<LayerKind>(r.u8());
        d.channels = r.u32();
        d.kernel = r.u32();
        d.stride = r.u32();
        d.padding = r.u32();
        d.units = r.u32();
        spec.layers.push_back(d);
    }
    return spec;
}

/// Installs checkpoint tensors into a freshly built parameter store, checking
/// that names and shapes match the declared architecture exactly.
void install_tensors(nn::ParameterStore& params, const Checkpoint& ckpt,
                     std::size_t& consumed) {
    for (const std::string& name : params.names()) {
        auto it = ckpt.tensors.find(name);
        if (it == ckpt.tensors.end()) {
            throw CheckpointShapeError("checkpoint missing tensor '" + name + "' required by " +
                                       model_kind_name(ckpt.kind) + " architecture");
        }
        Tensor& dst = params.mutable_value(name);
        if (dst.shape() != it->second.shape()) {
            throw CheckpointShapeError("checkpoint tensor '" + name + "' has shape " +
                                       shape_to_string(it->second.shape()) + ", expected " +
                                       shape_to_string(dst.shape()));
        }
        dst = it->second;
        ++consumed;
    }
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Autoencoder: return "autoencoder";
        case ModelKind::GradeModel: return "grade";
        case ModelKind::BinaryModel: return "binary";
    }
    return "?";
}

Checkpoint make_checkpoint(const Autoencoder& model, const CheckpointMeta& meta) {
    Checkpoint ckpt;
    ckpt.kind = ModelKind::Autoencoder;
    ckpt.meta = meta;
    ckpt.encoder_spec = model.spec;
    for (const auto& [name, st] : model.params) ckpt.tensors[name] = st.value;
    return ckpt;
}

Checkpoint make_checkpoint(const SequenceModel& model, const CheckpointMeta& meta) {
    Checkpoint ckpt;
    ckpt.kind = model.head == HeadKind::Grade ? ModelKind::GradeModel : ModelKind::BinaryModel;
    ckpt.meta = meta;
    ckpt.input_dim = model.input_dim;
    ckpt.hidden_dim = model.hidden_dim;
    for (const auto& [name, st] : model.trunk) ckpt.tensors["trunk/" + name] = st.value;
    for (const auto& [name, st] : model.head_params) ckpt.tensors["head/" + name] = st.value;
    return ckpt;
}

Autoencoder autoencoder_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.kind != ModelKind::Autoencoder) {
        throw CheckpointShapeError("checkpoint holds a " + model_kind_name(ckpt.kind) +
                                   " model, expected an autoencoder");
    }
    Autoencoder model = build_autoencoder(ckpt.encoder_spec, 0);
    std::size_t consumed = 0;
    install_tensors(model.params, ckpt, consumed);
    if (consumed != ckpt.tensors.size()) {
        throw CheckpointShapeError("checkpoint carries " + std::to_string(ckpt.tensors.size()) +
                                   " tensors, architecture expects " + std::to_string(consumed));
    }
    return model;
}

SequenceModel sequence_model_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.kind != ModelKind::GradeModel && ckpt.kind != ModelKind::BinaryModel) {
        throw CheckpointShapeError("checkpoint holds a " + model_kind_name(ckpt.kind) +
                                   " model, expected a sequence model");
    }
    SequenceModel model = make_sequence_model(
        ckpt.input_dim, ckpt.hidden_dim,
        ckpt.kind == ModelKind::GradeModel ? HeadKind::Grade : HeadKind::Binary, 0);

    // split the flat tensor map back into trunk/ and head/ namespaces
    Checkpoint trunk_view, head_view;
    trunk_view.kind = head_view.kind = ckpt.kind;
    for (const auto& [name, tensor] : ckpt.tensors) {
        if (name.rfind("trunk/", 0) == 0) trunk_view.tensors[name.substr(6)] = tensor;
        else if (name.rfind("head/", 0) == 0) head_view.tensors[name.substr(5)] = tensor;
        else throw CheckpointShapeError("checkpoint tensor '" + name +
                                        "' belongs to neither trunk nor head");
    }
    std::size_t consumed = 0;
    install_tensors(model.trunk, trunk_view, consumed);
    install_tensors(model.head_params, head_view, consumed);
    if (consumed != ckpt.tensors.size()) {
        throw CheckpointShapeError("checkpoint carries " + std::to_string(ckpt.tensors.size()) +
                                   " tensors, architecture expects " + std::to_string(consumed));
    }
    return model;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    ByteWriter w;
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.u8(static_cast<std::uint8_t>(ckpt.kind));
    w.u64(ckpt.meta.seed);
    w.u32(ckpt.meta.epochs);
    w.f64(ckpt.meta.final_loss);

    if (ckpt.kind == ModelKind::Autoencoder) {
        write_spec(w, ckpt.encoder_spec);
    } else {
        w.u32(static_cast<std::uint32_t>(ckpt.input_dim));
        w.u32(static_cast<std::uint32_t>(ckpt.hidden_dim));
    }

    w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
        w.u16(static_cast<std::uint16_t>(name.size()));
        w.raw(name.data(), name.size());
        w.u8(static_cast<std::uint8_t>(tensor.rank()));
        for (std::size_t d : tensor.shape()) w.u64(d);
    }
    for (const auto& [name, tensor] : ckpt.tensors) {
        for (double v : tensor.values()) w.f32(static_cast<float>(v));
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw IoError("short write to checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    ByteReader r(std::move(bytes), path.string());

    if (r.str(4) != std::string(kMagic, 4)) {
        throw IoError("file " + path.string() + " is not a checkpoint (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw CheckpointVersionError("checkpoint " + path.string() + " has format version " +
                                     std::to_string(version) + ", this build reads version " +
                                     std::to_string(kVersion));
    }

    Checkpoint ckpt;
    const std::uint8_t kind = r.u8();
    if (kind > 2) {
        throw IoError("checkpoint " + path.string() + " has unknown model kind " +
                      std::to_string(kind));
    }
    ckpt.kind = static_cast<ModelKind>(kind);
    ckpt.meta.seed = r.u64();
    ckpt.meta.epochs = r.u32();
    ckpt.meta.final_loss = r.f64();

    if (ckpt.kind == ModelKind::Autoencoder) {
        ckpt.encoder_spec = read_spec(r);
    } else {
        ckpt.input_dim = r.u32();
        ckpt.hidden_dim = r.u32();
    }

    const std::uint32_t count = r.u32();
    std::vector<std::pair<std::string, std::vector<std::size_t>>> table;
    table.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t len = r.u16();
        std::string name = r.str(len);
        const std::uint8_t rank = r.u8();
        std::vector<std::size_t> shape(rank);
        for (std::uint8_t d = 0; d < rank; ++d) shape[d] = r.u64();
        table.emplace_back(std::move(name), std::move(shape));
    }
    for (const auto& [name, shape] : table) {
        Tensor t(shape);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(r.f32());
        ckpt.tensors[name] = std::move(t);
    }
    if (!r.exhausted()) {
        throw IoError("checkpoint " + path.string() + " has trailing bytes");
    }
    return ckpt;
}

} // namespace ovum::io
