#include "ovum/io/dataset_io.hpp"

#include "ovum/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>

namespace ovum::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_frames_file(const EmbryoRecord& record, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write frame file " + path.string());
    std::vector<unsigned char> bytes;
    for (const Frame& frame : record.frames) {
        for (double p : frame.pixels.values()) {
            const long q = std::lround(p * 255.0);
            bytes.push_back(static_cast<unsigned char>(std::clamp(q, 0L, 255L)));
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to frame file " + path.string());
}

json record_to_json(const EmbryoRecord& record, const std::string& frames_path,
                    std::size_t frame_size) {
    json j;
    j["embryo_id"] = record.embryo_id;
    j["patient_id"] = record.patient_id;
    j["frames_path"] = frames_path;
    j["frame_count"] = record.frames.size();
    j["frame_size"] = frame_size;
    j["subset"] = subset_name(record.subset);
    if (record.grades) j["grades"] = *record.grades;
    if (record.kid_label) j["kid_label"] = *record.kid_label;
    return j;
}

EmbryoRecord record_from_json(const json& j, const fs::path& dir) {
    EmbryoRecord record;
    record.embryo_id = j.at("embryo_id").get<std::string>();
    record.patient_id = j.at("patient_id").get<std::string>();
    record.subset = subset_from_name(j.at("subset").get<std::string>());
    if (j.contains("grades")) {
        record.grades = j.at("grades").get<std::array<int, 5>>();
    }
    if (j.contains("kid_label")) {
        record.kid_label = j.at("kid_label").get<int>();
    }

    const std::string frames_path = j.at("frames_path").get<std::string>();
    const std::size_t frame_count = j.at("frame_count").get<std::size_t>();
    const std::size_t frame_size = j.at("frame_size").get<std::size_t>();

    const fs::path path = dir / frames_path;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("record '" + record.embryo_id + "': missing frame file " +
                      path.string());
    }
    const std::size_t expected = frame_count * frame_size * frame_size;
    std::vector<unsigned char> bytes(expected);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected || in.peek() != EOF) {
        throw IoError("record '" + record.embryo_id + "': frame file " + path.string() +
                      " has " + std::to_string(static_cast<std::size_t>(in.gcount())) +
                      (in.peek() != EOF ? "+ extra" : "") + " bytes, expected " +
                      std::to_string(expected));
    }

    record.frames.reserve(frame_count);
    for (std::size_t f = 0; f < frame_count; ++f) {
        Tensor pixels({1, frame_size, frame_size});
        for (std::size_t i = 0; i < frame_size * frame_size; ++i) {
            pixels[i] = static_cast<double>(bytes[f * frame_size * frame_size + i]) / 255.0;
        }
        record.frames.push_back(make_frame(std::move(pixels)));
    }
    validate_record(record);
    return record;
}

} // namespace

void save_dataset(const Dataset& dataset, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir / "frames", ec);
    if (ec) throw IoError("cannot create dataset directory " + dir.string());

    std::ofstream manifest(dir / "manifest.jsonl", std::ios::binary);
    if (!manifest) throw IoError("cannot write manifest in " + dir.string());

    std::set<std::string> seen_ids;
    const auto dump_subset = [&](const std::vector<EmbryoRecord>& records) {
        for (const EmbryoRecord& record : records) {
            validate_record(record);
            if (!seen_ids.insert(record.embryo_id).second) {
                throw IoError("duplicate embryo_id '" + record.embryo_id + "'");
            }
            if (record.frames.empty()) {
                throw IoError("record '" + record.embryo_id + "' has no frames");
            }
            const std::size_t frame_size = record.frames.front().height();
            const std::string frames_path = "frames/" + record.embryo_id + ".u8";
            write_frames_file(record, dir / frames_path);
            manifest << record_to_json(record, frames_path, frame_size).dump() << '\n';
        }
    };
    dump_subset(dataset.unlabeled);
    dump_subset(dataset.graded);
    dump_subset(dataset.kid);
    if (!manifest) throw IoError("short write to manifest in " + dir.string());
}

Dataset load_dataset(const fs::path& dir) {
    std::ifstream manifest(dir / "manifest.jsonl", std::ios::binary);
    if (!manifest) throw IoError("cannot open manifest " + (dir / "manifest.jsonl").string());

    Dataset dataset;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        EmbryoRecord record;
        try {
            record = record_from_json(j, dir);
        } catch (const json::exception& e) {
            throw IoError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen_ids.insert(record.embryo_id).second) {
            throw IoError("duplicate embryo_id '" + record.embryo_id + "' in manifest");
        }
        if (dataset.frame_size == 0) {
            dataset.frame_size = record.frames.front().height();
            dataset.frames_per_video = record.frames.size();
        }
        switch (record.subset) {
            case Subset::Unlabeled: dataset.unlabeled.push_back(std::move(record)); break;
            case Subset::Graded: dataset.graded.push_back(std::move(record)); break;
            case Subset::Kid: dataset.kid.push_back(std::move(record)); break;
        }
    }
    return dataset;
}

} // namespace ovum::io
