#pragma once

#include "ovum/dataset.hpp"

#include <filesystem>

namespace ovum::io {

/// On-disk layout:
///   <dir>/manifest.jsonl   one JSON object per record (UTF-8)
///   <dir>/frames/<id>.u8   raw 8-bit grayscale, row-major,
///                          frame_count * H * W bytes per video
/// Pixels quantize to round(p * 255); a load(save(d)) round trip preserves
/// every pixel to within 1/255 and all ids/grades/labels exactly.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

Dataset load_dataset(const std::filesystem::path& dir);

} // namespace ovum::io
