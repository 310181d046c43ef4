#pragma once

#include "ovum/tensor.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ovum {

/// One grayscale frame, pixels in [0,1], shape [1,H,W].
struct Frame {
    Tensor pixels;

    std::size_t height() const { return pixels.dim(1); }
    std::size_t width() const { return pixels.dim(2); }
};

/// Validates shape and pixel range; throws ValueError/ShapeError otherwise.
Frame make_frame(Tensor pixels);

enum class Subset { Unlabeled, Graded, Kid };

std::string subset_name(Subset s);
Subset subset_from_name(const std::string& name);

/// One embryo: its time-lapse frames plus whatever annotations its subset
/// carries. Graded and KID records carry the 5-member panel grades; KID
/// records additionally carry the binary implantation outcome.
struct EmbryoRecord {
    std::string embryo_id;
    std::string patient_id;
    std::vector<Frame> frames;
    std::optional<std::array<int, 5>> grades;
    std::optional<int> kid_label; // 1 = implanted, 0 = failed
    Subset subset = Subset::Unlabeled;
};

/// Checks that annotations match the record's subset tag.
void validate_record(const EmbryoRecord& record);

struct Dataset {
    std::vector<EmbryoRecord> unlabeled;
    std::vector<EmbryoRecord> graded;
    std::vector<EmbryoRecord> kid;
    std::size_t frame_size = 0;
    std::size_t frames_per_video = 0;
};

} // namespace ovum
