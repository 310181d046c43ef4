#include "ovum/dataset.hpp"

#include "ovum/errors.hpp"

namespace ovum {

Frame make_frame(Tensor pixels) {
    if (pixels.rank() != 3 || pixels.dim(0) != 1) {
        throw ShapeError("frame must be [1,H,W], got " + shape_to_string(pixels.shape()));
    }
    for (double v : pixels.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValueError("frame pixel " + std::to_string(v) + " outside [0,1]");
        }
    }
    return Frame{std::move(pixels)};
}

std::string subset_name(Subset s) {
    switch (s) {
        case Subset::Unlabeled: return "unlabeled";
        case Subset::Graded: return "graded";
        case Subset::Kid: return "kid";
    }
    throw ValueError("invalid subset tag");
}

Subset subset_from_name(const std::string& name) {
    if (name == "unlabeled") return Subset::Unlabeled;
    if (name == "graded") return Subset::Graded;
    if (name == "kid") return Subset::Kid;
    throw ValueError("unknown subset '" + name + "'");
}

void validate_record(const EmbryoRecord& record) {
    const bool wants_grades = record.subset != Subset::Unlabeled;
    if (record.grades.has_value() != wants_grades) {
        throw ValueError("record '" + record.embryo_id + "' (" + subset_name(record.subset) +
                         ") has " + (record.grades ? "unexpected" : "missing") + " grades");
    }
    const bool wants_label = record.subset == Subset::Kid;
    if (record.kid_label.has_value() != wants_label) {
        throw ValueError("record '" + record.embryo_id + "' (" + subset_name(record.subset) +
                         ") has " + (record.kid_label ? "unexpected" : "missing") +
                         " implantation label");
    }
    if (record.grades) {
        for (int g : *record.grades) {
            if (g < 1 || g > 5) {
                throw ValueError("record '" + record.embryo_id + "' grade " +
                                 std::to_string(g) + " outside 1..5");
            }
        }
    }
    if (record.kid_label && *record.kid_label != 0 && *record.kid_label != 1) {
        throw ValueError("record '" + record.embryo_id + "' label must be 0/1");
    }
}

} // namespace ovum
