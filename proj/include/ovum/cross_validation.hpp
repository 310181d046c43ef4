#pragma once

#include "ovum/dataset.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ovum {

/// Patient-grouped partition: all embryos sharing a patient land in one fold,
/// and per-fold patient counts differ by at most 1.
struct FoldAssignment {
    std::size_t k = 0;
    std::map<std::string, std::size_t> fold_of; // embryo_id -> fold index
};

/// Shuffles patients by seed and deals them round-robin to folds.
/// Requires k >= 2 and at least k distinct patients.
FoldAssignment grouped_kfold(const std::vector<EmbryoRecord>& records, std::size_t k,
                             std::uint64_t seed);

struct FoldSplit {
    std::vector<const EmbryoRecord*> train;
    std::vector<const EmbryoRecord*> validation;
};

/// Validation = records assigned to fold_index; train = all others. The two
/// sides never share a patient id.
FoldSplit fold_split(const std::vector<EmbryoRecord>& records,
                     const FoldAssignment& assignment, std::size_t fold_index);

} // namespace ovum
