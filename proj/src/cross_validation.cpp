#include "ovum/cross_validation.hpp"

#include "ovum/errors.hpp"
#include "ovum/rng.hpp"

#include <algorithm>
#include <set>

namespace ovum {

FoldAssignment grouped_kfold(const std::vector<EmbryoRecord>& records, std::size_t k,
                             std::uint64_t seed) {
    if (k < 2) throw ValueError("grouped_kfold: k must be >= 2, got " + std::to_string(k));

    // distinct patients in first-appearance order, so shuffling is the only
    // source of randomness
    std::vector<std::string> patients;
    std::set<std::string> seen;
    for (const EmbryoRecord& r : records) {
        if (seen.insert(r.patient_id).second) patients.push_back(r.patient_id);
    }
    if (patients.size() < k) {
        throw ValueError("grouped_kfold: " + std::to_string(patients.size()) +
                         " distinct patients < k=" + std::to_string(k));
    }

    Rng rng = make_rng(seed, 0x666f6c64u /* "fold" */);
    std::shuffle(patients.begin(), patients.end(), rng);

    std::map<std::string, std::size_t> patient_fold;
    for (std::size_t i = 0; i < patients.size(); ++i) patient_fold[patients[i]] = i % k;

    FoldAssignment assignment;
    assignment.k = k;
    for (const EmbryoRecord& r : records) {
        assignment.fold_of[r.embryo_id] = patient_fold.at(r.patient_id);
    }
    return assignment;
}

FoldSplit fold_split(const std::vector<EmbryoRecord>& records,
                     const FoldAssignment& assignment, std::size_t fold_index) {
    if (fold_index >= assignment.k) {
        throw ValueError("fold_split: fold index " + std::to_string(fold_index) +
                         " out of range for k=" + std::to_string(assignment.k));
    }
    FoldSplit split;
    for (const EmbryoRecord& r : records) {
        auto it = assignment.fold_of.find(r.embryo_id);
        if (it == assignment.fold_of.end()) {
            throw ValueError("fold_split: record '" + r.embryo_id + "' has no fold");
        }
        (it->second == fold_index ? split.validation : split.train).push_back(&r);
    }
    return split;
}

} // namespace ovum
