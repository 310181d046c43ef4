#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ovum/cross_validation.hpp"
#include "ovum/errors.hpp"
#include "ovum/rng.hpp"

#include <map>
#include <set>

using namespace ovum;

namespace {

EmbryoRecord light_record(const std::string& embryo, const std::string& patient) {
    EmbryoRecord r;
    r.embryo_id = embryo;
    r.patient_id = patient;
    return r;
}

/// Random dataset with 1..5 embryos per patient.
std::vector<EmbryoRecord> random_records(std::size_t patients, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> embryos(1, 5);
    std::vector<EmbryoRecord> records;
    std::size_t embryo_counter = 0;
    for (std::size_t p = 0; p < patients; ++p) {
        const int count = embryos(rng);
        for (int e = 0; e < count; ++e) {
            records.push_back(light_record("e" + std::to_string(embryo_counter++),
                                           "p" + std::to_string(p)));
        }
    }
    return records;
}

void check_invariants(const std::vector<EmbryoRecord>& records,
                      const FoldAssignment& assignment) {
    // every record assigned exactly once
    REQUIRE(assignment.fold_of.size() == records.size());

    // all embryos of one patient share a fold
    std::map<std::string, std::size_t> patient_fold;
    for (const EmbryoRecord& r : records) {
        const std::size_t fold = assignment.fold_of.at(r.embryo_id);
        REQUIRE(fold < assignment.k);
        auto [it, inserted] = patient_fold.emplace(r.patient_id, fold);
        if (!inserted) CHECK(it->second == fold);
    }

    // patient counts balanced within 1
    std::vector<std::size_t> patients_per_fold(assignment.k, 0);
    for (const auto& [patient, fold] : patient_fold) patients_per_fold[fold]++;
    std::size_t lo = patients_per_fold[0], hi = patients_per_fold[0];
    for (std::size_t n : patients_per_fold) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    CHECK(hi - lo <= 1);

    // per fold: train/validation patient sets disjoint, folds partition records
    std::size_t total_validation = 0;
    std::set<std::string> seen_validation_ids;
    for (std::size_t fold = 0; fold < assignment.k; ++fold) {
        FoldSplit split = fold_split(records, assignment, fold);
        CHECK(split.train.size() + split.validation.size() == records.size());
        total_validation += split.validation.size();

        std::set<std::string> train_patients, val_patients;
        for (const EmbryoRecord* r : split.train) train_patients.insert(r->patient_id);
        for (const EmbryoRecord* r : split.validation) {
            val_patients.insert(r->patient_id);
            CHECK(seen_validation_ids.insert(r->embryo_id).second); // no duplicates
        }
        for (const std::string& p : val_patients) CHECK(train_patients.count(p) == 0);
    }
    CHECK(total_validation == records.size()); // union of validations = everything
}

} // namespace

TEST_CASE("ten patients with one embryo each split 10-fold, one per fold") {
    std::vector<EmbryoRecord> records;
    for (int i = 0; i < 10; ++i) {
        records.push_back(light_record("e" + std::to_string(i), "p" + std::to_string(i)));
    }
    FoldAssignment assignment = grouped_kfold(records, 10, 0);
    std::set<std::size_t> used;
    for (const auto& [_, fold] : assignment.fold_of) used.insert(fold);
    CHECK(used.size() == 10);
    for (std::size_t fold = 0; fold < 10; ++fold) {
        CHECK(fold_split(records, assignment, fold).validation.size() == 1);
    }
}

TEST_CASE("a multi-embryo patient lands in exactly one fold") {
    std::vector<EmbryoRecord> records;
    for (int i = 0; i < 11; ++i) {
        records.push_back(light_record("e" + std::to_string(i), "p" + std::to_string(i)));
    }
    records.push_back(light_record("e11", "p0"));
    records.push_back(light_record("e12", "p0"));
    FoldAssignment assignment = grouped_kfold(records, 4, 5);
    const std::size_t fold = assignment.fold_of.at("e0");
    CHECK(assignment.fold_of.at("e11") == fold);
    CHECK(assignment.fold_of.at("e12") == fold);
}

TEST_CASE("assignment is deterministic in the seed and varies across seeds") {
    std::vector<EmbryoRecord> records = random_records(30, 1);
    FoldAssignment a = grouped_kfold(records, 5, 42);
    FoldAssignment b = grouped_kfold(records, 5, 42);
    CHECK(a.fold_of == b.fold_of);

    bool any_difference = false;
    for (std::uint64_t seed = 43; seed < 48 && !any_difference; ++seed) {
        if (grouped_kfold(records, 5, seed).fold_of != a.fold_of) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("too few patients or bad indices are rejected") {
    std::vector<EmbryoRecord> records = random_records(3, 2);
    CHECK_THROWS_WITH_AS(grouped_kfold(records, 4, 0), doctest::Contains("patients"),
                         ValueError);
    CHECK_THROWS_AS(grouped_kfold(records, 1, 0), ValueError);

    FoldAssignment assignment = grouped_kfold(records, 2, 0);
    CHECK_THROWS_AS(fold_split(records, assignment, 2), ValueError);
}

TEST_CASE("balanced 100-record set splits roughly 90/10") {
    std::vector<EmbryoRecord> records;
    for (int i = 0; i < 100; ++i) {
        records.push_back(light_record("e" + std::to_string(i), "p" + std::to_string(i)));
    }
    FoldAssignment assignment = grouped_kfold(records, 10, 3);
    FoldSplit split = fold_split(records, assignment, 0);
    CHECK(split.validation.size() == 10);
    CHECK(split.train.size() == 90);
}

TEST_CASE("property: invariants hold across 100 random datasets") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t patients = 5 + seed % 40;
        const std::size_t k = 2 + seed % (std::min<std::size_t>(patients, 10) - 1);
        std::vector<EmbryoRecord> records = random_records(patients, seed);
        FoldAssignment assignment = grouped_kfold(records, k, seed * 31 + 7);
        check_invariants(records, assignment);
    }
}
