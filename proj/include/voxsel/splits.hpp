#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxsel/dataset.hpp"

namespace voxsel {

enum class SplitScheme { GroupedKFold, StratifiedHoldoutByPerson, SummarizedLoo };

std::string to_string(SplitScheme s);

// A train/test partition of row indices. All rows of a subject land on one side.
struct SplitPlan {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    SplitScheme scheme = SplitScheme::StratifiedHoldoutByPerson;
    int rep_id = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
};

// Subjects are shuffled by seed and dealt round-robin into k folds; plan i
// holds fold i as its test side.
std::vector<SplitPlan> grouped_kfold(const Dataset& d, int k, std::uint64_t seed);

// Per class, round(train_fraction * subjects) go to train with at least one
// subject left in test. Sampling stream is (seed, rep_id).
SplitPlan stratified_holdout_by_person(const Dataset& d, double train_fraction, int rep_id,
                                       std::uint64_t seed);

enum class Aggregator { Mean, Median };

// One row per subject via the aggregator, plus leave-one-subject-out plans
// over the reduced set.
std::pair<Dataset, std::vector<SplitPlan>> summarized_loo(const Dataset& d, Aggregator agg);

// Audit record: {scheme, rep_id, seed, train_subjects, test_subjects}.
std::string plan_to_json(const SplitPlan& p);

}  // namespace voxsel
