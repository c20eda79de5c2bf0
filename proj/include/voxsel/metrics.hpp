#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxsel/common.hpp"

namespace voxsel {

struct ConfusionTable {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
};

ConfusionTable confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                         int positive = 1);

// Mean of per-class F1, each class taken as positive once. Zero-denominator
// precision/recall and all-zero F1 are defined as 0.
double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// (tp*tn - fp*fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn)); 0 when any factor is 0.
// Computed as a product of square roots so large counts cannot overflow.
double mcc(const ConfusionTable& c);

double accuracy(const ConfusionTable& c);

// One evaluated repetition of an experiment configuration.
struct EvaluationRecord {
    int rep_id = 0;
    std::string config_id;
    ConfusionTable table;
    double macro_f1 = 0.0;
    double mcc = 0.0;
    double accuracy = 0.0;
    bool failed = false;       // training aborted; metrics fields not meaningful
    std::string fail_reason;
};

EvaluationRecord evaluate(int rep_id, const std::string& config_id,
                          const std::vector<int>& y_true, const std::vector<int>& y_pred);

// mean and population standard deviation of a metric across records
struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& values);

}  // namespace voxsel
