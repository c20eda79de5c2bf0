#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxsel/metrics.hpp"
#include "voxsel/selection.hpp"
#include "voxsel/splits.hpp"
#include "voxsel/stats.hpp"

namespace voxsel {

// Method-specific knobs for one experiment configuration.
struct MethodParams {
    int bins = 10;            // chi2, mrmr
    int relieff_k = 10;
    int relieff_m = -1;       // -1: all samples
    NcaOptions nca;
    int cfs_max_stale = 5;
    SfsOptions sfs;
};

struct ExperimentSpec {
    SelectionMethod method = SelectionMethod::Nca;
    MethodParams method_params;
    int top = 50;             // ranking cut; ignored by subset methods and baseline
    TrainConfig train;
    int repetitions = 30;
    double train_fraction = 0.75;
    std::uint64_t master_seed = 0;
    std::string config_id = "run";
    int jobs = 1;  // concurrent repetitions; does not affect results
};

// One stage-1 repetition: the features chosen on the training side plus the
// held-out evaluation of the network trained on them.
struct RepetitionOutcome {
    int rep_id = 0;
    std::vector<int> selected;  // rank order where the method defines one
    EvaluationRecord record;
};

struct StageOneResult {
    std::vector<RepetitionOutcome> repetitions;
    ExperimentSpec spec;

    std::vector<std::vector<int>> selected_sets() const;  // failed reps excluded
};

enum class UnionStatus { InRange, ClosestFallback };

struct UnionOutcome {
    std::vector<int> final_set;       // ascending feature indices
    double threshold = 0.0;           // selection-frequency threshold reached
    std::vector<double> frequencies;  // per feature, fraction of sets containing it
    UnionStatus status = UnionStatus::InRange;
};

// Stage 1 of the experiment flow: per repetition, split by person, fit the
// standardizer and run selection on the training side only, train, evaluate on
// the held-out people.
StageOneResult stage1(const Dataset& d, const ExperimentSpec& spec);

// Adaptive-threshold union of per-repetition feature sets. Starts at the
// smallest positive frequency ("used at least once") and raises the threshold
// through observed frequency values until the set fits under `upper`;
// overshoot past `lower` truncates the previous set instead (fallback).
UnionOutcome feature_union(const std::vector<std::vector<int>>& sets, std::size_t n_features,
                           std::size_t lower = 30, std::size_t upper = 50);

// Stage 2: retrain on the fixed union set with fresh person-grouped splits.
std::vector<EvaluationRecord> stage2(const Dataset& d, const UnionOutcome& unioned,
                                     const ExperimentSpec& spec);

struct ComparisonResult {
    std::vector<std::string> config_ids;
    FriedmanResult friedman;
    bool significant = false;
    std::string best_config;                      // highest mean rank score
    std::map<std::string, double> mean_mcc;
    std::map<std::string, double> mean_rank;
    // Holm-adjusted pairwise p-values vs the best config.
    std::map<std::string, double> p_vs_best;
    std::vector<std::string> indistinguishable_from_best;
};

// Friedman test over per-repetition MCC, then Holm-corrected Wilcoxon
// signed-rank tests of every config against the best one.
ComparisonResult compare_models(const std::map<std::string, std::vector<double>>& mcc_by_config,
                                double alpha = 0.05);

// Fraction of selected-feature occurrences falling in each group. With top_n,
// only each set's first top_n entries count (requires rank-ordered sets).
std::map<FeatureGroup, double> group_distribution(const std::vector<std::vector<int>>& sets,
                                                  const std::vector<FeatureGroup>& group_of,
                                                  std::optional<int> top_n = std::nullopt,
                                                  bool sets_are_rank_ordered = true);

struct ExperimentReport {
    std::string config_id;
    std::string method;
    int hidden_units = 0;
    std::string algorithm;
    int top = 0;
    int stage1_repetitions = 0;
    int stage2_repetitions = 0;
    int stage1_failures = 0;
    int stage2_failures = 0;
    std::size_t union_size = 0;
    double union_threshold = 0.0;
    std::string union_status;
    MeanSd f1;
    MeanSd mcc;
    MeanSd acc;
    std::map<FeatureGroup, double> group_fractions;
};

ExperimentReport make_report(const ExperimentSpec& spec, const StageOneResult& s1,
                             const UnionOutcome& unioned,
                             const std::vector<EvaluationRecord>& s2,
                             const std::vector<FeatureGroup>& group_of);

// --- serialization ---
std::string union_to_json(const UnionOutcome& u);
UnionOutcome union_from_json(const std::string& text);
std::string report_to_json(const ExperimentReport& r);
std::string report_to_text(const ExperimentReport& r);
std::string comparison_to_json(const ComparisonResult& c);
std::string comparison_to_text(const ComparisonResult& c);

// Per-repetition records CSV (header + one line per record).
std::string records_to_csv(const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> records_from_csv(const std::string& text);

}  // namespace voxsel
