#include "voxsel/splits.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json.hpp"

namespace voxsel {

std::string to_string(SplitScheme s) {
    switch (s) {
        case SplitScheme::GroupedKFold: return "grouped_kfold";
        case SplitScheme::StratifiedHoldoutByPerson: return "stratified_holdout_by_person";
        case SplitScheme::SummarizedLoo: return "summarized_loo";
    }
    return "?";
}

namespace {

void fill_rows(SplitPlan& plan, const Dataset& d) {
    std::unordered_set<std::string> test_set(plan.test_subjects.begin(),
                                             plan.test_subjects.end());
    for (std::size_t i = 0; i < d.subject_ids.size(); ++i) {
        if (test_set.count(d.subject_ids[i]))
            plan.test_rows.push_back(i);
        else
            plan.train_rows.push_back(i);
    }
}

}  // namespace

std::vector<SplitPlan> grouped_kfold(const Dataset& d, int k, std::uint64_t seed) {
    auto subjects = d.subjects();
    if (k < 2 || static_cast<std::size_t>(k) > subjects.size())
        throw ArgumentError("grouped_kfold: k must be in [2, n_subjects], got " +
                            std::to_string(k));
    Rng rng(seed);
    shuffle(subjects, rng);

    std::vector<SplitPlan> plans(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < subjects.size(); ++i)
        plans[i % static_cast<std::size_t>(k)].test_subjects.push_back(subjects[i]);

    for (int f = 0; f < k; ++f) {
        auto& p = plans[static_cast<std::size_t>(f)];
        p.scheme = SplitScheme::GroupedKFold;
        p.rep_id = f;
        p.seed = seed;
        std::unordered_set<std::string> test_set(p.test_subjects.begin(), p.test_subjects.end());
        for (const auto& s : subjects)
            if (!test_set.count(s)) p.train_subjects.push_back(s);
        fill_rows(p, d);
    }
    return plans;
}

SplitPlan stratified_holdout_by_person(const Dataset& d, double train_fraction, int rep_id,
                                       std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ArgumentError("stratified_holdout_by_person: train_fraction must be in (0,1)");
    auto subjects = d.subjects();
    auto label_of = d.subject_labels();

    std::vector<std::string> by_class[2];
    for (const auto& s : subjects) by_class[label_of[s]].push_back(s);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < 2)
            throw ArgumentError("stratified_holdout_by_person: class " + std::to_string(c) +
                                " has fewer than 2 subjects");

    SplitPlan plan;
    plan.scheme = SplitScheme::StratifiedHoldoutByPerson;
    plan.rep_id = rep_id;
    plan.seed = seed;

    Rng rng(seed_combine(seed, static_cast<std::uint64_t>(rep_id)));
    for (int c = 0; c < 2; ++c) {
        auto& subs = by_class[c];
        std::size_t n_train =
            static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(subs.size())));
        if (n_train >= subs.size()) n_train = subs.size() - 1;  // at least one test subject
        if (n_train == 0) n_train = 1;
        shuffle(subs, rng);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (i < n_train)
                plan.train_subjects.push_back(subs[i]);
            else
                plan.test_subjects.push_back(subs[i]);
        }
    }
    std::sort(plan.train_subjects.begin(), plan.train_subjects.end());
    std::sort(plan.test_subjects.begin(), plan.test_subjects.end());
    fill_rows(plan, d);
    return plan;
}

std::pair<Dataset, std::vector<SplitPlan>> summarized_loo(const Dataset& d, Aggregator agg) {
    auto subjects = d.subjects();
    auto rows_by = d.rows_by_subject();
    auto label_of = d.subject_labels();

    Dataset reduced;
    reduced.column_names = d.column_names;
    reduced.group_of = d.group_of;
    reduced.features.resize(static_cast<Eigen::Index>(subjects.size()), d.n_features());

    for (std::size_t s = 0; s < subjects.size(); ++s) {
        const auto& rows = rows_by[subjects[s]];
        if (agg == Aggregator::Mean) {
            Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d.n_features());
            for (std::size_t r : rows) acc += d.features.row(static_cast<Eigen::Index>(r));
            reduced.features.row(static_cast<Eigen::Index>(s)) =
                acc / static_cast<double>(rows.size());
        } else {
            for (Eigen::Index c = 0; c < d.n_features(); ++c) {
                std::vector<double> vals;
                vals.reserve(rows.size());
                for (std::size_t r : rows) vals.push_back(d.features(static_cast<Eigen::Index>(r), c));
                std::sort(vals.begin(), vals.end());
                const std::size_t m = vals.size();
                reduced.features(static_cast<Eigen::Index>(s), c) =
                    (m % 2 == 1) ? vals[m / 2] : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
            }
        }
        reduced.subject_ids.push_back(subjects[s]);
        reduced.labels.push_back(label_of[subjects[s]]);
    }

    std::vector<SplitPlan> plans;
    plans.reserve(subjects.size());
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        SplitPlan p;
        p.scheme = SplitScheme::SummarizedLoo;
        p.rep_id = static_cast<int>(s);
        p.test_subjects.push_back(subjects[s]);
        p.test_rows.push_back(s);
        for (std::size_t t = 0; t < subjects.size(); ++t) {
            if (t == s) continue;
            p.train_subjects.push_back(subjects[t]);
            p.train_rows.push_back(t);
        }
        plans.push_back(std::move(p));
    }
    return {std::move(reduced), std::move(plans)};
}

std::string plan_to_json(const SplitPlan& p) {
    nlohmann::json j;
    j["scheme"] = to_string(p.scheme);
    j["rep_id"] = p.rep_id;
    j["seed"] = p.seed;
    j["train_subjects"] = p.train_subjects;
    j["test_subjects"] = p.test_subjects;
    return j.dump();
}

}  // namespace voxsel
