#include "voxsel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "voxsel/stats.hpp"

namespace voxsel {

namespace {

// seed roles within a repetition
constexpr std::uint64_t kRoleSplit = 1;
constexpr std::uint64_t kRoleSelect = 2;
constexpr std::uint64_t kRoleTrain = 3;

// Run body(rep) for rep in [0, reps) across `jobs` workers. Each repetition
// writes only its own slot, so results are independent of the worker count.
void for_each_rep(int reps, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, reps));
    if (jobs == 1) {
        for (int rep = 0; rep < reps; ++rep) body(rep);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const int rep = next.fetch_add(1);
                if (rep >= reps) return;
                try {
                    body(rep);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<int> run_selection(const Dataset& d, const ExperimentSpec& spec,
                               const SplitPlan& plan, const Eigen::MatrixXd& Xtr_std,
                               const std::vector<int>& ytr, std::uint64_t seed) {
    const auto all_features = [&] {
        std::vector<int> v(static_cast<std::size_t>(d.n_features()));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
        return v;
    };
    const MethodParams& mp = spec.method_params;
    switch (spec.method) {
        case SelectionMethod::Baseline:
            return all_features();
        case SelectionMethod::Chi2:
            return top_k(rank_chi2(Xtr_std, ytr, mp.bins), spec.top);
        case SelectionMethod::Pcc:
            return top_k(rank_pcc(Xtr_std, ytr), spec.top);
        case SelectionMethod::Tvfs: {
            // variance is vacuous after z-scoring; rank on raw training rows
            Eigen::MatrixXd Xtr_raw = rows_of(d.features, plan.train_rows);
            return top_k(rank_tvfs(Xtr_raw), spec.top);
        }
        case SelectionMethod::ReliefF:
            return top_k(rank_relieff(Xtr_std, ytr, mp.relieff_k, mp.relieff_m, seed), spec.top);
        case SelectionMethod::Mrmr:
            return top_k(rank_mrmr(Xtr_std, ytr, spec.top, mp.bins), spec.top);
        case SelectionMethod::Nca: {
            NcaOptions o = mp.nca;
            o.rng_seed = seed;
            return top_k(rank_nca(Xtr_std, ytr, o), spec.top);
        }
        case SelectionMethod::Cfs:
            return select_cfs(Xtr_std, ytr, mp.cfs_max_stale).selected;
        case SelectionMethod::Sfs: {
            SfsOptions o = mp.sfs;
            o.rng_seed = seed;
            return select_sfs(d, plan.train_rows, o).selected;
        }
    }
    throw ArgumentError("run_selection: unhandled method");
}

EvaluationRecord evaluate_on_plan(const Dataset& d, const SplitPlan& plan,
                                  const TrainedNetwork& net, int rep_id,
                                  const std::string& config_id) {
    Eigen::MatrixXd raw_test = rows_of(d.features, plan.test_rows);
    std::vector<int> pred = predict_labels(net, raw_test);
    std::vector<int> truth = labels_of(d, plan.test_rows);
    return evaluate(rep_id, config_id, truth, pred);
}

// Train on the selected training columns and evaluate on held-out people.
EvaluationRecord train_and_eval(const Dataset& d, const ExperimentSpec& spec,
                                const SplitPlan& plan, const Standardizer& std_,
                                const Eigen::MatrixXd& Xtr_std, const std::vector<int>& ytr,
                                std::vector<int> selected_sorted, int rep_id,
                                std::uint64_t train_seed) {
    TrainConfig cfg = spec.train;
    cfg.rng_seed = train_seed;
    Eigen::VectorXd ytr_v(static_cast<Eigen::Index>(ytr.size()));
    for (std::size_t i = 0; i < ytr.size(); ++i) ytr_v[static_cast<Eigen::Index>(i)] = ytr[i];

    TrainedNetwork net = train(columns_of(Xtr_std, selected_sorted), ytr_v, cfg);
    net.feature_subset = std::move(selected_sorted);
    net.standardizer = std_;
    return evaluate_on_plan(d, plan, net, rep_id, spec.config_id);
}

}  // namespace

std::vector<std::vector<int>> StageOneResult::selected_sets() const {
    std::vector<std::vector<int>> out;
    for (const auto& rep : repetitions)
        if (!rep.record.failed) out.push_back(rep.selected);
    return out;
}

StageOneResult stage1(const Dataset& d, const ExperimentSpec& spec) {
    if (spec.repetitions < 1) throw ArgumentError("stage1: repetitions must be >= 1");
    StageOneResult result;
    result.spec = spec;
    result.repetitions.resize(static_cast<std::size_t>(spec.repetitions));

    for_each_rep(spec.repetitions, spec.jobs, [&](int rep) {
        auto& outcome = result.repetitions[static_cast<std::size_t>(rep)];
        outcome.rep_id = rep;
        outcome.record.rep_id = rep;
        outcome.record.config_id = spec.config_id;

        SplitPlan plan = stratified_holdout_by_person(
            d, spec.train_fraction, rep, derive_seed(spec.master_seed, 1, rep, kRoleSplit));
        Standardizer std_ = fit_standardizer(d, plan.train_rows);
        Eigen::MatrixXd Xtr_std = apply_standardizer(std_, d, plan.train_rows);
        std::vector<int> ytr = labels_of(d, plan.train_rows);

        try {
            outcome.selected = run_selection(d, spec, plan, Xtr_std, ytr,
                                             derive_seed(spec.master_seed, 1, rep, kRoleSelect));
            std::vector<int> sorted = outcome.selected;
            std::sort(sorted.begin(), sorted.end());
            outcome.record =
                train_and_eval(d, spec, plan, std_, Xtr_std, ytr, std::move(sorted), rep,
                               derive_seed(spec.master_seed, 1, rep, kRoleTrain));
        } catch (const Error& e) {
            outcome.record.failed = true;
            outcome.record.fail_reason = e.what();
            outcome.selected.clear();
        }
    });
    return result;
}

UnionOutcome feature_union(const std::vector<std::vector<int>>& sets, std::size_t n_features,
                           std::size_t lower, std::size_t upper) {
    if (sets.empty()) throw ArgumentError("feature_union: need at least one selected set");
    if (lower > upper) throw ArgumentError("feature_union: lower bound exceeds upper bound");

    UnionOutcome out;
    out.frequencies.assign(n_features, 0.0);
    for (const auto& s : sets) {
        std::set<int> uniq(s.begin(), s.end());
        for (int f : uniq) {
            if (f < 0 || static_cast<std::size_t>(f) >= n_features)
                throw ArgumentError("feature_union: feature index out of range");
            out.frequencies[static_cast<std::size_t>(f)] += 1.0;
        }
    }
    for (auto& v : out.frequencies) v /= static_cast<double>(sets.size());

    std::vector<double> thresholds;  // distinct positive frequencies, ascending
    for (double v : out.frequencies)
        if (v > 0.0) thresholds.push_back(v);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    if (thresholds.empty()) throw ArgumentError("feature_union: all sets are empty");

    auto set_at = [&](double t) {
        std::vector<int> s;
        for (std::size_t f = 0; f < n_features; ++f)
            if (out.frequencies[f] >= t) s.push_back(static_cast<int>(f));
        return s;
    };
    auto truncate_to_upper = [&](std::vector<int> s) {
        // keep the `upper` most-frequent features, ties by ascending index
        std::stable_sort(s.begin(), s.end(), [&](int a, int b) {
            const double fa = out.frequencies[static_cast<std::size_t>(a)];
            const double fb = out.frequencies[static_cast<std::size_t>(b)];
            if (fa != fb) return fa > fb;
            return a < b;
        });
        s.resize(upper);
        std::sort(s.begin(), s.end());
        return s;
    };

    std::size_t at = 0;
    std::vector<int> current = set_at(thresholds[at]);
    if (current.size() <= upper) {
        // "used at least once" already fits under the cap
        out.final_set = current;
        out.threshold = thresholds[at];
        out.status = current.size() >= lower ? UnionStatus::InRange : UnionStatus::ClosestFallback;
        return out;
    }
    while (at + 1 < thresholds.size()) {
        std::vector<int> next = set_at(thresholds[at + 1]);
        if (next.size() <= upper) {
            if (next.size() >= lower) {
                out.final_set = next;
                out.threshold = thresholds[at + 1];
                out.status = UnionStatus::InRange;
            } else {
                // raising jumped over [lower, upper]; keep previous set, truncated
                out.final_set = truncate_to_upper(std::move(current));
                out.threshold = thresholds[at];
                out.status = UnionStatus::ClosestFallback;
            }
            return out;
        }
        current = std::move(next);
        ++at;
    }
    // thresholds exhausted while still above the cap
    out.final_set = truncate_to_upper(std::move(current));
    out.threshold = thresholds[at];
    out.status = UnionStatus::ClosestFallback;
    return out;
}

std::vector<EvaluationRecord> stage2(const Dataset& d, const UnionOutcome& unioned,
                                     const ExperimentSpec& spec) {
    if (unioned.final_set.empty()) throw ArgumentError("stage2: union set is empty");
    std::vector<EvaluationRecord> records(static_cast<std::size_t>(spec.repetitions));

    std::vector<int> sorted = unioned.final_set;
    std::sort(sorted.begin(), sorted.end());

    for_each_rep(spec.repetitions, spec.jobs, [&](int rep) {
        auto& rec = records[static_cast<std::size_t>(rep)];
        rec.rep_id = rep;
        rec.config_id = spec.config_id;
        try {
            SplitPlan plan = stratified_holdout_by_person(
                d, spec.train_fraction, rep, derive_seed(spec.master_seed, 2, rep, kRoleSplit));
            Standardizer std_ = fit_standardizer(d, plan.train_rows);
            Eigen::MatrixXd Xtr_std = apply_standardizer(std_, d, plan.train_rows);
            std::vector<int> ytr = labels_of(d, plan.train_rows);
            rec = train_and_eval(d, spec, plan, std_, Xtr_std, ytr, sorted, rep,
                                 derive_seed(spec.master_seed, 2, rep, kRoleTrain));
        } catch (const Error& e) {
            rec.failed = true;
            rec.fail_reason = e.what();
        }
    });
    return records;
}

ComparisonResult compare_models(const std::map<std::string, std::vector<double>>& mcc_by_config,
                                double alpha) {
    if (mcc_by_config.size() < 2)
        throw ArgumentError("compare_models: need at least 2 configurations");
    const std::size_t reps = mcc_by_config.begin()->second.size();
    if (reps < 2) throw ArgumentError("compare_models: need at least 2 repetitions");
    for (const auto& [id, v] : mcc_by_config)
        if (v.size() != reps)
            throw ArgumentError("compare_models: config '" + id + "' has " +
                                std::to_string(v.size()) + " repetitions, expected " +
                                std::to_string(reps));

    ComparisonResult out;
    for (const auto& [id, v] : mcc_by_config) {
        out.config_ids.push_back(id);
        out.mean_mcc[id] = mean_sd(v).mean;
    }

    std::vector<std::vector<double>> blocks(reps, std::vector<double>(out.config_ids.size()));
    for (std::size_t j = 0; j < out.config_ids.size(); ++j) {
        const auto& v = mcc_by_config.at(out.config_ids[j]);
        for (std::size_t r = 0; r < reps; ++r) blocks[r][j] = v[r];
    }
    out.friedman = friedman_test(blocks);
    out.significant = out.friedman.p_value < alpha;

    // best = smallest mean rank (rank 1 is the best score)
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < out.config_ids.size(); ++j) {
        out.mean_rank[out.config_ids[j]] = out.friedman.mean_ranks[j];
        if (out.friedman.mean_ranks[j] < out.friedman.mean_ranks[best_j]) best_j = j;
    }
    out.best_config = out.config_ids[best_j];

    if (!out.significant) {
        out.indistinguishable_from_best = out.config_ids;
        return out;
    }

    std::vector<std::string> others;
    std::vector<double> raw_p;
    const auto& best_scores = mcc_by_config.at(out.best_config);
    for (const auto& id : out.config_ids) {
        if (id == out.best_config) continue;
        others.push_back(id);
        raw_p.push_back(wilcoxon_signed_rank(best_scores, mcc_by_config.at(id)));
    }
    auto adjusted = holm_adjust(raw_p);
    out.indistinguishable_from_best.push_back(out.best_config);
    for (std::size_t i = 0; i < others.size(); ++i) {
        out.p_vs_best[others[i]] = adjusted[i];
        if (adjusted[i] >= alpha) out.indistinguishable_from_best.push_back(others[i]);
    }
    std::sort(out.indistinguishable_from_best.begin(), out.indistinguishable_from_best.end());
    return out;
}

std::map<FeatureGroup, double> group_distribution(const std::vector<std::vector<int>>& sets,
                                                  const std::vector<FeatureGroup>& group_of,
                                                  std::optional<int> top_n,
                                                  bool sets_are_rank_ordered) {
    if (top_n && !sets_are_rank_ordered)
        throw ArgumentError("group_distribution: top_n requires rank-ordered sets");
    std::map<FeatureGroup, double> counts;
    double total = 0.0;
    for (const auto& s : sets) {
        std::size_t limit = s.size();
        if (top_n) limit = std::min(limit, static_cast<std::size_t>(std::max(0, *top_n)));
        for (std::size_t i = 0; i < limit; ++i) {
            const int f = s[i];
            if (f < 0 || static_cast<std::size_t>(f) >= group_of.size())
                throw ArgumentError("group_distribution: feature index out of range");
            counts[group_of[static_cast<std::size_t>(f)]] += 1.0;
            total += 1.0;
        }
    }
    if (total > 0.0)
        for (auto& [g, v] : counts) v /= total;
    return counts;
}

ExperimentReport make_report(const ExperimentSpec& spec, const StageOneResult& s1,
                             const UnionOutcome& unioned,
                             const std::vector<EvaluationRecord>& s2,
                             const std::vector<FeatureGroup>& group_of) {
    ExperimentReport r;
    r.config_id = spec.config_id;
    r.method = to_string(spec.method);
    r.hidden_units = spec.train.hidden_units;
    r.algorithm = to_string(spec.train.algorithm);
    r.top = spec.top;
    r.stage1_repetitions = static_cast<int>(s1.repetitions.size());
    r.stage2_repetitions = static_cast<int>(s2.size());
    for (const auto& rep : s1.repetitions)
        if (rep.record.failed) ++r.stage1_failures;
    r.union_size = unioned.final_set.size();
    r.union_threshold = unioned.threshold;
    r.union_status = unioned.status == UnionStatus::InRange ? "in_range" : "closest_fallback";

    std::vector<double> f1s, mccs, accs;
    for (const auto& rec : s2) {
        if (rec.failed) {
            ++r.stage2_failures;
            continue;
        }
        f1s.push_back(rec.macro_f1);
        mccs.push_back(rec.mcc);
        accs.push_back(rec.accuracy);
    }
    r.f1 = mean_sd(f1s);
    r.mcc = mean_sd(mccs);
    r.acc = mean_sd(accs);
    if (!group_of.empty()) {
        auto sets = s1.selected_sets();
        if (spec.method == SelectionMethod::Baseline) sets = {unioned.final_set};
        r.group_fractions = group_distribution(sets, group_of);
    }
    return r;
}

// --- serialization ---

std::string union_to_json(const UnionOutcome& u) {
    nlohmann::json j;
    j["final_set"] = u.final_set;
    j["threshold"] = u.threshold;
    j["frequencies"] = u.frequencies;
    j["status"] = u.status == UnionStatus::InRange ? "in_range" : "closest_fallback";
    return j.dump(2);
}

UnionOutcome union_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    UnionOutcome u;
    u.final_set = j.at("final_set").get<std::vector<int>>();
    u.threshold = j.at("threshold").get<double>();
    u.frequencies = j.at("frequencies").get<std::vector<double>>();
    u.status = j.at("status").get<std::string>() == "in_range" ? UnionStatus::InRange
                                                               : UnionStatus::ClosestFallback;
    return u;
}

std::string report_to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["config_id"] = r.config_id;
    j["method"] = r.method;
    j["hidden_units"] = r.hidden_units;
    j["algorithm"] = r.algorithm;
    j["top"] = r.top;
    j["stage1_repetitions"] = r.stage1_repetitions;
    j["stage2_repetitions"] = r.stage2_repetitions;
    j["stage1_failures"] = r.stage1_failures;
    j["stage2_failures"] = r.stage2_failures;
    j["union_size"] = r.union_size;
    j["union_threshold"] = r.union_threshold;
    j["union_status"] = r.union_status;
    j["macro_f1"] = {{"mean", r.f1.mean}, {"sd", r.f1.sd}};
    j["mcc"] = {{"mean", r.mcc.mean}, {"sd", r.mcc.sd}};
    j["accuracy"] = {{"mean", r.acc.mean}, {"sd", r.acc.sd}};
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [g, v] : r.group_fractions) groups[to_string(g)] = v;
    j["group_distribution"] = groups;
    return j.dump(2);
}

namespace {

std::string fmt3(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << v;
    return os.str();
}

}  // namespace

std::string report_to_text(const ExperimentReport& r) {
    std::ostringstream os;
    os << "config           " << r.config_id << "\n"
       << "method           " << r.method << " (top=" << r.top << ")\n"
       << "network          " << r.hidden_units << " hidden units, " << r.algorithm << "\n"
       << "repetitions      stage1=" << r.stage1_repetitions << " (failures "
       << r.stage1_failures << "), stage2=" << r.stage2_repetitions << " (failures "
       << r.stage2_failures << ")\n"
       << "union            " << r.union_size << " features, threshold "
       << fmt3(r.union_threshold) << ", " << r.union_status << "\n\n";
    os << "units | method | top | F1-Score | MCC | #total feat\n";
    os << r.hidden_units << " | " << r.method << " | "
       << (r.method == "baseline" ? "-" : std::to_string(r.top)) << " | " << fmt3(r.f1.mean)
       << " +/- " << fmt3(r.f1.sd) << " | " << fmt3(r.mcc.mean) << " +/- " << fmt3(r.mcc.sd)
       << " | " << r.union_size << "\n";
    if (!r.group_fractions.empty()) {
        os << "\ngroup distribution:\n";
        for (const auto& [g, v] : r.group_fractions)
            os << "  " << to_string(g) << "  " << fmt3(100.0 * v) << "%\n";
    }
    return os.str();
}

std::string comparison_to_json(const ComparisonResult& c) {
    nlohmann::json j;
    j["configs"] = c.config_ids;
    j["friedman"] = {{"statistic", c.friedman.statistic}, {"p_value", c.friedman.p_value}};
    j["significant"] = c.significant;
    j["best_config"] = c.best_config;
    j["mean_mcc"] = c.mean_mcc;
    j["mean_rank"] = c.mean_rank;
    j["holm_p_vs_best"] = c.p_vs_best;
    j["indistinguishable_from_best"] = c.indistinguishable_from_best;
    return j.dump(2);
}

std::string comparison_to_text(const ComparisonResult& c) {
    std::ostringstream os;
    os << "Friedman chi2 = " << fmt3(c.friedman.statistic) << ", p = " << c.friedman.p_value
       << (c.significant ? "  (significant)" : "  (no significant difference)") << "\n";
    os << "config | mean MCC | mean rank | Holm p vs best\n";
    for (const auto& id : c.config_ids) {
        os << id << " | " << fmt3(c.mean_mcc.at(id)) << " | " << fmt3(c.mean_rank.at(id)) << " | ";
        if (id == c.best_config)
            os << "(best)";
        else if (c.p_vs_best.count(id))
            os << c.p_vs_best.at(id);
        else
            os << "-";
        os << "\n";
    }
    os << "indistinguishable from best:";
    for (const auto& id : c.indistinguishable_from_best) os << " " << id;
    os << "\n";
    return os.str();
}

std::string records_to_csv(const std::vector<EvaluationRecord>& records) {
    std::ostringstream os;
    os << "rep_id,config_id,tp,fp,fn,tn,macro_f1,mcc,accuracy,failed,fail_reason\n";
    os.precision(17);
    for (const auto& r : records) {
        std::string reason = r.fail_reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        os << r.rep_id << ',' << r.config_id << ',' << r.table.tp << ',' << r.table.fp << ','
           << r.table.fn << ',' << r.table.tn << ',' << r.macro_f1 << ',' << r.mcc << ','
           << r.accuracy << ',' << (r.failed ? 1 : 0) << ',' << reason << '\n';
    }
    return os.str();
}

std::vector<EvaluationRecord> records_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ParseError("records csv: empty input");
    std::vector<EvaluationRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cells.push_back(cur);
        if (cells.size() < 10) throw ParseError("records csv: malformed line: " + line);
        EvaluationRecord r;
        r.rep_id = std::stoi(cells[0]);
        r.config_id = cells[1];
        r.table.tp = std::stoll(cells[2]);
        r.table.fp = std::stoll(cells[3]);
        r.table.fn = std::stoll(cells[4]);
        r.table.tn = std::stoll(cells[5]);
        r.macro_f1 = std::stod(cells[6]);
        r.mcc = std::stod(cells[7]);
        r.accuracy = std::stod(cells[8]);
        r.failed = cells[9] == "1";
        if (cells.size() > 10) r.fail_reason = cells[10];
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace voxsel
