// voxsel: feature selection and neural-net classification experiments over
// person-grouped voice-feature datasets.
//
// Exit codes: 0 success, 1 internal error, 2 I/O or argument error,
// 3 config/consistency error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "voxsel/config.hpp"
#include "voxsel/experiment.hpp"
#include "voxsel/svg.hpp"

namespace fs = std::filesystem;
using namespace voxsel;

namespace {

int log_level() {
    const char* v = std::getenv("VOXSEL_LOG");
    if (!v) return 1;
    try {
        return std::stoi(v);
    } catch (...) {
        return 1;
    }
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "voxsel: " << msg << "\n";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

int cmd_inspect(const std::string& dataset_path, const std::string& id_column,
                const std::string& label_column) {
    LoadOptions opts;
    opts.id_column = id_column;
    opts.label_column = label_column;
    Dataset d = load_dataset(dataset_path, opts);

    auto subject_label = d.subject_labels();
    std::size_t healthy_subjects = 0;
    for (const auto& [s, lab] : subject_label)
        if (lab == 0) ++healthy_subjects;
    std::size_t pd_rows = 0;
    for (int v : d.labels) pd_rows += static_cast<std::size_t>(v);

    std::cout << "samples        " << d.n_samples() << "\n"
              << "features       " << d.n_features() << "\n"
              << "subjects       " << d.subject_count() << "\n"
              << "healthy subj   " << healthy_subjects << "\n"
              << "pd subj        " << d.subject_count() - healthy_subjects << "\n"
              << "class balance  " << d.n_samples() - static_cast<Eigen::Index>(pd_rows)
              << " healthy rows / " << pd_rows << " pd rows\n";
    if (d.ragged_subject_groups)
        std::cout << "warning        subjects contribute unequal sample counts\n";

    std::map<FeatureGroup, int> group_counts;
    for (auto g : d.group_of) ++group_counts[g];
    std::cout << "groups        ";
    for (const auto& [g, n] : group_counts) std::cout << " " << to_string(g) << ":" << n;
    std::cout << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override,
            std::optional<std::string> dataset_override, int jobs) {
    RunConfig cfg = load_run_config(config_path);
    if (seed_override) cfg.spec.master_seed = *seed_override;
    if (dataset_override) cfg.dataset_path = *dataset_override;
    cfg.spec.jobs = jobs;

    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    RunManifest manifest;
    manifest.config_digest = config_digest(cfg.raw_text);
    manifest.tool_version = kToolVersion;
    manifest.master_seed = cfg.spec.master_seed;
    manifest.started_at = iso8601_utc_now();

    try {
        LoadOptions lo;
        lo.id_column = cfg.id_column;
        lo.label_column = cfg.label_column;
        lo.group_override_path = cfg.group_override;
        info("loading " + cfg.dataset_path);
        Dataset d = load_dataset(cfg.dataset_path, lo);

        UnionOutcome unioned;
        StageOneResult s1;
        s1.spec = cfg.spec;
        if (cfg.spec.method == SelectionMethod::Baseline) {
            // no selection stage: stage 2 trains on the full feature set
            unioned.final_set.resize(static_cast<std::size_t>(d.n_features()));
            for (std::size_t f = 0; f < unioned.final_set.size(); ++f)
                unioned.final_set[f] = static_cast<int>(f);
            unioned.frequencies.assign(unioned.final_set.size(), 1.0);
            unioned.threshold = 0.0;
            unioned.status = UnionStatus::InRange;
        } else {
            info("stage 1: " + std::to_string(cfg.spec.repetitions) + " repetitions");
            s1 = stage1(d, cfg.spec);
            write_file(out / "stage1_records.csv", [&] {
                std::vector<EvaluationRecord> recs;
                for (const auto& rep : s1.repetitions) recs.push_back(rep.record);
                return records_to_csv(recs);
            }());
            auto sets = s1.selected_sets();
            if (sets.empty()) throw TrainingFailure("all stage-1 repetitions failed");
            unioned = feature_union(sets, static_cast<std::size_t>(d.n_features()),
                                    cfg.union_lower, cfg.union_upper);
        }
        write_file(out / "union.json", union_to_json(unioned));

        ExperimentSpec s2spec = cfg.spec;
        s2spec.repetitions = cfg.reps_stage2;
        info("stage 2: " + std::to_string(s2spec.repetitions) + " repetitions on " +
             std::to_string(unioned.final_set.size()) + " features");
        auto s2 = stage2(d, unioned, s2spec);
        write_file(out / "stage2_records.csv", records_to_csv(s2));

        ExperimentReport report = make_report(cfg.spec, s1, unioned, s2, d.group_of);
        write_file(out / "report.json", report_to_json(report));
        write_file(out / "report.txt", report_to_text(report));

        if (cfg.spec.method != SelectionMethod::Baseline) {
            auto sets = s1.selected_sets();
            write_file(out / "group_distribution_all.svg",
                       pie_chart_svg(group_distribution(sets, d.group_of),
                                     "Selected features by group (all)"));
            write_file(out / "group_distribution_top30.svg",
                       pie_chart_svg(group_distribution(sets, d.group_of, 30),
                                     "Selected features by group (first 30)"));
        }

        manifest.finished_at = iso8601_utc_now();
        manifest.outputs["union"] = (out / "union.json").string();
        manifest.outputs["stage2_records"] = (out / "stage2_records.csv").string();
        manifest.outputs["report_json"] = (out / "report.json").string();
        manifest.outputs["report_text"] = (out / "report.txt").string();
        if (cfg.spec.method != SelectionMethod::Baseline)
            manifest.outputs["stage1_records"] = (out / "stage1_records.csv").string();
        write_file(out / "manifest.json", manifest_to_json(manifest));

        std::cout << report_to_text(report);
        return 0;
    } catch (...) {
        // keep partial artifacts, mark the run
        manifest.finished_at = iso8601_utc_now();
        try {
            write_file(out / "manifest.json", manifest_to_json(manifest));
            write_file(out / "FAILED", "run failed; see stderr\n");
        } catch (...) {
        }
        throw;
    }
}

int cmd_compare(const std::vector<std::string>& record_paths,
                const std::optional<std::string>& out_path, double alpha) {
    std::map<std::string, std::vector<double>> mcc_by_config;
    std::size_t reps = 0;
    bool first = true;
    for (const auto& path : record_paths) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open records file: " + path);
        std::ostringstream os;
        os << in.rdbuf();
        auto records = records_from_csv(os.str());
        std::vector<double> mccs;
        std::string id = fs::path(path).stem().string();
        for (const auto& r : records) {
            if (r.failed) continue;
            if (!r.config_id.empty()) id = r.config_id;
            mccs.push_back(r.mcc);
        }
        if (mcc_by_config.count(id)) id += " (" + path + ")";
        if (first) {
            reps = mccs.size();
            first = false;
        } else if (mccs.size() != reps) {
            throw ConfigError("records in " + path + " have " + std::to_string(mccs.size()) +
                              " usable repetitions, expected " + std::to_string(reps));
        }
        mcc_by_config[id] = std::move(mccs);
    }

    ComparisonResult c = compare_models(mcc_by_config, alpha);
    std::cout << comparison_to_text(c);
    if (out_path) write_file(*out_path, comparison_to_json(c));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voice-feature selection and classification experiments"};
    app.require_subcommand(1);

    auto* inspect = app.add_subcommand("inspect", "summarize a dataset file");
    std::string inspect_path, id_column = "id", label_column = "class";
    inspect->add_option("dataset", inspect_path, "CSV dataset path")->required();
    inspect->add_option("--id-column", id_column, "subject id column name");
    inspect->add_option("--label-column", label_column, "class label column name");

    auto* run = app.add_subcommand("run", "run the two-stage experiment flow");
    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> dataset_override;
    int jobs = 1;
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_override, "override the config's master seed");
    run->add_option("--dataset", dataset_override, "override the config's dataset path");
    run->add_option("--jobs", jobs, "concurrent repetitions")->check(CLI::Range(1, 1024));

    auto* compare = app.add_subcommand("compare", "compare per-repetition record files");
    std::vector<std::string> record_paths;
    std::optional<std::string> compare_out;
    double alpha = 0.05;
    compare->add_option("records", record_paths, "two or more stage-2 records CSV files")
        ->required()
        ->expected(2, -1);
    compare->add_option("--out", compare_out, "write the comparison as JSON");
    compare->add_option("--alpha", alpha, "significance level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*inspect) return cmd_inspect(inspect_path, id_column, label_column);
        if (*run) return cmd_run(config_path, out_dir, seed_override, dataset_override, jobs);
        if (*compare) return cmd_compare(record_paths, compare_out, alpha);
    } catch (const ConfigError& e) {
        std::cerr << "voxsel: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "voxsel: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "voxsel: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "voxsel: " << e.what() << "\n";
        return 2;
    } catch (const IntegrityError& e) {
        std::cerr << "voxsel: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "voxsel: internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
