#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "doctest.h"
#include "helpers.hpp"
#include "voxsel/experiment.hpp"

using namespace voxsel;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    testutil::TempFile capture("", ".out");
    const std::string cmd =
        std::string(VOXSEL_CLI_PATH) + " " + args + " > " + capture.path() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(capture.path());
    std::ostringstream os;
    os << in.rdbuf();
    return {WEXITSTATUS(status), os.str()};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string dataset_csv(const Dataset& d) {
    std::ostringstream os;
    os << "id";
    for (const auto& c : d.column_names) os << "," << c;
    os << ",class\n";
    os.precision(17);
    for (Eigen::Index r = 0; r < d.n_samples(); ++r) {
        os << d.subject_ids[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < d.n_features(); ++c) os << "," << d.features(r, c);
        os << "," << d.labels[static_cast<std::size_t>(r)];
        os << "\n";
    }
    return os.str();
}

std::string toy_config(const std::string& dataset_path, const std::string& extra = "") {
    std::ostringstream os;
    os << "# toy experiment\n"
       << "dataset = " << dataset_path << "\n"
       << "method = pcc\n"
       << "top = 2\n"
       << "algorithm = LM\n"
       << "hidden_units = 5\n"
       << "max_epochs = 50\n"
       << "reps_stage1 = 2\n"
       << "reps_stage2 = 2\n"
       << "union_lower = 1\n"
       << "union_upper = 50\n"
       << "seed = 7\n"
       << extra;
    return os.str();
}

}  // namespace

TEST_CASE("inspect prints the dataset summary") {
    Dataset d = testutil::synthetic_grouped(10, 3, 4, 2.0, 1, 0.4);
    testutil::TempFile data(dataset_csv(d));
    auto r = run_cli("inspect " + data.path());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("samples        30") != std::string::npos);
    CHECK(r.out.find("features       4") != std::string::npos);
    CHECK(r.out.find("subjects       10") != std::string::npos);
    CHECK(r.out.find("healthy subj   4") != std::string::npos);
}

TEST_CASE("inspect exit codes: missing file and bad data") {
    auto r = run_cli("inspect /nonexistent/never.csv");
    CHECK(r.exit_code == 2);

    testutil::TempFile bad("id,f0,class\na,1,0\na,2,1\n");  // inconsistent labels
    auto r2 = run_cli("inspect " + bad.path());
    CHECK(r2.exit_code == 3);
}

TEST_CASE("run produces the artifact set and is byte-reproducible") {
    Dataset d = testutil::synthetic_grouped(14, 3, 5, 3.0, 4);
    testutil::TempFile data(dataset_csv(d));
    testutil::TempFile config(toy_config(data.path()), ".cfg");
    testutil::TempDir out1, out2;

    auto r1 = run_cli("run --config " + config.path() + " --out " + out1.path());
    INFO(r1.out);
    REQUIRE(r1.exit_code == 0);

    const fs::path base(out1.path());
    for (const char* name : {"manifest.json", "stage1_records.csv", "stage2_records.csv",
                             "union.json", "report.json", "report.txt",
                             "group_distribution_all.svg", "group_distribution_top30.svg"})
        CHECK(fs::exists(base / name));
    CHECK_FALSE(fs::exists(base / "FAILED"));

    // records parse back through the library reader: 2 repetitions
    auto records = records_from_csv(read_file(base / "stage1_records.csv"));
    CHECK(records.size() == 2);
    auto union_outcome = union_from_json(read_file(base / "union.json"));
    CHECK(!union_outcome.final_set.empty());
    CHECK(read_file(base / "group_distribution_all.svg").substr(0, 4) == "<svg");

    auto manifest = nlohmann::json::parse(read_file(base / "manifest.json"));
    CHECK(manifest.at("tool_version").get<std::string>() == "1.0.0");
    CHECK(manifest.at("outputs").size() >= 4);
    auto report = nlohmann::json::parse(read_file(base / "report.json"));
    CHECK(report.at("stage2_repetitions").get<int>() == 2);
    CHECK(report.at("mcc").contains("mean"));

    // rerun: identical records and union bytes
    auto r2 = run_cli("run --config " + config.path() + " --out " + out2.path());
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file(base / "stage1_records.csv") ==
          read_file(fs::path(out2.path()) / "stage1_records.csv"));
    CHECK(read_file(base / "stage2_records.csv") ==
          read_file(fs::path(out2.path()) / "stage2_records.csv"));
    CHECK(read_file(base / "union.json") == read_file(fs::path(out2.path()) / "union.json"));

    // --jobs must not change outputs
    testutil::TempDir out3;
    auto r3 = run_cli("run --config " + config.path() + " --out " + out3.path() + " --jobs 3");
    REQUIRE(r3.exit_code == 0);
    CHECK(read_file(base / "stage2_records.csv") ==
          read_file(fs::path(out3.path()) / "stage2_records.csv"));

    // --seed override changes them
    testutil::TempDir out4;
    auto r4 = run_cli("run --config " + config.path() + " --out " + out4.path() + " --seed 99");
    REQUIRE(r4.exit_code == 0);
    CHECK(read_file(base / "stage2_records.csv") !=
          read_file(fs::path(out4.path()) / "stage2_records.csv"));
}

TEST_CASE("baseline runs skip stage 1 and use every feature") {
    Dataset d = testutil::synthetic_grouped(12, 3, 4, 3.0, 6);
    testutil::TempFile data(dataset_csv(d));
    std::ostringstream cfg;
    cfg << "dataset = " << data.path() << "\nmethod = baseline\nhidden_units = 4\n"
        << "max_epochs = 40\nreps_stage2 = 2\nseed = 3\n";
    testutil::TempFile config(cfg.str(), ".cfg");
    testutil::TempDir out;
    auto r = run_cli("run --config " + config.path() + " --out " + out.path());
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK_FALSE(fs::exists(fs::path(out.path()) / "stage1_records.csv"));
    auto u = union_from_json(read_file(fs::path(out.path()) / "union.json"));
    CHECK(u.final_set.size() == 4);
}

TEST_CASE("config errors exit with code 3 and unknown keys are rejected") {
    Dataset d = testutil::synthetic_grouped(8, 3, 3, 2.0, 2);
    testutil::TempFile data(dataset_csv(d));
    testutil::TempFile config(toy_config(data.path(), "mystery_knob = 5\n"), ".cfg");
    testutil::TempDir out;
    auto r = run_cli("run --config " + config.path() + " --out " + out.path());
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("mystery_knob") != std::string::npos);

    testutil::TempFile bad_value(toy_config(data.path(), "hidden_units_xxx\n"), ".cfg");
    auto r2 = run_cli("run --config " + bad_value.path() + " --out " + out.path());
    CHECK(r2.exit_code == 3);
}

TEST_CASE("run failure leaves a FAILED marker and exits 2 on a missing dataset") {
    testutil::TempFile config(toy_config("/nonexistent/never.csv"), ".cfg");
    testutil::TempDir out;
    auto r = run_cli("run --config " + config.path() + " --out " + out.path());
    CHECK(r.exit_code == 2);
    CHECK(fs::exists(fs::path(out.path()) / "FAILED"));
    CHECK(fs::exists(fs::path(out.path()) / "manifest.json"));
}

TEST_CASE("compare: identical files, dominance, and error paths") {
    // build two record files from synthetic sequences
    std::vector<EvaluationRecord> low, high;
    Rng rng(12);
    for (int i = 0; i < 12; ++i) {
        EvaluationRecord r = evaluate(i, "low", {1, 1, 0, 0}, {1, 0, 0, 0});
        r.mcc = 0.5 + 0.02 * uniform01(rng);
        low.push_back(r);
        EvaluationRecord s = evaluate(i, "high", {1, 1, 0, 0}, {1, 1, 0, 0});
        s.mcc = r.mcc + 0.3;
        high.push_back(s);
    }
    testutil::TempFile f_low(records_to_csv(low));
    testutil::TempFile f_high(records_to_csv(high));

    auto same = run_cli("compare " + f_low.path() + " " + f_low.path());
    CHECK(same.exit_code == 0);
    CHECK(same.out.find("no significant difference") != std::string::npos);

    testutil::TempFile json_out("", ".json");
    auto dom = run_cli("compare " + f_low.path() + " " + f_high.path() + " --out " +
                       json_out.path());
    CHECK(dom.exit_code == 0);
    CHECK(dom.out.find("significant") != std::string::npos);
    CHECK(dom.out.find("indistinguishable from best: high") != std::string::npos);
    CHECK(read_file(json_out.path()).find("\"best_config\": \"high\"") != std::string::npos);

    // mismatched repetition counts -> exit 3
    std::vector<EvaluationRecord> short_series(low.begin(), low.begin() + 5);
    testutil::TempFile f_short(records_to_csv(short_series));
    auto mis = run_cli("compare " + f_low.path() + " " + f_short.path());
    CHECK(mis.exit_code == 3);

    // fewer than two files is a usage error
    auto usage = run_cli("compare " + f_low.path());
    CHECK(usage.exit_code == 2);
}

TEST_CASE("manifest digest tracks config bytes") {
    Dataset d = testutil::synthetic_grouped(10, 3, 3, 3.0, 8);
    testutil::TempFile data(dataset_csv(d));
    testutil::TempFile cfg_a(toy_config(data.path()), ".cfg");
    testutil::TempFile cfg_b(toy_config(data.path(), "# trailing comment\n"), ".cfg");
    testutil::TempDir out_a, out_b;
    REQUIRE(run_cli("run --config " + cfg_a.path() + " --out " + out_a.path()).exit_code == 0);
    REQUIRE(run_cli("run --config " + cfg_b.path() + " --out " + out_b.path()).exit_code == 0);

    auto digest_of = [](const std::string& manifest) {
        auto at = manifest.find("config_digest");
        REQUIRE(at != std::string::npos);
        return manifest.substr(at, 40);
    };
    const std::string da = digest_of(read_file(fs::path(out_a.path()) / "manifest.json"));
    const std::string db = digest_of(read_file(fs::path(out_b.path()) / "manifest.json"));
    CHECK(da != db);
}
