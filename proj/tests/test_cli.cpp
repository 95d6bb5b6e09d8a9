#include "dualteach/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dualteach/dataset.hpp"
#include "dualteach/experiment.hpp"

using namespace dualteach;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dualteach_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("run subcommand produces summary and history CSVs") {
    TempDir tmp("run");
    int rc = cli_main({"run", "--synthetic", "120,3,2.5,0.05", "--method", "dual_teaching",
                       "--base", "lr", "--ratio", "0.3", "--seed", "5", "--max-generations", "6",
                       "--out", tmp.file("out")});
    CHECK(rc == kExitOk);

    std::string summary = slurp(tmp.file("out") + "/summary.csv");
    auto ls = lines_of(summary);
    REQUIRE(ls.size() >= 3);
    CHECK(ls[0].rfind("# config_hash=", 0) == 0);
    CHECK(ls[1] ==
          "dataset,method,base,teacher_mode,labeled_ratio,seed,generations_run,"
          "final_test_accuracy,baseline_supervised_accuracy,delta");
    CHECK(ls[2].rfind("synthetic,dual_teaching,lr,balanced_tuned,0.3,5,", 0) == 0);

    bool found_history = false;
    for (const auto& entry : fs::directory_iterator(tmp.file("out")))
        if (entry.path().filename().string().rfind("history_", 0) == 0) {
            found_history = true;
            auto hl = lines_of(slurp(entry.path().string()));
            REQUIRE(hl.size() >= 3);
            CHECK(hl[0].rfind("# config_hash=", 0) == 0);
            CHECK(hl[1] ==
                  "generation,p1,r1,p2,r2,T,assumptions_met,retraining_set_size,"
                  "precision_labeled,recall_labeled,precision_unlabeled,recall_unlabeled,"
                  "accuracy_test");
        }
    CHECK(found_history);
}

TEST_CASE("run output is byte-deterministic") {
    TempDir tmp("det");
    std::vector<std::string> args{"run",   "--synthetic", "80,2,2,0.1", "--method",
                                  "dual_teaching,self_training", "--base", "svm",
                                  "--ratio", "0.25", "--seed", "3", "--out", ""};
    args.back() = tmp.file("a");
    REQUIRE(cli_main(args) == kExitOk);
    args.back() = tmp.file("b");
    REQUIRE(cli_main(args) == kExitOk);
    CHECK(slurp(tmp.file("a") + "/summary.csv") == slurp(tmp.file("b") + "/summary.csv"));
}

TEST_CASE("sweep appends mean rows per group") {
    TempDir tmp("sweep");
    int rc = cli_main({"run", "--synthetic", "80,2,2.5,0.05", "--method", "supervised", "--base",
                       "lr", "--ratios", "0.3,0.6", "--seeds", "1,2,3", "--out", tmp.file("plain")});
    REQUIRE(rc == kExitOk);
    rc = cli_main({"sweep", "--synthetic", "80,2,2.5,0.05", "--method", "supervised", "--base",
                   "lr", "--ratios", "0.3,0.6", "--seeds", "1,2,3", "--out", tmp.file("means")});
    REQUIRE(rc == kExitOk);
    auto plain = lines_of(slurp(tmp.file("plain") + "/summary.csv"));
    auto means = lines_of(slurp(tmp.file("means") + "/summary.csv"));
    CHECK(plain.size() == 2 + 6);        // comment + header + 2 ratios * 3 seeds
    CHECK(means.size() == 2 + 6 + 2);    // ... + one mean row per (method,base,ratio)
    std::size_t mean_rows = 0;
    for (const auto& l : means) mean_rows += l.find(",mean,") != std::string::npos;
    CHECK(mean_rows == 2);
}

TEST_CASE("config file is applied and flags override it") {
    TempDir tmp("cfg");
    {
        std::ofstream cfg(tmp.file("cfg.json"));
        cfg << R"({"synthetic":{"n":80,"dim":2,"separation":2.5,"flip":0.05},
                   "methods":["supervised"],"bases":["svm"],"ratios":[0.4],
                   "seeds":[7],"out":")" << tmp.file("from_cfg") << R"("})";
    }
    REQUIRE(cli_main({"run", "--config", tmp.file("cfg.json")}) == kExitOk);
    auto ls = lines_of(slurp(tmp.file("from_cfg") + "/summary.csv"));
    REQUIRE(ls.size() == 3);
    CHECK(ls[2].find("supervised,svm") != std::string::npos);
    CHECK(ls[2].find(",0.4,7,") != std::string::npos);

    // --ratio wins over the config file
    REQUIRE(cli_main({"run", "--config", tmp.file("cfg.json"), "--ratio", "0.8", "--out",
                      tmp.file("override")}) == kExitOk);
    auto ov = lines_of(slurp(tmp.file("override") + "/summary.csv"));
    CHECK(ov[2].find(",0.8,7,") != std::string::npos);
}

TEST_CASE("save-model writes a reloadable model") {
    TempDir tmp("model");
    REQUIRE(cli_main({"run", "--synthetic", "60,2,3,0", "--method", "supervised", "--base", "lr",
                      "--ratio", "0.5", "--seed", "1", "--out", tmp.file("out"), "--save-model",
                      tmp.file("model.json")}) == kExitOk);
    Model m = model_from_json(slurp(tmp.file("model.json")));
    CHECK(m.feature_dim == 2);
    CHECK(m.trained_on_count > 0);
}

TEST_CASE("dynamics subcommand modes") {
    TempDir tmp("dyn");
    SUBCASE("trajectory") {
        REQUIRE(cli_main({"dynamics", "--mode", "trajectory", "--quality", "0.8,0.5,0.8,0.5",
                          "--e0", "100,100", "--steps", "5", "--out", tmp.file("t.csv")}) ==
                kExitOk);
        auto ls = lines_of(slurp(tmp.file("t.csv")));
        REQUIRE(ls.size() == 7);
        CHECK(ls[0] == "step,alpha,beta");
        CHECK(ls[1] == "0,100,100");
        CHECK(ls[2] == "1,62.5,62.5");
    }
    SUBCASE("precision surface") {
        REQUIRE(cli_main({"dynamics", "--mode", "surface_precision", "--resolution", "5",
                          "--fixed", "0.5,0.5", "--out", tmp.file("s.csv")}) == kExitOk);
        auto ls = lines_of(slurp(tmp.file("s.csv")));
        REQUIRE(ls.size() == 26);
        CHECK(ls[0] == "p_plus,p_minus,lambda_max");
    }
    SUBCASE("oracle") {
        REQUIRE(cli_main({"dynamics", "--mode", "oracle", "--quality", "0.9,0.6,0.9,0.6", "--n",
                          "500", "--steps", "3", "--trials", "5", "--seed", "2", "--out",
                          tmp.file("o.csv")}) == kExitOk);
        auto ls = lines_of(slurp(tmp.file("o.csv")));
        REQUIRE(ls.size() == 5);
        CHECK(ls[0] == "step,alpha_mean,beta_mean,alpha_se,beta_se,warnings");
    }
    SUBCASE("unknown mode is a config error") {
        CHECK(cli_main({"dynamics", "--mode", "nonsense"}) == kExitConfigError);
    }
}

TEST_CASE("inspect prints dataset statistics") {
    TempDir tmp("inspect");
    {
        std::ofstream data(tmp.file("tiny.txt"));
        data << "+1 1:1 3:2\n-1 2:1\n+1 1:0.5\n";
    }
    CHECK(cli_main({"inspect", "--dataset", tmp.file("tiny.txt")}) == kExitOk);
}

TEST_CASE("error exit codes") {
    TempDir tmp("err");
    // unknown subcommand / flag: config error
    CHECK(cli_main({"frobnicate"}) == kExitConfigError);
    CHECK(cli_main({"run", "--no-such-flag"}) == kExitConfigError);
    // invalid flag values: config error
    CHECK(cli_main({"run", "--synthetic", "80,2", "--out", tmp.file("x")}) == kExitConfigError);
    CHECK(cli_main({"run", "--synthetic", "80,2,2,0", "--ratio", "0", "--out", tmp.file("x")}) ==
          kExitConfigError);
    // missing dataset file: data error
    CHECK(cli_main({"run", "--dataset", tmp.file("missing.txt"), "--out", tmp.file("x")}) ==
          kExitDataError);
    // malformed dataset: data error
    {
        std::ofstream bad(tmp.file("bad.txt"));
        bad << "+1 2:1 1:1\n";
    }
    CHECK(cli_main({"run", "--dataset", tmp.file("bad.txt"), "--out", tmp.file("x")}) ==
          kExitDataError);
    CHECK(cli_main({"inspect", "--dataset", tmp.file("missing.txt")}) == kExitDataError);
}
