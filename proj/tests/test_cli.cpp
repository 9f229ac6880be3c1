#include "shfm/cli.hpp"
#include "shfm/libsvm.hpp"
#include "shfm/model_io.hpp"
#include "shfm/synthetic.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "shfm");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = shfm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return { code, out.str(), err.str() };
}

class Cli : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / ("shfm_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
        fs::create_directories(dir_);
        shfm::PlantedConfig config;
        config.dim = 100;
        config.samples = 600;
        config.active = 8;
        const auto task = shfm::generate_planted(config);
        const auto [train_set, test_set] = shfm::split_head(task.data, 500);
        shfm::write_text_file(path("train.svm"), shfm::write_libsvm(train_set));
        shfm::write_text_file(path("test.svm"), shfm::write_libsvm(test_set));
        shfm::write_text_file(path("cls.svm"), "0 1:1 3:1\n1 2:1 3:1\n2 1:1 2:1\n0 1:1\n1 2:1\n");
    }

    static void TearDownTestSuite() { fs::remove_all(dir_); }

    static std::string path(const std::string &name) { return (dir_ / name).string(); }

    static std::string train_model(const std::string &model, const std::string &kind = "shfm") {
        const auto r = run({ "train", "--train", path("train.svm"), "--test", path("test.svm"), "--model", kind, "--epochs", "2", "--out", path(model) });
        EXPECT_EQ(r.code, 0) << r.err;
        return path(model);
    }

    static inline fs::path dir_;
};

std::size_t line_count(const std::string &text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_F(Cli, TrainThenEvaluate) {
    const auto model = train_model("m.txt");
    const auto r = run({ "evaluate", "--model", model, "--data", path("test.svm") });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("rmse="), std::string::npos);
    EXPECT_NE(r.out.find("zero_rows="), std::string::npos);
}

TEST_F(Cli, TraceAndStateFiles) {
    const auto r = run({ "train", "--train", path("train.svm"), "--model", "sha2", "--epochs", "3", "--out", path("s.txt"), "--trace", path("s.csv"),
                         "--save-state" });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(shfm::read_text_file(path("s.csv"))), 4u);
    const auto loaded = shfm::load_model(shfm::read_text_file(path("s.txt")));
    EXPECT_TRUE(loaded.state.has_value());
}

TEST_F(Cli, PredictIsByteStable) {
    const auto a = train_model("pa.txt");
    const auto b = train_model("pb.txt");
    EXPECT_EQ(shfm::read_text_file(a), shfm::read_text_file(b));
    const auto ra = run({ "predict", "--model", a, "--data", path("test.svm") });
    const auto rb = run({ "predict", "--model", b, "--data", path("test.svm"), "--out", path("pred.txt") });
    ASSERT_EQ(ra.code, 0);
    ASSERT_EQ(rb.code, 0);
    EXPECT_EQ(ra.out, shfm::read_text_file(path("pred.txt")));
    EXPECT_EQ(line_count(ra.out), 100u);
}

TEST_F(Cli, ClassificationPredictEmitsClassAndScores) {
    const auto t = run({ "train", "--train", path("cls.svm"), "--task", "classification", "--model", "fm", "--epochs", "2", "--out", path("c.txt") });
    ASSERT_EQ(t.code, 0) << t.err;
    const auto r = run({ "predict", "--model", path("c.txt"), "--data", path("cls.svm") });
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream first(r.out.substr(0, r.out.find('\n')));
    std::vector<std::string> fields;
    for (std::string f; first >> f;) {
        fields.push_back(f);
    }
    EXPECT_EQ(fields.size(), 4u);
}

TEST_F(Cli, ModelFileRoundTripsBytes) {
    const auto model = train_model("rt.txt", "anova2");
    const std::string text = shfm::read_text_file(model);
    EXPECT_EQ(shfm::save_model(shfm::load_model(text).model), text);
}

TEST_F(Cli, AuditOnFmIsUsageError) {
    const auto model = train_model("fm.txt", "fm");
    const auto r = run({ "audit", "--model", model });
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("hierarchical model required"), std::string::npos);
    EXPECT_EQ(line_count(r.err), 1u);
}

TEST_F(Cli, AuditReport) {
    const auto model = train_model("au.txt");
    const auto r = run({ "audit", "--model", model, "--exhaustive", "--tol", "1e-8" });
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("violating_pairs="), std::string::npos);
}

TEST_F(Cli, EvaluateWithLargerDimensionIsDataError) {
    const auto model = train_model("dim.txt");
    shfm::write_text_file(path("wide.svm"), "0.5 1:1 500:1\n");
    const auto r = run({ "evaluate", "--model", model, "--data", path("wide.svm") });
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(line_count(r.err), 1u);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({ "train", "--train", path("train.svm"), "--out", path("x"), "--bogus", "1" }).code, 1);
    EXPECT_EQ(run({ "train", "--train", path("train.svm"), "--out", path("x"), "--model", "svm" }).code, 1);
    EXPECT_EQ(run({ "train", "--train", path("train.svm"), "--out", path("x"), "--epochs", "0" }).code, 1);
    EXPECT_EQ(run({ "train", "--train", path("train.svm"), "--out", path("x"), "--l1", "-1" }).code, 1);
    EXPECT_EQ(run({ "predict", "--data", path("train.svm") }).code, 1);
}

TEST_F(Cli, DataErrors) {
    shfm::write_text_file(path("bad.svm"), "1 1:1\n1 3:1 2:1\n");
    const auto r = run({ "train", "--train", path("bad.svm"), "--out", path("x") });
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    EXPECT_EQ(run({ "train", "--train", path("missing.svm"), "--out", path("x") }).code, 2);
    shfm::write_text_file(path("junk.txt"), "junk\n");
    EXPECT_EQ(run({ "evaluate", "--model", path("junk.txt"), "--data", path("test.svm") }).code, 2);
}

TEST_F(Cli, NumericFailure) {
    shfm::write_text_file(path("huge.svm"), "1e300 1:1\n");
    const auto r = run({ "train", "--train", path("huge.svm"), "--model", "linear", "--out", path("x") });
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(line_count(r.err), 1u);
}

TEST_F(Cli, GridSearchWritesTraces) {
    shfm::write_text_file(path("grid.cfg"), "l1=1e-4,1e-2\n");
    const auto r = run({ "grid-search", "--config", path("grid.cfg"), "--train", path("train.svm"), "--validation", path("test.svm"), "--epochs", "2",
                         "--out", path("grid.csv"), "--trace-dir", path("traces") });
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(shfm::read_text_file(path("grid.csv"))), 3u);
    EXPECT_TRUE(fs::exists(path("traces/l1=1e-04.csv"))) << r.out;
    EXPECT_TRUE(fs::exists(path("traces/l1=0.01.csv")));
}
