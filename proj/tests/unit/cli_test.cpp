#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "mcfa/data.hpp"
#include "mcfa/model.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MCFA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mcfa_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, SimulateIsDeterministic) {
  const auto a = fresh_dir("sim_a"), b = fresh_dir("sim_b");
  const std::string common = "--command simulate --m1 20 --m2 15 --classes 3 --n 500 --n-test 200 --seed 4";
  ASSERT_EQ(run(common + " --out " + a.string()), 0);
  ASSERT_EQ(run(common + " --out " + b.string()), 0);
  for (const char* f : {"train.mcfa", "test.mcfa", "truth.mcfat"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto train = mcfa::read_dataset(a / "train.mcfa");
  EXPECT_EQ(train.size(), 500u);
  EXPECT_EQ(train.classes(), 3);
  EXPECT_EQ(mcfa::read_dataset(a / "test.mcfa").size(), 200u);
  EXPECT_EQ(mcfa::read_tensor(a / "truth.mcfat").slice_count(), 2);
}

TEST(Cli, FitAndEvaluateRoundTrip) {
  const auto dir = fresh_dir("fit");
  ASSERT_EQ(run("--command simulate --m1 20 --m2 15 --classes 2 --n 800 --n-test 300 --seed 5 --out " +
                dir.string()),
            0);
  ASSERT_EQ(run("--command fit --model logistic --data " + (dir / "train.mcfa").string() +
                " --lambda 0.01 --out " + dir.string()),
            0);
  const auto model = mcfa::load_model(dir / "model.json");
  EXPECT_EQ(model.kind, mcfa::ModelKind::logistic);
  EXPECT_EQ(model.lambda, 0.01);
  ASSERT_EQ(run("--command evaluate --data " + (dir / "test.mcfa").string() + " --model-file " +
                (dir / "model.json").string() + " --truth " + (dir / "truth.mcfat").string() +
                " --out " + dir.string()),
            0);
  std::ifstream in(dir / "evaluation.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j.contains("prediction_error"));
  EXPECT_TRUE(j["kl"].is_number());
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("codes");
  EXPECT_EQ(run("--command nonsense"), 2);
  EXPECT_EQ(run("--command simulate --classes 1 --out " + dir.string()), 2);
  EXPECT_EQ(run("--command fit --data " + (dir / "missing.mcfa").string() + " --out " + dir.string()),
            1);
  {
    std::ofstream bad(dir / "bad.mcfa", std::ios::binary);
    bad << "garbage";
  }
  EXPECT_EQ(run("--command fit --data " + (dir / "bad.mcfa").string() + " --out " + dir.string()),
            3);
  EXPECT_EQ(run("--command simulate --m1 5 --m2 5 --n 50 --n-test 0 --max-iters 1 --out " + dir.string()),
            0);
  EXPECT_EQ(run("--command fit --data " + (dir / "train.mcfa").string() +
                " --lambda 0.001 --max-iters 1 --out " + dir.string()),
            5);
}
