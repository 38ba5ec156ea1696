#include "rh/csv_io.hpp"
#include "rh/image_io.hpp"
#include "rh/metrics.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace rh;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(RHD_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("rhd_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "small.json")
        << R"({"fx": 575, "fy": 575, "x0": 255.5, "y0": 127.5, "baseline_m": 0.21, "width": 512, "height": 256})";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string p(const std::string& rel) { return (dir_ / rel).string(); }

  // Renders flat_easy on the small rig and block-matches its first scene.
  static fs::path scene() {
    const fs::path s = dir_ / "flat" / "flat_easy_0";
    if (!fs::exists(dir_ / "flat" / "disp" / "disparity.pfm")) {
      EXPECT_EQ(run("synth --suite flat_easy --calib " + p("small.json") + " --out " + p("flat")), 0);
      EXPECT_TRUE(fs::exists(s / "left.pgm")) << "scene directory naming changed";
      EXPECT_EQ(run("disparity --left " + (s / "left.pgm").string() + " --right " + (s / "right.pgm").string() +
                    " --d-max 64 --out " + p("flat/disp")),
                0);
    }
    return s;
  }

  static std::string detect_args(const fs::path& s) {
    return "detect --left " + (s / "left.pgm").string() + " --right " + (s / "right.pgm").string() + " --disp " +
           p("flat/disp/disparity.pfm") + " --calib " + (s / "calib.json").string() + " --stride 10";
  }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("synth"), 1);  // --out is required
  EXPECT_EQ(run("detect --method nope --left a --right b --disp c --calib d --out e"), 1);
  EXPECT_EQ(run("synth --suite nope --out " + p("x")), 1);
  EXPECT_EQ(run("disparity --left " + p("missing.pgm") + " --right " + p("missing.pgm") + " --out " + p("x")), 2);
}

TEST_F(Cli, SynthWritesBundlesAndManifest) {
  ASSERT_EQ(run("synth --suite far_small --calib " + p("small.json") + " --out " + p("far")), 0);
  int bundles = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "far")) {
    if (!e.is_directory()) continue;
    ++bundles;
    for (const char* f : {"left.pgm", "right.pgm", "gt_disparity.pfm", "labels.pgm", "free_space.pgm", "scene.json",
                          "calib.json"}) {
      EXPECT_TRUE(fs::exists(e.path() / f)) << e.path() << " " << f;
    }
    const auto labels = load_label_pgm(e.path() / "labels.pgm");
    EXPECT_EQ(labels.width(), 512);
    EXPECT_EQ(labels.height(), 256);
  }
  EXPECT_EQ(bundles, 4);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "far" / "synth.manifest.json"));
  EXPECT_FALSE(manifest.empty());
}

TEST_F(Cli, DetectIsByteIdenticalAcrossThreads) {
  const fs::path s = scene();
  std::string first;
  int k = 0;
  for (int threads : {1, 2, 8, 1}) {
    const std::string out = p("det" + std::to_string(k++));
    ASSERT_EQ(run(detect_args(s) + " --threads " + std::to_string(threads) + " --out " + out), 0);
    const std::string csv = slurp(fs::path(out) / "decisions.csv");
    ASSERT_FALSE(csv.empty());
    if (first.empty()) first = csv;
    EXPECT_EQ(csv, first) << threads << " threads";
  }
}

TEST_F(Cli, EvalMatchesLibraryRecount) {
  const fs::path s = scene();
  ASSERT_EQ(run(detect_args(s) + " --out " + p("det_eval")), 0);
  ASSERT_EQ(run("eval --level pixel --labels " + (s / "labels.pgm").string() + " --decisions " +
                p("det_eval/decisions.csv") + " --stride 2 --out " + p("eval")),
            0);
  const auto got = nlohmann::json::parse(slurp(dir_ / "eval" / "eval.json"));

  const auto labels = load_label_pgm(s / "labels.pgm");
  const auto decisions = load_table(dir_ / "det_eval" / "decisions.csv", &read_decisions_csv);
  ASSERT_FALSE(decisions.empty());
  const auto counts = count_pixels(decisions_to_mask(decisions, labels.width(), labels.height()), labels, 2, 1);
  const auto rates = pixel_rates(counts);
  EXPECT_EQ(got.at("tp").get<std::uint64_t>(), counts.tp);
  EXPECT_EQ(got.at("fp").get<std::uint64_t>(), counts.fp);
  EXPECT_EQ(got.at("gt_obstacles").get<std::uint64_t>(), counts.gt_obstacles);
  EXPECT_EQ(got.at("gt_freespace").get<std::uint64_t>(), counts.gt_freespace);
  EXPECT_DOUBLE_EQ(got.at("tpr").get<double>(), rates.y);
  EXPECT_DOUBLE_EQ(got.at("fpr").get<double>(), rates.x);
  EXPECT_GT(counts.tp, 0u);
  EXPECT_LT(rates.x, 0.05);
}
