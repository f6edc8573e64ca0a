#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "refcalib/cli.hpp"
#include "refcalib/digest.hpp"
#include "refcalib/io.hpp"
#include "refcalib/simulation.hpp"

namespace refcalib {
namespace {

namespace fs = std::filesystem;

const std::string kFixtures = REFCALIB_FIXTURE_DIR;
const std::string kData = REFCALIB_DATA_DIR;

// Fresh scratch directory per test, removed afterwards.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("refcalib_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the CLI and captures stderr.
  int run(const std::vector<std::string>& args) {
    ::testing::internal::CaptureStderr();
    const int code = cli_main(args);
    err_ = ::testing::internal::GetCapturedStderr();
    return code;
  }

  fs::path dir_;
  std::string err_;
};

TEST_F(CliTest, MissingRequiredOptionIsUsageError) {
  EXPECT_EQ(run({"calibrate", "--mode", "eob", "--joints", "j.csv", "--track", "t.csv",
                 "--intrinsics", "i.json", "-o", "r.json"}),
            kExitInput);
  EXPECT_NE(err_.find("--chain"), std::string::npos);
  EXPECT_EQ(run({}), kExitInput);
  EXPECT_EQ(run({"calibrate", "--mode", "sideways"}), kExitInput);
}

TEST_F(CliTest, MissingInputFileIsInputError) {
  EXPECT_EQ(run({"calibrate", "--mode", "eob", "--chain", path("none.json"), "--joints", "j.csv",
                 "--track", "t.csv", "--intrinsics", "i.json", "-o", path("r.json")}),
            kExitInput);
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(CliTest, SimulateThenCalibrateMatchesInProcess) {
  const std::string chain = kData + "/panda_eob.json";
  ASSERT_EQ(run({"simulate", "--seed", "5", "--mode", "eob", "--chain", chain, "--duration", "4",
                 "--sigma", "1.5", "-o", path("scene")}),
            kExitOk)
      << err_;
  for (const char* f : {"chain.json", "intrinsics.json", "joints.csv", "track.csv",
                        "track_clean.csv", "ground_truth.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "scene" / f)) << f;
  }
  ASSERT_EQ(run({"calibrate", "--mode", "eob", "--chain", path("scene/chain.json"), "--joints",
                 path("scene/joints.csv"), "--track", path("scene/track.csv"), "--intrinsics",
                 path("scene/intrinsics.json"), "-o", path("result.json")}),
            kExitOk)
      << err_;

  ScenarioConfig cfg;
  cfg.seed = 5;
  cfg.duration = 4.0;
  cfg.noise.sigma = 1.5;
  const ChainFile cf = parse_chain_file(chain);
  const GroundTruthScene scene = generate_scene(cfg, cf.chain, cf.ref);
  const Track2D noisy = corrupt_track(scene.clean_track, cfg.noise, derive_seed(cfg.seed, "noise"));
  const ResultDocument expect = ResultDocument::FromResult(calibrate(make_request(scene, noisy)));

  const ResultDocument got = read_result(path("result.json"));
  EXPECT_EQ(got.translation, expect.translation);
  EXPECT_EQ(got.quaternion.coeffs(), expect.quaternion.coeffs());
  EXPECT_EQ(got.n_pairs_used, expect.n_pairs_used);
  EXPECT_EQ(got.input_digests.at("track"), sha256_file(path("scene/track.csv")));
  EXPECT_EQ(got.input_digests.size(), 4u);
  EXPECT_LT((read_pose_file(path("scene/ground_truth.json")).matrix() - scene.t_gt.matrix())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);

  ASSERT_EQ(run({"eval", "--est", path("result.json"), "--gt", path("scene/ground_truth.json"),
                 "-o", path("errors.json")}),
            kExitOk)
      << err_;
  const std::string errors = read_text_file(path("errors.json"));
  EXPECT_NE(errors.find("\"e_trans_cm\""), std::string::npos);
  EXPECT_NE(errors.find("\"rotation_metric\": \"geodesic\""), std::string::npos);
}

TEST_F(CliTest, LinearRailReportsDegenerateConfiguration) {
  ASSERT_EQ(run({"simulate", "--seed", "3", "--mode", "eob", "--chain",
                 kFixtures + "/chain_linear_rail.json", "-o", path("rail")}),
            kExitOk)
      << err_;
  EXPECT_EQ(run({"calibrate", "--mode", "eob", "--chain", path("rail/chain.json"), "--joints",
                 path("rail/joints.csv"), "--track", path("rail/track_clean.csv"), "--intrinsics",
                 path("rail/intrinsics.json"), "-o", path("result.json")}),
            kExitInsufficient);
  EXPECT_NE(err_.find("DegenerateConfiguration"), std::string::npos) << err_;
  EXPECT_FALSE(fs::exists(path("result.json")));
}

TEST_F(CliTest, JointCountMismatchIsInputError) {
  ASSERT_EQ(run({"simulate", "--seed", "2", "--mode", "eob", "--chain", kData + "/panda_eob.json",
                 "--duration", "2", "-o", path("s")}),
            kExitOk);
  EXPECT_EQ(run({"calibrate", "--mode", "eob", "--chain", kFixtures + "/chain_two_link.json",
                 "--joints", path("s/joints.csv"), "--track", path("s/track.csv"),
                 "--intrinsics", path("s/intrinsics.json"), "-o", path("r.json")}),
            kExitInput);
  EXPECT_NE(err_.find("SchemaMismatch"), std::string::npos) << err_;
}

TEST_F(CliTest, TooFewSyncFramesIsInsufficientData) {
  ASSERT_EQ(run({"simulate", "--seed", "2", "--mode", "eob", "--chain", kData + "/panda_eob.json",
                 "--duration", "0.2", "-o", path("s")}),
            kExitOk);
  EXPECT_EQ(run({"calibrate", "--mode", "eob", "--chain", path("s/chain.json"), "--joints",
                 path("s/joints.csv"), "--track", path("s/track.csv"), "--intrinsics",
                 path("s/intrinsics.json"), "-o", path("r.json")}),
            kExitInsufficient);
  EXPECT_NE(err_.find("TooFewPairs"), std::string::npos) << err_;
}

TEST_F(CliTest, SweepsWriteCsv) {
  const std::string chain = kData + "/panda_eih.json";
  ASSERT_EQ(run({"sweep-noise", "--seed", "1", "--mode", "eih", "--chain", chain, "--duration",
                 "3", "--sigmas", "0,2", "--repeats", "2", "-o", path("noise.csv")}),
            kExitOk)
      << err_;
  const std::string noise = read_text_file(path("noise.csv"));
  EXPECT_EQ(noise.rfind("# meta: ", 0), 0u);
  std::istringstream lines(noise);
  std::string line;
  int data_rows = 0;
  while (std::getline(lines, line)) data_rows += line.rfind("# ", 0) != 0;
  EXPECT_EQ(data_rows, 3);  // header and two levels

  ASSERT_EQ(run({"sweep-frames", "--seed", "1", "--mode", "eih", "--chain", chain, "--duration",
                 "3", "--counts", "4,20", "--repeats", "2", "-o", path("frames.csv")}),
            kExitOk)
      << err_;
  EXPECT_TRUE(fs::exists(path("frames.csv")));
  EXPECT_EQ(run({"sweep-frames", "--seed", "1", "--mode", "eih", "--chain", chain, "--counts",
                 "3", "-o", path("bad.csv")}),
            kExitInput);
}

}  // namespace
}  // namespace refcalib
