#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "pelletseg/io.hpp"
#include "pelletseg/postproc.hpp"

using namespace pelletseg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int rc;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int rc = cli::run(args, o, e);
  return {rc, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pelletseg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  void make_scene(const std::string& name, int n = 8, const std::string& seed = "21") {
    ASSERT_EQ(run({"synth", "--seed", seed, "--out", p(name), "--rows", "160", "--cols", "160", "--n-objects",
                   std::to_string(n)})
                  .rc,
              0);
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthTwiceIsByteIdentical) {
  make_scene("a");
  make_scene("b");
  for (const char* f : {"labels.png", "classes.png", "image.png", "scene.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  const json meta = json::parse(slurp(dir_ / "a" / "scene.json"));
  EXPECT_EQ(meta["placed"], 8);
  EXPECT_TRUE(meta["provenance"].contains("config_hash"));
}

TEST_F(Cli, SynthBatchUsesConsecutiveSeeds) {
  ASSERT_EQ(run({"synth", "--seed", "4", "--out", p("batch"), "--rows", "64", "--cols", "64", "--n-objects", "2",
                 "--count", "3", "--jobs", "2"})
                .rc,
            0);
  ASSERT_EQ(run({"synth", "--seed", "5", "--out", p("single"), "--rows", "64", "--cols", "64", "--n-objects", "2"}).rc,
            0);
  EXPECT_EQ(slurp(dir_ / "batch/scene_0001/labels.png"), slurp(dir_ / "single/labels.png"));
}

TEST_F(Cli, RoundTripRecoversSceneObjects) {
  make_scene("s", 9);
  ASSERT_EQ(run({"gen-targets", "--labels", p("s/labels.png"), "--classes", p("s/classes.png"), "--out", p("m")}).rc, 0);
  const CliRun post = run({"postprocess", "--maps", p("m"), "--out", p("pred.png"), "--classes-out", p("predc.png")});
  ASSERT_EQ(post.rc, 0) << post.err;
  EXPECT_EQ(json::parse(post.out)["count"], 9);

  const CliRun ev = run({"evaluate", "--pred", p("pred.png"), "--gt", p("s/labels.png"), "--tau", "0.5",
                      "--pred-classes", p("predc.png"), "--gt-classes", p("s/classes.png")});
  ASSERT_EQ(ev.rc, 0) << ev.err;
  const json j = json::parse(ev.out);
  EXPECT_EQ(j["match"]["tp"], 9);
  EXPECT_GE(j["pixel"]["accuracy"].get<double>(), 0.95);
  EXPECT_EQ(j["pixel"]["kind"], "classes");
  EXPECT_TRUE(j["pixel"].contains("ugly_f1"));
  EXPECT_EQ(j["provenance"]["tool_version"], "0.1.0");
}

TEST_F(Cli, EvaluateWithoutClassMapsScoresForeground) {
  make_scene("s", 4);
  const CliRun ev = run({"evaluate", "--pred", p("s/labels.png"), "--gt", p("s/labels.png")});
  ASSERT_EQ(ev.rc, 0);
  const json j = json::parse(ev.out);
  EXPECT_EQ(j["pixel"]["kind"], "foreground");
  EXPECT_EQ(j["pixel"]["accuracy"], 1.0);
  EXPECT_EQ(j["match"]["mean_iou"], 1.0);
}

TEST_F(Cli, ExpandWritesExpandedLabels) {
  make_scene("s", 3);
  ASSERT_EQ(run({"gen-targets", "--labels", p("s/labels.png"), "--out", p("m"), "--expand", "--expand-radius", "1.5"}).rc, 0);
  const LabelMap before = io::read_label_map(p("s/labels.png"));
  const LabelMap after = io::read_label_map(p("m/labels_expanded.png"));
  std::size_t grown = 0;
  for (std::size_t i = 0; i < before.data().size(); ++i) {
    if (before.data()[i]) EXPECT_EQ(after.data()[i], before.data()[i]);
    grown += !before.data()[i] && after.data()[i];
  }
  EXPECT_GT(grown, 0U);
}

TEST_F(Cli, TiledMapsBlendBeforeExtraction) {
  make_scene("s", 6);
  ASSERT_EQ(run({"gen-targets", "--labels", p("s/labels.png"), "--out", p("full")}).rc, 0);
  const PredictionMaps full = io::read_maps(p("full"));
  const TileLayout layout = make_tile_layout(160, 160, 96, 96, 64);
  fs::create_directories(dir_ / "tiled");
  std::ofstream m2(dir_ / "tiled/tiles.txt");
  m2 << "rows=160\ncols=160\n";
  for (std::size_t i = 0; i < layout.offsets.size(); ++i) {
    const std::string sub = "t" + std::to_string(i);
    io::write_maps(crop_maps(full, layout.offsets[i], 96, 96), dir_ / "tiled" / sub);
    m2 << "tile " << layout.offsets[i].row << " " << layout.offsets[i].col << " " << sub << "\n";
  }
  m2.close();
  const CliRun a = run({"postprocess", "--maps", p("full"), "--out", p("a.png")});
  const CliRun b = run({"postprocess", "--maps", p("tiled"), "--out", p("b.png"), "--set", "tile_h=96", "--set",
                     "tile_w=96", "--set", "tile_stride=64"});
  ASSERT_EQ(b.rc, 0) << b.err;
  EXPECT_EQ(json::parse(a.out)["count"], json::parse(b.out)["count"]);
}

TEST_F(Cli, MeasureReportsHistogramAndCsv) {
  make_scene("s", 6);
  ASSERT_EQ(run({"gen-targets", "--labels", p("s/labels.png"), "--classes", p("s/classes.png"), "--out", p("m")}).rc, 0);
  const CliRun r = run({"measure", "--instances", p("s/labels.png"), "--maps", p("m"), "--mm-per-px", "0.5", "--csv",
                     p("inst.csv"), "--measured-classes", "nice,ugly,big,joint"});
  ASSERT_EQ(r.rc, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["instances"].size(), 6U);
  EXPECT_EQ(j["size_report"]["histograms"].size(), 4U);
  std::ifstream csv(p("inst.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 7);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  std::ofstream(dir_ / "cfg.txt") << "match_tau=0.9\nseed=3\n";
  make_scene("s", 3);
  const CliRun a = run({"evaluate", "--config", p("cfg.txt"), "--pred", p("s/labels.png"), "--gt", p("s/labels.png")});
  EXPECT_EQ(json::parse(a.out)["tau"], 0.9);
  const CliRun b = run({"evaluate", "--config", p("cfg.txt"), "--tau", "0.25", "--pred", p("s/labels.png"), "--gt",
                     p("s/labels.png")});
  EXPECT_EQ(json::parse(b.out)["tau"], 0.25);
  EXPECT_NE(json::parse(a.out)["provenance"]["config_hash"], json::parse(b.out)["provenance"]["config_hash"]);
}

TEST_F(Cli, SplitFromStatsCsv) {
  std::ofstream csv(dir_ / "stats.csv");
  csv << "image_id,frac_background,frac_nice,frac_ugly,frac_big,frac_joint,lum_mean,lum_std\n";
  for (int i = 0; i < 10; ++i) csv << "img" << i << ",0.5," << 0.01 * i << ",0.1,0.05,0.02,40,5\n";
  csv.close();
  const CliRun r = run({"split", "--stats", p("stats.csv"), "--seed", "8", "--out", p("manifest.txt")});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.err.find("test_fraction=0.2"), std::string::npos);
  std::ifstream m(p("manifest.txt"));
  std::string id, subset;
  int test = 0, total = 0;
  while (m >> id >> subset) {
    ++total;
    test += subset == "test";
  }
  EXPECT_EQ(total, 10);
  EXPECT_EQ(test, 2);
  const CliRun again = run({"split", "--stats", p("stats.csv"), "--seed", "8"});
  EXPECT_EQ(again.out, r.out);
}

TEST_F(Cli, NormalizeBatch) {
  make_scene("a", 3, "1");
  make_scene("b", 3, "2");
  fs::copy_file(p("b/image.png"), p("b_image.png"));
  const CliRun r = run({"normalize", "--in", p("a/image.png"), p("b_image.png"), "--out-dir", p("norm"), "--ref-mean",
                     "30", "--ref-std", "10", "--jobs", "2"});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "norm/image.png"));
  EXPECT_TRUE(fs::exists(dir_ / "norm/b_image.png"));
  EXPECT_EQ(json::parse(r.out)["images"].size(), 2U);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).rc, cli::kUsageError);
  EXPECT_EQ(run({"nope"}).rc, cli::kUsageError);
  EXPECT_EQ(run({"--help"}).rc, cli::kOk);
  EXPECT_EQ(run({"synth", "--out", p("x")}).rc, cli::kUsageError);
  EXPECT_EQ(run({"evaluate", "--pred", p("none.png"), "--gt", p("none.png")}).rc, cli::kDataError);
  EXPECT_EQ(run({"evaluate", "--pred", "a", "--gt", "b", "--set", "garbage"}).rc, cli::kUsageError);
  EXPECT_EQ(run({"normalize", "--in", "a.png", "--out", p("o.png")}).rc, cli::kUsageError);
}
