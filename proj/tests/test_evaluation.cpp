#include "rh/metrics.hpp"
#include "rh/report.hpp"
#include "rh/sweep.hpp"

#include "support.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace rh;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// 20 x 20: rows 0-4 unlabeled, 5-9 free space, 10-19 obstacles (id 2 left
// half, id 3 right half).
LabelMap fixture_labels() {
  LabelMap l(20, 20, kUnlabeled);
  for (int y = 5; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) l(x, y) = y < 10 ? kFreeSpace : (x < 10 ? 2 : 3);
  }
  return l;
}

Mask free_of(const LabelMap& l) {
  Mask m(l.width(), l.height(), 0);
  for (std::size_t i = 0; i < l.size(); ++i) m.data()[i] = l.data()[i] == kFreeSpace;
  return m;
}

SweepResult fake_result() {
  SweepResult r;
  r.method = "fpht";
  r.level = SweepLevel::kPixel;
  const double taus[] = {0.0, 1e4, 1e5};
  const RocPoint pts[] = {{0.3, 0.9}, {0.1, 0.6}, {0.2, 0.5}};
  for (int i = 0; i < 3; ++i) {
    SweepPoint p;
    p.config = {"fpht", 15, 15, 2, 1, 1.0, taus[i], 0.0, 0.0, 0.0};
    p.counts = {static_cast<std::uint64_t>(90 * (3 - i)), static_cast<std::uint64_t>(7 * i), 2, 1, 1000, 5000};
    p.point = pts[i];
    r.points.push_back(p);
  }
  finalize_hull(r);
  return r;
}

std::vector<GroundTruthBundle> small_dataset() {
  std::vector<GroundTruthBundle> out;
  for (std::uint64_t seed : {5u, 6u}) {
    SceneSpec s;
    s.rig = rh::test::small_rig();
    s.texture_seed = seed;
    s.noise_seed = seed * 7919 + 1;
    s.obstacles = {{seed == 5u ? -0.5 : 0.6, 8.0, 0.8, 0.5, 0.3, 2}};
    out.push_back(render(s));
  }
  return out;
}

}  // namespace

TEST(PixelRates, WorkedExample) {
  PixelCounts c{250, 0, 2, 1, 4000, 1000};
  EXPECT_DOUBLE_EQ(pixel_rates(c).y, 0.25);
  EXPECT_EQ(pixel_rates(c).x, 0.0);
  // doubling TP and GT leaves the rate unchanged
  PixelCounts d{500, 0, 2, 1, 8000, 1000};
  EXPECT_EQ(pixel_rates(d).y, pixel_rates(c).y);
  // clamped
  EXPECT_EQ(pixel_rates({4000, 900, 2, 1, 4000, 1000}).y, 1.0);
  EXPECT_EQ(pixel_rates({4000, 900, 2, 1, 4000, 1000}).x, 1.0);
  EXPECT_TRUE(throws_code(ErrorCode::EmptyGroundTruth, [] { pixel_rates({0, 0, 1, 1, 0, 10}); }));
  EXPECT_TRUE(throws_code(ErrorCode::EmptyGroundTruth, [] { pixel_rates({0, 0, 1, 1, 10, 0}); }));
}

TEST(PixelRates, HandTallyFixture) {
  const LabelMap labels = fixture_labels();
  Mask m(20, 20, 0);
  EXPECT_EQ(pixel_rates(count_pixels(m, labels, 2, 1)), (RocPoint{0.0, 0.0}));
  m(1, 1) = 1;    // unlabeled, ignored
  m(3, 6) = 1;    // free
  m(15, 7) = 1;   // free
  m(2, 12) = 1;   // id 2
  m(12, 18) = 1;  // id 3
  m(19, 19) = 1;  // id 3
  const auto c = count_pixels(m, labels, 2, 1);
  EXPECT_EQ(c.tp, 3u);
  EXPECT_EQ(c.fp, 2u);
  EXPECT_EQ(c.gt_obstacles, 200u);
  EXPECT_EQ(c.gt_freespace, 100u);
  const auto r = pixel_rates(c);
  EXPECT_DOUBLE_EQ(r.y, 3.0 * 4.0 / 200.0);
  EXPECT_DOUBLE_EQ(r.x, 2.0 * 4.0 / 100.0);

  // half-resolution predictions look up (2x, 2y)
  Mask half(10, 10, 0);
  half(1, 3) = 1;  // (2, 6) free
  half(5, 5) = 1;  // (10, 10) id 3
  half(4, 9) = 1;  // (8, 18) id 2
  const auto h = count_pixels(half, labels, 1, 2);
  EXPECT_EQ(h.tp, 2u);
  EXPECT_EQ(h.fp, 1u);
  EXPECT_DOUBLE_EQ(pixel_rates(h).y, 2.0 * 4.0 / 200.0);
  EXPECT_TRUE(throws_code(ErrorCode::DimensionMismatch, [&] { count_pixels(half, labels, 1, 1); }));
}

TEST(PixelRates, AggregationIsPerFrameSum) {
  const LabelMap labels = fixture_labels();
  std::mt19937 rng(4);
  std::bernoulli_distribution coin(0.3);
  PixelCounts total{0, 0, 2, 1, 0, 0};
  std::uint64_t tp = 0, fp = 0;
  for (int f = 0; f < 5; ++f) {
    Mask m(20, 20, 0);
    for (auto& v : m.data()) v = coin(rng);
    const auto c = count_pixels(m, labels, 2, 1);
    tp += c.tp;
    fp += c.fp;
    total += c;
  }
  EXPECT_EQ(total.tp, tp);
  EXPECT_EQ(total.fp, fp);
  EXPECT_EQ(total.gt_obstacles, 1000u);
  PixelCounts other{0, 0, 1, 1, 0, 0};
  EXPECT_THROW(total += other, Error);
}

TEST(Masks, DecisionsAndPoints) {
  std::vector<PatchDecision> d(3);
  d[0].patch = {4, 5, 3, 3};
  d[0].verdict = Verdict::kObstacle;
  d[1].patch = {6, 7, 3, 3};
  d[1].verdict = Verdict::kFreeSpace;
  d[2].patch = {8, 9, 3, 3};
  d[2].verdict = Verdict::kNoDecision;
  const auto m = decisions_to_mask(d, 20, 20);
  EXPECT_EQ(std::count(m.data().begin(), m.data().end(), 1), 1);
  EXPECT_EQ(m(4, 5), 1);
  const auto m2 = decisions_to_mask(d, {Verdict::kFreeSpace, Verdict::kObstacle, Verdict::kObstacle}, 20, 20);
  EXPECT_EQ(m2(6, 7), 1);
  EXPECT_EQ(m2(8, 9), 1);
  EXPECT_EQ(m2(4, 5), 0);

  std::vector<CloudPoint> cloud{{1, 2, 5.0f, {}}, {3, 4, 5.0f, {}}};
  PcResult pc;
  pc.obstacle = {0, 1};
  const auto pm = points_to_mask(cloud, pc, 10, 10);
  EXPECT_EQ(pm(3, 4), 1);
  EXPECT_EQ(pm(1, 2), 0);
}

TEST(Hull, Examples) {
  EXPECT_EQ(roc_hull({{0.3, 0.7}}), (std::vector<RocPoint>{{0, 0}, {0.3, 0.7}, {1, 1}}));
  EXPECT_EQ(roc_hull({{0.1, 0.5}, {0.2, 0.4}}), (std::vector<RocPoint>{{0, 0}, {0.1, 0.5}, {1, 1}}));
  // collinear points are dropped
  EXPECT_EQ(roc_hull({{0.5, 0.5}}), (std::vector<RocPoint>{{0, 0}, {1, 1}}));
  EXPECT_EQ(upper_left_hull({{2.0, 0.5}, {5.0, 0.8}, {9.0, 0.8}, {1.0, 0.1}}),
            (std::vector<RocPoint>{{0, 0}, {2.0, 0.5}, {5.0, 0.8}}));
}

TEST(Hull, DominatesAndIdempotent) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RocPoint> pts;
    const int n = 1 + trial % 25;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    const auto hull = roc_hull(pts);
    EXPECT_EQ(hull.front(), (RocPoint{0, 0}));
    EXPECT_EQ(hull.back(), (RocPoint{1, 1}));
    for (std::size_t i = 1; i < hull.size(); ++i) {
      EXPECT_GE(hull[i].x, hull[i - 1].x);
      EXPECT_GE(hull[i].y, hull[i - 1].y);
    }
    for (const auto& p : pts) EXPECT_TRUE(hull_dominates(hull, p));
    EXPECT_EQ(roc_hull(hull), hull);
    const auto ul = upper_left_hull(pts);
    for (const auto& p : pts) EXPECT_TRUE(hull_dominates(ul, p));
    EXPECT_EQ(upper_left_hull(ul), ul);
  }
  EXPECT_FALSE(hull_dominates({{0, 0}, {1, 1}}, {0.5, 0.6}));
}

TEST(Instance, CoverageAndFpRule) {
  LabelMap labels(10, 10, 2);
  Mask free(10, 10, 0);
  const auto s = instance_metrics({CStix{0, 6, 0, 9, 10.0, 1.0, 0}}, labels, free);
  ASSERT_EQ(s.instances.size(), 1u);
  EXPECT_EQ(s.instances[0].itp, 60u);
  EXPECT_EQ(s.instances[0].ifn, 40u);
  EXPECT_DOUBLE_EQ(s.instances[0].iint(), 0.6);
  EXPECT_EQ(s.fp_stixels, 0);

  // a 10-pixel stixel over k free-space pixels
  for (int k : {4, 5, 6}) {
    LabelMap l(10, 10, kFreeSpace);
    Mask f(10, 10, 0);
    for (int y = 0; y < k; ++y) f(0, y) = 1;
    const auto st = instance_metrics({CStix{0, 1, 0, 9, 10.0, 1.0, 0}}, l, f, 0.5);
    EXPECT_EQ(st.fp_stixels, k > 5 ? 1 : 0) << k;
  }

  const auto none = instance_metrics({}, labels, free);
  EXPECT_EQ(none.instances[0].iint(), 0.0);
  EXPECT_EQ(none.fp_stixels, 0);
  EXPECT_TRUE(throws_code(ErrorCode::OutOfBounds,
                          [&] { instance_metrics({CStix{8, 4, 0, 3, 1.0, 1.0, 0}}, labels, free); }));
}

TEST(Instance, OrderInvarianceAndDownsampling) {
  const LabelMap labels = fixture_labels();
  const Mask free = free_of(labels);
  std::vector<CStix> st{{0, 4, 8, 14, 1, 1, 0}, {12, 3, 10, 19, 1, 1, 1}, {5, 2, 5, 9, 1, 1, 2}};
  const auto a = instance_metrics(st, labels, free);
  std::reverse(st.begin(), st.end());
  const auto b = instance_metrics(st, labels, free);
  ASSERT_EQ(a.instances.size(), 2u);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(a.instances[i].itp, b.instances[i].itp);
  EXPECT_EQ(a.fp_stixels, b.fp_stixels);
  // id 2: cols 0-3 rows 10-14 = 20 px of 100
  EXPECT_EQ(a.instances[0].itp, 20u);
  // id 3: cols 12-14 rows 10-19 = 30 px
  EXPECT_EQ(a.instances[1].itp, 30u);
  EXPECT_EQ(a.fp_stixels, 1);  // the box on rows 5-9 lies fully on free space

  // same boxes at half resolution cover the same full-resolution pixels
  const auto h = instance_metrics({CStix{6, 2, 5, 9, 1, 1, 0}}, labels, free, 0.5, 2);
  EXPECT_EQ(h.instances[1].itp, 40u);
}

TEST(Instance, MacroAverage) {
  InstanceStats f1, f2;
  f1.instances = {{2, 60, 40}, {3, 10, 0}};
  f1.fp_stixels = 3;
  f2.instances = {{2, 1, 4}};
  f2.fp_stixels = 0;
  const auto s = summarize({f1, f2});
  EXPECT_NEAR(s.iint, (0.6 + 1.0 + 0.2) / 3.0, 1e-15);
  EXPECT_EQ(s.fp_per_frame, 1.5);
  EXPECT_EQ(s.instances, 3u);
  EXPECT_EQ(summarize({}).iint, 0.0);
}

class SweepTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { data_ = new std::vector<GroundTruthBundle>(small_dataset()); }
  static void TearDownTestSuite() { delete data_; }
  static std::vector<GroundTruthBundle>* data_;

  static SweepGrid grid() {
    SweepGrid g;
    g.detector.stride = 6;
    g.block_match.d_max = 48;
    return g;
  }
};
std::vector<GroundTruthBundle>* SweepTest::data_ = nullptr;

TEST_F(SweepTest, SingleConfigAndDeterminism) {
  const auto rig = rh::test::small_rig();
  const auto a = run_sweep(*data_, rig, grid(), 1);
  ASSERT_EQ(a.points.size(), 1u);
  EXPECT_EQ(a.points[0].config.patch_w, 15);
  EXPECT_GT(a.points[0].counts.tp, 0u);
  const auto b = run_sweep(*data_, rig, grid(), 3);
  EXPECT_EQ(a.points[0].counts.tp, b.points[0].counts.tp);
  EXPECT_EQ(a.points[0].counts.fp, b.points[0].counts.fp);
  EXPECT_EQ(a.points[0].point, b.points[0].point);
  EXPECT_EQ(a.hull, b.hull);
}

TEST_F(SweepTest, TauMonotone) {
  const auto rig = rh::test::small_rig();
  auto g = grid();
  g.tau = {-1e5, 0.0, 1e4, 1e5, 1e6, 1e8};
  const auto r = run_sweep(*data_, rig, g, 1);
  ASSERT_EQ(r.points.size(), 6u);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    EXPECT_LE(r.points[i].point.x, r.points[i - 1].point.x);
    EXPECT_LE(r.points[i].point.y, r.points[i - 1].point.y);
  }
  EXPECT_GT(r.points.front().point.y, r.points.back().point.y);
  for (const auto& p : r.points) EXPECT_TRUE(hull_dominates(r.hull, p.point));
}

TEST_F(SweepTest, GridShapes) {
  const auto rig = rh::test::small_rig();
  auto g = grid();
  g.method = "pc";
  g.pc_phi_deg = {30.0, 60.0};
  g.pc_h_min = {0.1};
  g.pc_h_max = {0.4, 0.8};
  const auto pc = run_sweep(*data_, rig, g, 1);
  EXPECT_EQ(pc.points.size(), 4u);
  EXPECT_EQ(pc.points[1].config.h_max, 0.8);
  EXPECT_EQ(pc.points[2].config.phi_deg, 60.0);

  g = grid();
  g.level = SweepLevel::kInstance;
  g.lambda_min = {1.0, 4.0};
  const auto inst = run_sweep(*data_, rig, g, 1);
  ASSERT_EQ(inst.points.size(), 2u);
  for (const auto& p : inst.points) {
    EXPECT_GE(p.point.y, 0.0);
    EXPECT_LE(p.point.y, 1.0);
    EXPECT_EQ(p.instance.frames, 2u);
    EXPECT_EQ(p.instance.instances, 2u);
  }
  g.method = "nope";
  EXPECT_THROW(run_sweep(*data_, rig, g, 1), Error);
  EXPECT_THROW(run_sweep({}, rig, grid(), 1), Error);
}

TEST(Report, EmptySweepIsHeaderOnly) {
  SweepResult r;
  r.method = "fpht";
  std::ostringstream out;
  write_sweep_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1);
  EXPECT_EQ(s.rfind("config_hash,method,level,", 0), 0u);
  std::istringstream in(s);
  EXPECT_TRUE(read_sweep_csv(in).points.empty());
}

TEST(Report, CsvRoundTrip) {
  const auto r = fake_result();
  std::ostringstream out;
  write_sweep_csv(out, r);
  std::istringstream in(out.str());
  const auto back = read_sweep_csv(in);
  ASSERT_EQ(back.points.size(), r.points.size());
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    EXPECT_EQ(back.points[i].config, r.points[i].config);
    EXPECT_EQ(back.points[i].point, r.points[i].point);
    EXPECT_EQ(back.points[i].counts.tp, r.points[i].counts.tp);
    EXPECT_EQ(back.points[i].on_hull, r.points[i].on_hull);
  }
  EXPECT_EQ(back.hull, r.hull);
  std::ostringstream again;
  write_sweep_csv(again, back);
  EXPECT_EQ(again.str(), out.str());

  std::string tampered = out.str();
  tampered[tampered.find('\n') + 1] ^= 1;  // first hash digit
  std::istringstream bad(tampered);
  EXPECT_THROW(read_sweep_csv(bad), Error);
  std::istringstream wrong("a,b,c\n");
  EXPECT_TRUE(throws_code(ErrorCode::MalformedHeader, [&] { read_sweep_csv(wrong); }));
}

TEST(Report, SvgIsWellFormed) {
  const auto dir = rh::test::temp_dir("report");
  emit_report(fake_result(), dir / "r");
  ASSERT_TRUE(std::filesystem::exists(dir / "r.csv"));
  boost::property_tree::ptree tree;
  ASSERT_NO_THROW(boost::property_tree::read_xml((dir / "r.svg").string(), tree));
  const auto& svg = tree.get_child("svg");
  EXPECT_EQ(svg.get<int>("<xmlattr>.width"), 800);
  EXPECT_EQ(svg.get<int>("<xmlattr>.height"), 600);
  int circles = 0;
  std::function<void(const boost::property_tree::ptree&)> walk = [&](const boost::property_tree::ptree& t) {
    for (const auto& [k, v] : t) {
      circles += k == "circle";
      walk(v);
    }
  };
  walk(svg);
  EXPECT_EQ(circles, 3);
  EXPECT_TRUE(throws_code(ErrorCode::IoFailure, [&] { emit_report(fake_result(), dir / "missing" / "r"); }));
}
