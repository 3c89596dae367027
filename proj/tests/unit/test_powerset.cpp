#include <gtest/gtest.h>

#include "mdl/powerset.hpp"
#include "mdl/teameval.hpp"
#include "support/corpus.hpp"
#include "support/frames.hpp"

using namespace mdl;

namespace {

KripkeModel edge01() {
  KripkeModel m(2);
  m.add_edge(0, 1);
  m.val["p"] = 0b01;
  return m;
}

std::vector<Formula> without_deps(Fragment frag, int depth) {
  std::vector<Formula> out;
  for (const auto& f : corpus::with_named(frag, depth))
    if (dep_paths(f).empty()) out.push_back(f);
  return out;
}

// Every nonempty subset of (>= o R)(w) has an upper bound inside it.
bool g1_by_subsets(const IntModel& im) {
  for (int w = 0; w < im.n; ++w) {
    const PointSet br = im.boxreach(w);
    for (PointSet x = br; x; x = (x - 1) & br) {
      bool found = false;
      for_each_member(br, [&](int u) { found = found || (im.below[static_cast<std::size_t>(u)] & x) == x; });
      if (!found) return false;
    }
  }
  return true;
}

// Powerset sat agrees with team eval on every team of every model up to n worlds.
void expect_correspondence(int max_n, const std::vector<Formula>& fs, bool bullet) {
  FormulaDag dag;
  std::vector<int> ids;
  for (const auto& f : fs) ids.push_back(dag.add(f));
  std::vector<TeamSet> t;
  int bad = 0;
  for (int n = 1; n <= max_n; ++n)
    for_each_model(n, {"p", "q"}, [&](const KripkeModel& m) {
      TableEvaluator(m).run(dag, t);
      IntModel im = bullet ? build_full_powerset(m) : build_powerset(m);
      detail::IntEvaluator ev(im, bullet);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const TeamSet ts = t[static_cast<std::size_t>(ids[i])];
        const PointSet want = bullet ? ts & im.all() : (ts >> 1) & im.all();
        if (ev.ext(fs[i]) != want && bad++ < 5) ADD_FAILURE() << print(fs[i]);
      }
      return true;
    });
  EXPECT_EQ(bad, 0);
}

}  // namespace

TEST(Powerset, Build) {
  KripkeModel one(1);
  auto a = build_powerset(one);
  EXPECT_EQ(a.n, 1);
  EXPECT_EQ(a.below[0], 1U);
  auto m = edge01();
  auto b = build_powerset(m);
  EXPECT_EQ(b.n, 3);
  // points 0,1,2 are the teams {0},{1},{0,1}
  EXPECT_TRUE(b.rel(0, 1));
  EXPECT_FALSE(b.rel(2, 1));
  EXPECT_FALSE(b.rel(1, 1));
  EXPECT_TRUE(b.geq(2, 0));
  EXPECT_FALSE(b.geq(0, 2));
  EXPECT_EQ(b.val.at("p"), 0b001U);
  EXPECT_EQ(b.endpoints(), 0b011U);
  EXPECT_THROW(build_powerset(KripkeModel(6)), LimitError);
  EXPECT_NO_THROW(build_powerset(KripkeModel(6), 6));
}

TEST(Powerset, BuildFull) {
  auto m = edge01();
  auto b = build_full_powerset(m);
  EXPECT_EQ(b.n, 4);
  EXPECT_EQ(b.endpoints(), 0b0001U);
  EXPECT_EQ(b.second_least(), 0b0110U);
  EXPECT_EQ(b.val.at("p"), 0b0011U);
  for (int x = 0; x < 4; ++x) EXPECT_TRUE(b.has_ter(x, x, x));
  EXPECT_TRUE(b.has_ter(3, 1, 2));
  EXPECT_TRUE(b.has_ter(3, 0, 3));
  EXPECT_FALSE(b.has_ter(3, 1, 1));
  EXPECT_EQ(b.ter->size(), 16U);  // sum of 3^|X|
  EXPECT_TRUE(b.rel(0, 0));
}

TEST(Powerset, SatExamples) {
  IntModel one(1);
  one.val["p"] = 1;
  EXPECT_TRUE(sat_int(one, 0, parse("p")));
  EXPECT_FALSE(sat_int(one, 0, parse("bot")));
  EXPECT_TRUE(sat_int(one, 0, parse("[]bot")));
  auto full = build_full_powerset(edge01());
  EXPECT_TRUE(sat_int_bullet(full, 0, parse("bot")));
  EXPECT_FALSE(sat_int_bullet(full, 1, parse("bot")));
  // {0,1} splits into the p-part {0} and the ~p-part {1}
  EXPECT_TRUE(sat_int_bullet(full, 3, parse("p | ~p")));
  EXPECT_FALSE(sat_int_bullet(full, 3, parse("p \\/ ~p")));
  EXPECT_THROW(sat_int(one, 0, parse("=(p)")), FragmentError);
  EXPECT_THROW(sat_int(one, 0, parse("p | q")), FragmentError);
  EXPECT_THROW(sat_int_bullet(one, 0, parse("p")), InputError);
}

TEST(Powerset, ComodelCorrespondence) {
  expect_correspondence(2, without_deps(Fragment::MID, 3), false);
  expect_correspondence(3, without_deps(Fragment::MID, 2), false);
}

TEST(Powerset, FullCorrespondence) {
  expect_correspondence(2, without_deps(Fragment::MT0, 3), true);
  expect_correspondence(3, without_deps(Fragment::MT0, 2), true);
}

TEST(Powerset, Monotonicity) {
  auto fs = without_deps(Fragment::MT0, 2);
  for_each_model(2, {"p", "q"}, [&](const KripkeModel& m) {
    for (bool bullet : {false, true}) {
      IntModel im = bullet ? build_full_powerset(m) : build_powerset(m);
      for (const auto& f : fs) {
        if (!bullet && !well_formed(f, Fragment::MID)) continue;
        const PointSet e = int_extension(im, f, bullet);
        for_each_member(e, [&](int w) { EXPECT_EQ(im.below[static_cast<std::size_t>(w)] & ~e, 0U) << print(f); });
      }
    }
    return true;
  });
}

TEST(Powerset, ConditionsOnPowersetModels) {
  for (int n = 1; n <= 3; ++n)
    for_each_model(n, {"p", "q"}, [&](const KripkeModel& m) {
      auto bi = check_conditions(build_powerset(m), bi_conditions());
      EXPECT_TRUE(bi.all()) << bi.failed().front();
      auto tri = check_conditions(build_full_powerset(m), tri_conditions());
      EXPECT_TRUE(tri.all()) << tri.failed().front();
      return true;
    });
}

TEST(Powerset, G1Violation) {
  // two successors with no common point above them
  IntModel im(3);
  im.succ[0] = 0b110;
  auto r = check_conditions(im, {Condition::F1, Condition::F2, Condition::G1p, Condition::G1});
  EXPECT_TRUE(r.at("F1").holds);
  EXPECT_TRUE(r.at("F2").holds);
  EXPECT_FALSE(r.at("G1'").holds);
  EXPECT_EQ(r.at("G1'").witness, (std::vector<int>{0, 1, 2}));
  EXPECT_FALSE(r.at("G1").holds);
  EXPECT_EQ(r.at("G1").set, PointSet{0b110});
  EXPECT_EQ(r.failed(), (std::vector<std::string>{"G1'", "G1"}));
}

TEST(Powerset, OtherViolations) {
  IntModel im(2);
  im.below[1] = 0b11;  // 1 >= 0
  im.succ[1] = 0b10;  // 1 R 1, but 0 below it sees nothing
  auto r = check_conditions(im, {Condition::F1, Condition::F2});
  EXPECT_FALSE(r.at("F1").holds);
  EXPECT_EQ(r.at("F1").witness, (std::vector<int>{1, 0, 1}));
  EXPECT_FALSE(r.at("F2").holds);
  EXPECT_EQ(r.at("F2").witness, (std::vector<int>{1, 1, 0}));
  IntModel neg_fail(2);
  neg_fail.below[1] = 0b11;
  neg_fail.val["p"] = 0b01;
  auto n = check_conditions(neg_fail, {Condition::Negative, Condition::Saturated});
  EXPECT_FALSE(n.at("negative").holds);
  EXPECT_EQ(n.at("negative").witness, std::vector<int>{1});
  EXPECT_EQ(n.at("negative").prop, "p");
  EXPECT_TRUE(n.at("saturated").holds);
  EXPECT_THROW(check_conditions(neg_fail, {Condition::H1}), InputError);
}

TEST(Powerset, G1FormsAgree) {
  for (int n = 1; n <= 3; ++n)
    frames::for_each_frame(n, [&](const IntModel& im) {
      const bool g1 = detail::check_g1(im).holds;
      EXPECT_EQ(g1, detail::check_g1p(im).holds);
      EXPECT_EQ(g1, g1_by_subsets(im));
    });
}

TEST(Powerset, FrameCharacterizations) {
  const Formula kp_box = parse("[](p \\/ q) -> []p \\/ []q");
  const Formula g2 = parse("~[]~p -> <>~~p");
  int g1_fail = 0, g2_fail = 0;
  for (int n = 1; n <= 3; ++n)
    frames::for_each_frame(n, [&](const IntModel& im) {
      const bool g1 = detail::check_g1p(im).holds;
      g1_fail += !g1;
      EXPECT_EQ(g1, frames::frame_valid(im, kp_box, {"p", "q"}));
      if (detail::check_saturated(im, false).holds) {
        const bool g = detail::check_g2(im, false).holds;
        g2_fail += !g;
        EXPECT_EQ(g, frames::frame_valid(im, g2, {"p"}));
      }
    });
  EXPECT_GT(g1_fail, 0);
  EXPECT_GT(g2_fail, 0);
}

TEST(Powerset, FrameCounts) {
  EXPECT_EQ(frames::posets(3).size(), 5U);
  EXPECT_EQ(frames::posets(4).size(), 16U);
}

TEST(PMorphism, Identity) {
  auto m = edge01();
  auto im = build_powerset(m);
  std::vector<int> id{0, 1, 2};
  EXPECT_TRUE(check_pmorphism(im, im, id, MorphismFlavor::Bi).all());
  auto full = build_full_powerset(m);
  EXPECT_TRUE(check_pmorphism(full, full, {0, 1, 2, 3}, MorphismFlavor::Tri).all());
}

TEST(PMorphism, CollapseViolatesP1) {
  auto im = build_powerset(edge01());
  auto r = check_pmorphism(im, im, {0, 0, 2}, MorphismFlavor::Bi);
  EXPECT_FALSE(r.at("P1").holds);
  EXPECT_EQ(r.at("P1").witness, std::vector<int>{1});
  EXPECT_EQ(r.at("P1").prop, "p");
  EXPECT_THROW(check_pmorphism(im, im, {0, 1}, MorphismFlavor::Bi), InputError);
}

TEST(EndpointMap, Examples) {
  auto m = edge01();
  auto e = endpoint_map(build_powerset(m), MorphismFlavor::Bi);
  ASSERT_TRUE(e.ok);
  EXPECT_EQ(e.N, m);
  EXPECT_EQ(e.map, (std::vector<int>{0, 1, 2}));
  auto f = endpoint_map(build_full_powerset(KripkeModel(1)), MorphismFlavor::Tri);
  ASSERT_TRUE(f.ok);
  EXPECT_EQ(f.N.n, 1);
  EXPECT_EQ(f.map, (std::vector<int>{0, 1}));
  IntModel bad(3);
  bad.succ[0] = 0b110;
  auto g = endpoint_map(bad, MorphismFlavor::Bi);
  EXPECT_FALSE(g.ok);
  EXPECT_FALSE(g.preconditions.all());
}

TEST(EndpointMap, IsPMorphismAndPreservesTruth) {
  auto bi_fs = without_deps(Fragment::MID, 2);
  auto tri_fs = without_deps(Fragment::MT0, 2);
  for (int n = 1; n <= 3; ++n)
    for_each_model(n, {"p"}, [&](const KripkeModel& m) {
      for (bool tri : {false, true}) {
        IntModel im = tri ? build_full_powerset(m) : build_powerset(m);
        auto flavor = tri ? MorphismFlavor::Tri : MorphismFlavor::Bi;
        auto e = endpoint_map(im, flavor);
        EXPECT_TRUE(e.ok);
        if (!e.ok) return false;
        auto r = check_pmorphism(im, e.target, e.map, flavor);
        EXPECT_TRUE(r.all()) << r.failed().front();
        for (const auto& f : tri ? tri_fs : bi_fs) {
          const PointSet a = int_extension(im, f, tri), b = int_extension(e.target, f, tri);
          for (int w = 0; w < im.n; ++w) EXPECT_EQ(has(a, w), has(b, e.map[static_cast<std::size_t>(w)])) << print(f);
        }
      }
      return true;
    });
}

TEST(Powerset, DoubleNegationOnBulletModels) {
  for_each_model(2, {"p"}, [&](const KripkeModel& m) {
    auto im = build_full_powerset(m);
    const PointSet nn = int_extension(im, parse("~~p"), true);
    const PointSet p = int_extension(im, parse("p"), true);
    for (int w = 0; w < im.n; ++w) {
      if (im.is_endpoint(w)) continue;
      bool some = false;
      for_each_member(im.E_bullet(w), [&](int v) { some = some || !has(p, v); });
      EXPECT_EQ(!has(nn, w), some);
    }
    return true;
  });
}
