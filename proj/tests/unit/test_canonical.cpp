#include <gtest/gtest.h>

#include "helpers.hpp"

namespace pwl {
namespace {

using test::focus_focus;

TEST(VectorField, LeftFocusOnTheLine) {
  const auto p = focus_focus(0.5, 0.0, 1.0, 0.0, 0.0);
  const Vec2 v = vector_field(p, {0.0, 2.0}, Side::Left);
  EXPECT_EQ(v, (Vec2{-2.0, 1.0}));
}

TEST(VectorField, RightFocusAtOrigin) {
  const auto p = focus_focus(0.0, 0.0, 0.0, 3.0, 0.0);
  EXPECT_EQ(vector_field(p, {0.0, 0.0}, Side::Right), (Vec2{3.0, 0.0}));
}

TEST(VectorField, LeftDegenerateNode) {
  CanonicalParams p = focus_focus(1.0, 0.0, 0.0, 0.0, 0.0);
  p.left_class = EquilibriumClass::DegenerateNode;
  EXPECT_EQ(vector_field(p, {1.0, 1.0}, Side::Left), (Vec2{1.0, 1.0}));
}

TEST(VectorField, ClassEntersThroughAlphaSquared) {
  CanonicalParams p = focus_focus(0.3, -0.7, 0.0, 0.0, 0.0);
  p.left_class = EquilibriumClass::SaddleOrDiagonalNode;
  p.right_class = EquilibriumClass::DegenerateNode;
  EXPECT_DOUBLE_EQ(vector_field(p, {-1.0, 0.0}, Side::Left).y, -(0.09 - 1.0));
  EXPECT_DOUBLE_EQ(vector_field(p, {1.0, 0.0}, Side::Right).y, 0.49);
}

TEST(Equilibrium, RightFocusOnBoundary) {
  const auto e = equilibrium(focus_focus(0.0, 0.3, 0.0, 1.7, 0.0), Side::Right);
  EXPECT_EQ(e.location, (Vec2{0.0, 1.7}));
  EXPECT_TRUE(e.on_boundary);
  EXPECT_TRUE(e.is_real);
}

TEST(Equilibrium, LeftCenterIsRealAndInside) {
  const auto e = equilibrium(focus_focus(0.0, 0.0, 1.0, 0.0, 0.0), Side::Left);
  EXPECT_EQ(e.location, (Vec2{-1.0, 0.0}));
  EXPECT_TRUE(e.is_real);
  EXPECT_FALSE(e.on_boundary);
}

TEST(Equilibrium, HomogeneousLeftIsOrigin) {
  for (double ell : {-1.3, 0.0, 0.4}) {
    const auto e = equilibrium(focus_focus(ell, 0.0, 0.0, 0.0, 0.0), Side::Left);
    EXPECT_EQ(e.location, (Vec2{0.0, 0.0}));
    EXPECT_TRUE(e.on_boundary);
    EXPECT_FALSE(std::signbit(e.location.x));
  }
}

TEST(Equilibrium, VirtualWhenOnTheOtherSide) {
  EXPECT_FALSE(equilibrium(focus_focus(0.0, 0.0, -1.0, 0.0, 0.0), Side::Left).is_real);
  EXPECT_FALSE(equilibrium(focus_focus(0.0, 0.0, 0.0, 0.0, 1.0), Side::Right).is_real);
}

TEST(Equilibrium, SingularPieceThrows) {
  CanonicalParams p = focus_focus(1.0, 0.0, 1.0, 0.0, 0.0);
  p.left_class = EquilibriumClass::SaddleOrDiagonalNode;  // ell^2 - 1 = 0, invalid on purpose
  try {
    equilibrium(p, Side::Left);
    FAIL() << "expected SINGULAR_PIECE";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularPiece);
  }
}

TEST(Equilibrium, GeneralPieceSingularGivesNullopt) {
  GeneralAffinePiece pc{{1.0, 2.0, 2.0, 4.0}, {1.0, 0.0}, Side::Left};
  EXPECT_FALSE(equilibrium(pc).has_value());
}

TEST(Equilibrium, IsAZeroOfTheField) {
  test::Uniform u(11);
  for (int i = 0; i < 300; ++i) {
    CanonicalParams p = focus_focus(u(-2, 2), u(-2, 2), u(-2, 2), u(-2, 2), u(-2, 2));
    p.left_class = static_cast<EquilibriumClass>(i % 3 - 1);
    p.right_class = static_cast<EquilibriumClass>((i / 3) % 3 - 1);
    ASSERT_TRUE(is_valid(p));
    for (Side s : {Side::Left, Side::Right}) {
      const auto e = equilibrium(p, s);
      const Vec2 v = vector_field(p, e.location, s);
      const double scale = std::max(1.0, norm_inf(e.location));
      EXPECT_LT(norm_inf(v), 1e-12 * scale);
      if (e.on_boundary) EXPECT_TRUE(e.is_real);
      const auto g = equilibrium(piece(p, s));
      ASSERT_TRUE(g.has_value());
      EXPECT_NEAR(g->location.x, e.location.x, 1e-12 * scale);
      EXPECT_NEAR(g->location.y, e.location.y, 1e-12 * scale);
    }
  }
}

TEST(Validate, Invariants) {
  EXPECT_TRUE(is_valid(focus_focus(0.0, 0.0, 0.0, 0.0, 0.0)));
  EXPECT_FALSE(is_valid(focus_focus(std::nan(""), 0.0, 0.0, 0.0, 0.0)));
  EXPECT_FALSE(is_valid(focus_focus(0.0, 0.0, INFINITY, 0.0, 0.0)));
  CanonicalParams p = focus_focus(0.0, 0.0, 0.0, 0.0, 0.0);
  p.left_class = EquilibriumClass::DegenerateNode;
  EXPECT_FALSE(is_valid(p));
  p.left_class = EquilibriumClass::SaddleOrDiagonalNode;
  EXPECT_TRUE(is_valid(p));
  p.ell = -1.0;
  EXPECT_FALSE(is_valid(p));
  p = focus_focus(0.0, 1.0, 0.0, 0.0, 0.0);
  p.right_class = EquilibriumClass::SaddleOrDiagonalNode;
  EXPECT_FALSE(is_valid(p));
  p.right_class = EquilibriumClass::DegenerateNode;
  EXPECT_TRUE(is_valid(p));
  p.r = 0.0;
  try {
    validate(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
  }
}

TEST(EquilibriumClassNames, RoundTrip) {
  for (auto c : {EquilibriumClass::FocusCenter, EquilibriumClass::DegenerateNode,
                 EquilibriumClass::SaddleOrDiagonalNode}) {
    EXPECT_EQ(parse_equilibrium_class(to_string(c)), c);
  }
  EXPECT_THROW(parse_equilibrium_class("star"), Error);
}

TEST(ClassifyBoundary, PositiveBIsEscaping) {
  const auto bc = classify_boundary(focus_focus(0.2, -0.4, 1.0, 2.0, 0.0));
  ASSERT_EQ(bc.intervals.size(), 3u);
  EXPECT_EQ(bc.intervals[0].label, RegionLabel::Sewing);
  EXPECT_EQ(bc.intervals[0].hi, 0.0);
  EXPECT_EQ(bc.intervals[1].label, RegionLabel::Escaping);
  EXPECT_EQ(bc.intervals[1].lo, 0.0);
  EXPECT_EQ(bc.intervals[1].hi, 2.0);
  EXPECT_EQ(bc.intervals[2].label, RegionLabel::Sewing);
  EXPECT_EQ(bc.tangency_points, (std::vector<double>{0.0, 2.0}));
  EXPECT_EQ(bc.label_at(1.0), RegionLabel::Escaping);
  EXPECT_FALSE(bc.label_at(2.0).has_value());
}

TEST(ClassifyBoundary, NegativeBIsSliding) {
  const auto bc = classify_boundary(focus_focus(0.0, 0.0, 0.0, -1.0, 0.0));
  ASSERT_EQ(bc.intervals.size(), 3u);
  EXPECT_EQ(bc.intervals[1].label, RegionLabel::Sliding);
  EXPECT_EQ(bc.intervals[1].lo, -1.0);
  EXPECT_EQ(bc.intervals[1].hi, 0.0);
}

TEST(ClassifyBoundary, ZeroBHasOnlySewing) {
  const auto bc = classify_boundary(focus_focus(0.5, 0.5, 1.0, 0.0, 1.0));
  ASSERT_EQ(bc.tangency_points, std::vector<double>{0.0});
  for (const auto& iv : bc.intervals) EXPECT_EQ(iv.label, RegionLabel::Sewing);
  EXPECT_EQ(bc.intervals.size(), 2u);
}

TEST(ClassifyBoundary, DependsOnlyOnB) {
  test::Uniform u(5);
  for (double b : {-1.0, 0.0, 2.0, 0.3}) {
    const auto ref = classify_boundary(focus_focus(0.0, 0.0, 0.0, b, 0.0));
    for (int i = 0; i < 100; ++i) {
      CanonicalParams p = focus_focus(u(-2, 2), u(-2, 2), u(-3, 3), b, u(-3, 3));
      p.left_class = static_cast<EquilibriumClass>(i % 3 - 1);
      p.right_class = static_cast<EquilibriumClass>((i / 3) % 3 - 1);
      const auto bc = classify_boundary(p);
      ASSERT_EQ(bc.intervals.size(), ref.intervals.size());
      EXPECT_EQ(bc.tangency_points, ref.tangency_points);
      for (std::size_t k = 0; k < bc.intervals.size(); ++k) {
        EXPECT_EQ(bc.intervals[k].lo, ref.intervals[k].lo);
        EXPECT_EQ(bc.intervals[k].hi, ref.intervals[k].hi);
        EXPECT_EQ(bc.intervals[k].label, ref.intervals[k].label);
      }
    }
  }
}

TEST(ClassifyBoundary, SewingMeansSameNonzeroSign) {
  test::Uniform u(8);
  for (int i = 0; i < 200; ++i) {
    const auto p = focus_focus(u(-2, 2), u(-2, 2), u(-3, 3), u(-3, 3), u(-3, 3));
    const auto bc = classify_boundary(p);
    for (int k = 0; k < 50; ++k) {
      const double y = u(-6, 6);
      const auto lbl = bc.label_at(y);
      if (!lbl) continue;
      const double vl = vector_field(p, {0.0, y}, Side::Left).x;
      const double vr = vector_field(p, {0.0, y}, Side::Right).x;
      if (*lbl == RegionLabel::Sewing) {
        EXPECT_GT(vl * vr, 0.0);
      } else if (*lbl == RegionLabel::Sliding) {
        EXPECT_TRUE(vl > 0.0 && vr < 0.0);
      } else {
        EXPECT_TRUE(vl < 0.0 && vr > 0.0);
      }
    }
  }
}

TEST(ClassifyBoundary, GeneralPieces) {
  // left x' = y - 1, right x' = y - 3: sliding on (1, 3)
  GeneralAffinePiece left{{0.0, 1.0, 0.0, 0.0}, {-1.0, 0.0}, Side::Left};
  GeneralAffinePiece right{{0.0, 1.0, 0.0, 0.0}, {-3.0, 0.0}, Side::Right};
  const auto bc = classify_boundary(left, right);
  ASSERT_EQ(bc.intervals.size(), 3u);
  EXPECT_EQ(bc.intervals[1].label, RegionLabel::Sliding);
  EXPECT_EQ(bc.intervals[1].lo, 1.0);
  EXPECT_EQ(bc.intervals[1].hi, 3.0);
  EXPECT_EQ(bc.intervals[0].label, RegionLabel::Sewing);
  // a field tangent along the whole line is rejected
  GeneralAffinePiece flat{{1.0, 0.0, 0.0, 1.0}, {0.0, 1.0}, Side::Left};
  EXPECT_THROW(classify_boundary(flat, right), Error);
}

TEST(SlidingSet, ClosedInterval) {
  const auto s = sliding_set(focus_focus(0, 0, 0, -2.5, 0));
  EXPECT_EQ(s.lo, -2.5);
  EXPECT_EQ(s.hi, 0.0);
  EXPECT_TRUE(s.contains(0.0));
  EXPECT_TRUE(s.contains(-2.5));
  EXPECT_FALSE(s.contains(0.1));
}

}  // namespace
}  // namespace pwl
