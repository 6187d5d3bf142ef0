#include "openarms/grasp_geometry.hpp"
#include "oracles/geometry.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace openarms;

namespace {

oracle::Rect to_oracle(const GraspRectangle& r) { return {r.center.x(), r.center.y(), r.angle, r.width, r.height}; }

GraspRectangle rotated(GraspRectangle r, double by) {
    r.angle = wrap_half_pi(r.angle + by);
    return r;
}

GraspMap single_peak_map(Eigen::Index h, Eigen::Index w) { return GraspMap::zeros(h, w); }

}  // namespace

TEST(AngleEncoding, Examples) {
    auto [c0, s0] = encode_angle(0.0);
    EXPECT_EQ(c0, 1.0);
    EXPECT_EQ(s0, 0.0);
    auto [c1, s1] = encode_angle(kPi / 4);
    EXPECT_NEAR(c1, 0.0, 1e-15);
    EXPECT_NEAR(s1, 1.0, 1e-15);
    auto [c2, s2] = encode_angle(-kPi / 3);
    EXPECT_NEAR(c2, -0.5, 1e-9);
    EXPECT_NEAR(s2, -0.866025, 1e-6);
    EXPECT_NEAR(s2, std::sin(-2 * kPi / 3), 1e-9);
}

TEST(AngleEncoding, DecodeExamplesAndRoundTrip) {
    EXPECT_EQ(decode_angle(1.0, 0.0), 0.0);
    EXPECT_EQ(decode_angle(-1.0, 0.0), kPi / 2);
    EXPECT_EQ(decode_angle(-1.0, -0.0), kPi / 2);
    EXPECT_THROW(decode_angle(0.0, 0.0), std::domain_error);
    for (int i = 1; i <= 181; ++i) {
        const double phi = -kPi / 2 + kPi * i / 182.0;
        auto [c, s] = encode_angle(phi);
        EXPECT_NEAR(decode_angle(c, s), phi, 1e-9);
    }
}

TEST(DecodeGraspMap, DeltaPeak) {
    GraspMap g = single_peak_map(300, 300);
    g.q_img(150, 200) = 0.9f;
    g.cos2phi_img(150, 200) = 1.0f;
    g.width_img(150, 200) = 0.4f;
    const auto out = decode_grasp_map(g, 5, 10);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].s, Eigen::Vector2d(200, 150));
    EXPECT_FLOAT_EQ(static_cast<float>(out[0].q), 0.9f);
    EXPECT_NEAR(out[0].omega, 0.4 * kWidthScale, 1e-5);
    EXPECT_EQ(out[0].phi, 0.0);
}

TEST(DecodeGraspMap, SeparatedPeaksInDescendingOrder) {
    GraspMap g = GraspMap::zeros(100, 100);
    g.q_img(20, 20) = 0.7f;
    g.q_img(80, 70) = 0.9f;
    const auto out = decode_grasp_map(g, 2, 10);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].s, Eigen::Vector2d(70, 80));
    EXPECT_EQ(out[1].s, Eigen::Vector2d(20, 20));
    EXPECT_GT(out[0].q, out[1].q);
}

TEST(DecodeGraspMap, CloseLowerPeakSuppressed) {
    GraspMap g = GraspMap::zeros(50, 50);
    g.q_img(25, 20) = 0.9f;
    g.q_img(25, 23) = 0.8f;
    const auto out = decode_grasp_map(g, 5, 10);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].s, Eigen::Vector2d(20, 25));
}

TEST(DecodeGraspMap, ZeroMapAndBadK) {
    const GraspMap g = GraspMap::zeros(20, 20);
    EXPECT_TRUE(decode_grasp_map(g, 3, 5).empty());
    EXPECT_THROW(decode_grasp_map(g, 0, 5), std::invalid_argument);
}

TEST(DecodeGraspMap, PlateauReportsCentralPixel) {
    GraspMap g = GraspMap::zeros(40, 40);
    g.q_img.block(10, 10, 5, 9) = 1.0f;  // rows 10..14, cols 10..18
    const auto out = decode_grasp_map(g, 3, 5);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].s, Eigen::Vector2d(14, 12));
}

TEST(GraspMapType, ClampsQualityAndChecksShapes) {
    Plane q(2, 2);
    q << -1.0f, 0.5f, 2.0f, NAN;
    const GraspMap g(q, Plane::Zero(2, 2), Plane::Zero(2, 2), Plane::Zero(2, 2));
    EXPECT_EQ(g.q_img(0, 0), 0.0f);
    EXPECT_EQ(g.q_img(0, 1), 0.5f);
    EXPECT_EQ(g.q_img(1, 0), 1.0f);
    EXPECT_EQ(g.q_img(1, 1), 0.0f);
    EXPECT_THROW(GraspMap(q, Plane::Zero(2, 3), Plane::Zero(2, 2), Plane::Zero(2, 2)), std::invalid_argument);
}

TEST(RectFromPixel, Examples) {
    const GraspPixel gp{{100, 100}, 0.0, 60, 1.0};
    const auto r = rect_from_pixel(gp, 0.5);
    EXPECT_EQ(r.center, Eigen::Vector2d(100, 100));
    EXPECT_EQ(r.width, 60);
    EXPECT_EQ(r.height, 30);
    const auto c = r.corners();
    EXPECT_LT((c[0] - Eigen::Vector2d(70, 85)).norm(), 1e-12);
    EXPECT_LT((c[2] - Eigen::Vector2d(130, 115)).norm(), 1e-12);

    GraspPixel turned = gp;
    turned.phi = kPi / 2;
    const auto rt = rect_from_pixel(turned, 0.5);
    double umin = 1e9, umax = -1e9, vmin = 1e9, vmax = -1e9;
    for (const auto& p : rt.corners()) {
        umin = std::min(umin, p.x()), umax = std::max(umax, p.x());
        vmin = std::min(vmin, p.y()), vmax = std::max(vmax, p.y());
    }
    EXPECT_NEAR(umax - umin, 30, 1e-12);
    EXPECT_NEAR(vmax - vmin, 60, 1e-12);
    EXPECT_NEAR((umax + umin) / 2, 100, 1e-12);

    const auto sq = rect_from_pixel(gp, 1.0);
    EXPECT_EQ(sq.width, sq.height);

    GraspPixel zero = gp;
    zero.omega = 0;
    EXPECT_THROW(rect_from_pixel(zero), std::invalid_argument);
    EXPECT_THROW(rect_from_pixel(gp, 0.0), std::invalid_argument);
}

TEST(RectFromVertices, InvertsCorners) {
    testing_support::Rng rng(6);
    for (int k = 0; k < 200; ++k) {
        const auto r = testing_support::random_rect(rng);
        const auto back = rect_from_vertices(r.corners());
        EXPECT_LT((back.center - r.center).norm(), 1e-9);
        EXPECT_LT(grasp_angle_difference(back.angle, r.angle), 1e-9);
        EXPECT_NEAR(back.width, r.width, 1e-9);
        EXPECT_NEAR(back.height, r.height, 1e-9);
    }
}

TEST(Iou, AnalyticCases) {
    const GraspRectangle a{{50, 50}, 0.0, 20, 10};
    EXPECT_EQ(iou(a, a), 1.0);
    const GraspRectangle far{{500, 50}, 0.3, 20, 10};
    EXPECT_EQ(iou(a, far), 0.0);
    const GraspRectangle shifted{{60, 50}, 0.0, 20, 10};
    EXPECT_NEAR(iou(a, shifted), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(intersection_area(a, shifted), 100.0, 1e-12);
}

TEST(Iou, MatchesRasterOracle) {
    testing_support::Rng rng(100);
    for (int k = 0; k < 300; ++k) {
        const auto a = testing_support::random_rect(rng);
        GraspRectangle b = testing_support::random_rect(rng);
        b.center = a.center + Eigen::Vector2d(rng.uniform(-20, 20), rng.uniform(-20, 20));
        const double exact = iou(a, b);
        ASSERT_NEAR(exact, oracle::raster_iou(to_oracle(a), to_oracle(b)), 0.02) << k;
    }
}

TEST(Iou, SymmetricAndBounded) {
    testing_support::Rng rng(101);
    for (int k = 0; k < 1000; ++k) {
        const auto a = testing_support::random_rect(rng, 60);
        const auto b = testing_support::random_rect(rng, 60);
        const double ab = iou(a, b), ba = iou(b, a);
        ASSERT_EQ(ab, ba);
        ASSERT_GE(ab, 0.0);
        ASSERT_LE(ab, 1.0);
        ASSERT_EQ(iou(a, a), 1.0);
    }
}

TEST(GraspSuccess, MetricBoundaries) {
    const GraspRectangle gt{{100, 100}, 0.2, 60, 30};
    EXPECT_TRUE(grasp_success(gt, {gt}));

    const auto r29 = rotated(gt, deg_to_rad(29));
    const auto r31 = rotated(gt, deg_to_rad(31));
    EXPECT_GT(oracle::raster_iou(to_oracle(r29), to_oracle(gt)), 0.25);
    EXPECT_GT(oracle::raster_iou(to_oracle(r31), to_oracle(gt)), 0.25);
    EXPECT_TRUE(grasp_success(r29, {gt}));
    EXPECT_FALSE(grasp_success(r31, {gt}));

    // Slide along the grasp axis until IoU = 0.2: overlap fraction f gives
    // IoU f / (2 - f), so f = 1/3.
    GraspRectangle slid = gt;
    slid.center += gt.axis() * (gt.width * 2.0 / 3.0);
    EXPECT_NEAR(iou(slid, gt), 0.2, 1e-9);
    EXPECT_FALSE(grasp_success(slid, {gt}));

    EXPECT_THROW(grasp_success(gt, {}), std::invalid_argument);
}

TEST(GraspSuccess, AnyMatchingTruthSuffices) {
    const GraspRectangle gt{{100, 100}, 0.0, 60, 30};
    const GraspRectangle other{{300, 300}, 1.0, 60, 30};
    EXPECT_TRUE(grasp_success(gt, {other, gt}));
    EXPECT_FALSE(grasp_success(gt, {other}));
}

TEST(GraspSuccess, AntipodalSymmetry) {
    testing_support::Rng rng(102);
    for (int k = 0; k < 300; ++k) {
        const auto gt = testing_support::random_rect(rng);
        GraspRectangle pred = gt;
        pred.center += Eigen::Vector2d(rng.uniform(-10, 10), rng.uniform(-10, 10));
        pred.angle += rng.uniform(-0.7, 0.7);
        GraspRectangle plus = pred, minus = pred;
        plus.angle += kPi;
        minus.angle -= kPi;
        const bool base = grasp_success(pred, {gt});
        EXPECT_EQ(base, grasp_success(plus, {gt}));
        EXPECT_EQ(base, grasp_success(minus, {gt}));
    }
}

TEST(CameraTransforms, PinholeExamples) {
    CameraModel cam{400, 400, 200, 200, {}};
    const auto on_axis = image_to_camera({{200, 200}, 0.1, 10, 0.5}, 0.5, cam);
    EXPECT_EQ(on_axis.p, Eigen::Vector3d(0, 0, 0.5));
    EXPECT_EQ(on_axis.phi, 0.1);
    const auto off = image_to_camera({{600, 200}, 0.0, 400, 1.0}, 1.0, cam);
    EXPECT_EQ(off.p, Eigen::Vector3d(1.0, 0, 1.0));
    EXPECT_EQ(off.w, 1.0);
    EXPECT_THROW(image_to_camera({}, 0.0, cam), std::invalid_argument);
    EXPECT_THROW(image_to_camera({}, -1.0, cam), std::invalid_argument);
}

TEST(CameraTransforms, ExtrinsicExamples) {
    const GraspWorld g{{1, 0, 0}, 0.3, 0.05, 0.8};
    CameraModel identity;
    const auto same = camera_to_robot(g, identity);
    EXPECT_EQ(same.p, g.p);
    EXPECT_EQ(same.phi, g.phi);

    CameraModel lifted;
    lifted.extrinsic = Transform::from_translation({0, 0, 1});
    const auto up = camera_to_robot(g, lifted);
    EXPECT_EQ(up.p, Eigen::Vector3d(1, 0, 1));
    EXPECT_EQ(up.phi, g.phi);
    EXPECT_EQ(up.w, g.w);
    EXPECT_EQ(up.q, g.q);

    CameraModel yaw;
    yaw.extrinsic = Transform::from_rotation(Eigen::Quaterniond(Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitZ())));
    const auto turned = camera_to_robot(g, yaw);
    EXPECT_LT((turned.p - Eigen::Vector3d(0, 1, 0)).norm(), 1e-15);
    EXPECT_NEAR(turned.phi, wrap_half_pi(0.3 + kPi / 2), 1e-12);
    EXPECT_LT(turned.phi, 0.0);
}

TEST(EncodeGroundTruth, EmptyListIsZeroMap) {
    const auto g = encode_ground_truth({}, 30, 40);
    EXPECT_EQ(g.height(), 30);
    EXPECT_EQ(g.width(), 40);
    EXPECT_TRUE((g.q_img == 0.0f).all());
    EXPECT_TRUE((g.width_img == 0.0f).all());
}

TEST(EncodeGroundTruth, PaintsCenterThirdExactly) {
    testing_support::Rng rng(200);
    std::vector<GraspRectangle> rects = {{{50.3, 40.0}, 0.0, 40, 30}};
    for (int k = 0; k < 30; ++k) rects.push_back({{rng.uniform(30, 70), rng.uniform(30, 50)}, rng.uniform(-1.5, 1.5),
                                                   rng.uniform(10, 40), rng.uniform(6, 30)});
    for (const auto& r : rects) {
        const auto g = encode_ground_truth({r}, 80, 100);
        const auto mask = oracle::paint_mask(to_oracle(r), 80, 100);
        if (!mask.any()) continue;
        for (int v = 0; v < 80; ++v)
            for (int u = 0; u < 100; ++u) ASSERT_EQ(g.q_img(v, u) == 1.0f, mask(v, u)) << u << "," << v;
        auto [c, s] = encode_angle(r.angle);
        const auto [v, u] = std::pair<int, int>(int(std::lround(r.center.y())), int(std::lround(r.center.x())));
        if (mask(v, u)) {
            EXPECT_FLOAT_EQ(g.cos2phi_img(v, u), float(c));
            EXPECT_FLOAT_EQ(g.sin2phi_img(v, u), float(s));
            EXPECT_FLOAT_EQ(g.width_img(v, u), float(r.width / kWidthScale));
        }
    }
}

TEST(EncodeGroundTruth, WidthPlaneSaturates) {
    const auto g = encode_ground_truth({{{100, 100}, 0.0, 180, 30}}, 200, 200);
    EXPECT_EQ(g.width_img(100, 100), 1.0f);
}

TEST(EncodeGroundTruth, OutOfBoundsRejected) {
    EXPECT_THROW(encode_ground_truth({{{5, 5}, 0.0, 40, 10}}, 50, 50), std::out_of_range);
}

TEST(EncodeGroundTruth, RoundTripThroughDecode) {
    testing_support::Rng rng(300);
    for (int k = 0; k < 500; ++k) {
        GraspRectangle r;
        r.width = rng.uniform(15, 120);
        r.height = r.width * rng.uniform(0.3, 1.0);
        r.angle = rng.uniform(-kPi / 2, kPi / 2);
        r.center = {rng.uniform(100, 300), rng.uniform(100, 300)};
        const auto g = encode_ground_truth({r}, 400, 400);
        const auto top = decode_grasp_map(g, 1, 10);
        ASSERT_EQ(top.size(), 1u);
        const auto pred = rect_from_pixel(top[0]);
        EXPECT_LE((pred.center - r.center).norm(), 2.0) << k;
        EXPECT_LE(grasp_angle_difference(pred.angle, r.angle), deg_to_rad(3.0)) << k;
        ASSERT_TRUE(grasp_success(pred, {r})) << k;
    }
}

TEST(EncodeGroundTruth, RotatingSourcesRotatesDecodedAngles) {
    testing_support::Rng rng(301);
    const Eigen::Vector2d c(200, 200);
    for (int k = 0; k < 100; ++k) {
        GraspRectangle r{{rng.uniform(150, 250), rng.uniform(150, 250)}, rng.uniform(-1.5, 1.5), rng.uniform(20, 80), 0};
        r.height = r.width * 0.5;
        const double theta = rng.uniform(-kPi, kPi);
        const Eigen::Rotation2Dd rot(theta);
        GraspRectangle moved{c + rot * (r.center - c), wrap_half_pi(r.angle + theta), r.width, r.height};
        const auto a = decode_grasp_map(encode_ground_truth({r}, 400, 400), 1, 10);
        const auto b = decode_grasp_map(encode_ground_truth({moved}, 400, 400), 1, 10);
        ASSERT_EQ(a.size(), 1u);
        ASSERT_EQ(b.size(), 1u);
        EXPECT_LE(grasp_angle_difference(b[0].phi - a[0].phi, theta), deg_to_rad(3.0)) << k;
    }
}
