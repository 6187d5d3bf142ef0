#pragma once

// Planar antipodal grasps: pixel-wise grasp maps, oriented rectangles,
// rotated-rectangle IoU, the rectangle success metric, and the
// image -> camera -> robot transforms.
//
// Image coordinates are (u, v) = (column, row) with pixel centers at
// integer coordinates and v pointing down. Grasp angles are measured from
// +u towards +v and live in [-pi/2, pi/2].

#include "openarms/rigid.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace openarms {

using Plane = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Normalized width plane value 1.0 corresponds to this many pixels.
inline constexpr double kWidthScale = 150.0;
inline constexpr double kDefaultHeightRatio = 0.5;

struct GraspPixel {
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    double phi = 0.0;
    double omega = 0.0;
    double q = 0.0;
};

struct GraspWorld {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    double phi = 0.0;
    double w = 0.0;
    double q = 0.0;
};

struct GraspMap {
    Plane q_img;
    Plane cos2phi_img;
    Plane sin2phi_img;
    Plane width_img;

    GraspMap() = default;

    GraspMap(Plane q, Plane c, Plane s, Plane w)
        : q_img(std::move(q)), cos2phi_img(std::move(c)), sin2phi_img(std::move(s)), width_img(std::move(w)) {
        const auto same = [&](const Plane& p) { return p.rows() == q_img.rows() && p.cols() == q_img.cols(); };
        if (!same(cos2phi_img) || !same(sin2phi_img) || !same(width_img))
            throw std::invalid_argument("GraspMap planes must share dimensions");
        q_img = q_img.isNaN().select(0.0f, q_img).max(0.0f).min(1.0f);
    }

    static GraspMap zeros(Eigen::Index h, Eigen::Index w) {
        return GraspMap(Plane::Zero(h, w), Plane::Zero(h, w), Plane::Zero(h, w), Plane::Zero(h, w));
    }

    Eigen::Index height() const { return q_img.rows(); }
    Eigen::Index width() const { return q_img.cols(); }
};

struct GraspRectangle {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double angle = 0.0;
    // Extent along the grasp (opening) axis.
    double width = 1.0;
    // Extent along the jaw, perpendicular to the grasp axis.
    double height = 1.0;

    Eigen::Vector2d axis() const { return {std::cos(angle), std::sin(angle)}; }
    Eigen::Vector2d normal() const { return {-std::sin(angle), std::cos(angle)}; }
    double area() const { return width * height; }

    // p0 -> p1 runs along the grasp axis; counter-clockwise in (u, v).
    std::array<Eigen::Vector2d, 4> corners() const {
        const Eigen::Vector2d a = axis() * (width / 2.0);
        const Eigen::Vector2d b = normal() * (height / 2.0);
        return {center - a - b, center + a - b, center + a + b, center - a + b};
    }

    bool contains(const Eigen::Vector2d& p, double height_fraction = 1.0) const {
        const Eigen::Vector2d d = p - center;
        return std::abs(d.dot(axis())) <= width / 2.0 && std::abs(d.dot(normal())) <= height * height_fraction / 2.0;
    }

    void validate() const {
        if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("grasp rectangle needs width, height > 0");
    }
};

inline bool operator==(const GraspRectangle& a, const GraspRectangle& b) {
    return a.center == b.center && a.angle == b.angle && a.width == b.width && a.height == b.height;
}

// --- angle encoding ---------------------------------------------------------

inline std::pair<double, double> encode_angle(double phi) { return {std::cos(2.0 * phi), std::sin(2.0 * phi)}; }

inline double decode_angle(double c, double s) {
    if (c == 0.0 && s == 0.0) throw std::domain_error("decode_angle: zero vector has no angle");
    double phi = std::atan2(s, c) / 2.0;
    if (phi <= -kPi / 2.0) phi = kPi / 2.0;
    return phi;
}

// Absolute difference of two grasp angles modulo pi, in [0, pi/2].
inline double grasp_angle_difference(double a, double b) { return std::abs(wrap_half_pi(a - b)); }

// --- grasp map decoding -----------------------------------------------------

// Local maxima of q_img in descending q. Flat-topped maxima (plateaus of
// equal value) report the plateau pixel closest to the plateau centroid.
// A peak closer than min_separation to an accepted higher peak is dropped.
inline std::vector<GraspPixel> decode_grasp_map(const GraspMap& g, int k, double min_separation,
                                                double width_scale = kWidthScale) {
    if (k < 1) throw std::invalid_argument("decode_grasp_map: k must be >= 1");
    const Eigen::Index H = g.height(), W = g.width();
    const Plane& q = g.q_img;

    auto is_candidate = [&](Eigen::Index v, Eigen::Index u) {
        const float val = q(v, u);
        if (!(val > 0.0f)) return false;
        for (Eigen::Index dv = -1; dv <= 1; ++dv)
            for (Eigen::Index du = -1; du <= 1; ++du) {
                const Eigen::Index vv = v + dv, uu = u + du;
                if ((dv || du) && vv >= 0 && vv < H && uu >= 0 && uu < W && q(vv, uu) > val) return false;
            }
        return true;
    };

    Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> label =
        Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(H, W, -1);
    struct Peak {
        float q;
        Eigen::Index v, u;
    };
    std::vector<Peak> peaks;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> stack, members;
    int next_label = 0;
    for (Eigen::Index v = 0; v < H; ++v) {
        for (Eigen::Index u = 0; u < W; ++u) {
            if (label(v, u) >= 0 || !is_candidate(v, u)) continue;
            // Flood the 8-connected set of equal-valued candidates.
            const float val = q(v, u);
            members.clear();
            stack.assign(1, {v, u});
            label(v, u) = next_label;
            while (!stack.empty()) {
                auto [cv, cu] = stack.back();
                stack.pop_back();
                members.emplace_back(cv, cu);
                for (Eigen::Index dv = -1; dv <= 1; ++dv)
                    for (Eigen::Index du = -1; du <= 1; ++du) {
                        const Eigen::Index vv = cv + dv, uu = cu + du;
                        if (vv < 0 || vv >= H || uu < 0 || uu >= W || label(vv, uu) >= 0 || q(vv, uu) != val)
                            continue;
                        if (!is_candidate(vv, uu)) continue;
                        label(vv, uu) = next_label;
                        stack.emplace_back(vv, uu);
                    }
            }
            ++next_label;
            double mv = 0.0, mu = 0.0;
            for (auto [pv, pu] : members) {
                mv += static_cast<double>(pv);
                mu += static_cast<double>(pu);
            }
            mv /= static_cast<double>(members.size());
            mu /= static_cast<double>(members.size());
            auto best = members.front();
            double best_d = INFINITY;
            for (auto m : members) {
                const double d = std::hypot(static_cast<double>(m.first) - mv, static_cast<double>(m.second) - mu);
                if (d < best_d || (d == best_d && m < best)) {
                    best_d = d;
                    best = m;
                }
            }
            peaks.push_back({val, best.first, best.second});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return std::tie(b.q, a.v, a.u) < std::tie(a.q, b.v, b.u);
    });

    std::vector<GraspPixel> out;
    for (const auto& p : peaks) {
        if (static_cast<int>(out.size()) >= k) break;
        const Eigen::Vector2d s(static_cast<double>(p.u), static_cast<double>(p.v));
        const bool suppressed = std::any_of(out.begin(), out.end(), [&](const GraspPixel& o) {
            return (o.s - s).norm() < min_separation;
        });
        if (suppressed) continue;
        GraspPixel gp;
        gp.s = s;
        gp.q = p.q;
        const double c = g.cos2phi_img(p.v, p.u), sn = g.sin2phi_img(p.v, p.u);
        gp.phi = (c == 0.0 && sn == 0.0) ? 0.0 : decode_angle(c, sn);
        gp.omega = std::max(0.0, static_cast<double>(g.width_img(p.v, p.u)) * width_scale);
        out.push_back(gp);
    }
    return out;
}

// --- rectangles -------------------------------------------------------------

inline GraspRectangle rect_from_pixel(const GraspPixel& gp, double height_ratio = kDefaultHeightRatio) {
    if (!(gp.omega > 0.0)) throw std::invalid_argument("rect_from_pixel: grasp width must be > 0");
    if (!(height_ratio > 0.0)) throw std::invalid_argument("rect_from_pixel: height_ratio must be > 0");
    return {gp.s, gp.phi, gp.omega, gp.omega * height_ratio};
}

// Rectangle from four vertices in order; the first edge is the grasp axis.
inline GraspRectangle rect_from_vertices(const std::array<Eigen::Vector2d, 4>& p) {
    GraspRectangle r;
    r.center = (p[0] + p[1] + p[2] + p[3]) / 4.0;
    const Eigen::Vector2d e01 = p[1] - p[0];
    r.width = e01.norm();
    r.height = (p[2] - p[1]).norm();
    r.angle = wrap_half_pi(std::atan2(e01.y(), e01.x()));
    return r;
}

namespace detail {

using Polygon = std::vector<Eigen::Vector2d>;

inline double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double shoelace(const Polygon& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * std::abs(s);
}

// Sutherland-Hodgman clip of a polygon against a counter-clockwise convex polygon.
inline Polygon clip_convex(Polygon subject, const std::array<Eigen::Vector2d, 4>& clip) {
    for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
        const Eigen::Vector2d a = clip[e], b = clip[(e + 1) % clip.size()];
        const Eigen::Vector2d edge = b - a;
        Polygon out;
        out.reserve(subject.size() + 2);
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Eigen::Vector2d& cur = subject[i];
            const Eigen::Vector2d& prev = subject[(i + subject.size() - 1) % subject.size()];
            const double dc = cross(edge, cur - a), dp = cross(edge, prev - a);
            if (dc >= 0.0) {
                if (dp < 0.0) out.push_back(prev + (cur - prev) * (dp / (dp - dc)));
                out.push_back(cur);
            } else if (dp >= 0.0) {
                out.push_back(prev + (cur - prev) * (dp / (dp - dc)));
            }
        }
        subject = std::move(out);
    }
    return subject;
}

inline bool rect_less(const GraspRectangle& a, const GraspRectangle& b) {
    return std::tie(a.center.x(), a.center.y(), a.angle, a.width, a.height) <
           std::tie(b.center.x(), b.center.y(), b.angle, b.width, b.height);
}

}  // namespace detail

inline double intersection_area(const GraspRectangle& a, const GraspRectangle& b) {
    // Fixed argument order keeps the result bitwise symmetric.
    const GraspRectangle& first = detail::rect_less(b, a) ? b : a;
    const GraspRectangle& second = &first == &a ? b : a;
    const auto ca = first.corners();
    const auto poly = detail::clip_convex(detail::Polygon(ca.begin(), ca.end()), second.corners());
    return poly.size() < 3 ? 0.0 : detail::shoelace(poly);
}

inline double iou(const GraspRectangle& a, const GraspRectangle& b) {
    if (a == b) return 1.0;
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

inline constexpr double kMaxAngleDifference = kPi / 6.0;  // 30 degrees, strict
inline constexpr double kMinIou = 0.25;                   // strict

inline bool grasp_success(const GraspRectangle& pred, const std::vector<GraspRectangle>& gts) {
    if (gts.empty()) throw std::invalid_argument("grasp_success: no ground-truth rectangles");
    for (const auto& gt : gts) {
        if (grasp_angle_difference(pred.angle, gt.angle) < kMaxAngleDifference && iou(pred, gt) > kMinIou)
            return true;
    }
    return false;
}

// --- image -> camera -> robot -----------------------------------------------

struct CameraModel {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    // Camera frame -> robot frame.
    Transform extrinsic;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera focal lengths must be > 0");
        if (!is_unit(extrinsic.rotation)) throw std::invalid_argument("camera extrinsic quaternion is not unit norm");
    }
};

inline GraspWorld image_to_camera(const GraspPixel& gp, double depth, const CameraModel& cam) {
    if (!(depth > 0.0)) throw std::invalid_argument("image_to_camera: depth must be > 0");
    GraspWorld g;
    g.p = {(gp.s.x() - cam.cx) * depth / cam.fx, (gp.s.y() - cam.cy) * depth / cam.fy, depth};
    g.phi = gp.phi;
    g.w = gp.omega * depth / cam.fx;
    g.q = gp.q;
    return g;
}

inline GraspWorld camera_to_robot(const GraspWorld& g_cam, const CameraModel& cam) {
    GraspWorld g = g_cam;
    g.p = cam.extrinsic.apply(g_cam.p);
    const Eigen::Vector3d d = cam.extrinsic.rotation * Eigen::Vector3d(std::cos(g_cam.phi), std::sin(g_cam.phi), 0.0);
    if (std::hypot(d.x(), d.y()) > 1e-12) g.phi = wrap_half_pi(std::atan2(d.y(), d.x()));
    return g;
}

// --- training targets ---------------------------------------------------------

inline bool rect_in_bounds(const GraspRectangle& r, Eigen::Index h, Eigen::Index w) {
    for (const auto& c : r.corners())
        if (c.x() < -0.5 || c.y() < -0.5 || c.x() > static_cast<double>(w) - 0.5 ||
            c.y() > static_cast<double>(h) - 0.5)
            return false;
    return true;
}

// Fraction of the rectangle height painted as positive.
inline constexpr double kPaintHeightFraction = 1.0 / 3.0;

// Paints each rectangle's center third (along its height axis) with q = 1,
// its angle and its normalized width. Later rectangles overwrite earlier ones.
inline GraspMap encode_ground_truth(const std::vector<GraspRectangle>& rects, Eigen::Index h, Eigen::Index w,
                                    double width_scale = kWidthScale) {
    GraspMap g = GraspMap::zeros(h, w);
    for (const auto& r : rects) {
        r.validate();
        if (!rect_in_bounds(r, h, w)) throw std::out_of_range("encode_ground_truth: rectangle outside the image");
        const auto [c2, s2] = encode_angle(r.angle);
        const float wn = static_cast<float>(std::min(r.width / width_scale, 1.0));
        double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
        for (const auto& c : r.corners()) {
            umin = std::min(umin, c.x());
            umax = std::max(umax, c.x());
            vmin = std::min(vmin, c.y());
            vmax = std::max(vmax, c.y());
        }
        auto paint = [&](Eigen::Index v, Eigen::Index u) {
            g.q_img(v, u) = 1.0f;
            g.cos2phi_img(v, u) = static_cast<float>(c2);
            g.sin2phi_img(v, u) = static_cast<float>(s2);
            g.width_img(v, u) = wn;
        };
        bool painted = false;
        const auto v0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(vmin)));
        const auto v1 = std::min<Eigen::Index>(h - 1, static_cast<Eigen::Index>(std::floor(vmax)));
        const auto u0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(umin)));
        const auto u1 = std::min<Eigen::Index>(w - 1, static_cast<Eigen::Index>(std::floor(umax)));
        for (Eigen::Index v = v0; v <= v1; ++v)
            for (Eigen::Index u = u0; u <= u1; ++u)
                if (r.contains({static_cast<double>(u), static_cast<double>(v)}, kPaintHeightFraction)) {
                    paint(v, u);
                    painted = true;
                }
        if (!painted) {
            const auto u = std::clamp<Eigen::Index>(std::lround(r.center.x()), 0, w - 1);
            const auto v = std::clamp<Eigen::Index>(std::lround(r.center.y()), 0, h - 1);
            paint(v, u);
        }
    }
    return g;
}

}  // namespace openarms
