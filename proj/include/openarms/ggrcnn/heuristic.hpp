#pragma once

// Non-learned baseline predictor so the detection pipeline runs without
// trained weights. Quality favors flat, raised regions; the grasp axis
// follows the dominant depth-gradient orientation in a gripper-sized
// window, so the jaws close across nearby edges.

#include "openarms/ggrcnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace openarms::ggrcnn {

namespace detail {

using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Mean over a (2r+1)^2 window, clipped at the borders.
inline Grid box_mean(const Grid& in, Eigen::Index r) {
    const Eigen::Index H = in.rows(), W = in.cols();
    Grid sat = Grid::Zero(H + 1, W + 1);
    for (Eigen::Index y = 0; y < H; ++y)
        for (Eigen::Index x = 0; x < W; ++x)
            sat(y + 1, x + 1) = in(y, x) + sat(y, x + 1) + sat(y + 1, x) - sat(y, x);
    Grid out(H, W);
    for (Eigen::Index y = 0; y < H; ++y) {
        const Eigen::Index y0 = std::max<Eigen::Index>(0, y - r), y1 = std::min(H, y + r + 1);
        for (Eigen::Index x = 0; x < W; ++x) {
            const Eigen::Index x0 = std::max<Eigen::Index>(0, x - r), x1 = std::min(W, x + r + 1);
            const double s = sat(y1, x1) - sat(y0, x1) - sat(y1, x0) + sat(y0, x0);
            out(y, x) = s / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

}  // namespace detail

class HeuristicPredictor final : public Predictor {
public:
    // Constant normalized width written to the width plane.
    explicit HeuristicPredictor(double width_fraction = 0.4, int smoothing_radius = 2)
        : width_fraction_(width_fraction), smoothing_radius_(smoothing_radius) {}

    std::string name() const override { return "heuristic"; }

    GraspMap predict(const Tensor& input) const override {
        if (input.rank() != 3 || input.dim(0) != 1)
            throw std::invalid_argument("heuristic predictor expects a (1,H,W) depth tensor, got " + input.shape_string());
        if (!input.all_finite()) throw std::invalid_argument("predict: input has non-finite values");
        using detail::Grid;
        const auto H = static_cast<Eigen::Index>(input.dim(1)), W = static_cast<Eigen::Index>(input.dim(2));
        Grid d(H, W);
        for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = input.data[static_cast<std::size_t>(i)];
        const Grid ds = detail::box_mean(d, smoothing_radius_);

        Grid gx = Grid::Zero(H, W), gy = Grid::Zero(H, W);
        for (Eigen::Index y = 0; y < H; ++y)
            for (Eigen::Index x = 0; x < W; ++x) {
                const Eigen::Index xl = std::max<Eigen::Index>(0, x - 1), xr = std::min(W - 1, x + 1);
                const Eigen::Index yu = std::max<Eigen::Index>(0, y - 1), yd = std::min(H - 1, y + 1);
                if (xr > xl) gx(y, x) = (ds(y, xr) - ds(y, xl)) / static_cast<double>(xr - xl);
                if (yd > yu) gy(y, x) = (ds(yd, x) - ds(yu, x)) / static_cast<double>(yd - yu);
            }
        const Grid g = (gx.square() + gy.square()).sqrt();
        const double gmax = g.maxCoeff();
        const Grid gnorm = gmax > 0.0 ? Grid(g / gmax) : Grid(Grid::Zero(H, W));

        // Prominence: how far above the median surface (closer to the camera).
        std::vector<double> sorted(d.data(), d.data() + d.size());
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const double median = sorted[sorted.size() / 2];
        const double nearest = ds.minCoeff();
        const double range = median - nearest;
        Grid prominence = Grid::Ones(H, W);
        if (range > 1e-9) prominence = ((median - ds) / range).max(0.0).min(1.0);

        const Plane q = ((1.0 - gnorm) * prominence).cast<float>();

        // Dominant gradient orientation (structure tensor) over a window the
        // size of the gripper opening.
        const auto r = static_cast<Eigen::Index>(std::lround(width_fraction_ * kWidthScale / 2.0));
        const Grid jxx = detail::box_mean(gx.square(), r);
        const Grid jyy = detail::box_mean(gy.square(), r);
        const Grid jxy = detail::box_mean(gx * gy, r);
        Plane c2(H, W), s2(H, W);
        for (Eigen::Index i = 0; i < c2.size(); ++i) {
            const double a = jxx.data()[i] - jyy.data()[i], b = 2.0 * jxy.data()[i];
            const double n = std::hypot(a, b);
            c2.data()[i] = n > 1e-15 ? static_cast<float>(a / n) : 1.0f;
            s2.data()[i] = n > 1e-15 ? static_cast<float>(b / n) : 0.0f;
        }
        return GraspMap(q, c2, s2, Plane::Constant(H, W, static_cast<float>(width_fraction_)));
    }

private:
    double width_fraction_;
    int smoothing_radius_;
};

inline std::unique_ptr<Predictor> heuristic_predictor() { return std::make_unique<HeuristicPredictor>(); }

}  // namespace openarms::ggrcnn
