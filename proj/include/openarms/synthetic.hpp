#pragma once

// Synthetic tabletop depth scenes: rectangular blocks raised above a flat
// table, seen straight down. Used for fixtures, demos and tests.

#include "openarms/cornell_data.hpp"
#include "openarms/rng.hpp"

#include <vector>

namespace openarms {

struct Block {
    Eigen::Vector2d center{0.0, 0.0};  // pixels
    double angle = 0.0;                // long axis direction, radians
    double length = 60.0;              // pixels along the long axis
    double breadth = 20.0;             // pixels across
    double height = 0.04;              // meters above the table

    GraspRectangle footprint() const { return {center, angle, length, breadth}; }

    // A grasp closing across the narrow dimension, offset `along` pixels
    // from the center along the long axis.
    GraspRectangle across(double along = 0.0, double jaw = 16.0, double margin = 10.0) const {
        const Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
        return {center + along * dir, wrap_half_pi(angle + kPi / 2.0), breadth + margin, jaw};
    }
};

struct SceneSpec {
    Eigen::Index width = 320, height = 240;
    double table_depth = 0.70;
    // Fraction of pixels dropped to 0 (missing depth), 0 for none.
    double dropout = 0.0;
    double noise_m = 0.0;
};

inline DepthImage render_scene(const SceneSpec& spec, const std::vector<Block>& blocks, std::uint64_t seed = 0) {
    Rng rng(seed);
    DepthPlane v = DepthPlane::Constant(spec.height, spec.width, spec.table_depth);
    for (Eigen::Index y = 0; y < spec.height; ++y)
        for (Eigen::Index x = 0; x < spec.width; ++x) {
            const Eigen::Vector2d p(static_cast<double>(x), static_cast<double>(y));
            for (const auto& b : blocks)
                if (b.footprint().contains(p)) v(y, x) = std::min(v(y, x), spec.table_depth - b.height);
            if (spec.noise_m > 0.0) v(y, x) += spec.noise_m * rng.normal();
            if (spec.dropout > 0.0 && rng.uniform() < spec.dropout) v(y, x) = 0.0;
        }
    return DepthImage::from_values(std::move(v));
}

}  // namespace openarms
