#pragma once

// Depth image -> inpaint -> crop/scale -> predictor -> grasp map decode ->
// rectangles in the original frame (and optionally robot-frame grasps),
// plus the IW/OW evaluation harness built on it.

#include "openarms/cornell_data.hpp"
#include "openarms/ggrcnn/heuristic.hpp"
#include "openarms/ggrcnn/network.hpp"
#include "openarms/grasp_geometry.hpp"

#include <optional>
#include <vector>

namespace openarms {

struct DetectOptions {
    int k = 5;
    double min_separation = 20.0;  // processed-frame pixels
    double height_ratio = kDefaultHeightRatio;
    int input_size = kNetworkInputSize;
};

struct Detection {
    GraspPixel pixel;      // processed (network) frame
    GraspRectangle rect;   // original image frame
    double depth = 0.0;    // meters at the grasp center
    std::optional<GraspWorld> world;
};

inline ggrcnn::Tensor depth_tensor(const DepthImage& d) {
    ggrcnn::Tensor t({1, static_cast<std::size_t>(d.height()), static_cast<std::size_t>(d.width())});
    for (Eigen::Index i = 0; i < d.values.size(); ++i) t.data[static_cast<std::size_t>(i)] = static_cast<float>(d.values.data()[i]);
    return t;
}

inline std::vector<Detection> detect_grasps(const DepthImage& raw, const ggrcnn::Predictor& predictor,
                                            const DetectOptions& opts = {}, const CameraModel* camera = nullptr) {
    if (camera) camera->validate();
    const DepthImage filled = raw.fully_valid() ? raw : inpaint(raw);
    const Preprocessed pre = preprocess(filled, opts.input_size);
    const GraspMap map = predictor.predict(depth_tensor(pre.image));
    const PixelAffine back = pre.transform.inverse();

    std::vector<Detection> out;
    for (const auto& gp : decode_grasp_map(map, opts.k, opts.min_separation)) {
        if (!(gp.omega > 0.0)) continue;
        Detection det;
        det.pixel = gp;
        det.rect = back.apply(rect_from_pixel(gp, opts.height_ratio));
        const auto d = sample_bilinear(filled, det.rect.center.x(), det.rect.center.y());
        det.depth = d.value_or(0.0);
        if (camera && det.depth > 0.0) {
            GraspPixel orig{det.rect.center, det.rect.angle, det.rect.width, gp.q};
            det.world = camera_to_robot(image_to_camera(orig, det.depth, *camera), *camera);
        }
        out.push_back(det);
    }
    return out;
}

struct EvalReport {
    SplitMode mode = SplitMode::ImageWise;
    int folds = 0;
    std::vector<double> fold_accuracy;  // percent, per validation fold
    std::size_t n_scored = 0;
    std::size_t n_success = 0;

    double accuracy() const { return n_scored ? 100.0 * static_cast<double>(n_success) / static_cast<double>(n_scored) : 0.0; }
};

// Scores the top-1 grasp of every record against its positive rectangles
// with the rectangle metric, grouped by the record's validation fold.
inline EvalReport evaluate_dataset(const Dataset& ds, const ggrcnn::Predictor& predictor, SplitMode mode, int folds,
                                   std::uint64_t seed, const DetectOptions& opts = {}) {
    const DatasetSplit split = make_splits(ds.records, mode, folds, seed);
    EvalReport rep;
    rep.mode = mode;
    rep.folds = folds;
    std::vector<std::size_t> scored(static_cast<std::size_t>(folds)), hits(static_cast<std::size_t>(folds));
    DetectOptions top1 = opts;
    top1.k = 1;
    for (const auto& rec : ds.records) {
        if (rec.pos_rects.empty()) continue;
        const auto fold = static_cast<std::size_t>(split.assignment.at(rec.id));
        const auto dets = detect_grasps(rec.depth, predictor, top1);
        const bool ok = !dets.empty() && grasp_success(dets.front().rect, rec.pos_rects);
        ++scored[fold];
        if (ok) ++hits[fold];
    }
    for (std::size_t f = 0; f < scored.size(); ++f) {
        rep.fold_accuracy.push_back(scored[f] ? 100.0 * static_cast<double>(hits[f]) / static_cast<double>(scored[f]) : 0.0);
        rep.n_scored += scored[f];
        rep.n_success += hits[f];
    }
    return rep;
}

}  // namespace openarms
