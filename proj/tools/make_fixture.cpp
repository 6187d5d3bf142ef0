// Writes the small Cornell-layout dataset used by the tests: 20 synthetic
// block scenes, two per object, with 115 positive and 66 negative grasp
// rectangles (the full dataset's 885/5110/2909 scaled to 20 scenes) and one
// NaN vertex group that loaders must skip.

#include "openarms/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

using namespace openarms;

namespace {

constexpr int kScenes = 20;

int positives_for(int scene) { return scene < 15 ? 6 : 5; }
int negatives_for(int scene) { return scene < 6 ? 4 : 3; }

GraspRectangle sample_until_inside(Rng& rng, const SceneSpec& spec, auto make) {
    for (int tries = 0; tries < 1000; ++tries) {
        const GraspRectangle r = make(rng);
        if (rect_in_bounds(r, spec.height, spec.width)) return r;
    }
    throw std::runtime_error("could not place a rectangle inside the frame");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled Cornell-layout test fixture"};
    std::string out = "tests/fixtures/cornell_mini";
    std::uint64_t seed = 2019;
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    Rng rng(seed);
    const SceneSpec spec{320, 240, 0.70, 0.02, 0.0005};

    std::vector<Block> objects(kScenes / 2);
    for (auto& b : objects) {
        b.length = rng.uniform(50, 100);
        b.breadth = rng.uniform(16, 30);
        b.height = rng.uniform(0.03, 0.08);
    }

    std::vector<SceneRecord> records;
    for (int i = 0; i < kScenes; ++i) {
        Block b = objects[static_cast<std::size_t>(i / 2)];
        b.center = {rng.uniform(120, 200), rng.uniform(95, 145)};
        b.angle = rng.uniform(-kPi / 2, kPi / 2);

        SceneRecord rec;
        char id[16];
        std::snprintf(id, sizeof id, "pcd%04d", 100 + i);
        rec.id = id;
        std::snprintf(id, sizeof id, "obj%02d", i / 2);
        rec.object_id = id;
        rec.depth = render_scene(spec, {b}, rng.next());

        for (int k = 0; k < positives_for(i); ++k)
            rec.pos_rects.push_back(sample_until_inside(rng, spec, [&](Rng& r) {
                GraspRectangle g = b.across(r.uniform(-0.35, 0.35) * b.length, r.uniform(12, 20), r.uniform(6, 16));
                g.angle = wrap_half_pi(g.angle + r.uniform(-0.08, 0.08));
                return g;
            }));
        for (int k = 0; k < negatives_for(i); ++k)
            rec.neg_rects.push_back(sample_until_inside(rng, spec, [&](Rng& r) {
                if (k % 2 == 0) {
                    // Jaws closing along the long side: too wide to grasp.
                    return GraspRectangle{b.center, b.angle, b.length + r.uniform(8, 20), r.uniform(12, 20)};
                }
                // Across the block but beside it, closing on the table.
                const Eigen::Vector2d side(-std::sin(b.angle), std::cos(b.angle));
                const double sign = r.uniform() < 0.5 ? -1.0 : 1.0;
                GraspRectangle g = b.across(r.uniform(-0.3, 0.3) * b.length, r.uniform(12, 20), r.uniform(6, 16));
                g.center += sign * side * (b.breadth + r.uniform(15, 30));
                return g;
            }));
        records.push_back(std::move(rec));
    }

    std::filesystem::create_directories(out);
    write_dataset(out, records, seed);

    // Cornell files occasionally carry NaN vertices; keep one such group.
    const std::string first = (std::filesystem::path(out) / records.front().id).string() + "cpos.txt";
    write_text_file(first, read_text_file(first) + "NaN NaN\n150.0 120.0\n160.0 130.0\n140.0 130.0\n");

    std::size_t pos = 0, neg = 0;
    for (const auto& r : records) pos += r.pos_rects.size(), neg += r.neg_rects.size();
    std::printf("wrote %zu scenes, %zu positive and %zu negative rectangles to %s\n", records.size(), pos, neg,
                out.c_str());
    return 0;
}
