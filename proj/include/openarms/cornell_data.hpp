#pragma once

// Cornell-format grasp data: depth image I/O, rectangle files, depth
// inpainting, crop/scale preprocessing, augmentation and IW/OW splits.

#include "openarms/grasp_geometry.hpp"
#include "openarms/rng.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace openarms {

using DepthPlane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Depth in meters, row-major (row = v). Invalid pixels hold 0.
struct DepthImage {
    DepthPlane values;
    Mask valid;

    DepthImage() = default;
    DepthImage(DepthPlane v, Mask m) : values(std::move(v)), valid(std::move(m)) {
        if (values.rows() != valid.rows() || values.cols() != valid.cols())
            throw std::invalid_argument("depth values and mask differ in size");
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            if (valid.data()[i] && !std::isfinite(values.data()[i]))
                throw std::invalid_argument("depth value marked valid is not finite");
            if (!valid.data()[i]) values.data()[i] = 0.0;
        }
    }

    // Zero and non-finite entries are invalid.
    static DepthImage from_values(DepthPlane v) {
        Mask m = v.isFinite() && (v != 0.0);
        return DepthImage(std::move(v), std::move(m));
    }

    Eigen::Index width() const { return values.cols(); }
    Eigen::Index height() const { return values.rows(); }
    bool fully_valid() const { return valid.all(); }
};

// --- depth file I/O -----------------------------------------------------------

inline constexpr double kDefaultDepthScale = 0.001;  // meters per PGM unit

// Binary PGM (P5). A "# depth_scale_m <meters per unit>" comment sets the
// unit; it defaults to millimeters. 0 marks missing depth.
inline DepthImage read_pgm_depth(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open depth image '" + path + "'");
    double scale = kDefaultDepthScale;
    auto token = [&]() {
        std::string tok;
        while (f) {
            int c = f.peek();
            if (c == '#') {
                std::string comment;
                std::getline(f, comment);
                std::istringstream cs(comment.substr(1));
                std::string key;
                double v = 0;
                if (cs >> key >> v && key == "depth_scale_m") scale = v;
            } else if (std::isspace(c)) {
                f.get();
            } else {
                break;
            }
        }
        f >> tok;
        return tok;
    };
    if (token() != "P5") throw std::runtime_error("'" + path + "' is not a binary PGM (P5)");
    const long w = std::stol(token()), h = std::stol(token()), maxval = std::stol(token());
    f.get();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw std::runtime_error("bad PGM header in '" + path + "'");
    const bool wide = maxval > 255;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w * h) * (wide ? 2 : 1));
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (f.gcount() != static_cast<std::streamsize>(raw.size())) throw std::runtime_error("truncated PGM '" + path + "'");
    DepthPlane v(h, w);
    for (long i = 0; i < w * h; ++i) {
        const unsigned units = wide ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
        v.data()[i] = units * scale;
    }
    return DepthImage::from_values(std::move(v));
}

inline void write_pgm_depth(const std::string& path, const DepthImage& d, double scale = kDefaultDepthScale) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write depth image '" + path + "'");
    f << "P5\n# depth_scale_m " << scale << "\n" << d.width() << ' ' << d.height() << "\n65535\n";
    std::vector<unsigned char> raw(static_cast<std::size_t>(d.values.size()) * 2);
    for (Eigen::Index i = 0; i < d.values.size(); ++i) {
        long units = 0;
        if (d.valid.data()[i]) units = std::clamp<long>(std::lround(d.values.data()[i] / scale), 1, 65535);
        raw[2 * i] = static_cast<unsigned char>(units >> 8);
        raw[2 * i + 1] = static_cast<unsigned char>(units & 0xff);
    }
    f.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

// Fallback format: one image row per line, comma-separated meters; 0 or NaN is missing.
inline DepthImage read_csv_depth(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open depth csv '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("bad depth value '" + cell + "' in '" + path + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged depth csv '" + path + "'");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty depth csv '" + path + "'");
    DepthPlane v(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return DepthImage::from_values(std::move(v));
}

// --- rectangle files ------------------------------------------------------------

struct RectFile {
    std::vector<GraspRectangle> rects;
    // Four-line groups dropped because they contained NaN/inf.
    std::size_t skipped_groups = 0;
};

// Four "x y" lines per rectangle (x = column, y = row), vertices in order.
inline RectFile parse_rect_file(const std::string& text) {
    RectFile out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<Eigen::Vector2d> group;
    bool group_bad = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string xs, ys, extra;
        if (!(ls >> xs >> ys) || (ls >> extra))
            throw std::runtime_error("rect file line " + std::to_string(lineno) + ": expected 'x y'");
        double xy[2];
        const std::string* toks[2] = {&xs, &ys};
        for (int k = 0; k < 2; ++k) {
            std::size_t used = 0;
            try {
                xy[k] = std::stod(*toks[k], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != toks[k]->size())
                throw std::runtime_error("rect file line " + std::to_string(lineno) + ": not a number '" + *toks[k] +
                                         "'");
        }
        if (!std::isfinite(xy[0]) || !std::isfinite(xy[1])) group_bad = true;
        group.emplace_back(xy[0], xy[1]);
        if (group.size() == 4) {
            if (group_bad) {
                ++out.skipped_groups;
            } else {
                out.rects.push_back(rect_from_vertices({group[0], group[1], group[2], group[3]}));
            }
            group.clear();
            group_bad = false;
        }
    }
    if (!group.empty()) throw std::runtime_error("rect file ends with a truncated group of " +
                                                 std::to_string(group.size()) + " vertices");
    return out;
}

inline std::string write_rect_file(const std::vector<GraspRectangle>& rects) {
    std::ostringstream out;
    out << std::setprecision(10);
    for (const auto& r : rects)
        for (const auto& c : r.corners()) out << c.x() << ' ' << c.y() << '\n';
    return out.str();
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

// --- inpainting -----------------------------------------------------------------

// Repeated passes fill every invalid pixel that has valid 4-neighbors with
// their mean, until no invalid pixel remains. Valid inputs are untouched.
inline DepthImage inpaint(const DepthImage& d) {
    if (!d.valid.any()) throw std::invalid_argument("inpaint: image has no valid pixels");
    DepthPlane v = d.values;
    Mask m = d.valid;
    const Eigen::Index H = v.rows(), W = v.cols();
    std::vector<std::pair<Eigen::Index, Eigen::Index>> todo;
    for (Eigen::Index r = 0; r < H; ++r)
        for (Eigen::Index c = 0; c < W; ++c)
            if (!m(r, c)) todo.emplace_back(r, c);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> filled, rest;
    std::vector<double> vals;
    while (!todo.empty()) {
        filled.clear();
        rest.clear();
        vals.clear();
        for (auto [r, c] : todo) {
            double sum = 0.0;
            int n = 0;
            const Eigen::Index nr[4] = {r - 1, r + 1, r, r};
            const Eigen::Index nc[4] = {c, c, c - 1, c + 1};
            for (int k = 0; k < 4; ++k) {
                if (nr[k] < 0 || nr[k] >= H || nc[k] < 0 || nc[k] >= W || !m(nr[k], nc[k])) continue;
                sum += v(nr[k], nc[k]);
                ++n;
            }
            if (n > 0) {
                filled.emplace_back(r, c);
                vals.push_back(sum / n);
            } else {
                rest.emplace_back(r, c);
            }
        }
        for (std::size_t i = 0; i < filled.size(); ++i) {
            v(filled[i].first, filled[i].second) = vals[i];
            m(filled[i].first, filled[i].second) = true;
        }
        todo.swap(rest);
    }
    return DepthImage(std::move(v), std::move(m));
}

// --- resampling ---------------------------------------------------------------------

// Bilinear sample with border replication. Only valid taps contribute;
// returns nullopt when none of them is valid.
inline std::optional<double> sample_bilinear(const DepthImage& d, double u, double v) {
    const Eigen::Index W = d.width(), H = d.height();
    u = std::clamp(u, 0.0, static_cast<double>(W - 1));
    v = std::clamp(v, 0.0, static_cast<double>(H - 1));
    const auto u0 = static_cast<Eigen::Index>(std::floor(u)), v0 = static_cast<Eigen::Index>(std::floor(v));
    const Eigen::Index u1 = std::min(u0 + 1, W - 1), v1 = std::min(v0 + 1, H - 1);
    const double fu = u - static_cast<double>(u0), fv = v - static_cast<double>(v0);
    const double wts[4] = {(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv};
    const Eigen::Index us[4] = {u0, u1, u0, u1}, vs[4] = {v0, v0, v1, v1};
    double sum = 0.0, wsum = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (wts[k] == 0.0 || !d.valid(vs[k], us[k])) continue;
        sum += wts[k] * d.values(vs[k], us[k]);
        wsum += wts[k];
    }
    if (wsum == 0.0) return std::nullopt;
    return sum / wsum;
}

// 2D affine map p' = A p + t between pixel frames.
struct PixelAffine {
    Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
    Eigen::Vector2d t = Eigen::Vector2d::Zero();

    Eigen::Vector2d apply(const Eigen::Vector2d& p) const { return A * p + t; }
    PixelAffine inverse() const {
        const Eigen::Matrix2d Ai = A.inverse();
        return {Ai, -(Ai * t)};
    }
    // Exact for rectangles since the map is a similarity (rotation + uniform scale).
    GraspRectangle apply(const GraspRectangle& r) const {
        const auto c = r.corners();
        return rect_from_vertices({apply(c[0]), apply(c[1]), apply(c[2]), apply(c[3])});
    }
};

// out(p') = in(inverse(p')) over an out_w x out_h grid.
inline DepthImage warp(const DepthImage& in, const PixelAffine& forward, Eigen::Index out_w, Eigen::Index out_h) {
    const PixelAffine inv = forward.inverse();
    DepthPlane v = DepthPlane::Zero(out_h, out_w);
    Mask m = Mask::Constant(out_h, out_w, false);
    for (Eigen::Index r = 0; r < out_h; ++r)
        for (Eigen::Index c = 0; c < out_w; ++c) {
            const Eigen::Vector2d src = inv.apply({static_cast<double>(c), static_cast<double>(r)});
            if (auto s = sample_bilinear(in, src.x(), src.y())) {
                v(r, c) = *s;
                m(r, c) = true;
            }
        }
    return DepthImage(std::move(v), std::move(m));
}

// --- preprocessing --------------------------------------------------------------------

inline constexpr int kNetworkInputSize = 400;

struct Preprocessed {
    DepthImage image;
    // Original pixel frame -> processed pixel frame.
    PixelAffine transform;
    double mean_depth = 0.0;
};

// Center-crop to the largest square, resample to out_size, subtract the mean.
inline Preprocessed preprocess(const DepthImage& d, int out_size = kNetworkInputSize) {
    if (out_size < 1) throw std::invalid_argument("preprocess: out_size must be >= 1");
    if (!d.fully_valid()) throw std::invalid_argument("preprocess: input must be inpainted (fully valid)");
    const Eigen::Index side = std::min(d.width(), d.height());
    const double u0 = static_cast<double>((d.width() - side) / 2), v0 = static_cast<double>((d.height() - side) / 2);
    const double s = static_cast<double>(out_size) / static_cast<double>(side);
    PixelAffine tf;
    tf.A = Eigen::Matrix2d::Identity() * s;
    tf.t = Eigen::Vector2d(-u0 * s, -v0 * s);
    Preprocessed out;
    out.transform = tf;
    out.image = (side == out_size && u0 == 0.0 && v0 == 0.0) ? d : warp(d, tf, out_size, out_size);
    out.mean_depth = out.image.values.mean();
    out.image.values -= out.mean_depth;
    return out;
}

// --- records, augmentation ---------------------------------------------------------------

struct AugmentParams {
    double rotation = 0.0;  // radians, about the image center
    double zoom = 1.0;
    Eigen::Vector2d shift = Eigen::Vector2d::Zero();  // pixels
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    std::string source_id;

    PixelAffine transform() const {
        PixelAffine a;
        a.A = zoom * Eigen::Rotation2Dd(rotation).toRotationMatrix();
        a.t = center - a.A * center + shift;
        return a;
    }
};

struct SceneRecord {
    std::string id;
    std::string object_id;
    DepthImage depth;
    std::vector<GraspRectangle> pos_rects;
    std::vector<GraspRectangle> neg_rects;
    std::optional<AugmentParams> augmentation;
};

struct AugmentSpec {
    double crop_jitter = 0.0;     // pixels, uniform in [-j, j] per axis
    double rotation_range = 0.0;  // radians, uniform in [-r, r]
    double zoom_min = 1.0;
    double zoom_max = 1.0;
    int count_per_record = 1;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(zoom_min > 0.0) || !(zoom_max >= zoom_min)) throw std::invalid_argument("AugmentSpec: bad zoom range");
        if (crop_jitter < 0.0 || rotation_range < 0.0 || count_per_record < 0)
            throw std::invalid_argument("AugmentSpec: negative range or count");
    }
};

inline std::vector<GraspRectangle> transform_rects(const std::vector<GraspRectangle>& rects, const PixelAffine& a,
                                                   Eigen::Index h, Eigen::Index w) {
    std::vector<GraspRectangle> out;
    for (const auto& r : rects) {
        const auto t = a.apply(r);
        if (rect_in_bounds(t, h, w)) out.push_back(t);
    }
    return out;
}

inline SceneRecord apply_augmentation(const SceneRecord& rec, const AugmentParams& p, const std::string& new_id) {
    const PixelAffine a = p.transform();
    SceneRecord out;
    out.id = new_id;
    out.object_id = rec.object_id;
    out.depth = warp(rec.depth, a, rec.depth.width(), rec.depth.height());
    out.pos_rects = transform_rects(rec.pos_rects, a, out.depth.height(), out.depth.width());
    out.neg_rects = transform_rects(rec.neg_rects, a, out.depth.height(), out.depth.width());
    out.augmentation = p;
    return out;
}

// Randomness comes from a stream derived from (rng_seed, record id), so the
// output for a record does not depend on which other records are processed.
inline std::vector<SceneRecord> augment(const SceneRecord& rec, const AugmentSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.rng_seed, rec.id));
    std::vector<SceneRecord> out;
    out.reserve(static_cast<std::size_t>(spec.count_per_record));
    for (int i = 0; i < spec.count_per_record; ++i) {
        AugmentParams p;
        p.source_id = rec.id;
        p.center = {(static_cast<double>(rec.depth.width()) - 1.0) / 2.0,
                    (static_cast<double>(rec.depth.height()) - 1.0) / 2.0};
        p.rotation = rng.uniform(-spec.rotation_range, spec.rotation_range);
        p.zoom = rng.uniform(spec.zoom_min, spec.zoom_max);
        p.shift.x() = rng.uniform(-spec.crop_jitter, spec.crop_jitter);
        p.shift.y() = rng.uniform(-spec.crop_jitter, spec.crop_jitter);
        std::ostringstream id;
        id << rec.id << "_aug" << std::setw(3) << std::setfill('0') << i;
        out.push_back(apply_augmentation(rec, p, id.str()));
    }
    return out;
}

// --- dataset directories ------------------------------------------------------------------

struct Dataset {
    std::vector<SceneRecord> records;
    std::size_t skipped_groups = 0;

    std::size_t positive_count() const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.pos_rects.size();
        return n;
    }
    std::size_t negative_count() const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.neg_rects.size();
        return n;
    }
};

// Reads <root>/<id>cpos.txt, <id>cneg.txt, <id>d.pgm (or <id>d.csv) for
// every scene id, plus the optional objects.csv (scene_id,object_id).
inline Dataset load_dataset(const std::string& root, bool load_depth = true) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw std::runtime_error("dataset root '" + root + "' is not a directory");
    std::set<std::string> ids;
    for (const auto& entry : fs::directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = "cpos.txt";
        if (name.size() > suffix.size() && name.ends_with(suffix)) ids.insert(name.substr(0, name.size() - suffix.size()));
    }
    std::map<std::string, std::string> objects;
    const fs::path manifest = fs::path(root) / "objects.csv";
    if (fs::exists(manifest)) {
        std::istringstream in(read_text_file(manifest.string()));
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw std::runtime_error("objects.csv: expected scene_id,object_id");
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            if (first && a == "scene_id") {
                first = false;
                continue;
            }
            first = false;
            objects[a] = b;
        }
    }
    Dataset ds;
    for (const auto& id : ids) {
        SceneRecord rec;
        rec.id = id;
        auto obj = objects.find(id);
        rec.object_id = obj == objects.end() ? id : obj->second;
        const fs::path base = fs::path(root) / id;
        const auto pos = parse_rect_file(read_text_file(base.string() + "cpos.txt"));
        rec.pos_rects = pos.rects;
        ds.skipped_groups += pos.skipped_groups;
        if (fs::exists(base.string() + "cneg.txt")) {
            const auto neg = parse_rect_file(read_text_file(base.string() + "cneg.txt"));
            rec.neg_rects = neg.rects;
            ds.skipped_groups += neg.skipped_groups;
        }
        if (load_depth) {
            if (fs::exists(base.string() + "d.pgm"))
                rec.depth = read_pgm_depth(base.string() + "d.pgm");
            else if (fs::exists(base.string() + "d.csv"))
                rec.depth = read_csv_depth(base.string() + "d.csv");
            else
                throw std::runtime_error("scene '" + id + "' has no depth image");
        }
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

inline std::string augmentation_sidecar(const AugmentParams& p, std::uint64_t seed) {
    std::ostringstream out;
    out << std::setprecision(17) << "{\n"
        << "  \"source_id\": \"" << p.source_id << "\",\n"
        << "  \"rotation_rad\": " << p.rotation << ",\n"
        << "  \"zoom\": " << p.zoom << ",\n"
        << "  \"shift_u\": " << p.shift.x() << ",\n"
        << "  \"shift_v\": " << p.shift.y() << ",\n"
        << "  \"center_u\": " << p.center.x() << ",\n"
        << "  \"center_v\": " << p.center.y() << ",\n"
        << "  \"rng_seed\": " << seed << "\n}\n";
    return out.str();
}

// Writes records in the dataset layout under `dir`, with objects.csv and,
// for augmented records, a <id>transform.json sidecar.
inline void write_dataset(const std::string& dir, const std::vector<SceneRecord>& records, std::uint64_t seed = 0) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ostringstream objects;
    objects << "scene_id,object_id\n";
    for (const auto& r : records) {
        const std::string base = (fs::path(dir) / r.id).string();
        write_pgm_depth(base + "d.pgm", r.depth);
        write_text_file(base + "cpos.txt", write_rect_file(r.pos_rects));
        write_text_file(base + "cneg.txt", write_rect_file(r.neg_rects));
        if (r.augmentation) write_text_file(base + "transform.json", augmentation_sidecar(*r.augmentation, seed));
        objects << r.id << ',' << r.object_id << '\n';
    }
    write_text_file((fs::path(dir) / "objects.csv").string(), objects.str());
}

// --- splits -----------------------------------------------------------------------------------

enum class SplitMode { ImageWise, ObjectWise };

inline const char* to_string(SplitMode m) { return m == SplitMode::ImageWise ? "iw" : "ow"; }

inline SplitMode parse_split_mode(const std::string& s) {
    if (s == "iw" || s == "IW") return SplitMode::ImageWise;
    if (s == "ow" || s == "OW") return SplitMode::ObjectWise;
    throw std::invalid_argument("unknown split mode '" + s + "' (expected iw or ow)");
}

struct DatasetSplit {
    SplitMode mode = SplitMode::ImageWise;
    int folds = 0;
    std::map<std::string, int> assignment;

    std::vector<std::string> fold_members(int fold) const {
        std::vector<std::string> ids;
        for (const auto& [id, f] : assignment)
            if (f == fold) ids.push_back(id);
        return ids;
    }
};

inline DatasetSplit make_splits(const std::vector<SceneRecord>& records, SplitMode mode, int folds,
                                std::uint64_t rng_seed) {
    if (folds < 2) throw std::invalid_argument("make_splits: folds must be >= 2");
    DatasetSplit split;
    split.mode = mode;
    split.folds = folds;
    Rng rng(rng_seed);
    std::set<std::string> seen;
    for (const auto& r : records)
        if (!seen.insert(r.id).second) throw std::invalid_argument("make_splits: duplicate record id '" + r.id + "'");

    if (mode == SplitMode::ImageWise) {
        std::vector<std::size_t> order(records.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order.begin(), order.end());
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            split.assignment[records[order[pos]].id] = static_cast<int>(pos % static_cast<std::size_t>(folds));
        return split;
    }
    std::set<std::string> object_set;
    for (const auto& r : records) object_set.insert(r.object_id);
    std::vector<std::string> objects(object_set.begin(), object_set.end());
    if (objects.size() < static_cast<std::size_t>(folds))
        throw std::invalid_argument("make_splits: " + std::to_string(objects.size()) + " objects cannot fill " +
                                    std::to_string(folds) + " object-wise folds");
    rng.shuffle(objects.begin(), objects.end());
    std::map<std::string, int> object_fold;
    for (std::size_t pos = 0; pos < objects.size(); ++pos)
        object_fold[objects[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    for (const auto& r : records) split.assignment[r.id] = object_fold.at(r.object_id);
    return split;
}

}  // namespace openarms
