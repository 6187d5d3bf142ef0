// Command-line entry points: kinematics, benchmark, dataset tools, grasp
// detection and the teleoperation server.

#include "openarms/chain_config.hpp"
#include "openarms/solve_bench.hpp"
#include "openarms/teleop_http.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace openarms;
namespace fs = std::filesystem;

namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t n, const char* what) {
    std::istringstream in(text);
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof() || v.size() != n)
        throw std::invalid_argument(std::string(what) + " needs " + std::to_string(n) + " numbers, got '" + text + "'");
    return v;
}

KinematicChain load_chain(const std::string& path) { return path.empty() ? open_arms_chain() : load_chain_config(path); }

std::unique_ptr<ggrcnn::Predictor> make_predictor(const std::string& selector) {
    if (selector == "heuristic") return ggrcnn::heuristic_predictor();
    if (selector.starts_with("weights:"))
        return ggrcnn::build_network(ggrcnn::NetworkSpec::ggrcnn(), ggrcnn::load_weights(selector.substr(8)));
    throw std::invalid_argument("unknown predictor '" + selector + "' (heuristic | weights:<file>)");
}

DepthImage load_depth(const std::string& path) {
    return path.ends_with(".csv") ? read_csv_depth(path) : read_pgm_depth(path);
}

httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open Arms kinematics, grasp detection and teleoperation tools"};
    app.require_subcommand(1);
    std::string chain_path;
    app.add_option("--chain", chain_path, "chain description file (default: built-in 7-DoF profile)");

    // fk
    auto* fk = app.add_subcommand("fk", "forward kinematics for one joint vector");
    std::string joints_text;
    fk->add_option("--joints", joints_text, "joint angles in radians, space separated")->required();

    // ik
    auto* ik = app.add_subcommand("ik", "two-stage inverse kinematics for one target pose");
    std::string pose_text, seed_text;
    ik->add_option("--pose", pose_text, "\"x y z qw qx qy qz\"")->required();
    ik->add_option("--seed", seed_text, "seed joint angles (default zeros)");

    // bench
    auto* bench = app.add_subcommand("bench", "solve-rate benchmark over random reachable targets");
    std::size_t n_cases = 10000;
    std::uint64_t bench_seed = 42;
    std::string bench_out;
    unsigned threads = 0;
    bench->add_option("--cases", n_cases, "number of targets")->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_seed, "case generator seed");
    bench->add_option("--out", bench_out, "CSV report path");
    bench->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

    // eval
    auto* eval = app.add_subcommand("eval", "rectangle-metric evaluation over a dataset split");
    std::string dataset, split = "iw", predictor_sel = "heuristic";
    int folds = 5;
    std::uint64_t eval_seed = 0;
    eval->add_option("--dataset", dataset, "dataset root")->required();
    eval->add_option("--split", split, "iw | ow")->check(CLI::IsMember({"iw", "ow"}));
    eval->add_option("--folds", folds, "number of folds")->check(CLI::Range(2, 1000));
    eval->add_option("--predictor", predictor_sel, "heuristic | weights:<file>");
    eval->add_option("--seed", eval_seed, "split seed");

    // augment
    auto* aug = app.add_subcommand("augment", "write rotated/zoomed/shifted copies of every scene");
    std::string aug_in, aug_out;
    AugmentSpec aug_spec;
    aug_spec.count_per_record = 11;
    aug_spec.crop_jitter = 20.0;
    aug_spec.rotation_range = kPi;
    aug_spec.zoom_min = 0.8;
    aug_spec.zoom_max = 1.2;
    double rotation_deg = 180.0;
    aug->add_option("--dataset", aug_in, "dataset root")->required();
    aug->add_option("--out", aug_out, "output directory (records go to <out>/aug)")->required();
    aug->add_option("--per-record", aug_spec.count_per_record, "copies per scene")->check(CLI::NonNegativeNumber);
    aug->add_option("--seed", aug_spec.rng_seed, "augmentation seed");
    aug->add_option("--rotation-deg", rotation_deg, "rotation range, +- degrees");
    aug->add_option("--zoom-min", aug_spec.zoom_min);
    aug->add_option("--zoom-max", aug_spec.zoom_max);
    aug->add_option("--jitter", aug_spec.crop_jitter, "shift range, +- pixels");

    // grasp-detect
    auto* detect = app.add_subcommand("grasp-detect", "top-k grasp rectangles for one depth image");
    std::string weights_path, depth_path, rects_out;
    bool use_heuristic = false;
    int k = 5;
    auto* wopt = detect->add_option("--weights", weights_path, "GGRW weight file");
    auto* hopt = detect->add_flag("--heuristic", use_heuristic, "use the non-learned baseline predictor");
    wopt->excludes(hopt);
    detect->add_option("--depth", depth_path, "depth image (.pgm or .csv)")->required();
    detect->add_option("--out", rects_out, "rectangle file to write (Cornell vertex format)");
    detect->add_option("--k", k, "number of grasps")->check(CLI::PositiveNumber);

    // init-weights
    auto* init = app.add_subcommand("init-weights", "write a randomly initialized weight file for the default network");
    std::string init_out;
    std::uint64_t init_seed = 0;
    bool init_zero = false;
    init->add_option("--out", init_out, "output path")->required();
    init->add_option("--seed", init_seed);
    init->add_flag("--zero", init_zero, "all-zero weights");

    // chain
    auto* chain_cmd = app.add_subcommand("chain", "print the chain description in config-file form");
    std::string chain_out;
    chain_cmd->add_option("--out", chain_out, "write to a file instead of stdout");

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP teleoperation service");
    std::string host = "127.0.0.1", camera_text, extrinsic_text;
    int port = 8080;
    serve->add_option("--host", host);
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve->add_option("--camera", camera_text, "\"fx fy cx cy\" enables world-frame grasps");
    serve->add_option("--extrinsic", extrinsic_text, "camera->robot \"x y z qw qx qy qz\"");

    CLI11_PARSE(app, argc, argv);

    try {
        const KinematicChain chain = load_chain(chain_path);

        if (*fk) {
            const auto v = parse_numbers(joints_text, chain.size(), "--joints");
            const JointVector q = Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size()));
            std::cout << wire::pose(forward_kinematics(chain, q)).dump(2) << "\n";
        } else if (*ik) {
            const auto p = parse_numbers(pose_text, 7, "--pose");
            json req = {{"position", {p[0], p[1], p[2]}}, {"quaternion", {p[3], p[4], p[5], p[6]}}};
            if (!seed_text.empty()) req["seed"] = parse_numbers(seed_text, chain.size(), "--seed");
            std::cout << TeleopService(chain).ik(req).dump(2) << "\n";
        } else if (*bench) {
            const auto cases = generate_cases(chain, n_cases, bench_seed);
            const auto reports = run_benchmark(chain, cases, default_bench_configs(), threads);
            std::cout << bench_summary(reports);
            if (!bench_out.empty()) write_text_file(bench_out, bench_csv(reports));
        } else if (*eval) {
            const Dataset ds = load_dataset(dataset);
            const auto predictor = make_predictor(predictor_sel);
            const EvalReport rep = evaluate_dataset(ds, *predictor, parse_split_mode(split), folds, eval_seed);
            std::printf("split %s, %d folds, predictor %s\n", to_string(rep.mode), rep.folds, predictor->name().c_str());
            for (std::size_t f = 0; f < rep.fold_accuracy.size(); ++f)
                std::printf("  fold %zu: %.1f%%\n", f, rep.fold_accuracy[f]);
            std::printf("accuracy %.1f%% (%zu/%zu scenes)\n", rep.accuracy(), rep.n_success, rep.n_scored);
        } else if (*aug) {
            aug_spec.rotation_range = deg_to_rad(rotation_deg);
            const Dataset ds = load_dataset(aug_in);
            std::vector<SceneRecord> out;
            for (const auto& rec : ds.records)
                for (auto& a : augment(rec, aug_spec)) out.push_back(std::move(a));
            const std::string dir = (fs::path(aug_out) / "aug").string();
            write_dataset(dir, out, aug_spec.rng_seed);
            std::printf("%zu source scenes -> %zu augmented scenes in %s\n", ds.records.size(), out.size(), dir.c_str());
        } else if (*detect) {
            if (weights_path.empty() && !use_heuristic) throw std::invalid_argument("pass --weights <file> or --heuristic");
            const auto predictor = make_predictor(use_heuristic ? "heuristic" : "weights:" + weights_path);
            DetectOptions opts;
            opts.k = k;
            const auto dets = detect_grasps(load_depth(depth_path), *predictor, opts);
            std::vector<GraspRectangle> rects;
            for (const auto& d : dets) {
                rects.push_back(d.rect);
                std::printf("q=%.3f center=(%.1f, %.1f) angle=%.1f deg width=%.1f px\n", d.pixel.q, d.rect.center.x(),
                            d.rect.center.y(), rad_to_deg(d.rect.angle), d.rect.width);
            }
            if (!rects_out.empty()) write_text_file(rects_out, write_rect_file(rects));
        } else if (*init) {
            const auto spec = ggrcnn::NetworkSpec::ggrcnn();
            ggrcnn::save_weights(init_out, init_zero ? ggrcnn::zero_weights(spec) : ggrcnn::random_weights(spec, init_seed));
        } else if (*chain_cmd) {
            const std::string text = write_chain_config(chain);
            if (chain_out.empty())
                std::cout << text;
            else
                write_text_file(chain_out, text);
        } else if (*serve) {
            ServiceConfig cfg;
            if (!camera_text.empty()) {
                const auto c = parse_numbers(camera_text, 4, "--camera");
                CameraModel cam{c[0], c[1], c[2], c[3], {}};
                if (!extrinsic_text.empty()) {
                    const auto e = parse_numbers(extrinsic_text, 7, "--extrinsic");
                    cam.extrinsic = {{e[0], e[1], e[2]}, quat_wxyz(e[3], e[4], e[5], e[6]).normalized()};
                }
                cam.validate();
                cfg.camera = cam;
            }
            auto svc = std::make_shared<TeleopService>(chain, cfg);
            httplib::Server server;
            install_routes(server, svc);
            g_server = &server;
            std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
            std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
            const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
            if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
            std::printf("listening on http://%s:%d\n", host.c_str(), bound);
            std::fflush(stdout);
            server.listen_after_bind();
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
