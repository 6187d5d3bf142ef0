#pragma once

// Request handlers behind the teleoperation endpoints. Messages are JSON;
// quaternions are [w, x, y, z], positions meters, joints radians.

#include "openarms/arm_model.hpp"
#include "openarms/grasp_pipeline.hpp"
#include "openarms/ik_engine.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace openarms {

using json = nlohmann::json;

// A request the caller got wrong; `status` is the HTTP status to report.
class RequestError : public std::runtime_error {
public:
    RequestError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

struct ServiceConfig {
    IkConfig loose = IkConfig::loose();
    IkConfig tight = IkConfig::tight();
    std::chrono::milliseconds session_idle_timeout{60'000};
    std::optional<CameraModel> camera;
    DetectOptions detect;
    std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

namespace wire {

inline json vec(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}
inline json vec3(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
inline json quat(const Eigen::Quaterniond& q) { return {q.w(), q.x(), q.y(), q.z()}; }
inline json transform(const Transform& t) { return {{"translation", vec3(t.translation)}, {"quaternion", quat(t.rotation)}}; }

inline json pose(const Pose& p) { return {{"position", vec3(p.position)}, {"quaternion", quat(p.orientation)}}; }

inline std::vector<double> numbers(const json& body, const char* field, std::optional<std::size_t> arity) {
    if (!body.contains(field)) throw RequestError(400, std::string("missing field '") + field + "'");
    const json& a = body.at(field);
    if (!a.is_array()) throw RequestError(400, std::string("field '") + field + "' must be an array");
    if (arity && a.size() != *arity)
        throw RequestError(400, std::string("field '") + field + "' needs " + std::to_string(*arity) + " values, got " +
                                    std::to_string(a.size()));
    std::vector<double> out;
    for (const auto& x : a) {
        if (!x.is_number()) throw RequestError(400, std::string("field '") + field + "' must hold numbers");
        const double v = x.get<double>();
        if (!std::isfinite(v)) throw RequestError(400, std::string("field '") + field + "' has a non-finite value");
        out.push_back(v);
    }
    return out;
}

inline JointVector joints(const json& body, const char* field, std::size_t n) {
    const auto v = numbers(body, field, n);
    return Eigen::Map<const JointVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Pose target_pose(const json& body) {
    const auto p = numbers(body, "position", 3);
    const auto q = numbers(body, "quaternion", 4);
    Eigen::Quaterniond quat = quat_wxyz(q[0], q[1], q[2], q[3]);
    if (quat.norm() < 1e-6) throw RequestError(400, "quaternion cannot be normalized (near-zero norm)");
    return {Eigen::Vector3d(p[0], p[1], p[2]), quat.normalized()};
}

inline json ik_result(const IkResult& r) {
    return {{"joints", vec(r.joints)},
            {"status", to_string(r.status)},
            {"stage", r.stage},
            {"pos_err", r.pos_err},
            {"ori_err", r.ori_err},
            {"iterations", r.iterations},
            {"elapsed_s", r.elapsed},
            {"achieved", pose(r.achieved)}};
}

inline json rect(const GraspRectangle& r) {
    json corners = json::array();
    for (const auto& c : r.corners()) corners.push_back({c.x(), c.y()});
    return {{"center", {r.center.x(), r.center.y()}},
            {"angle", r.angle},
            {"width", r.width},
            {"height", r.height},
            {"corners", corners}};
}

}  // namespace wire

class TeleopService {
public:
    TeleopService(KinematicChain chain, ServiceConfig cfg = {}) : chain_(std::move(chain)), cfg_(std::move(cfg)) {
        check_stage_order(cfg_.loose, cfg_.tight);
    }

    const KinematicChain& chain() const { return chain_; }
    const ServiceConfig& config() const { return cfg_; }

    json chain_json() const {
        json joints = json::array();
        for (const auto& j : chain_.joints())
            joints.push_back({{"name", j.name},
                              {"axis", wire::vec3(j.axis)},
                              {"offset", wire::transform(j.offset)},
                              {"limit_lo", j.limit_lo},
                              {"limit_hi", j.limit_hi}});
        return {{"base", wire::transform(chain_.base())}, {"tool", wire::transform(chain_.tool())}, {"joints", joints}};
    }

    json fk(const json& req) const {
        const JointVector q = wire::joints(req, "joints", chain_.size());
        return wire::pose(forward_kinematics(chain_, q));
    }

    json ik(const json& req) const {
        const Pose target = wire::target_pose(req);
        const JointVector seed = req.contains("seed") ? wire::joints(req, "seed", chain_.size()) : chain_.zeros();
        return wire::ik_result(solve_two_stage(chain_, target, seed, cfg_.loose, cfg_.tight));
    }

    // Depth comes from "depth_path" (PGM or CSV file) or inline "depth":
    // {"width", "height", "values"} in meters, 0 for missing.
    json grasp(const json& req) const {
        const std::string frame = req.value("frame", std::string("image"));
        if (frame != "image" && frame != "world") throw RequestError(400, "frame must be 'image' or 'world'");
        if (frame == "world" && !cfg_.camera)
            throw RequestError(409, "world-frame grasps requested but no camera model is configured");
        const DepthImage depth = depth_from_request(req);
        const auto predictor = predictor_for(req.value("predictor", std::string("heuristic")));
        DetectOptions opts = cfg_.detect;
        opts.k = req.value("k", opts.k);
        if (opts.k < 1) throw RequestError(400, "k must be >= 1");
        const CameraModel* cam = frame == "world" ? &*cfg_.camera : nullptr;
        const auto dets = detect_grasps(depth, *predictor, opts, cam);
        json grasps = json::array();
        for (const auto& d : dets) {
            json g = wire::rect(d.rect);
            g["quality"] = d.pixel.q;
            g["depth"] = d.depth;
            if (d.world)
                g["world"] = {{"position", wire::vec3(d.world->p)}, {"angle", d.world->phi}, {"width", d.world->w}};
            grasps.push_back(std::move(g));
        }
        return {{"grasps", grasps}, {"predictor", predictor->name()}};
    }

    // --- tracking sessions ---

    std::string open_session(const json& req = json::object()) {
        const JointVector seed = req.contains("seed") ? wire::joints(req, "seed", chain_.size()) : chain_.zeros();
        auto s = std::make_shared<Session>();
        s->seed = clamp_to_limits(chain_, seed);
        s->last_used = cfg_.clock();
        std::lock_guard lock(sessions_mutex_);
        expire_locked();
        const std::string id = "s" + std::to_string(++session_counter_);
        sessions_[id] = s;
        return id;
    }

    bool close_session(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        return sessions_.erase(id) > 0;
    }

    std::size_t session_count() {
        std::lock_guard lock(sessions_mutex_);
        expire_locked();
        return sessions_.size();
    }

    // One target in, one result out; the result seeds the next message.
    // Errors in the message come back as an error frame and leave the
    // session seed unchanged.
    json track_message(const std::string& id, const json& msg) {
        auto s = find_session(id);
        std::lock_guard lock(s->mutex);
        s->last_used = cfg_.clock();
        json reply;
        reply["seq"] = msg.is_object() && msg.contains("seq") ? msg["seq"] : json(nullptr);
        try {
            if (!msg.is_object()) throw RequestError(400, "message must be a JSON object");
            const Pose target = wire::target_pose(msg);
            const IkResult r = solve_two_stage(chain_, target, s->seed, cfg_.loose, cfg_.tight);
            s->seed = r.joints;
            const json result = wire::ik_result(r);
            for (const auto& [k, v] : result.items()) reply[k] = v;
        } catch (const RequestError& e) {
            reply["error"] = e.what();
        }
        return reply;
    }

    // Newline-delimited messages in, newline-delimited replies out, in order.
    std::string track_stream(const std::string& id, const std::string& body) {
        find_session(id);
        std::ostringstream out;
        std::istringstream in(body);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json msg;
            try {
                msg = json::parse(line);
            } catch (const json::exception& e) {
                out << json{{"seq", nullptr}, {"error", std::string("malformed message: ") + e.what()}}.dump() << '\n';
                continue;
            }
            out << track_message(id, msg).dump() << '\n';
        }
        return out.str();
    }

private:
    struct Session {
        std::mutex mutex;
        JointVector seed;
        std::chrono::steady_clock::time_point last_used;
    };

    std::shared_ptr<Session> find_session(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        expire_locked();
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw RequestError(410, "tracking session '" + id + "' is closed or expired");
        return it->second;
    }

    void expire_locked() {
        const auto now = cfg_.clock();
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            // A session busy with a message is in use, not idle.
            bool idle = false;
            if (std::unique_lock s_lock(it->second->mutex, std::try_to_lock); s_lock.owns_lock())
                idle = now - it->second->last_used > cfg_.session_idle_timeout;
            it = idle ? sessions_.erase(it) : std::next(it);
        }
    }

    DepthImage depth_from_request(const json& req) const {
        try {
            if (req.contains("depth_path")) {
                const std::string path = req.at("depth_path").get<std::string>();
                return path.ends_with(".csv") ? read_csv_depth(path) : read_pgm_depth(path);
            }
            if (req.contains("depth")) {
                const json& d = req.at("depth");
                const auto w = d.at("width").get<Eigen::Index>(), h = d.at("height").get<Eigen::Index>();
                const auto& vals = d.at("values");
                if (w < 1 || h < 1 || vals.size() != static_cast<std::size_t>(w * h))
                    throw RequestError(400, "depth.values must hold width*height numbers");
                DepthPlane v(h, w);
                for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = vals[static_cast<std::size_t>(i)].get<double>();
                DepthImage img = DepthImage::from_values(std::move(v));
                if (!img.valid.any()) throw RequestError(400, "depth image has no valid pixels");
                return img;
            }
        } catch (const json::exception& e) {
            throw RequestError(400, std::string("bad depth payload: ") + e.what());
        } catch (const std::runtime_error& e) {
            if (dynamic_cast<const RequestError*>(&e)) throw;
            throw RequestError(400, e.what());
        }
        throw RequestError(400, "request needs 'depth_path' or 'depth'");
    }

    std::shared_ptr<const ggrcnn::Predictor> predictor_for(const std::string& selector) const {
        std::lock_guard lock(predictor_mutex_);
        if (auto it = predictors_.find(selector); it != predictors_.end()) return it->second;
        std::shared_ptr<const ggrcnn::Predictor> p;
        if (selector == "heuristic") {
            p = ggrcnn::heuristic_predictor();
        } else if (selector.starts_with("weights:")) {
            try {
                p = ggrcnn::build_network(ggrcnn::NetworkSpec::ggrcnn(), ggrcnn::load_weights(selector.substr(8)));
            } catch (const std::exception& e) {
                throw RequestError(400, std::string("cannot load predictor: ") + e.what());
            }
        } else {
            throw RequestError(400, "unknown predictor '" + selector + "' (heuristic | weights:<file>)");
        }
        predictors_[selector] = p;
        return p;
    }

    KinematicChain chain_;
    ServiceConfig cfg_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t session_counter_ = 0;
    mutable std::mutex predictor_mutex_;
    mutable std::map<std::string, std::shared_ptr<const ggrcnn::Predictor>> predictors_;
};

}  // namespace openarms
