#pragma once

// HTTP routes for TeleopService.
//
//   GET  /chain
//   POST /fk, /ik, /grasp             JSON body, JSON reply
//   POST /track/open                  {"seed": [7]?} -> {"session": id}
//   POST /track/<id>                  NDJSON targets -> NDJSON results, in order
//   POST /track/<id>/close
//
// Errors reply {"error": message} with the RequestError status (400 for
// malformed input, 409 for configuration errors, 410 for dead sessions).

#include "openarms/teleop_service.hpp"

#include <httplib.h>

#include <memory>
#include <string>

namespace openarms {

namespace detail {

template <class F>
void reply_json(httplib::Response& res, F&& f) {
    try {
        res.set_content(f().dump(), "application/json");
    } catch (const RequestError& e) {
        res.status = e.status();
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const json::exception& e) {
        res.status = 400;
        res.set_content(json{{"error", std::string("malformed request: ") + e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
}

inline json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json body = json::parse(req.body);
    if (!body.is_object()) throw RequestError(400, "request body must be a JSON object");
    return body;
}

}  // namespace detail

inline void install_routes(httplib::Server& server, std::shared_ptr<TeleopService> svc) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    server.Get("/chain", [svc](const httplib::Request&, httplib::Response& res) {
        detail::reply_json(res, [&] { return svc->chain_json(); });
    });
    server.Post("/fk", [svc](const httplib::Request& req, httplib::Response& res) {
        detail::reply_json(res, [&] { return svc->fk(detail::parse_body(req)); });
    });
    server.Post("/ik", [svc](const httplib::Request& req, httplib::Response& res) {
        detail::reply_json(res, [&] { return svc->ik(detail::parse_body(req)); });
    });
    server.Post("/grasp", [svc](const httplib::Request& req, httplib::Response& res) {
        detail::reply_json(res, [&] { return svc->grasp(detail::parse_body(req)); });
    });
    server.Post("/track/open", [svc](const httplib::Request& req, httplib::Response& res) {
        detail::reply_json(res, [&] { return json{{"session", svc->open_session(detail::parse_body(req))}}; });
    });
    server.Post(R"(/track/([A-Za-z0-9]+)/close)", [svc](const httplib::Request& req, httplib::Response& res) {
        detail::reply_json(res, [&] {
            if (!svc->close_session(req.matches[1])) throw RequestError(410, "no such session");
            return json{{"closed", true}};
        });
    });
    server.Post(R"(/track/([A-Za-z0-9]+))", [svc](const httplib::Request& req, httplib::Response& res) {
        try {
            res.set_content(svc->track_stream(req.matches[1], req.body), "application/x-ndjson");
        } catch (const RequestError& e) {
            res.status = e.status();
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    });
}

}  // namespace openarms
