#pragma once

// Line-oriented chain description files. Grammar (see docs/formats.md):
//
//   # comment
//   [chain]                      optional, at most once, before any [joint]
//   base_translation = x y z
//   base_quaternion = w x y z
//   tool_translation = x y z
//   tool_quaternion = w x y z
//   [joint]                      one section per joint, in chain order
//   name = shoulder_pitch
//   axis = 0 1 0
//   offset_translation = 0 0 0
//   offset_quaternion = 1 0 0 0
//   limit_lo_deg = -90
//   limit_hi_deg = 90

#include "openarms/arm_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace openarms {

class ChainParseError : public std::runtime_error {
public:
    ChainParseError(int line, const std::string& what)
        : std::runtime_error("chain config line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_floats(const std::string& value, std::size_t n, int line) {
    std::istringstream in(value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ChainParseError(line, "not a number: '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(v)) throw ChainParseError(line, "not a number: '" + tok + "'");
        out.push_back(v);
    }
    if (out.size() != n)
        throw ChainParseError(line, "expected " + std::to_string(n) + " values, got " + std::to_string(out.size()));
    return out;
}

struct Section {
    std::string kind;
    int line = 0;
    std::map<std::string, std::pair<std::string, int>> fields;

    const std::pair<std::string, int>* find(const std::string& key) const {
        auto it = fields.find(key);
        return it == fields.end() ? nullptr : &it->second;
    }
    const std::pair<std::string, int>& require(const std::string& key) const {
        const auto* f = find(key);
        if (!f) throw ChainParseError(line, "[" + kind + "] section is missing field '" + key + "'");
        return *f;
    }
};

inline Eigen::Vector3d vec3(const std::pair<std::string, int>& f) {
    const auto v = parse_floats(f.first, 3, f.second);
    return {v[0], v[1], v[2]};
}

inline Eigen::Quaterniond quat(const std::pair<std::string, int>& f) {
    const auto v = parse_floats(f.first, 4, f.second);
    return quat_wxyz(v[0], v[1], v[2], v[3]);
}

}  // namespace detail

inline KinematicChain parse_chain_config(const std::string& text) {
    using detail::Section;
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ChainParseError(lineno, "unterminated section header");
            const std::string kind = detail::trim(line.substr(1, line.size() - 2));
            if (kind != "chain" && kind != "joint") throw ChainParseError(lineno, "unknown section [" + kind + "]");
            if (kind == "chain" && !sections.empty())
                throw ChainParseError(lineno, "[chain] must be the first section and appear once");
            sections.push_back({kind, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ChainParseError(lineno, "expected 'key = value'");
        if (sections.empty()) throw ChainParseError(lineno, "field outside of a section");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!sections.back().fields.emplace(key, std::make_pair(value, lineno)).second)
            throw ChainParseError(lineno, "duplicate field '" + key + "'");
    }

    Transform base, tool;
    std::vector<JointSpec> joints;
    for (const auto& s : sections) {
        if (s.kind == "chain") {
            static const char* known[] = {"base_translation", "base_quaternion", "tool_translation", "tool_quaternion"};
            for (const auto& [key, f] : s.fields)
                if (std::find(std::begin(known), std::end(known), key) == std::end(known))
                    throw ChainParseError(f.second, "unknown field '" + key + "'");
            if (const auto* f = s.find("base_translation")) base.translation = detail::vec3(*f);
            if (const auto* f = s.find("base_quaternion")) base.rotation = detail::quat(*f);
            if (const auto* f = s.find("tool_translation")) tool.translation = detail::vec3(*f);
            if (const auto* f = s.find("tool_quaternion")) tool.rotation = detail::quat(*f);
            continue;
        }
        static const char* required[] = {"name", "axis", "offset_translation", "offset_quaternion", "limit_lo_deg",
                                         "limit_hi_deg"};
        for (const auto& [key, f] : s.fields)
            if (std::find(std::begin(required), std::end(required), key) == std::end(required))
                throw ChainParseError(f.second, "unknown field '" + key + "'");
        JointSpec j;
        j.name = s.require("name").first;
        j.axis = detail::vec3(s.require("axis"));
        j.offset.translation = detail::vec3(s.require("offset_translation"));
        j.offset.rotation = detail::quat(s.require("offset_quaternion"));
        j.limit_lo = deg_to_rad(detail::parse_floats(s.require("limit_lo_deg").first, 1, s.require("limit_lo_deg").second)[0]);
        j.limit_hi = deg_to_rad(detail::parse_floats(s.require("limit_hi_deg").first, 1, s.require("limit_hi_deg").second)[0]);
        try {
            j.validate();
        } catch (const std::invalid_argument& e) {
            throw ChainParseError(s.line, e.what());
        }
        joints.push_back(std::move(j));
    }
    if (joints.empty()) throw ChainParseError(lineno, "no [joint] sections");
    try {
        return KinematicChain(base, std::move(joints), tool);
    } catch (const std::invalid_argument& e) {
        throw ChainParseError(lineno, e.what());
    }
}

inline KinematicChain load_chain_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open chain config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_chain_config(ss.str());
}

// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Degrees for a limit stored in radians: the shortest decimal that still
// converts back to exactly the same radian value.
inline std::string format_degrees(double rad) {
    const double deg = rad_to_deg(rad);
    for (int digits = 1; digits <= 17; ++digits) {
        char buf[40];
        const auto res = std::to_chars(buf, buf + sizeof buf, deg, std::chars_format::general, digits);
        double back = 0;
        std::from_chars(buf, res.ptr, back);
        if (deg_to_rad(back) == rad) return format_number(back);
    }
    return format_number(deg);
}

inline std::string write_chain_config(const KinematicChain& chain) {
    std::ostringstream out;
    const auto num = [](double v) { return format_number(v); };
    auto v3 = [&](const Eigen::Vector3d& v) { out << num(v.x()) << ' ' << num(v.y()) << ' ' << num(v.z()) << '\n'; };
    auto q4 = [&](const Eigen::Quaterniond& q) {
        out << num(q.w()) << ' ' << num(q.x()) << ' ' << num(q.y()) << ' ' << num(q.z()) << '\n';
    };
    out << "[chain]\nbase_translation = ";
    v3(chain.base().translation);
    out << "base_quaternion = ";
    q4(chain.base().rotation);
    out << "tool_translation = ";
    v3(chain.tool().translation);
    out << "tool_quaternion = ";
    q4(chain.tool().rotation);
    for (const auto& j : chain.joints()) {
        out << "\n[joint]\nname = " << j.name << "\naxis = ";
        v3(j.axis);
        out << "offset_translation = ";
        v3(j.offset.translation);
        out << "offset_quaternion = ";
        q4(j.offset.rotation);
        out << "limit_lo_deg = " << format_degrees(j.limit_lo) << "\nlimit_hi_deg = " << format_degrees(j.limit_hi) << '\n';
    }
    return out.str();
}

}  // namespace openarms
