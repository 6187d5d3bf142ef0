#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace openarms::ggrcnn {

// Dense row-major float32 tensor. Activations are (channels, height, width);
// conv weights are (out, in, kh, kw), transpose-conv weights (in, out, kh, kw).
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s, float fill = 0.0f) : shape(std::move(s)), data(count(shape), fill) {}
    Tensor(std::vector<std::size_t> s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != count(shape))
            throw std::invalid_argument("tensor data length " + std::to_string(data.size()) + " does not match shape " +
                                        shape_string(shape));
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
    }

    static std::string shape_string(const std::vector<std::size_t>& s) {
        std::ostringstream out;
        out << '(';
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
        out << ')';
        return out.str();
    }
    std::string shape_string() const { return shape_string(shape); }

    std::size_t rank() const { return shape.size(); }
    std::size_t size() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    float& at(std::size_t c, std::size_t h, std::size_t w) { return data[(c * shape[1] + h) * shape[2] + w]; }
    float at(std::size_t c, std::size_t h, std::size_t w) const { return data[(c * shape[1] + h) * shape[2] + w]; }

    bool all_finite() const {
        for (float v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline bool operator==(const Tensor& a, const Tensor& b) { return a.shape == b.shape && a.data == b.data; }

}  // namespace openarms::ggrcnn
