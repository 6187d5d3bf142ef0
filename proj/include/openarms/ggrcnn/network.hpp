#pragma once

// Network description, eager shape validation against a weight bundle and
// the forward pass producing a grasp map.

#include "openarms/ggrcnn/layers.hpp"
#include "openarms/ggrcnn/tensor.hpp"
#include "openarms/ggrcnn/weights.hpp"
#include "openarms/grasp_geometry.hpp"
#include "openarms/rng.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace openarms::ggrcnn {

struct Conv {
    std::string name;
    std::size_t filters, kernel, stride, padding;
};
struct ResidualBlock {
    std::string name;
    std::size_t filters;
    std::size_t kernel = 3;
};
struct TransposeConv {
    std::string name;
    std::size_t filters, kernel, stride, padding;
};
struct Relu {
    std::string name;
};
// Parallel single-channel convolutions reading the same feature map,
// in order quality, cos 2phi, sin 2phi, width.
struct OutputHeads {
    std::array<std::string, 4> names{"head_q", "head_cos", "head_sin", "head_width"};
    std::size_t kernel = 1;
};

using Layer = std::variant<Conv, ResidualBlock, TransposeConv, Relu, OutputHeads>;

struct NetworkSpec {
    std::array<std::size_t, 3> input{1, 400, 400};
    std::vector<Layer> layers;

    static NetworkSpec ggrcnn() {
        NetworkSpec s;
        s.layers = {
            Conv{"enc1", 16, 9, 1, 4},          Relu{"enc1.relu"},
            Conv{"enc2", 32, 4, 2, 1},          Relu{"enc2.relu"},
            Conv{"enc3", 64, 4, 2, 1},          Relu{"enc3.relu"},
            Conv{"enc4", 128, 4, 2, 1},         Relu{"enc4.relu"},
            ResidualBlock{"res1", 128},         ResidualBlock{"res2", 128},
            ResidualBlock{"res3", 128},         ResidualBlock{"res4", 128},
            ResidualBlock{"res5", 128},         ResidualBlock{"res6", 128},
            TransposeConv{"dec1", 64, 4, 2, 1}, Relu{"dec1.relu"},
            TransposeConv{"dec2", 32, 4, 2, 1}, Relu{"dec2.relu"},
            TransposeConv{"dec3", 16, 4, 2, 1}, Relu{"dec3.relu"},
            OutputHeads{},
        };
        return s;
    }
};

inline std::string layer_name(const Layer& l) {
    return std::visit(
        [](const auto& x) -> std::string {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, OutputHeads>)
                return "heads";
            else
                return x.name;
        },
        l);
}

class ShapeError : public std::invalid_argument {
public:
    ShapeError(const std::string& layer, const std::string& what)
        : std::invalid_argument("layer '" + layer + "': " + what), layer_(layer) {}
    const std::string& layer() const { return layer_; }

private:
    std::string layer_;
};

using Shape = std::vector<std::size_t>;

struct ShapedLayer {
    std::string name;
    Shape output;
};

// Shape of every layer's output, checked against the required weights when
// `weights` is given. Throws ShapeError naming the first offending layer.
inline std::vector<ShapedLayer> infer_shapes(const NetworkSpec& spec, const WeightBundle* weights = nullptr) {
    auto expect = [&](const std::string& layer, const std::string& name, const Shape& shape) {
        if (!weights) return;
        if (!weights->contains(name)) throw ShapeError(layer, "missing weight '" + name + "'");
        const auto& t = weights->at(name);
        if (t.shape != shape)
            throw ShapeError(layer, "weight '" + name + "' has shape " + t.shape_string() + ", expected " +
                                        Tensor::shape_string(shape));
    };

    Shape cur(spec.input.begin(), spec.input.end());
    std::vector<ShapedLayer> out;
    bool heads_seen = false;
    for (const auto& layer : spec.layers) {
        const std::string name = layer_name(layer);
        if (heads_seen) throw ShapeError(name, "layers after the output heads");
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Conv>) {
                    if (l.stride < 1) throw ShapeError(name, "stride must be >= 1");
                    if (cur[1] + 2 * l.padding < l.kernel || cur[2] + 2 * l.padding < l.kernel)
                        throw ShapeError(name, "kernel larger than padded input");
                    expect(name, name + ".weight", {l.filters, cur[0], l.kernel, l.kernel});
                    expect(name, name + ".bias", {l.filters});
                    cur = {l.filters, conv_out_dim(cur[1], l.kernel, l.stride, l.padding),
                           conv_out_dim(cur[2], l.kernel, l.stride, l.padding)};
                } else if constexpr (std::is_same_v<T, ResidualBlock>) {
                    if (l.filters != cur[0])
                        throw ShapeError(name, "residual block has " + std::to_string(l.filters) +
                                                   " filters but its input has " + std::to_string(cur[0]) + " channels");
                    if (l.kernel % 2 == 0) throw ShapeError(name, "residual kernel must be odd");
                    expect(name, name + ".conv1.weight", {l.filters, cur[0], l.kernel, l.kernel});
                    expect(name, name + ".conv1.bias", {l.filters});
                    expect(name, name + ".conv2.weight", {l.filters, l.filters, l.kernel, l.kernel});
                    expect(name, name + ".conv2.bias", {l.filters});
                } else if constexpr (std::is_same_v<T, TransposeConv>) {
                    if (l.stride < 1) throw ShapeError(name, "stride must be >= 1");
                    expect(name, name + ".weight", {cur[0], l.filters, l.kernel, l.kernel});
                    expect(name, name + ".bias", {l.filters});
                    const long h = static_cast<long>((cur[1] - 1) * l.stride + l.kernel) - 2 * static_cast<long>(l.padding);
                    const long w = static_cast<long>((cur[2] - 1) * l.stride + l.kernel) - 2 * static_cast<long>(l.padding);
                    if (h < 1 || w < 1) throw ShapeError(name, "output would be empty");
                    cur = {l.filters, static_cast<std::size_t>(h), static_cast<std::size_t>(w)};
                } else if constexpr (std::is_same_v<T, Relu>) {
                } else {
                    if (l.kernel % 2 == 0) throw ShapeError(name, "head kernel must be odd");
                    for (const auto& h : l.names) {
                        expect(name, h + ".weight", {1, cur[0], l.kernel, l.kernel});
                        expect(name, h + ".bias", {1});
                    }
                    cur = {4, cur[1], cur[2]};
                    heads_seen = true;
                }
            },
            layer);
        out.push_back({name, cur});
    }
    if (!heads_seen) throw ShapeError("heads", "network has no output heads");
    if (cur[1] != spec.input[1] || cur[2] != spec.input[2])
        throw ShapeError("heads", "output planes are " + std::to_string(cur[1]) + "x" + std::to_string(cur[2]) +
                                      ", input is " + std::to_string(spec.input[1]) + "x" +
                                      std::to_string(spec.input[2]));
    return out;
}

// He-style random initialization (scaled down to keep deep activations in
// range). Biases are zero.
inline WeightBundle random_weights(const NetworkSpec& spec, std::uint64_t seed, float gain = 0.5f) {
    WeightBundle b;
    Rng rng(seed);
    auto fill = [&](const std::string& name, Shape shape, std::size_t fan_in) {
        Tensor t(std::move(shape));
        const double sd = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
        for (float& v : t.data) v = static_cast<float>(sd * rng.normal());
        b.add(name, std::move(t));
    };
    Shape cur(spec.input.begin(), spec.input.end());
    for (const auto& layer : spec.layers) {
        std::visit(
            [&](const auto& l) {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Conv>) {
                    fill(l.name + ".weight", {l.filters, cur[0], l.kernel, l.kernel}, cur[0] * l.kernel * l.kernel);
                    b.add(l.name + ".bias", Tensor({l.filters}));
                    cur = {l.filters, conv_out_dim(cur[1], l.kernel, l.stride, l.padding),
                           conv_out_dim(cur[2], l.kernel, l.stride, l.padding)};
                } else if constexpr (std::is_same_v<T, ResidualBlock>) {
                    const std::size_t fan = l.filters * l.kernel * l.kernel;
                    fill(l.name + ".conv1.weight", {l.filters, cur[0], l.kernel, l.kernel}, fan);
                    b.add(l.name + ".conv1.bias", Tensor({l.filters}));
                    fill(l.name + ".conv2.weight", {l.filters, l.filters, l.kernel, l.kernel}, fan);
                    b.add(l.name + ".conv2.bias", Tensor({l.filters}));
                } else if constexpr (std::is_same_v<T, TransposeConv>) {
                    fill(l.name + ".weight", {cur[0], l.filters, l.kernel, l.kernel}, cur[0] * l.kernel * l.kernel);
                    b.add(l.name + ".bias", Tensor({l.filters}));
                    cur = {l.filters, conv_transpose_out_dim(cur[1], l.kernel, l.stride, l.padding),
                           conv_transpose_out_dim(cur[2], l.kernel, l.stride, l.padding)};
                } else if constexpr (std::is_same_v<T, OutputHeads>) {
                    for (const auto& h : l.names) {
                        fill(h + ".weight", {1, cur[0], l.kernel, l.kernel}, cur[0] * l.kernel * l.kernel);
                        b.add(h + ".bias", Tensor({1}));
                    }
                }
            },
            layer);
    }
    return b;
}

inline WeightBundle zero_weights(const NetworkSpec& spec) {
    WeightBundle b = random_weights(spec, 0);
    WeightBundle z;
    for (const auto& [name, t] : b.entries()) z.add(name, Tensor(t.shape));
    return z;
}

// Produces a grasp map from a (1, H, W) mean-centered depth tensor.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual GraspMap predict(const Tensor& input) const = 0;
    virtual std::string name() const = 0;
};

inline GraspMap predict(const Predictor& p, const Tensor& input) { return p.predict(input); }

inline Plane tensor_plane(const Tensor& t, std::size_t channel) {
    Plane p(static_cast<Eigen::Index>(t.dim(1)), static_cast<Eigen::Index>(t.dim(2)));
    std::copy_n(t.data.data() + channel * t.dim(1) * t.dim(2), t.dim(1) * t.dim(2), p.data());
    return p;
}

class NetworkPredictor final : public Predictor {
public:
    NetworkPredictor(NetworkSpec spec, WeightBundle weights) : spec_(std::move(spec)), weights_(std::move(weights)) {
        shapes_ = infer_shapes(spec_, &weights_);
    }

    const NetworkSpec& spec() const { return spec_; }
    const std::vector<ShapedLayer>& shapes() const { return shapes_; }
    std::string name() const override { return "ggrcnn"; }

    // Raw (C,H,W) output of the heads, before clamping.
    Tensor forward(const Tensor& input) const {
        const Shape want(spec_.input.begin(), spec_.input.end());
        if (input.shape != want)
            throw std::invalid_argument("predict: input shape " + input.shape_string() + " does not match network input " +
                                        Tensor::shape_string(want));
        if (!input.all_finite()) throw std::invalid_argument("predict: input has non-finite values");
        Tensor x = input;
        for (const auto& layer : spec_.layers) {
            const std::string name = layer_name(layer);
            x = std::visit(
                [&](const auto& l) -> Tensor {
                    using T = std::decay_t<decltype(l)>;
                    if constexpr (std::is_same_v<T, Conv>) {
                        return conv2d(x, w(l.name + ".weight"), w(l.name + ".bias"), l.stride, l.padding);
                    } else if constexpr (std::is_same_v<T, ResidualBlock>) {
                        return residual_block(x, {w(l.name + ".conv1.weight"), w(l.name + ".conv1.bias"),
                                                  w(l.name + ".conv2.weight"), w(l.name + ".conv2.bias")});
                    } else if constexpr (std::is_same_v<T, TransposeConv>) {
                        return conv_transpose2d(x, w(l.name + ".weight"), w(l.name + ".bias"), l.stride, l.padding);
                    } else if constexpr (std::is_same_v<T, Relu>) {
                        relu_inplace(x);
                        return std::move(x);
                    } else {
                        Tensor out({4, x.dim(1), x.dim(2)});
                        const std::size_t plane = x.dim(1) * x.dim(2);
                        for (std::size_t h = 0; h < 4; ++h) {
                            const Tensor y =
                                conv2d(x, w(l.names[h] + ".weight"), w(l.names[h] + ".bias"), 1, l.kernel / 2);
                            std::copy(y.data.begin(), y.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(h * plane));
                        }
                        return out;
                    }
                },
                layer);
            if (!x.all_finite()) throw std::runtime_error("non-finite activations after layer '" + name + "'");
        }
        return x;
    }

    GraspMap predict(const Tensor& input) const override {
        const Tensor out = forward(input);
        Plane width = tensor_plane(out, 3).max(0.0f).min(1.0f);
        return GraspMap(tensor_plane(out, 0), tensor_plane(out, 1), tensor_plane(out, 2), std::move(width));
    }

private:
    const Tensor& w(const std::string& name) const { return weights_.at(name); }

    NetworkSpec spec_;
    WeightBundle weights_;
    std::vector<ShapedLayer> shapes_;
};

inline std::unique_ptr<Predictor> build_network(NetworkSpec spec, WeightBundle weights) {
    return std::make_unique<NetworkPredictor>(std::move(spec), std::move(weights));
}

}  // namespace openarms::ggrcnn
