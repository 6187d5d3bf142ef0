#pragma once

// Convolution primitives over CHW tensors, lowered to GEMM via im2col /
// col2im.

#include "openarms/ggrcnn/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace openarms::ggrcnn {

using RowMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

inline std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    if (in + 2 * pad < k) throw std::invalid_argument("kernel larger than padded input");
    return (in + 2 * pad - k) / stride + 1;
}

inline std::size_t conv_transpose_out_dim(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    const long d = static_cast<long>((in - 1) * stride + k) - 2 * static_cast<long>(pad);
    if (d < 1) throw std::invalid_argument("transpose convolution output would be empty");
    return static_cast<std::size_t>(d);
}

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

inline void check_bias(const Tensor& bias, std::size_t channels, const char* op) {
    require(bias.rank() == 1 && bias.dim(0) == channels,
            std::string(op) + ": bias shape " + bias.shape_string() + " does not match " + std::to_string(channels) +
                " output channels");
}

}  // namespace detail

inline Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
                     std::size_t padding) {
    using detail::require;
    require(input.rank() == 3, "conv2d: input must be (C,H,W), got " + input.shape_string());
    require(weight.rank() == 4, "conv2d: weight must be (out,in,kh,kw), got " + weight.shape_string());
    require(stride >= 1, "conv2d: stride must be >= 1");
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t O = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
    require(weight.dim(1) == C, "conv2d: weight expects " + std::to_string(weight.dim(1)) + " input channels, input has " +
                                    std::to_string(C));
    detail::check_bias(bias, O, "conv2d");
    const std::size_t Ho = conv_out_dim(H, kh, stride, padding), Wo = conv_out_dim(W, kw, stride, padding);
    const std::size_t K = C * kh * kw, N = Ho * Wo;

    RowMatrix cols(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < kh; ++i)
            for (std::size_t j = 0; j < kw; ++j) {
                float* row = cols.row(static_cast<Eigen::Index>((c * kh + i) * kw + j)).data();
                for (std::size_t oy = 0; oy < Ho; ++oy) {
                    const long y = static_cast<long>(oy * stride + i) - static_cast<long>(padding);
                    float* dst = row + oy * Wo;
                    if (y < 0 || y >= static_cast<long>(H)) {
                        std::fill(dst, dst + Wo, 0.0f);
                        continue;
                    }
                    const float* src = input.data.data() + (c * H + static_cast<std::size_t>(y)) * W;
                    for (std::size_t ox = 0; ox < Wo; ++ox) {
                        const long x = static_cast<long>(ox * stride + j) - static_cast<long>(padding);
                        dst[ox] = (x < 0 || x >= static_cast<long>(W)) ? 0.0f : src[x];
                    }
                }
            }

    Tensor out({O, Ho, Wo});
    const ConstMatrixMap w(weight.data.data(), static_cast<Eigen::Index>(O), static_cast<Eigen::Index>(K));
    MatrixMap o(out.data.data(), static_cast<Eigen::Index>(O), static_cast<Eigen::Index>(N));
    o.noalias() = w * cols;
    for (std::size_t oc = 0; oc < O; ++oc) o.row(static_cast<Eigen::Index>(oc)).array() += bias.data[oc];
    return out;
}

inline Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const Tensor& bias, std::size_t stride,
                               std::size_t padding) {
    using detail::require;
    require(input.rank() == 3, "conv_transpose2d: input must be (C,H,W), got " + input.shape_string());
    require(weight.rank() == 4, "conv_transpose2d: weight must be (in,out,kh,kw), got " + weight.shape_string());
    require(stride >= 1, "conv_transpose2d: stride must be >= 1");
    const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
    const std::size_t O = weight.dim(1), kh = weight.dim(2), kw = weight.dim(3);
    require(weight.dim(0) == C, "conv_transpose2d: weight expects " + std::to_string(weight.dim(0)) +
                                    " input channels, input has " + std::to_string(C));
    detail::check_bias(bias, O, "conv_transpose2d");
    const std::size_t Ho = conv_transpose_out_dim(H, kh, stride, padding);
    const std::size_t Wo = conv_transpose_out_dim(W, kw, stride, padding);
    const std::size_t K = O * kh * kw, N = H * W;

    const ConstMatrixMap w(weight.data.data(), static_cast<Eigen::Index>(C), static_cast<Eigen::Index>(K));
    const ConstMatrixMap x(input.data.data(), static_cast<Eigen::Index>(C), static_cast<Eigen::Index>(N));
    RowMatrix cols(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
    cols.noalias() = w.transpose() * x;

    Tensor out({O, Ho, Wo});
    for (std::size_t o = 0; o < O; ++o) std::fill_n(out.data.data() + o * Ho * Wo, Ho * Wo, bias.data[o]);
    for (std::size_t o = 0; o < O; ++o)
        for (std::size_t i = 0; i < kh; ++i)
            for (std::size_t j = 0; j < kw; ++j) {
                const float* row = cols.row(static_cast<Eigen::Index>((o * kh + i) * kw + j)).data();
                for (std::size_t iy = 0; iy < H; ++iy) {
                    const long y = static_cast<long>(iy * stride + i) - static_cast<long>(padding);
                    if (y < 0 || y >= static_cast<long>(Ho)) continue;
                    float* dst = out.data.data() + (o * Ho + static_cast<std::size_t>(y)) * Wo;
                    const float* src = row + iy * W;
                    for (std::size_t ix = 0; ix < W; ++ix) {
                        const long xx = static_cast<long>(ix * stride + j) - static_cast<long>(padding);
                        if (xx >= 0 && xx < static_cast<long>(Wo)) dst[xx] += src[ix];
                    }
                }
            }
    return out;
}

inline void relu_inplace(Tensor& t) {
    for (float& v : t.data) v = std::max(v, 0.0f);
}

inline Tensor relu(Tensor t) {
    relu_inplace(t);
    return t;
}

struct ResidualWeights {
    Tensor conv1_weight, conv1_bias, conv2_weight, conv2_bias;
};

// input + conv(relu(conv(input))), 'same' convolutions with stride 1.
inline Tensor residual_block(const Tensor& input, const ResidualWeights& w) {
    using detail::require;
    require(input.rank() == 3, "residual_block: input must be (C,H,W)");
    require(w.conv1_weight.rank() == 4 && w.conv2_weight.rank() == 4, "residual_block: weights must be rank 4");
    const std::size_t k1 = w.conv1_weight.dim(2), k2 = w.conv2_weight.dim(2);
    require(k1 % 2 == 1 && k2 % 2 == 1 && w.conv1_weight.dim(3) == k1 && w.conv2_weight.dim(3) == k2,
            "residual_block: kernels must be square and odd");
    Tensor h = conv2d(input, w.conv1_weight, w.conv1_bias, 1, k1 / 2);
    relu_inplace(h);
    Tensor out = conv2d(h, w.conv2_weight, w.conv2_bias, 1, k2 / 2);
    require(out.shape == input.shape,
            "residual_block: block maps " + input.shape_string() + " to " + out.shape_string());
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += input.data[i];
    return out;
}

}  // namespace openarms::ggrcnn
