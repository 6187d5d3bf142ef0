#pragma once

// Weight bundle file format, all integers and floats little-endian:
//
//   "GGRW"                     4-byte magic
//   u32 tensor_count
//   repeated tensor_count times:
//     u16 name_length, name bytes (UTF-8)
//     u8 rank, u32 dims[rank]
//     f32 payload[prod(dims)]

#include "openarms/ggrcnn/tensor.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace openarms::ggrcnn {

class WeightBundle {
public:
    void add(const std::string& name, Tensor t) {
        if (name.empty() || name.size() > 0xffff) throw std::invalid_argument("weight name length out of range");
        if (!t.all_finite()) throw std::invalid_argument("weight '" + name + "' has non-finite values");
        if (index_.count(name)) throw std::invalid_argument("duplicate weight '" + name + "'");
        index_[name] = entries_.size();
        entries_.emplace_back(name, std::move(t));
    }

    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    const Tensor& at(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::out_of_range("missing weight '" + name + "'");
        return entries_[it->second].second;
    }
    Tensor& at(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::out_of_range("missing weight '" + name + "'");
        return entries_[it->second].second;
    }

    void erase(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) return;
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(it->second));
        index_.clear();
        for (std::size_t i = 0; i < entries_.size(); ++i) index_[entries_[i].first] = i;
    }

    // Insertion order.
    const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
    std::map<std::string, std::size_t> index_;
};

inline bool operator==(const WeightBundle& a, const WeightBundle& b) { return a.entries() == b.entries(); }

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    template <class T>
    T le() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }

    std::string take(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw std::runtime_error("weight file truncated at byte " + std::to_string(pos_));
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline constexpr char kWeightMagic[4] = {'G', 'G', 'R', 'W'};

inline std::string serialize_weights(const WeightBundle& bundle) {
    std::string out(kWeightMagic, 4);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(bundle.size()));
    for (const auto& [name, t] : bundle.entries()) {
        detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
        out += name;
        detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
        for (auto d : t.shape) detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
        for (float f : t.data) detail::put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

inline WeightBundle deserialize_weights(const std::string& bytes) {
    detail::Reader in(bytes);
    if (in.take(4) != std::string(kWeightMagic, 4)) throw std::runtime_error("not a GGRW weight file (bad magic)");
    const auto count = in.le<std::uint32_t>();
    WeightBundle bundle;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto name_len = in.le<std::uint16_t>();
        std::string name = in.take(name_len);
        const auto rank = in.le<std::uint8_t>();
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = in.le<std::uint32_t>();
        std::vector<float> data(Tensor::count(shape));
        for (auto& f : data) f = std::bit_cast<float>(in.le<std::uint32_t>());
        bundle.add(name, Tensor(std::move(shape), std::move(data)));
    }
    if (!in.at_end()) throw std::runtime_error("trailing bytes after weight file payload");
    return bundle;
}

inline void save_weights(const std::string& path, const WeightBundle& bundle) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write weight file '" + path + "'");
    const std::string bytes = serialize_weights(bundle);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline WeightBundle load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open weight file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return deserialize_weights(ss.str());
}

}  // namespace openarms::ggrcnn
