#include "ontograph/params.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "ontograph/errors.hpp"

namespace ontograph {

ParamId ParamStore::add(std::string name, Tensor init) {
    if (find(name)) throw InputError("param store: duplicate parameter name '" + name + "'");
    Entry e;
    e.name = std::move(name);
    e.grad = Tensor(init.shape());
    e.m = Tensor(init.shape());
    e.v = Tensor(init.shape());
    e.value = std::move(init);
    entries_.push_back(std::move(e));
    return static_cast<ParamId>(entries_.size() - 1);
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

std::optional<ParamId> ParamStore::find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return static_cast<ParamId>(i);
    return std::nullopt;
}

void ParamStore::zero_grads() {
    for (auto& e : entries_) e.grad.fill(0.0);
}

void ParamStore::adam_step(const AdamConfig& cfg) {
    ++adam_t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t_));
    for (auto& e : entries_) {
        for (std::size_t i = 0; i < e.value.size(); ++i) {
            const double g = e.grad.at(i);
            e.m.at(i) = cfg.beta1 * e.m.at(i) + (1.0 - cfg.beta1) * g;
            e.v.at(i) = cfg.beta2 * e.v.at(i) + (1.0 - cfg.beta2) * g * g;
            const double mhat = e.m.at(i) / bc1;
            const double vhat = e.v.at(i) / bc2;
            e.value.at(i) -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

std::vector<Tensor> ParamStore::snapshot_values() const {
    std::vector<Tensor> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.value);
    return out;
}

void ParamStore::restore_values(const std::vector<Tensor>& values) {
    if (values.size() != entries_.size()) throw InputError("param store: snapshot size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].same_shape(entries_[i].value)) throw InputError("param store: snapshot shape mismatch");
        entries_[i].value = values[i];
    }
}

Tensor glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
    Tensor t({rows, cols});
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (std::size_t i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(-s, s);
    return t;
}

namespace {

constexpr const char* kHashTensorName = "__meta.config_hash";

template <typename T>
void write_le(std::ofstream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw InputError("checkpoint: truncated file");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

void write_f64(std::ofstream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    write_le<std::uint64_t>(out, bits);
}

double read_f64(std::ifstream& in) {
    const std::uint64_t bits = read_le<std::uint64_t>(in);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

void write_tensor(std::ofstream& out, const std::string& name, const Tensor& t) {
    if (name.size() > 0xffff) throw InputError("checkpoint: tensor name too long");
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape()) write_le<std::uint64_t>(out, d);
    for (std::size_t i = 0; i < t.size(); ++i) write_f64(out, t.at(i));
}

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

NamedTensor read_tensor(std::ifstream& in) {
    const std::uint16_t name_len = read_le<std::uint16_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw InputError("checkpoint: truncated name");
    const std::uint8_t rank = read_le<std::uint8_t>(in);
    if (rank > 3) throw InputError("checkpoint: tensor rank > 3");
    std::vector<std::size_t> shape;
    std::size_t total = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
        const std::uint64_t d = read_le<std::uint64_t>(in);
        if (d == 0 || d > (1ull << 32)) throw InputError("checkpoint: implausible dimension");
        shape.push_back(static_cast<std::size_t>(d));
        total *= static_cast<std::size_t>(d);
    }
    std::vector<double> data(rank == 0 ? 0 : total);
    for (double& v : data) v = read_f64(in);
    return {std::move(name), Tensor(std::move(shape), std::move(data))};
}

} // namespace

void save_checkpoint(const ParamStore& store, const std::string& path, std::uint64_t config_hash) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("checkpoint: cannot open for write: " + path);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.count() + 1));
    // The config hash rides along as an ordinary scalar tensor entry.
    Tensor hash_t({1, 1});
    std::memcpy(hash_t.data(), &config_hash, sizeof(config_hash));
    write_tensor(out, kHashTensorName, hash_t);
    for (const auto& e : store.entries()) write_tensor(out, e.name, e.value);
    if (!out) throw InputError("checkpoint: write failed: " + path);
}

void load_checkpoint(ParamStore& store, const std::string& path, std::uint64_t expected_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("checkpoint: cannot open: " + path);
    const std::uint32_t count = read_le<std::uint32_t>(in);
    std::size_t loaded = 0;
    for (std::uint32_t k = 0; k < count; ++k) {
        NamedTensor nt = read_tensor(in);
        if (nt.name == kHashTensorName) {
            std::uint64_t h;
            std::memcpy(&h, nt.tensor.data(), sizeof(h));
            if (expected_hash != 0 && h != expected_hash)
                throw InputError("checkpoint: config hash mismatch (file was trained with different settings)");
            continue;
        }
        auto id = store.find(nt.name);
        if (!id) throw InputError("checkpoint: unknown tensor '" + nt.name + "'");
        if (!store.value(*id).same_shape(nt.tensor))
            throw InputError("checkpoint: shape mismatch for '" + nt.name + "': file " + nt.tensor.shape_str() +
                             " vs model " + store.value(*id).shape_str());
        store.value(*id) = std::move(nt.tensor);
        ++loaded;
    }
    if (loaded != store.count())
        throw InputError("checkpoint: file holds " + std::to_string(loaded) + " tensors, model expects " +
                         std::to_string(store.count()));
}

std::uint64_t checkpoint_config_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("checkpoint: cannot open: " + path);
    const std::uint32_t count = read_le<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < count; ++k) {
        NamedTensor nt = read_tensor(in);
        if (nt.name == kHashTensorName) {
            std::uint64_t h;
            std::memcpy(&h, nt.tensor.data(), sizeof(h));
            return h;
        }
    }
    throw InputError("checkpoint: missing config hash entry");
}

} // namespace ontograph
