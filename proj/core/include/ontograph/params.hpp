#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ontograph/rng.hpp"
#include "ontograph/tensor.hpp"

namespace ontograph {

using ParamId = std::uint32_t;

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Owns every learnable tensor of a model together with its gradient and
/// Adam moments. Iteration order is insertion order, which keeps optimizer
/// updates and checkpoints deterministic.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor value;
        Tensor grad;
        Tensor m; // first moment
        Tensor v; // second moment
    };

    ParamId add(std::string name, Tensor init);

    std::size_t count() const { return entries_.size(); }
    std::size_t scalar_count() const;

    Entry& entry(ParamId id) { return entries_[id]; }
    const Entry& entry(ParamId id) const { return entries_[id]; }
    Tensor& value(ParamId id) { return entries_[id].value; }
    const Tensor& value(ParamId id) const { return entries_[id].value; }
    Tensor& grad(ParamId id) { return entries_[id].grad; }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }

    std::optional<ParamId> find(const std::string& name) const;

    void zero_grads();

    /// One Adam update with bias correction on every parameter.
    void adam_step(const AdamConfig& cfg);

    std::uint64_t step_count() const { return adam_t_; }

    /// Deep copy of all parameter values (optimizer state excluded).
    std::vector<Tensor> snapshot_values() const;
    void restore_values(const std::vector<Tensor>& values);

private:
    std::vector<Entry> entries_;
    std::uint64_t adam_t_ = 0;
};

/// Glorot-uniform initializer: U(-s, s), s = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_init(std::size_t rows, std::size_t cols, Rng& rng);

/// Checkpoint file format (little endian):
///   [u32 tensor count] then per tensor
///   [u16 name_len][name bytes][u8 rank][u64 dims...][f64 data...]
void save_checkpoint(const ParamStore& store, const std::string& path,
                     std::uint64_t config_hash);

/// Loads a checkpoint into an already-constructed store. Names and shapes
/// must match exactly; the embedded config hash (tensor "__meta.config_hash")
/// must equal `expected_hash` unless it is zero.
void load_checkpoint(ParamStore& store, const std::string& path,
                     std::uint64_t expected_hash);

/// Reads just the embedded config hash from a checkpoint file.
std::uint64_t checkpoint_config_hash(const std::string& path);

} // namespace ontograph
