#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ontograph/params.hpp"
#include "ontograph/tensor.hpp"

namespace ontograph {

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
    Tape* tape = nullptr;
    std::uint32_t id = 0;
    bool valid() const { return tape != nullptr; }
    const Tensor& val() const;
};

/// Reverse-mode autodiff tape. Ops compute eagerly and append a record; a
/// single backward() sweep visits records in reverse, accumulates gradients
/// and flushes them into the originating ParamStore entries, then clears the
/// tape. A tape is single-threaded by design.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Untracked constant.
    Var leaf(Tensor value);
    /// Tracked parameter; backward() accumulates its gradient into `store`.
    Var param(ParamStore& store, ParamId id);

    // --- core ops -----------------------------------------------------------
    Var matmul(Var a, Var b, bool trans_a = false, bool trans_b = false);
    Var add(Var a, Var b);
    /// M (n x d) + row (1 x d) broadcast over rows.
    Var add_row(Var m, Var row);
    Var scale(Var a, double c);
    Var concat_rows(const std::vector<Var>& parts);
    Var concat_cols(const std::vector<Var>& parts);
    Var slice_rows(Var a, std::size_t row_begin, std::size_t row_end);
    Var relu(Var a);
    Var sigmoid(Var a);
    /// Row softmax over logits clamped to [lo, hi] before exponentiation.
    Var softmax_row(Var logits, double clamp_lo, double clamp_hi);
    /// Masked variant: entries with mask == 0 are excluded from the softmax
    /// (output 0). Every row must keep at least one unmasked entry.
    Var softmax_row_masked(Var logits, Tensor mask, double clamp_lo, double clamp_hi);
    Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
    /// Column means over rows: (n x d) -> (1 x d).
    Var mean_pool_rows(Var a);
    Var l2_normalize_rows(Var a);
    /// Mean over rows of -sum_c onehot * log softmax(logits).
    Var cross_entropy(Var logits, Tensor onehot);
    /// Mean elementwise BCE on probabilities in (0, 1).
    Var binary_cross_entropy(Var probs, Tensor labels);
    /// Mean elementwise BCE on logits; numerically stable for any magnitude.
    Var bce_logits(Var logits, Tensor labels);
    Var gather_rows(Var a, std::vector<std::size_t> idx);
    /// Scatters a column of per-pair values into an n x n matrix (zeros
    /// elsewhere); with `symmetric` each value lands at (i,j) and (j,i).
    Var scatter_pairs(Var values, std::vector<std::pair<std::size_t, std::size_t>> coords,
                      std::size_t n, bool symmetric);
    /// Sum of all entries: -> (1 x 1).
    Var sum(Var a);

    /// Reverse sweep from a scalar loss. Gradients of every param() node are
    /// accumulated into their stores; the tape is cleared afterwards.
    void backward(Var loss);

    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    std::size_t size() const { return nodes_.size(); }
    void reset();

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        // Accumulates this node's grad into its inputs' grads.
        std::function<void(Tape&, std::uint32_t)> pull;
        ParamStore* sink_store = nullptr;
        ParamId sink_id = 0;
    };

    Var push(Tensor value, bool needs_grad, std::function<void(Tape&, std::uint32_t)> pull);
    Node& node(std::uint32_t id) { return nodes_[id]; }
    Tensor& grad_buf(std::uint32_t id);
    bool needs(Var v) const { return nodes_[v.id].needs_grad; }
    void check_same_tape(Var v) const;

    std::vector<Node> nodes_;
};

} // namespace ontograph
