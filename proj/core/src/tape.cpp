#include "ontograph/tape.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "ontograph/errors.hpp"

namespace ontograph {

namespace {

Tensor transpose(const Tensor& a) {
    Tensor out({a.cols(), a.rows()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

// C = op(A) * op(B) with optional transposes.
Tensor mm(const Tensor& a, const Tensor& b, bool ta, bool tb) {
    const std::size_t m = ta ? a.cols() : a.rows();
    const std::size_t ka = ta ? a.rows() : a.cols();
    const std::size_t kb = tb ? b.cols() : b.rows();
    const std::size_t n = tb ? b.rows() : b.cols();
    if (ka != kb)
        throw InputError("matmul: inner dimensions disagree " + a.shape_str() + " x " + b.shape_str());
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < ka; ++k) {
            const double av = ta ? a(k, i) : a(i, k);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += av * (tb ? b(j, k) : b(k, j));
            }
        }
    }
    return out;
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

void check_finite_debug(const Tensor& t, const char* op) {
#ifndef NDEBUG
    if (!t.all_finite()) throw NumericError(std::string("non-finite value produced by ") + op);
#else
    (void)t;
    (void)op;
#endif
}

} // namespace

const Tensor& Var::val() const { return tape->value(*this); }

void Tape::check_same_tape(Var v) const {
    if (v.tape != this) throw InputError("tape: variable belongs to a different tape");
}

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&, std::uint32_t)> pull) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.pull = std::move(pull);
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tensor& Tape::grad_buf(std::uint32_t id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) n.grad = Tensor(n.value.shape());
    return n.grad;
}

Var Tape::leaf(Tensor value) {
    if (!value.all_finite()) throw NumericError("leaf: non-finite input tensor");
    return push(std::move(value), false, {});
}

Var Tape::param(ParamStore& store, ParamId id) {
    const Tensor& v = store.value(id);
    if (!v.all_finite()) throw NumericError("param '" + store.entry(id).name + "': non-finite value");
    Var out = push(v, true, {});
    nodes_[out.id].sink_store = &store;
    nodes_[out.id].sink_id = id;
    return out;
}

Var Tape::matmul(Var a, Var b, bool ta, bool tb) {
    check_same_tape(a);
    check_same_tape(b);
    Tensor out = mm(a.val(), b.val(), ta, tb);
    check_finite_debug(out, "matmul");
    const bool ng = needs(a) || needs(b);
    const std::uint32_t ia = a.id, ib = b.id;
    return push(std::move(out), ng, [ia, ib, ta, tb](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        if (t.node(ia).needs_grad) {
            // dA' = g * B'^T, transposed back if A was transposed
            Tensor da = ta ? mm(t.node(ib).value, g, tb, true) : mm(g, t.node(ib).value, false, !tb);
            Tensor& acc = t.grad_buf(ia);
            for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += da.at(i);
        }
        if (t.node(ib).needs_grad) {
            Tensor db = tb ? mm(g, t.node(ia).value, true, ta) : mm(t.node(ia).value, g, !ta, false);
            Tensor& acc = t.grad_buf(ib);
            for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += db.at(i);
        }
    });
}

Var Tape::add(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    if (!a.val().same_shape(b.val()))
        throw InputError("add: shape mismatch " + a.val().shape_str() + " vs " + b.val().shape_str());
    Tensor out = a.val();
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += b.val().at(i);
    const bool ng = needs(a) || needs(b);
    const std::uint32_t ia = a.id, ib = b.id;
    return push(std::move(out), ng, [ia, ib](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        for (std::uint32_t in : {ia, ib}) {
            if (!t.node(in).needs_grad) continue;
            Tensor& acc = t.grad_buf(in);
            for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += g.at(i);
        }
    });
}

Var Tape::add_row(Var m, Var row) {
    check_same_tape(m);
    check_same_tape(row);
    const Tensor& mv = m.val();
    const Tensor& rv = row.val();
    if (rv.rows() != 1 || rv.cols() != mv.cols())
        throw InputError("add_row: row shape " + rv.shape_str() + " does not match " + mv.shape_str());
    Tensor out = mv;
    for (std::size_t i = 0; i < mv.rows(); ++i)
        for (std::size_t j = 0; j < mv.cols(); ++j) out(i, j) += rv(0, j);
    const bool ng = needs(m) || needs(row);
    const std::uint32_t im = m.id, ir = row.id;
    return push(std::move(out), ng, [im, ir](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        if (t.node(im).needs_grad) {
            Tensor& acc = t.grad_buf(im);
            for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += g.at(i);
        }
        if (t.node(ir).needs_grad) {
            Tensor& acc = t.grad_buf(ir);
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) acc(0, j) += g(i, j);
        }
    });
}

Var Tape::scale(Var a, double c) {
    check_same_tape(a);
    Tensor out = a.val();
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= c;
    const std::uint32_t ia = a.id;
    return push(std::move(out), needs(a), [ia, c](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += c * g.at(i);
    });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw InputError("concat_rows: empty input");
    std::size_t rows = 0;
    const std::size_t cols = parts[0].val().cols();
    bool ng = false;
    for (Var p : parts) {
        check_same_tape(p);
        if (p.val().cols() != cols) throw InputError("concat_rows: column mismatch");
        rows += p.val().rows();
        ng = ng || needs(p);
    }
    Tensor out({rows, cols});
    std::size_t r = 0;
    std::vector<std::uint32_t> ids;
    std::vector<std::size_t> offsets;
    for (Var p : parts) {
        const Tensor& pv = p.val();
        offsets.push_back(r);
        ids.push_back(p.id);
        for (std::size_t i = 0; i < pv.rows(); ++i)
            for (std::size_t j = 0; j < cols; ++j) out(r + i, j) = pv(i, j);
        r += pv.rows();
    }
    return push(std::move(out), ng, [ids, offsets](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (!t.node(ids[k]).needs_grad) continue;
            Tensor& acc = t.grad_buf(ids[k]);
            for (std::size_t i = 0; i < acc.rows(); ++i)
                for (std::size_t j = 0; j < acc.cols(); ++j) acc(i, j) += g(offsets[k] + i, j);
        }
    });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw InputError("concat_cols: empty input");
    const std::size_t rows = parts[0].val().rows();
    std::size_t cols = 0;
    bool ng = false;
    for (Var p : parts) {
        check_same_tape(p);
        if (p.val().rows() != rows) throw InputError("concat_cols: row mismatch");
        cols += p.val().cols();
        ng = ng || needs(p);
    }
    Tensor out({rows, cols});
    std::size_t c = 0;
    std::vector<std::uint32_t> ids;
    std::vector<std::size_t> offsets;
    for (Var p : parts) {
        const Tensor& pv = p.val();
        offsets.push_back(c);
        ids.push_back(p.id);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < pv.cols(); ++j) out(i, c + j) = pv(i, j);
        c += pv.cols();
    }
    return push(std::move(out), ng, [ids, offsets](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (!t.node(ids[k]).needs_grad) continue;
            Tensor& acc = t.grad_buf(ids[k]);
            for (std::size_t i = 0; i < acc.rows(); ++i)
                for (std::size_t j = 0; j < acc.cols(); ++j) acc(i, j) += g(i, offsets[k] + j);
        }
    });
}

Var Tape::slice_rows(Var a, std::size_t row_begin, std::size_t row_end) {
    check_same_tape(a);
    const Tensor& av = a.val();
    if (row_begin >= row_end || row_end > av.rows()) throw InputError("slice_rows: range out of bounds");
    Tensor out({row_end - row_begin, av.cols()});
    for (std::size_t i = row_begin; i < row_end; ++i)
        for (std::size_t j = 0; j < av.cols(); ++j) out(i - row_begin, j) = av(i, j);
    const std::uint32_t ia = a.id;
    return push(std::move(out), needs(a), [ia, row_begin](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) acc(row_begin + i, j) += g(i, j);
    });
}

Var Tape::relu(Var a) {
    check_same_tape(a);
    Tensor out = a.val();
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) = std::max(0.0, out.at(i));
    const std::uint32_t ia = a.id;
    return push(std::move(out), needs(a), [ia](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        const Tensor& x = t.node(ia).value;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < acc.size(); ++i)
            if (x.at(i) > 0.0) acc.at(i) += g.at(i);
    });
}

Var Tape::sigmoid(Var a) {
    check_same_tape(a);
    Tensor out = a.val();
    for (std::size_t i = 0; i < out.size(); ++i) out.at(i) = stable_sigmoid(out.at(i));
    const std::uint32_t ia = a.id;
    return push(std::move(out), needs(a), [ia](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        const Tensor& s = t.node(self).value;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += g.at(i) * s.at(i) * (1.0 - s.at(i));
    });
}

Var Tape::softmax_row(Var logits, double lo, double hi) {
    Tensor mask(logits.val().shape());
    mask.fill(1.0);
    return softmax_row_masked(logits, std::move(mask), lo, hi);
}

Var Tape::softmax_row_masked(Var logits, Tensor mask, double lo, double hi) {
    check_same_tape(logits);
    const Tensor& z = logits.val();
    if (!mask.same_shape(z)) throw InputError("softmax: mask shape mismatch");
    if (!(lo < hi)) throw InputError("softmax: invalid clamp bounds");
    Tensor out(z.shape());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) {
            if (mask(i, j) == 0.0) continue;
            const double c = std::clamp(z(i, j), lo, hi);
            assert(c >= lo && c <= hi); // logits entering exp stay inside the clamp window
            out(i, j) = std::exp(c);
            denom += out(i, j);
        }
        if (denom == 0.0) throw InputError("softmax: fully masked row");
        for (std::size_t j = 0; j < z.cols(); ++j)
            if (mask(i, j) != 0.0) out(i, j) /= denom;
    }
    const std::uint32_t iz = logits.id;
    auto mk = std::make_shared<Tensor>(std::move(mask));
    return push(std::move(out), needs(logits), [iz, mk, lo, hi](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        const Tensor& y = t.node(self).value;
        const Tensor& z = t.node(iz).value;
        Tensor& acc = t.grad_buf(iz);
        for (std::size_t i = 0; i < y.rows(); ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
            for (std::size_t j = 0; j < y.cols(); ++j) {
                if ((*mk)(i, j) == 0.0) continue;
                const bool interior = z(i, j) > lo && z(i, j) < hi;
                if (interior) acc(i, j) += y(i, j) * (g(i, j) - dot);
            }
        }
    });
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
    check_same_tape(x);
    check_same_tape(gain);
    check_same_tape(bias);
    const Tensor& xv = x.val();
    const std::size_t d = xv.cols();
    if (gain.val().cols() != d || gain.val().rows() != 1 || bias.val().cols() != d || bias.val().rows() != 1)
        throw InputError("layer_norm: gain/bias must be 1 x d");
    Tensor xhat(xv.shape());
    Tensor inv_std({xv.rows(), 1});
    Tensor out(xv.shape());
    for (std::size_t i = 0; i < xv.rows(); ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < d; ++j) mu += xv(i, j);
        mu /= static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = xv(i, j) - mu;
            var += c * c;
        }
        var /= static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std(i, 0) = is;
        for (std::size_t j = 0; j < d; ++j) {
            xhat(i, j) = (xv(i, j) - mu) * is;
            out(i, j) = gain.val()(0, j) * xhat(i, j) + bias.val()(0, j);
        }
    }
    const bool ng = needs(x) || needs(gain) || needs(bias);
    const std::uint32_t ix = x.id, ig = gain.id, ib = bias.id;
    auto saved_xhat = std::make_shared<Tensor>(std::move(xhat));
    auto saved_is = std::make_shared<Tensor>(std::move(inv_std));
    return push(std::move(out), ng, [ix, ig, ib, saved_xhat, saved_is](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        const Tensor& gn = t.node(ig).value;
        const Tensor& xh = *saved_xhat;
        const std::size_t n = g.rows(), d = g.cols();
        if (t.node(ig).needs_grad) {
            Tensor& acc = t.grad_buf(ig);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j) acc(0, j) += g(i, j) * xh(i, j);
        }
        if (t.node(ib).needs_grad) {
            Tensor& acc = t.grad_buf(ib);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j) acc(0, j) += g(i, j);
        }
        if (t.node(ix).needs_grad) {
            Tensor& acc = t.grad_buf(ix);
            for (std::size_t i = 0; i < n; ++i) {
                double mean_t = 0.0, mean_tx = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    const double tj = g(i, j) * gn(0, j);
                    mean_t += tj;
                    mean_tx += tj * xh(i, j);
                }
                mean_t /= static_cast<double>(d);
                mean_tx /= static_cast<double>(d);
                const double is = (*saved_is)(i, 0);
                for (std::size_t j = 0; j < d; ++j) {
                    const double tj = g(i, j) * gn(0, j);
                    acc(i, j) += (tj - mean_t - xh(i, j) * mean_tx) * is;
                }
            }
        }
    });
}

Var Tape::mean_pool_rows(Var a) {
    check_same_tape(a);
    const Tensor& av = a.val();
    const std::size_t n = av.rows(), d = av.cols();
    Tensor out({1, d});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) out(0, j) += av(i, j) / static_cast<double>(n);
    const std::uint32_t ia = a.id;
    return push(std::move(out), needs(a), [ia, n](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        Tensor& acc = t.grad_buf(ia);
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < acc.rows(); ++i)
            for (std::size_t j = 0; j < acc.cols(); ++j) acc(i, j) += g(0, j) * inv;
    });
}

Var Tape::l2_normalize_rows(Var a) {
    check_same_tape(a);
    const Tensor& av = a.val();
    Tensor out(av.shape());
    Tensor norms({av.rows(), 1});
    for (std::size_t i = 0; i < av.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < av.cols(); ++j) s += av(i, j) * av(i, j);
        const double r = std::max(std::sqrt(s), 1e-12);
        norms(i, 0) = r;
        for (std::size_t j = 0; j < av.cols(); ++j) out(i, j) = av(i, j) / r;
    }
    const std::uint32_t ia = a.id;
    auto saved_norms = std::make_shared<Tensor>(std::move(norms));
    return push(std::move(out), needs(a), [ia, saved_norms](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        const Tensor& y = t.node(self).value;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < y.rows(); ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
            const double r = (*saved_norms)(i, 0);
            for (std::size_t j = 0; j < y.cols(); ++j) acc(i, j) += (g(i, j) - y(i, j) * dot) / r;
        }
    });
}

Var Tape::cross_entropy(Var logits, Tensor onehot) {
    check_same_tape(logits);
    const Tensor& z = logits.val();
    if (!onehot.same_shape(z)) throw InputError("cross_entropy: target shape mismatch");
    const std::size_t n = z.rows(), c = z.cols();
    Tensor probs(z.shape());
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double zmax = z(i, 0);
        for (std::size_t j = 1; j < c; ++j) zmax = std::max(zmax, z(i, j));
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            probs(i, j) = std::exp(z(i, j) - zmax);
            denom += probs(i, j);
        }
        double row_loss = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            probs(i, j) /= denom;
            if (onehot(i, j) != 0.0) row_loss -= onehot(i, j) * std::log(probs(i, j));
        }
        loss += row_loss;
    }
    loss /= static_cast<double>(n);
    const std::uint32_t iz = logits.id;
    auto saved_p = std::make_shared<Tensor>(std::move(probs));
    auto saved_y = std::make_shared<Tensor>(std::move(onehot));
    return push(Tensor::scalar(loss), needs(logits), [iz, saved_p, saved_y](Tape& t, std::uint32_t self) {
        const double g = t.node(self).grad(0, 0);
        Tensor& acc = t.grad_buf(iz);
        const double inv_n = 1.0 / static_cast<double>(acc.rows());
        for (std::size_t i = 0; i < acc.rows(); ++i)
            for (std::size_t j = 0; j < acc.cols(); ++j)
                acc(i, j) += g * ((*saved_p)(i, j) - (*saved_y)(i, j)) * inv_n;
    });
}

Var Tape::binary_cross_entropy(Var probs, Tensor labels) {
    check_same_tape(probs);
    const Tensor& p = probs.val();
    if (!labels.same_shape(p)) throw InputError("binary_cross_entropy: label shape mismatch");
    constexpr double kEps = 1e-12;
    double loss = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pc = std::clamp(p.at(i), kEps, 1.0 - kEps);
        const double y = labels.at(i);
        loss -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
    }
    loss /= static_cast<double>(p.size());
    const std::uint32_t ip = probs.id;
    auto saved_y = std::make_shared<Tensor>(std::move(labels));
    return push(Tensor::scalar(loss), needs(probs), [ip, saved_y](Tape& t, std::uint32_t self) {
        const double g = t.node(self).grad(0, 0);
        const Tensor& p = t.node(ip).value;
        Tensor& acc = t.grad_buf(ip);
        const double inv_n = 1.0 / static_cast<double>(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double pv = p.at(i);
            if (pv <= 1e-12 || pv >= 1.0 - 1e-12) continue; // clamped region, zero slope
            acc.at(i) += g * inv_n * (pv - saved_y->at(i)) / (pv * (1.0 - pv));
        }
    });
}

Var Tape::bce_logits(Var logits, Tensor labels) {
    check_same_tape(logits);
    const Tensor& z = logits.val();
    if (!labels.same_shape(z)) throw InputError("bce_logits: label shape mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) loss += softplus(z.at(i)) - labels.at(i) * z.at(i);
    loss /= static_cast<double>(z.size());
    const std::uint32_t iz = logits.id;
    auto saved_y = std::make_shared<Tensor>(std::move(labels));
    return push(Tensor::scalar(loss), needs(logits), [iz, saved_y](Tape& t, std::uint32_t self) {
        const double g = t.node(self).grad(0, 0);
        const Tensor& z = t.node(iz).value;
        Tensor& acc = t.grad_buf(iz);
        const double inv_n = 1.0 / static_cast<double>(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            acc.at(i) += g * inv_n * (stable_sigmoid(z.at(i)) - saved_y->at(i));
    });
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> idx) {
    check_same_tape(a);
    const Tensor& av = a.val();
    Tensor out({idx.size(), av.cols()});
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= av.rows()) throw InputError("gather_rows: index out of range");
        for (std::size_t j = 0; j < av.cols(); ++j) out(k, j) = av(idx[k], j);
    }
    const std::uint32_t ia = a.id;
    auto saved_idx = std::make_shared<std::vector<std::size_t>>(std::move(idx));
    return push(std::move(out), needs(a), [ia, saved_idx](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t k = 0; k < saved_idx->size(); ++k)
            for (std::size_t j = 0; j < g.cols(); ++j) acc((*saved_idx)[k], j) += g(k, j);
    });
}

Var Tape::scatter_pairs(Var values, std::vector<std::pair<std::size_t, std::size_t>> coords,
                        std::size_t n, bool symmetric) {
    check_same_tape(values);
    const Tensor& v = values.val();
    if (v.cols() != 1 || v.rows() != coords.size())
        throw InputError("scatter_pairs: values must be m x 1 with one row per coordinate");
    Tensor out({n, n});
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const auto [i, j] = coords[k];
        if (i >= n || j >= n) throw InputError("scatter_pairs: coordinate out of range");
        out(i, j) += v(k, 0);
        if (symmetric && i != j) out(j, i) += v(k, 0);
    }
    const std::uint32_t iv = values.id;
    auto saved = std::make_shared<std::vector<std::pair<std::size_t, std::size_t>>>(std::move(coords));
    return push(std::move(out), needs(values), [iv, saved, symmetric](Tape& t, std::uint32_t self) {
        const Tensor& g = t.node(self).grad;
        Tensor& acc = t.grad_buf(iv);
        for (std::size_t k = 0; k < saved->size(); ++k) {
            const auto [i, j] = (*saved)[k];
            acc(k, 0) += g(i, j);
            if (symmetric && i != j) acc(k, 0) += g(j, i);
        }
    });
}

Var Tape::sum(Var a) {
    check_same_tape(a);
    const std::uint32_t ia = a.id;
    return push(Tensor::scalar(a.val().sum()), needs(a), [ia](Tape& t, std::uint32_t self) {
        const double g = t.node(self).grad(0, 0);
        Tensor& acc = t.grad_buf(ia);
        for (std::size_t i = 0; i < acc.size(); ++i) acc.at(i) += g;
    });
}

void Tape::backward(Var loss) {
    check_same_tape(loss);
    if (loss.val().size() != 1) throw InputError("backward: loss must be scalar");
    if (!loss.val().all_finite()) throw NumericError("backward: loss is not finite");
    grad_buf(loss.id).at(0) = 1.0;
    for (std::uint32_t i = static_cast<std::uint32_t>(nodes_.size()); i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.needs_grad || n.grad.empty()) continue;
        if (n.pull) n.pull(*this, i);
        if (n.sink_store) {
            Tensor& dst = n.sink_store->grad(n.sink_id);
            for (std::size_t k = 0; k < dst.size(); ++k) dst.at(k) += n.grad.at(k);
        }
    }
    reset();
}

void Tape::reset() { nodes_.clear(); }

} // namespace ontograph
