#include "ontograph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ontograph/errors.hpp"

namespace ontograph {

EigenResult sym_eigen(const Tensor& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw InputError("sym_eigen: matrix not square");
    Tensor m = a;
    Tensor v({n, n});
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double mpi = m(p, i), mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return m(i, i) < m(j, j); });

    EigenResult out;
    out.values.resize(n);
    out.vectors = Tensor({n, n});
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = m(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

Tensor laplacian_pe(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                    std::size_t k) {
    Tensor pe({n, std::max<std::size_t>(k, 1)});
    if (k == 0) return Tensor({n, 1}); // caller treats pe_dim 0 as "skip"
    Tensor lap({n, n});
    for (const auto& [u, w] : edges) {
        if (u == w || u >= n || w >= n) throw InputError("laplacian_pe: bad edge");
        if (lap(u, w) != 0.0) continue; // parallel edges collapse to one
        lap(u, w) = -1.0;
        lap(w, u) = -1.0;
        lap(u, u) += 1.0;
        lap(w, w) += 1.0;
    }
    const EigenResult eig = sym_eigen(lap);
    // Skip the trivial constant eigenvector (eigenvalue 0) and take the next
    // k, zero-padding when the graph has fewer than k non-trivial modes.
    const std::size_t avail = n > 0 ? n - 1 : 0;
    for (std::size_t col = 0; col < std::min(k, avail); ++col) {
        const std::size_t src = col + 1;
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::fabs(eig.vectors(i, src)) > std::fabs(eig.vectors(arg, src))) arg = i;
        const double sign = eig.vectors(arg, src) >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) pe(i, col) = sign * eig.vectors(i, src);
    }
    return pe;
}

} // namespace ontograph
