#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "locc/errors.hpp"

namespace locc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Absolute zero-test tolerance; all catalog amplitudes have magnitude 1,
// so the smallest true nonzero quantity in scope is far above this.
inline constexpr double kDefaultTol = 1e-9;

// Relative threshold separating true Schmidt coefficients from noise.
inline constexpr double kSchmidtRelTol = 1e-8;

// A post-measurement state is eliminated when its squared norm drops below
// this fraction of the input squared norm.
inline constexpr double kEliminationRelTol = 1e-12;

// Cap on the total dimension produced by tensor products.
inline constexpr long kDimensionCap = 1L << 16;

// Primitive cubic root of unity used wherever the catalog needs one.
inline Complex omega() {
    return std::polar(1.0, 2.0 * M_PI / 3.0);
}

inline bool all_finite(const Matrix& m) {
    return m.allFinite();
}

// Ordered tensor factors, each assigned to a party. Factors belonging to one
// party must be contiguous so that local operators lift as I (x) M (x) I.
struct DimensionSignature {
    std::vector<int> dims;                  // one entry per tensor factor
    std::vector<std::string> parties;       // party label per factor
    std::vector<std::string> factor_names;  // optional; defaults to party label

    DimensionSignature() = default;
    DimensionSignature(std::vector<int> d, std::vector<std::string> p,
                       std::vector<std::string> names = {})
        : dims(std::move(d)), parties(std::move(p)), factor_names(std::move(names)) {
        validate();
    }

    void validate() const {
        if (dims.empty() || dims.size() != parties.size())
            throw SignatureError("signature: dims/parties size mismatch");
        if (!factor_names.empty() && factor_names.size() != dims.size())
            throw SignatureError("signature: factor_names size mismatch");
        for (int d : dims)
            if (d < 2) throw SignatureError("signature: factor dimension must be >= 2");
        // contiguity of each party's factors
        std::set<std::string> seen;
        for (std::size_t k = 0; k < parties.size(); ++k) {
            if (k > 0 && parties[k] != parties[k - 1] && seen.count(parties[k]))
                throw SignatureError("signature: party factors must be contiguous");
            seen.insert(parties[k]);
        }
    }

    long total_dim() const {
        long t = 1;
        for (int d : dims) {
            t *= d;
            if (t > kDimensionCap) throw DimensionLimitError("signature exceeds dimension cap");
        }
        return t;
    }

    std::size_t factor_count() const { return dims.size(); }

    std::string factor_name(std::size_t k) const {
        if (!factor_names.empty()) return factor_names[k];
        // default: party label, suffixed when a party has several factors
        int count = 0, index = 0;
        for (std::size_t j = 0; j < parties.size(); ++j) {
            if (parties[j] == parties[k]) {
                if (j < k) ++index;
                ++count;
            }
        }
        if (count == 1) return parties[k];
        return parties[k] + "." + std::to_string(index);
    }

    std::vector<std::string> party_order() const {
        std::vector<std::string> out;
        for (const auto& p : parties)
            if (out.empty() || out.back() != p) out.push_back(p);
        return out;
    }

    int party_dim(const std::string& party) const {
        int d = 1;
        bool found = false;
        for (std::size_t k = 0; k < parties.size(); ++k)
            if (parties[k] == party) {
                d *= dims[k];
                found = true;
            }
        if (!found) throw SignatureError("unknown party: " + party);
        return d;
    }

    // [first, last) factor range of a party's contiguous block
    std::pair<std::size_t, std::size_t> party_span(const std::string& party) const {
        std::size_t first = parties.size(), last = 0;
        for (std::size_t k = 0; k < parties.size(); ++k)
            if (parties[k] == party) {
                first = std::min(first, k);
                last = k + 1;
            }
        if (first >= last) throw SignatureError("unknown party: " + party);
        return {first, last};
    }

    bool operator==(const DimensionSignature& o) const {
        return dims == o.dims && parties == o.parties;
    }
};

// Kronecker product, with the configured cap on the resulting dimension.
inline Matrix tensor_product(const Matrix& a, const Matrix& b, long cap = kDimensionCap) {
    long rows = static_cast<long>(a.rows()) * b.rows();
    long cols = static_cast<long>(a.cols()) * b.cols();
    if (rows > cap || cols > cap)
        throw DimensionLimitError("tensor_product exceeds dimension cap");
    Matrix out(rows, cols);
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix identity(long d) {
    return Matrix::Identity(d, d);
}

namespace detail {

inline std::vector<long> strides(const std::vector<int>& dims) {
    std::vector<long> s(dims.size());
    long acc = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        s[k] = acc;
        acc *= dims[k];
    }
    return s;
}

}  // namespace detail

// Reorders tensor factors of a state vector: position k of the result holds
// the factor that was at order[k].
inline Vector permute_factors(const Vector& psi, const std::vector<int>& dims,
                              const std::vector<std::size_t>& order) {
    if (order.size() != dims.size())
        throw SignatureError("permute_factors: order size mismatch");
    std::vector<int> new_dims(dims.size());
    for (std::size_t k = 0; k < order.size(); ++k) new_dims[k] = dims[order[k]];
    auto src_strides = detail::strides(dims);
    auto dst_strides = detail::strides(new_dims);
    long total = 1;
    for (int d : dims) total *= d;
    if (psi.size() != total) throw SignatureError("permute_factors: vector size mismatch");
    Vector out(total);
    std::vector<int> digit(dims.size());
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            digit[k] = static_cast<int>(rem / src_strides[k]);
            rem %= src_strides[k];
        }
        long dst = 0;
        for (std::size_t k = 0; k < order.size(); ++k) dst += digit[order[k]] * dst_strides[k];
        out(dst) = psi(idx);
    }
    return out;
}

// Partial trace of a density operator over the factors NOT in `keep`.
inline Matrix partial_trace(const Matrix& rho, const DimensionSignature& sig,
                            const std::set<std::size_t>& keep) {
    long total = sig.total_dim();
    if (rho.rows() != total || rho.cols() != total)
        throw SignatureError("partial_trace: operator shape does not match signature");
    if (keep.empty() || keep.size() >= sig.factor_count())
        throw SignatureError("partial_trace: keep must be a nonempty proper subset");
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < sig.factor_count(); ++k)
        if (!keep.count(k)) traced.push_back(k);

    auto st = detail::strides(sig.dims);
    long dim_keep = 1, dim_tr = 1;
    for (auto k : kept) dim_keep *= sig.dims[k];
    for (auto k : traced) dim_tr *= sig.dims[k];

    auto compose = [&](const std::vector<std::size_t>& which, long multi) {
        long idx = 0;
        for (std::size_t pos = which.size(); pos-- > 0;) {
            idx += (multi % sig.dims[which[pos]]) * st[which[pos]];
            multi /= sig.dims[which[pos]];
        }
        return idx;
    };

    Matrix out = Matrix::Zero(dim_keep, dim_keep);
    for (long i = 0; i < dim_keep; ++i)
        for (long j = 0; j < dim_keep; ++j) {
            long bi = compose(kept, i), bj = compose(kept, j);
            Complex acc = 0.0;
            for (long t = 0; t < dim_tr; ++t) {
                long bt = compose(traced, t);
                acc += rho(bi + bt, bj + bt);
            }
            out(i, j) = acc;
        }
    return out;
}

struct SchmidtResult {
    RealVector coefficients;  // nonincreasing, nonnegative
    Matrix left_vectors;      // columns, in the left cut space
    Matrix right_vectors;     // columns, in the right cut space
};

// Reshapes the (possibly unnormalized) state across the given bipartition of
// factors and returns its singular value decomposition.
inline SchmidtResult schmidt_decompose(const Vector& psi, const DimensionSignature& sig,
                                       const std::vector<std::size_t>& left_cut) {
    if (psi.size() != sig.total_dim())
        throw SignatureError("schmidt_decompose: vector size does not match signature");
    if (psi.norm() == 0.0) throw DegenerateInputError("schmidt_decompose: zero vector");
    if (left_cut.empty() || left_cut.size() >= sig.factor_count())
        throw SignatureError("schmidt_decompose: cut must split factors into two nonempty groups");

    std::vector<std::size_t> order(left_cut);
    for (std::size_t k = 0; k < sig.factor_count(); ++k)
        if (std::find(left_cut.begin(), left_cut.end(), k) == left_cut.end())
            order.push_back(k);
    Vector perm = permute_factors(psi, sig.dims, order);

    long dl = 1;
    for (auto k : left_cut) dl *= sig.dims[k];
    long dr = perm.size() / dl;
    Matrix amp = Eigen::Map<const Matrix>(perm.data(), dr, dl).transpose();  // row-major reshape

    Eigen::JacobiSVD<Matrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.singularValues(), svd.matrixU(), svd.matrixV().conjugate()};
}

inline int schmidt_rank(const RealVector& coeffs, double rel_tol = kSchmidtRelTol) {
    if (coeffs.size() == 0) return 0;
    double top = coeffs(0);
    int rank = 0;
    for (long k = 0; k < coeffs.size(); ++k)
        if (coeffs(k) > rel_tol * top) ++rank;
    return rank;
}

// Gram matrix of a family of equally sized vectors: G(i,j) = <v_i|v_j>.
inline Matrix gram_matrix(const std::vector<Vector>& states) {
    if (states.empty()) throw SignatureError("gram_matrix: empty family");
    long dim = states.front().size();
    Matrix g(states.size(), states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != dim) throw SignatureError("gram_matrix: dimension mismatch");
        for (std::size_t j = 0; j < states.size(); ++j)
            g(i, j) = states[i].dot(states[j]);  // Eigen dot conjugates the left argument
    }
    return g;
}

}  // namespace locc
