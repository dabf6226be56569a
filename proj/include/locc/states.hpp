#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locc/linalg.hpp"

namespace locc {

// A pure multipartite state, kept unnormalized exactly as constructed.
struct MultipartiteState {
    DimensionSignature sig;
    Vector amplitudes;
    std::string label;

    MultipartiteState() = default;
    MultipartiteState(DimensionSignature s, Vector a, std::string l = {})
        : sig(std::move(s)), amplitudes(std::move(a)), label(std::move(l)) {
        if (amplitudes.size() != sig.total_dim())
            throw SignatureError("state: amplitude count does not match signature");
        if (!all_finite(amplitudes)) throw SignatureError("state: non-finite amplitude");
        if (amplitudes.norm() == 0.0)
            throw DegenerateInputError("state: zero amplitude vector");
    }

    double squared_norm() const { return amplitudes.squaredNorm(); }
};

// Per-party splits of composite local dimensions into finer tensor factors.
struct FactorizationSpec {
    std::map<std::string, std::vector<int>> splits;        // party -> factor dims
    std::map<std::string, std::vector<std::string>> names; // optional factor names
};

struct StateSet {
    DimensionSignature sig;
    std::vector<MultipartiteState> states;
    std::string name;
    std::optional<FactorizationSpec> factorization;

    StateSet() = default;
    StateSet(DimensionSignature s, std::vector<MultipartiteState> st, std::string n = {})
        : sig(std::move(s)), states(std::move(st)), name(std::move(n)) {
        if (states.empty()) throw SignatureError("state set: empty");
        for (const auto& psi : states)
            if (!(psi.sig == sig)) throw SignatureError("state set: signature mismatch");
    }

    std::size_t size() const { return states.size(); }

    std::vector<Vector> vectors() const {
        std::vector<Vector> v;
        v.reserve(states.size());
        for (const auto& s : states) v.push_back(s.amplitudes);
        return v;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> v;
        for (const auto& s : states) v.push_back(s.label);
        return v;
    }
};

// Refines a signature by splitting each party's local dimension per the
// given factorization.
inline DimensionSignature refine_signature(const DimensionSignature& sig,
                                           const FactorizationSpec& f) {
    std::vector<int> dims;
    std::vector<std::string> parties;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < sig.factor_count(); ++k) {
        const std::string& p = sig.parties[k];
        auto it = f.splits.find(p);
        if (it == f.splits.end()) {
            dims.push_back(sig.dims[k]);
            parties.push_back(p);
            names.push_back(sig.factor_name(k));
            continue;
        }
        int prod = 1;
        for (int d : it->second) prod *= d;
        if (prod != sig.dims[k])
            throw SignatureError("factorization: split of " + p + " does not multiply to local dim");
        auto nit = f.names.find(p);
        for (std::size_t j = 0; j < it->second.size(); ++j) {
            dims.push_back(it->second[j]);
            parties.push_back(p);
            names.push_back(nit != f.names.end() ? nit->second.at(j)
                                                 : p + "." + std::to_string(j));
        }
    }
    return DimensionSignature(dims, parties, names);
}

struct OrthogonalityReport {
    bool orthogonal = true;
    int witness_i = -1, witness_j = -1;  // first offending pair, if any
    Complex witness_overlap = 0.0;
};

inline OrthogonalityReport is_orthogonal_set(const StateSet& s, double tol = kDefaultTol) {
    Matrix g = gram_matrix(s.vectors());
    for (long i = 0; i < g.rows(); ++i)
        for (long j = i + 1; j < g.cols(); ++j)
            if (std::abs(g(i, j)) >= tol)
                return {false, static_cast<int>(i), static_cast<int>(j), g(i, j)};
    return {};
}

inline bool is_product_across(const MultipartiteState& psi,
                              const std::vector<std::size_t>& left_cut) {
    auto schmidt = schmidt_decompose(psi.amplitudes, psi.sig, left_cut);
    return schmidt_rank(schmidt.coefficients) == 1;
}

struct RedundancyReport {
    bool redundant = false;
    // each witness is the list of discarded factor names
    std::vector<std::vector<std::string>> witness_discard_sets;
};

// Checks every nonempty proper discard subset of the (refined) factor list.
// A discard set witnesses redundancy when all reduced pairs have orthogonal
// supports, i.e. tr(rho_i rho_j) vanishes for trace-normalized reductions.
inline RedundancyReport has_local_redundancy(const StateSet& s, const FactorizationSpec& f,
                                             double tol = kDefaultTol) {
    DimensionSignature fine = refine_signature(s.sig, f);
    std::size_t m = fine.factor_count();

    std::vector<Matrix> rho;
    for (const auto& psi : s.states) {
        Vector v = psi.amplitudes / psi.amplitudes.norm();
        rho.push_back(v * v.adjoint());
    }

    RedundancyReport report;
    for (unsigned long mask = 1; mask + 1 < (1UL << m); ++mask) {
        std::set<std::size_t> keep;
        std::vector<std::string> discarded;
        for (std::size_t k = 0; k < m; ++k) {
            if (mask & (1UL << k))
                discarded.push_back(fine.factor_name(k));
            else
                keep.insert(k);
        }
        bool witness = true;
        std::vector<Matrix> reduced;
        for (const auto& r : rho) reduced.push_back(partial_trace(r, fine, keep));
        for (std::size_t i = 0; i < reduced.size() && witness; ++i)
            for (std::size_t j = i + 1; j < reduced.size() && witness; ++j)
                if (std::abs((reduced[i] * reduced[j]).trace()) >= tol) witness = false;
        if (witness) {
            report.redundant = true;
            report.witness_discard_sets.push_back(discarded);
        }
    }
    return report;
}

// True when a and b are the same ray: |<a|b>|^2 >= (1 - tol) <a|a><b|b>.
inline bool equivalent_up_to_scale(const MultipartiteState& a, const MultipartiteState& b,
                                   double tol = kDefaultTol) {
    if (!(a.sig == b.sig)) throw SignatureError("equivalent_up_to_scale: signature mismatch");
    double overlap = std::norm(a.amplitudes.dot(b.amplitudes));
    return overlap >= (1.0 - tol) * a.squared_norm() * b.squared_norm();
}

}  // namespace locc
