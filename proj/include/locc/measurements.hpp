#pragma once

#include <set>
#include <string>
#include <vector>

#include "locc/states.hpp"

namespace locc {

// A complete measurement on one party's local space, in Kraus form. The
// catalog uses diagonal projectors only; general matrices are accepted for
// the search and property suites.
struct LocalMeasurement {
    std::string party;
    int local_dim = 0;
    std::vector<Matrix> operators;
    std::vector<std::string> outcome_labels;

    std::size_t outcome_count() const { return operators.size(); }

    bool is_complete(double tol = kDefaultTol) const {
        Matrix sum = Matrix::Zero(local_dim, local_dim);
        for (const auto& m : operators) sum += m.adjoint() * m;
        return (sum - identity(local_dim)).cwiseAbs().maxCoeff() < tol;
    }

    void validate(double tol = kDefaultTol) const {
        if (operators.empty()) throw PreconditionError("measurement: no operators");
        if (operators.size() != outcome_labels.size())
            throw PreconditionError("measurement: operator/label count mismatch");
        for (const auto& m : operators)
            if (m.rows() != local_dim || m.cols() != local_dim)
                throw SignatureError("measurement: operator shape mismatch");
        if (!is_complete(tol))
            throw PreconditionError("measurement: completeness violated");
    }
};

// Builds the projective measurement whose outcomes are the diagonal 0/1
// projectors onto the given basis-index sets (e.g. P_01, P_234).
inline LocalMeasurement projector_measurement(const std::string& party,
                                              const std::vector<std::set<int>>& index_sets,
                                              int local_dim) {
    std::set<int> covered;
    for (const auto& s : index_sets)
        for (int i : s) {
            if (i < 0 || i >= local_dim) throw PartitionError("projector index out of range");
            if (!covered.insert(i).second) throw PartitionError("overlapping projector index sets");
        }
    if (static_cast<int>(covered.size()) != local_dim)
        throw PartitionError("projector index sets do not cover the basis");

    LocalMeasurement m;
    m.party = party;
    m.local_dim = local_dim;
    for (const auto& s : index_sets) {
        Matrix p = Matrix::Zero(local_dim, local_dim);
        std::string label = "P";
        for (int i : s) {
            p(i, i) = 1.0;
            label += std::to_string(i);
        }
        m.operators.push_back(p);
        m.outcome_labels.push_back(label);
    }
    return m;
}

// Rank-1 projective measurement onto an orthonormal basis given as columns.
inline LocalMeasurement basis_measurement(const std::string& party, const Matrix& basis,
                                          std::vector<std::string> labels = {}) {
    LocalMeasurement m;
    m.party = party;
    m.local_dim = static_cast<int>(basis.rows());
    for (long k = 0; k < basis.cols(); ++k) {
        Vector v = basis.col(k);
        m.operators.push_back(v * v.adjoint());
        m.outcome_labels.push_back(labels.empty() ? "b" + std::to_string(k) : labels[k]);
    }
    m.validate();
    return m;
}

// Lifts a local operator to the full space: I (x) M (x) I per the signature.
inline Matrix lift_operator(const Matrix& op, const DimensionSignature& sig,
                            const std::string& party) {
    if (op.rows() != sig.party_dim(party))
        throw SignatureError("lift: operator does not match party dimension");
    auto [first, last] = sig.party_span(party);
    long pre = 1, post = 1;
    for (std::size_t k = 0; k < first; ++k) pre *= sig.dims[k];
    for (std::size_t k = last; k < sig.factor_count(); ++k) post *= sig.dims[k];
    return tensor_product(tensor_product(identity(pre), op), identity(post));
}

struct OutcomeBranch {
    LocalMeasurement measurement;
    int outcome_index = 0;
    StateSet transformed_set;           // surviving states only, order preserved
    std::vector<bool> survival_flags;   // one per input state
};

namespace detail {

// apply_outcome without the empty-branch error; empty result allowed.
inline OutcomeBranch apply_outcome_lenient(const StateSet& s, const LocalMeasurement& m, int k) {
    if (k < 0 || k >= static_cast<int>(m.outcome_count()))
        throw PreconditionError("apply_outcome: outcome index out of range");
    Matrix lifted = lift_operator(m.operators[k], s.sig, m.party);
    OutcomeBranch branch;
    branch.measurement = m;
    branch.outcome_index = k;
    std::vector<MultipartiteState> survivors;
    for (const auto& psi : s.states) {
        Vector image = lifted * psi.amplitudes;
        bool survives = image.squaredNorm() >= kEliminationRelTol * psi.squared_norm();
        branch.survival_flags.push_back(survives);
        if (survives) survivors.emplace_back(s.sig, image, psi.label);
    }
    if (!survivors.empty())
        branch.transformed_set = StateSet(s.sig, std::move(survivors),
                                          s.name + "/" + m.outcome_labels[k]);
    return branch;
}

}  // namespace detail

// S -> S'_mu: maps every state by the lifted outcome operator, dropping
// eliminated states while preserving order and labels.
inline OutcomeBranch apply_outcome(const StateSet& s, const LocalMeasurement& m, int k) {
    OutcomeBranch branch = detail::apply_outcome_lenient(s, m, k);
    bool any = false;
    for (bool f : branch.survival_flags) any = any || f;
    if (!any) throw EmptyBranchError("apply_outcome: every state eliminated");
    return branch;
}

struct OplmOutcomeVerdict {
    bool orthogonal = true;
    int witness_i = -1, witness_j = -1;  // indices into the input set
};

struct OplmReport {
    bool oplm = true;
    bool nontrivial = false;
    std::vector<OplmOutcomeVerdict> per_outcome;
};

// Orthogonality-preserving local measurement check: every outcome must leave
// the surviving transformed states pairwise orthogonal. Nontrivial when some
// operator is not a scalar multiple of the identity.
inline OplmReport is_oplm(const StateSet& s, const LocalMeasurement& m,
                          double tol = kDefaultTol) {
    OplmReport report;
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        Matrix lifted = lift_operator(m.operators[k], s.sig, m.party);
        std::vector<Vector> images;
        std::vector<int> origin;
        for (std::size_t i = 0; i < s.size(); ++i) {
            Vector v = lifted * s.states[i].amplitudes;
            if (v.squaredNorm() >= kEliminationRelTol * s.states[i].squared_norm()) {
                images.push_back(v);
                origin.push_back(static_cast<int>(i));
            }
        }
        OplmOutcomeVerdict verdict;
        for (std::size_t i = 0; i < images.size() && verdict.orthogonal; ++i)
            for (std::size_t j = i + 1; j < images.size(); ++j) {
                double overlap =
                    std::abs(images[i].dot(images[j])) / (images[i].norm() * images[j].norm());
                if (overlap >= tol) {
                    verdict = {false, origin[i], origin[j]};
                    break;
                }
            }
        report.oplm = report.oplm && verdict.orthogonal;
        report.per_outcome.push_back(verdict);
    }
    for (const auto& op : m.operators) {
        Matrix dev = op - (op.trace() / static_cast<double>(m.local_dim)) * identity(m.local_dim);
        if (dev.norm() >= tol) report.nontrivial = true;
    }
    return report;
}

// Born rule for a single outcome of a complete measurement.
inline double outcome_probability(const MultipartiteState& psi, const LocalMeasurement& m,
                                  int k) {
    if (k < 0 || k >= static_cast<int>(m.outcome_count()))
        throw PreconditionError("outcome_probability: outcome index out of range");
    Matrix lifted = lift_operator(m.operators[k], psi.sig, m.party);
    return (lifted * psi.amplitudes).squaredNorm() / psi.squared_norm();
}

}  // namespace locc
