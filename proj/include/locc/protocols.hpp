#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "locc/measurements.hpp"
#include "locc/optim.hpp"

namespace locc {

// A rooted LOCC protocol: internal nodes carry a local measurement with one
// child per outcome; leaves either declare a state label or end at a
// terminal set (no declaration). Classical communication is implicit in the
// tree structure; any party may act at any node.
struct ProtocolNode {
    std::optional<LocalMeasurement> measurement;
    std::vector<ProtocolNode> children;
    std::optional<std::string> declare;
    bool terminal = false;

    bool is_leaf() const { return !measurement.has_value(); }

    void validate() const {
        if (is_leaf()) {
            if (!terminal && !declare)
                throw PreconditionError("protocol leaf: neither declare nor terminal");
            return;
        }
        if (children.size() != measurement->outcome_count())
            throw PreconditionError("protocol node: child count != outcome count");
        for (const auto& c : children) c.validate();
    }
};

struct ProtocolTree {
    ProtocolNode root;
};

inline ProtocolNode declare_leaf(std::string label) {
    ProtocolNode n;
    n.declare = std::move(label);
    return n;
}

inline ProtocolNode terminal_leaf() {
    ProtocolNode n;
    n.terminal = true;
    return n;
}

struct DiscriminationReport {
    std::vector<double> success;                       // per input state
    std::vector<std::map<std::string, double>> leaf_paths;  // per input: path -> prob
    bool perfect = false;
    double max_error = 1.0;
    std::vector<std::string> verdict_conflicts;        // declared leaves with >1 arrival
};

namespace detail {

inline void simulate_walk(const ProtocolNode& node, const DimensionSignature& sig,
                          const std::vector<Vector>& branch_states,
                          const std::vector<double>& input_norms,
                          const std::vector<std::string>& labels, const std::string& path,
                          double tol, DiscriminationReport& report) {
    if (node.is_leaf()) {
        std::vector<int> arrivals;
        for (std::size_t i = 0; i < branch_states.size(); ++i) {
            double p = branch_states[i].squaredNorm() / input_norms[i];
            if (p < tol) continue;
            report.leaf_paths[i][path] += p;
            arrivals.push_back(static_cast<int>(i));
            if (node.declare && *node.declare == labels[i]) report.success[i] += p;
        }
        if (node.declare && arrivals.size() > 1) {
            std::string msg = "leaf " + path + " declares " + *node.declare + " but inputs {";
            for (int i : arrivals) msg += labels[i] + " ";
            msg += "} arrive with positive probability";
            report.verdict_conflicts.push_back(msg);
        }
        return;
    }
    const LocalMeasurement& m = *node.measurement;
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        Matrix lifted = lift_operator(m.operators[k], sig, m.party);
        std::vector<Vector> next;
        next.reserve(branch_states.size());
        bool any = false;
        for (const auto& v : branch_states) {
            Vector w = lifted * v;
            any = any || w.squaredNorm() > 0.0;
            next.push_back(std::move(w));
        }
        if (!any) continue;  // zero-probability branch for every input
        simulate_walk(node.children[k], sig, next, input_norms, labels,
                      path + "/" + m.outcome_labels[k], tol, report);
    }
}

}  // namespace detail

// Exact analytic propagation of every input state down all branches with
// Born-rule weights; no sampling.
inline DiscriminationReport simulate(const ProtocolTree& tree, const StateSet& s,
                                     double tol = kDefaultTol) {
    tree.root.validate();
    DiscriminationReport report;
    report.success.assign(s.size(), 0.0);
    report.leaf_paths.assign(s.size(), {});
    std::vector<double> norms;
    for (const auto& psi : s.states) norms.push_back(psi.squared_norm());
    detail::simulate_walk(tree.root, s.sig, s.vectors(), norms, s.labels(), "", tol, report);
    report.max_error = 0.0;
    for (double p : report.success) report.max_error = std::max(report.max_error, 1.0 - p);
    report.perfect = report.max_error <= tol && report.verdict_conflicts.empty();
    return report;
}

namespace detail {

inline bool verify_oplm_walk(const ProtocolNode& node, const StateSet& surviving, double tol) {
    if (node.is_leaf()) return true;
    if (!is_oplm(surviving, *node.measurement, tol).oplm) return false;
    for (std::size_t k = 0; k < node.measurement->outcome_count(); ++k) {
        OutcomeBranch branch = apply_outcome_lenient(surviving, *node.measurement,
                                                     static_cast<int>(k));
        if (branch.transformed_set.states.empty()) continue;
        if (!verify_oplm_walk(node.children[k], branch.transformed_set, tol)) return false;
    }
    return true;
}

}  // namespace detail

// True iff every node's measurement preserves orthogonality of the set that
// survives to that node.
inline bool verify_oplm_tree(const ProtocolTree& tree, const StateSet& s,
                             double tol = kDefaultTol) {
    tree.root.validate();
    return detail::verify_oplm_walk(tree.root, s, tol);
}

struct WalgateOptions {
    int restarts = 8;
    int max_sweeps = 400;
    std::uint64_t seed = 0;
    double objective_threshold = 1e-14;
};

struct WalgateResult {
    std::vector<Vector> basis;  // first party's measurement basis
    ProtocolTree tree;
    double objective = 0.0;     // residual sum of squared conditional overlaps
};

namespace detail {

// Amplitudes of psi as a (party dim) x (rest dim) matrix, with the chosen
// party's factors brought to the front.
inline Matrix party_amplitude_matrix(const MultipartiteState& psi, const std::string& party) {
    auto [first, last] = psi.sig.party_span(party);
    std::vector<std::size_t> order;
    for (std::size_t k = first; k < last; ++k) order.push_back(k);
    for (std::size_t k = 0; k < psi.sig.factor_count(); ++k)
        if (k < first || k >= last) order.push_back(k);
    Vector perm = permute_factors(psi.amplitudes, psi.sig.dims, order);
    long dp = psi.sig.party_dim(party);
    long dr = perm.size() / dp;
    return Eigen::Map<const Matrix>(perm.data(), dr, dp).transpose();
}

// Signature with one party removed (remaining factors keep their order).
inline DimensionSignature drop_party(const DimensionSignature& sig, const std::string& party) {
    std::vector<int> dims;
    std::vector<std::string> parties, names;
    for (std::size_t k = 0; k < sig.factor_count(); ++k)
        if (sig.parties[k] != party) {
            dims.push_back(sig.dims[k]);
            parties.push_back(sig.parties[k]);
            names.push_back(sig.factor_name(k));
        }
    return DimensionSignature(dims, parties, names);
}

}  // namespace detail

inline WalgateResult walgate_two_state(const MultipartiteState& psi0,
                                       const MultipartiteState& psi1,
                                       const std::string& first_party,
                                       const WalgateOptions& opts = {});

namespace detail {

// Protocol finishing a two-state discrimination on a remaining space: a
// single party measures the two stored orthogonal vectors directly, more
// parties recurse through walgate_two_state.
inline ProtocolNode finish_two_state(const DimensionSignature& rest_sig, const Vector& eta0,
                                     const Vector& eta1, const std::string& label0,
                                     const std::string& label1, const WalgateOptions& opts) {
    auto parties = rest_sig.party_order();
    if (parties.size() == 1) {
        long d = rest_sig.total_dim();
        Vector v0 = eta0 / eta0.norm();
        // Gram-Schmidt keeps the projectors exactly complete even when the
        // conditional pair is orthogonal only to within the search threshold.
        Vector v1 = eta1 - v0.dot(eta1) * v0;
        v1 /= v1.norm();
        LocalMeasurement m;
        m.party = parties[0];
        m.local_dim = static_cast<int>(d);
        m.operators = {v0 * v0.adjoint(), v1 * v1.adjoint()};
        m.outcome_labels = {"hit0", "hit1"};
        ProtocolNode node;
        node.children = {declare_leaf(label0), declare_leaf(label1)};
        if (d > 2) {
            m.operators.push_back(identity(d) - m.operators[0] - m.operators[1]);
            m.outcome_labels.push_back("rest");
            node.children.push_back(terminal_leaf());
        }
        m.validate();
        node.measurement = m;
        return node;
    }
    // the conditional pair is orthogonal only to within the search
    // threshold; project the residual out before recursing
    Vector adjusted = eta1 - (eta0.dot(eta1) / eta0.squaredNorm()) * eta0;
    MultipartiteState s0(rest_sig, eta0, label0);
    MultipartiteState s1(rest_sig, adjusted, label1);
    return walgate_two_state(s0, s1, parties.front(), opts).tree.root;
}

}  // namespace detail

// Constructive realization of the two-orthogonal-states discrimination
// result: finds a first-party basis whose conditional states stay orthogonal
// on the remaining parties, then recurses party by party (ascending label
// order). The basis search drives the diagonal of the conditional-overlap
// matrix to zero; multi-start with deterministic seeds.
inline WalgateResult walgate_two_state(const MultipartiteState& psi0,
                                       const MultipartiteState& psi1,
                                       const std::string& first_party,
                                       const WalgateOptions& opts) {
    if (!(psi0.sig == psi1.sig)) throw SignatureError("walgate: signature mismatch");
    Vector n0 = psi0.amplitudes / psi0.amplitudes.norm();
    Vector n1 = psi1.amplitudes / psi1.amplitudes.norm();
    if (std::abs(n0.dot(n1)) >= kDefaultTol)
        throw PreconditionError("walgate: states are not orthogonal");

    MultipartiteState u0(psi0.sig, n0, psi0.label);
    MultipartiteState u1(psi1.sig, n1, psi1.label);
    Matrix a0 = detail::party_amplitude_matrix(u0, first_party);
    Matrix a1 = detail::party_amplitude_matrix(u1, first_party);
    // <eta0(u)|eta1(u)> = u^dag (a1 a0^dag) u, so zero this diagonal
    Matrix c = a1 * a0.adjoint();

    int d = static_cast<int>(c.rows());
    Matrix best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < opts.restarts; ++attempt) {
        Rng rng(opts.seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL + 1);
        // drive the sweep well below the acceptance threshold so conditional
        // overlaps are negligible after renormalization downstream
        Matrix u = zero_diagonal_basis(c, rng, std::min(opts.objective_threshold, 1e-30),
                                       opts.max_sweeps);
        double obj = 0.0;
        for (int k = 0; k < d; ++k) obj += std::norm(Complex(u.col(k).adjoint() * c * u.col(k)));
        if (obj < best_obj) {
            best_obj = obj;
            best = u;
        }
        if (best_obj < opts.objective_threshold) break;
    }
    if (best_obj >= opts.objective_threshold)
        throw SearchBudgetError("walgate: basis search did not reach the objective threshold");

    WalgateResult result;
    result.objective = best_obj;
    LocalMeasurement m;
    m.party = first_party;
    m.local_dim = d;
    for (int k = 0; k < d; ++k) {
        Vector u = best.col(k);
        result.basis.push_back(u);
        m.operators.push_back(u * u.adjoint());
        m.outcome_labels.push_back("a" + std::to_string(k));
    }
    m.validate();

    DimensionSignature rest_sig = detail::drop_party(psi0.sig, first_party);
    ProtocolNode root;
    root.measurement = m;
    for (int k = 0; k < d; ++k) {
        Vector u = best.col(k);
        Vector eta0 = a0.transpose() * u.conjugate();
        Vector eta1 = a1.transpose() * u.conjugate();
        bool alive0 = eta0.squaredNorm() >= kEliminationRelTol;
        bool alive1 = eta1.squaredNorm() >= kEliminationRelTol;
        if (!alive0 && !alive1)
            root.children.push_back(terminal_leaf());
        else if (!alive1)
            root.children.push_back(declare_leaf(psi0.label));
        else if (!alive0)
            root.children.push_back(declare_leaf(psi1.label));
        else
            root.children.push_back(
                detail::finish_two_state(rest_sig, eta0, eta1, psi0.label, psi1.label, opts));
    }
    result.tree.root = std::move(root);
    return result;
}

}  // namespace locc
