#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "locc/classify.hpp"

namespace locc {

// A curated state set together with its scripted protocols and the claims
// the library is expected to verify about it.
struct CatalogEntry {
    std::string id;
    std::string title;
    StateSet state_set;
    std::optional<FactorizationSpec> factorization;
    std::optional<ProtocolTree> distinguishing_protocol;
    std::optional<LocalMeasurement> activating_measurement;
    std::vector<std::string> expected_claims;
};

namespace detail {

inline MultipartiteState sparse_state(const DimensionSignature& sig,
                                      const std::vector<std::pair<long, Complex>>& terms,
                                      const std::string& label) {
    Vector v = Vector::Zero(sig.total_dim());
    for (auto [idx, amp] : terms) v(idx) = amp;
    return MultipartiteState(sig, v, label);
}

// The shared second-round basis for the qubit-pair side of the first two
// catalog sets: {|0>+|2>, |0>-|2>, |1>-|3>, |1>+|3>} over a 4-dim factor.
inline Matrix paired_sum_difference_basis() {
    double r = 1.0 / std::sqrt(2.0);
    Matrix b = Matrix::Zero(4, 4);
    b(0, 0) = r;  b(2, 0) = r;
    b(0, 1) = r;  b(2, 1) = -r;
    b(1, 2) = r;  b(3, 2) = -r;
    b(1, 3) = r;  b(3, 3) = r;
    return b;
}

inline ProtocolNode walgate_subtree(const MultipartiteState& a, const MultipartiteState& b,
                                    const std::string& first_party) {
    return walgate_two_state(a, b, first_party).tree.root;
}

inline CatalogEntry make_intro_redundant() {
    DimensionSignature sig({4, 4}, {"A", "B"});
    // party index = 2*(coarse qubit) + (primed qubit)
    std::vector<MultipartiteState> states{
        sparse_state(sig, {{0, 1.0}, {10, 1.0}}, "psi1"),   // (|00>+|11>)_AB |00>'
        sparse_state(sig, {{1, 1.0}, {11, -1.0}}, "psi2"),  // (|00>-|11>)_AB |01>'
        sparse_state(sig, {{6, 1.0}, {12, 1.0}}, "psi3"),   // (|01>+|10>)_AB |10>'
        sparse_state(sig, {{7, 1.0}, {13, -1.0}}, "psi4"),  // (|01>-|10>)_AB |11>'
    };
    CatalogEntry e;
    e.id = "intro-redundant";
    e.title = "Bell pairs tagged by a product register (locally redundant)";
    e.state_set = StateSet(sig, states, e.id);
    FactorizationSpec f;
    f.splits = {{"A", {2, 2}}, {"B", {2, 2}}};
    f.names = {{"A", {"A", "A'"}}, {"B", {"B", "B'"}}};
    e.factorization = f;
    e.state_set.factorization = f;

    // both sides read their primed qubit; the tag identifies the state
    ProtocolNode root;
    root.measurement = projector_measurement("A", {{0, 2}, {1, 3}}, 4);
    for (int a = 0; a < 2; ++a) {
        ProtocolNode bob;
        bob.measurement = projector_measurement("B", {{0, 2}, {1, 3}}, 4);
        bob.children.push_back(declare_leaf(a == 0 ? "psi1" : "psi3"));
        bob.children.push_back(declare_leaf(a == 0 ? "psi2" : "psi4"));
        root.children.push_back(bob);
    }
    ProtocolTree t;
    t.root = root;
    e.distinguishing_protocol = t;
    e.expected_claims = {"orthogonal", "local-redundancy", "distinguishing-protocol"};
    return e;
}

inline CatalogEntry make_example1() {
    DimensionSignature sig({2, 4}, {"A", "B"});
    std::vector<MultipartiteState> states{
        sparse_state(sig, {{0, 1.0}, {2, 1.0}, {5, 1.0}, {7, -1.0}}, "psi1"),
        sparse_state(sig, {{0, 1.0}, {2, -1.0}, {5, -1.0}, {7, -1.0}}, "psi2"),
        sparse_state(sig, {{1, 1.0}, {6, -1.0}, {4, -1.0}, {3, -1.0}}, "psi3"),
    };
    CatalogEntry e;
    e.id = "example1";
    e.title = "Three orthogonal states on a qubit and a two-qubit register";
    e.state_set = StateSet(sig, states, e.id);
    FactorizationSpec f;
    f.splits = {{"B", {2, 2}}};
    f.names = {{"B", {"B", "B'"}}};
    e.factorization = f;
    e.state_set.factorization = f;

    ProtocolNode root;
    root.measurement = projector_measurement("A", {{0}, {1}}, 2);
    LocalMeasurement bob = basis_measurement("B", paired_sum_difference_basis());
    {
        ProtocolNode n;
        n.measurement = bob;
        n.children = {declare_leaf("psi1"), declare_leaf("psi2"), declare_leaf("psi3"),
                      terminal_leaf()};
        root.children.push_back(n);
    }
    {
        ProtocolNode n;
        n.measurement = bob;
        n.children = {declare_leaf("psi3"), terminal_leaf(), declare_leaf("psi1"),
                      declare_leaf("psi2")};
        root.children.push_back(n);
    }
    ProtocolTree t;
    t.root = root;
    e.distinguishing_protocol = t;
    e.activating_measurement = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    e.expected_claims = {"orthogonal", "no-local-redundancy", "distinguishing-protocol",
                         "activation"};
    return e;
}

inline CatalogEntry make_example2() {
    DimensionSignature sig({4, 4}, {"A", "B"});
    std::vector<MultipartiteState> states{
        sparse_state(sig, {{0, 1.0}, {2, 1.0}, {13, 1.0}, {15, -1.0}}, "psi1"),
        sparse_state(sig, {{0, 1.0}, {2, -1.0}, {13, -1.0}, {15, -1.0}}, "psi2"),
        sparse_state(sig, {{1, 1.0}, {14, -1.0}, {12, -1.0}, {3, -1.0}}, "psi3"),
        sparse_state(sig, {{4, 1.0}, {6, 1.0}, {9, 1.0}, {11, -1.0}}, "psi4"),
        sparse_state(sig, {{4, 1.0}, {6, -1.0}, {9, -1.0}, {11, -1.0}}, "psi5"),
        sparse_state(sig, {{5, 1.0}, {10, -1.0}, {8, -1.0}, {7, -1.0}}, "psi6"),
    };
    CatalogEntry e;
    e.id = "example2";
    e.title = "Six orthogonal states on two two-qubit registers";
    e.state_set = StateSet(sig, states, e.id);
    FactorizationSpec f;
    f.splits = {{"A", {2, 2}}, {"B", {2, 2}}};
    f.names = {{"A", {"A", "A'"}}, {"B", {"B", "B'"}}};
    e.factorization = f;
    e.state_set.factorization = f;

    // Alice splits {0,3} against {1,2}; each branch replays the example1
    // pattern on the matching pair of Alice levels.
    LocalMeasurement bob = basis_measurement("B", paired_sum_difference_basis());
    auto branch = [&](int lo, int hi, const std::string& s1, const std::string& s2,
                      const std::string& s3) {
        ProtocolNode n;
        std::set<int> rest;
        for (int k = 0; k < 4; ++k)
            if (k != lo && k != hi) rest.insert(k);
        n.measurement = projector_measurement("A", {{lo}, {hi}, rest}, 4);
        {
            ProtocolNode low;
            low.measurement = bob;
            low.children = {declare_leaf(s1), declare_leaf(s2), declare_leaf(s3),
                            terminal_leaf()};
            n.children.push_back(low);
        }
        {
            ProtocolNode high;
            high.measurement = bob;
            high.children = {declare_leaf(s3), terminal_leaf(), declare_leaf(s1),
                             declare_leaf(s2)};
            n.children.push_back(high);
        }
        n.children.push_back(terminal_leaf());
        return n;
    };
    ProtocolNode root;
    root.measurement = projector_measurement("A", {{0, 3}, {1, 2}}, 4);
    root.children.push_back(branch(0, 3, "psi1", "psi2", "psi3"));
    root.children.push_back(branch(1, 2, "psi4", "psi5", "psi6"));
    ProtocolTree t;
    t.root = root;
    e.distinguishing_protocol = t;
    e.activating_measurement = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    e.expected_claims = {"orthogonal", "no-local-redundancy", "distinguishing-protocol",
                         "activation"};
    return e;
}

inline CatalogEntry make_example3() {
    DimensionSignature sig({5, 5}, {"A", "B"});
    Complex w = omega(), w2 = w * w;
    std::vector<MultipartiteState> states{
        sparse_state(sig, {{0, 1.0}, {6, 1.0}, {12, 1.0}, {18, 1.0}, {24, 1.0}}, "phi1"),
        sparse_state(sig, {{0, 1.0}, {6, -1.0}, {12, -1.0}, {18, -w}, {24, -w2}}, "phi2"),
        sparse_state(sig, {{1, 1.0}, {13, 1.0}}, "phi3"),
    };
    CatalogEntry e;
    e.id = "example3";
    e.title = "Three orthogonal states on two five-level systems";
    e.state_set = StateSet(sig, states, e.id);

    ProtocolNode root;
    root.measurement = projector_measurement("A", {{0, 2}, {1, 3, 4}}, 5);
    {
        ProtocolNode bob;
        bob.measurement = projector_measurement("B", {{0, 2}, {1, 3, 4}}, 5);
        bob.children.push_back(walgate_subtree(
            sparse_state(sig, {{0, 1.0}, {12, 1.0}}, "phi1"),
            sparse_state(sig, {{0, 1.0}, {12, -1.0}}, "phi2"), "A"));
        bob.children.push_back(declare_leaf("phi3"));
        root.children.push_back(bob);
    }
    root.children.push_back(walgate_subtree(
        sparse_state(sig, {{6, 1.0}, {18, 1.0}, {24, 1.0}}, "phi1"),
        sparse_state(sig, {{6, -1.0}, {18, -w}, {24, -w2}}, "phi2"), "A"));
    ProtocolTree t;
    t.root = root;
    e.distinguishing_protocol = t;
    e.activating_measurement = projector_measurement("A", {{0, 1}, {2, 3, 4}}, 5);
    e.expected_claims = {"orthogonal", "no-local-redundancy", "distinguishing-protocol",
                         "activation"};
    return e;
}

inline CatalogEntry make_example4() {
    DimensionSignature sig({5, 5, 5}, {"A", "B", "C"});
    Complex w = omega(), w2 = w * w;
    std::vector<MultipartiteState> states{
        sparse_state(sig, {{0, 1.0}, {31, 1.0}, {62, 1.0}, {93, 1.0}, {124, 1.0}}, "phi1"),
        sparse_state(sig, {{0, 1.0}, {31, -1.0}, {62, -1.0}, {93, -w}, {124, -w2}}, "phi2"),
        sparse_state(sig, {{6, 1.0}, {68, 1.0}}, "phi3"),
    };
    CatalogEntry e;
    e.id = "example4";
    e.title = "Three-party analogue on three five-level systems";
    e.state_set = StateSet(sig, states, e.id);

    ProtocolNode root;
    root.measurement = projector_measurement("A", {{0, 2}, {1, 3, 4}}, 5);
    {
        ProtocolNode bob;
        bob.measurement = projector_measurement("B", {{0, 2}, {1, 3, 4}}, 5);
        bob.children.push_back(walgate_subtree(
            sparse_state(sig, {{0, 1.0}, {62, 1.0}}, "phi1"),
            sparse_state(sig, {{0, 1.0}, {62, -1.0}}, "phi2"), "A"));
        bob.children.push_back(declare_leaf("phi3"));
        root.children.push_back(bob);
    }
    root.children.push_back(walgate_subtree(
        sparse_state(sig, {{31, 1.0}, {93, 1.0}, {124, 1.0}}, "phi1"),
        sparse_state(sig, {{31, -1.0}, {93, -w}, {124, -w2}}, "phi2"), "A"));
    ProtocolTree t;
    t.root = root;
    e.distinguishing_protocol = t;
    e.activating_measurement = projector_measurement("A", {{0, 1}, {2, 3, 4}}, 5);
    e.expected_claims = {"orthogonal", "no-local-redundancy", "distinguishing-protocol",
                         "activation"};
    return e;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        v.push_back(detail::make_intro_redundant());
        v.push_back(detail::make_example1());
        v.push_back(detail::make_example2());
        v.push_back(detail::make_example3());
        v.push_back(detail::make_example4());
        return v;
    }();
    return entries;
}

inline std::vector<std::string> catalog_ids() {
    std::vector<std::string> ids;
    for (const auto& e : catalog()) ids.push_back(e.id);
    return ids;
}

inline const CatalogEntry& get(const std::string& id) {
    for (const auto& e : catalog())
        if (e.id == id) return e;
    throw NotFoundError("catalog: unknown id " + id);
}

struct ClaimResult {
    std::string entry_id;
    std::string claim;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline ClaimResult run_claim(const CatalogEntry& e, const std::string& claim,
                             const ClassifyOptions& opts) {
    ClaimResult r{e.id, claim, false, {}};
    if (claim == "orthogonal") {
        auto rep = is_orthogonal_set(e.state_set, opts.tol);
        r.pass = rep.orthogonal;
        if (!r.pass)
            r.detail = "overlapping pair " + std::to_string(rep.witness_i) + "," +
                       std::to_string(rep.witness_j);
    } else if (claim == "local-redundancy" || claim == "no-local-redundancy") {
        FactorizationSpec f = e.factorization.value_or(FactorizationSpec{});
        auto rep = has_local_redundancy(e.state_set, f, opts.tol);
        bool expect = (claim == "local-redundancy");
        r.pass = rep.redundant == expect;
        if (rep.redundant) {
            for (const auto& w : rep.witness_discard_sets) {
                r.detail += r.detail.empty() ? "discard{" : " discard{";
                for (std::size_t k = 0; k < w.size(); ++k)
                    r.detail += (k ? "," : "") + w[k];
                r.detail += "}";
            }
        }
    } else if (claim == "distinguishing-protocol") {
        if (!e.distinguishing_protocol) {
            r.detail = "no scripted protocol";
            return r;
        }
        auto rep = simulate(*e.distinguishing_protocol, e.state_set, opts.tol);
        bool oplm = verify_oplm_tree(*e.distinguishing_protocol, e.state_set, opts.tol);
        r.pass = rep.perfect && oplm;
        if (!rep.perfect) r.detail = "max error " + std::to_string(rep.max_error);
        if (!oplm) r.detail += " oplm check failed";
    } else if (claim == "activation") {
        if (!e.activating_measurement) {
            r.detail = "no activating measurement";
            return r;
        }
        auto rep = check_activation(e.state_set, *e.activating_measurement, opts);
        r.pass = rep.activating && rep.cardinality_preserved;
        if (r.pass) {
            for (const auto& v : rep.per_branch)
                if (!verify_verdict(rep.branches[&v - rep.per_branch.data()], v, opts.tol)) {
                    r.pass = false;
                    r.detail = "branch certificate replay failed";
                }
        } else {
            r.detail = rep.cardinality_preserved ? "branch distinguishable"
                                                 : "cardinality changed";
        }
    } else {
        r.detail = "unknown claim";
    }
    return r;
}

}  // namespace detail

inline std::vector<ClaimResult> verify_all(const ClassifyOptions& opts = {}) {
    std::vector<ClaimResult> results;
    for (const auto& e : catalog())
        for (const auto& claim : e.expected_claims)
            results.push_back(detail::run_claim(e, claim, opts));
    return results;
}

}  // namespace locc
