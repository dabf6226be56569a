#include <doctest.h>

#include "locc/locc.hpp"

using namespace locc;

namespace {

StateSet bell_pair_set() {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v0(4), v1(4);
    v0 << 1, 0, 0, 1;
    v1 << 1, 0, 0, -1;
    return StateSet(sig, {MultipartiteState(sig, v0 / std::sqrt(2.0), "plus"),
                          MultipartiteState(sig, v1 / std::sqrt(2.0), "minus")});
}

// audit independent of the construction: conditional overlaps per basis ray
double conditional_overlap_audit(const WalgateResult& result, const MultipartiteState& psi0,
                                 const MultipartiteState& psi1, const std::string& party) {
    Matrix a0 = detail::party_amplitude_matrix(psi0, party);
    Matrix a1 = detail::party_amplitude_matrix(psi1, party);
    double worst = 0.0;
    for (const auto& u : result.basis) {
        Vector eta0 = a0.transpose() * u.conjugate();
        Vector eta1 = a1.transpose() * u.conjugate();
        worst = std::max(worst, std::abs(eta0.dot(eta1)));
    }
    return worst;
}

}  // namespace

TEST_CASE("tree validation") {
    ProtocolNode bad;
    bad.measurement = projector_measurement("A", {{0}, {1}}, 2);
    bad.children.push_back(declare_leaf("x"));
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    ProtocolNode empty_leaf;
    CHECK_THROWS_AS(empty_leaf.validate(), PreconditionError);
}

TEST_CASE("scripted protocols replay perfectly") {
    for (const auto& id : catalog_ids()) {
        const auto& e = get(id);
        REQUIRE(e.distinguishing_protocol.has_value());
        auto rep = simulate(*e.distinguishing_protocol, e.state_set);
        CHECK(rep.perfect);
        CHECK(rep.verdict_conflicts.empty());
        for (double p : rep.success) CHECK(p == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(verify_oplm_tree(*e.distinguishing_protocol, e.state_set));
    }
}

TEST_CASE("leaf-path probabilities sum to one per input") {
    for (const auto& id : catalog_ids()) {
        const auto& e = get(id);
        auto rep = simulate(*e.distinguishing_protocol, e.state_set);
        for (const auto& paths : rep.leaf_paths) {
            double total = 0.0;
            for (const auto& [path, p] : paths) total += p;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("simulate is invariant under permuting outcomes") {
    const auto& e = get("intro-redundant");
    ProtocolTree swapped = *e.distinguishing_protocol;
    auto& m = *swapped.root.measurement;
    std::swap(m.operators[0], m.operators[1]);
    std::swap(m.outcome_labels[0], m.outcome_labels[1]);
    std::swap(swapped.root.children[0], swapped.root.children[1]);
    auto rep = simulate(swapped, e.state_set);
    CHECK(rep.perfect);
}

TEST_CASE("declared leaf with two arrivals is a conflict, not an exception") {
    auto s = bell_pair_set();
    ProtocolTree t;
    t.root.measurement = projector_measurement("A", {{0}, {1}}, 2);
    t.root.children = {declare_leaf("plus"), declare_leaf("plus")};
    auto rep = simulate(t, s);
    CHECK_FALSE(rep.perfect);
    CHECK_FALSE(rep.verdict_conflicts.empty());
}

TEST_CASE("identity-only tree is orthogonality preserving") {
    const auto& e = get("example1");
    ProtocolTree t;
    LocalMeasurement id_m;
    id_m.party = "A";
    id_m.local_dim = 2;
    id_m.operators = {identity(2)};
    id_m.outcome_labels = {"id"};
    t.root.measurement = id_m;
    t.root.children = {terminal_leaf()};
    CHECK(verify_oplm_tree(t, e.state_set));
}

TEST_CASE("an orthogonality-breaking root is rejected by the tree verifier") {
    const auto& e = get("example1");
    Matrix u = identity(4);
    double r = 1.0 / std::sqrt(2.0);
    u(0, 0) = r;  u(1, 0) = r;
    u(0, 1) = r;  u(1, 1) = -r;
    ProtocolTree t;
    t.root.measurement = basis_measurement("B", u);
    t.root.children = {terminal_leaf(), terminal_leaf(), terminal_leaf(), terminal_leaf()};
    CHECK_FALSE(verify_oplm_tree(t, e.state_set));
}

TEST_CASE("two-state constructor on the Bell-like pair") {
    auto s = bell_pair_set();
    auto result = walgate_two_state(s.states[0], s.states[1], "A");
    CHECK(result.objective < 1e-14);
    // the balanced basis is the canonical solution; any valid basis must put
    // equal weight on both levels here
    for (const auto& u : result.basis)
        CHECK(std::abs(std::abs(u(0)) - std::abs(u(1))) < 1e-6);
    CHECK(conditional_overlap_audit(result, s.states[0], s.states[1], "A") < 1e-7);
    auto rep = simulate(result.tree, s);
    CHECK(rep.perfect);
}

TEST_CASE("two-state constructor on an already-distinguishable pair") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v0(4), v1(4);
    v0 << 1, 0, 0, 0;
    v1 << 0, 0, 0, 1;
    StateSet s(sig, {MultipartiteState(sig, v0, "s0"), MultipartiteState(sig, v1, "s1")});
    auto result = walgate_two_state(s.states[0], s.states[1], "A");
    CHECK(result.objective < 1e-14);
    CHECK(simulate(result.tree, s).perfect);
}

TEST_CASE("two-state constructor on the residual five-level pair") {
    DimensionSignature sig({5, 5}, {"A", "B"});
    Complex w = omega(), w2 = w * w;
    Vector v0 = Vector::Zero(25), v1 = Vector::Zero(25);
    v0(6) = 1.0;  v0(18) = 1.0;  v0(24) = 1.0;
    v1(6) = 1.0;  v1(18) = w;    v1(24) = w2;
    MultipartiteState s0(sig, v0, "r0"), s1(sig, v1, "r1");
    auto result = walgate_two_state(s0, s1, "A");
    CHECK(result.objective < 1e-14);
    CHECK(conditional_overlap_audit(result, s0, s1, "A") < 1e-7);
    StateSet s(sig, {s0, s1});
    auto rep = simulate(result.tree, s);
    CHECK(rep.perfect);
    CHECK(verify_oplm_tree(result.tree, s));
}

TEST_CASE("two-state constructor rejects non-orthogonal input") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v0(4), v1(4);
    v0 << 1, 0, 0, 1;
    v1 << 1, 0, 0, 0;
    CHECK_THROWS_AS(walgate_two_state(MultipartiteState(sig, v0), MultipartiteState(sig, v1),
                                      "A"),
                    PreconditionError);
}

TEST_CASE("two-state constructor on random pairs") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        int d = 2 + static_cast<int>(trial % 2);
        DimensionSignature sig({d, d}, {"A", "B"});
        Vector v0 = random_state(rng, d * d);
        Vector v1 = random_state(rng, d * d);
        v1 -= v0.dot(v1) / v0.squaredNorm() * v0;
        MultipartiteState s0(sig, v0, "s0"), s1(sig, v1, "s1");
        auto result = walgate_two_state(s0, s1, "A");
        CHECK(result.objective < 1e-14);
        CHECK(conditional_overlap_audit(result, s0, s1, "A") < 1e-7);
        auto rep = simulate(result.tree, StateSet(sig, {s0, s1}));
        CHECK(rep.perfect);
    }
}

TEST_CASE("three-party recursion in the two-state constructor") {
    DimensionSignature sig({2, 2, 2}, {"A", "B", "C"});
    Vector v0 = Vector::Zero(8), v1 = Vector::Zero(8);
    v0(0) = 1.0;  v0(7) = 1.0;   // |000> + |111>
    v1(0) = 1.0;  v1(7) = -1.0;  // |000> - |111>
    MultipartiteState s0(sig, v0, "ghz+"), s1(sig, v1, "ghz-");
    auto result = walgate_two_state(s0, s1, "A");
    StateSet s(sig, {s0, s1});
    CHECK(simulate(result.tree, s).perfect);
    CHECK(verify_oplm_tree(result.tree, s));
}
