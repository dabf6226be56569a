#include <doctest.h>

#include "locc/locc.hpp"

using namespace locc;

namespace {

Vector sparse(long dim, const std::vector<std::pair<long, Complex>>& terms) {
    Vector v = Vector::Zero(dim);
    for (auto [i, c] : terms) v(i) = c;
    return v;
}

}  // namespace

TEST_CASE("projector measurement construction") {
    auto m = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    CHECK(m.outcome_count() == 2);
    CHECK(m.outcome_labels[0] == "P01");
    CHECK(m.outcome_labels[1] == "P23");
    CHECK(m.is_complete());
    Matrix p01 = Matrix::Zero(4, 4);
    p01(0, 0) = p01(1, 1) = 1.0;
    CHECK((m.operators[0] - p01).cwiseAbs().maxCoeff() == 0.0);

    auto m5 = projector_measurement("A", {{0, 2}, {1, 3, 4}}, 5);
    CHECK(m5.outcome_labels[0] == "P02");
    CHECK(m5.outcome_labels[1] == "P134");

    CHECK_THROWS_AS(projector_measurement("A", {{0, 1}, {1, 2}}, 3), PartitionError);
    CHECK_THROWS_AS(projector_measurement("A", {{0}, {2}}, 3), PartitionError);
    CHECK_THROWS_AS(projector_measurement("A", {{0}, {1, 5}}, 3), PartitionError);
}

TEST_CASE("basis measurement requires an orthonormal basis") {
    Matrix u(2, 2);
    u << 1, 1, 1, -1;
    CHECK_THROWS(basis_measurement("A", u));  // not normalized
    auto m = basis_measurement("A", u / std::sqrt(2.0));
    CHECK(m.outcome_count() == 2);
    CHECK(m.is_complete());
}

TEST_CASE("lift_operator places the operator on the right factor") {
    DimensionSignature sig({2, 4}, {"A", "B"});
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    Matrix lifted = lift_operator(x, sig, "A");
    CHECK((lifted - tensor_product(x, identity(4))).cwiseAbs().maxCoeff() < 1e-15);
    Matrix p = Matrix::Zero(4, 4);
    p(1, 1) = 1.0;
    CHECK((lift_operator(p, sig, "B") - tensor_product(identity(2), p)).cwiseAbs().maxCoeff() <
          1e-15);
}

TEST_CASE("branch states of the first catalog set under the pairing projector") {
    const auto& e = get("example1");
    auto m = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    auto branch = apply_outcome(e.state_set, m, 0);
    REQUIRE(branch.transformed_set.size() == 3);
    CHECK(branch.survival_flags == std::vector<bool>{true, true, true});
    // expected survivors: |00>+|11>, |00>-|11>, |01>-|10> over the flat index a*4+b
    CHECK((branch.transformed_set.states[0].amplitudes -
           sparse(8, {{0, 1.0}, {5, 1.0}}))
              .norm() < 1e-14);
    CHECK((branch.transformed_set.states[1].amplitudes -
           sparse(8, {{0, 1.0}, {5, -1.0}}))
              .norm() < 1e-14);
    CHECK((branch.transformed_set.states[2].amplitudes -
           sparse(8, {{1, 1.0}, {4, -1.0}}))
              .norm() < 1e-14);
}

TEST_CASE("branch states of the five-level set under the low projector") {
    const auto& e = get("example3");
    auto m = projector_measurement("A", {{0, 1}, {2, 3, 4}}, 5);
    auto branch = apply_outcome(e.state_set, m, 0);
    REQUIRE(branch.transformed_set.size() == 3);
    CHECK((branch.transformed_set.states[0].amplitudes - sparse(25, {{0, 1.0}, {6, 1.0}}))
              .norm() < 1e-14);
    CHECK((branch.transformed_set.states[1].amplitudes - sparse(25, {{0, 1.0}, {6, -1.0}}))
              .norm() < 1e-14);
    CHECK((branch.transformed_set.states[2].amplitudes - sparse(25, {{1, 1.0}})).norm() <
          1e-14);
}

TEST_CASE("apply_outcome rejects an all-eliminating outcome") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v(4);
    v << 1, 1, 0, 0;  // only Alice level 0 occupied
    StateSet s(sig, {MultipartiteState(sig, v, "s")});
    auto m = projector_measurement("A", {{0}, {1}}, 2);
    CHECK_THROWS_AS(apply_outcome(s, m, 1), EmptyBranchError);
}

TEST_CASE("oplm checks on the first catalog set") {
    const auto& s = get("example1").state_set;

    auto pairing = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    auto rep = is_oplm(s, pairing);
    CHECK(rep.oplm);
    CHECK(rep.nontrivial);

    // fine-grained computational readout collapses two inputs onto the same
    // Alice residue, so it is not orthogonality preserving here
    auto computational = projector_measurement("B", {{0}, {1}, {2}, {3}}, 4);
    CHECK_FALSE(is_oplm(s, computational).oplm);

    // mixing the first two levels breaks orthogonality of survivors
    Matrix u = identity(4);
    double r = 1.0 / std::sqrt(2.0);
    u(0, 0) = r;  u(1, 0) = r;
    u(0, 1) = r;  u(1, 1) = -r;
    auto mixed = basis_measurement("B", u);
    auto bad = is_oplm(s, mixed);
    CHECK_FALSE(bad.oplm);
}

TEST_CASE("trivial measurements are flagged") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v(4);
    v << 1, 0, 0, 1;
    StateSet s(sig, {MultipartiteState(sig, v, "s")});
    LocalMeasurement m;
    m.party = "A";
    m.local_dim = 2;
    m.operators = {identity(2) / std::sqrt(2.0), identity(2) / std::sqrt(2.0)};
    m.outcome_labels = {"a", "b"};
    m.validate();
    auto rep = is_oplm(s, m);
    CHECK(rep.oplm);
    CHECK_FALSE(rep.nontrivial);
}

TEST_CASE("outcome probabilities") {
    const auto& ex3 = get("example3").state_set;
    auto alice = projector_measurement("A", {{0, 2}, {1, 3, 4}}, 5);
    CHECK(outcome_probability(ex3.states[1], alice, 0) == doctest::Approx(2.0 / 5).epsilon(1e-12));
    CHECK(outcome_probability(ex3.states[1], alice, 1) == doctest::Approx(3.0 / 5).epsilon(1e-12));

    const auto& ex1 = get("example1").state_set;
    auto bob = projector_measurement("B", {{0, 1}, {2, 3}}, 4);
    CHECK(outcome_probability(ex1.states[0], bob, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(outcome_probability(ex1.states[0], bob, 1) == doctest::Approx(0.5).epsilon(1e-12));

    // probabilities over a complete measurement sum to one
    double total = 0.0;
    for (std::size_t k = 0; k < bob.outcome_count(); ++k)
        total += outcome_probability(ex1.states[2], bob, static_cast<int>(k));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
