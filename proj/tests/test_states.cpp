#include <doctest.h>

#include "locc/locc.hpp"

using namespace locc;

namespace {

MultipartiteState basis_ket(const DimensionSignature& sig, long idx, const std::string& l) {
    Vector v = Vector::Zero(sig.total_dim());
    v(idx) = 1.0;
    return MultipartiteState(sig, v, l);
}

}  // namespace

TEST_CASE("state construction guards") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector zero = Vector::Zero(4);
    CHECK_THROWS_AS(MultipartiteState(sig, zero), DegenerateInputError);
    Vector wrong(3);
    wrong << 1, 0, 0;
    CHECK_THROWS_AS(MultipartiteState(sig, wrong), SignatureError);
    Vector bad(4);
    bad << 1, std::numeric_limits<double>::quiet_NaN(), 0, 0;
    CHECK_THROWS_AS(MultipartiteState(sig, bad), SignatureError);
    DimensionSignature other({4}, {"A"});
    CHECK_THROWS_AS(StateSet(sig, {basis_ket(other, 0, "x")}), SignatureError);
    CHECK_THROWS_AS(StateSet(sig, {}), SignatureError);
}

TEST_CASE("orthogonality witness") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v0(4), v1(4);
    v0 << 1, 0, 0, 1;
    v1 << 1, 0, 0, 0;
    StateSet s(sig, {MultipartiteState(sig, v0, "a"), MultipartiteState(sig, v1, "b")});
    auto rep = is_orthogonal_set(s);
    CHECK_FALSE(rep.orthogonal);
    CHECK(rep.witness_i == 0);
    CHECK(rep.witness_j == 1);
    CHECK(std::abs(rep.witness_overlap - Complex(1.0)) < 1e-12);
}

TEST_CASE("catalog sets are orthogonal") {
    for (const auto& id : catalog_ids())
        CHECK(is_orthogonal_set(get(id).state_set).orthogonal);
}

TEST_CASE("product detection across a cut") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector bell(4), prod(4);
    bell << 1, 0, 0, 1;
    prod << 1, 1, 1, 1;  // |+>|+>
    CHECK_FALSE(is_product_across(MultipartiteState(sig, bell), {0}));
    CHECK(is_product_across(MultipartiteState(sig, prod), {0}));
}

TEST_CASE("intro set is locally redundant with both expected witnesses") {
    const auto& e = get("intro-redundant");
    auto rep = has_local_redundancy(e.state_set, *e.factorization);
    CHECK(rep.redundant);
    auto has_witness = [&](std::vector<std::string> want) {
        std::sort(want.begin(), want.end());
        for (auto w : rep.witness_discard_sets) {
            std::sort(w.begin(), w.end());
            if (w == want) return true;
        }
        return false;
    };
    CHECK(has_witness({"A'", "B'"}));
    CHECK(has_witness({"A", "B"}));
}

TEST_CASE("paired-register catalog sets are redundancy free") {
    for (const auto& id : {"example1", "example2"}) {
        const auto& e = get(id);
        CHECK_FALSE(has_local_redundancy(e.state_set, *e.factorization).redundant);
    }
}

TEST_CASE("prime-dimension sets admit only whole-party discards, none redundant") {
    for (const auto& id : {"example3", "example4"}) {
        const auto& e = get(id);
        auto rep = has_local_redundancy(e.state_set, FactorizationSpec{});
        CHECK_FALSE(rep.redundant);
    }
}

TEST_CASE("refine_signature") {
    DimensionSignature sig({2, 4}, {"A", "B"});
    FactorizationSpec f;
    f.splits["B"] = {2, 2};
    f.names["B"] = {"B", "B'"};
    auto fine = refine_signature(sig, f);
    CHECK(fine.dims == std::vector<int>{2, 2, 2});
    CHECK(fine.factor_name(2) == "B'");
    f.splits["B"] = {2, 3};
    CHECK_THROWS_AS(refine_signature(sig, f), SignatureError);
}

TEST_CASE("equivalent_up_to_scale") {
    DimensionSignature sig({2, 2}, {"A", "B"});
    Vector v(4);
    v << 1, 2, 0, Complex(0, 1);
    MultipartiteState a(sig, v, "a");
    MultipartiteState b(sig, Complex(0.3, -0.7) * v, "b");
    CHECK(equivalent_up_to_scale(a, b));
    Vector w(4);
    w << 1, 2, 1, Complex(0, 1);
    CHECK_FALSE(equivalent_up_to_scale(a, MultipartiteState(sig, w, "c")));
}
