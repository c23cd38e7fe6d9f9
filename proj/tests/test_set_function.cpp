#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace mqopt;
using testsupport::bits;
using testsupport::worked_pair;

TEST_CASE("marginal gain") {
    SECTION("additive functions gain their weight anywhere") {
        const SetFunction f = make_additive({2.0, 5.0, -1.0});
        CHECK(marginal_gain(f, 1, bits(3, {})) == Catch::Approx(5.0));
        CHECK(marginal_gain(f, 1, bits(3, {0})) == Catch::Approx(5.0));
        CHECK(marginal_gain(f, 1, bits(3, {0, 2})) == Catch::Approx(5.0));
    }
    SECTION("worked pair, e=a on the empty set") {
        CHECK(marginal_gain(worked_pair(), 0, bits(2, {})) == Catch::Approx(3.0));
    }
    SECTION("normalized function: gain from empty equals the singleton value") {
        const SetFunction f = worked_pair();
        CHECK(marginal_gain(f, 1, bits(2, {})) == Catch::Approx(f(bits(2, {1}))));
    }
    SECTION("element already present is a precondition violation") {
        CHECK_THROWS_AS(marginal_gain(worked_pair(), 0, bits(2, {0})), ArgumentError);
    }
    SECTION("two oracle calls, fewer when memoized") {
        const SetFunction f = worked_pair().fresh();
        marginal_gain(f, 0, bits(2, {}));
        CHECK(f.call_count() == 2);
        marginal_gain(f, 1, bits(2, {}));  // f(empty) cached
        CHECK(f.call_count() == 3);
    }
}

TEST_CASE("memoization and call accounting") {
    std::size_t raw_evals = 0;
    const SetFunction f(3, [&raw_evals](const SubsetBitset& s) {
        ++raw_evals;
        return static_cast<double>(s.count());
    });
    const auto s = bits(3, {0, 2});
    CHECK(f(s) == 2.0);
    CHECK(f(s) == 2.0);
    CHECK(raw_evals == 1);
    CHECK(f.call_count() == 1);

    const SetFunction copy = f;  // copies share the cache
    CHECK(copy(s) == 2.0);
    CHECK(raw_evals == 1);

    const SetFunction fresh = f.fresh();
    CHECK(fresh.call_count() == 0);
    CHECK(fresh(s) == 2.0);
    CHECK(raw_evals == 2);
}

namespace {

SetFunction coverage_of_three() {
    // Sets over ground items {0,1,2,3}: e0 -> {0,1}, e1 -> {1,2}, e2 -> {3}.
    return SetFunction(3, [](const SubsetBitset& s) {
        bool item[4] = {};
        if (s.test(0)) item[0] = item[1] = true;
        if (s.test(1)) item[1] = item[2] = true;
        if (s.test(2)) item[3] = true;
        return static_cast<double>(item[0] + item[1] + item[2] + item[3]);
    });
}

}  // namespace

TEST_CASE("is_submodular") {
    SECTION("coverage functions are submodular") { CHECK(is_submodular(coverage_of_three(), GroundSet(3))); }
    SECTION("the worked pair is submodular") { CHECK(is_submodular(worked_pair(), GroundSet(2))); }
    SECTION("|S|^2 is not") {
        const SetFunction f(2, [](const SubsetBitset& s) {
            const double c = static_cast<double>(s.count());
            return c * c;
        });
        CHECK_FALSE(is_submodular(f, GroundSet(2)));
    }
    SECTION("size guard") {
        const SetFunction f(15, [](const SubsetBitset&) { return 0.0; });
        CHECK_THROWS_AS(is_submodular(f, GroundSet(15)), SizeGuardError);
    }
}

TEST_CASE("is_monotone") {
    CHECK(is_monotone(coverage_of_three(), GroundSet(3)));
    CHECK_FALSE(is_monotone(worked_pair(), GroundSet(2)));  // f({b}) < f(empty)
    const SetFunction f(15, [](const SubsetBitset&) { return 0.0; });
    CHECK_THROWS_AS(is_monotone(f, GroundSet(15)), SizeGuardError);
}

TEST_CASE("subset bitset basics") {
    SubsetBitset s(70);
    s.set(0);
    s.set(69);
    CHECK(s.count() == 2);
    CHECK(s.test(69));
    CHECK(s.with(5).count() == 3);
    CHECK(s.without(0).count() == 1);
    CHECK(s.to_ids() == std::vector<std::size_t>{0, 69});
    CHECK(s.is_subset_of(SubsetBitset::full(70)));
    CHECK_FALSE(SubsetBitset::full(70).is_subset_of(s));
    CHECK_THROWS_AS(s.test(70), ArgumentError);
    CHECK(SubsetBitset::from_mask(4, 0b1010).to_ids() == std::vector<std::size_t>{1, 3});
}

TEST_CASE("restricted ground sets keep the ambient width") {
    GroundSet u(5);
    SubsetBitset keep(5);
    keep.set(1);
    keep.set(4);
    const GroundSet view = u.restrict_to(keep);
    CHECK(view.size() == 2);
    CHECK(view.universe_size() == 5);
    CHECK(view.elements() == std::vector<std::size_t>{1, 4});
    CHECK_FALSE(view.is_full());
    CHECK(view.all() == keep);
}
