#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace mqopt;
using testsupport::all_subsets;
using testsupport::bits;
using testsupport::worked_pair;

TEST_CASE("canonical decomposition of an additive function") {
    // cost[e] = f(U\{e}) - f(U) = -w_e, so the monotone part vanishes.
    const GroundSet u(3);
    const SetFunction f = make_additive({2.0, -1.0, 0.5});
    const Decomposition d = canonical_decomposition(f, u);
    CHECK(d.cost_weights()[0] == Catch::Approx(-2.0));
    CHECK(d.cost_weights()[1] == Catch::Approx(1.0));
    CHECK(d.cost_weights()[2] == Catch::Approx(-0.5));
    for (const auto& s : all_subsets(u)) CHECK(d.monotone_part()(s) == Catch::Approx(0.0).margin(kTol));
}

TEST_CASE("canonical decomposition of the worked pair") {
    const GroundSet u(2);
    const Decomposition d = canonical_decomposition(worked_pair(), u);
    CHECK(d.cost_weights()[0] == Catch::Approx(-2.0));
    CHECK(d.cost_weights()[1] == Catch::Approx(2.0));
    CHECK(d.monotone_part()(bits(2, {})) == Catch::Approx(0.0));
    CHECK(d.monotone_part()(bits(2, {0})) == Catch::Approx(1.0));
    CHECK(d.monotone_part()(bits(2, {1})) == Catch::Approx(1.0));
    CHECK(d.monotone_part()(bits(2, {0, 1})) == Catch::Approx(1.0));
    CHECK(is_monotone(d.monotone_part(), u));
    CHECK(is_submodular(d.monotone_part(), u));
}

TEST_CASE("canonical decomposition edge cases") {
    SECTION("empty universe") {
        const GroundSet u(0);
        const SetFunction f(0, [](const SubsetBitset&) { return 0.0; });
        const Decomposition d = canonical_decomposition(f, u);
        CHECK(d.universe_size() == 0);
    }
    SECTION("unnormalized functions are rejected") {
        const SetFunction f(2, [](const SubsetBitset&) { return 1.0; });
        CHECK_THROWS_AS(canonical_decomposition(f, GroundSet(2)), NormalizationError);
    }
}

TEST_CASE("decomposition identity, monotonicity, submodularity on random instances") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const std::size_t n = 2 + seed % 9;  // up to 10
        const GroundSet u(n);
        const SetFunction f = gen_random_submodular(n, seed).function();
        const Decomposition d = canonical_decomposition(f, u);
        for (const auto& s : all_subsets(u)) {
            CHECK(f(s) == Catch::Approx(d.monotone_part()(s) - d.cost(s)).margin(kTol));
        }
        CHECK(is_monotone(d.monotone_part(), u));
        CHECK(is_submodular(d.monotone_part(), u));
    }
}

TEST_CASE("canonical decomposition call accounting is n+1") {
    const std::size_t n = 7;
    const GroundSet u(n);
    const SetFunction f = gen_random_submodular(n, 99).function().fresh();
    f(SubsetBitset(n));  // normalization baseline, cached up front
    const std::size_t before = f.call_count();
    canonical_decomposition(f, u);
    CHECK(f.call_count() - before == n + 1);
}

TEST_CASE("improve_decomposition") {
    SECTION("fixed point on the canonical decomposition") {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            const std::size_t n = 2 + seed;
            const GroundSet u(n);
            const SetFunction f = gen_random_submodular(n, seed).function();
            const Decomposition canon = canonical_decomposition(f, u);
            const Decomposition improved = improve_decomposition(canon, u);
            for (std::size_t e = 0; e < n; ++e)
                CHECK(improved.cost_weights()[e] == Catch::Approx(canon.cost_weights()[e]).margin(kTol));
            for (const auto& s : all_subsets(u))
                CHECK(improved.monotone_part()(s) == Catch::Approx(canon.monotone_part()(s)).margin(kTol));
        }
    }
    SECTION("additive monotone part collapses to zero") {
        const std::vector<double> w{1.0, 2.0, 3.0};
        const Decomposition d(make_additive(w), {5.0, 5.0, 5.0});
        const GroundSet u(3);
        const Decomposition improved = improve_decomposition(d, u);
        for (std::size_t e = 0; e < 3; ++e)
            CHECK(improved.cost_weights()[e] == Catch::Approx(5.0 - w[e]));
        for (const auto& s : all_subsets(u))
            CHECK(improved.monotone_part()(s) == Catch::Approx(0.0).margin(kTol));
    }
    SECTION("keeps representing the same f, stays monotone") {
        for (std::uint64_t seed = 20; seed <= 26; ++seed) {
            const std::size_t n = 2 + seed % 5;
            const GroundSet u(n);
            const Decomposition d = gen_random_submodular(n, seed);  // generator's own decomposition
            const Decomposition improved = improve_decomposition(d, u);
            for (const auto& s : all_subsets(u))
                CHECK(improved.monotone_part()(s) - improved.cost(s) == Catch::Approx(d.value(s)).margin(kTol));
            CHECK(is_monotone(improved.monotone_part(), u));
        }
    }
    SECTION("improving the decomposition cannot worsen the guarantee") {
        for (std::uint64_t seed = 30; seed <= 45; ++seed) {
            const std::size_t n = 3 + seed % 6;
            const GroundSet u(n);
            const Decomposition d = gen_random_submodular(n, seed);
            const Decomposition improved = improve_decomposition(d, u);
            const SolverResult opt = exhaustive_max(d.function(), u);
            if (!(opt.objective > kTol)) continue;
            const double c_before = d.cost(opt.chosen);
            const double c_after = improved.cost(opt.chosen);
            if (!(c_before > kTol)) continue;
            const double factor_before = approx_bound(opt.objective, c_before).factor;
            const double factor_after =
                c_after <= 0.0 ? 1.0 : approx_bound(opt.objective, c_after).factor;
            CHECK(factor_after >= factor_before - 1e-12);
        }
    }
}
