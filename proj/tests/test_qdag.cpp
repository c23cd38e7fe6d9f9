#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "test_support.hpp"

using namespace mqopt;
using testsupport::demo_workload;

namespace {

Workload clique_query(std::size_t m) {
    Workload w;
    Query q;
    for (std::size_t i = 0; i < m; ++i) {
        const std::string name(1, static_cast<char>('A' + i));
        w.relations.push_back({name, 100.0, std::nullopt});
        q.relations.push_back(name);
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            q.predicates.push_back({q.relations[i], q.relations[j], 0.1});
    w.queries.push_back(q);
    w.cost_model.mode = CostModelMode::Fixture;
    w.cost_model.fixture.scan_default = 1.0;
    w.cost_model.fixture.join_default = 1.0;
    w.cost_model.fixture.write_default = 1.0;
    w.cost_model.fixture.read_default = 1.0;
    return w;
}

std::size_t count_ops(const QueryDag& dag, OpKind kind) {
    std::size_t c = 0;
    for (const auto& op : dag.operator_nodes())
        if (op.kind == kind) ++c;
    return c;
}

}  // namespace

TEST_CASE("canonical signatures") {
    CHECK(canonical_signature({"B", "A"}, {}) == canonical_signature({"A", "B"}, {}));
    CHECK_FALSE(canonical_signature({"A", "B"}, {{"A", 0.5}}) == canonical_signature({"A", "B"}, {}));
    std::set<Signature> sigs;
    const std::vector<std::string> rels{"A", "B", "C", "D"};
    for (std::uint32_t mask = 1; mask < 16; ++mask) {
        std::vector<std::string> subset;
        for (std::size_t i = 0; i < 4; ++i)
            if ((mask >> i) & 1) subset.push_back(rels[i]);
        sigs.insert(canonical_signature(subset, {}));
    }
    CHECK(sigs.size() == 15);
}

TEST_CASE("clique query expands to the full associativity closure") {
    const QueryDag dag = build_dag(clique_query(3));
    // One node per non-empty relation subset plus the dummy root.
    CHECK(dag.equivalence_nodes().size() == 8);
    const auto abc = dag.find(canonical_signature({"A", "B", "C"}, {}));
    REQUIRE(abc.has_value());
    CHECK(dag.equiv(*abc).child_ops.size() == 3);  // {AB}+C, {AC}+B, {BC}+A
    for (const char* pair : {"A,B", "A,C", "B,C"})
        CHECK(dag.find(canonical_signature({std::string(1, pair[0]), std::string(1, pair[2])}, {})).has_value());
}

TEST_CASE("clique closure node and operator counts follow the formulas") {
    const std::size_t m = 4;
    const QueryDag dag = build_dag(clique_query(m));
    CHECK(dag.equivalence_nodes().size() == (std::size_t{1} << m) - 1 + 1);  // subsets + dummy root
    // Each subset of size s contributes 2^(s-1) - 1 join alternatives.
    std::size_t expected_joins = 0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const int s = std::popcount(mask);
        if (s >= 2) expected_joins += (std::size_t{1} << (s - 1)) - 1;
    }
    CHECK(count_ops(dag, OpKind::Join) == expected_joins);
    CHECK(count_ops(dag, OpKind::Scan) == m);
    CHECK(count_ops(dag, OpKind::DummyRoot) == 1);
}

TEST_CASE("chain predicates exclude cross products") {
    Workload w = clique_query(3);
    w.queries[0].predicates = {{"A", "B", 0.1}, {"B", "C", 0.1}};  // chain: no A-C edge
    const QueryDag dag = build_dag(w);
    CHECK_FALSE(dag.find(canonical_signature({"A", "C"}, {})).has_value());
    const auto abc = dag.find(canonical_signature({"A", "B", "C"}, {}));
    REQUIRE(abc.has_value());
    CHECK(dag.equiv(*abc).child_ops.size() == 2);
}

TEST_CASE("the example batch unifies the shared join") {
    const QueryDag dag = build_dag(demo_workload());
    // A,B,C,D, AB, BC, CD, ABC, BCD + dummy root.
    CHECK(dag.equivalence_nodes().size() == 10);
    const auto bc = dag.find(canonical_signature({"B", "C"}, {}));
    REQUIRE(bc.has_value());
    const auto abc = dag.find(canonical_signature({"A", "B", "C"}, {}));
    const auto bcd = dag.find(canonical_signature({"B", "C", "D"}, {}));
    REQUIRE(abc.has_value());
    REQUIRE(bcd.has_value());
    // The unified BC node feeds a join under each query root.
    std::set<std::size_t> parents;
    for (std::size_t op_id : dag.equiv(*bc).parent_ops) parents.insert(dag.op(op_id).parent);
    CHECK(parents == std::set<std::size_t>{*abc, *bcd});
}

TEST_CASE("single relation query") {
    Workload w;
    w.relations.push_back({"A", 10.0, std::nullopt});
    Query q;
    q.relations = {"A"};
    w.queries.push_back(q);
    w.cost_model.mode = CostModelMode::Fixture;
    w.cost_model.fixture.scan_default = 1.0;
    w.cost_model.fixture.write_default = 1.0;
    w.cost_model.fixture.read_default = 1.0;
    const QueryDag dag = build_dag(w);
    CHECK(dag.equivalence_nodes().size() == 2);  // A and the dummy root
    CHECK(dag.operator_nodes().size() == 2);     // scan + dummy op
    CHECK(count_ops(dag, OpKind::Scan) == 1);
    CHECK(shareable_nodes(dag).empty());
}

TEST_CASE("selections are pushed to the base relations") {
    Workload w = clique_query(2);
    w.queries[0].selections = {{"A", 0.5}};
    const QueryDag dag = build_dag(w);
    const auto base = dag.find(canonical_signature({"A"}, {}));
    const auto selected = dag.find(canonical_signature({"A"}, {{"A", 0.5}}));
    REQUIRE(base.has_value());
    REQUIRE(selected.has_value());
    CHECK(dag.equiv(*selected).child_ops.size() == 1);
    CHECK(dag.op(dag.equiv(*selected).child_ops[0]).kind == OpKind::Select);
    // The joined node carries the selection in its signature.
    CHECK(dag.find(canonical_signature({"A", "B"}, {{"A", 0.5}})).has_value());
    CHECK_FALSE(dag.find(canonical_signature({"A", "B"}, {})).has_value());
    CHECK(dag.equiv(*selected).cardinality == Catch::Approx(50.0));
}

TEST_CASE("shareable nodes") {
    SECTION("the example batch shares exactly the B-C join") {
        const QueryDag dag = build_dag(demo_workload());
        const auto bc = dag.find(canonical_signature({"B", "C"}, {}));
        REQUIRE(bc.has_value());
        CHECK(shareable_nodes(dag) == std::vector<std::size_t>{*bc});
    }
    SECTION("a single two-relation query shares nothing") {
        CHECK(shareable_nodes(build_dag(clique_query(2))).empty());
    }
    SECTION("a duplicated query makes its root shareable") {
        Workload w = clique_query(2);
        w.queries.push_back(w.queries[0]);
        const QueryDag dag = build_dag(w);
        const auto ab = dag.find(canonical_signature({"A", "B"}, {}));
        REQUIRE(ab.has_value());
        CHECK(shareable_nodes(dag) == std::vector<std::size_t>{*ab});
        CHECK(dag.query_roots()[0] == dag.query_roots()[1]);
    }
}

TEST_CASE("structural invariants") {
    const QueryDag dag = build_dag(demo_workload());
    SECTION("AND/OR alternation: operator inputs and parents are equivalence nodes") {
        for (const auto& op : dag.operator_nodes()) {
            CHECK(op.parent < dag.equivalence_nodes().size());
            for (std::size_t in : op.inputs) CHECK(in < dag.equivalence_nodes().size());
        }
        for (const auto& node : dag.equivalence_nodes())
            for (std::size_t op_id : node.child_ops) CHECK(dag.op(op_id).parent == node.id);
    }
    SECTION("no two equivalence nodes share a signature") {
        std::set<Signature> seen;
        for (const auto& node : dag.equivalence_nodes()) CHECK(seen.insert(node.signature).second);
    }
    SECTION("operator inputs precede their parents (acyclic, topological ids)") {
        for (const auto& op : dag.operator_nodes())
            for (std::size_t in : op.inputs) CHECK(in < op.parent);
    }
    SECTION("every node is reachable from the dummy root") {
        std::vector<char> reach(dag.equivalence_nodes().size(), 0);
        std::vector<std::size_t> stack{dag.root()};
        reach[dag.root()] = 1;
        while (!stack.empty()) {
            const std::size_t id = stack.back();
            stack.pop_back();
            for (std::size_t op_id : dag.equiv(id).child_ops)
                for (std::size_t in : dag.op(op_id).inputs)
                    if (!reach[in]) {
                        reach[in] = 1;
                        stack.push_back(in);
                    }
        }
        for (const auto& node : dag.equivalence_nodes()) CHECK(reach[node.id] == 1);
    }
    SECTION("base relations have a single scan child") {
        for (const auto& node : dag.equivalence_nodes()) {
            if (!node.signature.is_base_relation()) continue;
            REQUIRE(node.child_ops.size() == 1);
            CHECK(dag.op(node.child_ops[0]).kind == OpKind::Scan);
        }
    }
    SECTION("joins have two inputs, the dummy root one per query") {
        for (const auto& op : dag.operator_nodes()) {
            if (op.kind == OpKind::Join) CHECK(op.inputs.size() == 2);
            if (op.kind == OpKind::DummyRoot) CHECK(op.inputs.size() == dag.query_roots().size());
        }
    }
}

TEST_CASE("workload validation") {
    SECTION("disconnected join graph") {
        Workload w = clique_query(3);
        w.queries[0].predicates = {{"A", "B", 0.1}};  // C unreachable
        CHECK_THROWS_AS(build_dag(w), ValidationError);
    }
    SECTION("conflicting predicate selectivities across the batch") {
        Workload w = clique_query(2);
        Query q2 = w.queries[0];
        q2.predicates[0].selectivity = 0.5;
        w.queries.push_back(q2);
        CHECK_THROWS_AS(build_dag(w), ValidationError);
    }
    SECTION("unknown relation") {
        Workload w = clique_query(2);
        w.queries[0].relations.push_back("Z");
        CHECK_THROWS_AS(build_dag(w), ValidationError);
    }
    SECTION("empty query list") {
        Workload w = clique_query(2);
        w.queries.clear();
        CHECK_THROWS_AS(validate_workload(w), ValidationError);
    }
}

TEST_CASE("dot dump mentions every node") {
    const QueryDag dag = build_dag(demo_workload());
    const std::string dot = to_dot(dag);
    CHECK(dot.find("B,C") != std::string::npos);
    CHECK(dot.find("dummy-root") != std::string::npos);
    CHECK(dot.find("digraph") != std::string::npos);
}
