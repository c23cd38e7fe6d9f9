#pragma once

#include <cmath>
#include <string>

#include "mqopt/common.hpp"
#include "mqopt/qdag.hpp"
#include "mqopt/workload.hpp"

namespace mqopt {

/// Prices operators, materialization writes, and materialized-result
/// reads over a built DAG. Fixture mode uses the explicit unit costs
/// verbatim; analytical mode prices by block counts derived from the
/// estimated cardinalities:
///   scan        seek + read * blocks   (unless the relation pins a cost)
///   select      cpu * blocks(input)
///   join        read * (bl + bl * br) + cpu * blocks(output)
///   read        read * blocks
///   write       write * blocks
class CostModel {
public:
    CostModel() = default;
    explicit CostModel(CostModelSpec spec) : spec_(std::move(spec)) {}

    const CostModelSpec& spec() const { return spec_; }

    double op_cost(const QueryDag& dag, const OperatorNode& op) const {
        switch (op.kind) {
            case OpKind::DummyRoot:
                return 0.0;
            case OpKind::Scan: {
                const Relation& rel = dag.relation(op.relation);
                if (spec_.mode == CostModelMode::Fixture)
                    return lookup(spec_.fixture.scan, spec_.fixture.scan_default, rel.name, "scan");
                if (rel.explicit_scan_cost) return *rel.explicit_scan_cost;
                return spec_.analytical.seek_cost + spec_.analytical.read_cost_per_block * blocks(rel.cardinality);
            }
            case OpKind::Select: {
                const auto& parent = dag.equiv(op.parent);
                if (spec_.mode == CostModelMode::Fixture)
                    return lookup(spec_.fixture.select, spec_.fixture.select_default,
                                  parent.signature.to_string(), "select");
                return spec_.analytical.cpu_cost_per_block * blocks(dag.equiv(op.inputs.front()).cardinality);
            }
            case OpKind::Join: {
                const auto& parent = dag.equiv(op.parent);
                if (spec_.mode == CostModelMode::Fixture)
                    return lookup(spec_.fixture.join, spec_.fixture.join_default, parent.signature.to_string(),
                                  "join");
                const double bl = blocks(dag.equiv(op.inputs[0]).cardinality);
                const double br = blocks(dag.equiv(op.inputs[1]).cardinality);
                const double bo = blocks(parent.cardinality);
                return spec_.analytical.read_cost_per_block * (bl + bl * br) +
                       spec_.analytical.cpu_cost_per_block * bo;
            }
        }
        throw ArgumentError("op_cost: unknown operator kind");
    }

    double materialized_read(const QueryDag& dag, const EquivalenceNode& node) const {
        if (spec_.mode == CostModelMode::Fixture)
            return lookup(spec_.fixture.materialized_read, spec_.fixture.read_default, node.signature.to_string(),
                          "materialized_read");
        (void)dag;
        return spec_.analytical.read_cost_per_block * blocks(node.cardinality);
    }

    double materialize_write(const QueryDag& dag, const EquivalenceNode& node) const {
        if (spec_.mode == CostModelMode::Fixture)
            return lookup(spec_.fixture.materialize_write, spec_.fixture.write_default, node.signature.to_string(),
                          "materialize_write");
        (void)dag;
        return spec_.analytical.write_cost_per_block * blocks(node.cardinality);
    }

private:
    double blocks(double cardinality) const {
        return std::max(1.0, std::ceil(cardinality / spec_.analytical.tuples_per_block()));
    }

    static double lookup(const std::map<std::string, double>& m, const std::optional<double>& dflt,
                         const std::string& key, const char* category) {
        auto it = m.find(key);
        if (it != m.end()) return it->second;
        if (dflt) return *dflt;
        throw MissingCostError(std::string("fixture cost model has no ") + category + " cost for '" + key + "'");
    }

    CostModelSpec spec_;
};

}  // namespace mqopt
