#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitgen/circuit.hpp"
#include "pitgen/generator.hpp"

namespace pitgen {

// Succinctness certificate for one hitting-set element: a small circuit or
// roABP over coefficient variables x_1..x_n whose multilinear coefficient
// vector equals generator_image(spec, alpha). The seed assignment is baked
// into the artifact; there are no symbolic-seed witnesses.
struct WitnessArtifact {
    std::string kind;        // "sps-circuit" | "spsp-circuit" | "roabp"
    ClassMember artifact;    // lives in its own x_1..x_n arena
    std::size_t declared_size = 0;
    GeneratorSpec spec;      // binding: which map, which seed
    std::vector<std::uint64_t> alpha;

    nlohmann::ordered_json to_json() const;
};

// Depth-3 sum-of-products-of-affine-forms circuit computing P(x, alpha) for
// every generator kind except fs (whose witness is a branching program).
// Composite kinds (trdeg, bms, asss) contribute one block per part summand.
// Zero-coefficient blocks are dropped, so an all-zero seed yields just the
// shift product (sssv) or the constant 0.
WitnessArtifact witness_circuit(const GeneratorSpec& spec,
                                const std::vector<std::uint64_t>& alpha);

// Width-w^2 roABP with one inner layer per x-variable, in the spec's layer
// order, computing P^FS(x, alpha) as its (1,1) entry; the sink column is
// folded into the last layer. spec.kind must be fs.
WitnessArtifact witness_fs_roabp(const GeneratorSpec& spec,
                                 const std::vector<std::uint64_t>& alpha);
// Convenience form that builds the fs spec internally.
WitnessArtifact witness_fs_roabp(unsigned n, unsigned w, unsigned d,
                                 const PrimeField& field,
                                 const std::vector<std::uint64_t>& alpha);

// Expands the artifact, extracts its multilinear coefficient vector and
// compares it entrywise against generator_image(spec, alpha).
bool witness_verify(const WitnessArtifact& artifact,
                    std::size_t budget = kDefaultTermBudget);

// fs only: the same map with layer i reading x_{sigma(i)} instead of x_i.
// sigma must be a permutation of 1..n and is absolute (it replaces any order
// already present). Coordinates keep their subset indexing, so
// image(variant, alpha)[idx(S)] == image(original, alpha)[idx(sigma(S))].
GeneratorSpec order_variants(const GeneratorSpec& spec,
                             const std::vector<unsigned>& sigma);

} // namespace pitgen
