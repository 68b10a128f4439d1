#pragma once

#include <optional>
#include <set>

#include "pitgen/circuit.hpp"

namespace pitgen {

enum class GenKind { rc, ssv, sssv, trdeg, asss, bms, fs };

std::string gen_kind_name(GenKind k);

// Frozen data of a layered matrix-product instance: a root of unity of
// large order, interpolation nodes beta_1..beta_{w^2}, and the Lagrange
// basis coefficients (lagrange[l][e] = coefficient of X^e in p_{l+1}).
struct FsData {
    unsigned w = 0;
    unsigned d = 0;
    std::uint64_t omega = 0;
    std::vector<std::uint64_t> beta;
    std::vector<std::vector<std::uint64_t>> lagrange;
    // layer i reads x_{order[i-1]} (1-based); empty = identity order
    std::vector<unsigned> order;
};

// One succinct generator: a witness polynomial P(x-block, seed-block) whose
// coefficient vector along the x-block is the polynomial map G: F^l -> F^N,
// N = 2^n. Composite kinds (trdeg, asss, bms) carry their summands in
// `parts` (same arena, disjoint seed slices); witnesses are always
// multilinear in the x-block. FS instances keep the layered matrix form in
// `fs` instead of a materialized witness.
struct GeneratorSpec {
    GenKind kind = GenKind::rc;
    const PrimeField* field = nullptr;
    unsigned n = 0;
    ArenaPtr arena;
    std::vector<VarId> x_block;
    std::vector<VarId> seed_block;
    std::vector<GeneratorSpec> parts;
    nlohmann::ordered_json params;
    bool heuristic = false;   // parameters below the guaranteed regime
    bool materialized = true; // false: parameters too large to even name seeds
    std::string note;
    std::optional<SparsePoly> witness;
    std::optional<FsData> fs;

    std::uint64_t coord_count() const { return std::uint64_t(1) << n; }

    // seed count; nullopt when the formula overflows 64 bits
    std::optional<std::uint64_t> seed_arity() const;

    // stored witness; throws for FS (use witness_expanded) and for
    // non-materialized specs
    const SparsePoly& witness_poly() const;

    // witness as a SparsePoly; FS expands its matrix product on demand
    SparsePoly witness_expanded(std::size_t budget = kDefaultTermBudget) const;

    nlohmann::ordered_json to_json() const;
};

// P = sum_{j=1}^r y_j t_0^j prod_{k=1}^n (1 + x_k t_k^j); r = 0 gives the
// zero witness
GeneratorSpec build_rc(unsigned n, std::uint64_t r, const PrimeField& field);

// substitutes t_0 <- t, t_k <- t^{2^{k-1}}, collapsing the t-block to one
// variable; coordinate i of the map becomes sum_j y_j t^{ij}
GeneratorSpec rc_specialize_t(const GeneratorSpec& spec, const std::string& t_name = "t");

// Q = sum_{i in [k]} y_i prod_{j in [n]} (z_{i,j} x_j + (1 - z_{i,j}))
GeneratorSpec build_ssv(unsigned n, unsigned k, const PrimeField& field);

// SSV plus prod_{j in [n]} (x_j + 1); the map picks up an all-ones offset
GeneratorSpec build_sssv(unsigned n, unsigned k, const PrimeField& field);

// sum of RC(n, k+1) on seeds (z, s-block) and RC(n, k) on seeds (y, t-block)
GeneratorSpec build_trdeg(unsigned n, unsigned k, const PrimeField& field);

// sum of D-2 RC(n, R) instances plus SSSV(n, R*ceil(log s) + R*ceil(log R));
// R = (2k)^(2D*2^D) unless overridden. Specs whose R exceeds the
// materialization cap stay symbolic: parameters are reported but witness,
// image and compose refuse to run.
GeneratorSpec build_asss(unsigned n, unsigned k, unsigned depth, std::uint64_t s,
                         const PrimeField& field,
                         std::optional<std::uint64_t> r_override = std::nullopt);

// sum of RC(n, r) and SSSV(n, m), m = max(1, r*ceil(log s) + r*ceil(log r))
GeneratorSpec build_bms(unsigned n, std::uint64_t r, std::uint64_t s, const PrimeField& field);

// succinct layered matrix-product generator for width-w, individual-degree-d
// targets;
// needs an element of multiplicative order >= (N d w^2)^2 and p > w^2
GeneratorSpec build_fs(unsigned n, unsigned w, unsigned d, const PrimeField& field);

// largest R build_asss will materialize without an override
inline constexpr std::uint64_t kAsssMaterializeCap = 512;

// Seed fixing that plants the free y variables at chosen coordinates:
// fixing pins every z slot (characteristic vectors) and zeroes unused y's;
// placements lists (coordinate index, y variable) pairs.
struct Planting {
    std::map<VarId, std::uint64_t> fixing;
    std::vector<std::pair<std::uint64_t, VarId>> placements;
};

// subsets: distinct subsets of {1..n}, at most k of them (ssv specs only)
Planting ssv_plant(const GeneratorSpec& spec, const std::vector<std::set<unsigned>>& subsets);

// numeric coefficient vector of P(x, alpha); alpha follows seed_block order.
// FS goes through the width-w^2 matrix product.
std::vector<std::uint64_t> generator_image(const GeneratorSpec& spec,
                                           const std::vector<std::uint64_t>& alpha);

// symbolic map G = coeff_x(P): 2^n entries, each a seed polynomial
CoeffVector generator_coeff_map(const GeneratorSpec& spec,
                                std::size_t budget = kDefaultTermBudget);

// exact composed polynomial D(G(seeds)); distinguisher arity must be 2^n
SparsePoly generator_compose(const GeneratorSpec& spec, const Circuit& distinguisher,
                             std::size_t budget = kDefaultTermBudget);

} // namespace pitgen
