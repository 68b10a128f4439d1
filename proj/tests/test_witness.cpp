#include "doctest.h"

#include "pitgen/witness.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace pitgen;

namespace {

PrimeField f7()
{
    return PrimeField(7, { 2, 3 });
}

std::vector<std::uint64_t> random_alpha(const GeneratorSpec& spec, Rng& rng)
{
    std::vector<std::uint64_t> a(spec.seed_block.size());
    for (auto& x : a) {
        x = spec.field->random_element(rng);
    }
    return a;
}

// coefficient vector of the witness circuit, via the expansion oracle
std::vector<std::uint64_t> expanded_coeffs(const WitnessArtifact& a)
{
    const ArenaPtr& arena = member_arena(a.artifact);
    std::vector<VarId> xs;
    for (VarId xv : a.spec.x_block) {
        xs.push_back(*arena->find(a.spec.arena->name(xv)));
    }
    return coeff_extract(member_expand(a.artifact), xs).to_values();
}

} // namespace

TEST_CASE("planted-subset witness circuit has the promised product shape")
{
    PrimeField f = f7();
    GeneratorSpec g = build_ssv(2, 1, f);
    // alpha: y1 = 1, z1 = (1, 0); P(x, alpha) = (1 x1 + 0)(0 x2 + 1) = x1
    WitnessArtifact a = witness_circuit(g, { 1, 1, 0 });
    CHECK(a.kind == "sps-circuit");

    const Circuit& c = std::get<Circuit>(a.artifact);
    const Gate& top = c.gates()[c.output()];
    REQUIRE(top.kind == GateKind::add);
    REQUIRE(top.children.size() == 1); // one product block
    const Gate& block = c.gates()[top.children[0]];
    REQUIRE(block.kind == GateKind::mul);
    CHECK(block.children.size() == 3); // scalar + 2 affine factors

    std::vector<std::uint64_t> coeffs = expanded_coeffs(a);
    CHECK(coeffs == std::vector<std::uint64_t>{ 0, 1, 0, 0 }); // x1
    CHECK(witness_verify(a));
}

TEST_CASE("shifted witness with zero y computes the all-ones shift only")
{
    PrimeField f = f7();
    for (unsigned n : { 1u, 3u }) {
        GeneratorSpec g = build_sssv(n, 2, f);
        std::vector<std::uint64_t> alpha(g.seed_block.size(), 0);
        alpha[2] = 4; // some z entry; ys stay 0
        WitnessArtifact a = witness_circuit(g, alpha);

        // Pi (x_i + 1): every multilinear coefficient is 1
        std::vector<std::uint64_t> coeffs = expanded_coeffs(a);
        CHECK(coeffs == std::vector<std::uint64_t>(std::size_t(1) << n, 1));
        CHECK(witness_verify(a));
    }
}

TEST_CASE("rank-condenser witness stays within the documented wire budget")
{
    PrimeField f = f7();
    Rng rng(11);
    // per block: 4n factor wires + (n+1) product wires + 1 top wire = 5n + 2
    for (unsigned n : { 2u, 4u }) {
        for (unsigned r : { 1u, 2u, 3u }) {
            GeneratorSpec g = build_rc(n, r, f);
            WitnessArtifact a = witness_circuit(g, random_alpha(g, rng));
            CHECK(a.declared_size <= std::size_t(r) * (5 * n + 2));
            CHECK(witness_verify(a));
        }
    }

    // doubling n at fixed r stays within the 5n+2 growth factor
    GeneratorSpec g2 = build_rc(2, 2, f);
    GeneratorSpec g4 = build_rc(4, 2, f);
    WitnessArtifact a2 = witness_circuit(g2, random_alpha(g2, rng));
    WitnessArtifact a4 = witness_circuit(g4, random_alpha(g4, rng));
    CHECK(a4.declared_size <= 2 * a2.declared_size);
}

TEST_CASE("witness_verify holds for 25 random seeds of every generator kind")
{
    PrimeField f = f7();
    PrimeField big = PrimeField::goldilocks();
    Rng rng(2026);

    std::vector<GeneratorSpec> specs;
    specs.push_back(build_rc(3, 2, f));
    specs.push_back(rc_specialize_t(build_rc(3, 2, f)));
    specs.push_back(build_ssv(3, 2, f));
    specs.push_back(build_sssv(3, 2, f));
    specs.push_back(build_trdeg(2, 1, f));
    specs.push_back(build_bms(2, 1, 2, f));
    specs.push_back(build_asss(2, 1, 3, 4, f, 2));

    for (const GeneratorSpec& g : specs) {
        CAPTURE(gen_kind_name(g.kind));
        for (int trial = 0; trial < 25; ++trial) {
            WitnessArtifact a = witness_circuit(g, random_alpha(g, rng));
            CHECK(witness_verify(a));
        }
    }

    GeneratorSpec fs = build_fs(2, 2, 2, big);
    for (int trial = 0; trial < 25; ++trial) {
        WitnessArtifact a = witness_fs_roabp(fs, random_alpha(fs, rng));
        CHECK(a.kind == "roabp");
        CHECK(witness_verify(a));
    }
}

TEST_CASE("witness construction rejects bad inputs")
{
    PrimeField f = f7();
    PrimeField big = PrimeField::goldilocks();

    GeneratorSpec rc = build_rc(2, 1, f);
    CHECK_THROWS_AS(witness_circuit(rc, { 1 }), std::invalid_argument);

    GeneratorSpec fs = build_fs(1, 1, 1, big);
    CHECK_THROWS_AS(witness_circuit(fs, { 1, 1 }), std::invalid_argument);
    CHECK_THROWS_AS(witness_fs_roabp(rc, { 1, 1, 1, 1 }), std::invalid_argument);
    CHECK_THROWS_AS(witness_fs_roabp(fs, { 1 }), std::invalid_argument);

    GeneratorSpec asss = build_asss(2, 1, 3, 4, f);
    CHECK_THROWS_WITH_AS(witness_circuit(asss, {}),
                         doctest::Contains("R override"), std::runtime_error);
}

TEST_CASE("branching-program witness matches the frozen single-edge example")
{
    PrimeField big = PrimeField::goldilocks();
    GeneratorSpec fs = build_fs(1, 1, 1, big);
    std::uint64_t omega = fs.fs->omega;
    Rng rng(5);
    std::uint64_t a1 = big.random_nonzero(rng);

    WitnessArtifact a = witness_fs_roabp(fs, { a1, 3 });
    const RoAbp& r = std::get<RoAbp>(a.artifact);
    CHECK(r.width == 1);
    REQUIRE(r.layers.size() == 1);

    // single edge label omega a1 + x1 (omega a1)^1, sink p_1 = 1
    std::uint64_t base = big.mul(omega, a1);
    std::vector<std::uint64_t> coeffs = expanded_coeffs(a);
    CHECK(coeffs == std::vector<std::uint64_t>{ base, base });
    CHECK(witness_verify(a));
}

TEST_CASE("branching-program witness has width w^2 and n layers")
{
    PrimeField big = PrimeField::goldilocks();
    Rng rng(17);
    for (unsigned n : { 1u, 2u, 3u }) {
        for (unsigned w : { 1u, 2u }) {
            for (unsigned d : { 1u, 2u }) {
                GeneratorSpec fs = build_fs(n, w, d, big);
                for (int trial = 0; trial < 20; ++trial) {
                    WitnessArtifact a = witness_fs_roabp(fs, random_alpha(fs, rng));
                    const RoAbp& r = std::get<RoAbp>(a.artifact);
                    CHECK(r.width == w * w);
                    CHECK(r.layers.size() == n);
                    CHECK(witness_verify(a));
                }
            }
        }
    }

    // all-zero seed: the image degenerates to the zero vector
    GeneratorSpec fs = build_fs(2, 2, 1, big);
    std::vector<std::uint64_t> zero(fs.seed_block.size(), 0);
    WitnessArtifact a = witness_fs_roabp(fs, zero);
    CHECK(generator_image(fs, zero)
          == std::vector<std::uint64_t>(fs.coord_count(), 0));
    CHECK(witness_verify(a));
}

TEST_CASE("tampered artifacts fail verification")
{
    PrimeField f = f7();
    PrimeField big = PrimeField::goldilocks();
    Rng rng(23);

    GeneratorSpec ssv = build_ssv(2, 2, f);
    WitnessArtifact a = witness_circuit(ssv, { 1, 2, 1, 0, 0, 1 });
    REQUIRE(witness_verify(a));
    WitnessArtifact bad = a;
    bad.alpha[0] = f.add(bad.alpha[0], 1); // claim a different seed
    CHECK_FALSE(witness_verify(bad));

    GeneratorSpec fs = build_fs(2, 1, 2, big);
    WitnessArtifact b = witness_fs_roabp(fs, random_alpha(fs, rng));
    REQUIRE(witness_verify(b));
    RoAbp& r = std::get<RoAbp>(b.artifact);
    r.layers[0][0] += SparsePoly::constant(big, r.arena, 1); // perturb an edge label
    CHECK_FALSE(witness_verify(b));
}

TEST_CASE("layer-order variants permute coordinates by the subset bijection")
{
    PrimeField big = PrimeField::goldilocks();
    Rng rng(31);

    GeneratorSpec fs = build_fs(2, 1, 2, big);
    GeneratorSpec same = order_variants(fs, { 1, 2 });
    CHECK(same.fs->order.empty()); // identity leaves the spec unchanged
    GeneratorSpec swapped = order_variants(fs, { 2, 1 });

    SUBCASE("witness roABP reads variables in the permuted order")
    {
        std::vector<std::uint64_t> alpha = { 3, 5, 2 };
        WitnessArtifact a = witness_fs_roabp(swapped, alpha);
        const RoAbp& r = std::get<RoAbp>(a.artifact);
        REQUIRE(r.order.size() == 2);
        CHECK(r.arena->name(r.order[0]) == "x2");
        CHECK(r.arena->name(r.order[1]) == "x1");
        CHECK(witness_verify(a));

        // swapping layers 1 and 2 swaps the {1} and {2} coordinates
        std::vector<std::uint64_t> base = generator_image(fs, alpha);
        std::vector<std::uint64_t> perm = generator_image(swapped, alpha);
        CHECK(perm[0] == base[0]);
        CHECK(perm[1] == base[2]);
        CHECK(perm[2] == base[1]);
        CHECK(perm[3] == base[3]);
    }

    SUBCASE("expansion oracle: the variant witness is the substituted witness")
    {
        std::map<VarId, SparsePoly> images;
        for (unsigned i = 1; i <= 2; ++i) {
            unsigned sigma_i = (i == 1) ? 2 : 1;
            SparsePoly im(big, fs.arena);
            im.add_term(Monomial::var(fs.x_block[sigma_i - 1]), 1);
            images.emplace(fs.x_block[i - 1], std::move(im));
        }
        // seed variables map to themselves
        for (VarId s : fs.seed_block) {
            SparsePoly im(big, fs.arena);
            im.add_term(Monomial::var(s), 1);
            images.emplace(s, std::move(im));
        }
        CHECK(swapped.witness_expanded() == fs.witness_expanded().substitute(images));
    }

    SUBCASE("general subset relation for n = 3")
    {
        GeneratorSpec g = build_fs(3, 2, 1, big);
        std::vector<unsigned> sigma = { 3, 1, 2 };
        GeneratorSpec variant = order_variants(g, sigma);
        std::vector<std::uint64_t> alpha = random_alpha(g, rng);
        std::vector<std::uint64_t> base = generator_image(g, alpha);
        std::vector<std::uint64_t> perm = generator_image(variant, alpha);

        // coeff of x_S in the variant = coeff of x_{sigma^{-1}(S)} originally
        for (std::size_t idx = 1; idx <= base.size(); ++idx) {
            std::set<unsigned> s = index_subset(idx, 3);
            std::set<unsigned> pre;
            for (unsigned i = 1; i <= 3; ++i) {
                if (s.count(sigma[i - 1]) != 0) {
                    pre.insert(i);
                }
            }
            CHECK(perm[idx - 1] == base[subset_index(pre, 3) - 1]);
        }

        WitnessArtifact a = witness_fs_roabp(variant, alpha);
        CHECK(witness_verify(a));
    }

    SUBCASE("there are n! layer orders")
    {
        std::vector<unsigned> sigma = { 1, 2, 3 };
        GeneratorSpec g = build_fs(3, 1, 1, big);
        std::set<std::vector<unsigned>> orders;
        do {
            GeneratorSpec variant = order_variants(g, sigma);
            orders.insert(variant.fs->order.empty() ? sigma : variant.fs->order);
        } while (std::next_permutation(sigma.begin(), sigma.end()));
        CHECK(orders.size() == 6); // far below the N! = 8! reorderings of [N]
    }

    CHECK_THROWS_AS(order_variants(fs, { 1, 1 }), std::invalid_argument);
    CHECK_THROWS_AS(order_variants(fs, { 1 }), std::invalid_argument);
    CHECK_THROWS_AS(order_variants(build_rc(2, 1, f7()), { 1, 2 }),
                    std::invalid_argument);
}

TEST_CASE("witness artifacts serialize with their binding")
{
    PrimeField f = f7();
    GeneratorSpec g = build_ssv(2, 1, f);
    WitnessArtifact a = witness_circuit(g, { 1, 1, 0 });
    nlohmann::ordered_json j = a.to_json();
    CHECK(j["kind"] == "sps-circuit");
    CHECK(j["size"] == a.declared_size);
    CHECK(j["generator"]["generator"] == "ssv");
    CHECK(j["alpha"] == std::vector<std::uint64_t>{ 1, 1, 0 });
    CHECK(j["artifact"]["type"] == "circuit");

    // round-trip the artifact through circuit JSON
    ClassMember m = member_from_json(j["artifact"], f);
    CHECK(member_expand(m).to_string()
          == member_expand(a.artifact).to_string());
}

TEST_CASE("composite witnesses cover every part")
{
    PrimeField f = f7();
    Rng rng(41);

    // trdeg over n=2, k=1: parts rc(r=2) and rc(r=1)
    GeneratorSpec g = build_trdeg(2, 1, f);
    std::vector<std::uint64_t> alpha = random_alpha(g, rng);
    WitnessArtifact a = witness_circuit(g, alpha);
    CHECK(witness_verify(a));

    // zeroing the second part's seeds reduces the witness to the first part
    std::vector<std::uint64_t> first_only = alpha;
    std::size_t split = g.parts[0].seed_block.size();
    for (std::size_t i = split; i < first_only.size(); ++i) {
        first_only[i] = 0;
    }
    WitnessArtifact a0 = witness_circuit(g, first_only);
    std::vector<std::uint64_t> part_alpha(first_only.begin(),
                                          first_only.begin() + std::ptrdiff_t(split));
    CHECK(expanded_coeffs(a0) == generator_image(g.parts[0], part_alpha));
}
