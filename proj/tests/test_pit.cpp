#include "doctest.h"

#include "pitgen/pit.hpp"

#include <cmath>

using namespace pitgen;

namespace {

PrimeField f5()
{
    return PrimeField(5, { 2, 2 });
}

PrimeField f7()
{
    return PrimeField(7, { 2, 3 });
}

ArenaPtr coeff_arena(unsigned ncoords)
{
    auto arena = std::make_shared<VarArena>();
    for (unsigned i = 1; i <= ncoords; ++i) {
        arena->intern("c" + std::to_string(i));
    }
    return arena;
}

// circuit for sum_i coeffs[i] * c_{i+1} + constant
Circuit affine_circuit(const PrimeField& f, const ArenaPtr& arena, std::uint64_t constant,
                       const std::vector<std::uint64_t>& coeffs)
{
    Circuit c(f, arena);
    std::vector<NodeId> terms;
    terms.push_back(c.add_const(constant));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        terms.push_back(c.add_product({ c.add_const(coeffs[i]),
                                        c.add_input(static_cast<VarId>(i)) }));
    }
    c.set_output(c.add_sum(std::move(terms)));
    return c;
}

// circuit for the 2x2 determinant c1 c4 - c2 c3
Circuit det2_circuit(const PrimeField& f, const ArenaPtr& arena)
{
    Circuit c(f, arena);
    NodeId c1 = c.add_input(0);
    NodeId c2 = c.add_input(1);
    NodeId c3 = c.add_input(2);
    NodeId c4 = c.add_input(3);
    NodeId minus = c.add_const(f.neg(1));
    c.set_output(c.add_sum({ c.add_product({ c1, c4 }),
                             c.add_product({ minus, c.add_product({ c2, c3 }) }) }));
    return c;
}

SparsePoly poly(const PrimeField& f, const ArenaPtr& arena, std::uint64_t coeff,
                const std::vector<std::pair<VarId, std::uint32_t>>& powers)
{
    SparsePoly p(f, arena);
    Monomial m;
    for (const auto& [v, e] : powers) {
        m = m.times(Monomial::var(v, e));
    }
    p.add_term(m, coeff);
    return p;
}

} // namespace

TEST_CASE("hit_check classifies the worked micro-examples")
{
    PrimeField f = f5();
    GeneratorSpec sssv = build_sssv(1, 1, f);
    ArenaPtr arena = coeff_arena(2);

    SUBCASE("the zero circuit is rejected as input-zero")
    {
        Circuit zero(f, arena);
        zero.set_output(zero.add_const(0));
        HitVerdict v = hit_check(zero, sssv, HitCheckMode::symbolic_mode());
        CHECK(v.outcome == HitOutcome::input_zero);
        CHECK(hit_outcome_name(v.outcome) == "input-zero");
    }

    SUBCASE("c1 - c2 against the shifted planted map yields a replayable witness")
    {
        Circuit d = affine_circuit(f, arena, 0, { 1, f.neg(1) });
        HitVerdict v = hit_check(d, sssv, HitCheckMode::symbolic_mode());
        REQUIRE(v.outcome == HitOutcome::nonzero_witness);
        CHECK(v.value != 0);
        CHECK(d.eval(generator_image(sssv, v.seed_point)) == v.value);

        // the seed (y1, z1) = (1, 1) gives image (1, 2) and D = -1
        CHECK(d.eval(generator_image(sssv, { 1, 1 })) == f.neg(1));
    }

    SUBCASE("the 2x2 coefficient determinant vanishes on the rank-1 planted image")
    {
        GeneratorSpec ssv21 = build_ssv(2, 1, f);
        Circuit d = det2_circuit(f, coeff_arena(4));
        HitVerdict v = hit_check(d, ssv21, HitCheckMode::symbolic_mode());
        CHECK(v.outcome == HitOutcome::symbolically_zero);

        // two planted summands carry cross terms the determinant sees
        GeneratorSpec ssv22 = build_ssv(2, 2, f);
        HitVerdict w = hit_check(det2_circuit(f, coeff_arena(4)), ssv22,
                                 HitCheckMode::symbolic_mode());
        CHECK(w.outcome == HitOutcome::nonzero_witness);
    }

    SUBCASE("randomized mode reports probably-zero with its failure bound")
    {
        PrimeField big = PrimeField::goldilocks();
        GeneratorSpec ssv21 = build_ssv(2, 1, big);
        Circuit d = det2_circuit(big, coeff_arena(4));
        HitVerdict v = hit_check(d, ssv21, HitCheckMode::randomized(8), 99);
        CHECK(v.outcome == HitOutcome::probably_zero);
        CHECK(v.trials == 8);
        // composed degree <= seed-degree * deg(D) = 3 * 2; bound stays tiny
        CHECK(v.failure_log2 <= 8 * (std::log2(6.0) - std::log2(double(big.modulus()))));

        GeneratorSpec big_sssv = build_sssv(1, 1, big);
        Circuit e = affine_circuit(big, coeff_arena(2), 0, { 1, big.neg(1) });
        HitVerdict hit = hit_check(e, big_sssv, HitCheckMode::randomized(8), 99);
        REQUIRE(hit.outcome == HitOutcome::nonzero_witness);
        CHECK(e.eval(generator_image(big_sssv, hit.seed_point)) == hit.value);
        CHECK(hit.trials >= 1);
    }

    SUBCASE("mismatched inputs are rejected")
    {
        Circuit d = affine_circuit(f, coeff_arena(4), 0, { 1, 1, 1, 1 });
        CHECK_THROWS_AS(hit_check(d, sssv, HitCheckMode::symbolic_mode()),
                        std::invalid_argument);
        Circuit g = affine_circuit(f7(), coeff_arena(2), 0, { 1, 1 });
        CHECK_THROWS_AS(hit_check(g, sssv, HitCheckMode::symbolic_mode()),
                        std::invalid_argument);
        Circuit h = affine_circuit(f, coeff_arena(2), 0, { 1, 1 });
        CHECK_THROWS_AS(hit_check(h, sssv, HitCheckMode::randomized(0)),
                        std::invalid_argument);
    }

    SUBCASE("a blown symbolic budget instructs a downgrade to randomized mode")
    {
        Circuit d(f, arena);
        NodeId sum = d.add_sum({ d.add_input(0), d.add_input(1) });
        d.set_output(d.add_pow_product({ sum }, { 8 }));
        CHECK_THROWS_WITH_AS(hit_check(d, sssv, HitCheckMode::symbolic_mode(), 0, 4),
                             doctest::Contains("randomized"), std::runtime_error);
    }
}

TEST_CASE("every nonzero bilinear distinguisher is caught over the tiny field")
{
    // exhaustive completeness: all 624 nonzero multilinear D in c1, c2 over
    // F_5 compose to a nonzero polynomial with the n=1 shifted planted map
    PrimeField f = f5();
    GeneratorSpec sssv = build_sssv(1, 1, f);
    unsigned caught = 0;
    for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) {
            for (std::uint64_t c = 0; c < 5; ++c) {
                for (std::uint64_t d = 0; d < 5; ++d) {
                    if (a == 0 && b == 0 && c == 0 && d == 0) {
                        continue;
                    }
                    ArenaPtr arena = coeff_arena(2);
                    Circuit circ(f, arena);
                    NodeId c1 = circ.add_input(0);
                    NodeId c2 = circ.add_input(1);
                    circ.set_output(circ.add_sum(
                        { circ.add_const(a),
                          circ.add_product({ circ.add_const(b), c1 }),
                          circ.add_product({ circ.add_const(c), c2 }),
                          circ.add_product({ circ.add_const(d), c1, c2 }) }));
                    HitVerdict v = hit_check(circ, sssv, HitCheckMode::symbolic_mode());
                    if (v.outcome == HitOutcome::nonzero_witness) {
                        ++caught;
                    }
                }
            }
        }
    }
    CHECK(caught == 624);
}

TEST_CASE("interpolation grids have the promised size and exhaustive coverage")
{
    PrimeField f = f5();
    GeneratorSpec ssv = build_ssv(1, 1, f);

    SUBCASE("witness seed degree feeds the grid side")
    {
        // witness y1 z1 x1 + y1 (1 - z1): seed degree 2
        CHECK(generator_seed_degree(ssv) == 2);
        std::vector<std::vector<std::uint64_t>> grid = interpolation_hitting_set(ssv, 1);
        CHECK(grid.size() == 9); // (2*1+1)^2
        for (const auto& v : grid) {
            CHECK(v.size() == 2);
        }
    }

    SUBCASE("degree bound 0 needs a single point")
    {
        CHECK(interpolation_hitting_set(ssv, 0).size() == 1);
    }

    SUBCASE("every nonzero affine-linear distinguisher is hit")
    {
        std::vector<std::vector<std::uint64_t>> grid = interpolation_hitting_set(ssv, 1);
        unsigned checked = 0;
        for (std::uint64_t a = 0; a < 5; ++a) {
            for (std::uint64_t b = 0; b < 5; ++b) {
                for (std::uint64_t c = 0; c < 5; ++c) {
                    if (a == 0 && b == 0 && c == 0) {
                        continue;
                    }
                    Circuit d = affine_circuit(f, coeff_arena(2), a, { b, c });
                    bool hit = false;
                    for (const auto& v : grid) {
                        hit = hit || d.eval(v) != 0;
                    }
                    CHECK_MESSAGE(hit, "missed by grid: ", a, " + ", b, " c1 + ", c, " c2");
                    ++checked;
                }
            }
        }
        CHECK(checked == 124);
    }

    SUBCASE("a grid side beyond the field is refused")
    {
        CHECK_THROWS_WITH_AS(interpolation_hitting_set(ssv, 3),
                             doctest::Contains("field too small"), std::invalid_argument);
    }
}

TEST_CASE("jacobian matches hand differentiation")
{
    PrimeField f = f7();
    auto arena = std::make_shared<VarArena>();
    VarId x1 = arena->intern("X1");
    VarId x2 = arena->intern("X2");

    SUBCASE("the square-and-product pair")
    {
        std::vector<SparsePoly> fs = { poly(f, arena, 1, { { x1, 2 } }),
                                       poly(f, arena, 1, { { x1, 1 }, { x2, 1 } }) };
        auto jac = jacobian(fs);
        REQUIRE(jac.size() == 2);
        REQUIRE(jac[0].size() == 2);
        CHECK(jac[0][0] == poly(f, arena, 2, { { x1, 1 } }));
        CHECK(jac[0][1].is_zero());
        CHECK(jac[1][0] == poly(f, arena, 1, { { x2, 1 } }));
        CHECK(jac[1][1] == poly(f, arena, 1, { { x1, 1 } }));
    }

    SUBCASE("constants differentiate to the zero matrix")
    {
        std::vector<SparsePoly> fs = { SparsePoly::constant(f, arena, 4),
                                       SparsePoly::constant(f, arena, 0) };
        for (const auto& row : jacobian(fs)) {
            for (const SparsePoly& e : row) {
                CHECK(e.is_zero());
            }
        }
    }

    SUBCASE("a single variable gives the unit row")
    {
        auto solo = std::make_shared<VarArena>();
        VarId x = solo->intern("X1");
        auto jac = jacobian({ poly(f, solo, 1, { { x, 1 } }) });
        REQUIRE(jac.size() == 1);
        REQUIRE(jac[0].size() == 1);
        CHECK(jac[0][0] == SparsePoly::constant(f, solo, 1));
    }

    SUBCASE("mixed arenas are rejected")
    {
        auto other = std::make_shared<VarArena>();
        VarId y = other->intern("X1");
        CHECK_THROWS_AS(jacobian({ poly(f, arena, 1, { { x1, 1 } }),
                                   poly(f, other, 1, { { y, 1 } }) }),
                        std::invalid_argument);
    }
}

TEST_CASE("jacobian rank tracks transcendence degree at tiny scale")
{
    PrimeField f = f7();
    auto arena = std::make_shared<VarArena>();
    VarId x1 = arena->intern("X1");
    VarId x2 = arena->intern("X2");
    Rng rng(7);

    SUBCASE("independent pair has rank 2")
    {
        JacobianRank r = jacobian_rank({ poly(f, arena, 1, { { x1, 2 } }),
                                         poly(f, arena, 1, { { x1, 1 }, { x2, 1 } }) },
                                       rng);
        CHECK(r.rank == 2);
        CHECK(r.char_condition_ok); // 7 >= 2^2
        CHECK(r.failure_log2 < 0.0);
    }

    SUBCASE("algebraically dependent pair collapses to rank 1")
    {
        auto solo = std::make_shared<VarArena>();
        VarId x = solo->intern("X1");
        JacobianRank r = jacobian_rank({ poly(f, solo, 1, { { x, 1 } }),
                                         poly(f, solo, 1, { { x, 2 } }) },
                                       rng);
        CHECK(r.rank == 1);
        CHECK(r.char_condition_ok); // 7 >= 2^1
    }

    SUBCASE("empty list has rank 0")
    {
        CHECK(jacobian_rank({}, rng).rank == 0);
    }

    SUBCASE("F and F^2 have the same rank for random F")
    {
        PrimeField big = PrimeField::goldilocks();
        auto vars = std::make_shared<VarArena>();
        VarId a = vars->intern("X1");
        VarId b = vars->intern("X2");
        VarId c = vars->intern("X3");
        Rng sample_rng(13);
        for (int trial = 0; trial < 10; ++trial) {
            SparsePoly f1(big, vars);
            f1.add_term(Monomial::var(a, 1 + unsigned(sample_rng.below(2))),
                        big.random_nonzero(sample_rng));
            f1.add_term(Monomial::var(b).times(Monomial::var(c)),
                        big.random_element(sample_rng));
            f1.add_term(Monomial::one(), big.random_element(sample_rng));
            SparsePoly f2 = f1 * f1;
            JacobianRank lone = jacobian_rank({ f1 }, sample_rng);
            JacobianRank pair = jacobian_rank({ f1, f2 }, sample_rng);
            CHECK(pair.rank == lone.rank);
            CHECK(pair.char_condition_ok);
        }
    }

    SUBCASE("constant rows are exact")
    {
        JacobianRank r = jacobian_rank({ SparsePoly::constant(f, arena, 3) }, rng);
        CHECK(r.rank == 0);
        CHECK(r.char_condition_ok);
        CHECK(std::isinf(r.failure_log2));
    }
}

TEST_CASE("rank concentration distinguishes shifted from unshifted products")
{
    PrimeField f = f7();
    auto arena = std::make_shared<VarArena>();
    VarId x1 = arena->intern("x1");
    VarId x2 = arena->intern("x2");
    SparsePoly prod = poly(f, arena, 1, { { x1, 1 }, { x2, 1 } });

    CHECK_FALSE(rank_concentration_check({ prod }, { 0, 0 }, 1));
    CHECK(rank_concentration_check({ prod }, { 1, 1 }, 1));
    CHECK(rank_concentration_check({ prod }, { 0, 0 }, 2)); // full support allowed

    SUBCASE("constants concentrate at k = 0")
    {
        CHECK(rank_concentration_check({ SparsePoly::constant(f, arena, 5) }, { 0, 0 }, 0));
    }

    SUBCASE("guards")
    {
        CHECK_THROWS_AS(rank_concentration_check({ prod }, { 0 }, 1), std::invalid_argument);
        auto wide = std::make_shared<VarArena>();
        for (int i = 0; i < 13; ++i) {
            wide->intern("v" + std::to_string(i));
        }
        SparsePoly p(f, wide);
        p.add_term(Monomial::var(0), 1);
        CHECK_THROWS_AS(rank_concentration_check({ p }, std::vector<std::uint64_t>(13, 0), 1),
                        std::invalid_argument);
    }
}

TEST_CASE("natural-proof audits separate distinguishers from hit classes")
{
    PrimeField f = f5();
    GeneratorSpec sssv = build_sssv(1, 1, f);
    GeneratorSpec ssv21 = build_ssv(2, 1, f);
    Rng rng(3);

    SUBCASE("the first coordinate does not vanish on shifted images")
    {
        Circuit d = affine_circuit(f, coeff_arena(2), 0, { 1, 0 });
        std::vector<std::vector<std::uint64_t>> samples;
        for (int i = 0; i < 10; ++i) {
            samples.push_back(generator_image(
                sssv, { f.random_element(rng), f.random_element(rng) }));
        }
        AuditResult r = natural_proof_audit(d, samples);
        CHECK_FALSE(r.is_distinguisher);
        REQUIRE(r.hit_index.has_value());
        CHECK(d.eval(r.hit_sample) == r.hit_value);
        CHECK(r.hit_value != 0);
    }

    SUBCASE("the determinant vanishes on every rank-1 planted sample")
    {
        Circuit d = det2_circuit(f, coeff_arena(4));
        std::vector<std::vector<std::uint64_t>> samples;
        for (int i = 0; i < 25; ++i) {
            std::vector<std::uint64_t> alpha(ssv21.seed_block.size());
            for (auto& x : alpha) {
                x = f.random_element(rng);
            }
            samples.push_back(generator_image(ssv21, alpha));
        }
        AuditResult r = natural_proof_audit(d, samples);
        CHECK(r.is_distinguisher);
        CHECK_FALSE(r.hit_index.has_value());
    }

    SUBCASE("the zero circuit is rejected up front")
    {
        Circuit zero(f, coeff_arena(2));
        zero.set_output(zero.add_const(0));
        CHECK_THROWS_AS(natural_proof_audit(zero, {}), std::invalid_argument);
    }
}

TEST_CASE("guarantee labels encode the recorded preconditions")
{
    PrimeField big = PrimeField::goldilocks();
    PrimeField f = f7();

    SUBCASE("sparse class against the shifted planted map")
    {
        auto [label, notes] = guarantee_label(SigmaPiClass{ 8, 3 }, build_sssv(4, 3, big));
        CHECK(label == "guaranteed");
        auto [l2, n2] = guarantee_label(SigmaPiClass{ 8, 3 }, build_sssv(4, 2, big));
        CHECK(l2 == "heuristic");
    }

    SUBCASE("depth-3 fan-in classes are always heuristic over a finite field")
    {
        auto [label, notes] = guarantee_label(SigmaKPiSigmaClass{ 2, 4 }, build_rc(4, 5, big));
        CHECK(label == "heuristic");
        bool mentions_bound = false;
        for (const auto& n : notes) {
            mentions_bound = mentions_bound || n.find("k^2+1") != std::string::npos;
        }
        CHECK(mentions_bound);
    }

    SUBCASE("commutative roABPs record the field-size precondition")
    {
        auto [label, notes] = guarantee_label(CommRoAbpClass{ 2, 2 }, build_ssv(4, 5, big));
        CHECK(label == "guaranteed");
        bool fieldnote = false;
        for (const auto& n : notes) {
            fieldnote = fieldnote || n.find("|F| > nd") != std::string::npos;
        }
        CHECK(fieldnote);
        // same parameters over F_7 fail |F| > nd = 32
        auto [l2, n2] = guarantee_label(CommRoAbpClass{ 2, 2 }, build_ssv(4, 5, f));
        CHECK(l2 == "heuristic");
    }

    SUBCASE("roABP order compatibility")
    {
        auto [label, notes] =
            guarantee_label(RoAbpClass{ 2, 2, {} }, build_fs(3, 2, 2, big));
        CHECK(label == "guaranteed");
        auto [l2, n2] = guarantee_label(RoAbpClass{ 3, 2, {} }, build_fs(3, 2, 2, big));
        CHECK(l2 == "heuristic");
    }

    SUBCASE("overridden generators stay heuristic and keep their note")
    {
        GeneratorSpec asss = build_asss(2, 1, 3, 4, f, 2);
        auto [label, notes] = guarantee_label(OccurKClass{ 3, 1, 32 }, asss);
        CHECK(label == "heuristic");
        REQUIRE(!notes.empty());
        CHECK(notes[0].find("overridden") != std::string::npos);
    }

    SUBCASE("unknown pairings fall back to heuristic")
    {
        auto [label, notes] = guarantee_label(SigmaPiClass{ 4, 2 }, build_rc(2, 1, f));
        CHECK(label == "heuristic");
        REQUIRE(!notes.empty());
        CHECK(notes[0].find("no recorded guarantee") != std::string::npos);
    }
}

TEST_CASE("experiments sample, check and report deterministically")
{
    PrimeField big = PrimeField::goldilocks();

    SUBCASE("sparse members always hit the guaranteed shifted planted map")
    {
        GeneratorSpec sssv = build_sssv(4, 3, big);
        ExperimentReport rep = run_experiment(SigmaPiClass{ 8, 3 }, sssv, 40, 1234);
        CHECK(rep.trials == 40);
        CHECK(rep.hits == 40);
        CHECK(rep.failures() == 0);
        CHECK(rep.guarantee == "guaranteed");
        CHECK(rep.rows.size() == 40);
        CHECK(rep.per_trial_failure_log2 <= -40.0);
        for (const TrialRow& row : rep.rows) {
            CHECK(row.outcome == "nonzero-witness");
            CHECK(row.member.is_null()); // members only serialize on failures
        }
        CHECK(rep.wall_ms >= 0.0);
    }

    SUBCASE("zero trials produce an empty but well-formed report")
    {
        GeneratorSpec sssv = build_sssv(2, 2, big);
        ExperimentReport rep = run_experiment(SigmaPiClass{ 4, 2 }, sssv, 0, 7);
        CHECK(rep.trials == 0);
        CHECK(rep.hits == 0);
        CHECK(rep.rows.empty());
        CHECK(rep.to_json()["rows"].is_array());
        CHECK(rep.to_csv() == "trial,outcome,value,check_seed\n");
    }

    SUBCASE("commutative roABP family against the planted map")
    {
        GeneratorSpec ssv = build_ssv(4, 5, big);
        ExperimentReport rep = run_experiment(CommRoAbpClass{ 2, 2 }, ssv, 10, 99);
        CHECK(rep.hits == 10);
        CHECK(rep.guarantee == "guaranteed");
    }

    SUBCASE("symbolic mode works for tiny experiments")
    {
        GeneratorSpec sssv = build_sssv(2, 2, big);
        ExperimentOptions opt;
        opt.symbolic = true;
        ExperimentReport rep = run_experiment(SigmaPiClass{ 4, 2 }, sssv, 5, 31, opt);
        CHECK(rep.mode == "symbolic");
        CHECK(rep.hits == 5);
    }

    SUBCASE("same seed gives byte-identical reports, different seeds differ")
    {
        GeneratorSpec sssv = build_sssv(3, 2, big);
        ExperimentReport a = run_experiment(SigmaPiClass{ 4, 2 }, sssv, 12, 555);
        ExperimentReport b = run_experiment(SigmaPiClass{ 4, 2 }, sssv, 12, 555);
        CHECK(a.to_json().dump(2) == b.to_json().dump(2));
        CHECK(a.to_csv() == b.to_csv());

        ExperimentReport c = run_experiment(SigmaPiClass{ 4, 2 }, sssv, 12, 556);
        CHECK(a.to_json().dump(2) != c.to_json().dump(2));
    }

    SUBCASE("read-once ABPs against the shifted-exponent map")
    {
        GeneratorSpec fs = build_fs(2, 2, 2, big);
        ExperimentReport rep = run_experiment(RoAbpClass{ 2, 2, {} }, fs, 10, 2024);
        CHECK(rep.hits == 10);
        CHECK(rep.guarantee == "guaranteed");
    }

    SUBCASE("unmaterialized generators refuse to run")
    {
        GeneratorSpec asss = build_asss(2, 1, 3, 4, PrimeField::goldilocks());
        CHECK_THROWS_AS(run_experiment(OccurKClass{ 3, 1, 32 }, asss, 1, 1),
                        std::runtime_error);
    }
}

TEST_CASE("randomized hits replay from the recorded seed point")
{
    PrimeField big = PrimeField::goldilocks();
    GeneratorSpec sssv = build_sssv(3, 3, big);
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        ClassMember m = sample_class(SigmaPiClass{ 6, 3 }, 8, big, rng);
        HitVerdict v = hit_check(m, sssv, HitCheckMode::randomized(8), rng.next_u64());
        REQUIRE(v.outcome == HitOutcome::nonzero_witness);
        CHECK(member_eval(m, generator_image(sssv, v.seed_point)) == v.value);
    }
}
