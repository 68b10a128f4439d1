#include "pitgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pitgen {

namespace {

// seed-arity guard: builders refuse to intern absurd numbers of variables
constexpr std::uint64_t kMaxSeedNames = std::uint64_t(1) << 20;

std::optional<std::uint64_t> checked_pow(std::uint64_t base, unsigned __int128 exp)
{
    // early nullopt on overflow, so huge exponents terminate fast
    std::uint64_t acc = 1;
    for (unsigned __int128 i = 0; i < exp; ++i) {
        unsigned __int128 next = static_cast<unsigned __int128>(acc) * base;
        if (next > std::numeric_limits<std::uint64_t>::max()) {
            return std::nullopt;
        }
        acc = static_cast<std::uint64_t>(next);
    }
    return acc;
}

std::optional<std::uint64_t> checked_add(std::optional<std::uint64_t> a,
                                         std::optional<std::uint64_t> b)
{
    if (!a || !b || *a > std::numeric_limits<std::uint64_t>::max() - *b) {
        return std::nullopt;
    }
    return *a + *b;
}

std::optional<std::uint64_t> checked_mul(std::optional<std::uint64_t> a,
                                         std::optional<std::uint64_t> b)
{
    if (!a || !b) {
        return std::nullopt;
    }
    unsigned __int128 p = static_cast<unsigned __int128>(*a) * *b;
    if (p > std::numeric_limits<std::uint64_t>::max()) {
        return std::nullopt;
    }
    return static_cast<std::uint64_t>(p);
}

ArenaPtr make_x_arena(unsigned n, std::vector<VarId>& x_block)
{
    auto arena = std::make_shared<VarArena>();
    for (unsigned i = 1; i <= n; ++i) {
        x_block.push_back(arena->intern("x" + std::to_string(i)));
    }
    return arena;
}

std::uint32_t to_exponent(std::uint64_t e, const char* what)
{
    if (e > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument(std::string(what) + ": exponent " + std::to_string(e)
                                    + " does not fit a monomial");
    }
    return static_cast<std::uint32_t>(e);
}

struct RcSeeds {
    std::vector<VarId> y; // y_1..y_r
    std::vector<VarId> t; // t_0..t_n
};

// P = sum_{j=1}^r y_j t_0^j prod_{k=1}^n (1 + x_k t_k^j)
SparsePoly rc_witness(const PrimeField& field, const ArenaPtr& arena,
                      const std::vector<VarId>& x_block, const RcSeeds& seeds,
                      std::size_t budget = kDefaultTermBudget)
{
    SparsePoly p(field, arena);
    for (std::size_t j = 1; j <= seeds.y.size(); ++j) {
        auto e = to_exponent(j, "rc witness");
        SparsePoly term = SparsePoly::variable(field, arena, seeds.y[j - 1]);
        SparsePoly t0(field, arena);
        t0.add_term(Monomial::var(seeds.t[0], e), 1);
        term = term.mul_budgeted(t0, budget);
        for (std::size_t k = 1; k < seeds.t.size(); ++k) {
            SparsePoly factor = SparsePoly::constant(field, arena, 1);
            factor.add_term(Monomial::var(x_block[k - 1]).times(Monomial::var(seeds.t[k], e)), 1);
            term = term.mul_budgeted(factor, budget);
        }
        p += term;
    }
    return p;
}

RcSeeds intern_rc_seeds(const ArenaPtr& arena, unsigned n, std::uint64_t r,
                        const std::string& y_prefix, const std::string& t_prefix)
{
    RcSeeds s;
    for (std::uint64_t j = 1; j <= r; ++j) {
        s.y.push_back(arena->intern(y_prefix + std::to_string(j)));
    }
    for (unsigned k = 0; k <= n; ++k) {
        s.t.push_back(arena->intern(t_prefix + std::to_string(k)));
    }
    return s;
}

struct SsvSeeds {
    std::vector<VarId> y;              // y_1..y_k
    std::vector<std::vector<VarId>> z; // z[i][j] = z_{i+1, j+1}
};

SsvSeeds intern_ssv_seeds(const ArenaPtr& arena, unsigned n, unsigned k,
                          const std::string& y_prefix, const std::string& z_prefix)
{
    SsvSeeds s;
    for (unsigned i = 1; i <= k; ++i) {
        s.y.push_back(arena->intern(y_prefix + std::to_string(i)));
    }
    for (unsigned i = 1; i <= k; ++i) {
        std::vector<VarId> row;
        for (unsigned j = 1; j <= n; ++j) {
            row.push_back(arena->intern(z_prefix + std::to_string(i) + "_" + std::to_string(j)));
        }
        s.z.push_back(std::move(row));
    }
    return s;
}

// Q = sum_{i in [k]} y_i prod_{j in [n]} (z_{i,j} x_j + 1 - z_{i,j})
SparsePoly ssv_witness(const PrimeField& field, const ArenaPtr& arena,
                       const std::vector<VarId>& x_block, const SsvSeeds& seeds,
                       std::size_t budget = kDefaultTermBudget)
{
    SparsePoly q(field, arena);
    for (std::size_t i = 0; i < seeds.y.size(); ++i) {
        SparsePoly term = SparsePoly::variable(field, arena, seeds.y[i]);
        for (std::size_t j = 0; j < x_block.size(); ++j) {
            SparsePoly factor = SparsePoly::constant(field, arena, 1);
            factor.add_term(Monomial::var(seeds.z[i][j]).times(Monomial::var(x_block[j])), 1);
            factor.add_term(Monomial::var(seeds.z[i][j]), field.modulus() - 1);
            term = term.mul_budgeted(factor, budget);
        }
        q += term;
    }
    return q;
}

SparsePoly all_ones_shift(const PrimeField& field, const ArenaPtr& arena,
                          const std::vector<VarId>& x_block,
                          std::size_t budget = kDefaultTermBudget)
{
    SparsePoly p = SparsePoly::constant(field, arena, 1);
    for (VarId x : x_block) {
        SparsePoly factor = SparsePoly::variable(field, arena, x);
        factor.add_term(Monomial::one(), 1);
        p = p.mul_budgeted(factor, budget);
    }
    return p;
}

void append_seeds(std::vector<VarId>& out, const RcSeeds& s)
{
    out.insert(out.end(), s.y.begin(), s.y.end());
    out.insert(out.end(), s.t.begin(), s.t.end());
}

void append_seeds(std::vector<VarId>& out, const SsvSeeds& s)
{
    out.insert(out.end(), s.y.begin(), s.y.end());
    for (const auto& row : s.z) {
        out.insert(out.end(), row.begin(), row.end());
    }
}

void check_seed_budget(std::uint64_t arity, const char* kind)
{
    if (arity > kMaxSeedNames) {
        throw std::invalid_argument(std::string(kind) + ": seed arity " + std::to_string(arity)
                                    + " is beyond the materialization limit");
    }
}

GeneratorSpec child_rc_spec(const GeneratorSpec& parent, const RcSeeds& seeds,
                            SparsePoly witness, std::uint64_t r)
{
    GeneratorSpec c;
    c.kind = GenKind::rc;
    c.field = parent.field;
    c.n = parent.n;
    c.arena = parent.arena;
    c.x_block = parent.x_block;
    append_seeds(c.seed_block, seeds);
    c.params["r"] = r;
    c.params["n"] = parent.n;
    c.witness = std::move(witness);
    return c;
}

GeneratorSpec child_sssv_spec(const GeneratorSpec& parent, const SsvSeeds& seeds,
                              SparsePoly witness, std::uint64_t k)
{
    GeneratorSpec c;
    c.kind = GenKind::sssv;
    c.field = parent.field;
    c.n = parent.n;
    c.arena = parent.arena;
    c.x_block = parent.x_block;
    append_seeds(c.seed_block, seeds);
    c.params["k"] = k;
    c.params["n"] = parent.n;
    c.witness = std::move(witness);
    return c;
}

} // namespace

std::string gen_kind_name(GenKind k)
{
    switch (k) {
    case GenKind::rc: return "rc";
    case GenKind::ssv: return "ssv";
    case GenKind::sssv: return "sssv";
    case GenKind::trdeg: return "trdeg";
    case GenKind::asss: return "asss";
    case GenKind::bms: return "bms";
    case GenKind::fs: return "fs";
    }
    return "?";
}

std::optional<std::uint64_t> GeneratorSpec::seed_arity() const
{
    if (materialized) {
        return seed_block.size();
    }
    // non-materialized specs record the arity formula pieces in params
    std::optional<std::uint64_t> r;
    if (params.contains("R") && !params["R"].is_null()) {
        r = params["R"].get<std::uint64_t>();
    }
    std::optional<std::uint64_t> m;
    if (params.contains("m") && !params["m"].is_null()) {
        m = params["m"].get<std::uint64_t>();
    }
    std::uint64_t d = params.value("D", 3u);
    auto rc_each = checked_add(r, std::uint64_t(n) + 1);
    auto total = checked_mul(rc_each, std::uint64_t(d) - 2);
    return checked_add(total, checked_mul(m, std::uint64_t(n) + 1));
}

const SparsePoly& GeneratorSpec::witness_poly() const
{
    if (!materialized) {
        throw std::runtime_error(gen_kind_name(kind)
                                 + ": parameters too large to materialize (" + note
                                 + "); pass an R override for desk-scale runs");
    }
    if (kind == GenKind::fs) {
        throw std::logic_error("fs: witness is kept in matrix form; call witness_expanded");
    }
    return *witness;
}

SparsePoly GeneratorSpec::witness_expanded(std::size_t budget) const
{
    if (kind != GenKind::fs) {
        return witness_poly();
    }
    // symbolic matrix product: row (layer 1) * M_2 .. M_n * sink
    const FsData& data = *fs;
    const PrimeField& f = *field;
    unsigned w2 = data.w * data.w;
    auto yvar = [&](unsigned i) { return seed_block[i - 1]; }; // y_i, 1-based
    auto layer_x = [&](unsigned i) {
        return x_block[(data.order.empty() ? i : data.order[i - 1]) - 1];
    };

    auto exponent_at = [&](unsigned i) -> std::uint64_t {
        // 2^{i-1} d w^2
        if (i - 1 >= 64) {
            throw std::invalid_argument("fs: layer exponent overflows");
        }
        return checked_mul(std::uint64_t(1) << (i - 1), std::uint64_t(data.d) * w2)
            .value_or(std::numeric_limits<std::uint64_t>::max());
    };
    // omega^(a*b) with reduction; bases here are powers of omega, never zero
    auto omega_pow = [&](std::uint64_t a, std::uint64_t b) {
        return f.pow(data.omega, static_cast<unsigned __int128>(a) * b);
    };

    std::vector<SparsePoly> row;
    for (unsigned l1 = 1; l1 <= w2; ++l1) {
        // p_{l_0}(t) = t boundary: omega^{l1} y_1 + x_1 (omega^{l1} y_1)^{E_1}
        std::uint64_t e1 = exponent_at(1);
        SparsePoly entry(f, arena);
        entry.add_term(Monomial::var(yvar(1)), f.pow(data.omega, std::uint64_t(l1)));
        entry.add_term(Monomial::var(layer_x(1)).times(
                           Monomial::var(yvar(1), to_exponent(e1, "fs witness"))),
                       omega_pow(l1, e1));
        row.push_back(std::move(entry));
    }
    for (unsigned i = 2; i <= n; ++i) {
        std::uint64_t ei = exponent_at(i);
        std::vector<SparsePoly> next(w2, SparsePoly(f, arena));
        for (unsigned li = 1; li <= w2; ++li) {
            for (unsigned lp = 1; lp <= w2; ++lp) {
                // entry (lp, li) = p_lp(omega^{li} y_i) + x_i p_lp((omega^{li} y_i)^{E_i})
                SparsePoly entry(f, arena);
                for (unsigned e = 0; e < w2; ++e) {
                    std::uint64_t c = data.lagrange[lp - 1][e];
                    if (c == 0) {
                        continue;
                    }
                    entry.add_term(Monomial::var(yvar(i), e), f.mul(c, omega_pow(li, e)));
                    entry.add_term(
                        Monomial::var(layer_x(i))
                            .times(Monomial::var(yvar(i), to_exponent(std::uint64_t(e) * ei,
                                                                      "fs witness"))),
                        f.mul(c, omega_pow(li, std::uint64_t(e) * ei)));
                }
                if (!row[lp - 1].is_zero()) {
                    next[li - 1] += row[lp - 1].mul_budgeted(entry, budget);
                }
            }
        }
        row = std::move(next);
    }
    SparsePoly out(f, arena);
    for (unsigned ln = 1; ln <= w2; ++ln) {
        SparsePoly sink(f, arena);
        for (unsigned e = 0; e < w2; ++e) {
            sink.add_term(Monomial::var(yvar(n + 1), e), data.lagrange[ln - 1][e]);
        }
        out += row[ln - 1].mul_budgeted(sink, budget);
    }
    return out;
}

nlohmann::ordered_json GeneratorSpec::to_json() const
{
    nlohmann::ordered_json j;
    j["generator"] = gen_kind_name(kind);
    std::vector<std::uint64_t> flat_factors;
    for (const auto& [prime, mult] : field->factorization()) {
        for (unsigned i = 0; i < mult; ++i) {
            flat_factors.push_back(prime);
        }
    }
    j["field"] = { { "p", field->modulus() }, { "factors", flat_factors } };
    j["n"] = n;
    j["coordinates"] = coord_count();
    j["params"] = params;
    auto arity = seed_arity();
    if (arity) {
        j["seed_arity"] = *arity;
    } else {
        j["seed_arity"] = nullptr;
    }
    j["heuristic"] = heuristic;
    j["materialized"] = materialized;
    if (!note.empty()) {
        j["note"] = note;
    }
    if (!parts.empty()) {
        nlohmann::ordered_json jp = nlohmann::ordered_json::array();
        for (const auto& part : parts) {
            nlohmann::ordered_json one;
            one["generator"] = gen_kind_name(part.kind);
            one["params"] = part.params;
            one["seed_arity"] = part.seed_block.size();
            jp.push_back(std::move(one));
        }
        j["parts"] = std::move(jp);
    }
    return j;
}

GeneratorSpec build_rc(unsigned n, std::uint64_t r, const PrimeField& field)
{
    if (n == 0) {
        throw std::invalid_argument("rc: n must be >= 1");
    }
    check_seed_budget(r + n + 1, "rc");
    GeneratorSpec spec;
    spec.kind = GenKind::rc;
    spec.field = &field;
    spec.n = n;
    spec.arena = make_x_arena(n, spec.x_block);
    RcSeeds seeds = intern_rc_seeds(spec.arena, n, r, "y", "t");
    append_seeds(spec.seed_block, seeds);
    spec.params["n"] = n;
    spec.params["r"] = r;
    spec.witness = rc_witness(field, spec.arena, spec.x_block, seeds);
    return spec;
}

GeneratorSpec rc_specialize_t(const GeneratorSpec& spec, const std::string& t_name)
{
    if (spec.kind != GenKind::rc) {
        throw std::invalid_argument("rc_specialize_t: spec is not an rc generator");
    }
    if (spec.arena->find(t_name)) {
        throw std::invalid_argument("rc_specialize_t: variable '" + t_name
                                    + "' already exists in this arena");
    }
    std::uint64_t r = spec.params.at("r").get<std::uint64_t>();
    VarId t = spec.arena->intern(t_name);

    std::map<VarId, SparsePoly> images;
    // t_0 <- t, t_k <- t^{2^{k-1}}; the t-block sits after the r y-seeds
    for (unsigned k = 0; k <= spec.n; ++k) {
        VarId tk = spec.seed_block[r + k];
        std::uint32_t e = k == 0 ? 1 : to_exponent(std::uint64_t(1) << (k - 1),
                                                   "rc_specialize_t");
        SparsePoly img(*spec.field, spec.arena);
        img.add_term(Monomial::var(t, e), 1);
        images.emplace(tk, std::move(img));
    }

    GeneratorSpec out = spec;
    out.witness = spec.witness_poly().substitute(images);
    out.seed_block.assign(spec.seed_block.begin(), spec.seed_block.begin() + r);
    out.seed_block.push_back(t);
    out.params["specialized_t"] = t_name;
    return out;
}

GeneratorSpec build_ssv(unsigned n, unsigned k, const PrimeField& field)
{
    if (n == 0 || k == 0) {
        throw std::invalid_argument("ssv: n and k must be >= 1");
    }
    check_seed_budget(std::uint64_t(k) * (n + 1), "ssv");
    GeneratorSpec spec;
    spec.kind = GenKind::ssv;
    spec.field = &field;
    spec.n = n;
    spec.arena = make_x_arena(n, spec.x_block);
    SsvSeeds seeds = intern_ssv_seeds(spec.arena, n, k, "y", "z");
    append_seeds(spec.seed_block, seeds);
    spec.params["n"] = n;
    spec.params["k"] = k;
    spec.witness = ssv_witness(field, spec.arena, spec.x_block, seeds);
    return spec;
}

GeneratorSpec build_sssv(unsigned n, unsigned k, const PrimeField& field)
{
    GeneratorSpec spec = build_ssv(n, k, field);
    spec.kind = GenKind::sssv;
    spec.witness = spec.witness_poly() + all_ones_shift(field, spec.arena, spec.x_block);
    return spec;
}

GeneratorSpec build_trdeg(unsigned n, unsigned k, const PrimeField& field)
{
    if (n == 0 || k == 0) {
        throw std::invalid_argument("trdeg: n and k must be >= 1");
    }
    check_seed_budget(std::uint64_t(2) * k + 1 + 2 * (std::uint64_t(n) + 1), "trdeg");
    GeneratorSpec spec;
    spec.kind = GenKind::trdeg;
    spec.field = &field;
    spec.n = n;
    spec.arena = make_x_arena(n, spec.x_block);
    spec.params["n"] = n;
    spec.params["k"] = k;
    spec.note = "transcendence guarantee requires char(F) = 0 or char(F) > d^k "
                "for degree-d inputs";

    RcSeeds first = intern_rc_seeds(spec.arena, n, k + 1, "z", "s");
    SparsePoly w1 = rc_witness(field, spec.arena, spec.x_block, first);
    RcSeeds second = intern_rc_seeds(spec.arena, n, k, "y", "t");
    SparsePoly w2 = rc_witness(field, spec.arena, spec.x_block, second);

    spec.parts.push_back(child_rc_spec(spec, first, w1, k + 1));
    spec.parts.push_back(child_rc_spec(spec, second, w2, k));
    append_seeds(spec.seed_block, first);
    append_seeds(spec.seed_block, second);
    spec.witness = w1 + w2;
    return spec;
}

GeneratorSpec build_bms(unsigned n, std::uint64_t r, std::uint64_t s, const PrimeField& field)
{
    if (n == 0 || r == 0 || s == 0) {
        throw std::invalid_argument("bms: n, r, s must be >= 1");
    }
    std::uint64_t m = r * ceil_log2(s) + r * ceil_log2(r);
    if (m == 0) {
        m = 1;
    }
    check_seed_budget(r + n + 1 + m * (std::uint64_t(n) + 1), "bms");
    GeneratorSpec spec;
    spec.kind = GenKind::bms;
    spec.field = &field;
    spec.n = n;
    spec.arena = make_x_arena(n, spec.x_block);
    spec.params["n"] = n;
    spec.params["r"] = r;
    spec.params["s"] = s;
    spec.params["m"] = m;

    RcSeeds rc = intern_rc_seeds(spec.arena, n, r, "y", "t");
    SparsePoly w1 = rc_witness(field, spec.arena, spec.x_block, rc);
    SsvSeeds sv = intern_ssv_seeds(spec.arena, n, static_cast<unsigned>(m), "u", "z");
    SparsePoly w2 = ssv_witness(field, spec.arena, spec.x_block, sv)
                    + all_ones_shift(field, spec.arena, spec.x_block);

    spec.parts.push_back(child_rc_spec(spec, rc, w1, r));
    spec.parts.push_back(child_sssv_spec(spec, sv, w2, m));
    append_seeds(spec.seed_block, rc);
    append_seeds(spec.seed_block, sv);
    spec.witness = w1 + w2;
    return spec;
}

GeneratorSpec build_asss(unsigned n, unsigned k, unsigned depth, std::uint64_t s,
                         const PrimeField& field, std::optional<std::uint64_t> r_override)
{
    if (n == 0 || k == 0 || s == 0) {
        throw std::invalid_argument("asss: n, k, s must be >= 1");
    }
    if (depth < 3) {
        throw std::invalid_argument("asss: depth must be >= 3");
    }
    // R = (2k)^(2 depth 2^depth)
    std::optional<std::uint64_t> exact_r;
    long double log2_r = 0;
    if (depth < 64) {
        unsigned __int128 exponent =
            static_cast<unsigned __int128>(2) * depth * (static_cast<unsigned __int128>(1) << depth);
        exact_r = checked_pow(2ull * k, exponent);
        log2_r = static_cast<long double>(exponent) * std::log2(2.0L * k);
    } else {
        log2_r = std::numeric_limits<long double>::infinity();
    }

    GeneratorSpec spec;
    spec.kind = GenKind::asss;
    spec.field = &field;
    spec.n = n;
    spec.params["n"] = n;
    spec.params["k"] = k;
    spec.params["D"] = depth;
    spec.params["s"] = s;
    spec.note = "hitting guarantee requires char(F) = 0 or char(F) > s^R";

    std::uint64_t r;
    if (r_override) {
        r = *r_override;
        if (r == 0) {
            throw std::invalid_argument("asss: R override must be >= 1");
        }
        spec.heuristic = true;
        spec.params["R"] = r;
        if (exact_r) {
            spec.params["R_formula"] = *exact_r;
        }
        spec.note = "R overridden for desk-scale structural testing; no hitting "
                    "guarantee claimed at these parameters";
    } else {
        if (exact_r) {
            spec.params["R"] = *exact_r;
        } else {
            spec.params["R"] = nullptr;
            spec.params["log2_R"] = static_cast<double>(log2_r);
        }
        if (!exact_r || *exact_r > kAsssMaterializeCap) {
            // representable, not materializable
            spec.materialized = false;
            spec.arena = make_x_arena(n, spec.x_block);
            std::optional<std::uint64_t> m = checked_add(
                checked_mul(exact_r, ceil_log2(s)),
                checked_mul(exact_r, exact_r ? ceil_log2(*exact_r) : 0));
            if (m) {
                spec.params["m"] = *m;
            } else {
                spec.params["m"] = nullptr;
            }
            spec.note = "R = (2k)^(2*D*2^D) exceeds the materialization cap of "
                        + std::to_string(kAsssMaterializeCap)
                        + "; witness, image and compose need an R override";
            return spec;
        }
        r = *exact_r;
    }

    std::uint64_t m = r * ceil_log2(s) + r * ceil_log2(r);
    if (m == 0) {
        m = 1;
    }
    spec.params["m"] = m;
    std::uint64_t arity = (std::uint64_t(depth) - 2) * (r + n + 1) + m * (std::uint64_t(n) + 1);
    check_seed_budget(arity, "asss");

    spec.arena = make_x_arena(n, spec.x_block);
    SparsePoly total(field, spec.arena);
    for (unsigned part = 1; part + 2 <= depth; ++part) {
        RcSeeds rc = intern_rc_seeds(spec.arena, n, r, "y" + std::to_string(part) + "_",
                                     "t" + std::to_string(part) + "_");
        SparsePoly w = rc_witness(field, spec.arena, spec.x_block, rc);
        spec.parts.push_back(child_rc_spec(spec, rc, w, r));
        append_seeds(spec.seed_block, rc);
        total += w;
    }
    SsvSeeds sv = intern_ssv_seeds(spec.arena, n, static_cast<unsigned>(m), "u", "z");
    SparsePoly w2 = ssv_witness(field, spec.arena, spec.x_block, sv)
                    + all_ones_shift(field, spec.arena, spec.x_block);
    spec.parts.push_back(child_sssv_spec(spec, sv, w2, m));
    append_seeds(spec.seed_block, sv);
    total += w2;
    spec.witness = std::move(total);
    return spec;
}

GeneratorSpec build_fs(unsigned n, unsigned w, unsigned d, const PrimeField& field)
{
    if (n == 0 || w == 0 || d == 0) {
        throw std::invalid_argument("fs: n, w, d must be >= 1");
    }
    if (n >= 32) {
        throw std::invalid_argument("fs: coordinate count 2^n overflows at n >= 32");
    }
    std::uint64_t w2 = std::uint64_t(w) * w;
    if (w2 >= field.modulus()) {
        throw std::invalid_argument("fs: needs w^2 distinct interpolation nodes, but "
                                    "w^2 >= p");
    }
    // required order (N d w^2)^2
    unsigned __int128 base = static_cast<unsigned __int128>(std::uint64_t(1) << n) * d * w2;
    unsigned __int128 needed = base * base;
    if (needed > field.modulus() - 1) {
        throw std::invalid_argument("fs: no element of order >= (N*d*w^2)^2 = 2^"
                                    + std::to_string(static_cast<unsigned>(
                                          std::ceil(std::log2(static_cast<long double>(needed)))))
                                    + " exists in this field");
    }

    GeneratorSpec spec;
    spec.kind = GenKind::fs;
    spec.field = &field;
    spec.n = n;
    spec.arena = make_x_arena(n, spec.x_block);
    for (unsigned i = 1; i <= n + 1; ++i) {
        spec.seed_block.push_back(spec.arena->intern("y" + std::to_string(i)));
    }

    FsData data;
    data.w = w;
    data.d = d;
    data.omega = field.element_of_order(static_cast<std::uint64_t>(needed));
    // interpolation nodes 0..w^2-1; Lagrange basis coefficients from the
    // monic numerator prod_{j != l} (X - beta_j) scaled by its value at beta_l
    for (std::uint64_t b = 0; b < w2; ++b) {
        data.beta.push_back(b);
    }
    for (std::uint64_t l = 0; l < w2; ++l) {
        std::vector<std::uint64_t> num(1, 1); // coefficients, low degree first
        std::uint64_t denom = 1;
        for (std::uint64_t j = 0; j < w2; ++j) {
            if (j == l) {
                continue;
            }
            std::vector<std::uint64_t> next(num.size() + 1, 0);
            for (std::size_t e = 0; e < num.size(); ++e) {
                next[e + 1] = field.add(next[e + 1], num[e]);
                next[e] = field.sub(next[e], field.mul(data.beta[j], num[e]));
            }
            num = std::move(next);
            denom = field.mul(denom, field.sub(data.beta[l], data.beta[j]));
        }
        std::uint64_t scale = field.inv(denom);
        for (auto& c : num) {
            c = field.mul(c, scale);
        }
        num.resize(w2, 0);
        data.lagrange.push_back(std::move(num));
    }

    spec.params["n"] = n;
    spec.params["w"] = w;
    spec.params["d"] = d;
    spec.params["omega"] = data.omega;
    spec.params["omega_order_required"] = static_cast<std::uint64_t>(needed);
    spec.fs = std::move(data);
    return spec;
}

Planting ssv_plant(const GeneratorSpec& spec, const std::vector<std::set<unsigned>>& subsets)
{
    if (spec.kind != GenKind::ssv && spec.kind != GenKind::sssv) {
        throw std::invalid_argument("ssv_plant: spec is not an ssv/sssv generator");
    }
    unsigned k = spec.params.at("k").get<unsigned>();
    if (subsets.size() > k) {
        throw std::invalid_argument("ssv_plant: " + std::to_string(subsets.size())
                                    + " subsets exceed k = " + std::to_string(k));
    }
    for (std::size_t a = 0; a < subsets.size(); ++a) {
        for (unsigned e : subsets[a]) {
            if (e == 0 || e > spec.n) {
                throw std::invalid_argument("ssv_plant: subset element " + std::to_string(e)
                                            + " outside [1, n]");
            }
        }
        for (std::size_t b = a + 1; b < subsets.size(); ++b) {
            if (subsets[a] == subsets[b]) {
                throw std::invalid_argument("ssv_plant: subsets must be distinct");
            }
        }
    }

    // layout: y_1..y_k then z_{1,1}..z_{k,n}
    Planting out;
    for (unsigned i = 0; i < k; ++i) {
        VarId y = spec.seed_block[i];
        if (i < subsets.size()) {
            out.placements.emplace_back(subset_index(subsets[i], spec.n), y);
            for (unsigned j = 1; j <= spec.n; ++j) {
                VarId z = spec.seed_block[k + std::size_t(i) * spec.n + (j - 1)];
                out.fixing[z] = subsets[i].count(j) ? 1 : 0;
            }
        } else {
            out.fixing[y] = 0;
            for (unsigned j = 1; j <= spec.n; ++j) {
                VarId z = spec.seed_block[k + std::size_t(i) * spec.n + (j - 1)];
                out.fixing[z] = 0;
            }
        }
    }
    return out;
}

namespace {

std::vector<std::uint64_t> image_from_witness(const GeneratorSpec& spec,
                                              const std::vector<std::uint64_t>& alpha)
{
    const PrimeField& f = *spec.field;
    std::vector<int> x_pos(spec.arena->size(), -1);
    for (std::size_t i = 0; i < spec.x_block.size(); ++i) {
        x_pos[spec.x_block[i]] = static_cast<int>(i);
    }
    std::vector<int> seed_pos(spec.arena->size(), -1);
    for (std::size_t i = 0; i < spec.seed_block.size(); ++i) {
        seed_pos[spec.seed_block[i]] = static_cast<int>(i);
    }

    std::vector<std::uint64_t> out(spec.coord_count(), 0);
    for (const auto& [mono, coeff] : spec.witness_poly().terms()) {
        std::set<unsigned> subset;
        std::uint64_t value = coeff;
        for (const auto& [v, e] : mono.powers) {
            if (x_pos[v] >= 0) {
                if (e != 1) {
                    throw std::domain_error("generator witness is not multilinear in x");
                }
                subset.insert(static_cast<unsigned>(x_pos[v]) + 1);
            } else if (seed_pos[v] >= 0) {
                value = f.mul(value, f.pow(alpha[seed_pos[v]], std::uint64_t(e)));
            } else {
                // substituted-away seed (e.g. pre-specialization t_k); cannot
                // appear in terms, but guard anyway
                throw std::domain_error("witness references a variable outside the seed block");
            }
        }
        std::size_t idx = subset_index(subset, spec.n);
        out[idx - 1] = f.add(out[idx - 1], value);
    }
    return out;
}

std::vector<std::uint64_t> image_fs(const GeneratorSpec& spec,
                                    const std::vector<std::uint64_t>& alpha)
{
    const PrimeField& f = *spec.field;
    const FsData& data = *spec.fs;
    unsigned w2 = data.w * data.w;
    unsigned n = spec.n;

    auto lagrange_at = [&](unsigned l, std::uint64_t v) { // p_{l}(v), 1-based l
        std::uint64_t acc = 0;
        for (unsigned e = w2; e-- > 0;) {
            acc = f.add(f.mul(acc, v), data.lagrange[l - 1][e]);
        }
        return acc;
    };
    auto layer_exponent = [&](unsigned i) {
        return static_cast<unsigned __int128>(std::uint64_t(1) << (i - 1)) * data.d * w2;
    };
    auto layer_x = [&](unsigned i) {
        return spec.x_block[(data.order.empty() ? i : data.order[i - 1]) - 1];
    };

    // row vector of multilinear polynomials in x_1..x_i; width w^2
    std::vector<SparsePoly> row;
    {
        unsigned __int128 e1 = layer_exponent(1);
        for (unsigned l1 = 1; l1 <= w2; ++l1) {
            std::uint64_t base = f.mul(f.pow(data.omega, std::uint64_t(l1)), alpha[0]);
            SparsePoly entry = SparsePoly::constant(f, spec.arena, base);
            entry.add_term(Monomial::var(layer_x(1)), f.pow(base, e1));
            row.push_back(std::move(entry));
        }
    }
    for (unsigned i = 2; i <= n; ++i) {
        unsigned __int128 ei = layer_exponent(i);
        std::vector<SparsePoly> next(w2, SparsePoly(f, spec.arena));
        for (unsigned li = 1; li <= w2; ++li) {
            std::uint64_t base = f.mul(f.pow(data.omega, std::uint64_t(li)), alpha[i - 1]);
            std::uint64_t powered = f.pow(base, ei);
            for (unsigned lp = 1; lp <= w2; ++lp) {
                SparsePoly entry = SparsePoly::constant(f, spec.arena, lagrange_at(lp, base));
                entry.add_term(Monomial::var(layer_x(i)), lagrange_at(lp, powered));
                if (!row[lp - 1].is_zero()) {
                    next[li - 1] += row[lp - 1] * entry;
                }
            }
        }
        row = std::move(next);
    }
    SparsePoly total(f, spec.arena);
    for (unsigned ln = 1; ln <= w2; ++ln) {
        total += row[ln - 1].scaled(lagrange_at(ln, alpha[n]));
    }
    return coeff_extract(total, spec.x_block).to_values();
}

} // namespace

std::vector<std::uint64_t> generator_image(const GeneratorSpec& spec,
                                           const std::vector<std::uint64_t>& alpha)
{
    if (!spec.materialized) {
        spec.witness_poly(); // throws with the R-override message
    }
    if (alpha.size() != spec.seed_block.size()) {
        throw std::invalid_argument("generator_image: seed assignment has arity "
                                    + std::to_string(alpha.size()) + ", spec needs "
                                    + std::to_string(spec.seed_block.size()));
    }
    if (spec.n > 24) {
        throw std::invalid_argument("generator_image: coordinate vector 2^n too large");
    }
    return spec.kind == GenKind::fs ? image_fs(spec, alpha) : image_from_witness(spec, alpha);
}

CoeffVector generator_coeff_map(const GeneratorSpec& spec, std::size_t budget)
{
    return coeff_extract(spec.witness_expanded(budget), spec.x_block);
}

SparsePoly generator_compose(const GeneratorSpec& spec, const Circuit& distinguisher,
                             std::size_t budget)
{
    if (distinguisher.field().modulus() != spec.field->modulus()) {
        throw std::invalid_argument("generator_compose: field mismatch");
    }
    if (distinguisher.arena()->size() != spec.coord_count()) {
        throw std::invalid_argument("generator_compose: distinguisher reads "
                                    + std::to_string(distinguisher.arena()->size())
                                    + " coefficients, generator map has "
                                    + std::to_string(spec.coord_count()));
    }
    CoeffVector cv = generator_coeff_map(spec, budget);
    return distinguisher.eval_poly(cv.entry, budget);
}

} // namespace pitgen
