#include "pitgen/pit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pitgen {

namespace {

constexpr std::size_t kPretestBudget = std::size_t(1) << 12;
constexpr std::size_t kGridBudget = std::size_t(1) << 20;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const PrimeField& member_field(const ClassMember& m)
{
    if (const auto* c = std::get_if<Circuit>(&m)) {
        return c->field();
    }
    return *std::get<RoAbp>(m).field;
}

// log2 of the per-evaluation Schwartz-Zippel bound deg/(field size), clamped
// to 0 from above (a bound over 1 says nothing)
double per_eval_log2(std::uint64_t deg, std::uint64_t p)
{
    if (deg == 0) {
        return kNegInf;
    }
    double b = std::log2(static_cast<double>(deg)) - std::log2(static_cast<double>(p));
    return std::min(b, 0.0);
}

SparsePoly compose_member(const GeneratorSpec& spec, const ClassMember& d, std::size_t budget)
{
    if (const auto* c = std::get_if<Circuit>(&d)) {
        return generator_compose(spec, *c, budget);
    }
    const RoAbp& r = std::get<RoAbp>(d);
    if (r.field->modulus() != spec.field->modulus()) {
        throw std::invalid_argument("hit_check: distinguisher and generator field mismatch");
    }
    if (r.arena->size() != spec.coord_count()) {
        throw std::invalid_argument("hit_check: distinguisher must read exactly 2^n variables");
    }
    CoeffVector cv = generator_coeff_map(spec, budget);
    SparsePoly expanded = r.expand(budget);
    std::map<VarId, SparsePoly> images;
    for (VarId v = 0; v < r.arena->size(); ++v) {
        images.emplace(v, cv.entry[v]);
    }
    return expanded.substitute(images, budget);
}

std::map<VarId, std::uint64_t> seed_assignment(const GeneratorSpec& spec,
                                               const std::vector<std::uint64_t>& alpha)
{
    std::map<VarId, std::uint64_t> point;
    for (std::size_t i = 0; i < spec.seed_block.size(); ++i) {
        point[spec.seed_block[i]] = alpha[i];
    }
    return point;
}

// A seed point where the (nonzero) composed polynomial does not vanish:
// random probes first, then a deterministic sweep over degree_in+1 values
// per occurring variable, which must succeed when those values fit the field.
std::pair<std::vector<std::uint64_t>, std::uint64_t> witness_point(const SparsePoly& q,
                                                                   const GeneratorSpec& spec,
                                                                   std::uint64_t seed)
{
    const PrimeField& f = q.field();
    std::size_t ell = spec.seed_block.size();
    std::vector<std::uint64_t> alpha(ell, 0);
    auto value_at = [&]() { return q.eval(seed_assignment(spec, alpha)); };

    Rng rng(seed);
    for (int probe = 0; probe < 512; ++probe) {
        for (auto& a : alpha) {
            a = f.random_element(rng);
        }
        if (std::uint64_t v = value_at(); v != 0) {
            return { alpha, v };
        }
    }

    std::set<VarId> used = q.support();
    std::vector<std::size_t> slots;   // indices into alpha that the sweep moves
    std::vector<std::uint64_t> sizes; // grid extent per slot
    std::size_t total = 1;
    for (std::size_t i = 0; i < ell; ++i) {
        if (used.count(spec.seed_block[i]) == 0) {
            continue;
        }
        std::uint64_t extent =
            std::min<std::uint64_t>(q.degree_in(spec.seed_block[i]) + 1, f.modulus());
        slots.push_back(i);
        sizes.push_back(extent);
        if (total > kGridBudget / extent) {
            throw std::runtime_error("hit_check: witness sweep grid exceeds the budget");
        }
        total *= extent;
    }
    std::fill(alpha.begin(), alpha.end(), 0);
    std::vector<std::uint64_t> odo(slots.size(), 0);
    for (std::size_t step = 0; step < total; ++step) {
        for (std::size_t j = 0; j < slots.size(); ++j) {
            alpha[slots[j]] = odo[j];
        }
        if (std::uint64_t v = value_at(); v != 0) {
            return { alpha, v };
        }
        for (std::size_t j = 0; j < odo.size(); ++j) {
            if (++odo[j] < sizes[j]) {
                break;
            }
            odo[j] = 0;
        }
    }
    throw std::runtime_error(
        "hit_check: composition is a nonzero polynomial but vanishes everywhere on the "
        "sweep; the field is too small to exhibit a witness point");
}

unsigned rank_mod(std::vector<std::vector<std::uint64_t>> rows, const PrimeField& f)
{
    if (rows.empty()) {
        return 0;
    }
    std::size_t cols = rows[0].size();
    unsigned rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][c] == 0) {
            ++pivot;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[pivot], rows[rank]);
        std::uint64_t inv = f.inv(rows[rank][c]);
        for (std::size_t j = c; j < cols; ++j) {
            rows[rank][j] = f.mul(rows[rank][j], inv);
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][c] == 0) {
                continue;
            }
            std::uint64_t factor = rows[r][c];
            for (std::size_t j = c; j < cols; ++j) {
                rows[r][j] = f.sub(rows[r][j], f.mul(factor, rows[rank][j]));
            }
        }
        ++rank;
    }
    return rank;
}

} // namespace

std::string hit_outcome_name(HitOutcome o)
{
    switch (o) {
        case HitOutcome::input_zero: return "input-zero";
        case HitOutcome::symbolically_zero: return "symbolically-zero";
        case HitOutcome::probably_zero: return "probably-zero";
        case HitOutcome::nonzero_witness: return "nonzero-witness";
    }
    throw std::logic_error("hit_outcome_name: unknown outcome");
}

nlohmann::ordered_json HitVerdict::to_json() const
{
    nlohmann::ordered_json j;
    j["outcome"] = hit_outcome_name(outcome);
    j["seed_point"] = seed_point;
    j["value"] = value;
    j["trials"] = trials;
    j["failure_log2"] = std::isfinite(failure_log2) ? nlohmann::ordered_json(failure_log2)
                                                    : nlohmann::ordered_json();
    return j;
}

HitVerdict hit_check(const ClassMember& distinguisher, const GeneratorSpec& spec,
                     const HitCheckMode& mode, std::uint64_t seed, std::size_t budget)
{
    if (!spec.materialized) {
        spec.witness_poly(); // throws with the R-override guidance
    }
    const PrimeField& f = *spec.field;
    if (member_field(distinguisher).modulus() != f.modulus()) {
        throw std::invalid_argument("hit_check: distinguisher and generator field mismatch");
    }
    if (member_arena(distinguisher)->size() != spec.coord_count()) {
        throw std::invalid_argument("hit_check: distinguisher must read exactly 2^n variables");
    }

    // cheap exact pretest for the zero polynomial; skipped when even the
    // small budget cannot expand the distinguisher
    try {
        if (member_expand(distinguisher, std::min(budget, kPretestBudget)).is_zero()) {
            return { HitOutcome::input_zero, {}, 0, 0, 0.0 };
        }
    } catch (const ExpansionBudgetError&) {
    }

    if (mode.symbolic) {
        std::optional<SparsePoly> q;
        try {
            q.emplace(compose_member(spec, distinguisher, budget));
        } catch (const ExpansionBudgetError& e) {
            throw std::runtime_error(std::string("hit_check: symbolic composition needs more "
                                                 "than the term budget (")
                                     + e.what() + "); rerun in randomized mode");
        }
        if (q->is_zero()) {
            return { HitOutcome::symbolically_zero, {}, 0, 0, 0.0 };
        }
        auto [alpha, value] = witness_point(*q, spec, seed);
        return { HitOutcome::nonzero_witness, std::move(alpha), value, 0, 0.0 };
    }

    if (mode.trials == 0) {
        throw std::invalid_argument("hit_check: randomized mode needs at least one evaluation");
    }
    std::uint64_t delta = generator_seed_degree(spec);
    std::uint64_t dd = member_degree_bound(distinguisher);
    std::uint64_t composed_deg =
        (delta != 0 && dd > std::numeric_limits<std::uint64_t>::max() / delta)
            ? std::numeric_limits<std::uint64_t>::max()
            : delta * dd;
    double per_trial = per_eval_log2(composed_deg, f.modulus());

    Rng master(seed);
    std::vector<std::uint64_t> alpha(spec.seed_block.size());
    for (unsigned t = 0; t < mode.trials; ++t) {
        Rng r = master.derive(t);
        for (auto& a : alpha) {
            a = f.random_element(r);
        }
        std::uint64_t v = member_eval(distinguisher, generator_image(spec, alpha));
        if (v != 0) {
            return { HitOutcome::nonzero_witness, alpha, v, t + 1, 0.0 };
        }
    }
    double failure = per_trial == kNegInf ? kNegInf : mode.trials * per_trial;
    return { HitOutcome::probably_zero, {}, 0, mode.trials, failure };
}

std::uint64_t generator_seed_degree(const GeneratorSpec& spec)
{
    if (spec.kind == GenKind::fs) {
        // layer 1 carries y_1^{E_1}; layers i >= 2 carry Lagrange polynomials
        // of degree w^2-1 in y_i^{E_i}; the sink adds deg <= w^2-1 in y_{n+1}
        const FsData& data = *spec.fs;
        unsigned w2 = data.w * data.w;
        unsigned __int128 total = 0;
        for (unsigned i = 1; i <= spec.n; ++i) {
            unsigned __int128 ei =
                (static_cast<unsigned __int128>(1) << (i - 1)) * data.d * w2;
            total += (i == 1) ? ei : ei * (w2 - 1);
        }
        total += w2 - 1;
        if (total > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        return static_cast<std::uint64_t>(total);
    }
    const SparsePoly& w = spec.witness_poly();
    std::set<VarId> xs(spec.x_block.begin(), spec.x_block.end());
    std::uint64_t best = 0;
    for (const auto& [m, c] : w.terms()) {
        std::uint64_t deg = 0;
        for (const auto& [v, e] : m.powers) {
            if (xs.count(v) == 0) {
                deg += e;
            }
        }
        best = std::max(best, deg);
    }
    return best;
}

std::vector<std::vector<std::uint64_t>> interpolation_hitting_set(const GeneratorSpec& spec,
                                                                  std::uint64_t degree_bound)
{
    if (!spec.materialized) {
        spec.witness_poly();
    }
    const PrimeField& f = *spec.field;
    std::uint64_t delta = generator_seed_degree(spec);
    if (degree_bound != 0 && delta > (std::numeric_limits<std::uint64_t>::max() - 1) / degree_bound) {
        throw std::invalid_argument("interpolation_hitting_set: grid side overflows");
    }
    std::uint64_t side = delta * degree_bound + 1;
    if (side > f.modulus()) {
        throw std::invalid_argument(
            "interpolation_hitting_set: field too small: needs " + std::to_string(side)
            + " distinct points per seed, field has " + std::to_string(f.modulus()));
    }
    std::size_t ell = spec.seed_block.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < ell; ++i) {
        if (total > kGridBudget / side) {
            throw std::invalid_argument("interpolation_hitting_set: grid of "
                                        + std::to_string(side) + "^" + std::to_string(ell)
                                        + " points exceeds the enumeration budget");
        }
        total *= side;
    }

    std::vector<std::vector<std::uint64_t>> out;
    out.reserve(total);
    std::vector<std::uint64_t> alpha(ell, 0);
    for (std::size_t step = 0; step < total; ++step) {
        out.push_back(generator_image(spec, alpha));
        for (std::size_t j = 0; j < ell; ++j) {
            if (++alpha[j] < side) {
                break;
            }
            alpha[j] = 0;
        }
    }
    return out;
}

std::vector<std::vector<SparsePoly>> jacobian(const std::vector<SparsePoly>& polys)
{
    std::vector<std::vector<SparsePoly>> rows;
    if (polys.empty()) {
        return rows;
    }
    const ArenaPtr& arena = polys[0].arena();
    for (const SparsePoly& p : polys) {
        if (p.arena() != arena) {
            throw std::invalid_argument("jacobian: polynomials must share one arena");
        }
    }
    for (const SparsePoly& p : polys) {
        std::vector<SparsePoly> row;
        for (VarId v = 0; v < arena->size(); ++v) {
            row.push_back(p.derivative(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

JacobianRank jacobian_rank(const std::vector<SparsePoly>& polys, Rng& rng)
{
    JacobianRank out;
    if (polys.empty()) {
        out.failure_log2 = kNegInf; // nothing to underestimate
        return out;
    }
    const PrimeField& f = polys[0].field();
    std::vector<std::vector<SparsePoly>> jac = jacobian(polys);
    std::size_t nvars = polys[0].arena()->size();

    unsigned best = 0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint64_t> point(nvars);
        for (auto& x : point) {
            x = f.random_element(rng);
        }
        std::vector<std::vector<std::uint64_t>> numeric;
        for (const auto& row : jac) {
            std::vector<std::uint64_t> r;
            for (const SparsePoly& e : row) {
                r.push_back(e.eval(point));
            }
            numeric.push_back(std::move(r));
        }
        best = std::max(best, rank_mod(std::move(numeric), f));
    }
    out.rank = best;

    std::uint64_t d = 0;
    for (const SparsePoly& p : polys) {
        d = std::max<std::uint64_t>(d, p.degree());
    }
    // characteristic condition p >= d^rank
    out.char_condition_ok = true;
    if (d > 1) {
        std::uint64_t acc = 1;
        for (unsigned i = 0; i < best && out.char_condition_ok; ++i) {
            if (acc > f.modulus() / d) {
                out.char_condition_ok = false;
            } else {
                acc *= d;
            }
        }
        if (out.char_condition_ok && acc > f.modulus()) {
            out.char_condition_ok = false;
        }
    }
    // a rank-r minor has degree <= r(d-1) < rd; five independent draws
    std::uint64_t minor_deg = (d == 0) ? 0 : std::max<std::uint64_t>(1, best) * d;
    double per = per_eval_log2(minor_deg, f.modulus());
    out.failure_log2 = per == kNegInf ? kNegInf : 5 * per;
    return out;
}

bool rank_concentration_check(const std::vector<SparsePoly>& fmat,
                              const std::vector<std::uint64_t>& point, unsigned k)
{
    if (fmat.empty()) {
        return true;
    }
    const ArenaPtr& arena = fmat[0].arena();
    const PrimeField& f = fmat[0].field();
    for (const SparsePoly& p : fmat) {
        if (p.arena() != arena) {
            throw std::invalid_argument("rank_concentration_check: entries must share an arena");
        }
    }
    if (arena->size() > 12) {
        throw std::invalid_argument(
            "rank_concentration_check: at most 12 variables are enumerable");
    }
    if (point.size() != arena->size()) {
        throw std::invalid_argument("rank_concentration_check: point arity mismatch");
    }

    // coefficient vectors of F(X + v): column m is the m-th Hasse derivative
    // of the entries, evaluated at v
    std::map<Monomial, std::vector<std::uint64_t>> columns;
    for (std::size_t i = 0; i < fmat.size(); ++i) {
        SparsePoly shifted = fmat[i].shift(point);
        for (const auto& [m, c] : shifted.terms()) {
            auto it = columns.find(m);
            if (it == columns.end()) {
                it = columns.emplace(m, std::vector<std::uint64_t>(fmat.size(), 0)).first;
            }
            it->second[i] = c;
        }
    }
    if (columns.size() > (std::size_t(1) << 16)) {
        throw std::invalid_argument("rank_concentration_check: enumeration budget exceeded");
    }
    std::vector<std::vector<std::uint64_t>> all, low;
    for (const auto& [m, vec] : columns) {
        all.push_back(vec);
        if (m.support_size() <= k) {
            low.push_back(vec);
        }
    }
    return rank_mod(std::move(low), f) == rank_mod(std::move(all), f);
}

AuditResult natural_proof_audit(const ClassMember& distinguisher,
                                const std::vector<std::vector<std::uint64_t>>& samples)
{
    const ArenaPtr& arena = member_arena(distinguisher);
    bool known_nonzero = false;
    try {
        if (member_expand(distinguisher, kPretestBudget).is_zero()) {
            throw std::invalid_argument(
                "natural_proof_audit: the zero polynomial is not a distinguisher");
        }
        known_nonzero = true;
    } catch (const ExpansionBudgetError&) {
        const PrimeField& f = member_field(distinguisher);
        Rng rng(0x7e57);
        std::vector<std::uint64_t> point(arena->size());
        for (int probe = 0; probe < 32 && !known_nonzero; ++probe) {
            for (auto& x : point) {
                x = f.random_element(rng);
            }
            known_nonzero = member_eval(distinguisher, point) != 0;
        }
        if (!known_nonzero) {
            throw std::invalid_argument(
                "natural_proof_audit: the distinguisher evaluates to zero everywhere probed; "
                "not accepted as nonzero");
        }
    }

    AuditResult out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != arena->size()) {
            throw std::invalid_argument("natural_proof_audit: sample arity mismatch");
        }
        std::uint64_t v = member_eval(distinguisher, samples[i]);
        if (v != 0) {
            out.is_distinguisher = false;
            out.hit_index = i;
            out.hit_sample = samples[i];
            out.hit_value = v;
            return out;
        }
    }
    out.is_distinguisher = true;
    return out;
}

std::pair<std::string, std::vector<std::string>> guarantee_label(const ClassDescriptor& cls,
                                                                 const GeneratorSpec& spec)
{
    std::vector<std::string> notes;
    const PrimeField& f = *spec.field;
    std::uint64_t ncoords = spec.coord_count();

    if (spec.heuristic) {
        notes.push_back(spec.note.empty() ? "generator flagged heuristic" : spec.note);
        return { "heuristic", notes };
    }

    auto param_u64 = [&](const char* key) -> std::uint64_t {
        return spec.params.contains(key) && !spec.params[key].is_null()
                   ? spec.params[key].get<std::uint64_t>()
                   : 0;
    };

    if (const auto* c = std::get_if<SigmaPiClass>(&cls)) {
        if (spec.kind == GenKind::sssv) {
            unsigned need = std::min<unsigned>(ceil_log2(c->s), spec.n);
            std::uint64_t k = param_u64("k");
            notes.push_back("s-sparse class needs planted support k >= ceil(log2 s) = "
                            + std::to_string(need) + "; spec has k = " + std::to_string(k));
            return { k >= need ? "guaranteed" : "heuristic", notes };
        }
        if (spec.kind == GenKind::bms) {
            std::uint64_t s = param_u64("s");
            std::uint64_t r = param_u64("r");
            bool s_ok = c->s <= s;
            notes.push_back("sparse summands: class s = " + std::to_string(c->s)
                            + " vs spec s = " + std::to_string(s));
            // transcendence argument needs char(F) > d^r
            std::uint64_t acc = 1;
            bool char_ok = true;
            for (std::uint64_t i = 0; i < r && char_ok; ++i) {
                if (c->max_degree > 1 && acc > f.modulus() / c->max_degree) {
                    char_ok = false;
                } else {
                    acc *= std::max<std::uint64_t>(c->max_degree, 1);
                }
            }
            char_ok = char_ok && f.modulus() > acc;
            notes.push_back(std::string("char condition p > d^r ")
                            + (char_ok ? "holds" : "fails"));
            return { s_ok && char_ok ? "guaranteed" : "heuristic", notes };
        }
    }
    if (const auto* c = std::get_if<SigmaKPiSigmaClass>(&cls)) {
        if (spec.kind == GenKind::rc) {
            std::uint64_t r = param_u64("r");
            notes.push_back("fan-in " + std::to_string(c->k) + " depth-3 runs use r = k^2+1 = "
                            + std::to_string(std::uint64_t(c->k) * c->k + 1)
                            + " (infinite-field rank bound; the finite-field constant is "
                              "unspecified), spec has r = "
                            + std::to_string(r));
            return { "heuristic", notes };
        }
    }
    if (const auto* c = std::get_if<CommRoAbpClass>(&cls)) {
        if (spec.kind == GenKind::ssv) {
            unsigned need = 1 + 4 * ceil_log2(c->w);
            std::uint64_t k = param_u64("k");
            bool k_ok = k >= need;
            unsigned __int128 nd = static_cast<unsigned __int128>(ncoords) * c->d;
            bool field_ok = static_cast<unsigned __int128>(f.modulus()) > nd;
            notes.push_back("commutative roABP width " + std::to_string(c->w)
                            + " needs k >= 1 + 4 ceil(log2 w) = " + std::to_string(need)
                            + "; spec has k = " + std::to_string(k));
            notes.push_back("|F| > nd: p = " + std::to_string(f.modulus()) + " vs n*d = "
                            + std::to_string(static_cast<std::uint64_t>(nd))
                            + (field_ok ? " (holds)" : " (fails)"));
            return { k_ok && field_ok ? "guaranteed" : "heuristic", notes };
        }
    }
    if (const auto* c = std::get_if<RoAbpClass>(&cls)) {
        if (spec.kind == GenKind::fs) {
            bool order_ok = c->order.empty() && spec.fs->order.empty();
            bool fits = spec.fs->w >= c->w && spec.fs->d >= c->d;
            notes.push_back("read-once ABP class (w = " + std::to_string(c->w) + ", d = "
                            + std::to_string(c->d) + ") vs spec (w = "
                            + std::to_string(spec.fs->w) + ", d = " + std::to_string(spec.fs->d)
                            + "); order " + (order_ok ? "x1..xN on both sides" : "mismatched"));
            if (spec.params.contains("omega_order_required")) {
                notes.push_back("omega order requirement "
                                + spec.params["omega_order_required"].dump()
                                + " checked at build time");
            }
            return { order_ok && fits ? "guaranteed" : "heuristic", notes };
        }
    }
    if (std::get_if<OccurKClass>(&cls) != nullptr && spec.kind == GenKind::asss) {
        // reaching here means no R override; the construction picked the full
        // formula R, so only the characteristic condition remains
        std::uint64_t s = param_u64("s");
        std::uint64_t r = param_u64("R");
        bool char_ok = false;
        if (s <= 1) {
            char_ok = true;
        } else if (r < 64 && r * ceil_log2(s) < 64) {
            std::uint64_t acc = 1;
            char_ok = true;
            for (std::uint64_t i = 0; i < r && char_ok; ++i) {
                if (acc > f.modulus() / s) {
                    char_ok = false;
                } else {
                    acc *= s;
                }
            }
            char_ok = char_ok && f.modulus() > acc;
        }
        notes.push_back(std::string("char condition p > s^R ")
                        + (char_ok ? "holds" : "fails"));
        return { char_ok ? "guaranteed" : "heuristic", notes };
    }
    if (std::get_if<SmespClass>(&cls) != nullptr && spec.kind == GenKind::sssv) {
        notes.push_back("shifted-monomial classes use an artifact-chosen support constant; "
                        "no recorded finite constant");
        return { "heuristic", notes };
    }

    notes.push_back("no recorded guarantee for pairing " + class_name(cls) + " with "
                    + gen_kind_name(spec.kind));
    return { "heuristic", notes };
}

nlohmann::ordered_json ExperimentReport::to_json() const
{
    nlohmann::ordered_json j;
    j["class"] = class_desc;
    j["generator"] = generator;
    j["field"] = field_p;
    j["seed"] = master_seed;
    j["mode"] = mode;
    j["evals_per_trial"] = evals_per_trial;
    j["trials"] = trials;
    j["hits"] = hits;
    j["failures"] = failures();
    j["guarantee"] = guarantee;
    j["per_trial_failure_log2"] = std::isfinite(per_trial_failure_log2)
                                      ? nlohmann::ordered_json(per_trial_failure_log2)
                                      : nlohmann::ordered_json();
    j["notes"] = notes;
    nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
    for (const TrialRow& row : rows) {
        nlohmann::ordered_json r;
        r["trial"] = row.trial;
        r["outcome"] = row.outcome;
        r["value"] = row.value;
        r["seed_point"] = row.seed_point;
        r["check_seed"] = row.check_seed;
        if (!row.member.is_null()) {
            r["member"] = row.member;
        }
        rows_json.push_back(std::move(r));
    }
    j["rows"] = std::move(rows_json);
    return j;
}

std::string ExperimentReport::to_csv() const
{
    std::ostringstream out;
    out << "trial,outcome,value,check_seed\n";
    for (const TrialRow& row : rows) {
        out << row.trial << ',' << row.outcome << ',' << row.value << ',' << row.check_seed
            << '\n';
    }
    return out.str();
}

ExperimentReport run_experiment(const ClassDescriptor& cls, const GeneratorSpec& spec,
                                unsigned trials, std::uint64_t master_seed,
                                const ExperimentOptions& opt)
{
    auto t0 = std::chrono::steady_clock::now();
    if (!spec.materialized) {
        spec.witness_poly();
    }
    const PrimeField& f = *spec.field;
    if (spec.coord_count() > (std::uint64_t(1) << 20)) {
        throw std::invalid_argument("run_experiment: too many coordinate variables");
    }
    unsigned ncoords = static_cast<unsigned>(spec.coord_count());

    ExperimentReport rep;
    rep.class_desc = class_to_json(cls);
    rep.generator = spec.to_json();
    rep.field_p = f.modulus();
    rep.master_seed = master_seed;
    rep.mode = opt.symbolic ? "symbolic" : "randomized";
    rep.evals_per_trial = opt.symbolic ? 0 : opt.evals_per_trial;
    auto [label, notes] = guarantee_label(cls, spec);
    rep.guarantee = label;
    rep.notes = std::move(notes);
    rep.trials = trials;

    std::uint64_t delta = opt.symbolic ? 0 : generator_seed_degree(spec);
    HitCheckMode mode = opt.symbolic ? HitCheckMode::symbolic_mode()
                                     : HitCheckMode::randomized(opt.evals_per_trial);
    Rng master(master_seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng trial_rng = master.derive(t);
        ClassMember member = sample_class(cls, ncoords, f, trial_rng);
        std::uint64_t check_seed = trial_rng.next_u64();
        HitVerdict v = hit_check(member, spec, mode, check_seed, opt.budget);

        TrialRow row;
        row.trial = t;
        row.outcome = hit_outcome_name(v.outcome);
        row.value = v.value;
        row.seed_point = std::move(v.seed_point);
        row.check_seed = check_seed;
        if (v.hit()) {
            ++rep.hits;
        } else {
            row.member = member_to_json(member);
        }
        if (!opt.symbolic) {
            std::uint64_t dd = member_degree_bound(member);
            std::uint64_t composed =
                (delta != 0 && dd > std::numeric_limits<std::uint64_t>::max() / delta)
                    ? std::numeric_limits<std::uint64_t>::max()
                    : delta * dd;
            rep.per_trial_failure_log2 =
                std::max(rep.per_trial_failure_log2, per_eval_log2(composed, f.modulus()));
        }
        rep.rows.push_back(std::move(row));
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now()
                                                            - t0)
                      .count();
    return rep;
}

} // namespace pitgen
