#include "pitgen/mpoly.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

namespace pitgen {

VarId VarArena::intern(const std::string& name)
{
    auto it = index_.find(name);
    if (it != index_.end()) {
        return it->second;
    }
    VarId id = static_cast<VarId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

const std::string& VarArena::name(VarId v) const
{
    if (v >= names_.size()) {
        throw std::out_of_range("VarArena::name: unknown variable id " + std::to_string(v));
    }
    return names_[v];
}

std::optional<VarId> VarArena::find(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

unsigned ceil_log2(std::uint64_t v)
{
    if (v <= 1) {
        return 0;
    }
    return static_cast<unsigned>(std::bit_width(v - 1));
}

Monomial Monomial::var(VarId v, std::uint32_t e)
{
    Monomial m;
    if (e > 0) {
        m.powers.emplace_back(v, e);
    }
    return m;
}

unsigned Monomial::total_degree() const
{
    unsigned d = 0;
    for (const auto& [v, e] : powers) {
        d += e;
    }
    return d;
}

std::uint32_t Monomial::exponent_of(VarId v) const
{
    for (const auto& [w, e] : powers) {
        if (w == v) {
            return e;
        }
    }
    return 0;
}

Monomial Monomial::times(const Monomial& other) const
{
    Monomial out;
    out.powers.reserve(powers.size() + other.powers.size());
    auto a = powers.begin();
    auto b = other.powers.begin();
    while (a != powers.end() && b != other.powers.end()) {
        if (a->first < b->first) {
            out.powers.push_back(*a++);
        } else if (b->first < a->first) {
            out.powers.push_back(*b++);
        } else {
            out.powers.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    out.powers.insert(out.powers.end(), a, powers.end());
    out.powers.insert(out.powers.end(), b, other.powers.end());
    return out;
}

Monomial Monomial::pow(std::uint32_t e) const
{
    Monomial out;
    if (e == 0) {
        return out;
    }
    out.powers = powers;
    for (auto& [v, x] : out.powers) {
        std::uint64_t xe = static_cast<std::uint64_t>(x) * e;
        if (xe > 0xffffffffULL) {
            throw std::overflow_error("Monomial::pow: exponent overflow");
        }
        x = static_cast<std::uint32_t>(xe);
    }
    return out;
}

bool Monomial::operator<(const Monomial& m) const
{
    unsigned da = total_degree();
    unsigned db = m.total_degree();
    if (da != db) {
        return da < db;
    }
    return powers < m.powers;
}

SparsePoly SparsePoly::constant(const PrimeField& field, ArenaPtr arena, std::uint64_t c)
{
    SparsePoly p(field, std::move(arena));
    p.add_term(Monomial::one(), field.reduce(c));
    return p;
}

SparsePoly SparsePoly::variable(const PrimeField& field, ArenaPtr arena, VarId v)
{
    if (v >= arena->size()) {
        throw std::out_of_range("SparsePoly::variable: id not in arena");
    }
    SparsePoly p(field, std::move(arena));
    p.add_term(Monomial::var(v), 1);
    return p;
}

bool SparsePoly::is_constant() const
{
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

std::uint64_t SparsePoly::constant_value() const
{
    if (terms_.empty()) {
        return 0;
    }
    if (!is_constant()) {
        throw std::domain_error("SparsePoly::constant_value: polynomial is not constant");
    }
    return terms_.begin()->second;
}

unsigned SparsePoly::degree() const
{
    unsigned d = 0;
    for (const auto& [m, c] : terms_) {
        d = std::max(d, m.total_degree());
    }
    return d;
}

unsigned SparsePoly::degree_in(VarId v) const
{
    unsigned d = 0;
    for (const auto& [m, c] : terms_) {
        d = std::max(d, static_cast<unsigned>(m.exponent_of(v)));
    }
    return d;
}

std::set<VarId> SparsePoly::support() const
{
    std::set<VarId> s;
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m.powers) {
            s.insert(v);
        }
    }
    return s;
}

void SparsePoly::add_term(const Monomial& m, std::uint64_t coeff)
{
    coeff = field_->reduce(coeff);
    if (coeff == 0) {
        return;
    }
    auto [it, inserted] = terms_.emplace(m, coeff);
    if (!inserted) {
        it->second = field_->add(it->second, coeff);
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

std::uint64_t SparsePoly::coeff_of(const Monomial& m) const
{
    auto it = terms_.find(m);
    return it == terms_.end() ? 0 : it->second;
}

void SparsePoly::check_compatible(const SparsePoly& o) const
{
    if (field_->modulus() != o.field_->modulus()) {
        throw std::invalid_argument("polynomials live over different fields");
    }
    if (arena_ != o.arena_) {
        throw std::invalid_argument("polynomials live in different variable arenas");
    }
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& o)
{
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) {
        add_term(m, c);
    }
    return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& o)
{
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) {
        add_term(m, field_->neg(c));
    }
    return *this;
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const
{
    SparsePoly out = *this;
    out += o;
    return out;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const
{
    SparsePoly out = *this;
    out -= o;
    return out;
}

SparsePoly SparsePoly::mul_budgeted(const SparsePoly& o, std::size_t budget) const
{
    check_compatible(o);
    SparsePoly out(*field_, arena_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            out.add_term(ma.times(mb), field_->mul(ca, cb));
            if (out.terms_.size() > budget) {
                throw ExpansionBudgetError(budget, out.terms_.size());
            }
        }
    }
    return out;
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const
{
    return mul_budgeted(o, kDefaultTermBudget);
}

SparsePoly SparsePoly::scaled(std::uint64_t c) const
{
    c = field_->reduce(c);
    SparsePoly out(*field_, arena_);
    if (c == 0) {
        return out;
    }
    for (const auto& [m, x] : terms_) {
        out.terms_.emplace(m, field_->mul(x, c));
    }
    return out;
}

SparsePoly SparsePoly::pow(std::uint32_t e, std::size_t budget) const
{
    SparsePoly acc = SparsePoly::constant(*field_, arena_, 1);
    SparsePoly base = *this;
    while (e) {
        if (e & 1) {
            acc = acc.mul_budgeted(base, budget);
        }
        e >>= 1;
        if (e) {
            base = base.mul_budgeted(base, budget);
        }
    }
    return acc;
}

bool SparsePoly::operator==(const SparsePoly& o) const
{
    check_compatible(o);
    return terms_ == o.terms_;
}

std::uint64_t SparsePoly::eval(const std::map<VarId, std::uint64_t>& point) const
{
    std::uint64_t acc = 0;
    for (const auto& [m, c] : terms_) {
        std::uint64_t v = c;
        for (const auto& [var, e] : m.powers) {
            auto it = point.find(var);
            if (it == point.end()) {
                throw std::invalid_argument("SparsePoly::eval: no value for variable "
                                            + arena_->name(var));
            }
            v = field_->mul(v, field_->pow(it->second, static_cast<std::uint64_t>(e)));
        }
        acc = field_->add(acc, v);
    }
    return acc;
}

std::uint64_t SparsePoly::eval(const std::vector<std::uint64_t>& point) const
{
    if (point.size() != arena_->size()) {
        throw std::invalid_argument("SparsePoly::eval: point arity " + std::to_string(point.size())
                                    + " does not match arena size " + std::to_string(arena_->size()));
    }
    std::uint64_t acc = 0;
    for (const auto& [m, c] : terms_) {
        std::uint64_t v = c;
        for (const auto& [var, e] : m.powers) {
            v = field_->mul(v, field_->pow(point[var], static_cast<std::uint64_t>(e)));
        }
        acc = field_->add(acc, v);
    }
    return acc;
}

SparsePoly SparsePoly::substitute(const std::map<VarId, SparsePoly>& images, std::size_t budget) const
{
    if (images.empty()) {
        return *this;
    }
    const ArenaPtr& target = images.begin()->second.arena();
    for (const auto& [v, img] : images) {
        if (img.arena() != target) {
            throw std::invalid_argument("substitute: image polynomials span several arenas");
        }
        if (img.field().modulus() != field_->modulus()) {
            throw std::invalid_argument("substitute: image polynomial over a different field");
        }
    }
    bool same_arena = (target == arena_);

    // power cache per substituted variable
    std::map<VarId, std::vector<SparsePoly>> cache;
    auto power_of = [&](VarId v, std::uint32_t e) -> const SparsePoly& {
        auto& vec = cache[v];
        if (vec.empty()) {
            vec.push_back(SparsePoly::constant(*field_, target, 1));
        }
        while (vec.size() <= e) {
            vec.push_back(vec.back().mul_budgeted(images.at(v), budget));
        }
        return vec[e];
    };

    SparsePoly out(*field_, target);
    for (const auto& [m, c] : terms_) {
        SparsePoly term = SparsePoly::constant(*field_, target, c);
        Monomial passthrough;
        for (const auto& [v, e] : m.powers) {
            if (images.count(v)) {
                term = term.mul_budgeted(power_of(v, e), budget);
            } else if (same_arena) {
                passthrough.powers.emplace_back(v, e);
            } else {
                throw std::invalid_argument("substitute: variable " + arena_->name(v)
                                            + " has no image in the target arena");
            }
        }
        if (!passthrough.is_one()) {
            SparsePoly mono(*field_, target);
            mono.add_term(passthrough, 1);
            term = term.mul_budgeted(mono, budget);
        }
        out += term;
        if (out.terms_.size() > budget) {
            throw ExpansionBudgetError(budget, out.terms_.size());
        }
    }
    return out;
}

SparsePoly SparsePoly::derivative(VarId v) const
{
    SparsePoly out(*field_, arena_);
    for (const auto& [m, c] : terms_) {
        std::uint32_t e = m.exponent_of(v);
        if (e == 0) {
            continue;
        }
        Monomial d;
        for (const auto& [w, x] : m.powers) {
            if (w == v) {
                if (x > 1) {
                    d.powers.emplace_back(w, x - 1);
                }
            } else {
                d.powers.emplace_back(w, x);
            }
        }
        out.add_term(d, field_->mul(c, field_->reduce(e)));
    }
    return out;
}

SparsePoly SparsePoly::shift(const std::vector<std::uint64_t>& alpha, std::size_t budget) const
{
    if (alpha.size() != arena_->size()) {
        throw std::invalid_argument("shift: offset arity " + std::to_string(alpha.size())
                                    + " does not match arena size " + std::to_string(arena_->size()));
    }
    std::map<VarId, SparsePoly> images;
    for (VarId v = 0; v < alpha.size(); ++v) {
        if (alpha[v] % field_->modulus() == 0) {
            continue; // identity image
        }
        SparsePoly img = SparsePoly::variable(*field_, arena_, v);
        img.add_term(Monomial::one(), alpha[v]);
        images.emplace(v, std::move(img));
    }
    return substitute(images, budget);
}

unsigned SparsePoly::min_support_monomial() const
{
    if (terms_.empty()) {
        throw std::domain_error("min_support_monomial: zero polynomial");
    }
    unsigned best = std::numeric_limits<unsigned>::max();
    for (const auto& [m, c] : terms_) {
        best = std::min(best, m.support_size());
    }
    return best;
}

bool SparsePoly::multilinear_in(const std::vector<VarId>& vars) const
{
    std::set<VarId> block(vars.begin(), vars.end());
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m.powers) {
            if (e > 1 && block.count(v)) {
                return false;
            }
        }
    }
    return true;
}

std::string SparsePoly::to_string() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::vector<const PolyMap::value_type*> ordered;
    ordered.reserve(terms_.size());
    for (const auto& t : terms_) {
        ordered.push_back(&t);
    }
    // leading terms first, ties in ascending variable order
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        unsigned da = a->first.total_degree();
        unsigned db = b->first.total_degree();
        if (da != db) {
            return da > db;
        }
        return a->first.powers < b->first.powers;
    });

    std::ostringstream out;
    bool first = true;
    for (const auto* t : ordered) {
        if (!first) {
            out << " + ";
        }
        first = false;
        const auto& [m, c] = *t;
        if (m.is_one()) {
            out << c;
        } else {
            if (c != 1) {
                out << c << "*";
            }
            bool fv = true;
            for (const auto& [v, e] : m.powers) {
                if (!fv) {
                    out << "*";
                }
                fv = false;
                out << arena_->name(v);
                if (e > 1) {
                    out << "^" << e;
                }
            }
        }
    }
    return out.str();
}

std::size_t subset_index(const std::set<unsigned>& s, unsigned n)
{
    std::size_t bits = 0;
    for (unsigned k : s) {
        if (k < 1 || k > n) {
            throw std::invalid_argument("subset_index: position " + std::to_string(k)
                                        + " outside [1, " + std::to_string(n) + "]");
        }
        bits |= std::size_t(1) << (k - 1);
    }
    return bits + 1;
}

std::set<unsigned> index_subset(std::size_t i, unsigned n)
{
    if (i < 1 || i > (std::size_t(1) << n)) {
        throw std::invalid_argument("index_subset: index out of range");
    }
    std::set<unsigned> s;
    std::size_t bits = i - 1;
    for (unsigned k = 1; k <= n; ++k) {
        if (bits & (std::size_t(1) << (k - 1))) {
            s.insert(k);
        }
    }
    return s;
}

std::vector<std::uint64_t> CoeffVector::to_values() const
{
    std::vector<std::uint64_t> out;
    out.reserve(entry.size());
    for (const auto& p : entry) {
        if (!p.is_constant()) {
            throw std::domain_error("CoeffVector::to_values: entry still contains variables: "
                                    + p.to_string());
        }
        out.push_back(p.constant_value());
    }
    return out;
}

CoeffVector coeff_extract(const SparsePoly& f, const std::vector<VarId>& x_block)
{
    unsigned n = static_cast<unsigned>(x_block.size());
    if (n > 24) {
        throw std::invalid_argument("coeff_extract: x-block of " + std::to_string(n)
                                    + " variables exceeds the dense 2^24 limit");
    }
    std::map<VarId, unsigned> pos; // 1-based position in the block
    for (unsigned k = 0; k < n; ++k) {
        if (!pos.emplace(x_block[k], k + 1).second) {
            throw std::invalid_argument("coeff_extract: duplicate variable in x-block");
        }
    }

    CoeffVector cv;
    cv.n = n;
    cv.entry.assign(std::size_t(1) << n, SparsePoly(f.field(), f.arena()));
    for (const auto& [m, c] : f.terms()) {
        std::size_t bits = 0;
        Monomial rest;
        for (const auto& [v, e] : m.powers) {
            auto it = pos.find(v);
            if (it == pos.end()) {
                rest.powers.emplace_back(v, e);
            } else {
                if (e > 1) {
                    throw std::invalid_argument("coeff_extract: polynomial is not multilinear in "
                                                + f.arena()->name(v));
                }
                bits |= std::size_t(1) << (it->second - 1);
            }
        }
        cv.entry[bits].add_term(rest, c);
    }
    return cv;
}

SparsePoly reassemble(const CoeffVector& cv, const std::vector<VarId>& x_block,
                      const PrimeField& field, const ArenaPtr& arena)
{
    if (x_block.size() != cv.n) {
        throw std::invalid_argument("reassemble: x-block size does not match the vector");
    }
    SparsePoly out(field, arena);
    for (std::size_t i = 0; i < cv.entry.size(); ++i) {
        Monomial xs;
        for (unsigned k = 1; k <= cv.n; ++k) {
            if (i & (std::size_t(1) << (k - 1))) {
                xs.powers.emplace_back(x_block[k - 1], 1);
            }
        }
        std::sort(xs.powers.begin(), xs.powers.end());
        SparsePoly mono(field, arena);
        mono.add_term(xs, 1);
        out += cv.entry[i].mul_budgeted(mono, kDefaultTermBudget);
    }
    return out;
}

} // namespace pitgen
