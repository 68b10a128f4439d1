#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pitgen/field.hpp"

namespace pitgen {

using VarId = std::uint32_t;

// Shared registry of variable names. Polynomials combine only when they live
// in the same arena (pointer identity); this catches accidental mixing of
// x-block variables with seed variables from an unrelated construction.
class VarArena {
  public:
    VarId intern(const std::string& name);
    const std::string& name(VarId v) const;
    std::optional<VarId> find(const std::string& name) const;
    std::size_t size() const { return names_.size(); }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarId> index_;
};

using ArenaPtr = std::shared_ptr<VarArena>;

// Symbolic expansion refuses to grow past this many terms unless the caller
// raises the limit explicitly.
inline constexpr std::size_t kDefaultTermBudget = std::size_t(1) << 22;

class ExpansionBudgetError : public std::runtime_error {
  public:
    ExpansionBudgetError(std::size_t limit, std::size_t attempted)
        : std::runtime_error("expansion exceeded the term budget: needs > "
                             + std::to_string(attempted) + " terms, limit is "
                             + std::to_string(limit)
                             + " (raise the budget to force materialization)")
        , limit(limit)
        , attempted(attempted)
    {}
    std::size_t limit;
    std::size_t attempted;
};

// ceil(log2(v)) with log(0) = log(1) = 0; this is the "log" in every
// parameter formula below.
unsigned ceil_log2(std::uint64_t v);

// Exponent vector, sorted by variable id, zero exponents never stored.
struct Monomial {
    std::vector<std::pair<VarId, std::uint32_t>> powers;

    static Monomial one() { return {}; }
    static Monomial var(VarId v, std::uint32_t e = 1);

    bool is_one() const { return powers.empty(); }
    unsigned total_degree() const;
    unsigned support_size() const { return static_cast<unsigned>(powers.size()); }
    std::uint32_t exponent_of(VarId v) const;

    Monomial times(const Monomial& other) const;
    Monomial pow(std::uint32_t e) const;

    // graded order, ties broken by the (var, exp) sequence; total and
    // canonical, which is all serialization needs
    bool operator<(const Monomial& m) const;
    bool operator==(const Monomial& m) const { return powers == m.powers; }
};

class SparsePoly;
using PolyMap = std::map<Monomial, std::uint64_t>;

// Multivariate polynomial with field coefficients, kept in canonical sorted
// form with no zero terms.
class SparsePoly {
  public:
    SparsePoly(const PrimeField& field, ArenaPtr arena)
        : field_(&field)
        , arena_(std::move(arena))
    {}

    static SparsePoly constant(const PrimeField& field, ArenaPtr arena, std::uint64_t c);
    static SparsePoly variable(const PrimeField& field, ArenaPtr arena, VarId v);

    const PrimeField& field() const { return *field_; }
    const ArenaPtr& arena() const { return arena_; }
    const PolyMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // constant term (0 for the zero polynomial); errors if other terms exist
    std::uint64_t constant_value() const;
    std::size_t term_count() const { return terms_.size(); }
    unsigned degree() const; // total degree, 0 for the zero polynomial
    unsigned degree_in(VarId v) const;
    std::set<VarId> support() const;

    void add_term(const Monomial& m, std::uint64_t coeff); // accumulates
    std::uint64_t coeff_of(const Monomial& m) const;

    SparsePoly operator+(const SparsePoly& o) const;
    SparsePoly operator-(const SparsePoly& o) const;
    SparsePoly operator*(const SparsePoly& o) const;
    SparsePoly& operator+=(const SparsePoly& o);
    SparsePoly& operator-=(const SparsePoly& o);
    SparsePoly scaled(std::uint64_t c) const;
    SparsePoly pow(std::uint32_t e, std::size_t budget = kDefaultTermBudget) const;
    SparsePoly mul_budgeted(const SparsePoly& o, std::size_t budget) const;
    bool operator==(const SparsePoly& o) const;

    // point must assign every variable occurring in the polynomial
    std::uint64_t eval(const std::map<VarId, std::uint64_t>& point) const;
    // positional: value[i] assigns arena variable i, size must equal arena size
    std::uint64_t eval(const std::vector<std::uint64_t>& point) const;

    // Simultaneous substitution. All image polynomials must share one arena.
    // When that target arena is the polynomial's own, unmapped variables pass
    // through unchanged; when it is a different arena, every variable of the
    // polynomial must be mapped.
    SparsePoly substitute(const std::map<VarId, SparsePoly>& images,
                          std::size_t budget = kDefaultTermBudget) const;

    SparsePoly derivative(VarId v) const;

    // f(X + alpha); alpha is positional over the whole arena
    SparsePoly shift(const std::vector<std::uint64_t>& alpha,
                     std::size_t budget = kDefaultTermBudget) const;

    // smallest |support| over terms; throws std::domain_error on the zero polynomial
    unsigned min_support_monomial() const;

    bool multilinear_in(const std::vector<VarId>& vars) const;

    std::string to_string() const;

  private:
    const PrimeField* field_;
    ArenaPtr arena_;
    PolyMap terms_;

    void check_compatible(const SparsePoly& o) const;
};

// The index bijection between subsets of [n] and [2^n]: subset S goes to
// i with i - 1 = sum_{k in S} 2^(k-1). Positions k are 1-based.
std::size_t subset_index(const std::set<unsigned>& s, unsigned n); // 1-based result
std::set<unsigned> index_subset(std::size_t i, unsigned n);        // inverse

// Dense coefficient vector of a polynomial that is multilinear in a
// designated x-block: entry i-1 holds the coefficient of prod_{k in S_i} x_k,
// itself a polynomial in the remaining (seed) variables.
struct CoeffVector {
    unsigned n = 0; // length is 2^n
    std::vector<SparsePoly> entry;

    // entries must all be constants; errors otherwise
    std::vector<std::uint64_t> to_values() const;
};

// Splits f along the x-block (f must be multilinear there; n <= 24).
CoeffVector coeff_extract(const SparsePoly& f, const std::vector<VarId>& x_block);

// Inverse of coeff_extract: sum_i entry[i-1] * prod_{k in S_i} x_k.
SparsePoly reassemble(const CoeffVector& cv, const std::vector<VarId>& x_block,
                      const PrimeField& field, const ArenaPtr& arena);

} // namespace pitgen
