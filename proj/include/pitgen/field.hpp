#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pitgen/rng.hpp"

namespace pitgen {

// Prime field F_p for word-sized p, with the factorization of p-1 kept on
// hand. The factorization is what lets us hand out elements of certified
// multiplicative order (needed by the read-once-ABP generator, which wants an
// omega of order >= (N*d*w^2)^2) without ever factoring at runtime.
//
// Elements are canonical residues stored as plain uint64_t; all arithmetic
// goes through the field object. The default field is p = 2^64 - 2^32 + 1,
// whose p-1 = 2^32 * 3 * 5 * 17 * 257 * 65537 is smooth enough to give a rich
// divisor lattice for order requests.
class PrimeField {
  public:
    // factors_of_p_minus_1: prime factors listed with multiplicity, in any
    // order (e.g. {2, 2} for p = 5). Throws std::invalid_argument if p is not
    // prime, a factor is not prime, or the product does not equal p - 1.
    PrimeField(std::uint64_t p, const std::vector<std::uint64_t>& factors_of_p_minus_1);

    static const PrimeField& goldilocks();

    std::uint64_t modulus() const { return p_; }
    // Smallest generator of the multiplicative group, found at construction.
    std::uint64_t generator() const { return g_; }
    // (prime, multiplicity) pairs, sorted by prime.
    const std::vector<std::pair<std::uint64_t, unsigned>>& factorization() const
    {
        return factors_;
    }

    std::uint64_t reduce(std::uint64_t a) const { return a % p_; }
    std::uint64_t from_int(std::int64_t a) const;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const
    {
        std::uint64_t s = a + b;
        if (s < a || s >= p_) {
            s -= p_;
        }
        return s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const
    {
        return a >= b ? a - b : a + (p_ - b);
    }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const
    {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
    }

    // 0^0 = 1 by convention; for nonzero bases exponents may be reduced
    // mod p-1, which the 128-bit overload relies on.
    std::uint64_t pow(std::uint64_t base, std::uint64_t e) const;
    std::uint64_t pow(std::uint64_t base, unsigned __int128 e) const;

    // Throws std::domain_error on 0.
    std::uint64_t inv(std::uint64_t a) const;
    std::uint64_t div(std::uint64_t a, std::uint64_t b) const { return mul(a, inv(b)); }

    // Exact multiplicative order of a nonzero element, computed against the
    // stored factorization.
    std::uint64_t multiplicative_order(std::uint64_t a) const;

    // Smallest divisor of p-1 that is >= m_min, or throws std::domain_error
    // if there is none (m_min > p-1).
    std::uint64_t smallest_order_at_least(std::uint64_t m_min) const;

    // g^((p-1)/m) for m = smallest_order_at_least(m_min): an element of exact
    // order m >= m_min.
    std::uint64_t element_of_order(std::uint64_t m_min) const;

    std::uint64_t random_element(Rng& rng) const { return rng.below(p_); }
    std::uint64_t random_nonzero(Rng& rng) const { return 1 + rng.below(p_ - 1); }

    std::string to_string(std::uint64_t a) const { return std::to_string(a); }

    bool operator==(const PrimeField& other) const { return p_ == other.p_; }

  private:
    std::uint64_t p_;
    std::uint64_t g_;
    std::vector<std::pair<std::uint64_t, unsigned>> factors_;
    std::vector<std::uint64_t> divisors_; // all divisors of p-1, sorted
};

// count distinct field elements, deterministic for a given rng stream.
// Throws std::invalid_argument if count > p.
std::vector<std::uint64_t> sample_points(const PrimeField& f, std::size_t count, Rng& rng);

bool is_prime_u64(std::uint64_t n);

} // namespace pitgen
