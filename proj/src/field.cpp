#include "pitgen/field.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace pitgen {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw std::invalid_argument("Rng::below: bound must be positive");
    }
    // rejection keeps the draw unbiased and the stream portable
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = eng_();
    while (v >= limit) {
        v = eng_();
    }
    return v % bound;
}

Rng Rng::derive(std::uint64_t index) const
{
    return Rng(mix64(seed_ ^ mix64(index + 1)));
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t e, std::uint64_t m)
{
    std::uint64_t acc = 1 % m;
    std::uint64_t b = base % m;
    while (e) {
        if (e & 1) {
            acc = mulmod_u64(acc, b, m);
        }
        b = mulmod_u64(b, b, m);
        e >>= 1;
    }
    return acc;
}

} // namespace

bool is_prime_u64(std::uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (std::uint64_t p : { 2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL }) {
        if (n % p == 0) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs with the standard base set
    std::uint64_t d = n - 1;
    unsigned r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (std::uint64_t a : { 2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL }) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (unsigned i = 1; i < r; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t p, const std::vector<std::uint64_t>& factors_of_p_minus_1)
    : p_(p)
{
    if (!is_prime_u64(p)) {
        throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) + " is not prime");
    }
    std::vector<std::uint64_t> sorted = factors_of_p_minus_1;
    std::sort(sorted.begin(), sorted.end());
    unsigned __int128 prod = 1;
    for (std::uint64_t q : sorted) {
        if (!is_prime_u64(q)) {
            throw std::invalid_argument("PrimeField: factor " + std::to_string(q) + " is not prime");
        }
        prod *= q;
        if (prod > p - 1) {
            throw std::invalid_argument("PrimeField: factor product exceeds p-1");
        }
        if (!factors_.empty() && factors_.back().first == q) {
            ++factors_.back().second;
        } else {
            factors_.emplace_back(q, 1);
        }
    }
    if (prod != p - 1) {
        throw std::invalid_argument("PrimeField: factor product does not equal p-1");
    }

    // smallest generator: order-(p-1) element certified by the factorization
    g_ = p == 2 ? 1 : 0;
    for (std::uint64_t cand = 2; cand < p; ++cand) {
        bool ok = true;
        for (const auto& [q, e] : factors_) {
            if (pow(cand, (p - 1) / q) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            g_ = cand;
            break;
        }
    }
    if (g_ == 0) {
        throw std::invalid_argument("PrimeField: no generator found (bad factorization?)");
    }

    divisors_.push_back(1);
    for (const auto& [q, e] : factors_) {
        std::size_t old = divisors_.size();
        std::uint64_t qe = 1;
        for (unsigned i = 1; i <= e; ++i) {
            qe *= q;
            for (std::size_t j = 0; j < old; ++j) {
                divisors_.push_back(divisors_[j] * qe);
            }
        }
    }
    std::sort(divisors_.begin(), divisors_.end());
}

const PrimeField& PrimeField::goldilocks()
{
    static const PrimeField f(0xffffffff00000001ULL,
                              { 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
                                2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
                                3, 5, 17, 257, 65537 });
    return f;
}

std::uint64_t PrimeField::from_int(std::int64_t a) const
{
    if (a >= 0) {
        return static_cast<std::uint64_t>(a) % p_;
    }
    std::uint64_t m = static_cast<std::uint64_t>(-(a + 1)) + 1; // |a| without UB at INT64_MIN
    return neg(m % p_);
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t e) const
{
    if (e == 0) {
        return 1;
    }
    if (base == 0) {
        return 0;
    }
    std::uint64_t acc = 1;
    std::uint64_t b = base % p_;
    while (e) {
        if (e & 1) {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    return acc;
}

std::uint64_t PrimeField::pow(std::uint64_t base, unsigned __int128 e) const
{
    if (e == 0) {
        return 1;
    }
    if (base == 0) {
        return 0;
    }
    // Fermat: for nonzero base only e mod (p-1) matters
    return pow(base, static_cast<std::uint64_t>(e % (p_ - 1)));
}

std::uint64_t PrimeField::inv(std::uint64_t a) const
{
    if (a == 0) {
        throw std::domain_error("PrimeField::inv: zero has no inverse");
    }
    return pow(a, p_ - 2);
}

std::uint64_t PrimeField::multiplicative_order(std::uint64_t a) const
{
    if (a % p_ == 0) {
        throw std::domain_error("PrimeField::multiplicative_order: zero element");
    }
    std::uint64_t m = p_ - 1;
    for (const auto& [q, e] : factors_) {
        for (unsigned i = 0; i < e && m % q == 0 && pow(a, m / q) == 1; ++i) {
            m /= q;
        }
    }
    return m;
}

std::uint64_t PrimeField::smallest_order_at_least(std::uint64_t m_min) const
{
    auto it = std::lower_bound(divisors_.begin(), divisors_.end(), m_min);
    if (it == divisors_.end()) {
        throw std::domain_error("element_of_order: no divisor of p-1 is >= " + std::to_string(m_min));
    }
    return *it;
}

std::uint64_t PrimeField::element_of_order(std::uint64_t m_min) const
{
    std::uint64_t m = smallest_order_at_least(m_min);
    return pow(g_, (p_ - 1) / m);
}

std::vector<std::uint64_t> sample_points(const PrimeField& f, std::size_t count, Rng& rng)
{
    if (count > f.modulus()) {
        throw std::invalid_argument("sample_points: requested more points than the field has");
    }
    std::vector<std::uint64_t> out;
    out.reserve(count);
    std::unordered_set<std::uint64_t> seen;
    while (out.size() < count) {
        std::uint64_t v = f.random_element(rng);
        if (seen.insert(v).second) {
            out.push_back(v);
        }
    }
    return out;
}

} // namespace pitgen
