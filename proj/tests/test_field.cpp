#include "doctest.h"

#include "pitgen/field.hpp"

#include <algorithm>
#include <set>

using namespace pitgen;

TEST_CASE("goldilocks constants")
{
    const PrimeField& f = PrimeField::goldilocks();
    CHECK(f.modulus() == 0xffffffff00000001ULL);
    CHECK(f.generator() == 7);

    unsigned __int128 prod = 1;
    for (const auto& [q, e] : f.factorization()) {
        for (unsigned i = 0; i < e; ++i) {
            prod *= q;
        }
    }
    CHECK(prod == static_cast<unsigned __int128>(f.modulus()) - 1);
}

TEST_CASE("arithmetic basics")
{
    const PrimeField& f = PrimeField::goldilocks();
    std::uint64_t p = f.modulus();

    // 2^64 = p + (2^32 - 1), so doubling 2^63 lands on 2^32 - 1
    CHECK(f.mul(1ULL << 63, 2) == 0xffffffffULL);
    CHECK(f.add(p - 1, 1) == 0);
    CHECK(f.sub(0, 1) == p - 1);
    CHECK(f.neg(0) == 0);
    CHECK(f.from_int(-1) == p - 1);
    CHECK(f.from_int(-3) == p - 3);

    // (p+1)/2 is the inverse of 2
    CHECK(f.inv(2) == 0x7fffffff80000001ULL);
    CHECK_THROWS_AS(f.inv(0), std::domain_error);
    CHECK_THROWS_AS(f.div(3, 0), std::domain_error);

    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        std::uint64_t a = f.random_nonzero(rng);
        CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.pow(a, p - 1) == 1);
        CHECK(f.add(a, f.neg(a)) == 0);
    }
}

TEST_CASE("pow conventions")
{
    const PrimeField& f = PrimeField::goldilocks();
    CHECK(f.pow(0, std::uint64_t(0)) == 1);
    CHECK(f.pow(0, std::uint64_t(5)) == 0);
    CHECK(f.pow(1, std::uint64_t(1) << 63) == 1);

    // 128-bit exponents reduce mod p-1 for nonzero bases
    unsigned __int128 huge = static_cast<unsigned __int128>(f.modulus() - 1) * 12345 + 17;
    Rng rng(12);
    for (int i = 0; i < 20; ++i) {
        std::uint64_t a = f.random_nonzero(rng);
        CHECK(f.pow(a, huge) == f.pow(a, std::uint64_t(17)));
    }
    CHECK(f.pow(0, huge) == 0);
    CHECK(f.pow(0, static_cast<unsigned __int128>(0)) == 1);
}

TEST_CASE("field construction validation")
{
    CHECK_THROWS_AS(PrimeField(4, { 3 }), std::invalid_argument);          // not prime
    CHECK_THROWS_AS(PrimeField(5, { 4 }), std::invalid_argument);          // factor not prime
    CHECK_THROWS_AS(PrimeField(5, { 2 }), std::invalid_argument);          // product != p-1
    CHECK_THROWS_AS(PrimeField(5, { 2, 2, 2 }), std::invalid_argument);    // product != p-1
    CHECK_NOTHROW(PrimeField(5, { 2, 2 }));
    CHECK_NOTHROW(PrimeField(7, { 2, 3 }));

    PrimeField f5(5, { 2, 2 });
    CHECK(f5.generator() == 2); // 2 has order 4 mod 5
}

TEST_CASE("element_of_order small field oracle")
{
    // brute-force orders in F_7 and check the returned element against them
    PrimeField f7(7, { 2, 3 });
    auto order_of = [&](std::uint64_t a) {
        std::uint64_t acc = a;
        std::uint64_t ord = 1;
        while (acc != 1) {
            acc = f7.mul(acc, a);
            ++ord;
        }
        return ord;
    };

    std::uint64_t w = f7.element_of_order(3);
    // divisors of 6: 1, 2, 3, 6; smallest >= 3 is 3
    CHECK(f7.smallest_order_at_least(3) == 3);
    CHECK(order_of(w) == 3);

    CHECK(f7.smallest_order_at_least(4) == 6);
    CHECK(order_of(f7.element_of_order(4)) == 6);
    CHECK(order_of(f7.element_of_order(1)) == 1);
    CHECK_THROWS_AS(f7.smallest_order_at_least(7), std::domain_error);

    for (std::uint64_t a = 1; a < 7; ++a) {
        CHECK(f7.multiplicative_order(a) == order_of(a));
    }

    // exhaustive divisor oracle over F_97 (96 = 2^5 * 3)
    PrimeField f97(97, { 2, 2, 2, 2, 2, 3 });
    std::vector<std::uint64_t> divisors;
    for (std::uint64_t d = 1; d <= 96; ++d) {
        if (96 % d == 0) {
            divisors.push_back(d);
        }
    }
    for (std::uint64_t m_min = 1; m_min <= 96; ++m_min) {
        auto it = std::lower_bound(divisors.begin(), divisors.end(), m_min);
        if (it == divisors.end()) {
            CHECK_THROWS_AS(f97.smallest_order_at_least(m_min), std::domain_error);
        } else {
            CHECK(f97.smallest_order_at_least(m_min) == *it);
            CHECK(f97.multiplicative_order(f97.element_of_order(m_min)) == *it);
        }
    }
}

TEST_CASE("element_of_order goldilocks")
{
    const PrimeField& f = PrimeField::goldilocks();

    // 2^14 divides 2^32, so the request is met exactly
    CHECK(f.smallest_order_at_least(16384) == 16384);
    std::uint64_t w = f.element_of_order(16384);
    CHECK(f.pow(w, std::uint64_t(16384)) == 1);
    CHECK(f.pow(w, std::uint64_t(8192)) != 1);
    CHECK(f.multiplicative_order(w) == 16384);

    CHECK(f.multiplicative_order(f.element_of_order(4096)) == 4096);

    // the first divisor past 2^32 is 65537 * 2^16 = 2^32 + 2^16
    std::uint64_t just_over = (1ULL << 32) + 1;
    CHECK(f.smallest_order_at_least(just_over) == 65537ULL * (1ULL << 16));

    CHECK_THROWS_AS(f.element_of_order(f.modulus()), std::domain_error);
    CHECK(f.multiplicative_order(f.generator()) == f.modulus() - 1);
}

TEST_CASE("sample_points")
{
    const PrimeField& f = PrimeField::goldilocks();
    Rng a(42);
    Rng b(42);
    auto pts1 = sample_points(f, 50, a);
    auto pts2 = sample_points(f, 50, b);
    CHECK(pts1 == pts2); // same stream, same points
    std::set<std::uint64_t> uniq(pts1.begin(), pts1.end());
    CHECK(uniq.size() == 50);

    PrimeField f5(5, { 2, 2 });
    Rng c(7);
    auto all = sample_points(f5, 5, c);
    std::set<std::uint64_t> s(all.begin(), all.end());
    CHECK(s == std::set<std::uint64_t>{ 0, 1, 2, 3, 4 });
    Rng d(8);
    CHECK_THROWS_AS(sample_points(f5, 6, d), std::invalid_argument);
}

TEST_CASE("derived rng streams")
{
    Rng master(99);
    Rng t3 = master.derive(3);
    Rng t5 = master.derive(5);
    std::uint64_t a3 = t3.next_u64();
    std::uint64_t a5 = t5.next_u64();

    // derivation ignores parent state and call order
    master.next_u64();
    Rng t3_again = master.derive(3);
    CHECK(t3_again.next_u64() == a3);
    Rng t5_again = Rng(99).derive(5);
    CHECK(t5_again.next_u64() == a5);
    CHECK(a3 != a5);

    Rng r(1);
    CHECK_THROWS_AS(r.below(0), std::invalid_argument);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(10) < 10);
    }
}
