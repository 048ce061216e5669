#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "stratanet/bootstrap.hpp"
#include "stratanet/random.hpp"

using namespace stratanet;

// Known-answer vectors published with the reference Philox implementation.
TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Rng a(42, 1), b(42, 1), c(42, 2), d(43, 1);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
}

TEST_CASE("derived keys depend on seed and label") {
    CHECK(derive_key(1, "sbm") == derive_key(1, "sbm"));
    CHECK(derive_key(1, "sbm") != derive_key(2, "sbm"));
    CHECK(derive_key(1, "sbm") != derive_key(1, "bootstrap"));
    CHECK(derive_key(1, "sbm/org_main") != derive_key(1, "sbm/org_side"));
}

TEST_CASE("ensemble streams do not collide over the first million indices") {
    std::set<std::uint64_t> first;
    for (std::uint64_t i = 0; i < 1'000'000; ++i) {
        Rng rng = ensemble_stream(7, "bootstrap/org_main", i);
        first.insert(rng.next_u64());
    }
    CHECK(first.size() == 1'000'000);
}

TEST_CASE("uniform and bounded draws") {
    Rng rng(5);
    double sum = 0;
    std::vector<int> hist(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        ++hist[rng.below(7)];
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
    for (int h : hist) CHECK(std::abs(h - n / 7) < 5 * std::sqrt(n / 7.0));
}

TEST_CASE("exponential and normal moments") {
    Rng rng(6);
    const int n = 100000;
    double es = 0, ns = 0, nss = 0;
    for (int i = 0; i < n; ++i) {
        es += rng.exponential(2.0);
        const double z = rng.normal();
        ns += z;
        nss += z * z;
    }
    CHECK(std::abs(es / n - 0.5) < 0.01);
    CHECK(std::abs(ns / n) < 0.02);
    CHECK(std::abs(nss / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation") {
    Rng rng(8);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    shuffle(v, rng);
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 50);
    CHECK(v != std::vector<int>(s.begin(), s.end()));
}
