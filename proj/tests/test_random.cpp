#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <boost/math/distributions/normal.hpp>

#include "doctest.h"

#include "srd/error.hpp"
#include "srd/random.hpp"
#include "srd/wiener_path.hpp"

using namespace srd;

TEST_CASE("Philox4x32-10 known answers")
{
    using P = Philox4x32;
    CHECK(P::generate({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal quantile against Boost")
{
    const boost::math::normal_distribution<double> nd;
    double worst = 0.0;
    for (int i = 1; i < 2000; ++i) {
        const double p = i / 2000.0;
        const double q = boost::math::quantile(nd, p);
        worst = std::max(worst, std::abs(normal_quantile(p) - q) / std::max(std::abs(q), 1e-3));
    }
    for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 1.0 - 1e-10}) {
        const double q = boost::math::quantile(nd, p);
        worst = std::max(worst, std::abs(normal_quantile(p) - q) / std::abs(q));
    }
    CHECK(worst < 1e-14);
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.3) == -normal_quantile(0.7));
}

TEST_CASE("derived seeds are distinct")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        seen.insert(derive_seed(42, i));
    }
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("fine increments: moments")
{
    const std::size_t n = 1 << 16;
    const double dt = 1e-3;
    const WienerPath w(7, 2, 3, n, dt);
    for (std::size_t l = 0; l < 2; ++l) {
        for (std::size_t k = 0; k < 3; ++k) {
            double s1 = 0.0, s2 = 0.0, s4 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = w.increment(l, k, i) / std::sqrt(dt);
                s1 += x;
                s2 += x * x;
                s4 += x * x * x * x;
            }
            const double N = static_cast<double>(n);
            CHECK(std::abs(s1 / N) < 5.0 / std::sqrt(N));
            CHECK(std::abs(s2 / N - 1.0) < 5.0 * std::sqrt(2.0 / N));
            CHECK(std::abs(s4 / N - 3.0) < 5.0 * std::sqrt(96.0 / N));
        }
    }
}

TEST_CASE("independent mode families are uncorrelated")
{
    const std::size_t n = 1 << 15;
    const WienerPath w(11, 2, 2, n, 1.0);
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c += w.increment(0, 1, i) * w.increment(1, 1, i);
    }
    CHECK(std::abs(c / n) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("coarse increments are pairwise tree sums")
{
    const WienerPath w(3, 2, 4, 64, 0.01);
    const auto c1 = w.coarse(1);
    const auto c2 = w.coarse(2);
    REQUIRE(c1.steps == 32);
    REQUIRE(c2.steps == 16);
    CHECK(c2.dt == doctest::Approx(0.04));
    for (std::size_t i = 0; i < 32; ++i) {
        for (std::size_t l = 0; l < 2; ++l) {
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(c1.at(i, l)[k] == w.increment(l, k, 2 * i) + w.increment(l, k, 2 * i + 1));
            }
        }
    }
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(c2.at(i, 1)[k] == c1.at(2 * i, 1)[k] + c1.at(2 * i + 1, 1)[k]);
        }
    }
    CHECK(w.level_for(0.04) == 2);
    CHECK_THROWS_AS(w.level_for(0.03), ConfigError);
}

TEST_CASE("increments do not depend on the path length")
{
    const WienerPath a(5, 1, 2, 16, 0.1);
    const WienerPath b(5, 1, 2, 1024, 0.1);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(a.increment(0, 1, i) == b.increment(0, 1, i));
    }
}

TEST_CASE("binary path round trip")
{
    const WienerPath w(0x1234, 2, 3, 8, 0.5);
    const auto file = std::filesystem::temp_directory_path() / "srd_path_test.bin";
    w.write_binary(file);
    CHECK(std::filesystem::file_size(file) == 40 + 8 * 2 * 3 * 8);
    std::ifstream in(file, std::ios::binary);
    unsigned char head[8];
    in.read(reinterpret_cast<char*>(head), 8);
    CHECK(head[0] == 0x34);
    CHECK(head[1] == 0x12);
    // first increment after the header is (l=0, k=0, i=0), then i runs fastest
    in.seekg(40 + 8);
    double x = 0.0;
    in.read(reinterpret_cast<char*>(&x), 8);
    CHECK(x == w.increment(0, 0, 1));
    in.close();
    const auto r = WienerPath::read_binary(file);
    CHECK(r.seed() == w.seed());
    CHECK(r.dt_fine() == 0.5);
    for (std::size_t l = 0; l < 2; ++l) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < 8; ++i) {
                CHECK(r.increment(l, k, i) == w.increment(l, k, i));
            }
        }
    }
    std::filesystem::remove(file);
}
