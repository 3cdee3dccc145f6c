#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dp4d/constellation.hpp"

using namespace dp4d;

#ifndef DP4D_CATALOG_PATH
#define DP4D_CATALOG_PATH "catalog"
#endif

namespace {
const char* CATALOG = DP4D_CATALOG_PATH;

bool antipodal_closed(const Constellation4D& c) {
    for (const auto& p : c.points) {
        bool found = false;
        for (const auto& q : c.points)
            if (std::abs(q[0] + p[0]) < 1e-9 && std::abs(q[1] + p[1]) < 1e-9) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}
}  // namespace

TEST_CASE("parser accepts comments and blank lines") {
    std::istringstream in(
        "# header\n"
        "\n"
        "1.0 0.0 0.0 1.0\n"
        "  -1.0 0.0 0.0 -1.0  \n");
    Constellation4D c = parse_constellation_file(in, "t");
    CHECK(c.points.size() == 2);
    CHECK(c.points[0][0] == cplx(1.0, 0.0));
    CHECK(c.points[1][1] == cplx(0.0, -1.0));
}

TEST_CASE("parser rejects malformed rows") {
    std::istringstream bad_token("1.0 0.0 zebra 1.0\n");
    CHECK_THROWS_WITH_AS(parse_constellation_file(bad_token, "t"),
                         doctest::Contains("bad token"), std::runtime_error);
    std::istringstream short_row("1.0 0.0 1.0\n");
    CHECK_THROWS(parse_constellation_file(short_row, "t"));
    std::istringstream long_row("1 0 0 1 5\n");
    CHECK_THROWS(parse_constellation_file(long_row, "t"));
    std::istringstream dup("1 0 0 1\n1 0 0 1\n");
    CHECK_THROWS_WITH_AS(parse_constellation_file(dup, "t"),
                         doctest::Contains("duplicate"), std::runtime_error);
}

TEST_CASE("pm-qam generator basics") {
    Constellation4D c = generate_pm_qam(16);
    CHECK(c.points.size() == 256);
    CHECK(c.mean_energy() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(generate_pm_qam(8));
}

TEST_CASE("pm-16qam fourth-moment ratio is exactly 1.32 (rational oracle)") {
    // per-pol 16QAM on levels {-3,-1,1,3}: with integer arithmetic
    // E|s|^2 = 10, E|s|^4 = 132, so the ratio is 132/100 = 33/25 = 1.32.
    std::int64_t sum2 = 0, sum4 = 0, n = 0;
    for (int i = -3; i <= 3; i += 2)
        for (int q = -3; q <= 3; q += 2) {
            std::int64_t e = std::int64_t(i) * i + std::int64_t(q) * q;
            sum2 += e;
            sum4 += e * e;
            ++n;
        }
    CHECK(sum2 == 10 * n);  // E|s|^2 = 10
    // the ratio check proper, cross-multiplied to stay in integers:
    // sum4/n / (sum2/n)^2 == 33/25  <=>  25 * n * sum4 == 33 * sum2 * sum2
    CHECK(25 * n * sum4 == 33 * sum2 * sum2);

    // and the floating-point pipeline agrees
    MomentSet m = compute_moments(generate_pm_qam(16));
    double e2 = m.get(1, 1, 0, 0).real();
    double e4 = m.get(2, 2, 0, 0).real();
    CHECK(e4 / (e2 * e2) == doctest::Approx(1.32).epsilon(1e-13));
}

TEST_CASE("cartesian-product moments factorize to 1e-13") {
    Constellation4D c = generate_pm_qam(16);
    MomentSet m4 = compute_moments(c);
    MomentSet2D m2 = compute_moments_2d(project_polarization(c, 'x'));
    // the 4D format has unit energy, the projection has per-pol energy 1/2;
    // rescale the projection to unit energy before comparing products
    double t = std::sqrt(1.0 / (2.0 * m2.get(1, 1).real()));
    for (const auto& [sig, v] : m4.m) {
        cplx prod = m2.get(sig[0], sig[1]) * m2.get(sig[2], sig[3]) *
                    std::pow(t, sig[0] + sig[1] + sig[2] + sig[3]);
        CHECK(std::abs(v - prod) <= 1e-13);
    }
}

TEST_CASE("2a8psk variants") {
    for (int bits : {5, 6, 7}) {
        Constellation4D c = generate_2a8psk(bits, 0.65);
        CHECK(c.points.size() == std::size_t(1) << bits);
        CHECK(c.mean_energy() == doctest::Approx(1.0).epsilon(1e-12));
        // constant 4D modulus: rings are complementary across polarizations
        double e0 = std::norm(c.points[0][0]) + std::norm(c.points[0][1]);
        for (const auto& p : c.points)
            CHECK(std::norm(p[0]) + std::norm(p[1]) == doctest::Approx(e0).epsilon(1e-12));
        CHECK(antipodal_closed(c));
        // the two polarizations carry the same power (x<->y balanced family)
        MomentSet m = compute_moments(c);
        CHECK(m.get(1, 1, 0, 0).real() ==
              doctest::Approx(m.get(0, 0, 1, 1).real()).epsilon(1e-12));
    }
    // degenerate ring ratio: single ring per polarization
    Constellation4D one = generate_2a8psk(6, 1.0);
    double r0 = std::abs(one.points[0][0]);
    for (const auto& p : one.points) {
        CHECK(std::abs(p[0]) == doctest::Approx(r0).epsilon(1e-12));
        CHECK(std::abs(p[1]) == doctest::Approx(r0).epsilon(1e-12));
    }
    CHECK_THROWS(generate_2a8psk(6, 0.0));
    CHECK_THROWS(generate_2a8psk(6, 1.5));
    CHECK_THROWS(generate_2a8psk(4, 0.5));
}

TEST_CASE("catalog files load, are unit energy and antipodally closed") {
    const char* names[] = {"dicyclic4_16", "c4_16",      "2a8psk_5b",  "2a8psk_6b",
                           "2a8psk_7b",    "4d_64prs",   "4d_os128",   "l4_128",
                           "w4_256",       "sphere4_512", "120cell4_600", "a4_2048",
                           "a4_4096"};
    std::size_t expect_m[] = {16, 16, 32, 64, 128, 64, 128, 128, 256, 512, 600, 2048, 4096};
    for (std::size_t i = 0; i < 13; ++i) {
        Constellation4D c =
            load_constellation_file(std::string(CATALOG) + "/" + names[i] + ".txt");
        INFO(names[i]);
        CHECK(c.points.size() == expect_m[i]);
        CHECK(c.mean_energy() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(antipodal_closed(c));
    }
}

TEST_CASE("gaussian moments helper") {
    MomentSet g = gaussian_moments();
    CHECK(g.get(1, 1, 0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.get(2, 2, 0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));  // 2*(1/2)^2
    CHECK(std::abs(g.get(2, 0, 0, 0)) == 0.0);  // proper: E[s^2] = 0
    CHECK(std::abs(g.get(1, 0, 0, 1)) == 0.0);  // independent polarizations
}
