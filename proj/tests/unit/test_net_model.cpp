#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "xlayer/net_model.hpp"
#include "xlayer/rng.hpp"

using namespace xlayer;

TEST_CASE("gain examples") {
    Topology t{{{0, 0}, {100, 0}, {100, 1}}};
    const auto h = compute_link_gains(t, 2.0);
    CHECK(h(0, 1) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(h(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
    const auto h4 = compute_link_gains(t, 4.0);
    CHECK(h4(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h(0, 0) == 0.0);
}

TEST_CASE("gains match recomputation from positions and are symmetric") {
    const auto t = generate_topology(30, 200.0, 99);
    const auto h = compute_link_gains(t, 2.0);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : t.positions) pts.emplace_back(p.x, p.y);
    const auto ref = oracle::gains_from_points(pts);
    for (NodeId i = 0; i < 30; ++i)
        for (NodeId j = 0; j < 30; ++j) {
            CHECK(h(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-13));
            CHECK(h(i, j) == h(j, i));
        }
}

TEST_CASE("coincident nodes are reported") {
    Topology t{{{5, 5}, {1, 2}, {5, 5}}};
    try {
        compute_link_gains(t, 2.0);
        FAIL("expected CoincidentNodes");
    } catch (const CoincidentNodes& e) {
        CHECK(e.first() == 0);
        CHECK(e.second() == 2);
    }
}

TEST_CASE("topology is uniform over the square") {
    // each quadrant holds a quarter of the nodes, within 4 sigma
    const std::size_t n = 40000;
    const auto t = generate_topology(n, 200.0, 5);
    int q[4] = {0, 0, 0, 0};
    for (const auto& p : t.positions) {
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x < 200.0);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y < 200.0);
        ++q[(p.x >= 100.0) + 2 * (p.y >= 100.0)];
    }
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    for (int c : q) CHECK(std::abs(c - n / 4.0) < 4.0 * sigma);
}

TEST_CASE("sessions") {
    SUBCASE("two nodes") {
        const auto s = generate_sessions(2, 1);
        REQUIRE(s.size() == 2);
        CHECK(s[0].source == 0);
        CHECK(s[0].destination == 1);
        CHECK(s[1].source == 1);
        CHECK(s[1].destination == 0);
    }
    SUBCASE("55 nodes, no self loops") {
        const auto s = generate_sessions(55, 1234);
        REQUIRE(s.size() == 55);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i].source == i);
            CHECK(s[i].destination != i);
            CHECK(s[i].destination < 55);
        }
    }
    SUBCASE("destinations uniform over the other nodes") {
        const std::size_t n = 10;
        std::vector<std::vector<int>> count(n, std::vector<int>(n, 0));
        const int seeds = 5000;
        for (int k = 0; k < seeds; ++k) {
            const auto s = generate_sessions(n, derive_seed(77, Stream::sessions, k));
            for (const auto& x : s) ++count[x.source][x.destination];
        }
        // chi-square, 8 dof per source, 1% critical value 20.09
        for (std::size_t src = 0; src < n; ++src) {
            double chi2 = 0.0;
            const double e = double(seeds) / (n - 1);
            for (std::size_t d = 0; d < n; ++d) {
                if (d == src) {
                    CHECK(count[src][d] == 0);
                    continue;
                }
                chi2 += (count[src][d] - e) * (count[src][d] - e) / e;
            }
            CHECK(chi2 < 20.09);
        }
    }
    CHECK_THROWS(generate_sessions(1, 1));
}

TEST_CASE("spreading codebook") {
    SUBCASE("unit norm") {
        const auto one = generate_spreading_codebook(1, 4, 3);
        CHECK(std::abs(one.sequence(0).norm() - 1.0) <= 1e-12);
        const auto book = generate_spreading_codebook(30, 32, 3);
        CHECK(book.size() == 30);
        CHECK(book.spreading_gain() == 32);
        for (NodeId i = 0; i < 30; ++i) CHECK(std::abs(book.sequence(i).norm() - 1.0) <= 1e-12);
    }
    SUBCASE("squared cross-correlation averages 1/L") {
        const std::size_t L = 128;
        double sum = 0.0;
        const int draws = 10000;
        for (int k = 0; k < draws; ++k) {
            const auto b = generate_spreading_codebook(2, L, derive_seed(9, Stream::codebook, k));
            const double x = b.sequence(0).dot(b.sequence(1));
            sum += x * x;
        }
        CHECK(std::abs(sum / draws * L - 1.0) < 0.10);
    }
    CHECK_THROWS(generate_spreading_codebook(3, 0, 1));
}

TEST_CASE("network construction is deterministic") {
    Scenario s;
    s.n_nodes = 12;
    s.spreading_gain = 16;
    const auto a = make_network(s, 2024);
    const auto b = make_network(s, 2024);
    const auto c = make_network(s, 2025);
    for (NodeId i = 0; i < 12; ++i) {
        CHECK(a.topology.positions[i].x == b.topology.positions[i].x);
        CHECK(a.topology.positions[i].y == b.topology.positions[i].y);
        CHECK(a.sessions[i].destination == b.sessions[i].destination);
    }
    CHECK(a.codebook.sequences == b.codebook.sequences);
    CHECK(a.gains.matrix() == b.gains.matrix());
    CHECK(a.topology.positions[0].x != c.topology.positions[0].x);
}

TEST_CASE("nested topologies share their prefix") {
    const auto small = generate_topology(10, 200.0, 8);
    const auto big = generate_topology(11, 200.0, 8);
    for (NodeId i = 0; i < 10; ++i) {
        CHECK(small.positions[i].x == big.positions[i].x);
        CHECK(small.positions[i].y == big.positions[i].y);
    }
}
