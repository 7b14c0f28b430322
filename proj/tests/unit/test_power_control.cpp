#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "xlayer/phy.hpp"
#include "xlayer/power_control.hpp"

using namespace xlayer;

namespace {

const PhyParams kPhy{128, 1e-13, 12.5};

ActiveLinkSet random_links(std::mt19937_64& gen, std::size_t n, std::size_t extra) {
    std::vector<Link> links;
    std::uniform_int_distribution<NodeId> U(0, n - 1);
    for (NodeId i = 0; i < n; ++i) {
        NodeId j = U(gen);
        if (j == i) j = (j + 1) % n;
        links.push_back({i, j});
    }
    for (std::size_t e = 0; e < extra; ++e) {
        const NodeId i = U(gen);
        NodeId j = U(gen);
        if (j == i) j = (j + 1) % n;
        links.push_back({i, j});
    }
    return ActiveLinkSet(n, links);
}

PowerVector T(const PowerVector& p, const ActiveLinkSet& a, const LinkGainMatrix& g, const PhyParams& phy) {
    PowerVector t(p.size(), 0.0);
    for (NodeId i = 0; i < p.size(); ++i)
        if (a.transmits(i)) t[i] = interference_target(i, p, a, g, phy);
    return t;
}

}  // namespace

TEST_CASE("active link set") {
    ActiveLinkSet a(4, {{2, 1}, {0, 1}, {2, 1}, {2, 3}});
    CHECK(a.links().size() == 3);
    CHECK(a.contains({2, 3}));
    CHECK_FALSE(a.contains({3, 2}));
    CHECK(a.transmits(2));
    CHECK_FALSE(a.transmits(1));
    CHECK(a.outgoing(2).size() == 2);
    CHECK_THROWS(ActiveLinkSet(3, {{1, 1}}));
    CHECK_THROWS(ActiveLinkSet(3, {{0, 3}}));
}

TEST_CASE("interference function axioms") {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> U(0.0, 200.0), lp(std::log(1e-9), std::log(1e-4)), A(1.01, 10.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 3 + rep % 10;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < n; ++i) pts.emplace_back(U(gen), U(gen));
        const LinkGainMatrix g(oracle::gains_from_points(pts));
        const auto a = random_links(gen, n, rep % 4);
        PowerVector p(n), q(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = std::exp(lp(gen));
            q[i] = p[i] * (1.0 + std::abs(lp(gen)) * 0.01);
        }
        const auto tp = T(p, a, g, kPhy), tq = T(q, a, g, kPhy);
        const double alpha = A(gen);
        PowerVector ap = p;
        for (double& v : ap) v *= alpha;
        const auto tap = T(ap, a, g, kPhy);
        for (NodeId i = 0; i < n; ++i) {
            REQUIRE(tp[i] > 0.0);
            REQUIRE(tp[i] <= tq[i] * (1 + 1e-12));
            REQUIRE(alpha * tp[i] > tap[i]);
        }
    }
}

TEST_CASE("converged powers solve the linear system") {
    std::mt19937_64 gen(11);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 2 + rep % 5;
        const auto inst = oracle::random_single_link_instance(gen, n, 200.0, 12.5, 128, 1e-13, 0.9);
        const auto sys = oracle::linear_pc(inst.h, inst.receiver, 12.5, 128, 1e-13);
        const auto ref = oracle::solve_fixed_point(sys);
        PcOptions opt;
        opt.tol = 1e-13;
        opt.max_iter = 100000;
        const auto r = pc_iterate(PowerVector(n, 1e-6), oracle::links_of(inst.receiver), LinkGainMatrix(inst.h), kPhy, opt);
        REQUIRE(r.converged());
        CHECK(oracle::max_rel_diff(r.powers, ref) < 1e-8);
    }
}

TEST_CASE("converged SIRs sit on the target") {
    std::mt19937_64 gen(12);
    int converged = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 3 + rep % 5;
        const auto inst = oracle::random_single_link_instance(gen, n, 200.0, 12.5, 128, 1e-13, 0.7);
        // add a second outgoing link to a few nodes
        std::vector<Link> links;
        for (NodeId i = 0; i < n; ++i) links.push_back({i, NodeId(inst.receiver[i])});
        NodeId second = 1;
        while (second == NodeId(inst.receiver[0])) ++second;
        links.push_back({0, second});
        const ActiveLinkSet a(n, links);
        const LinkGainMatrix g(inst.h);
        const auto r = pc_iterate(PowerVector(n, 1e-6), a, g, kPhy);
        if (!r.converged()) continue;
        ++converged;
        for (NodeId i = 0; i < n; ++i) {
            double lo = INFINITY;
            for (NodeId j : a.outgoing(i)) {
                const double s = oracle::sir(inst.h, r.powers, i, j, 128, 1e-13);
                REQUIRE(s >= 12.5 * (1 - 1e-5));
                lo = std::min(lo, s);
            }
            REQUIRE(lo <= 12.5 * (1 + 1e-5));
        }
    }
    CHECK(converged > 20);
}

TEST_CASE("strongly coupled pairs are infeasible") {
    // 0->1 and 2->3 with each transmitter next to the other's receiver
    const std::vector<std::pair<double, double>> pts{{0, 0}, {10, 0}, {10, 1}, {0, 1}};
    const auto h = oracle::gains_from_points(pts);
    const std::vector<int> rx{1, -1, 3, -1};
    const PhyParams phy{16, 1e-13, 12.5};
    const auto sys = oracle::linear_pc(h, rx, phy.target_sir, 16, phy.noise_power);
    REQUIRE(oracle::spectral_radius(sys.F) > 1.0);
    const auto r = pc_iterate(PowerVector(4, 1e-6), oracle::links_of(rx), LinkGainMatrix(h), phy);
    CHECK(r.status == PcStatus::infeasible);

    PcOptions few;
    few.max_iter = 3;
    few.power_cap = 1e9;
    CHECK(pc_iterate(PowerVector(4, 1e-6), oracle::links_of(rx), LinkGainMatrix(h), phy, few).status ==
          PcStatus::max_iter);
}

TEST_CASE("synchronous and sweep schedules agree") {
    std::mt19937_64 gen(13);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep % 6;
        const auto inst = oracle::random_single_link_instance(gen, n, 200.0, 12.5, 128, 1e-13, 0.8);
        const LinkGainMatrix g(inst.h);
        const auto a = oracle::links_of(inst.receiver);
        PcOptions sync, sweep;
        sweep.schedule = Schedule::async_sweep;
        const auto r1 = pc_iterate(PowerVector(n, 1e-6), a, g, kPhy, sync);
        const auto r2 = pc_iterate(PowerVector(n, 1e-6), a, g, kPhy, sweep);
        REQUIRE(r1.converged());
        REQUIRE(r2.converged());
        for (NodeId i = 0; i < n; ++i) CHECK(std::abs(r1.powers[i] - r2.powers[i]) <= 10 * 1e-6 * r1.powers[i] / (1 - 0.8));
    }
}

TEST_CASE("iterates are monotone from below and from above") {
    std::mt19937_64 gen(14);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rep % 4;
        const auto inst = oracle::random_single_link_instance(gen, n, 200.0, 12.5, 128, 1e-13, 0.8);
        const LinkGainMatrix g(inst.h);
        const auto a = oracle::links_of(inst.receiver);
        PcOptions opt;
        opt.tol = 1e-10;
        opt.max_iter = 100000;
        const auto up = pc_iterate(PowerVector(n, 0.0), a, g, kPhy, opt);
        REQUIRE(up.converged());
        for (std::size_t k = 1; k < up.trace.size(); ++k) REQUIRE(up.trace[k] >= up.trace[k - 1]);

        PowerVector high = up.powers;
        for (double& v : high) v *= 50.0;
        const auto down = pc_iterate(high, a, g, kPhy, opt);
        REQUIRE(down.converged());
        for (std::size_t k = 1; k < down.trace.size(); ++k) REQUIRE(down.trace[k] <= down.trace[k - 1]);
    }
}

TEST_CASE("idle nodes stay silent and have no target") {
    const std::vector<std::pair<double, double>> pts{{0, 0}, {10, 0}, {50, 50}};
    const LinkGainMatrix g(oracle::gains_from_points(pts));
    const ActiveLinkSet a(3, {{0, 1}});
    const auto r = pc_iterate({1e-6, 1e-6, 1e-6}, a, g, kPhy);
    REQUIRE(r.converged());
    CHECK(r.powers[1] == 0.0);
    CHECK(r.powers[2] == 0.0);
    CHECK(r.powers[0] == doctest::Approx(12.5 * 1e-13 / 1e-2).epsilon(1e-5));
    CHECK_THROWS_AS(interference_target(2, r.powers, a, g, kPhy), std::invalid_argument);
    CHECK_THROWS(pc_iterate({1e-6, 1e-6}, a, g, kPhy));
    CHECK_THROWS(pc_iterate({-1.0, 1e-6, 1e-6}, a, g, kPhy));
}

TEST_CASE("joint receiver and power iteration") {
    SUBCASE("LMMSE never needs more power than the matched filter") {
        std::mt19937_64 gen(15);
        int compared = 0;
        for (int rep = 0; rep < 40; ++rep) {
            const auto book = generate_spreading_codebook(6, 8, gen());
            const auto inst = oracle::random_paired_instance(gen, 6, 200.0, 20.0, book.sequences, 12.5, 1e-13, 0.9);
            const LinkGainMatrix g(inst.h);
            const auto a = oracle::links_of(inst.receiver);
            const PhyParams phy{8, 1e-13, 12.5};
            const auto mf = pc_mud_iterate(PowerVector(6, 1e-6), a, g, book, phy, {}, FilterMode::matched_exact);
            const auto mmse = pc_mud_iterate(PowerVector(6, 1e-6), a, g, book, phy, {}, FilterMode::lmmse);
            if (!mf.pc.converged()) continue;
            REQUIRE(mmse.pc.converged());
            ++compared;
            CHECK(total_power(mmse.pc.powers) <= total_power(mf.pc.powers) * (1 + 1e-6));
            for (const auto& [l, c] : mmse.filters)
                CHECK(sir_lmmse(l, mmse.pc.powers, c, g, book, 1e-13) >= 12.5 * (1 - 1e-5));
        }
        CHECK(compared > 10);
    }
    SUBCASE("interference suppression rescues a matched-filter infeasible pair") {
        const std::vector<std::pair<double, double>> pts{{0, 0}, {10, 0}, {10, 5}, {0, 5}};
        SpreadingCodebook book;
        book.sequences.resize(2, 4);
        book.sequences << 1, 1, 0.6, 0,
                          0, 0, 0.8, 1;
        const LinkGainMatrix g(oracle::gains_from_points(pts));
        const ActiveLinkSet a(4, {{0, 1}, {2, 3}});
        const PhyParams phy{2, 1e-13, 12.5};
        const auto mf = pc_mud_iterate(PowerVector(4, 1e-6), a, g, book, phy, {}, FilterMode::matched_exact);
        const auto mmse = pc_mud_iterate(PowerVector(4, 1e-6), a, g, book, phy, {}, FilterMode::lmmse);
        CHECK(mf.pc.status == PcStatus::infeasible);
        CHECK(mmse.pc.status == PcStatus::converged);
        CHECK(mmse.ill_conditioned == 0);
    }
    SUBCASE("matched-exact mode with orthogonal codes is noise limited") {
        const std::vector<std::pair<double, double>> pts{{0, 0}, {10, 0}, {10, 5}, {0, 5}};
        SpreadingCodebook book;
        book.sequences = Eigen::MatrixXd::Identity(4, 4);
        const LinkGainMatrix g(oracle::gains_from_points(pts));
        const ActiveLinkSet a(4, {{0, 1}, {2, 3}});
        const PhyParams phy{4, 1e-13, 12.5};
        const auto r = pc_mud_iterate(PowerVector(4, 1e-6), a, g, book, phy, {}, FilterMode::matched_exact);
        REQUIRE(r.pc.converged());
        CHECK(r.pc.powers[0] == doctest::Approx(12.5 * 1e-13 / 1e-2).epsilon(1e-6));
    }
}
