#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "channels/channels.hpp"
#include "oracles.hpp"

using namespace scatterwork;
using channels::Direction;
using channels::PotentialProfile;
using core::Complex;
using core::Matrix;
using core::Vector;

namespace {

core::SystemSpec spin_system(double delta = 1.0, double j = 1.0) {
    Vector e(2);
    e << -delta / 2.0, delta / 2.0;
    Matrix nu(2, 2);
    nu << 0.0, j, j, 0.0;
    return core::SystemSpec(std::move(e), std::move(nu));
}

core::SystemSpec decoupled_system() {
    Vector e(2);
    e << -0.5, 0.5;
    Matrix nu(2, 2);
    nu << -1.0, 0.0, 0.0, 1.0;  // sigma_z in the (ground, excited) ordering
    return core::SystemSpec(std::move(e), std::move(nu));
}

} // namespace

TEST_CASE("channel_momenta: arithmetic and open/closed flags") {
    const auto sys = spin_system();
    const auto ks = channels::channel_momenta(sys, 1000.0, 2.0);
    REQUIRE(ks.size() == 2);
    CHECK(ks[0].open);
    CHECK(ks[1].open);
    CHECK(ks[0].k == doctest::Approx(std::sqrt(2000.0 * 2.5)).epsilon(1e-14));
    CHECK(ks[1].k == doctest::Approx(std::sqrt(2000.0 * 1.5)).epsilon(1e-14));

    const auto low = channels::channel_momenta(sys, 1000.0, 0.0);
    CHECK(low[0].open);
    CHECK(!low[1].open);

    CHECK_THROWS_AS(channels::channel_momenta(sys, 1000.0, 0.5), ThresholdProximityError);
}

TEST_CASE("single_channel_barrier: free potential is transparent") {
    const auto amp = channels::single_channel_barrier(1.3, 0.0, 1.0, 1.0, 1.0);
    CHECK(std::abs(amp.t - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(amp.r) < 1e-14);
}

TEST_CASE("single_channel_barrier: unitarity across regimes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ek(0.05, 4.0), v0(-2.0, 2.0), width(0.2, 3.0);
    for (int rep = 0; rep < 300; ++rep) {
        const auto amp = channels::single_channel_barrier(ek(rng), v0(rng), width(rng), 1.0, 1.0);
        CHECK(std::norm(amp.t) + std::norm(amp.r) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("single_channel_barrier: marginal case E_k = V0") {
    const double m = 1.0, v0 = 1.0, a = 1.0, hbar = 1.0;
    const auto amp = channels::single_channel_barrier(v0, v0, a, m, hbar);
    const double expected = 1.0 / (1.0 + m * v0 * a * a / (2.0 * hbar * hbar));
    CHECK(std::norm(amp.t) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("single_channel_barrier: over-barrier point against extended-precision matching") {
    const auto amp = channels::single_channel_barrier(2.0, 1.0, 1.0, 1.0, 1.0);
    const auto ref = oracles::barrier_matching(2.0L, 1.0L, 1.0L, 1.0L, 1.0L);
    CHECK(amp.t.real() == doctest::Approx(static_cast<double>(ref.t.real())).epsilon(1e-13));
    CHECK(amp.t.imag() == doctest::Approx(static_cast<double>(ref.t.imag())).epsilon(1e-13));
    CHECK(std::norm(amp.t) == doctest::Approx(0.8912972171417730).epsilon(1e-12));
}

TEST_CASE("single_channel_barrier: deep tunneling decays as exp(-2 kappa a)") {
    // kappa = 1 for these parameters
    const auto ref = oracles::barrier_matching(0.5L, 1.0L, 4.0L, 1.0L, 1.0L);
    const auto amp = channels::single_channel_barrier(0.5, 1.0, 4.0, 1.0, 1.0);
    CHECK(amp.t.real() == doctest::Approx(static_cast<double>(ref.t.real())).epsilon(1e-12));
    CHECK(amp.t.imag() == doctest::Approx(static_cast<double>(ref.t.imag())).epsilon(1e-12));
    CHECK(amp.r.imag() == doctest::Approx(static_cast<double>(ref.r.imag())).epsilon(1e-12));
    CHECK(std::norm(amp.t) == doctest::Approx(0.0013409506830259).epsilon(1e-10));

    const auto t6 = channels::single_channel_barrier(0.5, 1.0, 6.0, 1.0, 1.0);
    const auto t8 = channels::single_channel_barrier(0.5, 1.0, 8.0, 1.0, 1.0);
    const double slope = std::log(std::norm(t6.t)) - std::log(std::norm(t8.t));
    CHECK(slope == doctest::Approx(2.0 * 1.0 * 2.0).epsilon(1e-4));
}

TEST_CASE("s_matrix: zero potential gives the identity S-matrix") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(0.0, 1.0);
    const auto s = channels::s_matrix(sys, pot, 1000.0, 2.0);
    CHECK((s.transmission_lr() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.reflection_left().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.unitarity_defect() < 1e-12);
}

TEST_CASE("s_matrix: diagonal coupling decouples into single-channel barriers") {
    const auto sys = decoupled_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    int tunneling_points = 0;
    for (int i = 0; i < 100; ++i) {
        const double e_total = 0.56 + 0.045 * i;  // kinetic energies span both regimes
        const auto s = channels::s_matrix(sys, pot, 1.0, e_total);
        for (int j = 0; j < 2; ++j) {
            if (!s.open(j)) continue;
            const double ek = e_total - sys.energy(j);
            const double height = (j == 0) ? -1.0 : 1.0;
            if (ek < height) ++tunneling_points;
            const auto ref = channels::single_channel_barrier(ek, height, 1.0, 1.0, 1.0);
            CHECK(std::abs(s.transmission_lr()(j, j) - ref.t) < 1e-10);
            CHECK(std::abs(s.reflection_left()(j, j) - ref.r) < 1e-10);
        }
        CHECK(s.transmission_lr().cwiseAbs()(0, 1) < 1e-12);
        CHECK(s.transmission_lr().cwiseAbs()(1, 0) < 1e-12);
        CHECK(s.reflection_left().cwiseAbs()(0, 1) < 1e-12);
        CHECK(s.reflection_left().cwiseAbs()(1, 0) < 1e-12);
    }
    CHECK(tunneling_points >= 20);
}

TEST_CASE("s_matrix: qubit-barrier model is unitary across the packet support") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double e_total = 495.0 + 0.1 * i;
        const auto s = channels::s_matrix(sys, pot, 1000.0, e_total);
        worst = std::max(worst, s.unitarity_defect());
        // column sums of outgoing probability for the incoming + direction
        for (int j = 0; j < 2; ++j) {
            double col = 0.0;
            for (int jp = 0; jp < 2; ++jp)
                col += std::norm(s.transmission_lr()(jp, j)) +
                       std::norm(s.reflection_left()(jp, j));
            CHECK(col == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("s_matrix: reciprocity for real symmetric coupling") {
    std::mt19937 rng(42);
    Vector e(3);
    e << -0.6, 0.2, 0.9;
    Matrix nu(3, 3);
    nu << 0.3, 0.7, -0.2, 0.7, -0.1, 0.5, -0.2, 0.5, 0.4;  // real symmetric
    const core::SystemSpec sys(e, nu);
    const auto pot = PotentialProfile::from_widths({{0.4, 0.8}, {0.3, -0.5}, {0.3, 1.2}});
    for (double e_total : {2.1, 3.7, 9.4}) {
        const auto s = channels::s_matrix(sys, pot, 5.0, e_total);
        for (int jp = 0; jp < 3; ++jp)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(s.transmission_lr()(jp, j) - s.transmission_rl()(j, jp)) < 1e-10);
    }
}

TEST_CASE("s_matrix: closed channels follow the delta convention and stay unitary") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    const auto s = channels::s_matrix(sys, pot, 1.0, 0.3);  // upper channel closed
    REQUIRE(s.open(0));
    REQUIRE(!s.open(1));
    CHECK(s.s(Direction::plus, 1, Direction::plus, 1) == Complex(1.0, 0.0));
    CHECK(s.s(Direction::minus, 1, Direction::minus, 1) == Complex(1.0, 0.0));
    CHECK(s.s(Direction::plus, 1, Direction::minus, 1) == Complex(0.0, 0.0));
    CHECK(s.s(Direction::plus, 0, Direction::plus, 1) == Complex(0.0, 0.0));
    CHECK(s.s(Direction::plus, 1, Direction::plus, 0) == Complex(0.0, 0.0));
    CHECK(s.unitarity_defect() < 1e-10);
    // the full extended matrix is unitary as well
    CHECK(core::unitarity_defect(s.extended_matrix()) < 1e-10);
}

TEST_CASE("s_matrix: energy on a threshold is rejected") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    CHECK_THROWS_AS(channels::s_matrix(sys, pot, 1000.0, -0.5), ThresholdProximityError);
    // interior mode energies are guarded too: H_S + 1.0 nu has modes at +-sqrt(1.25)
    CHECK_THROWS_AS(channels::s_matrix(sys, pot, 1000.0, std::sqrt(1.25)),
                    ThresholdProximityError);
}

TEST_CASE("transition_probability: identity potential and decoupled channels") {
    const auto sys = spin_system();
    const auto free_s = channels::s_matrix(sys, PotentialProfile::barrier(0.0, 1.0), 1000.0, 2.0);
    CHECK(channels::transition_probability(free_s, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(channels::transition_probability(free_s, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));

    const auto dec = decoupled_system();
    const auto s = channels::s_matrix(dec, PotentialProfile::barrier(1.0, 1.0), 1.0, 2.3);
    CHECK(channels::transition_probability(s, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(channels::transition_probability(s, 1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transition_probability: rows sum to one and closed incoming throws") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    const auto s = channels::s_matrix(sys, pot, 1000.0, 500.0);
    for (int j = 0; j < 2; ++j) {
        double total = 0.0;
        for (int jp = 0; jp < 2; ++jp) total += channels::transition_probability(s, j, jp);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
    const auto below = channels::s_matrix(sys, pot, 1.0, 0.3);
    CHECK_THROWS_AS(channels::transition_probability(below, 1, 0), DomainError);
}

TEST_CASE("transition_probability: matches the Rabi value at semiclassical energies") {
    const auto sys = spin_system();
    const auto pot = PotentialProfile::barrier(1.0, 1.0);
    const double ep0 = 500.0;  // v0 = 1 at m = 1000
    const auto s = channels::s_matrix(sys, pot, 1000.0, ep0 + sys.energy(1));
    const double p = channels::transition_probability(s, 0, 1);
    CHECK(std::abs(p - oracles::rabi_probability(1.0, 1.0, 1.0, 1.0, 1.0)) < 1e-3);
}

TEST_CASE("PotentialProfile: validation") {
    CHECK_THROWS_AS(PotentialProfile::from_segments({{0.0, 0.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(PotentialProfile::from_segments({{0.0, 0.5, 1.0}, {0.7, 1.0, 2.0}}),
                    ValidationError);
    const auto p = PotentialProfile::from_widths({{0.5, 1.0}, {0.25, -2.0}});
    CHECK(p.total_width() == doctest::Approx(0.75));
    CHECK(p.min_feature() == doctest::Approx(0.25));
    CHECK(p.max_abs_value() == doctest::Approx(2.0));
}
