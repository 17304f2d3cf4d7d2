#include "congesta/fields.hpp"

#include <doctest.h>

#include <random>

using namespace congesta;

namespace {

FieldSpec harmonic_spec(double tau0 = 0.5) {
    FieldSpec s;
    s.potential = parse_potential("harmonic");
    s.volume = parse_volume("constant(" + std::to_string(tau0) + ")");
    return s;
}

} // namespace

TEST_SUITE("fields") {

TEST_CASE("effective potential: harmonic values") {
    FieldSpec s = harmonic_spec();
    CHECK(eval_effective_potential(s, {0, 0}, 0.0) == doctest::Approx(0.0));
    CHECK(eval_effective_potential(s, {1, 1}, 3.7) == doctest::Approx(1.0));
}

TEST_CASE("effective potential: separable x2 ignores x1 and tau") {
    FieldSpec s;
    s.potential = parse_potential("separable_x2");
    s.volume = parse_volume("radial_time");
    s.topology = Topology::torus_strip;
    CHECK(eval_effective_potential(s, {0.3, 2.0}, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("inverse volume values") {
    FieldSpec s = harmonic_spec(0.5);
    CHECK(eval_inverse_volume(s, {3, -2}, 9.0) == doctest::Approx(2.0));

    FieldSpec radial;
    radial.potential = parse_potential("separable_x2");
    radial.volume = parse_volume("radial_time");
    radial.topology = Topology::torus_strip;
    CHECK(eval_inverse_volume(radial, {1, 0}, 2.0) == doctest::Approx(0.5));

    FieldSpec lin = harmonic_spec();
    lin.volume = parse_volume("linear_time(1.0)");
    CHECK(eval_inverse_volume(lin, {0.2, 0.1}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("inverse volume errors") {
    FieldSpec radial;
    radial.potential = parse_potential("separable_x2");
    radial.volume = parse_volume("radial_time");
    radial.topology = Topology::torus_strip;
    CHECK_THROWS_AS(eval_inverse_volume(radial, {0, 0}, 1.0), Error);
    // tau = |x| t <= 0 at t = 0
    CHECK_THROWS_AS(eval_inverse_volume(radial, {1, 0}, 0.0), Error);
}

TEST_CASE("gradient: analytic values and degenerate flag") {
    FieldSpec s = harmonic_spec();
    Gradient g = s.grad_effective_potential({1, 0}, 0.0);
    CHECK(g.value.x == doctest::Approx(1.0));
    CHECK(g.value.y == doctest::Approx(0.0));
    CHECK_FALSE(g.degenerate);

    FieldSpec an;
    an.potential = parse_potential("aniso_quadratic(1,4)");
    an.volume = parse_volume("constant(1.0)");
    Gradient ga = an.grad_effective_potential({0, 1}, 0.0);
    CHECK(ga.value.x == doctest::Approx(0.0));
    CHECK(ga.value.y == doctest::Approx(4.0));

    Gradient g0 = s.grad_effective_potential({0, 0}, 0.0);
    CHECK(g0.degenerate);
    CHECK(g0.value.x == 0.0);
    CHECK(g0.value.y == 0.0);
}

TEST_CASE("gradients match central finite differences") {
    std::vector<FieldSpec> specs;
    specs.push_back(harmonic_spec());
    FieldSpec an;
    an.potential = parse_potential("aniso_quadratic(2,3)");
    an.volume = parse_volume("linear_time(0.7)");
    specs.push_back(an);
    FieldSpec poly;
    poly.potential = parse_potential("polynomial(0,0,0.5,0.1)");
    poly.volume = parse_volume("constant(1.0)");
    poly.dimension = 1;
    specs.push_back(poly);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const double h = 1e-5;
    for (const FieldSpec& s : specs) {
        for (int k = 0; k < 100; ++k) {
            Vec2 x{u(rng), s.dimension == 1 ? 0.0 : u(rng)};
            if (norm(x) < 1e-2) continue;
            Gradient g = s.grad_effective_potential(x, 0.3);
            double fdx = (s.effective_potential({x.x + h, x.y}, 0.3) -
                          s.effective_potential({x.x - h, x.y}, 0.3)) /
                         (2 * h);
            double fdy = (s.effective_potential({x.x, x.y + h}, 0.3) -
                          s.effective_potential({x.x, x.y - h}, 0.3)) /
                         (2 * h);
            double scale = std::max(1.0, norm(g.value));
            CHECK(std::abs(g.value.x - fdx) / scale < 1e-6);
            CHECK(std::abs(g.value.y - fdy) / scale < 1e-6);
        }
    }
}

TEST_CASE("volume time derivative matches finite differences") {
    std::vector<FieldSpec> specs;
    FieldSpec lin = harmonic_spec();
    lin.volume = parse_volume("linear_time(0.5)");
    specs.push_back(lin);
    FieldSpec radial;
    radial.potential = parse_potential("separable_x2");
    radial.volume = parse_volume("radial_time");
    radial.topology = Topology::torus_strip;
    specs.push_back(radial);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double h = 1e-6;
    for (const FieldSpec& s : specs) {
        for (int k = 0; k < 50; ++k) {
            Vec2 x{u(rng), u(rng)};
            if (norm(x) < 1e-2) continue;
            double t = 1.0 + 0.5 * std::abs(u(rng));
            double fd = (s.tau_inv(x, t + h) - s.tau_inv(x, t - h)) / (2 * h);
            CHECK(s.dt_tau_inv(x, t) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("tau_inv times tau is one; W nonnegative at random samples") {
    std::vector<FieldSpec> specs;
    specs.push_back(harmonic_spec());
    FieldSpec ang = harmonic_spec();
    ang.volume = parse_volume("angular(1.0,0.5)");
    specs.push_back(ang);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const FieldSpec& s : specs) {
        for (int k = 0; k < 10000; ++k) {
            Vec2 x{u(rng), u(rng)};
            if (norm(x) < 1e-3) continue;
            double t = std::abs(u(rng));
            CHECK(s.tau(x, t) * s.tau_inv(x, t) == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(s.effective_potential(x, t) >= 0.0);
        }
    }
}

TEST_CASE("torus wrap maps x1 into (-1, 1] and both seam nodes coincide") {
    FieldSpec s;
    s.potential = parse_potential("separable_x2");
    s.volume = parse_volume("radial_time");
    s.topology = Topology::torus_strip;
    CHECK(s.wrap({1.0, 0.3}).x == doctest::Approx(1.0));
    CHECK(s.wrap({-1.0, 0.3}).x == doctest::Approx(1.0));
    CHECK(s.wrap({2.5, 0.0}).x == doctest::Approx(0.5));
    CHECK(s.wrap({-1.5, 0.0}).x == doctest::Approx(0.5));
    // periodicity of evaluated fields through the seam
    CHECK(s.tau({1.0, 0.7}, 2.0) == s.tau({-1.0, 0.7}, 2.0));
}

TEST_CASE("field spec validation accepts shipped families, rejects bad ones") {
    FieldSpec ok = harmonic_spec();
    CHECK_NOTHROW(validate_field_spec(ok, {-3, -3}, {3, 3}, 0.0));

    // a potential with a negative region fails the W >= 0 sampling
    FieldSpec bad;
    bad.potential = parse_potential("polynomial(0,1)"); // W = x, negative for x < 0
    bad.volume = parse_volume("constant(1.0)");
    bad.dimension = 1;
    CHECK_THROWS_AS(validate_field_spec(bad, {-3, -3}, {3, 3}, 0.0), Error);
}

TEST_CASE("family id parsing round-trips and rejects unknown ids") {
    CHECK(potential_id(parse_potential("aniso_quadratic(1,4)")) == "aniso_quadratic(1,4)");
    CHECK(volume_id(parse_volume("linear_time(0.5)")) == "linear_time(0.5)");
    CHECK_THROWS_WITH_AS(parse_potential("harmonc"),
                         doctest::Contains("invalid family id"), Error);
    CHECK_THROWS_AS(parse_volume("constant(-1)"), Error);
    CHECK_THROWS_AS(parse_potential("aniso_quadratic(1)"), Error);
}

} // TEST_SUITE
