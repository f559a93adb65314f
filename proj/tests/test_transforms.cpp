#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fracheat/errors.hpp"
#include "fracheat/transforms.hpp"

using namespace fracheat;
using namespace fracheat::transforms;

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian_field(double a, const Point& x) {
    // (2 pi)^{-d} int e^{ixy} e^{-a|y|^2} dy = (4 pi a)^{-d/2} e^{-|x|^2/(4a)}
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::pow(4.0 * kPi * a, -0.5 * x.size()) * std::exp(-r2 / (4.0 * a));
}

}  // namespace

TEST_CASE("Laplace transform of elementary functions") {
    CHECK(laplace_numeric([](double) { return 1.0; }, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(laplace_numeric([](double t) { return std::exp(-t); }, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(laplace_numeric([](double t) { return t; }, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(laplace_numeric([](double t) { return std::pow(t, -0.5); }, 3.0) ==
          doctest::Approx(std::sqrt(kPi / 3.0)).epsilon(1e-12));
    CHECK(laplace_numeric([](double t) { return std::sin(t); }, 0.5) ==
          doctest::Approx(1.0 / 1.25).epsilon(1e-12));
}

TEST_CASE("Laplace transform errors") {
    CHECK_THROWS_AS(laplace_numeric([](double t) { return std::exp(2.0 * t); }, 1.0),
                    NonConvergenceError);
    CHECK_THROWS_AS(laplace_numeric([](double) { return 1.0; }, 0.0), DomainError);
    CHECK_THROWS_AS(laplace_numeric([](double) { return 1.0; }, 1.0, 2.0), DomainError);
}

TEST_CASE("Laplace identity residuals, reference cases") {
    CHECK(laplace_identity_residual(LaplaceIdentity::L3, 1.0, 1.0, 1.0) < 1e-14);
    CHECK(laplace_identity_residual(LaplaceIdentity::L3, 0.5, 1.0, 2.0) <= 1e-6);
    CHECK(laplace_identity_residual(LaplaceIdentity::L2, 1.5, 0.5, 2.0) <= 1e-6);
    CHECK(laplace_identity_residual(LaplaceIdentity::L1, 0.5, 1.0, 1.0) <= 1e-6);
    CHECK(laplace_identity_residual(LaplaceIdentity::L1, 1.5, 2.0, 2.0) <= 1e-6);
    CHECK_THROWS_AS(laplace_identity_residual(LaplaceIdentity::L2, 0.5, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(laplace_identity_residual(LaplaceIdentity::L3, 2.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(laplace_identity_residual(LaplaceIdentity::L3, 0.5, 0.0, 1.0), DomainError);
}

TEST_CASE("Laplace identity L1 with b = 1") {
    for (double a : {0.5, 1.5})
        for (double s : {1.0, 4.0}) {
            CAPTURE(a);
            CAPTURE(s);
            CHECK(laplace_identity_residual(LaplaceIdentity::L1, a, 1.0, s) <= 1e-4);
        }
}

TEST_CASE("Bernstein representation of the Mittag-Leffler function") {
    for (auto o : {specfun::MLOrder{0.5, 0.5}, {0.5, 1.0}, {0.8, 0.9}, {0.3, 0.6}})
        for (double t : {0.5, 1.0, 2.0}) {
            CAPTURE(o.alpha);
            CAPTURE(o.beta);
            CAPTURE(t);
            CHECK(kernel_representation_residual(o, t) <= 1e-5);
        }
    CHECK_THROWS_AS(kernel_representation_residual({1.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(kernel_representation_residual({1.5, 1.0}, 1.0), DomainError);
}

TEST_CASE("Gaussian integral") {
    CHECK(gaussian_integral_closed(1.0, {}, 2) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(gaussian_integral_closed(1.0, {0.5}, 1) ==
          doctest::Approx(std::sqrt(kPi) * std::exp(-0.25)).epsilon(1e-15));
    CHECK(std::abs(gaussian_integral_closed(1.0, {0.5}, 1) - 1.3803884470) < 1e-10);
    CHECK(std::abs(gaussian_integral_closed(2.0, {}, 1) - 1.2533141373) < 1e-10);
    CHECK_THROWS_AS(gaussian_integral_closed(0.0, {}, 1), DomainError);
    CHECK_THROWS_AS(gaussian_integral_closed(1.0, {1.0, 2.0}, 1), DomainError);
}

TEST_CASE("Gaussian integral against direct quadrature") {
    // int e^{-(a y^2 + 2 i b y)} dy, real part by quadrature over a wide interval.
    for (double a : {0.5, 1.0, 3.0})
        for (double b : {0.0, 0.3, 1.2}) {
            double sum = 0.0;
            const double h = 1e-3;
            for (int i = -20000; i <= 20000; ++i) {
                const double y = i * h;
                sum += std::exp(-a * y * y) * std::cos(2.0 * b * y) * h;
            }
            CHECK(gaussian_integral_closed(a, {b}, 1) == doctest::Approx(sum).epsilon(1e-12));
        }
}

TEST_CASE("spectral grid validation") {
    CHECK_NOTHROW((SpectralGrid{2, 10.0, 512}.validate()));
    CHECK_THROWS_AS((SpectralGrid{2, 10.0, 500}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralGrid{2, 10.0, 32}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralGrid{4, 10.0, 64}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralGrid{1, -1.0, 64}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralGrid{3, 1.0, 1024}.validate(std::size_t{1} << 20)), DomainError);
    CHECK(SpectralGrid::default_points_per_axis(1) == 1024);
    CHECK(SpectralGrid::default_points_per_axis(2) == 512);
    CHECK(SpectralGrid::default_points_per_axis(3) == 128);
    const auto g = SpectralGrid::for_spatial_half_width(1, 8.0, 256);
    CHECK(g.spatial_half_width() == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(g.dx() * g.dy() == doctest::Approx(2.0 * kPi / 256).epsilon(1e-15));
}

TEST_CASE("inverse Fourier transform at the origin") {
    auto g = [](double r) { return std::exp(-r); };
    const SpectralGrid g1{1, 12.0, 256};
    CHECK(std::abs(inverse_fourier_field(g, g1, {{0.0}}).values[0] - 0.2820947918) < 1e-10);
    const SpectralGrid g2{2, 12.0, 128};
    CHECK(std::abs(inverse_fourier_field(g, g2, {{0.0, 0.0}}).values[0] - 0.0795774715) < 1e-10);
    const auto zero = inverse_fourier_field([](double) { return 0.0; }, g2, {{0.0, 0.0}, {1.0, 2.0}});
    CHECK(zero.values[0] == 0.0);
    CHECK(zero.values[1] == 0.0);
}

TEST_CASE("inverse Fourier transform of Gaussians, lattice and points") {
    for (int d : {1, 2})
        for (double a : {0.5, 1.0, 2.0}) {
            auto g = [a](double r) { return std::exp(-a * r); };
            const auto grid = SpectralGrid::for_spatial_half_width(d, 16.0, d == 1 ? 1024 : 256);
            const auto field = inverse_fourier_lattice(g, grid);
            double max_err = 0.0;
            double max_val = 0.0;
            for (std::size_t flat = 0; flat < field.values.size(); ++flat) {
                Point x;
                std::size_t rest = flat;
                for (int axis = 0; axis < d; ++axis) {
                    x.insert(x.begin(), field.coordinate(static_cast<int>(rest % field.n)));
                    rest /= field.n;
                }
                max_err = std::max(max_err, std::abs(field.values[flat] - gaussian_field(a, x)));
                max_val = std::max(max_val, std::abs(field.values[flat]));
            }
            CAPTURE(d);
            CAPTURE(a);
            CHECK(max_err < 1e-6);
            CHECK(field.diagnostics.max_imag <= 1e-8 * max_val);
            CHECK_FALSE(field.diagnostics.truncated);

            std::vector<Point> pts = d == 1 ? std::vector<Point>{{0.3}, {-2.7}, {5.1}}
                                            : std::vector<Point>{{0.3, -0.2}, {-2.7, 1.1}, {4.0, 4.5}};
            const auto direct = inverse_fourier_field(g, grid, pts);
            for (std::size_t i = 0; i < pts.size(); ++i)
                CHECK(std::abs(direct.values[i] - gaussian_field(a, pts[i])) < 1e-6);
            CHECK(direct.diagnostics.max_imag <= 1e-8 * max_val);
        }
}

TEST_CASE("Plancherel identity on the lattice") {
    for (int d : {1, 2})
        for (double a : {0.5, 1.0}) {
            auto g = [a](double r) { return std::exp(-a * r); };
            const auto grid = SpectralGrid::for_spatial_half_width(d, 16.0, d == 1 ? 1024 : 256);
            const auto field = inverse_fourier_lattice(g, grid);
            double sum = 0.0;
            for (double v : field.values) sum += v * v;
            sum *= std::pow(field.dx, d);
            // int |g|^2 dy = int e^{-2a|y|^2} dy
            const double spectral = std::pow(2.0 * kPi, -d) * gaussian_integral_closed(2.0 * a, {}, d);
            CHECK(sum == doctest::Approx(spectral).epsilon(1e-6));
        }
}

TEST_CASE("lattice mass equals the symbol at zero") {
    auto g = [](double r) { return 1.0 / (1.0 + r); };
    for (int d : {1, 2, 3}) {
        const SpectralGrid grid{d, 20.0, 64};
        const auto field = inverse_fourier_lattice(g, grid);
        double mass = 0.0;
        for (double v : field.values) mass += v;
        mass *= std::pow(field.dx, d);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(field.diagnostics.truncated);
    }
}

TEST_CASE("taper keeps the mass and removes the box ripple") {
    // g = 1/(1+r) has a slowly decaying symbol; its transform in d = 1 is
    // e^{-|x|}/2.
    auto g = [](double r) { return 1.0 / (1.0 + r); };
    const auto grid = SpectralGrid::for_spatial_half_width(1, 40.0, 8192);
    FourierOptions taper;
    taper.taper = true;
    const auto plain = inverse_fourier_lattice(g, grid);
    const auto smooth = inverse_fourier_lattice(g, grid, taper);
    double mass = 0.0;
    for (double v : smooth.values) mass += v;
    CHECK(mass * smooth.dx == doctest::Approx(1.0).epsilon(1e-12));
    const int far = smooth.n / 2 + static_cast<int>(30.0 / smooth.dx);
    const double exact = 0.5 * std::exp(-smooth.coordinate(far));
    const double smooth_err = std::abs(smooth.values[far] - exact);
    const double plain_err = std::abs(plain.values[far] - exact);
    CAPTURE(plain_err);
    CHECK(smooth_err < 1e-12);
    CHECK(smooth_err < 0.1 * plain_err);
}

TEST_CASE("aliasing and truncation diagnostics") {
    auto g = [](double r) { return std::exp(-r); };
    const SpectralGrid grid{1, 4.0, 64};  // periodic half-width 64 pi / 8 ~ 25.1
    CHECK_THROWS_AS(inverse_fourier_field(g, grid, {{30.0}}), AliasingError);
    CHECK_THROWS_AS(inverse_fourier_field(g, grid, {{0.0, 1.0}}), DomainError);
    const auto near = inverse_fourier_field(g, SpectralGrid{1, 2.0, 64}, {{0.0}});
    CHECK(near.diagnostics.truncated);
    CHECK(near.diagnostics.boundary_symbol == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("decay cutoff by bisection") {
    auto g = [](double r) { return std::exp(-r); };
    const double r = decay_cutoff(g, 1e-10);
    CHECK(r == doctest::Approx(std::sqrt(10.0 * std::log(10.0))).epsilon(1e-10));
    CHECK(decay_cutoff(g, 1e-10, 100.0) == doctest::Approx(r).epsilon(1e-10));
    CHECK_THROWS_AS(decay_cutoff([](double) { return 1.0; }, 1e-10), NonConvergenceError);
}
