#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "magnomech/core_model.hpp"

using namespace magnomech;
using Catch::Approx;

namespace {
ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Internal;
}
}  // namespace

TEST_CASE("reference parameter set validates", "[core_model]") {
    const SystemParams p = reference_params();
    const ValidatedParams v = validate(p);
    CHECK(v.get() == p);
    CHECK(v->delta_a == 1000.0);
    CHECK(v->eta == 2e-8);
}

TEST_CASE("validate rejects bad fields and names them", "[core_model]") {
    SystemParams p = reference_params();
    p.kappa_a = 0.0;
    try {
        validate(p);
        FAIL("kappa_a = 0 accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveRate);
        CHECK(e.field() == "kappa_a");
    }

    p = reference_params();
    p.nbar_b = -1.0;
    CHECK(kind_of([&] { validate(p); }) == ErrorKind::NegativeOccupation);

    p = reference_params();
    p.gamma = -0.1;
    CHECK(kind_of([&] { validate(p); }) == ErrorKind::NonPositiveRate);

    p = reference_params();
    p.omega_b = 2.0;
    CHECK(kind_of([&] { validate(p); }) == ErrorKind::InvalidUnit);

    p = reference_params();
    p.g = NAN;
    CHECK(kind_of([&] { validate(p); }) == ErrorKind::NonFinite);
}

TEST_CASE("validate is idempotent", "[core_model][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.001, 5.0);
    for (int k = 0; k < 100; ++k) {
        SystemParams p;
        p.delta_a = u(rng);
        p.delta_m = u(rng);
        p.g = u(rng);
        p.eta = u(rng);
        p.kappa_a = u(rng);
        p.kappa_m = u(rng);
        p.gamma = u(rng);
        p.nbar_b = u(rng);
        const ValidatedParams once = validate(p);
        CHECK(validate(once) == once);
        CHECK(validate(once.get()) == once);
    }
}

TEST_CASE("thermal occupation", "[core_model]") {
    CHECK(thermal_occupation(std::log(2.0)) == Approx(1.0).epsilon(1e-14));
    CHECK(thermal_occupation(50.0) < 1e-20);
    CHECK(thermal_occupation(0.1) == Approx(9.5083).margin(1e-4));
    CHECK(thermal_occupation(0.1) == Approx(9.508331944775049).epsilon(1e-13));
    CHECK(kind_of([] { thermal_occupation(0.0); }) == ErrorKind::NonPositiveRatio);
    CHECK(kind_of([] { thermal_occupation(-1.0); }) == ErrorKind::NonPositiveRatio);
}

TEST_CASE("thermal occupation is decreasing and below 1/x", "[core_model][property]") {
    double prev = std::numeric_limits<double>::infinity();
    for (double x = 1e-3; x < 40.0; x *= 1.1) {
        const double n = thermal_occupation(x);
        CHECK(n < prev);
        CHECK(n < 1.0 / x);
        prev = n;
    }
}

TEST_CASE("drive config constructors", "[core_model]") {
    const auto d = DriveConfig::amplitudes(3.0);
    CHECK(d.mode == DriveMode::Amplitudes);
    CHECK(d.e2 == 0.0);
    const auto c = DriveConfig::couplings(0.21);
    CHECK(c.mode == DriveMode::Couplings);
    CHECK(c.g2 == Complex{});
    CHECK(kind_of([] { DriveConfig::amplitudes(-1.0); }) == ErrorKind::InvalidArgument);

    const SystemParams p = reference_params();
    CHECK(blue_tone_frequency(p) == 1001.0);
    CHECK(red_tone_frequency(p) == 999.0);
}
