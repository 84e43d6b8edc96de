// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <string>

#include "isac/config.hpp"

using namespace isac;

namespace {

const char* full_text = R"(# comment line
schema = isac-config-v1
scenario.num_tx = 2
scenario.num_rx = 3
scenario.num_slots = 4
scenario.angle_unit = degrees
scenario.target.angle = 10
scenario.target.delay = 0
scenario.target.power_dbm = 12
scenario.clutter.angles = [-30, 45]
scenario.clutter.delays = [1, -2]
scenario.clutter.powers_dbm = [5, 7]     # trailing comment
scenario.clutter.doppler_mode = affine
scenario.clutter.doppler_rho = [1.0, 0.5]
scenario.clutter.doppler_c = [0.05, -0.1]
scenario.doppler_grid = [-0.25, 0.0, 0.25]
scenario.radar_noise_dbm = -10
scenario.warden_noise_dbm = -20
design.papr_cap = 1.8
design.amp_floor = 0.4
design.phase_tol = 0.4
design.covert_eps = 0.15
design.penalty = 12
design.stop_tol_db = 0.002
design.max_outer = 50
design.phase_mode = half-plane
symbols.source = bits
symbols.bits = [0,0, 0,1, 1,1, 1,0, 0,0, 0,1, 1,1, 1,0]
warden.source = explicit
warden.h = [(0.1,-0.2), (0.3,0.4)]
sweep.xi = [0.2, 0.4]
sweep.eps = [0.1, 0.2]
ser.snr_db = [0, 10]
ser.trials = 5000
mc.echo_draws = 1000
seed = 9
)";

}  // namespace

TEST_CASE("full config round trip") {
    const ExperimentConfig cfg = parse_config(full_text, "mem");
    CHECK(cfg.scenario.geometry.num_tx == 2);
    CHECK(cfg.scenario.geometry.num_rx == 3);
    CHECK(cfg.scenario.geometry.num_slots == 4);
    CHECK(cfg.scenario.target.angle == doctest::Approx(10.0 * M_PI / 180.0));
    CHECK(cfg.scenario.clutter.size() == 2);
    CHECK(cfg.scenario.clutter[1].delay == -2);
    CHECK(cfg.scenario.clutter_doppler.mode == ClutterDopplerMode::Affine);
    CHECK(cfg.scenario.clutter_doppler.rho[1] == 0.5);
    CHECK(cfg.scenario.doppler.values.size() == 3);
    CHECK(cfg.params.papr_cap == 1.8);
    CHECK(cfg.params.phase_mode == PhaseMode::HalfPlane);
    CHECK(!cfg.symbols_random);
    CHECK(cfg.symbol_bits.size() == 16); // two bits per element, 2x4 elements
    CHECK(!cfg.warden_random);
    REQUIRE(cfg.warden_h.size() == 2);
    CHECK(cfg.warden_h(1) == std::complex<double>(0.3, 0.4));
    CHECK(cfg.sweep_xi.size() == 2);
    CHECK(cfg.ser_trials == 5000);
    CHECK(cfg.echo_draws == 1000);
    CHECK(cfg.seed == 9);

    // symbol construction honors the explicit bits
    const SymbolFrame d = cfg.make_symbols(cfg.seed);
    CHECK(d.symbols.size() == 8);
    CHECK(d.bits[0] == 0b00);
    CHECK(d.bits[1] == 0b01);
    CHECK(d.bits[2] == 0b11);
    CHECK(d.bits[3] == 0b10);

    const WardenChannel w = cfg.make_warden(cfg.seed);
    CHECK(w.noise_power == doctest::Approx(dbm_to_linear(-20)));
    CHECK(w.h(0) == std::complex<double>(0.1, -0.2));
}

TEST_CASE("config errors carry line anchors") {
    CHECK_THROWS_AS(parse_config("design.papr_cap = 2\n", "mem"), ConfigError);

    try {
        parse_config("schema = isac-config-v1\nscenario.num_tx = [\n", "mem");
        FAIL("expected a parse error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("mem:2") != std::string::npos);
    }

    try {
        parse_config("schema = isac-config-v1\nnot a key value line\n", "mem");
        FAIL("expected a parse error");
    } catch (const ConfigError& err) {
        CHECK(err.line() == 2);
    }

    // duplicate keys are rejected
    CHECK_THROWS_AS(
        parse_config("schema = isac-config-v1\nseed = 1\nseed = 2\n", "mem"),
        ConfigError);
}

TEST_CASE("amplitude floor above one is rejected at load") {
    const std::string text =
        "schema = isac-config-v1\ndesign.amp_floor = 1.5\nseed = 1\n";
    try {
        parse_config(text, "mem");
        FAIL("expected a validation error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("amp_floor") != std::string::npos);
        CHECK(err.line() == 2);
    }
}

TEST_CASE("a seed is mandatory once anything is random") {
    CHECK_THROWS_AS(parse_config("schema = isac-config-v1\n", "mem"), ConfigError);
    CHECK_NOTHROW(parse_config("schema = isac-config-v1\nseed = 3\n", "mem"));
}

TEST_CASE("schema line is required") {
    CHECK_THROWS_AS(parse_config("seed = 1\n", "mem"), ConfigError);
    CHECK_THROWS_AS(parse_config("schema = other-v2\nseed = 1\n", "mem"), ConfigError);
}

TEST_CASE("desk-scale override reshapes the geometry only") {
    ExperimentConfig cfg = parse_config("schema = isac-config-v1\nseed = 1\n", "mem");
    const double eps = cfg.params.covert_eps;
    apply_desk_scale(cfg);
    CHECK(cfg.scenario.geometry.num_tx == 4);
    CHECK(cfg.scenario.geometry.num_rx == 4);
    CHECK(cfg.scenario.geometry.num_slots == 16);
    CHECK(cfg.params.covert_eps == eps);
}

TEST_CASE("rayleigh warden draws are seeded and sized by the geometry") {
    ExperimentConfig cfg = parse_config(
        "schema = isac-config-v1\nscenario.num_tx = 3\nwarden.gain_db = -20\nseed = 4\n",
        "mem");
    const WardenChannel a = cfg.make_warden(4);
    const WardenChannel b = cfg.make_warden(4);
    const WardenChannel c = cfg.make_warden(5);
    REQUIRE(a.h.size() == 3);
    CHECK((a.h - b.h).norm() == 0.0);
    CHECK((a.h - c.h).norm() > 0.0);
    // average power per entry tracks the configured gain loosely
    CHECK(a.h.squaredNorm() < 10.0 * 3 * 0.01);
}
