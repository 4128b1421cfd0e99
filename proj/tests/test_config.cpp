#include <catch2/catch_amalgamated.hpp>

#include "finsler/config.hpp"
#include "finsler/report.hpp"
#include "finsler/run.hpp"

using namespace finsler;

static const char* kRatioConfig = R"(
dim: 3
metric:
  kind: ratio3
  A: 1
rng_seed: 42
trials: 25
)";

TEST_CASE("config parsing and defaults") {
    RunConfig cfg = parse_config(kRatioConfig);
    CHECK(cfg.dim == 3);
    CHECK(cfg.metric.kind == "ratio3");
    CHECK(cfg.metric.A == 1.0);
    CHECK(cfg.rng_seed == 42);
    CHECK(cfg.trials == 25);
    CHECK(cfg.tol.class_tol == 1e-9);
    CHECK(cfg.tol.ortho_tol == 1e-8);
    CHECK(cfg.tol.singular_tol == 1e-10);
    CHECK(cfg.tol.rank_tol == 1e-7);
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("config validation rejects bad inputs") {
    auto expect_config_error = [](const std::string& text) {
        try {
            RunConfig cfg = parse_config(text);
            validate_config(cfg);
            FAIL("expected ConfigError for: " + text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConfigError);
        }
    };
    expect_config_error("dim: 12\nmetric: { kind: euclidean }\n");
    expect_config_error("dim: 0\nmetric: { kind: euclidean }\n");
    expect_config_error("dim: 3\nmetric: { kind: pseudo, p: 1, q: 1 }\n");
    expect_config_error("dim: 2\nmetric: { kind: ratio3 }\n");
    expect_config_error("dim: 3\nmetric: { kind: nope }\n");
    expect_config_error("dim: 3\nmetric: { kind: expr }\n");
    expect_config_error("dim: 2\nmetric: { kind: euclidean }\ntrials: 0\n");
    expect_config_error(
        "dim: 2\nmetric: { kind: euclidean }\nseed_basis: [[1, 1], [1, 1]]\n");
    expect_config_error("dim: 2\nmetric: { kind: euclidean }\ntolerances: { ortho_tol: -1 }\n");
    expect_config_error("not yaml: [\n");
}

TEST_CASE("canonical json: sorted keys, 17 significant digits, NaN as null") {
    json j;
    j["b"] = 0.1;
    j["a"] = 1.0;
    j["nested"] = json{{"z", 2}, {"y", std::nan("")}};
    std::string s = canonical_dump(j);
    CHECK(s ==
          "{\"a\":1,\"b\":0.10000000000000001,\"nested\":{\"y\":null,\"z\":2}}\n");
}

TEST_CASE("reports are byte-identical for identical config and seed") {
    RunResult a = run("gram", kRatioConfig);
    RunResult b = run("gram", kRatioConfig);
    CHECK(a.exit_code == 0);
    CHECK(a.report.serialize() == b.report.serialize());

    RunResult c = run("probe-closure", kRatioConfig);
    RunResult d = run("probe-closure", kRatioConfig);
    CHECK(c.report.serialize() == d.report.serialize());
}

TEST_CASE("seed override changes the stream and is echoed") {
    RunResult a = run("probe-closure", kRatioConfig);
    RunResult b = run("probe-closure", kRatioConfig, 43);
    CHECK(a.report.body["rng_seed"] == 42);
    CHECK(b.report.body["rng_seed"] == 43);
    CHECK(a.report.serialize() != b.report.serialize());
}

TEST_CASE("exit codes: 0 ok, 1 invariant, 2 config, 3 numeric") {
    CHECK(run("check", "dim: 2\nmetric: { kind: euclidean }\ntrials: 10\n").exit_code == 0);
    CHECK(run("gram", "dim: 3\nmetric: { kind: bad }\n").exit_code == 2);
    CHECK(run("nonsense", kRatioConfig).exit_code == 2);

    // isotropic seed: numeric failure with a step witness in the diagnostics
    RunResult iso = run("gram",
                        "dim: 2\nmetric: { kind: pseudo, p: 1, q: 1 }\n"
                        "seed_basis: [[1, 1], [1, 0]]\n");
    CHECK(iso.exit_code == 3);
    REQUIRE(iso.report.body["diagnostics"].size() == 1);
    CHECK(iso.report.body["diagnostics"][0]["code"] == "IsotropicIntermediate");
    CHECK(iso.report.body["diagnostics"][0]["witness"]["step"] == 1.0);
    CHECK(iso.report.body["status"] == "numeric_error");

    // inhomogeneous metric text is a parse-stage failure
    CHECK(run("check", "dim: 2\nmetric: { kind: expr, text: \"v1^2 + v2\" }\n").exit_code ==
          2);
}

TEST_CASE("probe-closure exits 0 with the verdict as data") {
    RunResult r = run("probe-closure", kRatioConfig);
    CHECK(r.exit_code == 0);
    CHECK(r.report.body["outputs"]["verdict"] == "NotClosed");
    CHECK(r.report.body["outputs"]["not_closed"].get<int>() >= 1);
    // the pinned witness for rng_seed 42 (trials do not affect pair 0)
    CHECK(r.report.body["outputs"]["first_not_closed"]["trial"] == 0);
    CHECK(r.report.body["outputs"]["first_not_closed"]["digest"] ==
          "fnv1a:94625aa5e214b209");
    CHECK(r.report.body["outputs"]["first_not_closed"]["violation"].get<double>() ==
          Catch::Approx(0.090757333486661568).epsilon(1e-9));
}

TEST_CASE("subcommands produce their documented outputs") {
    RunResult d = run("derive",
                      "dim: 3\nmetric: { kind: ratio3, A: 1 }\npoint: [1, 2, 3]\n");
    CHECK(d.exit_code == 0);
    CHECK(d.report.body["outputs"]["f2"].get<double>() ==
          Catch::Approx(14.0 + 36.0 / 196.0));
    CHECK(d.report.body["outputs"]["classification"] == "spacelike");

    RunResult l = run("lightspeed",
                      "dim: 4\nmetric: { kind: spacetime4, c: 2, A: 1 }\ntrials: 200\n");
    CHECK(l.exit_code == 0);
    CHECK(l.report.body["outputs"]["constancy_pass"] == true);
    CHECK(l.report.body["outputs"]["v0_mean"].get<double>() == Catch::Approx(0.5));

    RunResult lie = run("lie", "dim: 2\nmetric: { kind: pseudo, p: 1, q: 1 }\ntrials: 10\n");
    CHECK(lie.exit_code == 0);
    CHECK(lie.report.body["outputs"]["dim"] == 1);

    RunResult cone = run("cone",
                         "dim: 3\nmetric: { kind: pseudo, p: 2, q: 1 }\n"
                         "seed_plus: [[1, 0, 0], [0, 1, 0]]\n");
    CHECK(cone.exit_code == 0);
    CHECK(cone.report.body["outputs"]["combined"]["orthonormal"] == true);

    // cone without seed_plus is a config error
    CHECK(run("cone", "dim: 3\nmetric: { kind: pseudo, p: 2, q: 1 }\n").exit_code == 2);
    // derive without point likewise
    CHECK(run("derive", "dim: 3\nmetric: { kind: ratio3 }\n").exit_code == 2);
}
