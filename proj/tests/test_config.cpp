#include "doctest.h"

#include <cmath>

#include "seit/config.hpp"

using namespace seit;

TEST_CASE("config round-trips through serialization") {
    for (const char* name : {"test1", "test2", "test3", "test4"}) {
        ExperimentConfig cfg = preset(name);
        std::string text = serialize_config(cfg);
        ExperimentConfig back = parse_config(text);
        CHECK(serialize_config(back) == text);
        CHECK(config_hash(back) == config_hash(cfg));
    }
}

TEST_CASE("config hash ignores output location but tracks the experiment") {
    ExperimentConfig a = preset("test1");
    ExperimentConfig b = a;
    b.out_dir = "elsewhere";
    b.threads = 7;
    CHECK(config_hash(a) == config_hash(b));
    ExperimentConfig c = a;
    c.master_seed += 1;
    CHECK(config_hash(a) != config_hash(c));
    ExperimentConfig d = a;
    d.noise_level = 0.5;
    CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS(parse_config("x = 1\n"), ContractError);              // no section
    CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), ContractError);     // bad section
    CHECK_THROWS_AS(parse_config("[mesh]\nbogus = 1\n"), ContractError);  // bad key
    CHECK_THROWS_AS(parse_config("[mesh]\nrefinement_level 3\n"), ContractError);
    CHECK_THROWS_AS(parse_config("[mesh]\nrefinement_level = x\n"), ContractError);
    CHECK_THROWS_AS(parse_config("[pixel]\nshape = disk\n"), ContractError);  // no id
}

TEST_CASE("config validation catches module precondition violations") {
    ExperimentConfig cfg = preset("test1");
    cfg.T = 0;
    CHECK_THROWS_AS(validate_config(cfg), ContractError);
    cfg = preset("test1");
    cfg.method.tau_policy = TauPolicy::fixed;
    cfg.method.tau = 500;
    CHECK_THROWS_AS(validate_config(cfg), ContractError);
    cfg = preset("test1");
    std::get<DiskShape>(cfg.anomaly.pixels[0].shape).center = Vec2(0.9, 0.0);
    CHECK_THROWS_AS(validate_config(cfg), ContractError);  // boundary margin
    CHECK_THROWS_AS(preset("test99"), ContractError);
}

TEST_CASE("presets encode the published contrast statistics") {
    // test1: E(sigma^-1)^-1 = 2/log(11/9) ~ 9.97, condition (a).
    ExperimentConfig t1 = preset("test1");
    ContrastClassification c1 = classify_contrast(t1.anomaly);
    CHECK(c1.kind == ContrastCase::case_a);
    CHECK(1.0 + c1.alpha_max == doctest::Approx(9.9666).epsilon(1e-4));
    CHECK(t1.T == 50);           // 2T = 100 patterns
    CHECK(t1.chaos_degree == 3);  // m = 3

    // test2: condition (b) with alpha = 0.3 from the midpoint contrasts.
    ExperimentConfig t2 = preset("test2");
    ContrastClassification c2 = classify_contrast(t2.anomaly);
    CHECK(c2.kind == ContrastCase::case_b);
    CHECK(c2.alpha_max == doctest::Approx(0.3).epsilon(1e-12));

    // test3: disk pixels exceed 4.3, square pixels exceed 1.5, overall (a).
    ExperimentConfig t3 = preset("test3");
    REQUIRE(t3.anomaly.count() == 9);
    Eigen::VectorXd inv = expected_inverse_sigma(t3.anomaly).cwiseInverse();
    for (int q = 0; q < 3; ++q) CHECK(inv[q] > 4.3);
    for (int q = 3; q < 9; ++q) {
        CHECK(inv[q] > 1.5);
        CHECK(inv[q] == doctest::Approx(3.0 / std::log(7.0)).epsilon(1e-12));
    }
    CHECK(classify_contrast(t3.anomaly).kind == ContrastCase::case_a);

    // test4: sigma in [0.5, 3.5], E(sigma^-1)^-1 ~ 1.54, condition (a).
    ExperimentConfig t4 = preset("test4");
    ContrastClassification c4 = classify_contrast(t4.anomaly);
    CHECK(c4.kind == ContrastCase::case_a);
    CHECK(1.0 + c4.alpha_max == doctest::Approx(1.5417).epsilon(1e-4));
}
