#include <doctest.h>

#include <string>

#include "vamos/config.hpp"
#include "vamos/experiment.hpp"

using namespace vamos;

TEST_CASE("run config serializes and parses back unchanged") {
    RunConfig rc;
    rc.seed = 42;
    rc.phantom_count = 5;
    rc.loss.lambda_proj = 2.5;
    rc.corruption.p = 0.3;
    rc.train.epochs = 12;
    const ordered_json j = to_json(rc);
    const RunConfig back = run_config_from_json(j);
    CHECK(to_json(back).dump(2) == j.dump(2));
    CHECK(back.seed == 42);
    CHECK(back.phantom_count == 5);
    CHECK(back.loss.lambda_proj == 2.5);
    CHECK(back.corruption.p == 0.3);
    CHECK(back.train.epochs == 12);
}

TEST_CASE("unknown keys fail loudly at any level") {
    CHECK_THROWS_AS(run_config_from_json(ordered_json::parse(R"({"sed": 1})")), config_error);
    CHECK_THROWS_AS(
        run_config_from_json(ordered_json::parse(R"({"loss": {"alpha": 1.0}})")), config_error);
    CHECK_THROWS_AS(
        run_config_from_json(ordered_json::parse(R"({"phantom": {"slices": 3}})")), config_error);
    CHECK_THROWS_AS(
        run_config_from_json(ordered_json::parse(R"({"train": {"corruption": {"q": 1}}})")),
        config_error);
    CHECK_THROWS_AS(run_config_from_json(ordered_json::parse(R"({"loss": 7})")), config_error);
}

TEST_CASE("bad value types are config errors with the key named") {
    try {
        run_config_from_json(ordered_json::parse(R"({"train": {"epochs": "ten"}})"));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("epochs") != std::string::npos);
    }
}

TEST_CASE("partial configs overlay the defaults") {
    const RunConfig rc =
        run_config_from_json(ordered_json::parse(R"({"loss": {"lambda_proj": 0.0}})"));
    CHECK(rc.loss.lambda_proj == 0.0);
    CHECK(rc.loss.alpha_w == 100.0); // untouched default
    CHECK(rc.model.depth == 3);
    CHECK(rc.phantom_count == 7);
    CHECK(rc.eval.n_events == 2);
}

TEST_CASE("corruption mode and truncation parse from strings") {
    const RunConfig rc = run_config_from_json(
        ordered_json::parse(R"({"corruption": {"mode": "fixed", "truncation": "clamp"}})"));
    CHECK(rc.corruption.mode == CorruptionMode::fixed);
    CHECK(rc.corruption.truncation == TruncationPolicy::clamp);
    CHECK_THROWS_AS(run_config_from_json(
                        ordered_json::parse(R"({"corruption": {"mode": "sometimes"}})")),
                    config_error);
    CHECK_THROWS_AS(run_config_from_json(
                        ordered_json::parse(R"({"corruption": {"truncation": "wrap"}})")),
                    config_error);
}

TEST_CASE("seed resolution derives distinct per-section streams") {
    RunConfig rc;
    rc.seed = 42;
    resolve_seeds(rc);
    CHECK(rc.corruption.seed != 0);
    CHECK(rc.model.seed != 0);
    CHECK(rc.train.seed != 0);
    CHECK(rc.corruption.seed != rc.model.seed);
    CHECK(rc.model.seed != rc.train.seed);
    CHECK(rc.train.corruption.seed == rc.corruption.seed); // synced section

    RunConfig again;
    again.seed = 42;
    resolve_seeds(again);
    CHECK(again.model.seed == rc.model.seed); // derivation is pure

    RunConfig expl;
    expl.seed = 42;
    expl.model.seed = 777; // explicit section seed wins
    resolve_seeds(expl);
    CHECK(expl.model.seed == 777);
    CHECK(expl.corruption.seed == rc.corruption.seed);
}

TEST_CASE("the train section shares the top-level corruption settings") {
    const RunConfig rc = run_config_from_json(
        ordered_json::parse(R"({"corruption": {"p": 0.2, "max_block": 4}})"));
    CHECK(rc.train.corruption.p == 0.2);
    CHECK(rc.train.corruption.max_block == 4);
}

TEST_CASE("config files load with parse errors mapped to config_error") {
    const std::string path = "/tmp/vamos_test_cfg.json";
    write_text_file(path, R"({"seed": 9, "eval": {"n_events": 3}})");
    const RunConfig rc = load_run_config(path);
    CHECK(rc.seed == 9);
    CHECK(rc.eval.n_events == 3);

    write_text_file(path, "{ definitely not json");
    CHECK_THROWS_AS(load_run_config(path), config_error);
    CHECK_THROWS_AS(load_run_config("/tmp/vamos_no_such_config.json"), config_error);
}

TEST_CASE("eval config validation") {
    EvalConfig ec;
    ec.n_events = 0;
    CHECK_THROWS_AS(ec.validate(), config_error);
}
