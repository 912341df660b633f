#include <doctest.h>

#include <cmath>

#include "harmcalc/harm.hpp"
#include "harmcalc/model_io.hpp"
#include "harmcalc/model_zoo.hpp"

using namespace harmcalc;

TEST_CASE("the exported treatment model round-trips with its numbers") {
    const auto model = treatment_model();
    const auto doc = export_model(model.scm, model.utility);
    const auto loaded = parse_model(doc);

    CHECK(expected_utility(loaded.scm, loaded.utility, "0", {}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(expected_utility(loaded.scm, loaded.utility, "1", {}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(expected_utility(loaded.scm, loaded.utility, "2", {}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(expected_harm(loaded.scm, loaded.utility, "1", {}) == 0.0);
    CHECK(expected_harm(loaded.scm, loaded.utility, "2", {}) == doctest::Approx(0.1).epsilon(1e-12));

    // export(load(x)) is semantically identical: same document again
    CHECK(export_model(loaded.scm, loaded.utility) == doc);
}

TEST_CASE("objectives ride along in the model file") {
    const auto model = treatment_model();
    const Objective objective{hpu_table(model.scm, model.utility, 1.0)};
    const auto doc = export_model(model.scm, model.utility, &objective);
    const auto loaded = parse_model(doc);
    REQUIRE(loaded.objective.has_value());
    CHECK(expected_objective(loaded.scm, *loaded.objective, "2", {}) ==
          doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("schema violations carry their JSON path") {
    const auto model = treatment_model();
    auto doc = export_model(model.scm, model.utility);

    auto broken = doc;
    broken["mechanisms"]["Y"]["table"].erase("1|0|1|0");
    try {
        parse_model(broken);
        FAIL("missing table entry accepted");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("$.mechanisms.Y.table") != std::string::npos);
        CHECK(what.find("1|0|1|0") != std::string::npos);
    }

    auto cyclic = doc;
    cyclic["mechanisms"]["Y"]["parents"] = {"T", "Y"};
    CHECK_THROWS_AS(parse_model(cyclic), ValidationError);

    auto missing_utility = doc;
    missing_utility["utility"].erase("2||1");
    try {
        parse_model(missing_utility);
        FAIL("missing utility entry accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("2||1") != std::string::npos);
    }

    auto bad_probs = doc;
    bad_probs["exogenous"][0]["probs"] = {0.5, 0.6};
    CHECK_THROWS_AS(parse_model(bad_probs), ValidationError);
}

TEST_CASE("number formatting is plain decimal with 12 significant digits") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1234.5) == "1234.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(1e-7) == "1e-07");
    CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
}
