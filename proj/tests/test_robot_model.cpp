#include <doctest.h>

#include "test_support.hpp"

using namespace thermik;
using test_support::repo_path;

TEST_CASE("biped fixture loads with the expected dimensions") {
    const dyn::RobotModel model = test_support::load_biped();
    CHECK(model.n() == 9);
    CHECK(model.m() == 6);
    CHECK(model.floating_base);
    CHECK(model.links.size() == 7);
    CHECK(model.total_mass() == doctest::Approx(130.0));
    CHECK(model.contact_index("l_sole") >= 0);
    CHECK(model.contact_index("r_toe") >= 0);
}

TEST_CASE("pendulum fixture is a one-DOF fixed-base model") {
    const dyn::RobotModel model = dyn::load_model(repo_path("models/pendulum.json"));
    CHECK(model.n() == 1);
    CHECK(model.m() == 1);
    CHECK_FALSE(model.floating_base);
}

TEST_CASE("pair fixture binds two pushrods to one joint") {
    const dyn::RobotModel model = dyn::load_model(repo_path("models/pair_joint.json"));
    CHECK(model.n() == 2);
    CHECK(model.m() == 2);
    CHECK(model.actuators.size() == 2);
}

TEST_CASE("schema violations are rejected with located diagnostics") {
    SUBCASE("duplicate joint name") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": 1.0, "com": [0,0], "inertia": 0.1},
                      {"name": "b", "mass": 1.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "j", "type": "revolute", "parent": "world", "child": "a"},
                       {"name": "j", "type": "revolute", "parent": "a", "child": "b"}]
        })";
        CHECK_THROWS_WITH_AS(dyn::model_from_json(doc), doctest::Contains("duplicate joint"),
                             SchemaError);
    }
    SUBCASE("negative mass") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": -2.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "j", "type": "revolute", "parent": "world", "child": "a"}]
        })";
        CHECK_THROWS_WITH_AS(dyn::model_from_json(doc), doctest::Contains("'a'"), SchemaError);
    }
    SUBCASE("kinematic loop") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": 1.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "j1", "type": "revolute", "parent": "world", "child": "a"},
                       {"name": "j2", "type": "revolute", "parent": "a", "child": "a"}]
        })";
        CHECK_THROWS_WITH_AS(dyn::model_from_json(doc), doctest::Contains("loop"), SchemaError);
    }
    SUBCASE("dangling link") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": 1.0, "com": [0,0], "inertia": 0.1},
                      {"name": "orphan", "mass": 1.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "j", "type": "revolute", "parent": "world", "child": "a"}]
        })";
        CHECK_THROWS_WITH_AS(dyn::model_from_json(doc), doctest::Contains("orphan"), SchemaError);
    }
    SUBCASE("pair joint with one pushrod") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": 1.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "w", "type": "actuated-pair", "parent": "world", "child": "a",
                        "limits": [[-1,1],[-1,1]]}],
            "actuators": [{"id": "r0", "joint": "w", "map": "pushrod-pair", "rod": 0}]
        })";
        CHECK_THROWS_WITH_AS(dyn::model_from_json(doc), doctest::Contains("pushrods"),
                             SchemaError);
    }
    SUBCASE("unknown contact link") {
        const std::string doc = R"({
            "links": [{"name": "a", "mass": 1.0, "com": [0,0], "inertia": 0.1}],
            "joints": [{"name": "j", "type": "revolute", "parent": "world", "child": "a"}],
            "contacts": [{"name": "c", "link": "nope"}]
        })";
        CHECK_THROWS_AS(dyn::model_from_json(doc), SchemaError);
    }
}

TEST_CASE("dof limits cover base and joint blocks") {
    const dyn::RobotModel model = test_support::load_biped();
    Eigen::VectorXd lo, hi;
    model.dof_limits(lo, hi);
    CHECK(std::isinf(lo(0)));
    CHECK(std::isinf(hi(2)));
    CHECK(lo(3) == -1.5);
    CHECK(hi(4) == -0.25);
    CHECK(model.is_base_dof(0));
    CHECK_FALSE(model.is_base_dof(3));
}
