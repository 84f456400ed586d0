#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"
#include "thermik/linalg.hpp"
#include "thermik/statics.hpp"

using namespace thermik;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using test_support::biped_nominal;
using test_support::double_support;
using test_support::left_support;
using test_support::load_biped;
using test_support::repo_path;

namespace {

VectorXd fd_gravity(const dyn::RobotModel& model, const VectorXd& q, double h = 1e-6) {
    VectorXd g(model.n());
    for (int i = 0; i < model.n(); ++i) {
        VectorXd qp = q, qm = q;
        qp(i) += h;
        qm(i) -= h;
        g(i) = (dyn::potential_energy(model, qp) - dyn::potential_energy(model, qm)) / (2.0 * h);
    }
    return g;
}

Eigen::Index projector_rank(const MatrixXd& p) {
    Eigen::JacobiSVD<MatrixXd> svd(p);
    return (svd.singularValues().array() > 0.5).count();
}

}  // namespace

TEST_CASE("pendulum inertia and gravity match the hand derivation") {
    const dyn::RobotModel model = dyn::load_model(repo_path("models/pendulum.json"));
    // A = m lc^2 + I = 2 * 0.25 + 0.1
    for (double q : {-1.2, 0.0, 0.7}) {
        const MatrixXd a = dyn::mass_matrix(model, VectorXd::Constant(1, q));
        CHECK(a(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
    }
    CHECK(dyn::gravity_vector(model, VectorXd::Zero(1))(0) == doctest::Approx(0.0).epsilon(1e-12));
    for (double q : {-0.9, 0.3, 1.5}) {
        const double expected = 2.0 * 9.81 * 0.5 * std::sin(q);
        CHECK(dyn::gravity_vector(model, VectorXd::Constant(1, q))(0) ==
              doctest::Approx(expected).epsilon(1e-12));
        const VectorXd fd = fd_gravity(model, VectorXd::Constant(1, q));
        CHECK(std::abs(fd(0) - expected) <= 1e-6);
    }
}

TEST_CASE("mass matrix is symmetric positive definite at random configurations") {
    const dyn::RobotModel model = load_biped();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        VectorXd q(9);
        for (int i = 0; i < 9; ++i) q(i) = uni(rng);
        const MatrixXd a = dyn::mass_matrix(model, q);
        CHECK((a - a.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("gravity vector matches finite differences of the potential") {
    const dyn::RobotModel model = load_biped();
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd q(9);
        for (int i = 0; i < 9; ++i) q(i) = uni(rng);
        const VectorXd g = dyn::gravity_vector(model, q);
        const VectorXd fd = fd_gravity(model, q);
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
}

TEST_CASE("foot jacobian base columns form the planar transport map at zero pose") {
    const dyn::RobotModel model = load_biped();
    VectorXd q = VectorXd::Zero(9);
    const dyn::ContactConfig cfg{"right", {"r_sole"}};
    const MatrixXd jc = dyn::contact_jacobian(model, q, cfg);
    REQUIRE(jc.rows() == 3);
    // translation columns are the identity
    CHECK(jc(0, 0) == doctest::Approx(1.0));
    CHECK(jc(1, 0) == doctest::Approx(0.0));
    CHECK(jc(0, 1) == doctest::Approx(0.0));
    CHECK(jc(1, 1) == doctest::Approx(1.0));
    // rotation column is perp(w - base origin); at q = 0 the sole sits at
    // (0.18, -0.86) relative to the base
    CHECK(jc(0, 2) == doctest::Approx(0.86).epsilon(1e-9));
    CHECK(jc(1, 2) == doctest::Approx(0.18).epsilon(1e-9));
    CHECK(jc(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("contact jacobian matches finite differences of the frame pose") {
    const dyn::RobotModel model = load_biped();
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> uni(-0.6, 0.6);
    const dyn::ContactConfig cfg = double_support();
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd q(9);
        for (int i = 0; i < 9; ++i) q(i) = uni(rng);
        const MatrixXd jc = dyn::contact_jacobian(model, q, cfg);
        REQUIRE(jc.rows() == 6);
        const double h = 1e-7;
        for (int d = 0; d < 9; ++d) {
            VectorXd qp = q, qm = q;
            qp(d) += h;
            qm(d) -= h;
            int row = 0;
            for (const auto& frame : cfg.frames) {
                const auto pp = dyn::contact_frame_pose(model, qp, frame);
                const auto pm = dyn::contact_frame_pose(model, qm, frame);
                const Eigen::Vector2d dpos = (pp.position - pm.position) / (2.0 * h);
                CHECK(std::abs(dpos.x() - jc(row, d)) <= 1e-6);
                CHECK(std::abs(dpos.y() - jc(row + 1, d)) <= 1e-6);
                CHECK(std::abs((pp.angle - pm.angle) / (2.0 * h) - jc(row + 2, d)) <= 1e-6);
                row += 3;
            }
        }
    }
}

TEST_CASE("dynamically consistent pseudo-inverse") {
    const dyn::RobotModel model = load_biped();
    const MatrixXd a = dyn::mass_matrix(model, biped_nominal());

    SUBCASE("identity task map inverts to the identity") {
        const MatrixXd xbar = dyn::dyn_consistent_pinv(MatrixXd::Identity(9, 9), a);
        CHECK((xbar - MatrixXd::Identity(9, 9)).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("full-row-rank maps get a right inverse") {
        std::mt19937_64 rng(104);
        std::normal_distribution<double> gauss;
        MatrixXd x(4, 9);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 9; ++c) x(r, c) = gauss(rng);
        const MatrixXd xbar = dyn::dyn_consistent_pinv(x, a);
        CHECK((x * xbar - MatrixXd::Identity(4, 4)).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
    SUBCASE("a repeated row yields an idempotent weighted projector") {
        std::mt19937_64 rng(105);
        std::normal_distribution<double> gauss;
        MatrixXd x(4, 9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 9; ++c) x(r, c) = gauss(rng);
        x.row(3) = x.row(1);
        const MatrixXd p = x * dyn::dyn_consistent_pinv(x, a);
        CHECK((p * p - p).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("contact null space identities") {
    const dyn::RobotModel model = load_biped();

    SUBCASE("no contacts gives the identity") {
        const dyn::ContactConfig none{"free", {}};
        const MatrixXd nc = dyn::contact_nullspace(model, biped_nominal(), none);
        CHECK((nc - MatrixXd::Identity(9, 9)).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("projector identities at random configurations") {
        std::mt19937_64 rng(106);
        std::uniform_real_distribution<double> uni(-0.7, 0.7);
        const dyn::ContactConfig cfg = double_support();
        for (int trial = 0; trial < 100; ++trial) {
            VectorXd q(9);
            for (int i = 0; i < 9; ++i) q(i) = uni(rng);
            const MatrixXd nc = dyn::contact_nullspace(model, q, cfg);
            const MatrixXd jc = dyn::contact_jacobian(model, q, cfg);
            CHECK((jc * nc).lpNorm<Eigen::Infinity>() <= 1e-9);
            CHECK((nc * nc - nc).lpNorm<Eigen::Infinity>() <= 1e-9);
        }
    }
    SUBCASE("rank equals n minus the contact rank in double support") {
        const MatrixXd nc = dyn::contact_nullspace(model, biped_nominal(), double_support());
        CHECK(projector_rank(nc) == 3);
    }
}

TEST_CASE("static torque on the welded-base biped equals direct gravity statics") {
    const dyn::RobotModel fixed = dyn::load_model(repo_path("models/planar_biped_fixed.json"));
    VectorXd q(6);
    q << 0.4, -0.8, 0.4, -0.4, 0.8, -0.4;
    const dyn::ContactConfig none{"free", {}};
    const VectorXd torque = dyn::static_torque(fixed, q, none);
    const VectorXd direct = dyn::gravity_vector(fixed, q);
    CHECK((torque - direct).lpNorm<Eigen::Infinity>() <= 1e-9);
    // and the same joints on the floating model see the same gravity load
    const dyn::RobotModel floating = load_biped();
    const VectorXd g = dyn::gravity_vector(floating, biped_nominal());
    CHECK((g.tail(6) - direct).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("symmetric double support mirrors the joint torques") {
    const dyn::RobotModel model = load_biped();
    const VectorXd torque = dyn::static_torque(model, biped_nominal(), double_support());
    REQUIRE(torque.size() == 6);
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(torque(j) + torque(j + 3)) <= 1e-6);  // left = -right
}

TEST_CASE("static residual identity holds at random contact-consistent stances") {
    const dyn::RobotModel model = load_biped();
    const MatrixXd sa = model.actuation_selector();
    std::mt19937_64 rng(107);
    for (const auto& cfg : {double_support(), left_support()}) {
        for (int trial = 0; trial < 100; ++trial) {
            const VectorXd q = test_support::random_stance(model, biped_nominal(), cfg, rng);
            const MatrixXd nc = dyn::contact_nullspace(model, q, cfg);
            const VectorXd g = dyn::gravity_vector(model, q);
            const VectorXd torque = dyn::static_torque(model, q, cfg);
            const VectorXd residual = nc.transpose() * g - (sa * nc).transpose() * torque;
            CHECK(residual.norm() <= 1e-6);
        }
    }
}

TEST_CASE("full static balance and weight-consistent reactions") {
    const dyn::RobotModel model = load_biped();
    const MatrixXd sa = model.actuation_selector();
    const double weight = model.total_mass() * model.gravity;
    std::mt19937_64 rng(108);

    SUBCASE("double support") {
        const dyn::ContactConfig cfg = double_support();
        for (int trial = 0; trial < 25; ++trial) {
            const VectorXd q = test_support::random_stance(model, biped_nominal(), cfg, rng);
            const VectorXd torque = dyn::static_torque(model, q, cfg);
            const VectorXd fr = dyn::reaction_forces(model, q, cfg, torque);
            const MatrixXd jc = dyn::contact_jacobian(model, q, cfg);
            const VectorXd g = dyn::gravity_vector(model, q);
            CHECK((g - sa.transpose() * torque - jc.transpose() * fr).norm() <= 1e-6);
            CHECK(fr(1) + fr(4) == doctest::Approx(weight).epsilon(1e-9));
        }
    }
    SUBCASE("single support carries the whole weight") {
        const dyn::ContactConfig cfg = left_support();
        for (int trial = 0; trial < 25; ++trial) {
            const VectorXd q = test_support::random_stance(model, biped_nominal(), cfg, rng);
            const VectorXd torque = dyn::static_torque(model, q, cfg);
            const VectorXd fr = dyn::reaction_forces(model, q, cfg, torque);
            REQUIRE(fr.size() == 3);
            CHECK(fr(1) == doctest::Approx(weight).epsilon(1e-9));
            const MatrixXd jc = dyn::contact_jacobian(model, q, cfg);
            const VectorXd g = dyn::gravity_vector(model, q);
            CHECK((g - sa.transpose() * torque - jc.transpose() * fr).norm() <= 1e-6);
        }
    }
    SUBCASE("no contacts yield no reactions") {
        const dyn::RobotModel fixed = dyn::load_model(repo_path("models/planar_biped_fixed.json"));
        VectorXd q(6);
        q << 0.4, -0.8, 0.4, -0.4, 0.8, -0.4;
        const dyn::ContactConfig none{"free", {}};
        const VectorXd torque = dyn::static_torque(fixed, q, none);
        CHECK(dyn::reaction_forces(fixed, q, none, torque).size() == 0);
    }
}

TEST_CASE("a point-contact single support is actuation deficient") {
    const dyn::RobotModel model = load_biped();
    const dyn::ContactConfig cfg{"toe_only", {"r_toe"}};
    CHECK_THROWS_AS(dyn::static_torque(model, biped_nominal(), cfg),
                    ActuationDeficiencyError);
}

TEST_CASE("actuator efforts") {
    SUBCASE("all-revolute models map one to one") {
        const dyn::RobotModel model = load_biped();
        const VectorXd torque = dyn::static_torque(model, biped_nominal(), double_support());
        const VectorXd efforts = dyn::actuator_efforts(model, biped_nominal(), torque);
        CHECK((efforts - torque).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("pushrod pair at the neutral pose inverts the lever map") {
        const dyn::RobotModel rig = dyn::load_model(repo_path("models/pair_joint.json"));
        const double r = 0.06, d = 0.08;
        const Eigen::Vector2d tau(1.8, -0.6);
        const VectorXd efforts = dyn::actuator_efforts(rig, VectorXd::Zero(2), tau);
        CHECK(efforts(0) ==
              doctest::Approx(tau(0) / (2 * r) + tau(1) / (2 * d)).epsilon(1e-12));
        CHECK(efforts(1) ==
              doctest::Approx(tau(0) / (2 * r) - tau(1) / (2 * d)).epsilon(1e-12));
    }
    SUBCASE("virtual work is conserved through the pair map") {
        const dyn::RobotModel rig = dyn::load_model(repo_path("models/pair_joint.json"));
        std::mt19937_64 rng(109);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            VectorXd q(2);
            q << uni(rng), uni(rng);
            const Eigen::Vector2d tau(uni(rng) * 3.0, uni(rng) * 3.0);
            const Eigen::Vector2d rates(uni(rng), uni(rng));
            const VectorXd f = dyn::actuator_efforts(rig, q, tau);
            const Eigen::Matrix2d m = dyn::pair_torque_map(rig, q, 0);
            const Eigen::Vector2d rod_velocities = m.transpose() * rates;
            CHECK(std::abs(f.dot(rod_velocities) - tau.dot(rates)) <= 1e-9);
        }
    }
    SUBCASE("the pair map is singular at ninety degrees pitch") {
        const dyn::RobotModel rig = dyn::load_model(repo_path("models/pair_joint.json"));
        VectorXd q(2);
        q << M_PI / 2.0, 0.0;
        CHECK_THROWS_WITH_AS(dyn::actuator_efforts(rig, q, Eigen::Vector2d(1.0, 0.0)),
                             doctest::Contains("wrist"), SingularMapError);
    }
}

TEST_CASE("contact restoration pulls perturbed stances back to their anchors") {
    const dyn::RobotModel model = load_biped();
    const dyn::ContactConfig cfg = double_support();
    const dyn::ContactAnchors anchors = dyn::capture_anchors(model, biped_nominal(), cfg);
    std::mt19937_64 rng(110);
    std::uniform_real_distribution<double> uni(-0.1, 0.1);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd q = biped_nominal();
        for (int i = 0; i < 9; ++i) q(i) += uni(rng);
        const VectorXd restored = dyn::restore_contacts(model, q, cfg, anchors);
        CHECK(dyn::contact_residual(model, restored, cfg, anchors).lpNorm<Eigen::Infinity>() <=
              1e-10);
    }
    CHECK_THROWS_AS(dyn::contact_frame_pose(model, biped_nominal(), "nope"), SchemaError);
}
