#include <catch2/catch_amalgamated.hpp>

#include "finsler/fd.hpp"
#include "finsler/rng.hpp"
#include "test_support.hpp"

using namespace finsler;
using finsler::testing::fd_sample_point;

TEST_CASE("quadratic norms agree with the oracle to roundoff") {
    SplitMix64 rng(17);
    FinslerNorm e4 = euclidean(4);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v = rng.nonzero_vector(4, -2.0, 2.0, 0.5);
        DiscrepancyReport rep = fd_check(e4, v);
        CHECK(rep.grad_rel <= 1e-10);
        CHECK(rep.hess_rel <= 1e-10);
        CHECK(rep.third_rel <= 1e-10);
    }
}

TEST_CASE("pseudo gradient discrepancy stays below 1e-8") {
    SplitMix64 rng(18);
    FinslerNorm p = pseudo(2, 2);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v = rng.nonzero_vector(4, -2.0, 2.0, 0.5);
        CHECK(fd_check(p, v).grad_rel <= 1e-8);
    }
}

TEST_CASE("ratio hessian discrepancy stays below 1e-5") {
    FinslerNorm r = ratio3(0.5);
    Eigen::Vector3d v(1, 2, 3);
    DiscrepancyReport rep = fd_check(r, v);
    CHECK(rep.hess_rel <= 1e-5);
    CHECK(rep.grad_rel <= 1e-5);
    CHECK(rep.third_rel <= 1e-3);
}

TEST_CASE("oracle bounds hold across the family on random points") {
    FinslerNorm norms[] = {euclidean(3), pseudo(1, 2), ratio3(1.0), ratio3(4.0),
                           spacetime4(1.0, 1.0)};
    SplitMix64 rng(19);
    for (const FinslerNorm& n : norms) {
        for (int t = 0; t < 25; ++t) {
            Eigen::VectorXd v = fd_sample_point(rng, n);
            DiscrepancyReport rep = fd_check(n, v);
            CHECK(rep.grad_rel <= 1e-5);
            CHECK(rep.hess_rel <= 1e-5);
            CHECK(rep.third_rel <= 1e-3);
        }
    }
}

TEST_CASE("expression norms are cross-checked the same way") {
    FinslerNorm n = parse_metric("(v1^2 + 2*v2^2 + v3^2) + ((v1*v2)^2)/(v1^2 + v2^2 + v3^2)", 3);
    Eigen::Vector3d v(0.7, -1.3, 2.1);
    DiscrepancyReport rep = fd_check(n, v);
    CHECK(rep.grad_rel <= 1e-5);
    CHECK(rep.hess_rel <= 1e-5);
    CHECK(rep.third_rel <= 1e-3);
}
