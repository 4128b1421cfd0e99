// Acceptance suite: one line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "finsler/core.hpp"
#include "finsler/fd.hpp"
#include "finsler/motions.hpp"
#include "finsler/norm.hpp"
#include "finsler/ortho.hpp"
#include "finsler/rng.hpp"
#include "test_support.hpp"

using namespace finsler;
using finsler::testing::classical_gram_schmidt;
using finsler::testing::fd_sample_point;

namespace {

struct Harness {
    int failures = 0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    double seconds_since(std::chrono::steady_clock::time_point t) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    }

    void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        auto start = std::chrono::steady_clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double dt = seconds_since(start);
        std::printf("[%s] %2d. %-28s %s (%.2fs)\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                    detail.c_str(), dt);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::vector<FinslerNorm> builtin_metrics() {
    std::vector<FinslerNorm> m;
    m.push_back(euclidean(4));
    m.push_back(pseudo(2, 2));
    m.push_back(ratio3(1.0));
    m.push_back(spacetime4(1.0, 1.0));
    return m;
}

}  // namespace

int main() {
    Harness h;

    h.criterion(1, "euler/homogeneity suite", [&](std::string& detail) {
        auto start = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (const FinslerNorm& norm : builtin_metrics()) {
            SplitMix64 rng(101);
            for (int t = 0; t < 1000; ++t) {
                Eigen::VectorXd v = fd_sample_point(rng, norm);
                worst = std::max(worst, euler_report(norm, v).max_residual());
            }
        }
        double dt = h.seconds_since(start);
        char buf[160];
        std::snprintf(buf, sizeof buf, "max residual %.2e over 4x1000 points, %.2fs", worst, dt);
        detail = buf;
        return worst <= 1e-8 && dt < 5.0;
    });

    h.criterion(2, "derivative oracle", [&](std::string& detail) {
        double worst_g = 0, worst_h = 0, worst_t = 0;
        for (const FinslerNorm& norm : builtin_metrics()) {
            SplitMix64 rng(202);
            for (int t = 0; t < 200; ++t) {
                Eigen::VectorXd v = fd_sample_point(rng, norm);
                DiscrepancyReport rep = fd_check(norm, v);
                worst_g = std::max(worst_g, rep.grad_rel);
                worst_h = std::max(worst_h, rep.hess_rel);
                worst_t = std::max(worst_t, rep.third_rel);
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "grad %.2e hess %.2e third %.2e", worst_g, worst_h,
                      worst_t);
        detail = buf;
        return worst_g <= 1e-5 && worst_h <= 1e-5 && worst_t <= 1e-3;
    });

    h.criterion(3, "triangular theorem", [&](std::string& detail) {
        double worst_upper = 0, worst_diag = 0;
        for (double A : {0.25, 1.0, 4.0}) {
            FinslerNorm norm = ratio3(A);
            SplitMix64 rng(303);
            for (int t = 0; t < 50; ++t) {
                OrthoReport rep = orthogonalize(norm, Basis(rng.invertible_matrix(3)));
                worst_upper = std::max(worst_upper, rep.max_upper_violation);
                for (int k = 0; k < 3; ++k)
                    worst_diag = std::max(worst_diag, std::abs(std::abs(rep.tri(k, k)) - 1.0));
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "upper %.2e diag-dev %.2e over 3x50 bases", worst_upper,
                      worst_diag);
        detail = buf;
        return worst_upper <= 1e-8 && worst_diag <= 1e-8;
    });

    h.criterion(4, "euclidean degeneration", [&](std::string& detail) {
        double worst_basis = 0, worst_tri = 0;
        for (int n = 2; n <= 6; ++n) {
            FinslerNorm norm = euclidean(n);
            SplitMix64 rng(404);
            for (int t = 0; t < 20; ++t) {
                Eigen::MatrixXd seed = rng.invertible_matrix(n);
                OrthoReport rep = orthogonalize(norm, Basis(seed));
                worst_basis = std::max(
                    worst_basis,
                    (rep.basis.matrix() - classical_gram_schmidt(seed)).lpNorm<Eigen::Infinity>());
                worst_tri = std::max(
                    worst_tri,
                    (rep.tri - Eigen::MatrixXd::Identity(n, n)).lpNorm<Eigen::Infinity>());
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "basis-vs-oracle %.2e, tri-vs-I %.2e", worst_basis,
                      worst_tri);
        detail = buf;
        return worst_basis <= 1e-10 && worst_tri <= 1e-10;
    });

    h.criterion(5, "pseudo-euclidean cone split", [&](std::string& detail) {
        double worst = 0.0;
        int cases = 0;
        SplitMix64 rng(505);
        for (int p = 1; p <= 5; ++p)
            for (int q = 1; p + q <= 6; ++q) {
                int n = p + q;
                FinslerNorm norm = pseudo(p, q);
                // spacelike rows: identity block plus a small mixing tail
                Eigen::MatrixXd seed(p, n);
                seed.setZero();
                for (int i = 0; i < p; ++i) {
                    seed(i, i) = 1.0;
                    for (int j = 0; j < n; ++j) seed(i, j) += 0.1 * rng.uniform(-1.0, 1.0);
                }
                ConeSplit split = cone_split(norm, Basis(seed));
                Eigen::VectorXd d(n);
                for (int i = 0; i < n; ++i) d[i] = i < p ? 1.0 : -1.0;
                Eigen::MatrixXd expected = d.asDiagonal();
                worst = std::max(
                    worst, (split.combined_report.tri - expected).lpNorm<Eigen::Infinity>());
                ++cases;
            }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max |T - diag(+1..-1)| = %.2e over %d signatures",
                      worst, cases);
        detail = buf;
        return worst <= 1e-8;
    });

    h.criterion(6, "asymmetry witness", [&](std::string& detail) {
        FinslerNorm r = ratio3(1.0);
        Eigen::Vector3d v1(1, 2, 3), v2(1399, -794, 0);
        double forward = scalar_product(r, v1, v1, v2);
        double reverse = scalar_product(r, v2, v2, v1);
        char buf[160];
        std::snprintf(buf, sizeof buf, "<v1,v2>_{v1} = %.2e, <v2,v1>_{v2} = %.6f", forward,
                      reverse);
        detail = buf;
        return std::abs(forward) <= 1e-9 * v2.norm() && std::abs(reverse) > 1e-3;
    });

    h.criterion(7, "non-closure of motions", [&](std::string& detail) {
        auto start = std::chrono::steady_clock::now();
        ClosureSearch ratio_search = closure_search(ratio3(1.0), 707, 100);
        bool ratio_ok = ratio_search.not_closed >= 1 && ratio_search.first_not_closed &&
                        ratio_search.first_not_closed->violation > 1e-3;
        int quad_not_closed = 0;
        int quad_pairs = 0;
        struct Sig { int p, q; };
        for (Sig s : {Sig{2, 0}, Sig{3, 0}, Sig{4, 0}, Sig{1, 1}, Sig{2, 1}, Sig{2, 2},
                      Sig{3, 2}, Sig{3, 3}}) {
            FinslerNorm norm = s.q == 0 ? euclidean(s.p) : pseudo(s.p, s.q);
            ClosureSearch cs = closure_search(norm, 707, 100);
            quad_not_closed += cs.not_closed;
            quad_pairs += cs.pairs_tested;
        }
        double dt = h.seconds_since(start);
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "ratio3: %d/100 NotClosed (max %.3f); quadratic: %d/%d NotClosed; %.2fs",
                      ratio_search.not_closed,
                      ratio_search.first_not_closed ? ratio_search.first_not_closed->violation
                                                    : 0.0,
                      quad_not_closed, quad_pairs, dt);
        detail = buf;
        return ratio_ok && quad_not_closed == 0 && quad_pairs == 800 && dt < 30.0;
    });

    h.criterion(8, "infinitesimal dimensions", [&](std::string& detail) {
        bool dims_ok = true;
        std::string dims;
        double worst_ratio = 0.0;
        const double eps_values[] = {1e-4, 1e-5, 1e-6};
        for (int n = 2; n <= 5; ++n) {
            InfinitesimalSpace sp = infinitesimal_space(euclidean(n), Basis::standard(n));
            dims += "e" + std::to_string(n) + ":" + std::to_string(sp.dim) + " ";
            dims_ok = dims_ok && sp.dim == n * (n - 1) / 2;
            for (const Eigen::MatrixXd& a : sp.generators)
                for (double eps : eps_values)
                    worst_ratio = std::max(
                        worst_ratio,
                        orthonormality_defect(euclidean(n), Basis::standard(n), a, eps) /
                            (eps * eps));
        }
        InfinitesimalSpace boost = infinitesimal_space(pseudo(1, 1), Basis::standard(2));
        dims += "p11:" + std::to_string(boost.dim);
        dims_ok = dims_ok && boost.dim == 1;
        for (double eps : eps_values)
            worst_ratio = std::max(worst_ratio,
                                   orthonormality_defect(pseudo(1, 1), Basis::standard(2),
                                                         boost.generators[0], eps) /
                                       (eps * eps));
        // the direction-dependent case must pass the same smallness bound
        FinslerNorm r = ratio3(1.0);
        SplitMix64 rng(808);
        Basis rb = orthogonalize(r, Basis(rng.invertible_matrix(3))).basis;
        InfinitesimalSpace rsp = infinitesimal_space(r, rb);
        for (const Eigen::MatrixXd& a : rsp.generators)
            for (double eps : eps_values)
                worst_ratio = std::max(worst_ratio,
                                       orthonormality_defect(r, rb, a, eps) / (eps * eps));
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s; max defect/eps^2 = %.2f (bound 50)", dims.c_str(),
                      worst_ratio);
        detail = buf;
        return dims_ok && worst_ratio <= 50.0;
    });

    h.criterion(9, "light-speed constancy", [&](std::string& detail) {
        double worst_spread = 0, worst_mean_dev = 0;
        for (double c : {1.0, 2.0}) {
            SpeedReport rep = light_speed(spacetime4(c, 1.0), c,
                                          Eigen::Vector3d(1, 0, 0), 1000, 909);
            worst_spread = std::max(worst_spread, rep.spread());
            worst_mean_dev = std::max(worst_mean_dev, std::abs(rep.v0_mean - 1.0 / c));
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "spread %.2e, mean dev %.2e over 2x1000 directions",
                      worst_spread, worst_mean_dev);
        detail = buf;
        return worst_spread <= 1e-12 && worst_mean_dev <= 1e-12;
    });

    h.criterion(10, "cartan suite", [&](std::string& detail) {
        SplitMix64 rng(1010);
        double quad_max = 0.0;
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXd v3 = rng.nonzero_vector(3, -2.0, 2.0, 0.3);
            Eigen::VectorXd v4 = rng.nonzero_vector(4, -2.0, 2.0, 0.3);
            quad_max = std::max(quad_max, cartan_at(euclidean(3), v3).c.max_abs());
            quad_max = std::max(quad_max, cartan_at(pseudo(2, 2), v4).c.max_abs());
        }
        FinslerNorm r = ratio3(1.0);
        double contraction_max = 0.0, symmetry_dev = 0.0;
        FdOracle oracle;
        for (int t = 0; t < 50; ++t) {
            Eigen::VectorXd v = rng.nonzero_vector(3, -2.0, 2.0, 0.5);
            CartanAt c = cartan_at(r, v);
            contraction_max =
                std::max(contraction_max, c.c.contract(v).lpNorm<Eigen::Infinity>() /
                                              std::max(1.0, c.c.max_abs()));
            if (t < 5) {
                // symmetry against an oracle that never assumes it: finite
                // difference of g over the third slot, all slot orders
                const double step = 1e-5 * FdOracle::scale(v);
                for (int k = 0; k < 3; ++k) {
                    Eigen::VectorXd vp = v, vm = v;
                    vp[k] += step;
                    vm[k] -= step;
                    Eigen::MatrixXd dg =
                        (metric_at(r, vp).g - metric_at(r, vm).g) / (2 * step);
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            symmetry_dev = std::max(
                                symmetry_dev, std::abs(0.5 * dg(i, j) - c.c(i, j, k)));
                }
            }
        }
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "quadratic max|C| %.1e; ratio: C.v %.2e, slot-symmetry dev %.2e",
                      quad_max, contraction_max, symmetry_dev);
        detail = buf;
        return quad_max <= 1e-14 && contraction_max <= 1e-8 && symmetry_dev <= 1e-3;
    });

    h.criterion(11, "active/passive coincidence", [&](std::string& detail) {
        SplitMix64 rng(1111);
        std::vector<FinslerNorm> norms;
        norms.push_back(euclidean(3));
        norms.push_back(pseudo(2, 1));
        norms.push_back(ratio3(1.0));
        int tested = 0, agree = 0;
        while (tested < 100) {
            const FinslerNorm& n = norms[static_cast<std::size_t>(tested % 3)];
            Basis b;
            Eigen::MatrixXd a;
            try {
                b = orthogonalize(n, Basis(rng.invertible_matrix(3))).basis;
                if (tested % 2 == 0) {
                    a = rng.invertible_matrix(3);
                } else {
                    Basis b2 = orthogonalize(n, Basis(rng.invertible_matrix(3))).basis;
                    a = motion_between(n, b, b2).matrix;
                }
            } catch (const Error&) {
                continue;  // cone-struck seed; redraw
            }
            bool active = motion_preserves_orthonormality(n, a, b);
            bool passive = quasimotion_check(n, a, b);
            if (active == passive) ++agree;
            ++tested;
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d/%d identical verdicts", agree, tested);
        detail = buf;
        return agree == tested && tested == 100;
    });

    double total = h.seconds_since(h.t0);
    std::printf("%s: %d/11 criteria passed in %.1fs\n", h.failures == 0 ? "ALL PASS" : "FAILURES",
                11 - h.failures, total);
    if (total >= 120.0) {
        std::printf("[FAIL] total runtime exceeded 120s\n");
        return 1;
    }
    return h.failures == 0 ? 0 : 1;
}
