#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cutmix/bdm.hpp"
#include "cutmix/dofmap.hpp"

using namespace cutmix;

namespace {
Eigen::VectorXd dummy; // placeholder, not used here
}

TEST_CASE("edge-moment functionals applied to the basis give the identity") {
    auto tri = build_structured(3, {-0.3, 0.1}, {1.1, 1.7});
    for (int cell : {0, 5, 11}) {
        const CellMap map(tri, cell);
        for (int j = 0; j < 3; ++j) {
            for (int m = 0; m < 2; ++m) {
                for (int jj = 0; jj < 3; ++jj) {
                    const auto mom = edge_moments(tri, tri.cell_edges[cell][jj],
                                                  [&](Vec2 x) { return eval_basis(map, x)[2 * j + m]; });
                    for (int mm = 0; mm < 2; ++mm) {
                        const double expect = (jj == j && mm == m) ? 1.0 : 0.0;
                        REQUIRE(std::abs(mom[mm] - expect) < 1e-13);
                    }
                }
            }
        }
    }
}

TEST_CASE("Piola map preserves normal fluxes up to the orientation sign") {
    auto tri = build_structured(2, {0, 0}, {1, 1});
    const auto& ref = ReferenceBDM1::instance();
    const auto& r = ReferenceBDM1::nodes();
    for (int cell = 0; cell < tri.n_cells(); ++cell) {
        const CellMap map(tri, cell);
        for (int j = 0; j < 3; ++j) {
            // reference flux moment of the unsigned mapped basis across edge j
            const Vec2 a = r[(j + 1) % 3], b = r[(j + 2) % 3];
            const double len = norm(b - a);
            const Vec2 nref = rot_cw(b - a) / len;
            std::vector<double> gx, gw;
            gauss_legendre(3, gx, gw);
            double ref_m0 = 0;
            for (size_t k = 0; k < gx.size(); ++k) {
                const double t = 0.5 * (gx[k] + 1.0);
                ref_m0 += 0.5 * gw[k] * len * dot(ref.eval(2 * j, a + (b - a) * t), nref);
            }
            const auto phys = edge_moments(tri, tri.cell_edges[cell][j], [&](Vec2 x) {
                return eval_basis(map, x)[2 * j] * double(map.signs[j]); // undo the sign
            });
            REQUIRE(std::abs(phys[0] - ref_m0) < 1e-12);
        }
    }
}

TEST_CASE("interpolation reproduces fields it must") {
    auto tri = build_structured(2, {0, 0}, {1, 1});
    const int cell = 1;
    const CellMap map(tri, cell);
    const auto divs = basis_div(tri, cell);

    auto check_exact = [&](std::function<Vec2(Vec2)> f, double expect_div) {
        const auto c = interpolate_bdm1(tri, cell, f);
        double d = 0;
        for (int a = 0; a < 6; ++a) d += c[a] * divs[a];
        REQUIRE(d == Catch::Approx(expect_div).margin(1e-12));
        for (const Vec2 probe : {Vec2{0.6, 0.1}, Vec2{0.8, 0.3}, Vec2{0.9, 0.05}}) {
            const auto phi = eval_basis(map, probe);
            Vec2 v{};
            for (int a = 0; a < 6; ++a) v += phi[a] * c[a];
            const Vec2 want = f(probe);
            REQUIRE(std::abs(v.x - want.x) < 1e-12);
            REQUIRE(std::abs(v.y - want.y) < 1e-12);
        }
    };
    check_exact([](Vec2) { return Vec2{1, 0}; }, 0.0);
    check_exact([](Vec2 q) { return Vec2{q.x, q.y}; }, 2.0);
    check_exact([](Vec2 q) { return Vec2{3 * q.x + q.y, q.x - 2 * q.y}; }, 1.0);
}

TEST_CASE("interpolant matches the field's edge moments") {
    auto tri = build_structured(2, {0, 0}, {1, 1});
    auto f = [](Vec2 q) { return Vec2{q.y * q.y, 0.0}; };
    const int cell = 2;
    const CellMap map(tri, cell);
    const auto c = interpolate_bdm1(tri, cell, f);
    for (int j = 0; j < 3; ++j) {
        const auto field_m = edge_moments(tri, tri.cell_edges[cell][j], f);
        const auto interp_m = edge_moments(tri, tri.cell_edges[cell][j], [&](Vec2 x) {
            const auto phi = eval_basis(map, x);
            Vec2 v{};
            for (int a = 0; a < 6; ++a) v += phi[a] * c[a];
            return v;
        });
        REQUIRE(std::abs(field_m[0] - interp_m[0]) < 1e-13);
        REQUIRE(std::abs(field_m[1] - interp_m[1]) < 1e-13);
    }
}

TEST_CASE("commuting property: div of the interpolant is the mean divergence") {
    // reference example: field (x^2, 0) has div 2x with mean 2/3 on the unit triangle
    std::istringstream one("vertices 3 cells 1\n0 0\n1 0\n0 1\n0 1 2\n");
    auto tri = import_mesh(one);
    const auto c = interpolate_bdm1(tri, 0, [](Vec2 q) { return Vec2{q.x * q.x, 0}; });
    const auto divs = basis_div(tri, 0);
    double d = 0;
    for (int a = 0; a < 6; ++a) d += c[a] * divs[a];
    REQUIRE(d == Catch::Approx(2.0 / 3.0).margin(1e-13));

    // random quadratic fields on random cells
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1, 1);
    auto skew = build_structured(3, {-0.2, 0.3}, {1.4, 1.9});
    for (int trial = 0; trial < 20; ++trial) {
        std::array<double, 12> a;
        for (auto& v : a) v = uni(rng);
        auto f = [&a](Vec2 q) {
            return Vec2{a[0] + a[1] * q.x + a[2] * q.y + a[3] * q.x * q.x + a[4] * q.x * q.y +
                            a[5] * q.y * q.y,
                        a[6] + a[7] * q.x + a[8] * q.y + a[9] * q.x * q.x + a[10] * q.x * q.y +
                            a[11] * q.y * q.y};
        };
        auto divf = [&a](Vec2 q) {
            return a[1] + 2 * a[3] * q.x + a[4] * q.y + a[8] + a[10] * q.x + 2 * a[11] * q.y;
        };
        const int cell = trial % skew.n_cells();
        const auto ci = interpolate_bdm1(skew, cell, f);
        const auto dv = basis_div(skew, cell);
        double dh = 0;
        for (int k = 0; k < 6; ++k) dh += ci[k] * dv[k];
        const auto v = skew.cell_vertices(cell);
        auto rule = triangle_quadrature(v[0], v[1], v[2], 2);
        double mean = 0;
        for (size_t q = 0; q < rule.points.size(); ++q) mean += rule.weights[q] * divf(rule.points[q]);
        mean /= skew.cell_area(cell);
        REQUIRE(std::abs(dh - mean) < 1e-11);
    }
}

TEST_CASE("flux continuity across interior submesh edges") {
    auto tri = build_structured(4);
    auto cls = classify(tri, LevelSet::circle({0, 0}, 1.0 / 6.0));
    auto dm = build_dofmap(tri, cls);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1, 1);
    Eigen::VectorXd x(dm.total);
    for (int i = 0; i < dm.total; ++i) x[i] = uni(rng);

    std::vector<double> gx, gw;
    gauss_legendre(3, gx, gw);
    for (int s = 0; s < 2; ++s) {
        for (int e = 0; e < tri.n_edges(); ++e) {
            if (tri.is_boundary_edge(e)) continue;
            const int cl = tri.edge_cells[e][0], cr = tri.edge_cells[e][1];
            if (!cls.in_side[s][cl] || !cls.in_side[s][cr]) continue;
            const auto ev = tri.edge_vertices(e);
            const Vec2 n = rot_cw(ev[1] - ev[0]) / norm(ev[1] - ev[0]);
            const auto dl = dm.cell_p_dofs(tri, s, cl);
            const auto dr = dm.cell_p_dofs(tri, s, cr);
            const CellMap ml(tri, cl), mr(tri, cr);
            for (size_t k = 0; k < gx.size(); ++k) {
                const Vec2 pt = ev[0] + (ev[1] - ev[0]) * (0.5 * (gx[k] + 1.0));
                const auto pl = eval_basis(ml, pt);
                const auto pr = eval_basis(mr, pt);
                double ql = 0, qr = 0;
                for (int a = 0; a < 6; ++a) {
                    ql += x[dl[a]] * dot(pl[a], n);
                    qr += x[dr[a]] * dot(pr[a], n);
                }
                REQUIRE(std::abs(ql - qr) < 1e-12);
            }
        }
    }
}

TEST_CASE("piecewise constant projection") {
    const QuadratureRule tri_rule = triangle_quadrature({0, 0}, {1, 0}, {0, 1}, 4);
    REQUIRE(project_p0(tri_rule, [](Vec2) { return 5.0; }) == Catch::Approx(5.0).epsilon(1e-15));
    REQUIRE(project_p0(tri_rule, [](Vec2 q) { return q.x; }) ==
            Catch::Approx(1.0 / 3.0).epsilon(1e-14)); // centroid

    std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto sq_rule = polygon_quadrature(square, 4);
    REQUIRE(project_p0(sq_rule, [](Vec2 q) { return q.x * q.x; }) ==
            Catch::Approx(1.0 / 3.0).epsilon(1e-14));

    QuadratureRule empty;
    REQUIRE_THROWS_AS(project_p0(empty, [](Vec2) { return 1.0; }), ConfigError);
}

TEST_CASE("dofmap block layout") {
    // no interface inside the domain: side 1 empty
    auto tri = build_structured(2);
    auto cls = classify(tri, LevelSet::circle({10, 10}, 1.0));
    auto dm = build_dofmap(tri, cls);
    REQUIRE(dm.total == 2 * 16 + 8);
    REQUIRE(dm.n_edges_side[0] == 0);
    REQUIRE(dm.n_cells_side[0] == 0);
    REQUIRE(dm.p_offset[0] == 0);
    REQUIRE(dm.p_offset[1] == 0);
    REQUIRE(dm.u_offset[0] == 32);
    REQUIRE(dm.u_offset[1] == 32);

    // cut cells carry dofs in both blocks
    std::istringstream two("vertices 4 cells 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n");
    auto sq = import_mesh(two);
    auto cls2 = classify(sq, LevelSet::vertical_line(0.6));
    auto dm2 = build_dofmap(sq, cls2);
    REQUIRE(cls2.G_h.size() == 2);
    REQUIRE(dm2.total == 2 * (2 * 5 + 2)); // both sides: 5 edges * 2 + 2 cells

    // dof indices are a permutation of 0..total-1
    std::vector<char> seen(dm2.total, 0);
    for (int s = 0; s < 2; ++s) {
        for (int e = 0; e < sq.n_edges(); ++e)
            if (dm2.edge_base[s][e] >= 0) {
                seen[dm2.edge_base[s][e]] = 1;
                seen[dm2.edge_base[s][e] + 1] = 1;
            }
        for (int c = 0; c < sq.n_cells(); ++c)
            if (dm2.cell_dof[s][c] >= 0) seen[dm2.cell_dof[s][c]] = 1;
    }
    for (char v : seen) REQUIRE(v == 1);
}
