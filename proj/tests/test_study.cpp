#include <catch2/catch_amalgamated.hpp>

#include "cutmix/study.hpp"

using namespace cutmix;

TEST_CASE("convergence orders between consecutive halvings") {
    ConvergenceTable t;
    t.rows.push_back({8, 0.25, 100, 4e-2, 4e-2, 0});
    t.rows.push_back({16, 0.125, 400, 1e-2, 2e-2, 0});
    t.compute_orders();
    REQUIRE(t.rows[1].order_p == Catch::Approx(2.0));
    REQUIRE(t.rows[1].order_up == Catch::Approx(1.0));
    REQUIRE(std::isnan(t.rows[0].order_p));

    // non-halving rows keep the order column empty
    ConvergenceTable s;
    s.rows.push_back({8, 0.25, 100, 4e-2, 4e-2, 0});
    s.rows.push_back({24, 0.1, 900, 1e-2, 1e-2, 0});
    s.compute_orders();
    REQUIRE(std::isnan(s.rows[1].order_p));

    // zero errors leave the order undefined instead of dividing by zero
    ConvergenceTable z;
    z.rows.push_back({8, 0.25, 100, 0.0, 1e-2, 0});
    z.rows.push_back({16, 0.125, 400, 0.0, 5e-3, 0});
    z.compute_orders();
    REQUIRE(std::isnan(z.rows[1].order_p));
    REQUIRE(z.rows[1].order_up == Catch::Approx(1.0));
}

TEST_CASE("CSV output format") {
    ConvergenceTable t;
    t.rows.push_back({8, 0.3536, 574, 1.0605e-3, 1.8310e-2, 6.8e-16});
    t.rows.push_back({16, 0.1768, 2202, 2.7170e-4, 9.2224e-3, 1.2e-15});
    t.compute_orders();
    const std::string csv = to_csv(t);
    REQUIRE(csv.substr(0, csv.find('\n')) == "N,h,dofs,e_p,order_p,e_up,order_up,residual");
    // first row: empty order fields
    const auto l1 = csv.substr(csv.find('\n') + 1);
    const auto row1 = l1.substr(0, l1.find('\n'));
    REQUIRE(row1 == "8,3.53600e-01,574,1.06050e-03,,1.83100e-02,,6.80000e-16");
    // every row has exactly 7 commas
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line))
        REQUIRE(std::count(line.begin(), line.end(), ',') == 7);
}

TEST_CASE("study runs are deterministic") {
    RunConfig cfg;
    cfg.problem = "example5";
    cfg.alpha1 = 1;
    cfg.alpha2 = 10;
    cfg.mesh_sizes = {4, 8};
    const std::string a = to_csv(run_study(cfg));
    const std::string b = to_csv(run_study(cfg));
    REQUIRE(a == b);
    REQUIRE_FALSE(a.empty());
}

TEST_CASE("study rejects bad configurations") {
    RunConfig cfg;
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError);
    cfg.problem = "example1";
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError); // no mesh sizes
    cfg.mesh_sizes = {8};
    cfg.alpha1 = -2;
    REQUIRE_THROWS_AS(run_study(cfg), ConfigError);
}

TEST_CASE("sweep produces one row per offset") {
    RunConfig cfg;
    cfg.problem = "example3";
    cfg.alpha1 = 1;
    cfg.alpha2 = 1000;
    cfg.mesh_sizes = {8};
    cfg.xi_list = {0.01};
    auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].e_up > 0);

    // an offset that puts the interface exactly through mesh vertices
    cfg.xi_list = {0.25 - M_PI / 6};     // interface at x = -0.25, a grid line of N=8
    REQUIRE_NOTHROW(run_sweep(cfg));
    auto degen = run_sweep(cfg);
    REQUIRE(degen[0].e_up > 0);
    REQUIRE(std::isfinite(degen[0].e_up));
}

TEST_CASE("interpolation error of constant-u linear-p data is zero") {
    ProblemSpec ps;
    ps.name = "linear";
    ps.level_set = LevelSet::vertical_line(0.3);
    for (int side = 0; side < 2; ++side) {
        ps.side[side].u = [](Vec2) { return 3.0; };
        ps.side[side].grad_u = [](Vec2) { return Vec2{}; };
        ps.side[side].p = [](Vec2 x) { return Vec2{2 * x.x - x.y, x.x + x.y}; };
        ps.side[side].grad_p = [](Vec2) { return Mat2{{{2, -1}, {1, 1}}}; };
        ps.side[side].hess_p = [](Vec2) { return Hess2{}; };
        ps.side[side].div_p = [](Vec2) { return 3.0; };
        ps.side[side].grad_div_p = [](Vec2) { return Vec2{}; };
        ps.side[side].f = [](Vec2) { return -3.0; };
    }
    auto rows = interpolation_study(ps, {4, 8});
    for (const auto& r : rows) {
        REQUIRE(r.err_triple < 1e-12);
        REQUIRE(r.err_p_l2 < 1e-13);
    }
}

TEST_CASE("inf-sup probe is positive and bounded away from zero") {
    auto ps = example1(1, 10);
    auto tri = build_structured(4);
    auto cls = classify(tri, ps.level_set);
    auto dm = build_dofmap(tri, cls);
    AssemblyParams prm;
    prm.alpha1 = 1;
    prm.alpha2 = 10;
    const double v4 = infsup_probe(tri, cls, dm, prm, ps);
    REQUIRE(v4 > 0.0);

    // guard against accidentally running the dense probe on large systems
    auto big_tri = build_structured(48);
    auto big_cls = classify(big_tri, ps.level_set);
    auto big_dm = build_dofmap(big_tri, big_cls);
    REQUIRE_THROWS_AS(infsup_probe(big_tri, big_cls, big_dm, prm, ps), ConfigError);
}
