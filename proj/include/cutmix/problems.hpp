#pragma once

#include "cutmix/geometry.hpp"

namespace cutmix {

using Mat2 = std::array<std::array<double, 2>, 2>;   // [component][derivative]
using Hess2 = std::array<std::array<double, 3>, 2>;  // [component][xx,xy,yy]

/// Prescribed interface data: g_D = jump of u, g_N = jump of the normal flux.
struct JumpData {
    std::function<double(Vec2)> g_D = [](Vec2) { return 0.0; };
    std::function<double(Vec2)> g_N = [](Vec2) { return 0.0; };
    bool nonzero = false;
};

/// Exact fields of one subdomain with every derivative the error norms need.
struct SideFun {
    std::function<double(Vec2)> u;
    std::function<Vec2(Vec2)> grad_u;
    std::function<Vec2(Vec2)> p;
    std::function<Mat2(Vec2)> grad_p;
    std::function<Hess2(Vec2)> hess_p;
    std::function<double(Vec2)> div_p;
    std::function<Vec2(Vec2)> grad_div_p;
    std::function<double(Vec2)> f; // source, equals -div p
};

struct ProblemSpec {
    std::string name;
    LevelSet level_set;
    double alpha1 = 1.0, alpha2 = 1.0;
    std::array<SideFun, 2> side;
    JumpData jump;
    // false when (p, u) is manufactured mixed data with p independent of
    // alpha grad u; the assembly then corrects the flux equation's rhs.
    bool p_is_alpha_grad_u = true;

    double alpha(int s) const { return s == 0 ? alpha1 : alpha2; }
    double alpha_min() const { return std::min(alpha1, alpha2); }
};

/// Circular interface r = 1/6; u = r^5/alpha_i up to a matching constant,
/// p = 5 r^3 (x, y) on both sides.
inline ProblemSpec example1(double alpha1, double alpha2) {
    if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("example1: alpha must be positive");
    const double r0 = 1.0 / 6.0;
    ProblemSpec ps;
    ps.name = "example1";
    ps.level_set = LevelSet::circle({0, 0}, r0);
    ps.alpha1 = alpha1;
    ps.alpha2 = alpha2;

    auto p = [](Vec2 q) {
        const double r = norm(q);
        return Vec2{5 * q.x * r * r * r, 5 * q.y * r * r * r};
    };
    auto grad_p = [](Vec2 q) {
        const double r = norm(q);
        const double g = r * r * r;
        return Mat2{{{5 * g + 15 * q.x * q.x * r, 15 * q.x * q.y * r},
                     {15 * q.x * q.y * r, 5 * g + 15 * q.y * q.y * r}}};
    };
    auto hess_p = [](Vec2 q) {
        const double r = norm(q);
        if (r < 1e-300) return Hess2{};
        const double x = q.x, y = q.y;
        return Hess2{{{45 * x * r + 15 * x * x * x / r, 15 * r * y + 15 * x * x * y / r,
                       15 * x * r + 15 * x * y * y / r},
                      {15 * y * r + 15 * x * x * y / r, 15 * r * x + 15 * x * y * y / r,
                       45 * y * r + 15 * y * y * y / r}}};
    };
    auto div_p = [](Vec2 q) {
        const double r = norm(q);
        return 25 * r * r * r;
    };
    auto grad_div_p = [](Vec2 q) {
        const double r = norm(q);
        return Vec2{75 * r * q.x, 75 * r * q.y};
    };
    auto f = [div_p](Vec2 q) { return -div_p(q); };

    const double c2 = std::pow(r0, 5) * (1.0 / alpha1 - 1.0 / alpha2);
    for (int s = 0; s < 2; ++s) {
        const double a = s == 0 ? alpha1 : alpha2;
        const double shift = s == 0 ? 0.0 : c2;
        ps.side[s].u = [a, shift](Vec2 q) { return std::pow(norm(q), 5) / a + shift; };
        ps.side[s].grad_u = [a, p](Vec2 q) { return p(q) / a; };
        ps.side[s].p = p;
        ps.side[s].grad_p = grad_p;
        ps.side[s].hess_p = hess_p;
        ps.side[s].div_p = div_p;
        ps.side[s].grad_div_p = grad_div_p;
        ps.side[s].f = f;
    }
    return ps;
}

/// Elliptic interface x^2/a^2 + y^2/b^2 = 1 with a = 1/6, b = 1/7.
inline ProblemSpec example2(double alpha1, double alpha2) {
    if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("example2: alpha must be positive");
    const double ea = 1.0 / 6.0, eb = 1.0 / 7.0;
    ProblemSpec ps;
    ps.name = "example2";
    ps.level_set = LevelSet::ellipse({0, 0}, ea, eb);
    ps.alpha1 = alpha1;
    ps.alpha2 = alpha2;

    const double a2 = ea * ea, b2 = eb * eb;
    auto rho = [a2, b2](Vec2 q) { return std::sqrt(q.x * q.x / a2 + q.y * q.y / b2); };
    auto p = [a2, b2, rho](Vec2 q) {
        const double G = std::pow(rho(q), 3);
        return Vec2{5 * q.x / a2 * G, 5 * q.y / b2 * G};
    };
    auto grad_p = [a2, b2, rho](Vec2 q) {
        const double s = rho(q);
        const double G = s * s * s;
        const double off = 15 * q.x * q.y * s / (a2 * b2);
        return Mat2{{{5 / a2 * (G + 3 * s * q.x * q.x / a2), off},
                     {off, 5 / b2 * (G + 3 * s * q.y * q.y / b2)}}};
    };
    auto hess_p = [a2, b2, rho](Vec2 q) {
        const double s = rho(q);
        if (s < 1e-300) return Hess2{};
        const double x = q.x, y = q.y;
        const double tx = s + x * x / (a2 * s); // d(s*x)/dx pattern
        const double ty = s + y * y / (b2 * s);
        return Hess2{{{15 * x / (a2 * a2) * (3 * s + x * x / (a2 * s)),
                       15 * y / (a2 * b2) * tx, 15 * x / (a2 * b2) * ty},
                      {15 * y / (a2 * b2) * tx, 15 * x / (a2 * b2) * ty,
                       15 * y / (b2 * b2) * (3 * s + y * y / (b2 * s))}}};
    };
    auto div_p = [a2, b2, rho](Vec2 q) {
        const double s = rho(q);
        return 5 * s * s * s * (1 / a2 + 1 / b2) + 15 * s * (q.x * q.x / (a2 * a2) + q.y * q.y / (b2 * b2));
    };
    auto grad_div_p = [a2, b2, rho](Vec2 q) {
        const double s = rho(q);
        if (s < 1e-300) return Vec2{};
        const double W = q.x * q.x / (a2 * a2) + q.y * q.y / (b2 * b2);
        return Vec2{15 * s * q.x / a2 * (1 / a2 + 1 / b2) + 15 * (q.x * W / (a2 * s) + 2 * s * q.x / (a2 * a2)),
                    15 * s * q.y / b2 * (1 / a2 + 1 / b2) + 15 * (q.y * W / (b2 * s) + 2 * s * q.y / (b2 * b2))};
    };
    auto f = [div_p](Vec2 q) { return -div_p(q); };

    const double c2 = 1.0 / alpha1 - 1.0 / alpha2;
    for (int s = 0; s < 2; ++s) {
        const double a = s == 0 ? alpha1 : alpha2;
        const double shift = s == 0 ? 0.0 : c2;
        ps.side[s].u = [a, shift, rho](Vec2 q) { return std::pow(rho(q), 5) / a + shift; };
        ps.side[s].grad_u = [a, p](Vec2 q) { return p(q) / a; };
        ps.side[s].p = p;
        ps.side[s].grad_p = grad_p;
        ps.side[s].hess_p = hess_p;
        ps.side[s].div_p = div_p;
        ps.side[s].grad_div_p = grad_div_p;
        ps.side[s].f = f;
    }
    return ps;
}

/// Family of vertical interfaces x = -pi/6 - xi; u vanishes on the interface
/// from both sides, p is a single polynomial field.
inline ProblemSpec example3(double alpha1, double alpha2, double xi) {
    if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("example3: alpha must be positive");
    const double shift = M_PI / 6.0 + xi;
    ProblemSpec ps;
    ps.name = "example3";
    ps.level_set = LevelSet::vertical_line(-shift);
    ps.alpha1 = alpha1;
    ps.alpha2 = alpha2;

    auto p = [shift](Vec2 q) {
        const double w = q.x + shift, A = q.x * q.x - 1, B = q.y * q.y - 1;
        return Vec2{B * (2 * q.x * w + A), 2 * q.y * w * A};
    };
    auto grad_p = [shift](Vec2 q) {
        const double w = q.x + shift, A = q.x * q.x - 1, B = q.y * q.y - 1;
        const double off = 2 * q.y * (2 * q.x * w + A);
        return Mat2{{{B * (2 * w + 4 * q.x), off}, {off, 2 * w * A}}};
    };
    auto hess_p = [shift](Vec2 q) {
        const double w = q.x + shift, A = q.x * q.x - 1, B = q.y * q.y - 1;
        return Hess2{{{6 * B, 2 * q.y * (2 * w + 4 * q.x), 2 * (2 * q.x * w + A)},
                      {2 * q.y * (2 * w + 4 * q.x), 2 * (2 * q.x * w + A), 0.0}}};
    };
    auto div_p = [shift](Vec2 q) {
        const double w = q.x + shift, A = q.x * q.x - 1, B = q.y * q.y - 1;
        return B * (2 * w + 4 * q.x) + 2 * w * A;
    };
    auto grad_div_p = [shift](Vec2 q) {
        const double w = q.x + shift, A = q.x * q.x - 1, B = q.y * q.y - 1;
        return Vec2{6 * B + 2 * A + 4 * q.x * w, 2 * q.y * (2 * w + 4 * q.x)};
    };
    auto f = [div_p](Vec2 q) { return -div_p(q); };

    for (int s = 0; s < 2; ++s) {
        const double a = s == 0 ? alpha1 : alpha2;
        ps.side[s].u = [a, shift](Vec2 q) {
            return (q.x + shift) * (q.x * q.x - 1) * (q.y * q.y - 1) / a;
        };
        ps.side[s].grad_u = [a, p](Vec2 q) { return p(q) / a; };
        ps.side[s].p = p;
        ps.side[s].grad_p = grad_p;
        ps.side[s].hess_p = hess_p;
        ps.side[s].div_p = div_p;
        ps.side[s].grad_div_p = grad_div_p;
        ps.side[s].f = f;
    }
    return ps;
}

/// Discontinuous solution across x = 1/3; (p, u, f) are manufactured data of
/// the mixed system directly (p is not alpha * grad u here).
inline ProblemSpec example4(double alpha1, double alpha2) {
    if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("example4: alpha must be positive");
    ProblemSpec ps;
    ps.name = "example4";
    ps.level_set = LevelSet::vertical_line(1.0 / 3.0);
    ps.alpha1 = alpha1;
    ps.alpha2 = alpha2;

    ps.side[0].u = [](Vec2 q) { return q.y * q.y * q.y + 2; };
    ps.side[0].grad_u = [](Vec2 q) { return Vec2{0, 3 * q.y * q.y}; };
    ps.side[0].p = [](Vec2 q) { return Vec2{0, 3 * q.y * q.y}; };
    ps.side[0].grad_p = [](Vec2 q) { return Mat2{{{0, 0}, {0, 6 * q.y}}}; };
    ps.side[0].hess_p = [](Vec2) { return Hess2{{{0, 0, 0}, {0, 0, 6}}}; };
    ps.side[0].div_p = [](Vec2 q) { return 6 * q.y; };
    ps.side[0].grad_div_p = [](Vec2) { return Vec2{0, 6}; };
    ps.side[0].f = [](Vec2 q) { return -6 * q.y; };

    ps.side[1].u = [](Vec2 q) { return 2 * q.y * q.y * q.y; };
    ps.side[1].grad_u = [](Vec2 q) { return Vec2{0, 6 * q.y * q.y}; };
    ps.side[1].p = [](Vec2 q) { return Vec2{0, 6 * q.y}; };
    ps.side[1].grad_p = [](Vec2) { return Mat2{{{0, 0}, {0, 6}}}; };
    ps.side[1].hess_p = [](Vec2) { return Hess2{}; };
    ps.side[1].div_p = [](Vec2) { return 6.0; };
    ps.side[1].grad_div_p = [](Vec2) { return Vec2{}; };
    ps.side[1].f = [](Vec2) { return -6.0; };

    ps.jump.g_D = [](Vec2 q) { return 2 - q.y * q.y * q.y; };
    ps.jump.g_N = [](Vec2) { return 0.0; };
    ps.jump.nonzero = true;
    ps.p_is_alpha_grad_u = false;
    return ps;
}

/// Solution jump proportional to (1/alpha1 - 1/alpha2) across x = 1/3;
/// the flux p = grad[(x^2-1)(y^2-1)] is continuous.
inline ProblemSpec example5(double alpha1, double alpha2) {
    if (alpha1 <= 0 || alpha2 <= 0) throw ConfigError("example5: alpha must be positive");
    ProblemSpec ps;
    ps.name = "example5";
    ps.level_set = LevelSet::vertical_line(1.0 / 3.0);
    ps.alpha1 = alpha1;
    ps.alpha2 = alpha2;

    auto p = [](Vec2 q) {
        return Vec2{2 * q.x * (q.y * q.y - 1), 2 * q.y * (q.x * q.x - 1)};
    };
    auto grad_p = [](Vec2 q) {
        return Mat2{{{2 * (q.y * q.y - 1), 4 * q.x * q.y}, {4 * q.x * q.y, 2 * (q.x * q.x - 1)}}};
    };
    auto hess_p = [](Vec2 q) {
        return Hess2{{{0, 4 * q.y, 4 * q.x}, {4 * q.y, 4 * q.x, 0}}};
    };
    auto div_p = [](Vec2 q) { return 2 * (q.x * q.x - 1) + 2 * (q.y * q.y - 1); };
    auto grad_div_p = [](Vec2 q) { return Vec2{4 * q.x, 4 * q.y}; };
    auto f = [div_p](Vec2 q) { return -div_p(q); };

    for (int s = 0; s < 2; ++s) {
        const double a = s == 0 ? alpha1 : alpha2;
        ps.side[s].u = [a](Vec2 q) { return (q.x * q.x - 1) * (q.y * q.y - 1) / a; };
        ps.side[s].grad_u = [a, p](Vec2 q) { return p(q) / a; };
        ps.side[s].p = p;
        ps.side[s].grad_p = grad_p;
        ps.side[s].hess_p = hess_p;
        ps.side[s].div_p = div_p;
        ps.side[s].grad_div_p = grad_div_p;
        ps.side[s].f = f;
    }
    const double c = 1.0 / alpha1 - 1.0 / alpha2;
    ps.jump.g_D = [c](Vec2 q) { return c * (q.x * q.x - 1) * (q.y * q.y - 1); };
    ps.jump.g_N = [](Vec2) { return 0.0; };
    ps.jump.nonzero = std::abs(c) > 0;
    return ps;
}

inline ProblemSpec make_problem(const std::string& name, double alpha1, double alpha2,
                                double xi = 0.0) {
    if (name == "example1") return example1(alpha1, alpha2);
    if (name == "example2") return example2(alpha1, alpha2);
    if (name == "example3") return example3(alpha1, alpha2, xi);
    if (name == "example4") return example4(alpha1, alpha2);
    if (name == "example5") return example5(alpha1, alpha2);
    throw ConfigError("unknown problem '" + name + "'");
}

} // namespace cutmix
