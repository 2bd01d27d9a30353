#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <vector>

#include <twistpf/expr.hpp>
#include <twistpf/twist.hpp>

using namespace twistpf;

namespace {

ParamField pf(const std::string& src) { return parse_field(src); }

HomoPoly var(int nvars, int i) {
    EVec e(nvars, 0);
    e[i] = 1;
    return HomoPoly::monomial(nvars, e, ParamField(Rat(1)));
}

// one-loop box with unit legs: U = x1+x2+x3+x4, F = x2 x4 + X x1 x3
ReductionContext box_context() {
    HomoPoly x1 = var(4, 0), x2 = var(4, 1), x3 = var(4, 2), x4 = var(4, 3);
    HomoPoly U = x1 + x2 + x3 + x4;
    HomoPoly F = x2 * x4 + (x1 * x3).scale(ParamField::variable(sym("X")));
    return make_context(U, F, make_twist(2, {1, 1, 1, 1}, {0, 0, 0, 0}, 1));
}

// two-loop sunset at unit masses: U = x1x2+x1x3+x2x3, F = U*(x1+x2+x3) - t x1x2x3
ReductionContext sunset_context(const std::vector<int>& nu = {1, 1, 1},
                                const std::vector<int>& mu = {0, 0, 0}) {
    HomoPoly x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
    HomoPoly U = x1 * x2 + x1 * x3 + x2 * x3;
    HomoPoly F = U * (x1 + x2 + x3) - (x1 * x2 * x3).scale(ParamField::variable(sym("t")));
    return make_context(U, F, make_twist(1, nu, mu, 2));
}

}  // namespace

TEST_CASE("twist exponents for the one-loop box", "[twist]") {
    TwistSpec tw = make_twist(2, {1, 1, 1, 1}, {0, 0, 0, 0}, 1);
    REQUIRE(tw.sigma == pf("2 + eps"));
    REQUIRE(tw.lambda_u == pf("2*eps"));
    for (int i = 0; i < 4; ++i) REQUIRE(tw.rho[i].is_zero());
    REQUIRE(tw.pole_factor(1) == pf("2 + eps"));
    REQUIRE(tw.pole_factor(2) == pf("3 + eps"));
}

TEST_CASE("twist exponents for the banana family", "[twist]") {
    TwistSpec s3 = make_twist(1, {1, 1, 1}, {0, 0, 0}, 2);
    REQUIRE(s3.sigma == pf("1 + 2*eps"));
    REQUIRE(s3.lambda_u == pf("3*eps"));
    for (int i = 0; i < 3; ++i) REQUIRE(s3.rho[i].is_zero());

    TwistSpec s4 = make_twist(1, {1, 1, 1, 1}, {0, 0, 0, 0}, 3);
    REQUIRE(s4.sigma == pf("1 + 3*eps"));
    REQUIRE(s4.lambda_u == pf("4*eps"));
    REQUIRE(s4.pole_factor(3) == pf("3 + 3*eps"));
}

TEST_CASE("analytic regulators enter every exponent", "[twist]") {
    TwistSpec tw = make_twist(1, {2, 1, 1}, {1, 0, 1}, 2);
    REQUIRE(tw.sigma == pf("2 + 2*eps + 2*kap"));
    REQUIRE(tw.lambda_u == pf("1 + 3*eps + 2*kap"));
    REQUIRE(tw.rho[0] == pf("1 + kap"));
    REQUIRE(tw.rho[1].is_zero());
    REQUIRE(tw.rho[2] == pf("kap"));
    REQUIRE(tw.pole_factor(3) == pf("4 + 2*eps + 2*kap"));
}

TEST_CASE("malformed exponent lists are rejected", "[twist]") {
    REQUIRE_THROWS_AS(make_twist(1, {1, 1}, {0}, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_twist(1, {}, {}, 1), std::invalid_argument);
}

TEST_CASE("context precomputes gradients and validates degrees", "[twist]") {
    ReductionContext ctx = sunset_context();
    REQUIRE(ctx.nvars == 3);
    REQUIRE(ctx.L == 2);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(ctx.gradU[i] == ctx.U.dx(i));
        REQUIRE(ctx.gradF[i] == ctx.F.dx(i));
    }
    REQUIRE(ctx.numerator_degree(0) == 0);
    REQUIRE(ctx.numerator_degree(2) == 6);

    // F must sit one degree above U
    HomoPoly U = ctx.U;
    REQUIRE_THROWS_AS(make_context(U, U, make_twist(1, {1, 1, 1}, {0, 0, 0}, 2)),
                      std::invalid_argument);
    // and the twist arity must match the edge count
    REQUIRE_THROWS_AS(make_context(U, ctx.F, make_twist(1, {1, 1}, {0, 0}, 2)),
                      std::invalid_argument);
}

TEST_CASE("forms are checked against the pole ladder", "[twist]") {
    ReductionContext ctx = sunset_context();
    TwistedForm f0 = make_form(ctx);
    REQUIRE(f0.a == 0);
    REQUIRE(f0.Q == HomoPoly::one(3));
    REQUIRE_NOTHROW(check_form(ctx, f0));
    TwistedForm bad{var(3, 0), 0};
    REQUIRE_THROWS_AS(check_form(ctx, bad), std::invalid_argument);
    TwistedForm neg{HomoPoly::one(3), -1};
    REQUIRE_THROWS_AS(check_form(ctx, neg), std::invalid_argument);
}

TEST_CASE("parameter derivative follows the twisted product rule", "[twist]") {
    ReductionContext ctx = sunset_context();
    Symbol t = sym("t");
    ParamField sigma = ctx.twist.sigma;
    HomoPoly x1x2x3 = var(3, 0) * var(3, 1) * var(3, 2);

    // dF/dt = -x1x2x3, so the first derivative of 1/F^sigma has numerator
    // -sigma dF = sigma x1x2x3 at pole 1
    TwistedForm f1 = t_derivative(ctx, make_form(ctx), t);
    REQUIRE(f1.a == 1);
    REQUIRE(f1.Q == x1x2x3.scale(sigma));

    // dF/dt is t-free, so the second derivative collapses to
    // sigma (sigma+1) (dF)^2 at pole 2
    TwistedForm f2 = t_derivative(ctx, f1, t);
    REQUIRE(f2.a == 2);
    REQUIRE(f2.Q == (x1x2x3 * x1x2x3).scale(sigma * (sigma + pf("1"))));
}

TEST_CASE("parameter derivatives in two symbols commute", "[twist]") {
    HomoPoly x1 = var(2, 0), x2 = var(2, 1);
    Symbol s = sym("ks1"), r = sym("ks2");
    HomoPoly U = x1 + x2;
    HomoPoly F = (x1 * x1).scale(ParamField::variable(s)) +
                 (x2 * x2).scale(ParamField::variable(r)) + x1 * x2;
    ReductionContext ctx = make_context(U, F, make_twist(2, {1, 1}, {0, 0}, 1));
    TwistedForm f = t_derivative(ctx, make_form(ctx), s);  // start one level up
    TwistedForm fsr = t_derivative(ctx, t_derivative(ctx, f, s), r);
    TwistedForm frs = t_derivative(ctx, t_derivative(ctx, f, r), s);
    REQUIRE(fsr.a == frs.a);
    REQUIRE(fsr.Q == frs.Q);
}

TEST_CASE("log-gradient residual of a clean field", "[twist]") {
    // C_i = x_i F at pole 2: Euler's identity fixes every part in closed form
    ReductionContext ctx = box_context();
    std::vector<HomoPoly> C;
    for (int i = 0; i < 4; ++i) C.push_back(var(4, i) * ctx.F);
    LogGradientParts parts = log_gradient_residual(ctx, 2, C);

    REQUIRE(parts.a == 2);
    // C.grad F = F (x.grad F) = 2 F^2, scaled by (a-1+sigma) = 3+eps
    REQUIRE(parts.A == (ctx.F * ctx.F).scale(pf("2") * pf("3 + eps")));
    // C.grad U = F (x.grad U) = F U exactly, so c = F with no remainder
    REQUIRE(parts.c == ctx.F);
    REQUIRE(parts.U_comp.is_zero());
    for (const auto& xc : parts.x_comp) REQUIRE(xc.is_zero());
    REQUIRE(parts.clean());
    // div C = 4F + x.grad F = 6F, plus lambda_u c = 2 eps F, negated
    REQUIRE(parts.B == ctx.F.scale(-(pf("6 + 2*eps"))));
}

TEST_CASE("log-gradient residual reports twist obstructions", "[twist]") {
    // nu = (2,1,1) puts rho_1 = 1, and C_1 = x1 + x2 is not divisible by x1
    ReductionContext ctx = sunset_context({2, 1, 1});
    HomoPoly x1 = var(3, 0), x2 = var(3, 1);
    std::vector<HomoPoly> C{x1 + x2, HomoPoly(3, 1), HomoPoly(3, 1)};
    LogGradientParts parts = log_gradient_residual(ctx, 1, C);

    REQUIRE_FALSE(parts.clean());
    REQUIRE(parts.x_comp[0] == -x2);  // -rho_0 rem(C_0, x_1) with rho_0 = 1
    REQUIRE(parts.x_comp[1].is_zero());
    REQUIRE(parts.x_comp[2].is_zero());

    // the reported quotient satisfies lambda_u (C.grad U) = lambda_u c U - U_comp
    ParamField lu = ctx.twist.lambda_u;
    REQUIRE(dot_grad(C, ctx.U).scale(lu) == parts.c.scale(lu) * ctx.U - parts.U_comp);
    REQUIRE_FALSE(parts.U_comp.is_zero());

    // and B accounts for div C, lambda_u c, and the x_1 quotient:
    // (-B) x1 = (div C) x1 + lambda_u c x1 + rho_0 C_0 + x_comp[0]
    HomoPoly lhs = (-parts.B) * x1;
    HomoPoly rhs = divergence(C) * x1 + parts.c.scale(lu) * x1 +
                   C[0].scale(ctx.twist.rho[0]) + parts.x_comp[0];
    REQUIRE(lhs == rhs);
}

TEST_CASE("log-gradient residual validates its input", "[twist]") {
    ReductionContext ctx = box_context();
    std::vector<HomoPoly> wrong_degree(4, ctx.U);  // degree 1, but a=2 needs 3
    REQUIRE_THROWS_AS(log_gradient_residual(ctx, 2, wrong_degree), std::invalid_argument);
    std::vector<HomoPoly> wrong_arity(3, HomoPoly(4, 1));
    REQUIRE_THROWS_AS(log_gradient_residual(ctx, 1, wrong_arity), std::invalid_argument);
    REQUIRE_THROWS_AS(log_gradient_residual(ctx, 0, std::vector<HomoPoly>(4, HomoPoly(4, 0))),
                      std::invalid_argument);

    // the form overload checks the numerator too: pole 1 needs degree 2
    TwistedForm f{var(4, 0), 1};
    std::vector<HomoPoly> C(4, HomoPoly(4, 1));
    REQUIRE_THROWS_AS(log_gradient_residual(ctx, f, C), std::invalid_argument);
}
