#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>
#include <vector>

#include <twistpf/expr.hpp>
#include <twistpf/pfdriver.hpp>

using namespace twistpf;

namespace {

ParamField pf(const std::string& src) { return parse_field(src); }
ParamPoly pp(const std::string& src) { return parse_poly(src); }

HomoPoly var(int nvars, int i) {
    EVec e(nvars, 0);
    e[i] = 1;
    return HomoPoly::monomial(nvars, e, ParamField(Rat(1)));
}

// one-loop box with unit legs: U = x1+x2+x3+x4, F = x2 x4 + X x1 x3
ReductionContext box_context() {
    HomoPoly x1 = var(4, 0), x2 = var(4, 1), x3 = var(4, 2), x4 = var(4, 3);
    HomoPoly U = x1 + x2 + x3 + x4;
    HomoPoly F = x2 * x4 + (x1 * x3).scale(pf("X"));
    return make_context(U, F, make_twist(2, {1, 1, 1, 1}, {0, 0, 0, 0}, 1));
}

// equal-mass two-loop sunset: U = x1x2+x1x3+x2x3, F = U*(x1+x2+x3) - t x1x2x3
ReductionContext sunset_context() {
    HomoPoly x1 = var(3, 0), x2 = var(3, 1), x3 = var(3, 2);
    HomoPoly U = x1 * x2 + x1 * x3 + x2 * x3;
    HomoPoly F = U * (x1 + x2 + x3) - (x1 * x2 * x3).scale(pf("t"));
    return make_context(U, F, make_twist(1, {1, 1, 1}, {0, 0, 0}, 2));
}

DiffOperator frozen_box() {
    DiffOperator op;
    op.t = sym("X");
    op.coeffs = {pp("eps + X + 1"), pp("X^2 + X")};
    return op;
}

DiffOperator frozen_sunset() {
    DiffOperator op;
    op.t = sym("t");
    op.coeffs = {pp("t - 3 + 3*eps*t - 5*eps + 2*eps^2*t + 2*eps^2"),
                 pp("3*t^2 - 20*t + 9 + 3*eps*t^2 - 10*eps*t - 9*eps"),
                 pp("t^3 - 10*t^2 + 9*t")};
    return op;
}

}  // namespace

TEST_CASE("box annihilator is found, matches, and verifies", "[pfdriver]") {
    ReductionContext ctx = box_context();
    OperatorSearch res = minimal_operator(ctx, sym("X"));

    REQUIRE(res.found);
    REQUIRE(res.op.order() == 1);
    REQUIRE(equal_up_to_unit(res.op, frozen_box()));

    VerifyReport rep = verify_operator(ctx, sym("X"), res.op, res.certificate);
    REQUIRE(rep.exactness_ok);
    REQUIRE(rep.structure_ok);
    REQUIRE(rep.scalars_ok);
    REQUIRE(rep.ok);
}

TEST_CASE("sunset annihilator is found, matches, and verifies", "[pfdriver]") {
    ReductionContext ctx = sunset_context();
    OperatorSearchOptions opts;
    opts.threads = 2;
    OperatorSearch res = minimal_operator(ctx, sym("t"), opts);

    REQUIRE(res.found);
    REQUIRE(res.op.order() == 2);
    REQUIRE(equal_up_to_unit(res.op, frozen_sunset()));
    REQUIRE(res.complement_dims.at(1) == 6);
    REQUIRE(res.complement_dims.at(2) == 3);

    VerifyReport rep = verify_operator(ctx, sym("t"), res.op, res.certificate);
    REQUIRE(rep.ok);

    // dimensional regularization switched off: thresholds survive at eps = 0
    DiffOperator at0 = specialize(res.op, {{sym_eps(), ParamField(Rat(0))}});
    DiffOperator expect0;
    expect0.t = sym("t");
    expect0.coeffs = {pp("t - 3"), pp("3*t^2 - 20*t + 9"), pp("t^3 - 10*t^2 + 9*t")};
    REQUIRE(equal_up_to_unit(at0, expect0));

    // the singular locus is the threshold set {0, 1, 9}, eps-free
    SingularReport sing = singular_locus(res.op);
    REQUIRE(sing.factors.size() == 3);
    bool saw0 = false, saw1 = false, saw9 = false;
    for (const auto& f : sing.factors) {
        REQUIRE(f.multiplicity == 1);
        REQUIRE_FALSE(f.eps_dependent);
        if (f.factor == pp("t")) saw0 = true;
        if (f.factor == pp("t - 1")) saw1 = true;
        if (f.factor == pp("t - 9")) saw9 = true;
    }
    REQUIRE(saw0);
    REQUIRE(saw1);
    REQUIRE(saw9);
}

TEST_CASE("search results do not depend on the thread count", "[pfdriver]") {
    ReductionContext ctx = box_context();
    OperatorSearchOptions one, four;
    one.threads = 1;
    four.threads = 4;
    OperatorSearch r1 = minimal_operator(ctx, sym("X"), one);
    OperatorSearch r4 = minimal_operator(ctx, sym("X"), four);

    REQUIRE(r1.found);
    REQUIRE(r4.found);
    REQUIRE(r1.op.coeffs == r4.op.coeffs);
    REQUIRE(r1.certificate.size() == r4.certificate.size());
}

TEST_CASE("order bound stops the search honestly", "[pfdriver]") {
    ReductionContext ctx = sunset_context();
    OperatorSearchOptions opts;
    opts.max_order = 1;
    OperatorSearch res = minimal_operator(ctx, sym("t"), opts);
    REQUIRE_FALSE(res.found);
    REQUIRE(res.orders_tried == 1);
}

TEST_CASE("verification rejects tampered certificates", "[pfdriver]") {
    ReductionContext ctx = box_context();
    OperatorSearch res = minimal_operator(ctx, sym("X"));
    REQUIRE(res.found);
    REQUIRE_FALSE(res.certificate.empty());

    SECTION("sign flip breaks exactness") {
        ReductionCertificate bad = res.certificate;
        for (auto& Ci : bad[0].C) Ci = Ci.scale(pf("-1"));
        bad[0].c = bad[0].c.scale(pf("-1"));
        VerifyReport rep = verify_operator(ctx, sym("X"), res.op, bad);
        REQUIRE_FALSE(rep.exactness_ok);
        REQUIRE_FALSE(rep.ok);
        REQUIRE_FALSE(rep.residual.is_zero());
    }

    SECTION("tampered Step-2 scalar is caught") {
        ReductionCertificate bad = res.certificate;
        bad[0].c = bad[0].c.scale(pf("2"));
        VerifyReport rep = verify_operator(ctx, sym("X"), res.op, bad);
        REQUIRE_FALSE(rep.scalars_ok);
        REQUIRE_FALSE(rep.ok);
        REQUIRE(rep.failed_step == 0);
    }

    SECTION("a step violating the U-divisibility constraint is caught") {
        ReductionCertificate bad = res.certificate;
        ReductionStep ugly;
        ugly.a = 2;
        ugly.C = {var(4, 0) * ctx.F, HomoPoly(4, 3), HomoPoly(4, 3), HomoPoly(4, 3)};
        ugly.c = HomoPoly(4, 2);
        bad.push_back(std::move(ugly));
        VerifyReport rep = verify_operator(ctx, sym("X"), res.op, bad);
        REQUIRE_FALSE(rep.structure_ok);
        REQUIRE_FALSE(rep.ok);
    }

    SECTION("a wrong operator fails against the true certificate") {
        DiffOperator wrong = res.op;
        wrong.coeffs[0] = wrong.coeffs[0] + pp("1");
        VerifyReport rep = verify_operator(ctx, sym("X"), wrong, res.certificate);
        REQUIRE_FALSE(rep.exactness_ok);
        REQUIRE_FALSE(rep.ok);
    }
}
