#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <twistpf/diffop.hpp>
#include <twistpf/expr.hpp>

using namespace twistpf;

namespace {

ParamPoly pp(const std::string& src) { return parse_poly(src); }

DiffOperator op_of(const std::string& tname, std::vector<ParamPoly> coeffs) {
    DiffOperator op;
    op.t = sym(tname);
    op.coeffs = std::move(coeffs);
    return op;
}

// the one-loop box annihilator: (X^2 + X) DX + (1 + X + eps)
DiffOperator box_op() { return op_of("X", {pp("eps + X + 1"), pp("X^2 + X")}); }

}  // namespace

TEST_CASE("normalize strips joint polynomial and rational content", "[operator]") {
    // coefficients 3*t(t+1) and (t-2)*t(t+1): the joint content t(t+1) is stripped
    DiffOperator a = normalize(op_of("t", {pp("3*t^2 + 3*t"), pp("t^3 - t^2 - 2*t")}));
    REQUIRE(a.coeffs.size() == 2);
    REQUIRE(a.coeffs[0] == pp("3"));
    REQUIRE(a.coeffs[1] == pp("t - 2"));

    DiffOperator b = normalize(op_of("t", {pp("2/3*t"), pp("4/3")}));
    REQUIRE(b.coeffs[0] == pp("t"));
    REQUIRE(b.coeffs[1] == pp("2"));

    // sign is fixed by the leading coefficient
    DiffOperator c = normalize(op_of("t", {pp("t + 1"), pp("-t")}));
    REQUIRE(c.coeffs[1] == pp("t"));
    REQUIRE(c.coeffs[0] == pp("-t - 1"));

    // trailing zeros drop the order; a lone coefficient is its own content
    DiffOperator d = normalize(op_of("t", {pp("5*t"), ParamPoly(), ParamPoly()}));
    REQUIRE(d.order() == 0);
    REQUIRE(d.coeffs[0] == pp("1"));
    REQUIRE_THROWS_AS(normalize(op_of("t", {ParamPoly(), ParamPoly()})), std::invalid_argument);
}

TEST_CASE("make_operator clears denominators", "[operator]") {
    std::vector<ParamField> coeffs = {parse_field("1/t"), parse_field("1/(t^2 + t)")};
    DiffOperator op = make_operator(sym("t"), coeffs);
    REQUIRE(op.order() == 1);
    REQUIRE(op.coeffs[0] == pp("t + 1"));
    REQUIRE(op.coeffs[1] == pp("1"));
}

TEST_CASE("operators compare up to a unit of the coefficient field", "[operator]") {
    DiffOperator a = box_op();
    DiffOperator b = op_of("X", {pp("7*X^2 + 35") * pp("eps + X + 1"), pp("7*X^2 + 35") * pp("X^2 + X")});
    REQUIRE(equal_up_to_unit(a, b));

    DiffOperator neg = op_of("X", {pp("-eps - X - 1"), pp("-X^2 - X")});
    REQUIRE(equal_up_to_unit(a, neg));

    DiffOperator other = op_of("X", {pp("eps + X"), pp("X^2 + X")});
    REQUIRE_FALSE(equal_up_to_unit(a, other));

    DiffOperator wrong_t = op_of("t", {pp("eps + t + 1"), pp("t^2 + t")});
    REQUIRE_FALSE(equal_up_to_unit(a, wrong_t));
}

TEST_CASE("specialize binds parameters and renormalizes", "[operator]") {
    DiffOperator a = box_op();
    DiffOperator a0 = specialize(a, {{sym_eps(), ParamField(Rat(0))}});
    REQUIRE(equal_up_to_unit(a0, op_of("X", {pp("X + 1"), pp("X^2 + X")})));

    // binding the derivation variable is refused
    REQUIRE_THROWS_AS(specialize(a, {{sym("X"), ParamField(Rat(1))}}), std::invalid_argument);

    // a vanishing specialization is refused
    DiffOperator e = op_of("t", {pp("eps"), pp("eps*t")});
    REQUIRE_THROWS_AS(specialize(e, {{sym_eps(), ParamField(Rat(0))}}), std::invalid_argument);

    // zero leading coefficients drop the order
    DiffOperator f = op_of("t", {pp("1"), pp("eps")});
    DiffOperator f0 = specialize(f, {{sym_eps(), ParamField(Rat(0))}});
    REQUIRE(f0.order() == 0);
}

TEST_CASE("singular locus factors the leading coefficient", "[operator]") {
    DiffOperator op = op_of("t", {pp("1"), ParamPoly(), pp("12*eps^2*t^2 - 12*eps^2*t") * pp("t")});
    SingularReport rep = singular_locus(op);

    // leading coefficient 12 eps^2 t^2 (t - 1): the regulator part lands in the
    // unit cofactor, never in the reported factors
    REQUIRE(rep.factors.size() == 2);
    ParamPoly rebuilt = rep.unit_poly * rep.unit_scalar;
    for (const auto& f : rep.factors) {
        REQUIRE_FALSE(f.eps_dependent);
        for (int k = 0; k < f.multiplicity; ++k) rebuilt = rebuilt * f.factor;
    }
    REQUIRE(rebuilt == normalize(op).leading());

    bool saw_t = false, saw_t1 = false;
    for (const auto& f : rep.factors) {
        if (f.factor == pp("t")) { saw_t = true; REQUIRE(f.multiplicity == 2); }
        if (f.factor == pp("t - 1")) { saw_t1 = true; REQUIRE(f.multiplicity == 1); }
    }
    REQUIRE(saw_t);
    REQUIRE(saw_t1);

    // regulator-dependent factors are flagged; the t-free cofactor is preserved
    DiffOperator mixed = op_of("t", {pp("1"), pp("eps + 2") * pp("t - eps")});
    SingularReport mrep = singular_locus(mixed);
    REQUIRE(mrep.factors.size() == 1);
    REQUIRE(mrep.factors[0].factor == pp("eps - t"));
    REQUIRE(mrep.factors[0].eps_dependent);
    REQUIRE(mrep.unit_poly * mrep.unit_scalar * mrep.factors[0].factor == normalize(mixed).leading());
}

TEST_CASE("rendering is canonical", "[operator]") {
    REQUIRE(render(box_op()) == "(X^2 + X)*DX + (eps + X + 1)");
    REQUIRE(render(op_of("t", {pp("3"), pp("2*t"), pp("t^2")})) == "t^2*Dt^2 + 2*t*Dt + 3");
    REQUIRE(render(op_of("t", {pp("t"), ParamPoly(), pp("1")})) == "Dt^2 + t");
}
