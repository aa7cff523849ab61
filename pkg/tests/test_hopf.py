import pytest

from hopfcalc.hopf import (
    BasisFamily,
    ComoduleAlgebra,
    NotInvertible,
    build_cyclic_group_algebra,
    build_group_algebra,
    build_laurent_hopf,
    build_radford,
    build_torus_comodule,
    check_comodule_algebra,
    check_hopf_axioms,
    compute_coinvariants,
    convolution_inverse,
    cyclic_cayley,
    parse_basis_combination,
    parse_structure_constants,
    render_structure_constants,
    tensor_square_coalgebra,
    CoalgebraData,
)
from hopfcalc.linalg import FreeVector, LinOp, tensor_index
from hopfcalc.scalars import CycScalar, root_of_unity

E = FreeVector.basis


def coalgebra_of(h):
    return CoalgebraData(comul=h.comul, counit=h.counit)


def test_group_algebra_c2():
    h = build_cyclic_group_algebra(2)
    assert len(h.algebra.basis.enumerate()) == 2
    assert h.antipode(("g", 1)) == E(("g", 1))
    assert check_hopf_axioms(h).ok


def test_group_algebra_c1_is_ground_field():
    h = build_cyclic_group_algebra(1)
    assert len(h.algebra.basis.enumerate()) == 1
    assert check_hopf_axioms(h).ok


def test_group_algebra_c4_counit_of_group_sum():
    h = build_cyclic_group_algebra(4)
    total = CycScalar.zero()
    for ix in h.algebra.basis.enumerate():
        total = total + h.counit(ix)
    assert total == 4


def test_invalid_cayley_table_reports_offender():
    elements, table = cyclic_cayley(3)
    table[(1, 2)] = 1  # break associativity/identity structure
    with pytest.raises(ValueError):
        build_group_algebra(elements, table)


def test_laurent_hopf():
    h = build_laurent_hopf()
    assert h.antipode(("t", 3)) == E(("t", -3))
    assert h.comul(("t", 0)) == E(tensor_index(("t", 0), ("t", 0)))
    assert h.algebra.mult(("t", 2), ("t", -2)) == h.algebra.unit
    report = check_hopf_axioms(h, window=3)
    assert report.ok
    assert report.get("algebra.assoc").status == "window-verified"


def test_radford_basis_and_relations():
    q = root_of_unity(4)
    data = build_radford(2, 2, q)
    basis = data.hopf.algebra.basis.enumerate()
    assert len(basis) == 8
    assert data.hopf.counit(("ax", 0, 1)).is_zero()
    # x a = q a x as normal forms
    assert data.hopf.algebra.mult(("ax", 0, 1), ("ax", 1, 0)) == E(("ax", 1, 1), q)
    assert len(data.h1.basis.enumerate()) == 4


def test_radford_passes_all_hopf_axioms_exhaustively():
    data = build_radford(2, 2, root_of_unity(4))
    report = check_hopf_axioms(data.hopf)
    assert report.ok
    assert all(c.status == "pass" for c in report.checks)


def test_radford_with_identity_antipode_fails_at_x():
    data = build_radford(2, 2, root_of_unity(4))
    broken = data.hopf
    broken = type(broken)(
        algebra=broken.algebra,
        comul=broken.comul,
        counit=broken.counit,
        antipode=LinOp(lambda ix: E(ix), name="id"),
        antipode_inv=LinOp(lambda ix: E(ix), name="id"),
        name=broken.name,
    )
    report = check_hopf_axioms(broken)
    bad = report.get("hopf.antipode")
    assert bad.status == "fail"
    assert "ax(0,1)" in bad.witness


def test_radford_rejects_non_primitive_root():
    with pytest.raises(ValueError):
        build_radford(2, 2, root_of_unity(4, 2))  # order 2, need order 4


def test_convolution_inverse_on_group_algebra_is_group_inverse():
    h = build_cyclic_group_algebra(4)
    identity = LinOp(lambda ix: E(ix))
    g = convolution_inverse(identity, coalgebra_of(h), h.algebra.basis.enumerate(), h.algebra)
    assert not isinstance(g, NotInvertible)
    for k in range(4):
        assert g(("g", k)) == E(("g", (-k) % 4))


def test_convolution_inverse_zero_map_not_invertible():
    h = build_cyclic_group_algebra(2)
    zero = LinOp(lambda ix: FreeVector.zero())
    out = convolution_inverse(zero, coalgebra_of(h), h.algebra.basis.enumerate(), h.algebra)
    assert isinstance(out, NotInvertible)
    assert out.element is not None


def test_convolution_inverse_general_solver_on_radford():
    data = build_radford(2, 2, root_of_unity(4))
    h = data.hopf
    s = convolution_inverse(LinOp(lambda ix: E(ix)), coalgebra_of(h), h.algebra.basis.enumerate(), h.algebra)
    assert not isinstance(s, NotInvertible)
    # the convolution inverse of the identity is the antipode
    for ix in h.algebra.basis.enumerate():
        assert s(ix) == h.antipode(ix)


def test_tensor_square_coalgebra_counit():
    h = build_cyclic_group_algebra(2)
    sq = tensor_square_coalgebra(h)
    ix = tensor_index(("g", 0), ("g", 1))
    assert sq.counit(ix).is_one()
    assert sq.comul(ix) == E(tensor_index(ix, ix))


def test_torus_comodule():
    theta = root_of_unity(8)
    torus = build_torus_comodule(theta)
    alg = torus.comodule.algebra
    # v u = e^{i theta} u v
    assert alg.mult(("uv", 0, 1), ("uv", 1, 0)) == E(("uv", 1, 1), theta)
    # rho(uv) = uv (x) 1
    uv = alg.mult(("uv", 1, 0), ("uv", 0, 1))
    assert torus.comodule.coaction_vec(uv) == uv.tensor(torus.comodule.hopf.algebra.unit)
    report = check_comodule_algebra(torus.comodule, window=3)
    assert report.ok
    assert report.get("comodule.coinvariants").status == "window-verified"


def test_torus_coinvariant_powers_multiply_exactly():
    torus = build_torus_comodule(root_of_unity(8))
    for k in range(-3, 4):
        for l in range(-3, 4):
            lhs = torus.comodule.algebra.mult_vec(
                torus.base_embed(("w", k)), torus.base_embed(("w", l))
            )
            assert lhs == torus.base_embed(("w", k + l))


def test_torus_cleaving_inverse_via_solver():
    torus = build_torus_comodule(root_of_unity(8))
    g = convolution_inverse(
        torus.cleaving,
        coalgebra_of(torus.comodule.hopf),
        [("t", n) for n in range(-4, 5)],
        torus.comodule.algebra,
        window=4,
    )
    assert not isinstance(g, NotInvertible)
    assert g(("t", 1)) == E(("uv", -1, 0))  # u^-1
    for n in range(-4, 5):
        assert g(("t", n)) == torus.cleaving_inv(("t", n))


def test_compute_coinvariants_of_group_algebra_over_itself():
    h = build_cyclic_group_algebra(2)
    m = ComoduleAlgebra(algebra=h.algebra, hopf=h, coaction=h.comul)
    fam = compute_coinvariants(m)
    assert len(fam.algebra.basis.enumerate()) == 1
    only = fam.embed(fam.algebra.basis.enumerate()[0])
    assert m.coaction_vec(only) == only.tensor(h.algebra.unit)


def test_structure_constants_round_trip():
    h = build_cyclic_group_algebra(2)
    text = render_structure_constants(h)
    back = parse_structure_constants(text)
    assert check_hopf_axioms(back).ok
    assert back.algebra.unit == E(("u", 0))
    assert sum(line.startswith("MUL ") for line in render_structure_constants(back).splitlines()) == 4


def test_structure_constants_radford_round_trip():
    data = build_radford(2, 2, root_of_unity(4))
    back = parse_structure_constants(render_structure_constants(data.hopf))
    assert check_hopf_axioms(back).ok


def test_structure_constants_unknown_directive():
    with pytest.raises(ValueError, match="unknown directive"):
        parse_structure_constants("HOPF x\nDIM 1\nSCALAR_ORDER 1\nFROBENIUS 0 : 1\n")


def test_parse_basis_combination():
    v = parse_basis_combination("1*0 - 1*1")
    assert v == E(("u", 0)) - E(("u", 1))
    w = parse_basis_combination("(1/2 + 3*z4^1)*2 + 3")
    expected = E(("u", 2)).scale(CycScalar.from_rational(1) / 2 + 3 * root_of_unity(4)) + E(("u", 3))
    assert w == expected
