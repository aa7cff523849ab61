"""Concrete instances wired from the builders: the Radford-family crossed
product, the noncommutative torus, small group-algebra calculi and a
commutative two-torus smash demo.  The CLI registry and the test-suite
both drive these."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from hopfcalc.crossed import (
    CleftData,
    Cocycle,
    CrossedProduct,
    Measure,
    build_crossed_product,
    cleft_to_crossed,
    cocycle_from_sigma,
)
from hopfcalc.hopf import (
    AlgebraPresentation,
    BasisFamily,
    CoinvariantFamily,
    ComoduleAlgebra,
    HopfData,
    RadfordData,
    build_cyclic_group_algebra,
    build_laurent_hopf,
    build_radford,
    build_torus_comodule,
    TorusData,
)
from hopfcalc.linalg import FreeVector, LinOp, tensor_index
from hopfcalc.scalars import CycScalar, root_of_unity

E = FreeVector.basis


@dataclass
class RadfordInstance:
    data: RadfordData
    group: HopfData              # k[C_r]
    measure: Measure
    cocycle: Cocycle
    crossed: CrossedProduct
    to_full: Callable[[FreeVector], FreeVector]  # crossed pair -> element of H_(r,n,q)


def radford_instance(r: int = 2, n: int = 2, q: CycScalar | None = None) -> RadfordInstance:
    """The indecomposable component of the Radford Hopf algebra, measured
    and twisted by the cyclic quotient group, assembled as a crossed product."""
    q = q if q is not None else root_of_unity(r * n)
    data = build_radford(r, n, q)
    group = build_cyclic_group_algebra(r, scalar_order=data.hopf.algebra.scalar_order)
    m_total = data.m

    def act(g_ix, b_ix):
        i = g_ix[1]
        _, l, mm = b_ix
        return E(b_ix, q ** (mm * (m_total - i)))

    def sigma(g_ix, k_ix):
        i, jdx = g_ix[1], k_ix[1]
        if i + jdx <= r - 1:
            return data.h1.unit
        return E(("h1", 1 % n, 0))

    measure = Measure(act=act)
    cocycle = cocycle_from_sigma(sigma, data.h1, group)
    crossed = build_crossed_product(data.h1, group, measure, cocycle, name=f"H1#k[C{r}]")

    def to_full(v: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for pair_ix, c in v.terms.items():
            _, b_ix, g_ix = pair_ix
            word = data.hopf.algebra.mult_vec(data.h1_embed(b_ix), E(("ax", g_ix[1], 0)))
            out = out + word.scale(c)
        return out

    return RadfordInstance(
        data=data, group=group, measure=measure, cocycle=cocycle, crossed=crossed, to_full=to_full
    )


def radford_base_calculus(inst: RadfordInstance) -> "Fodc":
    """Calculus on the indecomposable component: a free rank-one left
    module on the differential of the nilpotent generator, with
    d(a^r) = 0 so the cocycle values are killed.

    Only the n = 2 member of the family carries this packaged calculus.
    """
    from hopfcalc.fodc import Fodc
    from hopfcalc.linalg import LinOp

    if inst.data.n != 2:
        raise ValueError("the packaged base calculus needs nilpotency order n = 2")
    b = inst.data.h1
    q, r, n = inst.data.q, inst.data.r, inst.data.n

    def om(l, mm):
        return ("om", l % n, mm)

    form_ix = [om(l, mm) for l in range(n) for mm in range(n)]

    def twist(b_ix):
        # dx b = twist(b) dx: diagonal with factor q^(l r) (-1)^m on a^(lr) x^m
        _, l, mm = b_ix
        return E(("h1", l, mm), (q ** (l * r)) * CycScalar.from_rational((-1) ** mm))

    def relabel(bv):
        return bv.map_indices(lambda ix: ("om", ix[1], ix[2]))

    def left_act(b_ix, f_ix):
        w = E(("h1", f_ix[1], f_ix[2]))
        return relabel(b.mult_vec(E(b_ix), w))

    def right_act(f_ix, b_ix):
        w = E(("h1", f_ix[1], f_ix[2]))
        return relabel(b.mult_vec(w, twist(b_ix)))

    def d_ix(b_ix):
        _, l, mm = b_ix
        if mm == 0:
            return FreeVector.zero()
        return E(om(l, 0))

    from hopfcalc.hopf import BasisFamily as BF

    return Fodc(
        algebra=b,
        forms=BF(indices=form_ix),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d_B"),
        name=f"base-calculus({b.name})",
    )


@dataclass
class TorusInstance:
    torus: TorusData
    cleft: CleftData
    crossed: CrossedProduct
    theta: LinOp
    theta_inv: LinOp
    derivation_report: "CheckReport"
    theta_root: CycScalar

    def closed_measure(self, k: int, l: int) -> FreeVector:
        """t^k acting on w^l: the closed form e^{-i theta k l} w^l."""
        return E(("w", l), self.theta_root ** (-k * l))

    def closed_sigma_in_total(self, k: int, s: int) -> FreeVector:
        """The four-branch closed form of the derived cocycle, as an element
        of the torus algebra (monomials in u and v)."""
        th = self.theta_root
        if k >= 0 and s >= 0:
            return self.torus.comodule.algebra.unit
        if k <= 0 and s <= 0:
            return self.torus.comodule.algebra.unit
        if k >= 0 and s < 0:
            sp = -s
            if sp <= k:
                return E(("uv", sp, sp), th ** (-sp * (k - sp)))
            return E(("uv", k, k))
        kp = -k
        if kp <= s:
            return E(("uv", kp, kp), th ** (kp * kp))
        return E(("uv", s, s), th ** (s * kp))


def radford_injected_calculus(inst: RadfordInstance):
    """A calculus on the base with a twisted bimodule action whose
    differential does NOT kill the cocycle values: a free rank-one module
    on a generator that is the differential of a^r.

    Returns (Fodc, TwistedCalculusAction); used to demonstrate that the
    cocycle-vanishing condition is necessary."""
    from hopfcalc.fodc import Fodc, TwistedCalculusAction
    from hopfcalc.hopf import BasisFamily as BF
    from hopfcalc.linalg import LinOp

    if inst.data.n != 2:
        raise ValueError("the injected calculus needs nilpotency order n = 2")
    b = inst.data.h1
    q, r, n, m_total = inst.data.q, inst.data.r, inst.data.n, inst.data.m

    def omx(l, mm):
        return ("omx", l % n, mm)

    form_ix = [omx(l, mm) for l in range(n) for mm in range(n)]

    def relabel(bv):
        return bv.map_indices(lambda ix: ("omx", ix[1], ix[2]))

    def twist(b_ix):
        # omega b = twist(b) omega, the sign character (-1)^(l+m)
        _, l, mm = b_ix
        return E(("h1", l, mm), CycScalar.from_rational((-1) ** (l + mm)))

    def left_act(b_ix, f_ix):
        return relabel(b.mult_vec(E(b_ix), E(("h1", f_ix[1], f_ix[2]))))

    def right_act(f_ix, b_ix):
        return relabel(b.mult_vec(E(("h1", f_ix[1], f_ix[2])), twist(b_ix)))

    def d_ix(b_ix):
        _, l, mm = b_ix
        if l == 0:
            return FreeVector.zero()
        if mm == 0:
            return E(omx(0, 0))  # d(a^r) = omega
        return E(omx(0, 1), CycScalar.from_rational(-1))  # d(a^r x) = -x omega

    calc = Fodc(
        algebra=b,
        forms=BF(indices=form_ix),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d_inj"),
        name=f"injected-calculus({b.name})",
    )

    def act(g_ix, f_ix):
        # g^i . (b omega) = q^i (g^i . b) omega, diagonal on the monomial basis
        i = g_ix[1]
        _, l, mm = f_ix
        coeff = (q ** i) * (q ** (mm * (m_total - i)))
        return E(f_ix, coeff)

    return calc, TwistedCalculusAction(act=act)


@dataclass
class GroupC2Instance:
    hopf: HopfData
    calc: "Fodc"
    graded: "GradedDc"      # degree <= 1 truncation


def group_c2_instance(ideal: str = "zero") -> GroupC2Instance:
    """Woronowicz-style calculus on the order-two group algebra with the
    zero or the full augmentation ideal, truncated above degree one."""
    from hopfcalc.fodc import IdealCalculusSpec, woronowicz_from_ideal
    from hopfcalc.crossed_calc import NotTruncatable, truncate_dc_degree2

    h = build_cyclic_group_algebra(2)
    if ideal == "zero":
        gens = []
    elif ideal == "full":
        gens = [E(("g", 1)) - E(("g", 0))]
    else:
        raise ValueError(f"unknown ideal choice {ideal!r} (expected zero or full)")
    calc = woronowicz_from_ideal(IdealCalculusSpec(hopf=h, ideal_gens=gens))
    graded = truncate_dc_degree2(calc)
    if isinstance(graded, NotTruncatable):
        raise ValueError(f"group calculus unexpectedly not truncatable: {graded.witness}")
    return GroupC2Instance(hopf=h, calc=calc, graded=graded)


@dataclass
class RadfordCalculusInstance:
    instance: RadfordInstance
    b_calc: "Fodc"
    h_calc: "Fodc"                      # bicovariant, on k[C_r]
    cf: "CrossedFodc"
    b_graded: "GradedDc | None"
    h_graded: "GradedDc | None"
    higher: "GradedDc | None"           # graded forms on the crossed product
    truncation_witness: str | None = None


def radford_calculus_instance(r: int = 2, n: int = 2, q: CycScalar | None = None, ideal: str = "zero") -> RadfordCalculusInstance:
    from hopfcalc.crossed_calc import (
        NotTruncatable,
        build_crossed_fodc,
        build_higher_forms,
        truncate_dc_degree2,
        truncate_twisted_base,
    )
    from hopfcalc.fodc import IdealCalculusSpec, check_sigma_twisted_module_calculus, woronowicz_from_ideal

    inst = radford_instance(r, n, q)
    if ideal == "zero":
        gens = []
    elif ideal == "full":
        gens = [E(("g", i)) - E(("g", 0)) for i in range(1, r)]
    else:
        raise ValueError(f"unknown ideal choice {ideal!r} (expected zero or full)")
    h_calc = woronowicz_from_ideal(IdealCalculusSpec(hopf=inst.group, ideal_gens=gens))
    if h_calc.left_coaction is None:
        raise ValueError(f"structure calculus not bicovariant: {h_calc.covariance_note}")
    b_calc = radford_base_calculus(inst)
    cf = build_crossed_fodc(inst.crossed, b_calc, h_calc)
    truncated = truncate_dc_degree2(h_calc)
    if isinstance(truncated, NotTruncatable):
        # honest outcome: the structure calculus admits no prolongation with
        # vanishing degree two and a differentiable coproduct
        return RadfordCalculusInstance(
            instance=inst,
            b_calc=b_calc,
            h_calc=h_calc,
            cf=cf,
            b_graded=None,
            h_graded=None,
            higher=None,
            truncation_witness=truncated.witness,
        )
    b_graded = truncate_twisted_base(b_calc, inst.measure, cf.b_action)
    higher = build_higher_forms(inst.crossed, b_graded, truncated)
    return RadfordCalculusInstance(
        instance=inst,
        b_calc=b_calc,
        h_calc=h_calc,
        cf=cf,
        b_graded=b_graded,
        h_graded=truncated,
        higher=higher,
    )


@dataclass
class TorusCalculusInstance:
    instance: TorusInstance
    b_calc: "Fodc"
    h_calc: "Fodc"
    cf: "CrossedFodc"
    higher: "GradedDc"
    h_graded: "GradedDc"
    window: int


def torus_calculus_instance(theta_order: int = 8, window: int = 4, q: CycScalar | None = None) -> TorusCalculusInstance:
    from hopfcalc.crossed_calc import (
        NotTruncatable,
        build_crossed_fodc,
        build_higher_forms,
        truncate_dc_degree2,
        truncate_twisted_base,
    )
    from hopfcalc.fodc import build_laurent_q_calculus, zero_fodc

    inst = torus_instance(theta_order, window)
    if q is None:
        # the deformation parameter of the structure calculus is independent
        # of the angle; reuse the angle root when its order allows, else a
        # fourth root of unity
        q = inst.theta_root if theta_order >= 3 else root_of_unity(4)
    h_calc = build_laurent_q_calculus(q, hopf=inst.crossed.hopf)
    b_calc = zero_fodc(inst.crossed.base)
    cf = build_crossed_fodc(inst.crossed, b_calc, h_calc, window=window)
    h_graded = truncate_dc_degree2(h_calc, window=window)
    if isinstance(h_graded, NotTruncatable):
        raise ValueError(f"structure calculus not truncatable: {h_graded.witness}")
    b_graded = truncate_twisted_base(b_calc, inst.crossed.measure, cf.b_action)
    higher = build_higher_forms(inst.crossed, b_graded, h_graded, window=window)
    return TorusCalculusInstance(
        instance=inst, b_calc=b_calc, h_calc=h_calc, cf=cf, higher=higher,
        h_graded=h_graded, window=window,
    )


@dataclass
class SmashDemoInstance:
    comodule: ComoduleAlgebra
    cleft: CleftData
    a_calc: "Fodc"          # on the total algebra
    h_calc: "Fodc"
    q: CycScalar


def smash_demo_instance(q_order: int = 8) -> SmashDemoInstance:
    """A commutative two-torus presented as a genuine tensor product
    B (x) H, carrying the product of the classical calculus on the base
    and the one-parameter calculus on the structure Hopf algebra.  The
    cleaving map is an algebra morphism, so this is a trivial extension."""
    from hopfcalc.fodc import Fodc, build_laurent_q_calculus
    from hopfcalc.linalg import LinOp

    q = root_of_unity(q_order)
    so = q.order
    one = CycScalar.one(so)
    hopf = build_laurent_hopf(scalar_order=so)

    def ix(mm, nn):
        return ("st", mm, nn)

    algebra = AlgebraPresentation(
        name="B(x)H",
        basis=BasisFamily(window_fn=lambda w: [ix(mm, nn) for mm in range(-w, w + 1) for nn in range(-w, w + 1)]),
        mult=lambda i, jj: E(ix(i[1] + jj[1], i[2] + jj[2])),
        unit=E(ix(0, 0)),
        scalar_order=so,
    )

    base = AlgebraPresentation(
        name="k[s,s^-1]",
        basis=BasisFamily(window_fn=lambda w: [("s", k) for k in range(-w, w + 1)]),
        mult=lambda i, jj: E(("s", i[1] + jj[1])),
        unit=E(("s", 0)),
        scalar_order=so,
    )
    coinv = CoinvariantFamily(algebra=base, embed=lambda i: E(ix(i[1], 0)), declared=True)
    comodule = ComoduleAlgebra(
        algebra=algebra,
        hopf=hopf,
        coaction=lambda i: E(tensor_index(i, ("t", i[2]))),
        coinvariants=coinv,
    )
    cleft = CleftData(
        total=comodule,
        cleaving=LinOp(lambda t: E(ix(0, t[1])), name="j"),
        cleaving_inv=LinOp(lambda t: E(ix(0, -t[1])), name="j^-1"),
    )

    h_calc = build_laurent_q_calculus(q, hopf=hopf)
    denom_inv = (q - one).inverse()

    def q_int(nn):
        return (q ** nn - one) * denom_inv

    def d_ix(i):
        _, mm, nn = i
        out = FreeVector.zero()
        if mm:
            out = out + E(("ds", mm - 1, nn), CycScalar.from_rational(mm))
        c = q_int(nn)
        if not c.is_zero():
            out = out + E(("dtA", mm, nn - 1), c)
        return out

    def left_act(i, f):
        _, mm, nn = i
        return E((f[0], f[1] + mm, f[2] + nn))

    def right_act(f, i):
        _, mm, nn = i
        coeff = one if f[0] == "ds" else q ** nn
        return E((f[0], f[1] + mm, f[2] + nn), coeff)

    def right_coaction(f):
        shift = 0 if f[0] == "ds" else 1
        return E(tensor_index(f, ("t", f[2] + shift)))

    a_calc = Fodc(
        algebra=algebra,
        forms=BasisFamily(
            window_fn=lambda w: [("ds", mm, nn) for mm in range(-w, w + 1) for nn in range(-w, w + 1)]
            + [("dtA", mm, nn) for mm in range(-w, w + 1) for nn in range(-w, w + 1)]
        ),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d_A"),
        hopf=hopf,
        right_coaction=right_coaction,
        algebra_coaction=comodule.coaction,
        name="tensor-calculus(B(x)H)",
    )
    return SmashDemoInstance(comodule=comodule, cleft=cleft, a_calc=a_calc, h_calc=h_calc, q=q)


# ---------------------------------------------------------------------------
# verification suites driven by the command line runner
# ---------------------------------------------------------------------------


def radford_suites(params: dict) -> list:
    """(suite-name, thunk) pairs for the Radford family example."""
    from hopfcalc.crossed import check_hopf_galois, check_twisted_module_algebra, equivariant_section, CleftData
    from hopfcalc.crossed_calc import (
        check_graded_dc,
        compare_first_order,
        necessity_dsigma,
        verify_crossed_fodc,
    )
    from hopfcalc.fodc import check_fodc, check_sigma_twisted_module_calculus
    from hopfcalc.hopf import check_comodule_algebra, check_hopf_axioms
    from hopfcalc.linalg import LinOp
    from hopfcalc.qpb import (
        VComodule,
        canonical_connection,
        check_atiyah_exact,
        connection_form_bijection,
        covariant_derivative,
        tangent_and_fields,
        vertical_map,
    )
    from hopfcalc.report import CheckReport

    r, n = params["r"], params["n"]
    q = root_of_unity(r * n, params.get("q_power", 1))
    ideal = params.get("ideal", "zero")
    state: dict = {}

    def calc():
        if "rc" not in state:
            state["rc"] = radford_calculus_instance(r, n, q, ideal=ideal)
        return state["rc"]

    def vdata():
        if "vd" not in state:
            state["vd"] = vertical_map(calc().cf)
        return state["vd"]

    def hopf_axioms():
        rc = calc()
        rep = check_hopf_axioms(rc.instance.data.hopf)
        rep.extend(check_hopf_axioms(rc.instance.group), prefix="group.")
        return rep

    def twisted_module():
        rc = calc()
        inst = rc.instance
        return check_twisted_module_algebra(inst.data.h1, inst.group, inst.measure, inst.cocycle)

    def comodule():
        return check_comodule_algebra(calc().instance.crossed.comodule)

    def galois():
        return check_hopf_galois(calc().instance.crossed.comodule).report

    def fodc_suite():
        rc = calc()
        rep = check_fodc(rc.b_calc)
        rep.extend(check_fodc(rc.h_calc), prefix="structure.")
        return rep

    def twisted_calculus():
        rc = calc()
        inst = rc.instance
        _, rep = check_sigma_twisted_module_calculus(
            rc.b_calc, inst.group, inst.measure, inst.cocycle
        )
        return rep

    def crossed_fodc():
        return verify_crossed_fodc(calc().cf)

    def higher():
        rc = calc()
        if rc.higher is None:
            rep = CheckReport(example="radford", suite="higher-forms")
            rep.record(
                "truncation-obstruction",
                True,
                witness=f"no degree-two-trivial prolongation: {rc.truncation_witness}",
            )
            return rep
        rep = check_graded_dc(rc.higher, max_total=2)
        rep.extend(compare_first_order(rc.cf, rc.higher), prefix="")
        return rep

    def qpb_suite():
        vd = vdata()
        rep = CheckReport(example="radford", suite="qpb")
        rep.extend(vd.coinv.report)
        rep.extend(vd.report)
        rc = calc()
        if rc.higher is None:
            rep.extend(check_atiyah_exact(vd))
        else:
            rep.extend(check_atiyah_exact(vd, higher=rc.higher, h_graded=rc.h_graded, max_degree=2))
        return rep

    def connection():
        _, rep = canonical_connection(vdata())
        return rep

    def bijection():
        vd = vdata()
        conn, _ = canonical_connection(vd)
        tangent, _, trep = tangent_and_fields(vd)
        phi, rep1 = connection_form_bijection(vd, tangent, connection=conn)
        _, rep2 = connection_form_bijection(vd, tangent, form=phi)
        rep = CheckReport(example="radford", suite="bijection")
        rep.extend(trep)
        rep.extend(rep1, prefix="forward.")
        rep.extend(rep2, prefix="backward.")
        return rep

    def derivative():
        vd = vdata()
        group_dim = r
        v = VComodule(
            labels=[("v", 0), ("v", 1)],
            coaction=lambda vx: FreeVector.basis(
                tensor_index(vx, ("g", 1 % group_dim if vx[1] == 0 else 0))
            ),
        )
        return covariant_derivative(vd, v).report

    def necessity():
        rc = calc()
        inst = rc.instance
        inj, inj_action = radford_injected_calculus(inst)
        return necessity_dsigma(inst.crossed, inj, inj_action, rc.h_calc)

    def section():
        rc = calc()
        inst = rc.instance
        cleft = CleftData(
            total=inst.crossed.comodule,
            cleaving=LinOp(lambda g_ix: FreeVector.basis(tensor_index(("h1", 0, 0), g_ix))),
        )
        _, rep = equivariant_section(cleft)
        return rep

    return [
        ("hopf-axioms", hopf_axioms),
        ("twisted-module", twisted_module),
        ("comodule", comodule),
        ("hopf-galois", galois),
        ("fodc", fodc_suite),
        ("twisted-calculus", twisted_calculus),
        ("crossed-fodc", crossed_fodc),
        ("higher-forms", higher),
        ("qpb", qpb_suite),
        ("connection", connection),
        ("bijection", bijection),
        ("derivative", derivative),
        ("necessity", necessity),
        ("section", section),
    ]


def torus_suites(params: dict) -> list:
    from hopfcalc.crossed import check_twisted_module_algebra, equivariant_section
    from hopfcalc.crossed_calc import (
        check_graded_dc,
        classify_smash,
        compare_first_order,
        necessity_dsigma,
        verify_crossed_fodc,
    )
    from hopfcalc.fodc import (
        Fodc,
        TwistedCalculusAction,
        check_fodc,
        sigma_forces_zero_differential,
    )
    from hopfcalc.hopf import BasisFamily as BF
    from hopfcalc.hopf import check_comodule_algebra, check_hopf_axioms
    from hopfcalc.linalg import LinOp
    from hopfcalc.qpb import canonical_connection, check_atiyah_exact, vertical_map
    from hopfcalc.report import CheckReport

    theta_order = params.get("M", 8)
    window = params.get("window", 4)
    state: dict = {}

    def calc():
        if "tc" not in state:
            state["tc"] = torus_calculus_instance(theta_order, window)
        return state["tc"]

    def vdata():
        if "vd" not in state:
            state["vd"] = vertical_map(calc().cf, window=window)
        return state["vd"]

    def hopf_axioms():
        tc = calc()
        return check_hopf_axioms(tc.instance.crossed.hopf, window=window)

    def comodule():
        return check_comodule_algebra(calc().instance.torus.comodule, window=window)

    def cleft_derivation():
        tc = calc()
        inst = tc.instance
        rep = CheckReport(example="torus", suite="cleft-derivation")
        rep.extend(inst.derivation_report)

        def measure_matches(pair):
            k, l = pair
            got = inst.crossed.measure.act(("t", k), ("w", l))
            return got == inst.closed_measure(k, l), f"t({k}) ; w({l})"

        rep.sweep(
            "cleft.measure-closed-form",
            ((k, l) for k in range(-window, window + 1) for l in range(-window, window + 1)),
            measure_matches,
            windowed=True,
        )

        def sigma_matches(pair):
            k, s = pair
            got = inst.crossed.cocycle.sigma(("t", k), ("t", s))
            embedded = FreeVector.zero()
            for w_ix, c in got.terms.items():
                embedded = embedded + inst.torus.base_embed(w_ix).scale(c)
            return embedded == inst.closed_sigma_in_total(k, s), f"t({k}) ; t({s})"

        rep.sweep(
            "cleft.sigma-closed-form",
            ((k, s) for k in range(-window, window + 1) for s in range(-window, window + 1)),
            sigma_matches,
            windowed=True,
        )
        return rep

    def twisted_module():
        tc = calc()
        inst = tc.instance
        return check_twisted_module_algebra(
            inst.crossed.base, inst.crossed.hopf, inst.crossed.measure, inst.crossed.cocycle,
            window=min(window, 3),
        )

    def forced_zero():
        tc = calc()
        inst = tc.instance
        sigma_values = [
            inst.crossed.cocycle.sigma(("t", k), ("t", s))
            for k in range(-window, window + 1)
            for s in range(-window, window + 1)
        ]
        return sigma_forces_zero_differential(inst.crossed.base, sigma_values, window=window)

    def fodc_suite():
        return check_fodc(calc().h_calc, window=min(window, 3))

    def crossed_fodc():
        return verify_crossed_fodc(calc().cf, window=min(window, 3))

    def higher():
        tc = calc()
        # associativity sweeps are cubic in the window size; one shell is
        # already 9^3 base triples
        rep = check_graded_dc(tc.higher, window=1, max_total=2)
        rep.extend(compare_first_order(tc.cf, tc.higher, window=2))
        return rep

    def qpb_suite():
        vd = vdata()
        rep = CheckReport(example="torus", suite="qpb")
        rep.extend(vd.coinv.report)
        rep.extend(vd.report)
        rep.extend(check_atiyah_exact(vd, window=min(window, 3)))
        return rep

    def connection():
        _, rep = canonical_connection(vdata(), window=min(window, 3))
        return rep

    def necessity():
        tc = calc()
        inst = tc.instance

        def dd(ix):
            l = ix[1]
            if l == 0:
                return FreeVector.zero()
            return FreeVector({("dw", l - 1): CycScalar.from_rational(l)})

        classical = Fodc(
            algebra=inst.crossed.base,
            forms=BF(window_fn=lambda w: [("dw", k) for k in range(-w, w + 1)]),
            left_act=lambda a, f: FreeVector.basis(("dw", a[1] + f[1])),
            right_act=lambda f, a: FreeVector.basis(("dw", a[1] + f[1])),
            d=LinOp(dd, name="d_cl"),
            name="classical-base",
        )
        th = inst.theta_root
        action = TwistedCalculusAction(act=lambda t, f: FreeVector.basis(f, th ** (-t[1] * (f[1] + 1))))
        rep = necessity_dsigma(inst.crossed, classical, action, calc().h_calc, window=2)

        from hopfcalc.crossed_calc import hor, leibniz_defect

        defect = leibniz_defect(inst.crossed, classical, action, calc().h_calc, ("t", 1), ("t", -1))
        rep.record(
            "necessity-witness-at-unit-windings",
            defect == hor(FreeVector.basis(("dw", 0)), FreeVector.basis(("t", 0))),
            witness=defect.to_text(),
            windowed=True,
        )
        return rep

    def refusal():
        tc = calc()
        rep = CheckReport(example="torus", suite="classification-refusal")
        try:
            # the refusal fires on the cleaving map before any calculus is touched
            classify_smash(None, tc.h_calc, tc.instance.cleft, window=2)
        except ValueError as err:
            rep.record(
                "classification.refuses-non-trivial-extension",
                "not a trivial extension" in str(err),
                witness=str(err),
                windowed=True,
            )
            return rep
        rep.record("classification.refuses-non-trivial-extension", False, witness="no refusal")
        return rep

    def section():
        _, rep = equivariant_section(calc().instance.cleft, window=min(window, 3))
        return rep

    return [
        ("hopf-axioms", hopf_axioms),
        ("comodule", comodule),
        ("cleft-derivation", cleft_derivation),
        ("twisted-module", twisted_module),
        ("forced-zero", forced_zero),
        ("fodc", fodc_suite),
        ("crossed-fodc", crossed_fodc),
        ("higher-forms", higher),
        ("qpb", qpb_suite),
        ("connection", connection),
        ("necessity", necessity),
        ("classification-refusal", refusal),
        ("section", section),
    ]


def group_c2_suites(params: dict) -> list:
    from hopfcalc.crossed_calc import check_graded_dc
    from hopfcalc.fodc import check_fodc
    from hopfcalc.hopf import check_hopf_axioms

    ideal = params.get("ideal", "zero")
    state: dict = {}

    def inst():
        if "g" not in state:
            state["g"] = group_c2_instance(ideal)
        return state["g"]

    return [
        ("hopf-axioms", lambda: check_hopf_axioms(inst().hopf)),
        ("fodc", lambda: check_fodc(inst().calc)),
        ("graded", lambda: check_graded_dc(inst().graded, max_total=2)),
    ]


def smash_demo_suites(params: dict) -> list:
    from hopfcalc.crossed_calc import classify_smash
    from hopfcalc.fodc import check_fodc
    from hopfcalc.hopf import check_comodule_algebra

    window = params.get("window", 2)
    seed = params.get("seed", 0)
    q_order = params.get("M", 8)
    state: dict = {}

    def inst():
        if "d" not in state:
            state["d"] = smash_demo_instance(q_order)
        return state["d"]

    def fodc_suite():
        rep = check_fodc(inst().a_calc, window=2)
        rep.extend(check_fodc(inst().h_calc, window=2), prefix="structure.")
        return rep

    return [
        ("comodule", lambda: check_comodule_algebra(inst().comodule, window=window)),
        ("fodc", fodc_suite),
        (
            "classification",
            lambda: classify_smash(inst().a_calc, inst().h_calc, inst().cleft, window=window, seed=seed).report,
        ),
    ]


def user_hopf_suites(params: dict) -> list:
    from hopfcalc.fodc import IdealCalculusSpec, check_fodc, parse_ideal_generators, woronowicz_from_ideal
    from hopfcalc.hopf import check_hopf_axioms, parse_structure_constants

    path = params.get("file")
    if not path:
        raise ValueError("the user-hopf example needs --file with structure constants")
    state: dict = {}

    def hopf():
        if "h" not in state:
            with open(path, "r", encoding="utf-8") as handle:
                state["h"] = parse_structure_constants(handle.read())
        return state["h"]

    suites = [("hopf-axioms", lambda: check_hopf_axioms(hopf()))]
    ideal_path = params.get("ideal_file")
    if ideal_path:

        def quotient_calculus():
            with open(ideal_path, "r", encoding="utf-8") as handle:
                gens = parse_ideal_generators(handle.read())
            calc = woronowicz_from_ideal(IdealCalculusSpec(hopf=hopf(), ideal_gens=gens))
            report = check_fodc(calc)
            report.record(
                "covariance.bicovariant",
                True,
                witness=calc.covariance_note or f"bicovariant, {len(calc.forms.enumerate())} forms",
            )
            return report

        suites.append(("ideal-calculus", quotient_calculus))
    return suites


def cohomology_dims(example: str, params: dict) -> tuple[list[int], int | None]:
    """De Rham dimensions for the registered graded calculi."""
    from hopfcalc.crossed_calc import de_rham_cohomology

    max_degree = params.get("max_degree", 2)
    if example == "group-c2":
        inst = group_c2_instance(params.get("ideal", "zero"))
        return de_rham_cohomology(inst.graded, max_degree), None
    if example == "radford":
        rc = radford_calculus_instance(
            params.get("r", 2), params.get("n", 2), ideal=params.get("ideal", "zero")
        )
        if rc.higher is None:
            raise ValueError(
                "no degree-two-trivial prolongation for this structure calculus: "
                + (rc.truncation_witness or "")
            )
        return de_rham_cohomology(rc.higher, max_degree), None
    if example == "torus":
        window = params.get("window", 4)
        tc = torus_calculus_instance(params.get("M", 8), window)
        return de_rham_cohomology(tc.higher, max_degree, window=window), window
    raise ValueError(f"no cohomology runner for example {example!r}")


EXAMPLES = {
    "radford": {
        "description": "crossed product of the nilpotent component of the Radford family by its cyclic quotient, with the full calculus and bundle suite",
        "params": {"r": "int (default 2)", "n": "int (must be 2 for the calculus suites)", "q-power": "int (default 1)", "ideal": "zero|full", "seed": "int"},
        "suites": radford_suites,
    },
    "torus": {
        "description": "noncommutative torus at a rational angle as a cleft extension of Laurent polynomials",
        "params": {"M": "int angle denominator (default 8)", "window": "int (default 4)", "seed": "int"},
        "suites": torus_suites,
    },
    "group-c2": {
        "description": "group algebra of order two with the quotient calculus of a chosen ideal",
        "params": {"ideal": "zero|full", "max-degree": "int"},
        "suites": group_c2_suites,
    },
    "smash-demo": {
        "description": "commutative two-torus as a genuine tensor product, classified as a smash product calculus",
        "params": {"M": "int deformation order (default 8)", "window": "int (default 2)", "seed": "int"},
        "suites": smash_demo_suites,
    },
    "user-hopf": {
        "description": "axiom check of user-supplied structure constants, plus the quotient calculus of user-supplied ideal generators",
        "params": {"file": "path to a structure-constant file", "ideal-file": "optional path with one ideal generator per line"},
        "suites": user_hopf_suites,
    },
}


def torus_instance(theta_order: int = 8, window: int = 4) -> TorusInstance:
    """Noncommutative torus with angle 2 pi / theta_order, cleft over the
    Laurent Hopf algebra; measure and cocycle are derived from the
    cleaving map, not copied from closed forms."""
    theta = root_of_unity(theta_order)
    torus = build_torus_comodule(theta)
    cleft = CleftData(total=torus.comodule, cleaving=torus.cleaving, cleaving_inv=torus.cleaving_inv)
    crossed, theta_map, theta_inv, report = cleft_to_crossed(cleft, window=window)
    return TorusInstance(
        torus=torus,
        cleft=cleft,
        crossed=crossed,
        theta=theta_map,
        theta_inv=theta_inv,
        derivation_report=report,
        theta_root=theta,
    )
