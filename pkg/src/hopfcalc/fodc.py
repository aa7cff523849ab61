"""First order differential calculi and their checkers.

A calculus is a bimodule of 1-forms over an algebra with a Leibniz
differential that generates them.  The module provides the generic
checker, the quotient-by-ideal construction of covariant calculi on a
finite-dimensional Hopf algebra, the one-parameter calculus on Laurent
polynomials, the universal calculus, and the compatibility layer that
turns a calculus on a twisted module algebra into data usable by the
crossed product construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from hopfcalc.crossed import Cocycle, Measure
from hopfcalc.hopf import (
    AlgebraPresentation,
    BasisFamily,
    HopfData,
)
from hopfcalc.linalg import (
    FreeVector,
    LinearSolver,
    LinOp,
    NoSolution,
    QuotientSpace,
    Subspace,
    format_index,
    kernel_image,
    tensor_index,
)
from hopfcalc.report import CheckReport
from hopfcalc.scalars import CycScalar, multiplicative_order

Index = tuple
E = FreeVector.basis


@dataclass
class Fodc:
    algebra: AlgebraPresentation
    forms: BasisFamily
    left_act: Callable[[Index, Index], FreeVector]
    right_act: Callable[[Index, Index], FreeVector]
    d: LinOp
    hopf: Optional[HopfData] = None
    right_coaction: Optional[Callable[[Index], FreeVector]] = None  # form -> form (x) H
    left_coaction: Optional[Callable[[Index], FreeVector]] = None   # form -> H (x) form
    algebra_coaction: Optional[Callable[[Index], FreeVector]] = None
    algebra_left_coaction: Optional[Callable[[Index], FreeVector]] = None
    name: str = ""
    covariance_note: str = ""

    @property
    def bicovariant(self) -> bool:
        return self.right_coaction is not None and self.left_coaction is not None

    def left_act_vec(self, av: FreeVector, fv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for a, ca in av.terms.items():
            for f, cf in fv.terms.items():
                out = out + self.left_act(a, f).scale(ca * cf)
        return out

    def right_act_vec(self, fv: FreeVector, av: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for f, cf in fv.terms.items():
            for a, ca in av.terms.items():
                out = out + self.right_act(f, a).scale(cf * ca)
        return out

    def lambda_terms(self, form_ix: Index, h_legs: int):
        """Iterated left coaction: (coeff, (h_1, ..., h_legs, form)) tuples."""
        out = []
        for pair_ix, c in self.left_coaction(form_ix).terms.items():
            _, h_ix, f_ix = pair_ix
            if h_legs == 1:
                out.append((c, (h_ix, f_ix)))
            else:
                for c2, tup in self.hopf.sweedler(h_ix, h_legs):
                    out.append((c * c2, tup + (f_ix,)))
        return out

    def rho_vec(self, fv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for f, c in fv.terms.items():
            out = out + self.right_coaction(f).scale(c)
        return out

    def lambda_vec(self, fv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for f, c in fv.terms.items():
            out = out + self.left_coaction(f).scale(c)
        return out


def zero_fodc(algebra: AlgebraPresentation, name: str = "") -> Fodc:
    """The zero calculus: no forms, zero differential."""
    return Fodc(
        algebra=algebra,
        forms=BasisFamily(indices=[]),
        left_act=lambda a, f: FreeVector.zero(),
        right_act=lambda f, a: FreeVector.zero(),
        d=LinOp.zero(),
        name=name or f"zero({algebra.name})",
    )


def _w(*parts) -> str:
    return " ; ".join(
        p.to_text() if isinstance(p, FreeVector) else format_index(p) for p in parts
    )


def presentation_solver(f: Fodc, window: int | None = None) -> LinearSolver:
    """Solver expressing forms as combinations of a d(a') over window pairs."""
    a_basis = f.algebra.basis.enumerate(window)
    domain = [("pr", a, b) for a in a_basis for b in a_basis]

    def present(pr_ix):
        _, a, b = pr_ix
        return f.left_act_vec(E(a), f.d(b))

    return LinearSolver(LinOp(present, name="present"), domain)


class PresentationSolver:
    """Adaptive variant: on a windowed calculus, forms produced by actions
    can leave any fixed window, so failed presentations retry on an
    enlarged window (up to three times the requested one)."""

    def __init__(self, f: Fodc, window: int | None = None, growth: int = 3):
        self.f = f
        self.base_window = window
        self.windowed = not (f.algebra.basis.is_finite and f.forms.is_finite)
        self.cap = growth * window if (self.windowed and window) else None
        self.window = window
        self.solver = presentation_solver(f, window)

    def kernel(self):
        return self.solver.kernel()

    def solve(self, v: FreeVector):
        got = self.solver.solve(v)
        while isinstance(got, NoSolution) and self.windowed and self.window < self.cap:
            self.window = min(self.window + self.base_window, self.cap)
            self.solver = presentation_solver(self.f, self.window)
            got = self.solver.solve(v)
        return got


def check_fodc(f: Fodc, window: int | None = None) -> CheckReport:
    """Bimodule laws, Leibniz, surjectivity with witness, and (when
    coactions are present) colinearity of the differential and covariance
    of the actions."""
    report = CheckReport(example=f.name or f.algebra.name, suite="fodc")
    alg = f.algebra
    a_basis = alg.basis.enumerate(window)
    f_basis = f.forms.enumerate(window)
    windowed = not (alg.basis.is_finite and f.forms.is_finite)

    def left_assoc(item):
        a, b, beta = item
        lhs = f.left_act_vec(E(a), f.left_act(b, beta))
        rhs = f.left_act_vec(alg.mult(a, b), E(beta))
        return lhs == rhs, _w(a, b, beta)

    report.sweep(
        "bimodule.left-assoc",
        ((a, b, beta) for a in a_basis for b in a_basis for beta in f_basis),
        left_assoc,
        windowed=windowed,
    )

    def right_assoc(item):
        beta, a, b = item
        lhs = f.right_act_vec(f.right_act(beta, a), E(b))
        rhs = f.right_act_vec(E(beta), alg.mult(a, b))
        return lhs == rhs, _w(beta, a, b)

    report.sweep(
        "bimodule.right-assoc",
        ((beta, a, b) for beta in f_basis for a in a_basis for b in a_basis),
        right_assoc,
        windowed=windowed,
    )

    def compat(item):
        a, beta, b = item
        lhs = f.right_act_vec(f.left_act(a, beta), E(b))
        rhs = f.left_act_vec(E(a), f.right_act(beta, b))
        return lhs == rhs, _w(a, beta, b)

    report.sweep(
        "bimodule.compat",
        ((a, beta, b) for a in a_basis for beta in f_basis for b in a_basis),
        compat,
        windowed=windowed,
    )

    def unit_acts(beta):
        ok = (
            f.left_act_vec(alg.unit, E(beta)) == E(beta)
            and f.right_act_vec(E(beta), alg.unit) == E(beta)
        )
        return ok, format_index(beta)

    report.sweep("bimodule.unit", f_basis, unit_acts, windowed=windowed)

    def leibniz(pair):
        a, b = pair
        lhs = f.d(alg.mult(a, b))
        rhs = f.right_act_vec(f.d(a), E(b)) + f.left_act_vec(E(a), f.d(b))
        return lhs == rhs, _w(a, b)

    report.sweep(
        "leibniz", ((a, b) for a in a_basis for b in a_basis), leibniz, windowed=windowed
    )

    if f_basis:
        solver = presentation_solver(f, window)
        missing = None
        for beta in f_basis:
            if isinstance(solver.solve(E(beta)), NoSolution):
                missing = beta
                break
        report.record(
            "surjectivity",
            missing is None,
            witness=None if missing is None else f"form {format_index(missing)} unreachable",
            windowed=windowed,
        )
    else:
        report.record("surjectivity", True, windowed=windowed)

    if f.right_coaction is not None:
        h = f.hopf

        def rho_coassoc(beta):
            lhs = FreeVector.zero()
            rhs = FreeVector.zero()
            for pair_ix, c in f.right_coaction(beta).terms.items():
                _, fx, hx = pair_ix
                lhs = lhs + f.right_coaction(fx).tensor(E(hx)).scale(c)
                rhs = rhs + E(fx).tensor(h.comul(hx)).scale(c)
            lhs = lhs.map_indices(lambda ix: ("@3", ix[1][1], ix[1][2], ix[2]))
            rhs = rhs.map_indices(lambda ix: ("@3", ix[1], ix[2][1], ix[2][2]))
            ok = lhs == rhs
            counit_part = FreeVector.zero()
            for pair_ix, c in f.right_coaction(beta).terms.items():
                counit_part = counit_part + E(pair_ix[1]).scale(c * h.counit(pair_ix[2]))
            return ok and counit_part == E(beta), format_index(beta)

        report.sweep("covariance.right-comodule", f_basis, rho_coassoc, windowed=windowed)

        if f.algebra_coaction is not None:

            def actions_colinear(item):
                a, beta = item
                lhs = f.rho_vec(f.left_act(a, beta))
                rhs = FreeVector.zero()
                for pa, ca in f.algebra_coaction(a).terms.items():
                    _, a0, a1 = pa
                    for pf, cf in f.right_coaction(beta).terms.items():
                        _, f0, f1 = pf
                        rhs = rhs + f.left_act(a0, f0).tensor(h.algebra.mult(a1, f1)).scale(ca * cf)
                lhs2 = f.rho_vec(f.right_act(beta, a))
                rhs2 = FreeVector.zero()
                for pf, cf in f.right_coaction(beta).terms.items():
                    _, f0, f1 = pf
                    for pa, ca in f.algebra_coaction(a).terms.items():
                        _, a0, a1 = pa
                        rhs2 = rhs2 + f.right_act(f0, a0).tensor(h.algebra.mult(f1, a1)).scale(cf * ca)
                return lhs == rhs and lhs2 == rhs2, _w(a, beta)

            report.sweep(
                "covariance.actions-right",
                ((a, beta) for a in a_basis for beta in f_basis),
                actions_colinear,
                windowed=windowed,
            )

            def d_colinear(a):
                lhs = f.rho_vec(f.d(a))
                rhs = FreeVector.zero()
                for pa, ca in f.algebra_coaction(a).terms.items():
                    _, a0, a1 = pa
                    rhs = rhs + f.d(a0).tensor(E(a1)).scale(ca)
                return lhs == rhs, format_index(a)

            report.sweep("covariance.d-right-colinear", a_basis, d_colinear, windowed=windowed)

    if f.left_coaction is not None:
        h = f.hopf

        def lambda_comodule(beta):
            lhs = FreeVector.zero()
            rhs = FreeVector.zero()
            counit_part = FreeVector.zero()
            for pair_ix, c in f.left_coaction(beta).terms.items():
                _, hx, fx = pair_ix
                lhs = lhs + h.comul(hx).tensor(E(fx)).scale(c)
                rhs = rhs + E(hx).tensor(f.left_coaction(fx)).scale(c)
                counit_part = counit_part + E(fx).scale(c * h.counit(hx))
            lhs = lhs.map_indices(lambda ix: ("@3", ix[1][1], ix[1][2], ix[2]))
            rhs = rhs.map_indices(lambda ix: ("@3", ix[1], ix[2][1], ix[2][2]))
            return lhs == rhs and counit_part == E(beta), format_index(beta)

        report.sweep("covariance.left-comodule", f_basis, lambda_comodule, windowed=windowed)

        if f.algebra_left_coaction is not None:

            def actions_left_colinear(item):
                a, beta = item
                lhs = f.lambda_vec(f.left_act(a, beta))
                rhs = FreeVector.zero()
                for pa, ca in f.algebra_left_coaction(a).terms.items():
                    _, am1, a0 = pa
                    for pf, cf in f.left_coaction(beta).terms.items():
                        _, fm1, f0 = pf
                        rhs = rhs + h.algebra.mult(am1, fm1).tensor(f.left_act(a0, f0)).scale(ca * cf)
                lhs2 = f.lambda_vec(f.right_act(beta, a))
                rhs2 = FreeVector.zero()
                for pf, cf in f.left_coaction(beta).terms.items():
                    _, fm1, f0 = pf
                    for pa, ca in f.algebra_left_coaction(a).terms.items():
                        _, am1, a0 = pa
                        rhs2 = rhs2 + h.algebra.mult(fm1, am1).tensor(f.right_act(f0, a0)).scale(cf * ca)
                return lhs == rhs and lhs2 == rhs2, _w(a, beta)

            report.sweep(
                "covariance.actions-left",
                ((a, beta) for a in a_basis for beta in f_basis),
                actions_left_colinear,
                windowed=windowed,
            )

            def d_left_colinear(a):
                lhs = f.lambda_vec(f.d(a))
                rhs = FreeVector.zero()
                for pa, ca in f.algebra_left_coaction(a).terms.items():
                    _, am1, a0 = pa
                    rhs = rhs + E(am1).tensor(f.d(a0)).scale(ca)
                return lhs == rhs, format_index(a)

            report.sweep("covariance.d-left-colinear", a_basis, d_left_colinear, windowed=windowed)

    if f.bicovariant:

        def bicomodule(beta):
            lhs = FreeVector.zero()  # (lambda (x) id) rho
            for pair_ix, c in f.right_coaction(beta).terms.items():
                _, f0, f1 = pair_ix
                lhs = lhs + f.left_coaction(f0).tensor(E(f1)).scale(c)
            rhs = FreeVector.zero()  # (id (x) rho) lambda
            for pair_ix, c in f.left_coaction(beta).terms.items():
                _, fm1, f0 = pair_ix
                rhs = rhs + E(fm1).tensor(f.right_coaction(f0)).scale(c)
            lhs = lhs.map_indices(lambda ix: ("@3", ix[1][1], ix[1][2], ix[2]))
            rhs = rhs.map_indices(lambda ix: ("@3", ix[1], ix[2][1], ix[2][2]))
            return lhs == rhs, format_index(beta)

        report.sweep("covariance.bicomodule", f_basis, bicomodule, windowed=windowed)

    return report


# ---------------------------------------------------------------------------
# covariant calculus from an ideal in the augmentation ideal
# ---------------------------------------------------------------------------


@dataclass
class IdealCalculusSpec:
    hopf: HopfData
    ideal_gens: list


def parse_ideal_generators(text: str, index_fn=None) -> list:
    """One generator per line in the basis-combination grammar, e.g.
    ``1*0 - 1*1`` or ``(1/2 + 3*z4^1)*2``; blank lines and # comments skipped."""
    from hopfcalc.hopf import parse_basis_combination

    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(parse_basis_combination(line, index_fn))
    return out


def woronowicz_from_ideal(spec: IdealCalculusSpec) -> Fodc:
    """Right covariant calculus (H+/I) (x) H from a left ideal I in ker(eps).

    The left-ideal closure of the generators is computed, the quotient is
    taken exactly, and the left coaction is attached only when the
    adjoint-stability test passes; otherwise the result is tagged
    right-covariant-only.
    """
    h = spec.hopf
    if not h.algebra.basis.is_finite:
        raise ValueError("ideal construction needs a finite-dimensional Hopf algebra; "
                         "use the Laurent one-parameter calculus for k[t,t^-1]")
    alg = h.algebra
    basis = alg.basis.enumerate()
    one = CycScalar.one(alg.scalar_order)

    for g in spec.ideal_gens:
        eps = h.counit_vec(g)
        if not eps.is_zero():
            raise ValueError(f"ideal generator {g.to_text()} has nonzero counit {eps.to_text()}")

    ideal = Subspace()
    for g in spec.ideal_gens:
        ideal.add(g)
    changed = True
    while changed:
        changed = False
        for b_ix in basis:
            for row in list(ideal.basis()):
                if ideal.add(alg.mult_vec(E(b_ix), row)):
                    changed = True

    # the shifted basis elements e - eps(e) 1 span ker(eps); feeding them to
    # the quotient keeps representatives in the natural "element minus unit" form
    shifted = [E(ix) - alg.unit.scale(h.counit(ix)) for ix in basis]
    quotient = QuotientSpace([v for v in shifted if not v.is_zero()], ideal, cls_tag="cls")

    def reduce_to_class(v: FreeVector) -> FreeVector:
        """Extended quotient map: v - eps(v) 1, projected to classes."""
        shifted = v - alg.unit.scale(h.counit_vec(v))
        return quotient.project(shifted)

    dim_q = quotient.dim
    form_basis = [("w1", p, hx) for p in range(dim_q) for hx in basis]

    def d_ix(a_ix):
        out = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(a_ix, 2):
            cls = reduce_to_class(E(h1))
            for (_, p), cp in cls.terms.items():
                out = out + E(("w1", p, h2)).scale(c * cp)
        return out

    def left_act(a_ix, form_ix):
        _, p, hx = form_ix
        out = FreeVector.zero()
        for c, (a1, a2) in h.sweedler(a_ix, 2):
            moved = alg.mult_vec(E(a1), quotient.representatives[p])
            cls = quotient.project(moved)
            tail = alg.mult(a2, hx)
            for (_, pp), cp in cls.terms.items():
                for t_ix, ct in tail.terms.items():
                    out = out + E(("w1", pp, t_ix)).scale(c * cp * ct)
        return out

    def right_act(form_ix, a_ix):
        _, p, hx = form_ix
        return alg.mult(hx, a_ix).map_indices(lambda t: ("w1", p, t))

    def right_coaction(form_ix):
        _, p, hx = form_ix
        out = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(hx, 2):
            out = out + E(tensor_index(("w1", p, h1), h2)).scale(c)
        return out

    # adjoint stability of the ideal decides bicovariance
    ad_stable = True
    witness = None
    for row in ideal.basis():
        image = FreeVector.zero()
        for c, (v1, v2, v3) in h.sweedler_vec(row, 3):
            left = alg.mult_vec(E(v1), h.antipode(v3))
            image = image + left.tensor(E(v2)).scale(c)
        by_left: dict = {}
        for pair_ix, c in image.terms.items():
            _, lx, rx = pair_ix
            by_left.setdefault(lx, []).append((rx, c))
        for lx, entries in by_left.items():
            component = FreeVector({rx: c for rx, c in entries})
            if not ideal.contains(component):
                ad_stable = False
                witness = row
                break
        if not ad_stable:
            break

    left_coaction = None
    note = ""
    if ad_stable:

        def left_coaction(form_ix):
            _, p, hx = form_ix
            out = FreeVector.zero()
            for c, (g1, g2, g3) in h.sweedler_vec(quotient.representatives[p], 3):
                head = alg.mult_vec(E(g1), h.antipode(g3))
                cls = reduce_to_class(E(g2))
                for c2, (h1, h2) in h.sweedler(hx, 2):
                    lead = alg.mult_vec(head, E(h1))
                    for (_, pp), cp in cls.terms.items():
                        out = out + lead.tensor(E(("w1", pp, h2))).scale(c * c2 * cp)
            return out

    else:
        note = f"right-covariant-only: adjoint coaction leaves H (x) I at {witness.to_text()}"

    return Fodc(
        algebra=alg,
        forms=BasisFamily(indices=form_basis),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d"),
        hopf=h,
        right_coaction=right_coaction,
        left_coaction=left_coaction,
        algebra_coaction=h.comul,
        algebra_left_coaction=h.comul,
        name=f"woronowicz({alg.name})",
        covariance_note=note,
    )


# ---------------------------------------------------------------------------
# the one-parameter calculus on Laurent polynomials
# ---------------------------------------------------------------------------


def build_laurent_q_calculus(q: CycScalar, hopf: HopfData | None = None) -> Fodc:
    """Bicovariant calculus on k[t,t^-1]: dt t^n = q^n t^n dt, with the
    differential given by the scaled difference quotient."""
    if q.is_zero() or q.is_one() or (q == CycScalar.from_rational(-1)):
        raise ValueError("deformation parameter must be a root of unity of order >= 3")
    if multiplicative_order(q) is None:
        raise ValueError("deformation parameter must be a root of unity")
    from hopfcalc.hopf import build_laurent_hopf

    h = hopf or build_laurent_hopf(scalar_order=q.order)
    one = CycScalar.one(q.order)
    denom_inv = (q - one).inverse()

    def q_int(m: int) -> CycScalar:
        return (q ** m - one) * denom_inv

    def d_ix(a_ix):
        n = a_ix[1]
        c = q_int(n)
        return FreeVector({("dt", n - 1): c})

    def left_act(a_ix, f_ix):
        return E(("dt", a_ix[1] + f_ix[1]))

    def right_act(f_ix, a_ix):
        k = a_ix[1]
        return E(("dt", f_ix[1] + k), q ** k)

    def right_coaction(f_ix):
        n = f_ix[1]
        return E(tensor_index(("dt", n), ("t", n + 1)))

    def left_coaction(f_ix):
        n = f_ix[1]
        return E(tensor_index(("t", n + 1), ("dt", n)))

    return Fodc(
        algebra=h.algebra,
        forms=BasisFamily(window_fn=lambda w: [("dt", n) for n in range(-w, w + 1)]),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d"),
        hopf=h,
        right_coaction=right_coaction,
        left_coaction=left_coaction,
        algebra_coaction=h.comul,
        algebra_left_coaction=h.comul,
        name="laurent-q-calculus",
    )


# ---------------------------------------------------------------------------
# the universal first-order calculus
# ---------------------------------------------------------------------------


def universal_fodc(a: AlgebraPresentation, name: str = "") -> Fodc:
    """Kernel-of-multiplication calculus with d(a) = 1 (x) a - a (x) 1."""
    if not a.basis.is_finite:
        raise ValueError("universal calculus needs a finite-dimensional algebra")
    basis = a.basis.enumerate()
    pair_domain = [tensor_index(i, j) for i in basis for j in basis]
    mult_op = LinOp(lambda p: a.mult(p[1], p[2]), name="m")
    kernel, _ = kernel_image(mult_op, pair_domain)
    vectors = kernel.basis()
    labels = [("u1", i) for i in range(len(vectors))]
    table = dict(zip(labels, vectors))
    include = LinearSolver(LinOp(lambda ix: table[ix], name="incl"), labels)

    def express(v: FreeVector) -> FreeVector:
        sol = include.solve(v)
        if isinstance(sol, NoSolution):  # pragma: no cover - kernel is an ideal
            raise ValueError("universal form left the kernel of multiplication")
        return sol

    def left_act(a_ix, f_ix):
        moved = FreeVector.zero()
        for pair_ix, c in table[f_ix].terms.items():
            _, x, y = pair_ix
            moved = moved + a.mult(a_ix, x).tensor(E(y)).scale(c)
        return express(moved)

    def right_act(f_ix, a_ix):
        moved = FreeVector.zero()
        for pair_ix, c in table[f_ix].terms.items():
            _, x, y = pair_ix
            moved = moved + E(x).tensor(a.mult(y, a_ix)).scale(c)
        return express(moved)

    def d_ix(a_ix):
        value = a.unit.tensor(E(a_ix)) - E(a_ix).tensor(a.unit)
        return express(value)

    return Fodc(
        algebra=a,
        forms=BasisFamily(indices=labels),
        left_act=left_act,
        right_act=right_act,
        d=LinOp(d_ix, name="d_u"),
        name=name or f"universal({a.name})",
    )


# ---------------------------------------------------------------------------
# twisted module calculi
# ---------------------------------------------------------------------------


@dataclass
class TwistedCalculusAction:
    """The action of the Hopf algebra on 1-forms derived from presentations."""

    act: Callable[[Index, Index], FreeVector]

    def act_vec(self, hv: FreeVector, fv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for hx, ch in hv.terms.items():
            for fx, cf in fv.terms.items():
                out = out + self.act(hx, fx).scale(ch * cf)
        return out


def check_sigma_twisted_module_calculus(
    b_calc: Fodc,
    h: HopfData,
    m: Measure,
    s: Cocycle,
    window: int | None = None,
    action: TwistedCalculusAction | None = None,
) -> tuple[TwistedCalculusAction, CheckReport]:
    """Derive the form action h.(b d b') = (h1.b) d(h2.b'), prove it
    well-defined on the declared presentations, then verify the
    compatibility, equivariance and cocycle-vanishing laws together with
    the twisted-bimodule laws they imply.

    A well-definedness failure is an error carrying two conflicting
    presentations; everything else lands in the report.  A pre-built
    action may be supplied instead (used by the necessity analysis)."""
    report = CheckReport(example=b_calc.name or b_calc.algebra.name, suite="twisted-module-calculus")
    b = b_calc.algebra
    b_basis = b.basis.enumerate(window)
    h_basis = h.algebra.basis.enumerate(window)
    f_basis = b_calc.forms.enumerate(window)
    windowed = not (b.basis.is_finite and h.algebra.basis.is_finite and b_calc.forms.is_finite)

    def twisted_of_pair(h_ix, a_ix, b_ix):
        out = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(h_ix, 2):
            out = out + b_calc.left_act_vec(m.act(h1, a_ix), b_calc.d(m.act(h2, b_ix))).scale(c)
        return out

    if action is None:
        solver = PresentationSolver(b_calc, window)

        for kappa in solver.kernel().basis():
            for h_ix in h_basis:
                image = FreeVector.zero()
                for pr_ix, c in kappa.terms.items():
                    _, a_ix, b_ix = pr_ix
                    image = image + twisted_of_pair(h_ix, a_ix, b_ix).scale(c)
                if not image.is_zero():
                    raise ValueError(
                        "derived action is not well-defined: the vanishing presentation "
                        f"{kappa.to_text()} maps to {image.to_text()} under {format_index(h_ix)}"
                    )

        action_cache: dict = {}

        def act(h_ix, f_ix):
            got = action_cache.get((h_ix, f_ix))
            if got is None:
                pres = solver.solve(E(f_ix))
                if isinstance(pres, NoSolution):
                    raise ValueError(
                        f"form {format_index(f_ix)} has no presentation a d(a') on the window"
                    )
                got = FreeVector.zero()
                for pr_ix, c in pres.terms.items():
                    _, a_ix, b_ix = pr_ix
                    got = got + twisted_of_pair(h_ix, a_ix, b_ix).scale(c)
                action_cache[(h_ix, f_ix)] = got
            return got

        action = TwistedCalculusAction(act=act)

    def compatible(item):
        h_ix, a_ix, b_ix = item
        lhs = action.act_vec(E(h_ix), b_calc.left_act_vec(E(a_ix), b_calc.d(b_ix)))
        rhs = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(h_ix, 2):
            rhs = rhs + b_calc.left_act_vec(m.act(h1, a_ix), action.act_vec(E(h2), b_calc.d(b_ix))).scale(c)
        return lhs == rhs, _w(h_ix, a_ix, b_ix)

    report.sweep(
        "comp",
        ((hx, ax, bx) for hx in h_basis for ax in b_basis for bx in b_basis),
        compatible,
        windowed=windowed,
    )

    def equivariant(pair):
        h_ix, b_ix = pair
        lhs = b_calc.d(m.act(h_ix, b_ix))
        rhs = action.act_vec(E(h_ix), b_calc.d(b_ix))
        return lhs == rhs, _w(h_ix, b_ix)

    report.sweep(
        "H-lin", ((hx, bx) for hx in h_basis for bx in b_basis), equivariant, windowed=windowed
    )

    def d_sigma_zero(pair):
        h_ix, k_ix = pair
        value = b_calc.d(s.sigma(h_ix, k_ix))
        return value.is_zero(), _w(h_ix, k_ix, b_calc.d(s.sigma(h_ix, k_ix)))

    report.sweep(
        "dsigma", ((hx, kx) for hx in h_basis for kx in h_basis), d_sigma_zero, windowed=windowed
    )

    def d_sigma_inv_zero(pair):
        h_ix, k_ix = pair
        return b_calc.d(s.sigma_inv(h_ix, k_ix)).is_zero(), _w(h_ix, k_ix)

    report.sweep(
        "dsigma-inverse",
        ((hx, kx) for hx in h_basis for kx in h_basis),
        d_sigma_inv_zero,
        windowed=windowed,
    )

    def bimodule_unit(f_ix):
        return action.act_vec(h.algebra.unit, E(f_ix)) == E(f_ix), format_index(f_ix)

    report.sweep("twisted-bimodule.unit", f_basis, bimodule_unit, windowed=windowed)

    def bimodule_sandwich(item):
        h_ix, a_ix, f_ix, b_ix = item
        inner = b_calc.right_act_vec(b_calc.left_act(a_ix, f_ix), E(b_ix))
        lhs = action.act_vec(E(h_ix), inner)
        rhs = FreeVector.zero()
        for c, (h1, h2, h3) in h.sweedler(h_ix, 3):
            rhs = rhs + b_calc.right_act_vec(
                b_calc.left_act_vec(m.act(h1, a_ix), action.act(h2, f_ix)), m.act(h3, b_ix)
            ).scale(c)
        return lhs == rhs, _w(h_ix, a_ix, f_ix, b_ix)

    report.sweep(
        "twisted-bimodule.sandwich",
        ((hx, ax, fx, bx) for hx in h_basis for ax in b_basis for fx in f_basis for bx in b_basis),
        bimodule_sandwich,
        windowed=windowed,
    )

    def bimodule_twist(item):
        h_ix, k_ix, f_ix = item
        lhs = action.act_vec(E(h_ix), action.act(k_ix, f_ix))
        rhs = FreeVector.zero()
        for c1, (x1, x2, x3) in h.sweedler(h_ix, 3):
            for c2, (y1, y2, y3) in h.sweedler(k_ix, 3):
                middle = action.act_vec(h.algebra.mult(x2, y2), E(f_ix))
                rhs = rhs + b_calc.right_act_vec(
                    b_calc.left_act_vec(s.sigma(x1, y1), middle), s.sigma_inv(x3, y3)
                ).scale(c1 * c2)
        return lhs == rhs, _w(h_ix, k_ix, f_ix)

    report.sweep(
        "twisted-bimodule.twist",
        ((hx, kx, fx) for hx in h_basis for kx in h_basis for fx in f_basis),
        bimodule_twist,
        windowed=windowed,
    )
    return action, report


def sigma_forces_zero_differential(
    b: AlgebraPresentation,
    sigma_values,
    window: int,
    d_window: int | None = None,
    word_window: int | None = None,
) -> CheckReport:
    """Execute the forced-zero argument: in the free B-bimodule on formal
    differentials D_k of the basis, the Leibniz relations together with
    D(sigma value) = 0 put every D_k in the relation span, so any
    calculus with d of every cocycle value zero kills the whole base.

    The algebra unit must be a basis element.  All relation instances
    and their one-sided B-multiples that stay inside the word window are
    eliminated exactly; membership of each D_k is then decided by rank.
    """
    report = CheckReport(example=b.name, suite="forced-zero")
    d_window = d_window if d_window is not None else 2 * window
    word_window = word_window if word_window is not None else 2 * window
    if len(b.unit.terms) != 1 or not next(iter(b.unit.terms.values())).is_one():
        raise ValueError("forced-zero derivation needs a monomial unit")
    unit_ix = next(iter(b.unit.terms))

    d_basis = b.basis.enumerate(d_window)
    d_set = set(d_basis)
    word_basis = set(b.basis.enumerate(word_window))

    def word(i, k, j):
        return ("bw", i, k, j)

    def d_of_vector(v: FreeVector):
        """Formal differential of an algebra element, or None off-window."""
        out = FreeVector.zero()
        for ix, c in v.terms.items():
            if ix not in d_set:
                return None
            out = out + E(word(unit_ix, ix, unit_ix)).scale(c)
        return out

    def pad(rel: FreeVector, p, q):
        """e_p . rel . e_q expanded in words, or None if it leaves the window."""
        out = FreeVector.zero()
        for (_, i, k, j), c in rel.terms.items():
            left = b.mult(p, i)
            right = b.mult(j, q)
            for li, cl in left.terms.items():
                if li not in word_basis:
                    return None
                for rj, cr in right.terms.items():
                    if rj not in word_basis:
                        return None
                    out = out + E(word(li, k, rj)).scale(c * cl * cr)
        return out

    relations = []
    window_basis = b.basis.enumerate(window)
    for k1 in window_basis:
        for k2 in window_basis:
            product = b.mult(k1, k2)
            total = d_of_vector(product)
            if total is None:
                continue
            rel = total
            # subtract e_{k1} . D_{k2} and D_{k1} . e_{k2}
            rel = rel - E(word(k1, k2, unit_ix)) - E(word(unit_ix, k1, k2))
            relations.append(rel)
    for v in sigma_values:
        rel = d_of_vector(v)
        if rel is not None:
            relations.append(rel)

    span = Subspace()
    pads = b.basis.enumerate(window)
    for rel in relations:
        span.add(rel)
        for p in pads:
            padded = pad(rel, p, unit_ix)
            if padded is not None:
                span.add(padded)
            padded = pad(rel, unit_ix, p)
            if padded is not None:
                span.add(padded)
            for q in pads:
                padded = pad(rel, p, q)
                if padded is not None:
                    span.add(padded)

    def forced(k_ix):
        return span.contains(E(word(unit_ix, k_ix, unit_ix))), format_index(k_ix)

    report.sweep("sigma-forces-zero", window_basis, forced, windowed=True)
    return report
