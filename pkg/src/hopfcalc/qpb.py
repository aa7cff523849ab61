"""Quantum principal bundle structure of the crossed product calculus.

Vertical map and Atiyah exactness, the canonical strong connection,
covariant derivatives on associated bundles, the quantum tangent space
with its fundamental vector fields, and the bijection between
connections and connection 1-forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from hopfcalc.crossed_calc import CrossedFodc, GradedDc, hor, ver
from hopfcalc.fodc import Fodc
from hopfcalc.linalg import (
    FreeVector,
    LinearSolver,
    LinOp,
    NoSolution,
    QuotientSpace,
    Subspace,
    TrackedSpan,
    format_index,
    tensor_index,
)
from hopfcalc.report import CheckReport
from hopfcalc.scalars import CycScalar

Index = tuple
E = FreeVector.basis


def _w(*parts) -> str:
    return " ; ".join(
        p.to_text() if isinstance(p, FreeVector) else format_index(p) for p in parts
    )


@dataclass
class CoinvariantForms:
    """Left-coinvariant 1-forms of a bicovariant calculus, with the
    surjection from the augmentation ideal."""

    h_calc: Fodc
    labels: list[Index]
    vectors: dict[Index, FreeVector]
    span: TrackedSpan
    maurer_cartan: Callable[[FreeVector], FreeVector]
    report: CheckReport
    windowed: bool

    @property
    def dim(self) -> int:
        return len(self.labels)

    def lift(self, coeffs: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for label, c in coeffs.terms.items():
            out = out + self.vectors[label].scale(c)
        return out

    def express(self, form_vec: FreeVector):
        return self.span.express(form_vec)


def coinvariant_forms(h_calc: Fodc, window: int | None = None) -> CoinvariantForms:
    """Kernel of (lambda - unit (x) id) on the form window, plus the map
    h -> S(h_1) d(h_2), verified to land in it and to span it."""
    if h_calc.left_coaction is None:
        raise ValueError("coinvariant forms need a left coaction")
    h = h_calc.hopf
    report = CheckReport(example=h_calc.name, suite="coinvariant-forms")
    f_basis = h_calc.forms.enumerate(window)
    windowed = not h_calc.forms.is_finite
    unit_h = h.algebra.unit

    def defect(f_ix):
        return h_calc.left_coaction(f_ix) - unit_h.tensor(E(f_ix))

    solver = LinearSolver(LinOp(defect), f_basis)
    kernel = solver.kernel().basis()
    span = TrackedSpan()
    labels = []
    vectors = {}
    for i, vec in enumerate(kernel):
        label = ("coh", i)
        span.add(label, vec)
        labels.append(label)
        vectors[label] = vec

    def maurer_cartan(h_vec: FreeVector) -> FreeVector:
        value = FreeVector.zero()
        for c, (h1, h2) in h.sweedler_vec(h_vec, 2):
            value = value + h_calc.left_act_vec(h.antipode(h1), h_calc.d(h2)).scale(c)
        got = span.express(value)
        if isinstance(got, NoSolution):
            raise ValueError(f"Cartan-Maurer value left the coinvariants: {value.to_text()}")
        return got

    coinv = CoinvariantForms(
        h_calc=h_calc,
        labels=labels,
        vectors=vectors,
        span=span,
        maurer_cartan=maurer_cartan,
        report=report,
        windowed=windowed,
    )

    # the Cartan-Maurer form lands in the coinvariants and spans them
    h_basis = h.algebra.basis.enumerate(window)
    image = Subspace()
    mc_ok, mc_witness = True, None
    for ix in h_basis:
        shifted = E(ix) - h.algebra.unit.scale(h.counit(ix))
        if shifted.is_zero():
            continue
        try:
            got = maurer_cartan(shifted)
        except ValueError as err:
            mc_ok, mc_witness = False, str(err)
            break
        image.add(got)
    report.record("maurer-cartan.lands-coinvariant", mc_ok, witness=mc_witness, windowed=windowed)
    if mc_ok:
        report.record(
            "maurer-cartan.surjective",
            image.dim == len(labels),
            witness=f"image rank {image.dim} of {len(labels)}",
            windowed=windowed,
        )
    return coinv


@dataclass
class VerticalData:
    cf: CrossedFodc
    coinv: CoinvariantForms
    ver: Callable[[FreeVector], FreeVector]
    p: Callable[[FreeVector], FreeVector]
    g: Callable[[FreeVector], FreeVector]
    report: CheckReport

    def target_basis(self, window: int | None = None) -> list[Index]:
        pairs = self.cf.crossed.algebra.basis.enumerate(window)
        return [tensor_index(a, c) for a in pairs for c in self.coinv.labels]


def vertical_map(cf: CrossedFodc, window: int | None = None) -> VerticalData:
    """ver = p after the vertical projection; p and g are verified to be
    mutually inverse and ver to be left-linear and right colinear."""
    coinv = coinvariant_forms(cf.h_calc, window)
    h = cf.crossed.hopf
    report = CheckReport(example=cf.crossed.algebra.name, suite="vertical-map")
    windowed = not cf.crossed.algebra.basis.is_finite

    def p_vec(ver_vec: FreeVector) -> FreeVector:
        """b (x) gamma -> (b (x) gamma_-2) (x) [S(gamma_-1) gamma_0]."""
        out = FreeVector.zero()
        for form_ix, c in ver_vec.terms.items():
            _, bx, hf = form_ix
            for cl, (g_m2, g_m1, g0) in cf.h_calc.lambda_terms(hf, 2):
                moved = cf.h_calc.left_act_vec(h.antipode(g_m1), E(g0))
                coeffs = coinv.express(moved)
                if isinstance(coeffs, NoSolution):
                    raise ValueError(
                        f"vertical value not expressible over the coinvariant forms at {format_index(form_ix)}"
                    )
                for label, cc in coeffs.terms.items():
                    out = out + E(tensor_index(tensor_index(bx, g_m2), label)).scale(c * cl * cc)
        return out

    def ver_map(form_vec: FreeVector) -> FreeVector:
        vertical_part = FreeVector(
            {ix: c for ix, c in form_vec.terms.items() if ix[0] == "ver"}
        )
        return p_vec(vertical_part)

    def g_vec(target_vec: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for ix, c in target_vec.terms.items():
            _, pair_ix, label = ix
            _, bx, hx = pair_ix
            moved = cf.h_calc.left_act_vec(E(hx), coinv.vectors[label])
            out = out + ver(E(bx), moved).scale(c)
        return out

    vd = VerticalData(cf=cf, coinv=coinv, ver=ver_map, p=p_vec, g=g_vec, report=report)

    b_basis = cf.crossed.base.basis.enumerate(window)
    h_forms = cf.h_calc.forms.enumerate(window)

    def gp_identity(item):
        bx, hf = item
        v = ver(E(bx), E(hf))
        return g_vec(p_vec(v)) == v, _w(bx, hf)

    report.sweep(
        "vertical.g-after-p",
        ((bx, hf) for bx in b_basis for hf in h_forms),
        gp_identity,
        windowed=windowed,
    )

    a_basis = cf.crossed.algebra.basis.enumerate(window)

    def pg_identity(item):
        pair_ix, label = item
        v = E(tensor_index(pair_ix, label))
        return p_vec(g_vec(v)) == v, _w(pair_ix, label)

    report.sweep(
        "vertical.p-after-g",
        ((pair_ix, label) for pair_ix in a_basis for label in coinv.labels),
        pg_identity,
        windowed=windowed,
    )

    form_basis = cf.forms.enumerate(window)

    def left_linear(item):
        pair_ix, form_ix = item
        lhs = ver_map(cf.left_act(pair_ix, form_ix))
        rhs = FreeVector.zero()
        for ix, c in ver_map(E(form_ix)).terms.items():
            _, inner_pair, label = ix
            moved = cf.crossed.algebra.mult(pair_ix, inner_pair)
            for jx, cj in moved.terms.items():
                rhs = rhs + E(tensor_index(jx, label)).scale(c * cj)
        return lhs == rhs, _w(pair_ix, form_ix)

    report.sweep(
        "vertical.left-linear",
        ((pair_ix, form_ix) for pair_ix in a_basis for form_ix in form_basis),
        left_linear,
        windowed=windowed,
    )

    # right colinearity: the target carries the diagonal coaction
    coh_coaction = _coinvariant_coaction(cf, coinv, report, windowed)

    def colinear(form_ix):
        lhs = FreeVector.zero()  # (ver (x) id) rho'
        for pair, c in cf.right_coaction(form_ix).terms.items():
            _, f0, h1 = pair
            lhs = lhs + ver_map(E(f0)).tensor(E(h1)).scale(c)
        rhs = FreeVector.zero()  # diagonal coaction applied to ver
        for ix, c in ver_map(E(form_ix)).terms.items():
            _, pair_ix, label = ix
            _, bx, hx = pair_ix
            for c2, (h1, h2) in h.sweedler(hx, 2):
                for pair2, c3 in coh_coaction[label].terms.items():
                    _, lab, h3 = pair2
                    tail = h.algebra.mult(h2, h3)
                    for t_ix, ct in tail.terms.items():
                        rhs = rhs + E(
                            tensor_index(tensor_index(tensor_index(bx, h1), lab), t_ix)
                        ).scale(c * c2 * c3 * ct)
        return lhs.map_indices(_flatten_target) == rhs.map_indices(_flatten_target), format_index(form_ix)

    report.sweep("vertical.right-colinear", form_basis, colinear, windowed=windowed)
    return vd


def _flatten_target(ix):
    # ((pair (x) coh) (x) h) and (((pair) (x) coh) (x) h) to a flat triple
    if ix[0] == "@" and ix[1][0] == "@":
        return ("vt", ix[1][1], ix[1][2], ix[2])
    return ix


def _coinvariant_coaction(cf: CrossedFodc, coinv: CoinvariantForms, report: CheckReport, windowed: bool):
    """Right coaction restricted to the coinvariant forms, expressed over
    the coinvariant labels; records a check that they are stable."""
    table = {}
    ok, witness = True, None
    for label in coinv.labels:
        out = FreeVector.zero()
        for pair, c in cf.h_calc.rho_vec(coinv.vectors[label]).terms.items():
            _, f0, h1 = pair
            out = out + E(f0).tensor(E(h1)).scale(c)
        expressed = FreeVector.zero()
        stable = True
        by_h = {}
        for pair_ix, c in out.terms.items():
            _, f0, h1 = pair_ix
            by_h.setdefault(h1, []).append((f0, c))
        for h1, entries in by_h.items():
            component = FreeVector({f0: c for f0, c in entries})
            coeffs = coinv.express(component)
            if isinstance(coeffs, NoSolution):
                stable = False
                break
            for lab, cc in coeffs.terms.items():
                expressed = expressed + E(tensor_index(lab, h1)).scale(cc)
        if not stable:
            ok, witness = False, format_index(label)
            table[label] = FreeVector.zero()
        else:
            table[label] = expressed
    report.record("vertical.coinvariants-rho-stable", ok, witness=witness, windowed=windowed)
    return table


def check_atiyah_exact(
    vd: VerticalData,
    higher: GradedDc | None = None,
    h_graded: GradedDc | None = None,
    max_degree: int = 1,
    window: int | None = None,
) -> CheckReport:
    """Exactness of the vertical sequence: kernel of ver equals the
    horizontal forms and ver is surjective (through the section g); with
    graded data the same is done for the degree-n vertical maps."""
    cf = vd.cf
    report = CheckReport(example=cf.crossed.algebra.name, suite="atiyah")
    windowed = not cf.crossed.algebra.basis.is_finite
    form_basis = cf.forms.enumerate(window)

    solver = LinearSolver(LinOp(lambda ix: vd.ver(E(ix))), form_basis)
    kernel = solver.kernel()
    hor_indices = set(cf.horizontal_window(window))
    ker_in_hor, witness = True, None
    for vec in kernel.basis():
        if any(ix not in hor_indices and ix[0] != "hor" for ix in vec.support()):
            ker_in_hor, witness = False, vec.to_text()
            break
    report.record("atiyah.kernel-in-horizontal", ker_in_hor, witness=witness, windowed=windowed)
    hor_in_ker = all(vd.ver(E(ix)).is_zero() for ix in cf.horizontal_window(window))
    report.record("atiyah.horizontal-in-kernel", hor_in_ker, windowed=windowed)
    if not windowed:
        expected = len(cf.horizontal_window(None))
        report.record(
            "atiyah.kernel-rank",
            kernel.dim == expected,
            witness=f"kernel dim {kernel.dim}, horizontal dim {expected}",
        )

    target = vd.target_basis(window)

    def onto(ix):
        return vd.ver(vd.g(E(ix))) == E(ix), format_index(ix)

    report.sweep("atiyah.surjective-via-section", target, onto, windowed=windowed)

    if higher is not None and h_graded is not None:
        h = cf.crossed.hopf
        for degree in range(2, max_degree + 1):
            basis_n = higher.basis(degree, window)
            h_forms_n = h_graded.basis(degree, window)
            # left-coinvariant degree-n structure forms
            if h_forms_n:
                unit_h = h.algebra.unit

                def defect(ixf, degree=degree):
                    return h_graded.left_coaction(degree, ixf) - unit_h.tensor(E(ixf))

                coh_n = LinearSolver(LinOp(defect), h_forms_n).kernel()
            else:
                coh_n = Subspace()

            coh_vectors = coh_n.basis()
            coh_span = TrackedSpan()
            for i, vec in enumerate(coh_vectors):
                coh_span.add(("cohn", i), vec)

            def ver_n(gix, degree=degree):
                _, bdeg, bp, hp = gix
                if bdeg != 0:
                    return FreeVector.zero()
                out = FreeVector.zero()
                for c, (g_m2, g_m1, g0) in h_graded.lambda_terms(degree, hp, 2):
                    moved = h_graded.wedge_vec(
                        0, h.antipode(g_m1), degree, E(g0)
                    )
                    coeffs = coh_span.express(moved)
                    if isinstance(coeffs, NoSolution):
                        raise ValueError("higher vertical value not coinvariant")
                    for label, cc in coeffs.terms.items():
                        out = out + E(tensor_index(tensor_index(bp, g_m2), label)).scale(c * cc)
                return out

            if basis_n:
                solver_n = LinearSolver(LinOp(ver_n), basis_n)
                kernel_n = solver_n.kernel()
            else:
                kernel_n = Subspace()

            # horizontal part at degree n: Omega^1(B) wedge Omega^(n-1)
            wedge_span = Subspace()
            b_forms = vd.cf.b_calc.forms.enumerate(window)
            one_h = h.algebra.unit
            lower = higher.basis(degree - 1, window)
            for bf in b_forms:
                base_form = None
                for u_ix, cu in one_h.terms.items():
                    piece = E(("gf", 1, bf, u_ix)).scale(cu)
                    base_form = piece if base_form is None else base_form + piece
                for low in lower:
                    wedge_span.add(higher.wedge_vec(1, base_form, degree - 1, E(low)))

            ker_vs_wedge = kernel_n == wedge_span if not windowed else (
                all(wedge_span.contains(v) for v in kernel_n.basis())
                and all(kernel_n.contains(v) for v in wedge_span.basis())
            )
            report.record(
                f"atiyah.degree-{degree}.kernel-is-wedge",
                ker_vs_wedge,
                witness=f"kernel dim {kernel_n.dim}, wedge dim {wedge_span.dim}",
                windowed=windowed,
            )

            target_n = [
                tensor_index(a, ("cohn", i))
                for a in cf.crossed.algebra.basis.enumerate(window)
                for i in range(len(coh_vectors))
            ]

            def g_n(ix, degree=degree):
                _, pair_ix, label = ix
                _, bx, hx = pair_ix
                moved = h_graded.wedge_vec(0, E(hx), degree, coh_span.vectors[label])
                out = FreeVector.zero()
                for hp, ch in moved.terms.items():
                    out = out + E(("gf", 0, bx, hp)).scale(ch)
                return out

            def onto_n(ix):
                out = FreeVector.zero()
                for gixx, c in g_n(ix).terms.items():
                    out = out + ver_n(gixx).scale(c)
                return out == E(ix), format_index(ix)

            report.sweep(f"atiyah.degree-{degree}.surjective", target_n, onto_n, windowed=windowed)
    return report


@dataclass
class Connection:
    c: Callable[[FreeVector], FreeVector]
    name: str = "connection"


@dataclass
class ConnectionForm:
    coeffs: dict  # tangent label -> form vector in Omega^1(B # H)


def canonical_connection(vd: VerticalData, window: int | None = None) -> tuple[Connection, CheckReport]:
    """c(b (x) h (x) gamma) = b (x) h gamma, the section of ver through g;
    verified left-linear, right colinear, a splitting, and strong."""
    cf = vd.cf
    h = cf.crossed.hopf
    report = CheckReport(example=cf.crossed.algebra.name, suite="canonical-connection")
    windowed = not cf.crossed.algebra.basis.is_finite

    def c_map(target_vec: FreeVector) -> FreeVector:
        return vd.g(target_vec)

    connection = Connection(c=c_map, name="canonical")
    target = vd.target_basis(window)
    a_basis = cf.crossed.algebra.basis.enumerate(window)

    def splitting(ix):
        return vd.ver(c_map(E(ix))) == E(ix), format_index(ix)

    report.sweep("connection.splits-ver", target, splitting, windowed=windowed)

    def left_linear(item):
        pair_ix, t_ix = item
        _, inner_pair, label = t_ix
        moved = FreeVector.zero()
        for jx, cj in cf.crossed.algebra.mult(pair_ix, inner_pair).terms.items():
            moved = moved + E(tensor_index(jx, label)).scale(cj)
        lhs = c_map(moved)
        rhs = cf.left_act_vec(E(pair_ix), c_map(E(t_ix)))
        return lhs == rhs, _w(pair_ix, t_ix)

    report.sweep(
        "connection.left-linear",
        ((p, t) for p in a_basis for t in target),
        left_linear,
        windowed=windowed,
    )

    coh_coaction = _coinvariant_coaction(cf, vd.coinv, report, windowed)

    def colinear(t_ix):
        _, pair_ix, label = t_ix
        _, bx, hx = pair_ix
        lhs = cf.rho_vec(c_map(E(t_ix))).map_indices(lambda ix: ("vt2", ix[1], ix[2]))
        rhs = FreeVector.zero()
        for c2, (h1, h2) in h.sweedler(hx, 2):
            for pair2, c3 in coh_coaction[label].terms.items():
                _, lab, h3 = pair2
                inner = c_map(E(tensor_index(tensor_index(bx, h1), lab)))
                for t_ix2, ct in h.algebra.mult(h2, h3).terms.items():
                    for f_ix, cfm in inner.terms.items():
                        rhs = rhs + E(("vt2", f_ix, t_ix2)).scale(c2 * c3 * ct * cfm)
        return lhs == rhs, format_index(t_ix)

    report.sweep("connection.right-colinear", target, colinear, windowed=windowed)

    b_basis = cf.crossed.base.basis.enumerate(window)
    h_basis = h.algebra.basis.enumerate(window)

    def strong(item):
        bx, hx = item
        d_val = cf.d(tensor_index(bx, hx))
        got = d_val - c_map(vd.ver(d_val))
        expected = hor(cf.b_calc.d(bx), E(hx))
        return got == expected, _w(bx, hx)

    report.sweep(
        "connection.strong",
        ((bx, hx) for bx in b_basis for hx in h_basis),
        strong,
        windowed=windowed,
    )
    return connection, report


def check_connection(vd: VerticalData, connection: Connection, window: int | None = None) -> CheckReport:
    """A supplied connection: splitting, left-linearity and colinearity;
    also the induced idempotent with horizontal kernel."""
    cf = vd.cf
    h = cf.crossed.hopf
    report = CheckReport(example=cf.crossed.algebra.name, suite="connection-check")
    windowed = not cf.crossed.algebra.basis.is_finite
    target = vd.target_basis(window)
    a_basis = cf.crossed.algebra.basis.enumerate(window)

    report.sweep(
        "connection.splits-ver",
        target,
        lambda ix: (vd.ver(connection.c(E(ix))) == E(ix), format_index(ix)),
        windowed=windowed,
    )

    def left_linear(item):
        pair_ix, t_ix = item
        _, inner_pair, label = t_ix
        moved = FreeVector.zero()
        for jx, cj in cf.crossed.algebra.mult(pair_ix, inner_pair).terms.items():
            moved = moved + E(tensor_index(jx, label)).scale(cj)
        lhs = connection.c(moved)
        rhs = cf.left_act_vec(E(pair_ix), connection.c(E(t_ix)))
        return lhs == rhs, _w(pair_ix, t_ix)

    report.sweep(
        "connection.left-linear",
        ((p, t) for p in a_basis for t in target),
        left_linear,
        windowed=windowed,
    )

    form_basis = cf.forms.enumerate(window)

    def projector(form_ix):
        v = vd.ver(E(form_ix))
        pi = connection.c(v)
        idempotent = connection.c(vd.ver(pi)) == pi
        horizontal_killed = pi.is_zero() if v.is_zero() else True
        return idempotent and horizontal_killed, format_index(form_ix)

    report.sweep("connection.projector", form_basis, projector, windowed=windowed)

    if not windowed:
        solver = LinearSolver(
            LinOp(lambda ix: connection.c(vd.ver(E(ix)))), form_basis
        )
        hor_dim = len(cf.horizontal_window(window))
        report.record(
            "connection.projector-kernel-rank",
            solver.kernel().dim == hor_dim,
            witness=f"kernel dim {solver.kernel().dim}, horizontal dim {hor_dim}",
        )
    return report


# ---------------------------------------------------------------------------
# associated bundles
# ---------------------------------------------------------------------------


@dataclass
class VComodule:
    labels: list[Index]
    coaction: Callable[[Index], FreeVector]  # v -> v (x) H pairs


@dataclass
class CovariantDerivativeData:
    e_labels: list[Index]
    e_vectors: dict
    nabla: Callable[[Index], FreeVector]     # E label -> balanced classes
    sigma_e: Callable[[Index, Index], FreeVector]
    balanced: QuotientSpace
    report: CheckReport


def covariant_derivative(vd: VerticalData, v_comodule: VComodule, window: int | None = None) -> CovariantDerivativeData:
    """Associated bundle E = (A (x) V)^coH with its covariant derivative
    d_B on the base leg and the bimodule braiding through the measure."""
    cf = vd.cf
    cp = cf.crossed
    h = cp.hopf
    if not cp.algebra.basis.is_finite:
        raise ValueError("associated bundles are computed for finite-dimensional total algebras")
    report = CheckReport(example=cp.algebra.name, suite="covariant-derivative")
    a_basis = cp.algebra.basis.enumerate()
    pair_v = [tensor_index(a, v) for a in a_basis for v in v_comodule.labels]

    def coaction_defect(ix):
        _, pair_ix, v_ix = ix
        _, bx, hx = pair_ix
        out = FreeVector.zero()
        for c1, (h1, h2) in h.sweedler(hx, 2):
            for pv, c2 in v_comodule.coaction(v_ix).terms.items():
                _, v0, v1 = pv
                tail = h.algebra.mult(h2, v1)
                for t_ix, ct in tail.terms.items():
                    out = out + E(("e", bx, h1, v0, t_ix)).scale(c1 * c2 * ct)
        out = out - E(("e", bx, hx, v_ix, _unit_index(h)))
        return out

    kernel = LinearSolver(LinOp(coaction_defect), pair_v).kernel()
    e_vectors_list = kernel.basis()
    e_labels = [("ebas", i) for i in range(len(e_vectors_list))]
    e_vectors = dict(zip(e_labels, e_vectors_list))
    e_span = TrackedSpan()
    for label, vec in e_vectors.items():
        e_span.add(label, vec)

    # left and right B-actions on E
    def b_act_left(b_ix, e_label):
        out = FreeVector.zero()
        for ix, c in e_vectors[e_label].terms.items():
            _, pair_ix, v_ix = ix
            moved = cp.algebra.mult_vec(E(b_ix).tensor(h.algebra.unit), E(pair_ix))
            for jx, cj in moved.terms.items():
                out = out + E(tensor_index(jx, v_ix)).scale(c * cj)
        got = e_span.express(out)
        if isinstance(got, NoSolution):
            raise ValueError("coinvariants not closed under the left base action")
        return got

    def b_act_right(e_label, b_ix):
        out = FreeVector.zero()
        for ix, c in e_vectors[e_label].terms.items():
            _, pair_ix, v_ix = ix
            moved = cp.algebra.mult_vec(E(pair_ix), E(b_ix).tensor(h.algebra.unit))
            for jx, cj in moved.terms.items():
                out = out + E(tensor_index(jx, v_ix)).scale(c * cj)
        got = e_span.express(out)
        if isinstance(got, NoSolution):
            raise ValueError("coinvariants not closed under the right base action")
        return got

    # balanced tensor Omega^1(B) (x)_B E
    b_forms = cf.b_calc.forms.enumerate()
    b_basis = cp.base.basis.enumerate()
    big = [E(tensor_index(bf, el)) for bf in b_forms for el in e_labels]
    relations = Subspace()
    for bf in b_forms:
        for bx in b_basis:
            moved_form = cf.b_calc.right_act(bf, bx)
            for el in e_labels:
                left = FreeVector.zero()
                for f2, c2 in moved_form.terms.items():
                    left = left + E(tensor_index(f2, el)).scale(c2)
                right = FreeVector.zero()
                for el2, c2 in b_act_left(bx, el).terms.items():
                    right = right + E(tensor_index(bf, el2)).scale(c2)
                relations.add(left - right)
    balanced = QuotientSpace(big, relations, cls_tag="bcls")

    def to_balanced(form_vec: FreeVector, e_coeffs: FreeVector) -> FreeVector:
        raw = FreeVector.zero()
        for f_ix, cfm in form_vec.terms.items():
            for el, ce in e_coeffs.terms.items():
                raw = raw + E(tensor_index(f_ix, el)).scale(cfm * ce)
        return balanced.project(raw)

    def nabla(e_label):
        out = FreeVector.zero()
        for ix, c in e_vectors[e_label].terms.items():
            _, pair_ix, v_ix = ix
            _, bx, hx = pair_ix
            section = e_span.express(E(tensor_index(tensor_index(_unit_b_index(cp), hx), v_ix)))
            if isinstance(section, NoSolution):
                raise ValueError(
                    "associated bundle is not spanned by unit-based coinvariants; "
                    f"cannot split {format_index(ix)}"
                )
            out = out + to_balanced(cf.b_calc.d(bx), section).scale(c)
        return out

    def sigma_e(e_label, b_form_ix):
        out = FreeVector.zero()
        for ix, c in e_vectors[e_label].terms.items():
            _, pair_ix, v_ix = ix
            _, bx, hx = pair_ix
            for c1, (h1, h2) in h.sweedler(hx, 2):
                acted = cf.b_action.act(h1, b_form_ix)
                form_part = cf.b_calc.left_act_vec(E(bx), acted)
                section = e_span.express(E(tensor_index(tensor_index(_unit_b_index(cp), h2), v_ix)))
                if isinstance(section, NoSolution):
                    raise ValueError("associated bundle is not spanned by unit-based coinvariants")
                out = out + to_balanced(form_part, section).scale(c * c1)
        return out

    data = CovariantDerivativeData(
        e_labels=e_labels,
        e_vectors=e_vectors,
        nabla=nabla,
        sigma_e=sigma_e,
        balanced=balanced,
        report=report,
    )

    def balanced_left_act(b_ix, cls_vec: FreeVector) -> FreeVector:
        raw = balanced.lift(cls_vec)
        out = FreeVector.zero()
        for ix, c in raw.terms.items():
            _, f_ix, el = ix
            moved = cf.b_calc.left_act(b_ix, f_ix)
            for f2, c2 in moved.terms.items():
                out = out + E(tensor_index(f2, el)).scale(c * c2)
        return balanced.project(out)

    def balanced_right_act(cls_vec: FreeVector, b_ix) -> FreeVector:
        raw = balanced.lift(cls_vec)
        out = FreeVector.zero()
        for ix, c in raw.terms.items():
            _, f_ix, el = ix
            for el2, c2 in b_act_right(el, b_ix).terms.items():
                out = out + E(tensor_index(f_ix, el2)).scale(c * c2)
        return balanced.project(out)

    def nabla_vec(coeffs: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for el, c in coeffs.terms.items():
            out = out + nabla(el).scale(c)
        return out

    def left_leibniz(item):
        b_ix, e_label = item
        lhs = nabla_vec(b_act_left(b_ix, e_label))
        rhs = to_balanced(cf.b_calc.d(b_ix), E(e_label)) + balanced_left_act(b_ix, nabla(e_label))
        return lhs == rhs, _w(b_ix, e_label)

    report.sweep(
        "derivative.left-leibniz",
        ((bx, el) for bx in b_basis for el in e_labels),
        left_leibniz,
    )

    def right_leibniz(item):
        e_label, b_ix = item
        lhs = nabla_vec(b_act_right(e_label, b_ix))
        sigma_part = FreeVector.zero()
        for f_ix, c in cf.b_calc.d(b_ix).terms.items():
            sigma_part = sigma_part + sigma_e(e_label, f_ix).scale(c)
        rhs = sigma_part + balanced_right_act(nabla(e_label), b_ix)
        return lhs == rhs, _w(e_label, b_ix)

    report.sweep(
        "derivative.right-leibniz",
        ((el, bx) for el in e_labels for bx in b_basis),
        right_leibniz,
    )

    def sigma_bimodule(item):
        b_ix, e_label, f_ix = item
        lhs = balanced_left_act(b_ix, sigma_e(e_label, f_ix))
        rhs = FreeVector.zero()
        for el2, c2 in b_act_left(b_ix, e_label).terms.items():
            rhs = rhs + sigma_e(el2, f_ix).scale(c2)
        ok1 = lhs == rhs
        lhs2 = balanced_right_act(sigma_e(e_label, f_ix), b_ix)
        rhs2 = FreeVector.zero()
        for f2, c2 in cf.b_calc.right_act(f_ix, b_ix).terms.items():
            rhs2 = rhs2 + sigma_e(e_label, f2).scale(c2)
        ok2 = lhs2 == rhs2
        return ok1 and ok2, _w(b_ix, e_label, f_ix)

    report.sweep(
        "derivative.sigma-bimodule",
        ((bx, el, fx) for bx in b_basis for el in e_labels for fx in b_forms),
        sigma_bimodule,
    )

    def sigma_balance(item):
        e_label, b_ix, f_ix = item
        lhs = FreeVector.zero()
        for el2, c2 in b_act_right(e_label, b_ix).terms.items():
            lhs = lhs + sigma_e(el2, f_ix).scale(c2)
        rhs = FreeVector.zero()
        for f2, c2 in cf.b_calc.left_act(b_ix, f_ix).terms.items():
            rhs = rhs + sigma_e(e_label, f2).scale(c2)
        return lhs == rhs, _w(e_label, b_ix, f_ix)

    report.sweep(
        "derivative.sigma-balanced",
        ((el, bx, fx) for el in e_labels for bx in b_basis for fx in b_forms),
        sigma_balance,
    )

    # uniqueness: sigma rebuilt from the right Leibniz law matches the formula
    def sigma_unique(item):
        e_label, b_ix = item
        rebuilt = nabla_vec(b_act_right(e_label, b_ix)) - balanced_right_act(nabla(e_label), b_ix)
        direct = FreeVector.zero()
        for f_ix, c in cf.b_calc.d(b_ix).terms.items():
            direct = direct + sigma_e(e_label, f_ix).scale(c)
        return rebuilt == direct, _w(e_label, b_ix)

    report.sweep(
        "derivative.sigma-unique",
        ((el, bx) for el in e_labels for bx in b_basis),
        sigma_unique,
    )

    # the connection route gives the same derivative
    def via_connection(e_label):
        out = FreeVector.zero()
        for ix, c in e_vectors[e_label].terms.items():
            _, pair_ix, v_ix = ix
            d_val = cf.d(pair_ix)
            horizontal = d_val - vd.g(vd.ver(d_val))
            for f_ix, cfm in horizontal.terms.items():
                if f_ix[0] != "hor":
                    return None, format_index(e_label)
                _, bf, hx = f_ix
                section = e_span.express(E(tensor_index(tensor_index(_unit_b_index(cp), hx), v_ix)))
                if isinstance(section, NoSolution):
                    return None, format_index(e_label)
                out = out + to_balanced(E(bf), section).scale(c * cfm)
        return out, None

    def connection_route(e_label):
        got, witness = via_connection(e_label)
        if got is None:
            return False, witness
        return got == nabla(e_label), format_index(e_label)

    report.sweep("derivative.via-connection", e_labels, connection_route)
    return data


def _unit_index(h) -> Index:
    terms = list(h.algebra.unit.terms)
    if len(terms) != 1:
        raise ValueError("structure Hopf algebra needs a monomial unit")
    return terms[0]


def _unit_b_index(cp) -> Index:
    terms = list(cp.base.unit.terms)
    if len(terms) != 1:
        raise ValueError("base algebra needs a monomial unit")
    return terms[0]


# ---------------------------------------------------------------------------
# tangent space, fundamental fields, connection forms
# ---------------------------------------------------------------------------


@dataclass
class TangentSpace:
    labels: list[Index]             # ("tan", i), dual to the coinvariant labels
    coinv: CoinvariantForms
    coaction: dict                  # tangent label -> vector over (tan (x) H) pairs
    report: CheckReport

    def pair(self, tan_label: Index, coh_label: Index) -> CycScalar:
        return (
            CycScalar.one()
            if tan_label[1] == coh_label[1]
            else CycScalar.zero()
        )

    def evaluate(self, tan_label: Index, coeffs: FreeVector) -> CycScalar:
        total = CycScalar.zero()
        for label, c in coeffs.terms.items():
            total = total + self.pair(tan_label, label) * c
        return total


def tangent_and_fields(vd: VerticalData, window: int | None = None):
    """Dual basis of the coinvariant forms with its induced coaction, and
    the fundamental vector fields; returns (TangentSpace, fields, report)."""
    cf = vd.cf
    h = cf.crossed.hopf
    coinv = vd.coinv
    if coinv.windowed:
        if window is None:
            raise ValueError("windowed coinvariant forms need a window")
        # refuse when the coinvariant space is still growing with the window:
        # the dual basis only makes sense in finite dimension
        probe = coinvariant_forms(coinv.h_calc, window + 1)
        if probe.dim != coinv.dim:
            raise ValueError(
                "coinvariant forms grow with the window "
                f"({coinv.dim} -> {probe.dim}); tangent space refused"
            )
    report = CheckReport(example=cf.crossed.algebra.name, suite="tangent-space")
    windowed = not cf.crossed.algebra.basis.is_finite
    labels = [("tan", i) for i in range(coinv.dim)]

    coaction_raw = _coinvariant_coaction(cf, coinv, report, windowed)
    # matrix M with rho(x^i) = sum_k x^k (x) M[i][k]
    matrix = {}
    for label in coinv.labels:
        row = {}
        for pair_ix, c in coaction_raw[label].terms.items():
            _, lab, h_ix = pair_ix
            row.setdefault(lab, FreeVector.zero())
            row[lab] = row[lab] + E(h_ix).scale(c)
        matrix[label] = row

    tangent_coaction = {}
    for j, tan in enumerate(labels):
        out = FreeVector.zero()
        for i, coh in enumerate(coinv.labels):
            entry = matrix[coh].get(("coh", j))
            if entry is None:
                continue
            for h_ix, c in h.antipode_inv(entry).terms.items():
                out = out + E(tensor_index(("tan", i), h_ix)).scale(c)
        tangent_coaction[tan] = out

    tangent = TangentSpace(labels=labels, coinv=coinv, coaction=tangent_coaction, report=report)

    def dual_pairing(item):
        tan, coh = item
        want = CycScalar.one() if tan[1] == coh[1] else CycScalar.zero()
        return tangent.pair(tan, coh) == want, _w(tan, coh)

    report.sweep(
        "tangent.dual-pairing",
        ((t, c) for t in labels for c in coinv.labels),
        dual_pairing,
    )

    def coaction_defining_equation(item):
        tan, coh = item
        # alpha_0(gamma) alpha_1 == alpha(gamma_0) S^-1(gamma_1)
        lhs = FreeVector.zero()
        for pair_ix, c in tangent_coaction[tan].terms.items():
            _, tan0, h_ix = pair_ix
            lhs = lhs + E(h_ix).scale(c * tangent.pair(tan0, coh))
        rhs = FreeVector.zero()
        for pair_ix, c in coaction_raw[coh].terms.items():
            _, lab, h_ix = pair_ix
            rhs = rhs + h.antipode_inv(h_ix).scale(c * tangent.pair(tan, lab))
        return lhs == rhs, _w(tan, coh)

    report.sweep(
        "tangent.coaction-defining-equation",
        ((t, c) for t in labels for c in coinv.labels),
        coaction_defining_equation,
        windowed=windowed,
    )

    def field(tan_label):
        def apply(form_vec: FreeVector) -> FreeVector:
            out = FreeVector.zero()
            for ix, c in vd.ver(form_vec).terms.items():
                _, pair_ix, label = ix
                out = out + E(pair_ix).scale(c * tangent.pair(tan_label, label))
            return out

        return apply

    fields = {tan: field(tan) for tan in labels}

    hor_basis = cf.horizontal_window(window)

    def vanishes_horizontally(item):
        tan, hor_ix = item
        return fields[tan](E(hor_ix)).is_zero(), _w(tan, hor_ix)

    report.sweep(
        "field.vertical",
        ((t, hx) for t in labels for hx in hor_basis),
        vanishes_horizontally,
        windowed=windowed,
    )

    unit_pair = tensor_index(_unit_b_index(cf.crossed), _unit_index(h))

    def normalization(item):
        tan, coh = item
        lifted = ver(cf.crossed.base.unit, coinv.lift(E(coh)))
        got = fields[tan](lifted)
        want = E(unit_pair).scale(tangent.pair(tan, coh))
        return got == want, _w(tan, coh)

    report.sweep(
        "field.normalization",
        ((t, c) for t in labels for c in coinv.labels),
        normalization,
    )

    a_basis = cf.crossed.algebra.basis.enumerate(window)
    form_basis = cf.forms.enumerate(window)

    def left_linear(item):
        tan, pair_ix, form_ix = item
        lhs = fields[tan](cf.left_act(pair_ix, form_ix))
        rhs = cf.crossed.algebra.mult_vec(E(pair_ix), fields[tan](E(form_ix)))
        return lhs == rhs, _w(tan, pair_ix, form_ix)

    report.sweep(
        "field.left-linear",
        ((t, p, f) for t in labels for p in a_basis for f in form_basis),
        left_linear,
        windowed=windowed,
    )

    # uniqueness: reconstruct the field from left-linearity and the
    # normalization through the vertical decomposition
    def unique(item):
        tan, form_ix = item
        direct = fields[tan](E(form_ix))
        rebuilt = FreeVector.zero()
        for ix, c in vd.ver(E(form_ix)).terms.items():
            _, pair_ix, label = ix
            rebuilt = rebuilt + E(pair_ix).scale(c * tangent.pair(tan, label))
        return direct == rebuilt, _w(tan, form_ix)

    report.sweep(
        "field.unique",
        ((t, f) for t in labels for f in form_basis),
        unique,
        windowed=windowed,
    )
    return tangent, fields, report


def connection_form_bijection(
    vd: VerticalData,
    tangent: TangentSpace,
    connection: Connection | None = None,
    form: ConnectionForm | None = None,
    window: int | None = None,
):
    """Translate between connections and connection 1-forms and verify the
    defining property of the output and both round trips.

    Exactly one of connection / form must be given; returns
    (other, report)."""
    if (connection is None) == (form is None):
        raise ValueError("give exactly one of connection / form")
    cf = vd.cf
    h = cf.crossed.hopf
    report = CheckReport(example=cf.crossed.algebra.name, suite="connection-form-bijection")
    windowed = not cf.crossed.algebra.basis.is_finite
    unit_pair = tensor_index(_unit_b_index(cf.crossed), _unit_index(h))

    def to_form(c_map) -> ConnectionForm:
        coeffs = {}
        for i, tan in enumerate(tangent.labels):
            coeffs[tan] = c_map(E(tensor_index(unit_pair, ("coh", i))))
        return ConnectionForm(coeffs=coeffs)

    def to_connection(phi: ConnectionForm) -> Connection:
        def c_map(target_vec: FreeVector) -> FreeVector:
            out = FreeVector.zero()
            for ix, c in target_vec.terms.items():
                _, pair_ix, label = ix
                for tan in tangent.labels:
                    weight = tangent.pair(tan, label)
                    if weight.is_zero():
                        continue
                    out = out + cf.left_act_vec(E(pair_ix), phi.coeffs[tan]).scale(c * weight)
            return out

        return Connection(c=c_map, name="from-form")

    def verify_form(phi: ConnectionForm, tag: str):
        def ver_projection(tan):
            got = FreeVector.zero()
            for ix, c in phi.coeffs[tan].terms.items():
                if ix[0] == "ver":
                    got = got + E(ix).scale(c)
            want = ver(cf.crossed.base.unit, vd.coinv.lift(E(("coh", tan[1]))))
            return got == want, format_index(tan)

        report.sweep(f"{tag}.vertical-projection", tangent.labels, ver_projection)

        # coinvariance: sum_j x_j0 (x) phi_j0 (x) x_j1 phi_j1 equals
        # sum_j x_j (x) phi_j (x) 1; the tangent leg mixes components,
        # so both sides are assembled in full
        lhs_total = FreeVector.zero()
        for tan in tangent.labels:
            for pair_ix, c in tangent.coaction[tan].terms.items():
                _, tan0, h1 = pair_ix
                for pf, c2 in cf.rho_vec(phi.coeffs[tan]).terms.items():
                    _, f0, h2 = pf
                    for t_ix, ct in h.algebra.mult(h1, h2).terms.items():
                        lhs_total = lhs_total + E(("cfw", tan0, f0, t_ix)).scale(c * c2 * ct)
        rhs_total = FreeVector.zero()
        unit_ix = _unit_index(h)
        for tan in tangent.labels:
            for f_ix, c in phi.coeffs[tan].terms.items():
                rhs_total = rhs_total + E(("cfw", tan, f_ix, unit_ix)).scale(c)
        report.record(f"{tag}.coinvariant", lhs_total == rhs_total, windowed=windowed)

    if connection is not None:
        check = check_connection(vd, connection, window)
        if not check.ok:
            failed = check.failed[0]
            raise ValueError(
                f"input connection fails {failed.identity} at {failed.witness}"
            )
        report.extend(check, prefix="input.")
        phi = to_form(connection.c)
        verify_form(phi, "output-form")
        back = to_connection(phi)
        target = vd.target_basis(window)

        def roundtrip(ix):
            return back.c(E(ix)) == connection.c(E(ix)), format_index(ix)

        report.sweep("roundtrip.connection", target, roundtrip, windowed=windowed)
        return phi, report

    verify_form(form, "input-form")
    if not report.ok:
        failed = report.failed[0]
        raise ValueError(f"input form fails {failed.identity} at {failed.witness}")
    back = to_connection(form)
    check = check_connection(vd, back, window)
    report.extend(check, prefix="output.")
    phi2 = to_form(back.c)

    def roundtrip_form(tan):
        return phi2.coeffs[tan] == form.coeffs[tan], format_index(tan)

    report.sweep("roundtrip.form", tangent.labels, roundtrip_form)
    return back, report
