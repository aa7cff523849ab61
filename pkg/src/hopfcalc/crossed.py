"""Measures, 2-cocycles, crossed products, cleft data and the Galois map.

The crossed product multiplication, the twisted-module and cocycle laws
and the cleft correspondence are implemented directly from their
defining identities; nothing is taken on faith, every construction is
re-verified by the checkers in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from hopfcalc.hopf import (
    AlgebraPresentation,
    BasisFamily,
    CoalgebraData,
    CoinvariantFamily,
    ComoduleAlgebra,
    HopfData,
    NotInvertible,
    convolution_inverse,
    tensor_square_coalgebra,
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

Index = tuple


@dataclass
class Measure:
    act: Callable[[Index, Index], FreeVector]  # (H-basis, B-basis) -> B

    def act_vec(self, hv: FreeVector, bv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for hi, ch in hv.terms.items():
            for bi, cb in bv.terms.items():
                out = out + self.act(hi, bi).scale(ch * cb)
        return out


@dataclass
class Cocycle:
    sigma: Callable[[Index, Index], FreeVector]  # (H, H) -> B
    sigma_inv: Callable[[Index, Index], FreeVector]

    def sigma_vec(self, hv: FreeVector, kv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for hi, ch in hv.terms.items():
            for ki, ck in kv.terms.items():
                out = out + self.sigma(hi, ki).scale(ch * ck)
        return out

    def sigma_inv_vec(self, hv: FreeVector, kv: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for hi, ch in hv.terms.items():
            for ki, ck in kv.terms.items():
                out = out + self.sigma_inv(hi, ki).scale(ch * ck)
        return out


def trivial_cocycle(b: AlgebraPresentation, h: HopfData) -> Cocycle:
    def sigma(hi, ki):
        return b.unit.scale(h.counit(hi) * h.counit(ki))

    return Cocycle(sigma=sigma, sigma_inv=sigma)


def cocycle_from_sigma(sigma, b: AlgebraPresentation, h: HopfData, window: int | None = None) -> Cocycle:
    """Complete a 2-cocycle by computing its convolution inverse on H (x) H."""
    sq = tensor_square_coalgebra(h)
    h_basis = h.algebra.basis.enumerate(window)
    c_basis = [tensor_index(i, j) for i in h_basis for j in h_basis]
    f = LinOp(lambda pair: sigma(pair[1], pair[2]), name="sigma")
    g = convolution_inverse(f, sq, c_basis, b, window=window)
    if isinstance(g, NotInvertible):
        raise ValueError(f"cocycle is not convolution invertible at {g.element}")
    return Cocycle(sigma=sigma, sigma_inv=lambda i, j: g(tensor_index(i, j)))


def _pair_witness(*elements) -> str:
    return " ; ".join(
        e.to_text() if isinstance(e, FreeVector) else format_index(e) for e in elements
    )


def check_twisted_module_algebra(
    b: AlgebraPresentation,
    h: HopfData,
    m: Measure,
    s: Cocycle,
    window: int | None = None,
) -> CheckReport:
    """Verify the measure axioms, twisted associativity, the cocycle law,
    normalization and the convolution identities, with witnesses."""
    report = CheckReport(example=b.name, suite="twisted-module-algebra")
    b_basis = b.basis.enumerate(window)
    h_basis = h.algebra.basis.enumerate(window)
    windowed = not (b.basis.is_finite and h.algebra.basis.is_finite)
    E = FreeVector.basis

    def measure_unit(hi):
        lhs = m.act_vec(E(hi), b.unit)
        return lhs == b.unit.scale(h.counit(hi)), format_index(hi)

    report.sweep("measure.unit", h_basis, measure_unit, windowed=windowed)

    def measure_mult(triple):
        hi, bi, bj = triple
        lhs = m.act_vec(E(hi), b.mult(bi, bj))
        rhs = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(hi, 2):
            rhs = rhs + b.mult_vec(m.act(h1, bi), m.act(h2, bj)).scale(c)
        return lhs == rhs, _pair_witness(hi, bi, bj)

    report.sweep(
        "measure.multiplicative",
        ((hi, bi, bj) for hi in h_basis for bi in b_basis for bj in b_basis),
        measure_mult,
        windowed=windowed,
    )

    def unit_acts(bi):
        return m.act_vec(h.algebra.unit, E(bi)) == E(bi), format_index(bi)

    report.sweep("measure.unit-action", b_basis, unit_acts, windowed=windowed)

    def twisted_assoc(triple):
        hi, hj, bi = triple
        lhs = m.act_vec(E(hi), m.act(hj, bi))
        rhs = FreeVector.zero()
        for c1, (x1, x2, x3) in h.sweedler(hi, 3):
            for c2, (y1, y2, y3) in h.sweedler(hj, 3):
                middle = m.act_vec(h.algebra.mult(x2, y2), E(bi))
                term = b.product(s.sigma(x1, y1), middle, s.sigma_inv(x3, y3))
                rhs = rhs + term.scale(c1 * c2)
        return lhs == rhs, _pair_witness(hi, hj, bi)

    report.sweep(
        "twisted-module",
        ((hi, hj, bi) for hi in h_basis for hj in h_basis for bi in b_basis),
        twisted_assoc,
        windowed=windowed,
    )

    def cocycle_law(triple):
        hi, hj, hk = triple
        lhs = FreeVector.zero()
        for c1, (x1, x2) in h.sweedler(hi, 2):
            for c2, (y1, y2) in h.sweedler(hj, 2):
                for c3, (z1, z2) in h.sweedler(hk, 2):
                    lhs = lhs + b.mult_vec(
                        m.act_vec(E(x1), s.sigma(y1, z1)),
                        s.sigma_vec(E(x2), h.algebra.mult(y2, z2)),
                    ).scale(c1 * c2 * c3)
        rhs = FreeVector.zero()
        for c1, (x1, x2) in h.sweedler(hi, 2):
            for c2, (y1, y2) in h.sweedler(hj, 2):
                rhs = rhs + b.mult_vec(
                    s.sigma(x1, y1),
                    s.sigma_vec(h.algebra.mult(x2, y2), E(hk)),
                ).scale(c1 * c2)
        return lhs == rhs, _pair_witness(hi, hj, hk)

    report.sweep(
        "cocycle",
        ((hi, hj, hk) for hi in h_basis for hj in h_basis for hk in h_basis),
        cocycle_law,
        windowed=windowed,
    )

    def normalized(hi):
        want = b.unit.scale(h.counit(hi))
        ok = s.sigma_vec(E(hi), h.algebra.unit) == want and s.sigma_vec(h.algebra.unit, E(hi)) == want
        return ok, format_index(hi)

    report.sweep("cocycle.normalized", h_basis, normalized, windowed=windowed)

    def convolution(pair):
        hi, hj = pair
        left = FreeVector.zero()
        right = FreeVector.zero()
        for c1, (x1, x2) in h.sweedler(hi, 2):
            for c2, (y1, y2) in h.sweedler(hj, 2):
                left = left + b.mult_vec(s.sigma(x1, y1), s.sigma_inv(x2, y2)).scale(c1 * c2)
                right = right + b.mult_vec(s.sigma_inv(x1, y1), s.sigma(x2, y2)).scale(c1 * c2)
        want = b.unit.scale(h.counit(hi) * h.counit(hj))
        return left == want and right == want, _pair_witness(hi, hj)

    report.sweep(
        "cocycle.convolution-inverse",
        ((hi, hj) for hi in h_basis for hj in h_basis),
        convolution,
        windowed=windowed,
    )
    return report


@dataclass
class CrossedProduct:
    base: AlgebraPresentation
    hopf: HopfData
    measure: Measure
    cocycle: Cocycle
    algebra: AlgebraPresentation
    comodule: ComoduleAlgebra

    def pair(self, b_ix, h_ix) -> Index:
        return tensor_index(b_ix, h_ix)

    def include_base(self, bv: FreeVector) -> FreeVector:
        return bv.tensor(self.hopf.algebra.unit)

    def mult_vec(self, v, w):
        return self.algebra.mult_vec(v, w)


def build_crossed_product(
    b: AlgebraPresentation,
    h: HopfData,
    m: Measure,
    s: Cocycle,
    window: int | None = None,
    verify_window: int | None = 2,
    name: str = "",
) -> CrossedProduct:
    """Crossed product algebra on pair indices; the twisted-module and
    cocycle hypotheses are enforced before anything is assembled."""
    pre = check_twisted_module_algebra(b, h, m, s, window=window)
    if not pre.ok:
        failed = pre.failed[0]
        raise ValueError(f"crossed product hypothesis failed: {failed.identity} at {failed.witness}")

    E = FreeVector.basis

    def mult(i, j):
        (_, bi, hi), (_, bj, hj) = i, j
        out = FreeVector.zero()
        for c1, (h1, h2, h3) in h.sweedler(hi, 3):
            for c2, (k1, k2) in h.sweedler(hj, 2):
                left = b.product(E(bi), m.act(h1, bj), s.sigma(h2, k1))
                right = h.algebra.mult(h3, k2)
                out = out + left.tensor(right).scale(c1 * c2)
        return out

    if b.basis.is_finite and h.algebra.basis.is_finite:
        basis = BasisFamily(
            indices=[tensor_index(bi, hi) for bi in b.basis.indices for hi in h.algebra.basis.indices]
        )
    else:
        basis = BasisFamily(
            window_fn=lambda w: [
                tensor_index(bi, hi)
                for bi in b.basis.enumerate(w)
                for hi in h.algebra.basis.enumerate(w)
            ]
        )
    algebra = AlgebraPresentation(
        name=name or f"{b.name}#{h.name}",
        basis=basis,
        mult=mult,
        unit=b.unit.tensor(h.algebra.unit),
        scalar_order=max(b.scalar_order, h.algebra.scalar_order),
    )

    def coaction(i):
        _, bi, hi = i
        out = FreeVector.zero()
        for pair_ix, c in h.comul(hi).terms.items():
            _, h1, h2 = pair_ix
            out = out + FreeVector.basis(tensor_index(tensor_index(bi, h1), h2)).scale(c)
        return out

    coinv = CoinvariantFamily(
        algebra=b,
        embed=lambda bi: FreeVector.basis(bi).tensor(h.algebra.unit),
        declared=not (b.basis.is_finite and h.algebra.basis.is_finite),
    )
    comodule = ComoduleAlgebra(algebra=algebra, hopf=h, coaction=coaction, coinvariants=coinv)

    if verify_window is not None:
        probe = algebra.basis.enumerate(None if algebra.basis.is_finite else verify_window)
        if len(probe) > 12:
            probe = probe[:: max(1, len(probe) // 12)]
        for i in probe:
            for j in probe:
                for k in probe:
                    lhs = algebra.mult_vec(algebra.mult(i, j), E(k))
                    rhs = algebra.mult_vec(E(i), algebra.mult(j, k))
                    if not lhs == rhs:
                        raise ValueError(f"crossed product not associative at {_pair_witness(i, j, k)}")
    return CrossedProduct(base=b, hopf=h, measure=m, cocycle=s, algebra=algebra, comodule=comodule)


@dataclass
class CleftData:
    total: ComoduleAlgebra
    cleaving: LinOp
    cleaving_inv: Optional[LinOp] = None

    def ensure_inverse(self, window: int | None = None) -> LinOp:
        if self.cleaving_inv is None:
            h = self.total.hopf
            got = convolution_inverse(
                self.cleaving,
                CoalgebraData(comul=h.comul, counit=h.counit),
                h.algebra.basis.enumerate(window),
                self.total.algebra,
                window=window,
            )
            if isinstance(got, NotInvertible):
                raise ValueError(f"cleaving map is not convolution invertible at {got.element}")
            self.cleaving_inv = got
        return self.cleaving_inv


class _BaseExpressor:
    """Expresses coinvariant elements of A over the declared base presentation."""

    def __init__(self, fam: CoinvariantFamily, window: int | None):
        self.fam = fam
        if fam.algebra.basis.is_finite:
            domain = fam.algebra.basis.enumerate()
        else:
            if window is None:
                raise ValueError("windowed base presentation needs a window")
            domain = fam.algebra.basis.enumerate(3 * window)
        self.solver = LinearSolver(LinOp(lambda ix: fam.embed(ix), name="embed"), domain)

    def express(self, value: FreeVector):
        return self.solver.solve(value)


def cleft_to_crossed(cleft: CleftData, window: int | None = None):
    """Derive measure and cocycle from a cleaving map and rebuild the
    crossed product, together with the comparison isomorphism and its
    inverse.  Returns (CrossedProduct, theta, theta_inv, report)."""
    a = cleft.total
    h = a.hopf
    if a.coinvariants is None:
        raise ValueError("cleft data needs a coinvariant presentation of the base")
    j = cleft.cleaving
    j_inv = cleft.ensure_inverse(window)
    b = a.coinvariants.algebra
    embed = a.coinvariants.embed
    expressor = _BaseExpressor(a.coinvariants, window)
    report = CheckReport(example=a.algebra.name, suite="cleft-to-crossed")
    E = FreeVector.basis

    measure_cache: dict = {}

    def measure_act(hi, bi):
        key = (hi, bi)
        got = measure_cache.get(key)
        if got is None:
            value = FreeVector.zero()
            for c, (h1, h2) in h.sweedler(hi, 2):
                value = value + a.algebra.product(j(h1), embed(bi), j_inv(h2)).scale(c)
            got = expressor.express(value)
            if isinstance(got, NoSolution):
                raise ValueError(
                    f"derived measure leaves the coinvariants at {_pair_witness(hi, bi)}"
                )
            measure_cache[key] = got
        return got

    sigma_cache: dict = {}

    def sigma(hi, hj):
        key = (hi, hj)
        got = sigma_cache.get(key)
        if got is None:
            value = FreeVector.zero()
            for c1, (h1, h2) in h.sweedler(hi, 2):
                for c2, (k1, k2) in h.sweedler(hj, 2):
                    value = value + a.algebra.product(
                        j(h1), j(k1), j_inv(h.algebra.mult(h2, k2))
                    ).scale(c1 * c2)
            got = expressor.express(value)
            if isinstance(got, NoSolution):
                raise ValueError(
                    f"derived cocycle value is not coinvariant at {_pair_witness(hi, hj)}"
                )
            sigma_cache[key] = got
        return got

    h_basis_early = h.algebra.basis.enumerate(window)
    windowed_early = not h.algebra.basis.is_finite
    report.record("cleaving.unital", j(h.algebra.unit) == a.algebra.unit)

    def j_colinear(hx):
        lhs = a.coaction_vec(j(hx))
        rhs = FreeVector.zero()
        for c, (h1, h2) in h.sweedler(hx, 2):
            rhs = rhs + j(h1).tensor(E(h2)).scale(c)
        return lhs == rhs, format_index(hx)

    report.sweep("cleaving.colinear", h_basis_early, j_colinear, windowed=windowed_early)

    measure = Measure(act=measure_act)
    cocycle = cocycle_from_sigma(lambda i, k: sigma(i, k), b, h, window=window)
    crossed = build_crossed_product(b, h, measure, cocycle, window=window, name=f"{b.name}#s{h.name}")

    theta_cache: dict = {}

    def theta_ix(a_ix):
        got = theta_cache.get(a_ix)
        if got is not None:
            return got
        out = FreeVector.zero()
        for c, (a0, a1, a2) in a.coaction_terms(a_ix, 2):
            left = a.algebra.mult_vec(E(a0), j_inv(a1))
            expressed = expressor.express(left)
            if isinstance(expressed, NoSolution):
                raise ValueError(f"theta leaves the base at {format_index(a_ix)}")
            out = out + expressed.tensor(E(a2)).scale(c)
        theta_cache[a_ix] = out
        return out

    theta = LinOp(theta_ix, name="theta")

    def theta_inv_ix(pair_ix):
        _, bi, hi = pair_ix
        return a.algebra.mult_vec(embed(bi), j(hi))

    theta_inv = LinOp(theta_inv_ix, name="theta^-1")

    a_basis = a.algebra.basis.enumerate(window)
    pair_basis = crossed.algebra.basis.enumerate(window)
    windowed = not a.algebra.basis.is_finite

    report.sweep(
        "theta.left-inverse",
        a_basis,
        lambda ix: (theta_inv(theta(ix)) == E(ix), format_index(ix)),
        windowed=windowed,
    )
    report.sweep(
        "theta.right-inverse",
        pair_basis,
        lambda ix: (theta(theta_inv(ix)) == E(ix), format_index(ix)),
        windowed=windowed,
    )

    def theta_multiplicative(pair):
        i, k = pair
        lhs = theta(a.algebra.mult(i, k))
        rhs = crossed.algebra.mult_vec(theta(i), theta(k))
        return lhs == rhs, _pair_witness(i, k)

    report.sweep(
        "theta.algebra-map",
        ((i, k) for i in a_basis for k in a_basis),
        theta_multiplicative,
        windowed=windowed,
    )

    def theta_colinear(ix):
        lhs = FreeVector.zero()
        for pair_ix, c in a.coaction(ix).terms.items():
            _, a0, h1 = pair_ix
            lhs = lhs + theta(a0).tensor(E(h1)).scale(c)
        rhs = crossed.comodule.coaction_vec(theta(ix))
        return lhs == rhs, format_index(ix)

    report.sweep("theta.colinear", a_basis, theta_colinear, windowed=windowed)
    return crossed, theta, theta_inv, report


def equivariant_section(cleft: CleftData, window: int | None = None):
    """The splitting a -> a_0 j^-1(a_1) (x) j(a_2) of the multiplication
    B (x) A -> A; verified to split, to be left base-linear and right
    colinear.  Returns (section, report)."""
    a = cleft.total
    h = a.hopf
    if a.coinvariants is None:
        raise ValueError("section needs a coinvariant presentation of the base")
    j = cleft.cleaving
    j_inv = cleft.ensure_inverse(window)
    embed = a.coinvariants.embed
    expressor = _BaseExpressor(a.coinvariants, window)
    report = CheckReport(example=a.algebra.name, suite="equivariant-section")
    E = FreeVector.basis
    windowed = not a.algebra.basis.is_finite

    def section_ix(a_ix):
        out = FreeVector.zero()
        for c, (a0, a1, a2) in a.coaction_terms(a_ix, 2):
            left = a.algebra.mult_vec(E(a0), j_inv(a1))
            expressed = expressor.express(left)
            if isinstance(expressed, NoSolution):
                raise ValueError(f"section leaves the base at {format_index(a_ix)}")
            out = out + expressed.tensor(j(a2)).scale(c)
        return out

    section = LinOp(section_ix, name="s")
    a_basis = a.algebra.basis.enumerate(window)
    b_basis = a.coinvariants.algebra.basis.enumerate(window)

    def splits(a_ix):
        total = FreeVector.zero()
        for pair_ix, c in section(a_ix).terms.items():
            _, b_ix, a2_ix = pair_ix
            total = total + a.algebra.mult_vec(embed(b_ix), E(a2_ix)).scale(c)
        return total == E(a_ix), format_index(a_ix)

    report.sweep("section.splits-multiplication", a_basis, splits, windowed=windowed)

    def base_linear(item):
        b_ix, a_ix = item
        lhs = section(a.algebra.mult_vec(embed(b_ix), E(a_ix)))
        rhs = FreeVector.zero()
        for pair_ix, c in section(a_ix).terms.items():
            _, b2_ix, a2_ix = pair_ix
            moved = a.coinvariants.algebra.mult(b_ix, b2_ix)
            rhs = rhs + moved.tensor(E(a2_ix)).scale(c)
        return lhs == rhs, _pair_witness(b_ix, a_ix)

    report.sweep(
        "section.left-base-linear",
        ((b_ix, a_ix) for b_ix in b_basis for a_ix in a_basis),
        base_linear,
        windowed=windowed,
    )

    def colinear(a_ix):
        lhs = FreeVector.zero()
        for pair_ix, c in section(a_ix).terms.items():
            _, b_ix, a2_ix = pair_ix
            for pair2, c2 in a.coaction(a2_ix).terms.items():
                _, a0, h1 = pair2
                lhs = lhs + E(("sc", b_ix, a0, h1)).scale(c * c2)
        rhs = FreeVector.zero()
        for pair_ix, c in a.coaction(a_ix).terms.items():
            _, a0, h1 = pair_ix
            for pair2, c2 in section(a0).terms.items():
                _, b_ix, a2_ix = pair2
                rhs = rhs + E(("sc", b_ix, a2_ix, h1)).scale(c * c2)
        return lhs == rhs, format_index(a_ix)

    report.sweep("section.right-colinear", a_basis, colinear, windowed=windowed)
    return section, report


@dataclass
class HopfGaloisResult:
    report: CheckReport
    balanced_dim: int
    target_dim: int
    rank: int

    @property
    def bijective(self) -> bool:
        return self.rank == self.balanced_dim == self.target_dim


def check_hopf_galois(a: ComoduleAlgebra, coinv: CoinvariantFamily | None = None) -> HopfGaloisResult:
    """Assemble A (x)_B A and decide bijectivity of a (x) a' -> a a'_0 (x) a'_1
    by exact rank.  Finite-dimensional A only."""
    if not a.algebra.basis.is_finite:
        raise ValueError("Galois check needs a finite-dimensional comodule algebra")
    coinv = coinv or a.coinvariants
    if coinv is None:
        raise ValueError("no coinvariant data supplied")
    report = CheckReport(example=a.algebra.name, suite="hopf-galois")
    E = FreeVector.basis
    a_basis = a.algebra.basis.enumerate()
    h_basis = a.hopf.algebra.basis.enumerate()
    b_vectors = [coinv.embed(ix) for ix in coinv.algebra.basis.enumerate()]

    relations = Subspace()
    for bv in b_vectors:
        for i in a_basis:
            left_mult = a.algebra.mult_vec(E(i), bv)
            for k in a_basis:
                right_mult = a.algebra.mult_vec(bv, E(k))
                rel = left_mult.tensor(E(k)) - E(i).tensor(right_mult)
                relations.add(rel)
    big = [E(tensor_index(i, k)) for i in a_basis for k in a_basis]
    balanced = QuotientSpace(big, relations, cls_tag="bal")

    def can_raw(pair_ix):
        _, i, k = pair_ix
        out = FreeVector.zero()
        for c, (k0, k1) in a.coaction_terms(k, 1):
            out = out + a.algebra.mult(i, k0).tensor(E(k1)).scale(c)
        return out

    can = LinOp(can_raw, name="can")

    # can must kill the balanced relations to be defined on the quotient
    report.sweep(
        "hopf-galois.well-defined",
        relations.basis(),
        lambda rel: (can(rel).is_zero(), rel.to_text()),
    )

    def can_on_class(cls_ix):
        return can(balanced.representatives[cls_ix[1]])

    _, image = kernel_image(LinOp(can_on_class), balanced.class_indices())
    target_dim = len(a_basis) * len(h_basis)
    rank = image.dim
    report.record(
        "hopf-galois.bijective",
        rank == balanced.dim == target_dim,
        witness=f"rank {rank}, balanced dim {balanced.dim}, target dim {target_dim}",
    )
    return HopfGaloisResult(report=report, balanced_dim=balanced.dim, target_dim=target_dim, rank=rank)
