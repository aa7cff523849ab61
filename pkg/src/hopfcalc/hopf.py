"""Hopf algebra and comodule algebra presentations, checkers and builders.

Structures are plain data: a basis (finite list or window enumerator),
computable structure maps returning FreeVectors, and a scalar order.
Axioms are never assumed; `check_hopf_axioms` and
`check_comodule_algebra` verify them exhaustively on finite bases and
on a window otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from hopfcalc.linalg import (
    FreeVector,
    LinOp,
    Subspace,
    NoSolution,
    format_index,
    index_sort_key,
    kernel_image,
    solve_linear,
    tensor_index,
)
from hopfcalc.report import CheckReport
from hopfcalc.scalars import CycScalar, multiplicative_order, parse_scalar

Index = tuple


class BasisFamily:
    """Finite basis enumeration, or a window enumerator for Z^k-indexed families."""

    def __init__(self, indices=None, window_fn=None):
        if (indices is None) == (window_fn is None):
            raise ValueError("give exactly one of indices / window_fn")
        self.indices = sorted(indices, key=index_sort_key) if indices is not None else None
        self.window_fn = window_fn

    @property
    def is_finite(self) -> bool:
        return self.indices is not None

    def enumerate(self, window: int | None = None) -> list[Index]:
        if self.indices is not None:
            return list(self.indices)
        if window is None:
            raise ValueError("infinite basis needs an explicit window")
        return sorted(self.window_fn(window), key=index_sort_key)


@dataclass
class AlgebraPresentation:
    name: str
    basis: BasisFamily
    mult: Callable[[Index, Index], FreeVector]
    unit: FreeVector
    scalar_order: int = 1

    def mult_vec(self, v: FreeVector, w: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for i, ci in v.terms.items():
            for j, cj in w.terms.items():
                out = out + self.mult(i, j).scale(ci * cj)
        return out

    def product(self, *vectors: FreeVector) -> FreeVector:
        out = self.unit
        for v in vectors:
            out = self.mult_vec(out, v)
        return out


def tensor_algebra(left: AlgebraPresentation, right: AlgebraPresentation, name: str = "") -> AlgebraPresentation:
    """Componentwise product on pair indices (no braiding)."""

    def mult(i, j):
        (_, il, ir), (_, jl, jr) = i, j
        return left.mult(il, jl).tensor(right.mult(ir, jr))

    if left.basis.is_finite and right.basis.is_finite:
        basis = BasisFamily(
            indices=[tensor_index(i, j) for i in left.basis.indices for j in right.basis.indices]
        )
    else:
        basis = BasisFamily(
            window_fn=lambda w: [
                tensor_index(i, j) for i in left.basis.enumerate(w) for j in right.basis.enumerate(w)
            ]
        )
    return AlgebraPresentation(
        name=name or f"{left.name}(x){right.name}",
        basis=basis,
        mult=mult,
        unit=left.unit.tensor(right.unit),
        scalar_order=max(left.scalar_order, right.scalar_order),
    )


@dataclass
class HopfData:
    algebra: AlgebraPresentation
    comul: Callable[[Index], FreeVector]
    counit: Callable[[Index], CycScalar]
    antipode: LinOp
    antipode_inv: LinOp
    name: str = ""
    _sweedler_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def comul_vec(self, v: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for ix, c in v.terms.items():
            out = out + self.comul(ix).scale(c)
        return out

    def counit_vec(self, v: FreeVector) -> CycScalar:
        out = CycScalar.zero(self.algebra.scalar_order)
        for ix, c in v.terms.items():
            out = out + self.counit(ix) * c
        return out

    def sweedler(self, ix: Index, legs: int):
        """Iterated comultiplication of a basis element as flat leg tuples."""
        key = (ix, legs)
        cached = self._sweedler_cache.get(key)
        if cached is not None:
            return cached
        one = CycScalar.one(self.algebra.scalar_order)
        terms = {(ix,): one}
        for _ in range(legs - 1):
            nxt = {}
            for tup, c in terms.items():
                for pair_ix, c2 in self.comul(tup[-1]).terms.items():
                    _, i, j = pair_ix
                    key2 = tup[:-1] + (i, j)
                    prev = nxt.get(key2)
                    prod = c * c2
                    nxt[key2] = prod if prev is None else prev + prod
            terms = {t: c for t, c in nxt.items() if not c.is_zero()}
        out = [(c, t) for t, c in terms.items()]
        self._sweedler_cache[key] = out
        return out

    def sweedler_vec(self, v: FreeVector, legs: int):
        acc = {}
        for ix, c in v.terms.items():
            for c2, tup in self.sweedler(ix, legs):
                prev = acc.get(tup)
                prod = c * c2
                acc[tup] = prod if prev is None else prev + prod
        return [(c, t) for t, c in acc.items() if not c.is_zero()]

    def is_group_like(self, ix: Index) -> bool:
        return self.comul(ix) == FreeVector.basis(tensor_index(ix, ix))


@dataclass
class CoinvariantFamily:
    """Coinvariant subalgebra, either computed by kernel or declared."""

    algebra: AlgebraPresentation
    embed: Callable[[Index], FreeVector]
    declared: bool = True

    def embed_vec(self, v: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for ix, c in v.terms.items():
            out = out + self.embed(ix).scale(c)
        return out


@dataclass
class ComoduleAlgebra:
    algebra: AlgebraPresentation
    hopf: HopfData
    coaction: Callable[[Index], FreeVector]
    coinvariants: Optional[CoinvariantFamily] = None

    def coaction_vec(self, v: FreeVector) -> FreeVector:
        out = FreeVector.zero()
        for ix, c in v.terms.items():
            out = out + self.coaction(ix).scale(c)
        return out

    def coaction_terms(self, ix: Index, h_legs: int):
        """rho iterated: (coeff, (a_index, h_1, ..., h_legs)) tuples."""
        out = []
        for pair_ix, c in self.coaction(ix).terms.items():
            _, a_ix, h_ix = pair_ix
            if h_legs == 1:
                out.append((c, (a_ix, h_ix)))
            else:
                for c2, tup in self.hopf.sweedler(h_ix, h_legs):
                    out.append((c * c2, (a_ix,) + tup))
        return out


# ---------------------------------------------------------------------------
# axiom checkers
# ---------------------------------------------------------------------------


def _flatten_left(v: FreeVector) -> FreeVector:
    # ((i (x) j) (x) k)  ->  3-tuple
    return v.map_indices(lambda ix: ("@3", ix[1][1], ix[1][2], ix[2]))


def _flatten_right(v: FreeVector) -> FreeVector:
    # (i (x) (j (x) k))  ->  3-tuple
    return v.map_indices(lambda ix: ("@3", ix[1], ix[2][1], ix[2][2]))


def _pair_witness(*elements) -> str:
    return " ; ".join(
        e.to_text() if isinstance(e, FreeVector) else format_index(e) for e in elements
    )


def check_algebra_axioms(alg: AlgebraPresentation, report: CheckReport, window: int | None = None, prefix: str = ""):
    basis = alg.basis.enumerate(window)
    windowed = not alg.basis.is_finite

    def assoc(triple):
        i, j, k = triple
        left = alg.mult_vec(alg.mult(i, j), FreeVector.basis(k))
        right = alg.mult_vec(FreeVector.basis(i), alg.mult(j, k))
        return left == right, _pair_witness(i, j, k)

    report.sweep(
        prefix + "algebra.assoc",
        ((i, j, k) for i in basis for j in basis for k in basis),
        assoc,
        windowed=windowed,
    )

    def unital(ix):
        e = FreeVector.basis(ix)
        ok = alg.mult_vec(alg.unit, e) == e and alg.mult_vec(e, alg.unit) == e
        return ok, format_index(ix)

    report.sweep(prefix + "algebra.unit", basis, unital, windowed=windowed)


def check_hopf_axioms(h: HopfData, window: int | None = None) -> CheckReport:
    """Per-axiom pass/fail with a witness basis element on failure."""
    report = CheckReport(example=h.name or h.algebra.name, suite="hopf-axioms")
    alg = h.algebra
    basis = alg.basis.enumerate(window)
    windowed = not alg.basis.is_finite
    one = CycScalar.one(alg.scalar_order)

    check_algebra_axioms(alg, report, window)

    def coassoc(ix):
        # (comul (x) id) and (id (x) comul) applied to comul(ix)
        lhs = FreeVector.zero()
        rhs = FreeVector.zero()
        for pair_ix, c in h.comul(ix).terms.items():
            _, i, j = pair_ix
            lhs = lhs + h.comul(i).tensor(FreeVector.basis(j)).scale(c)
            rhs = rhs + FreeVector.basis(i).tensor(h.comul(j)).scale(c)
        return _flatten_left(lhs) == _flatten_right(rhs), format_index(ix)

    report.sweep("coalgebra.coassoc", basis, coassoc, windowed=windowed)

    def counit_law(ix):
        left = FreeVector.zero()
        right = FreeVector.zero()
        for pair_ix, c in h.comul(ix).terms.items():
            _, i, j = pair_ix
            left = left + FreeVector.basis(j).scale(c * h.counit(i))
            right = right + FreeVector.basis(i).scale(c * h.counit(j))
        e = FreeVector.basis(ix)
        return left == e and right == e, format_index(ix)

    report.sweep("coalgebra.counit", basis, counit_law, windowed=windowed)

    square = tensor_algebra(alg, alg)

    def comul_is_algebra_map(pair):
        i, j = pair
        lhs = h.comul_vec(alg.mult(i, j))
        rhs = square.mult_vec(h.comul(i), h.comul(j))
        return lhs == rhs, _pair_witness(i, j)

    report.sweep(
        "bialgebra.comul-mult",
        ((i, j) for i in basis for j in basis),
        comul_is_algebra_map,
        windowed=windowed,
    )
    report.record(
        "bialgebra.comul-unit", h.comul_vec(alg.unit) == alg.unit.tensor(alg.unit)
    )

    def counit_is_algebra_map(pair):
        i, j = pair
        lhs = h.counit_vec(alg.mult(i, j))
        rhs = h.counit(i) * h.counit(j)
        return lhs == rhs, _pair_witness(i, j)

    report.sweep(
        "bialgebra.counit-mult",
        ((i, j) for i in basis for j in basis),
        counit_is_algebra_map,
        windowed=windowed,
    )
    report.record("bialgebra.counit-unit", h.counit_vec(alg.unit) == one)

    def antipode_axiom(ix):
        left = FreeVector.zero()
        right = FreeVector.zero()
        for pair_ix, c in h.comul(ix).terms.items():
            _, i, j = pair_ix
            left = left + alg.mult_vec(h.antipode(i), FreeVector.basis(j)).scale(c)
            right = right + alg.mult_vec(FreeVector.basis(i), h.antipode(j)).scale(c)
        expected = alg.unit.scale(h.counit(ix))
        return left == expected and right == expected, format_index(ix)

    report.sweep("hopf.antipode", basis, antipode_axiom, windowed=windowed)

    def antipode_inverse(ix):
        e = FreeVector.basis(ix)
        ok = h.antipode_inv(h.antipode(e)) == e and h.antipode(h.antipode_inv(e)) == e
        return ok, format_index(ix)

    report.sweep("hopf.antipode-inverse", basis, antipode_inverse, windowed=windowed)
    return report


def check_comodule_algebra(m: ComoduleAlgebra, window: int | None = None) -> CheckReport:
    report = CheckReport(example=m.algebra.name, suite="comodule-algebra")
    alg, h = m.algebra, m.hopf
    basis = alg.basis.enumerate(window)
    windowed = not alg.basis.is_finite

    def coassoc(ix):
        lhs = FreeVector.zero()  # (rho (x) id) rho
        rhs = FreeVector.zero()  # (id (x) comul) rho
        for pair_ix, c in m.coaction(ix).terms.items():
            _, a, hh = pair_ix
            lhs = lhs + m.coaction(a).tensor(FreeVector.basis(hh)).scale(c)
            rhs = rhs + FreeVector.basis(a).tensor(h.comul(hh)).scale(c)
        return _flatten_left(lhs) == _flatten_right(rhs), format_index(ix)

    report.sweep("comodule.coassoc", basis, coassoc, windowed=windowed)

    def counital(ix):
        out = FreeVector.zero()
        for pair_ix, c in m.coaction(ix).terms.items():
            _, a, hh = pair_ix
            out = out + FreeVector.basis(a).scale(c * h.counit(hh))
        return out == FreeVector.basis(ix), format_index(ix)

    report.sweep("comodule.counit", basis, counital, windowed=windowed)

    mixed = tensor_algebra(alg, h.algebra)

    def algebra_map(pair):
        i, j = pair
        lhs = m.coaction_vec(alg.mult(i, j))
        rhs = mixed.mult_vec(m.coaction(i), m.coaction(j))
        return lhs == rhs, _pair_witness(i, j)

    report.sweep(
        "comodule.algebra-map",
        ((i, j) for i in basis for j in basis),
        algebra_map,
        windowed=windowed,
    )
    report.record(
        "comodule.unit", m.coaction_vec(alg.unit) == alg.unit.tensor(h.algebra.unit)
    )

    if m.coinvariants is not None:
        fam = m.coinvariants

        def coinvariant(b_ix):
            v = fam.embed(b_ix)
            ok = m.coaction_vec(v) == v.tensor(h.algebra.unit)
            return ok, format_index(b_ix)

        report.sweep(
            "comodule.coinvariants",
            fam.algebra.basis.enumerate(window),
            coinvariant,
            windowed=not fam.algebra.basis.is_finite,
        )
    return report


def compute_coinvariants(m: ComoduleAlgebra, name: str = "") -> CoinvariantFamily:
    """Exact coinvariants of a finite-dimensional comodule algebra."""
    basis = m.algebra.basis.enumerate()
    unit_h = m.hopf.algebra.unit

    def defect(ix):
        return m.coaction(ix) - FreeVector.basis(ix).tensor(unit_h)

    kernel, _ = kernel_image(LinOp(defect), basis)
    vectors = kernel.basis()
    solver = Subspace(vectors)
    labels = [("coinv", i) for i in range(len(vectors))]
    table = dict(zip(labels, vectors))

    def embed(b_ix):
        return table[b_ix]

    def mult(i, j):
        product = m.algebra.mult_vec(table[i], table[j])
        sol = solve_linear(
            LinOp(lambda ix: table[ix]), product, labels
        )
        if isinstance(sol, NoSolution):
            raise ValueError("coinvariants are not closed under multiplication")
        return sol

    unit = solve_linear(LinOp(lambda ix: table[ix]), m.algebra.unit, labels)
    if isinstance(unit, NoSolution):
        raise ValueError("unit is not coinvariant")
    assert solver.dim == len(vectors)
    algebra = AlgebraPresentation(
        name=name or f"{m.algebra.name}^co",
        basis=BasisFamily(indices=labels),
        mult=mult,
        unit=unit,
        scalar_order=m.algebra.scalar_order,
    )
    return CoinvariantFamily(algebra=algebra, embed=embed, declared=False)


# ---------------------------------------------------------------------------
# convolution algebra
# ---------------------------------------------------------------------------


@dataclass
class CoalgebraData:
    comul: Callable[[Index], FreeVector]
    counit: Callable[[Index], CycScalar]


def tensor_square_coalgebra(h: HopfData) -> CoalgebraData:
    """H (x) H with componentwise comultiplication on pair indices."""

    def comul(pair_ix):
        _, i, j = pair_ix
        out = FreeVector.zero()
        for p1, c1 in h.comul(i).terms.items():
            for p2, c2 in h.comul(j).terms.items():
                left = tensor_index(p1[1], p2[1])
                right = tensor_index(p1[2], p2[2])
                out = out + FreeVector.basis(tensor_index(left, right)).scale(c1 * c2)
        return out

    return CoalgebraData(comul=comul, counit=lambda ix: h.counit(ix[1]) * h.counit(ix[2]))


@dataclass
class NotInvertible:
    element: Index | None

    def __repr__(self):
        where = format_index(self.element) if self.element is not None else "joint system"
        return f"NotInvertible({where})"


def _coalgebra_pairs(coa: CoalgebraData, ix):
    return [(c, (p[1], p[2])) for p, c in coa.comul(ix).terms.items()]


def convolution_inverse(f: LinOp, coa: CoalgebraData, c_basis, algebra: AlgebraPresentation, window: int | None = None):
    """Convolution inverse of f: C -> A on the given coalgebra basis.

    Group-like bases are inverted pointwise (valid on any window);
    otherwise one global linear system is solved and verified.
    Returns a LinOp or NotInvertible carrying an unsolvable element.
    """
    c_basis = list(c_basis)
    a_basis = algebra.basis.enumerate(window)
    pairs = {ix: _coalgebra_pairs(coa, ix) for ix in c_basis}
    group_like = all(
        len(pairs[ix]) == 1 and pairs[ix][0][1] == (ix, ix) and pairs[ix][0][0].is_one()
        for ix in c_basis
    )

    values = {}
    if group_like:
        # pointwise inversion works for any index, so the returned map is
        # total: off-window values are solved on demand on a grown window
        def invert_at(ix):
            fv = f(ix)
            grown = window
            while True:
                domain = algebra.basis.enumerate(grown)
                sol = solve_linear(
                    LinOp(lambda j, fv=fv: algebra.mult_vec(fv, FreeVector.basis(j))),
                    algebra.unit,
                    domain,
                )
                if not isinstance(sol, NoSolution):
                    if not algebra.mult_vec(sol, fv) == algebra.unit:
                        return NotInvertible(ix)
                    return sol
                if grown is None or grown >= 4 * (window or 1):
                    return NotInvertible(ix)
                grown += window

        for ix in c_basis:
            got = invert_at(ix)
            if isinstance(got, NotInvertible):
                return got
            values[ix] = got

        def lazy_value(ix):
            cached = values.get(ix)
            if cached is None:
                cached = invert_at(ix)
                if isinstance(cached, NotInvertible):
                    raise ValueError(f"no convolution inverse at {format_index(ix)}")
                values[ix] = cached
            return cached

        g = LinOp(lazy_value, name=f"{f.name}^-1")
    else:
        unknowns = [("u", ci, ai) for ci in c_basis for ai in a_basis]

        def column(u_ix):
            _, cj, ak = u_ix
            out = FreeVector.zero()
            unit_vec = FreeVector.basis(ak)
            for ci in c_basis:
                for coeff, (c1, c2) in pairs[ci]:
                    if c2 == cj:
                        prod = algebra.mult_vec(f(c1), unit_vec).scale(coeff)
                        out = out + prod.map_indices(lambda a: ("L", ci, a))
                    if c1 == cj:
                        prod = algebra.mult_vec(unit_vec, f(c2)).scale(coeff)
                        out = out + prod.map_indices(lambda a: ("R", ci, a))
            return out

        target = FreeVector.zero()
        for ci in c_basis:
            eps = coa.counit(ci)
            unit = algebra.unit.scale(eps)
            target = target + unit.map_indices(lambda a: ("L", ci, a))
            target = target + unit.map_indices(lambda a: ("R", ci, a))
        sol = solve_linear(LinOp(column), target, unknowns)
        if isinstance(sol, NoSolution):
            # attribute the failure to a single basis element when possible
            for ci in c_basis:
                local = [u for u in unknowns]
                local_target = FreeVector(
                    {ix: c for ix, c in target.terms.items() if ix[1] == ci}
                )

                def local_column(u_ix):
                    return FreeVector(
                        {ix: c for ix, c in column(u_ix).terms.items() if ix[1] == ci}
                    )

                if isinstance(solve_linear(LinOp(local_column), local_target, local), NoSolution):
                    return NotInvertible(ci)
            return NotInvertible(None)
        for ci in c_basis:
            acc = FreeVector.zero()
            for (_, cj, ak), c in sol.terms.items():
                if cj == ci:
                    acc = acc + FreeVector.basis(ak).scale(c)
            values[ci] = acc
        g = LinOp(lambda ix: values[ix], name=f"{f.name}^-1")

    # verify both convolution identities on every checked basis element
    for ci in c_basis:
        left = FreeVector.zero()
        right = FreeVector.zero()
        for coeff, (c1, c2) in pairs[ci]:
            left = left + algebra.mult_vec(f(c1), g(c2)).scale(coeff)
            right = right + algebra.mult_vec(g(c1), f(c2)).scale(coeff)
        expected = algebra.unit.scale(coa.counit(ci))
        if not (left == expected and right == expected):
            return NotInvertible(ci)
    return g


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def cyclic_cayley(n: int):
    elements = list(range(n))
    table = {(i, j): (i + j) % n for i in elements for j in elements}
    return elements, table


def build_group_algebra(elements, table, name: str = "", scalar_order: int = 1) -> HopfData:
    """Group Hopf algebra from a Cayley table; validates the table first."""
    elements = list(elements)
    eset = set(elements)
    for i in elements:
        for j in elements:
            if (i, j) not in table or table[(i, j)] not in eset:
                raise ValueError(f"Cayley table not closed at ({i}, {j})")
    for i in elements:
        for j in elements:
            for k in elements:
                if table[(table[(i, j)], k)] != table[(i, table[(j, k)])]:
                    raise ValueError(f"Cayley table not associative at ({i}, {j}, {k})")
    identity = None
    for e in elements:
        if all(table[(e, x)] == x and table[(x, e)] == x for x in elements):
            identity = e
            break
    if identity is None:
        raise ValueError("Cayley table has no identity element")
    inverse = {}
    for x in elements:
        for y in elements:
            if table[(x, y)] == identity and table[(y, x)] == identity:
                inverse[x] = y
                break
        else:
            raise ValueError(f"element {x} has no inverse")

    def ix(g):
        return ("g", g)

    basis = BasisFamily(indices=[ix(g) for g in elements])
    one = CycScalar.one(scalar_order)

    def mult(i, j):
        return FreeVector.basis(ix(table[(i[1], j[1])]), one)

    algebra = AlgebraPresentation(
        name=name or f"k[G{len(elements)}]",
        basis=basis,
        mult=mult,
        unit=FreeVector.basis(ix(identity), one),
        scalar_order=scalar_order,
    )
    return HopfData(
        algebra=algebra,
        comul=lambda i: FreeVector.basis(tensor_index(i, i), one),
        counit=lambda i: one,
        antipode=LinOp(lambda i: FreeVector.basis(ix(inverse[i[1]]), one), name="S"),
        antipode_inv=LinOp(lambda i: FreeVector.basis(ix(inverse[i[1]]), one), name="S^-1"),
        name=algebra.name,
    )


def build_cyclic_group_algebra(n: int, scalar_order: int = 1) -> HopfData:
    elements, table = cyclic_cayley(n)
    return build_group_algebra(elements, table, name=f"k[C{n}]", scalar_order=scalar_order)


def build_laurent_hopf(scalar_order: int = 1) -> HopfData:
    """Laurent polynomial Hopf algebra on one group-like invertible generator."""
    one = CycScalar.one(scalar_order)

    def ix(n):
        return ("t", n)

    basis = BasisFamily(window_fn=lambda w: [ix(n) for n in range(-w, w + 1)])
    algebra = AlgebraPresentation(
        name="k[t,t^-1]",
        basis=basis,
        mult=lambda i, j: FreeVector.basis(ix(i[1] + j[1]), one),
        unit=FreeVector.basis(ix(0), one),
        scalar_order=scalar_order,
    )
    return HopfData(
        algebra=algebra,
        comul=lambda i: FreeVector.basis(tensor_index(i, i), one),
        counit=lambda i: one,
        antipode=LinOp(lambda i: FreeVector.basis(ix(-i[1]), one), name="S"),
        antipode_inv=LinOp(lambda i: FreeVector.basis(ix(-i[1]), one), name="S^-1"),
        name="k[t,t^-1]",
    )


@dataclass
class RadfordData:
    hopf: HopfData
    h1: AlgebraPresentation
    h1_embed: Callable[[Index], FreeVector]
    r: int
    n: int
    m: int
    q: CycScalar


def build_radford(r: int, n: int, q: CycScalar) -> RadfordData:
    """Hopf algebra on generators a, x with a^(rn)=1, x^n=0, xa=q ax.

    The antipode is not copied from a closed formula: it is solved from
    the antipode axiom on the generators, extended anti-multiplicatively
    and then verified by `check_hopf_axioms` in the test-suite.
    """
    if r < 1 or n < 1:
        raise ValueError("r and n must be positive")
    m = r * n
    order = multiplicative_order(q, bound=4 * m + 4)
    if order != m:
        raise ValueError(f"q must be a primitive root of unity of order {m}, got order {order}")
    so = max(q.order, 1)
    one = CycScalar.one(so)

    def ix(l, mm):
        return ("ax", l % m, mm)

    basis_ix = [ix(l, mm) for l in range(m) for mm in range(n)]
    basis = BasisFamily(indices=basis_ix)

    def mult(i, j):
        (_, l, mi), (_, k, s) = i, j
        if mi + s >= n:
            return FreeVector.zero()
        return FreeVector.basis(ix(l + k, mi + s), q ** (mi * k))

    algebra = AlgebraPresentation(
        name=f"H({r},{n})", basis=basis, mult=mult, unit=FreeVector.basis(ix(0, 0), one), scalar_order=so
    )
    square = tensor_algebra(algebra, algebra)

    a, x = ix(1, 0), ix(0, 1)
    comul_gen = {
        a: FreeVector.basis(tensor_index(a, a), one),
        x: FreeVector.basis(tensor_index(ix(0, 0), x), one)
        + FreeVector.basis(tensor_index(x, ix(r, 0)), one),
    }
    comul_cache = {}

    def comul(i):
        got = comul_cache.get(i)
        if got is not None:
            return got
        _, l, mm = i
        out = square.unit
        for _ in range(l):
            out = square.mult_vec(out, comul_gen[a])
        for _ in range(mm):
            out = square.mult_vec(out, comul_gen[x])
        comul_cache[i] = out
        return out

    def counit(i):
        return one if i[2] == 0 else CycScalar.zero(so)

    # solve the antipode axiom on the generators
    def right_mult_by(v):
        return LinOp(lambda i: algebra.mult_vec(FreeVector.basis(i), v))

    s_a = solve_linear(right_mult_by(FreeVector.basis(a)), algebra.unit, basis_ix)
    if isinstance(s_a, NoSolution):  # pragma: no cover - a is invertible by the relations
        raise ValueError("generator a is not invertible")
    a_r = FreeVector.basis(ix(r, 0))
    s_x = solve_linear(right_mult_by(a_r), -FreeVector.basis(x), basis_ix)
    if isinstance(s_x, NoSolution):  # pragma: no cover
        raise ValueError("antipode axiom has no solution at x")

    antipode_cache = {}

    def antipode_ix(i):
        got = antipode_cache.get(i)
        if got is not None:
            return got
        _, l, mm = i
        out = algebra.unit
        for _ in range(mm):
            out = algebra.mult_vec(out, s_x)
        for _ in range(l):
            out = algebra.mult_vec(out, s_a)
        antipode_cache[i] = out
        return out

    antipode = LinOp(antipode_ix, name="S")
    inv_values = {}
    for i in basis_ix:
        sol = solve_linear(antipode, FreeVector.basis(i), basis_ix)
        if isinstance(sol, NoSolution):
            raise ValueError("antipode is not invertible")
        inv_values[i] = sol
    antipode_inv = LinOp(lambda i: inv_values[i], name="S^-1")

    hopf = HopfData(
        algebra=algebra,
        comul=comul,
        counit=counit,
        antipode=antipode,
        antipode_inv=antipode_inv,
        name=f"H({r},{n},q)",
    )

    def h1_ix(l, mm):
        return ("h1", l % n, mm)

    def h1_mult(i, j):
        (_, l, mi), (_, k, s) = i, j
        if mi + s >= n:
            return FreeVector.zero()
        return FreeVector.basis(h1_ix(l + k, mi + s), q ** (r * mi * k))

    h1 = AlgebraPresentation(
        name=f"H({r},{n})_1",
        basis=BasisFamily(indices=[h1_ix(l, mm) for l in range(n) for mm in range(n)]),
        mult=h1_mult,
        unit=FreeVector.basis(h1_ix(0, 0), one),
        scalar_order=so,
    )

    def h1_embed(i):
        _, l, mm = i
        return FreeVector.basis(ix(l * r, mm), one)

    return RadfordData(hopf=hopf, h1=h1, h1_embed=h1_embed, r=r, n=n, m=m, q=q)


@dataclass
class TorusData:
    comodule: ComoduleAlgebra
    theta_root: CycScalar
    base: AlgebraPresentation  # coinvariants presented as Laurent in w = uv
    base_embed: Callable[[Index], FreeVector]
    cleaving: LinOp
    cleaving_inv: LinOp


def build_torus_comodule(theta_root: CycScalar) -> TorusData:
    """Noncommutative torus as a comodule algebra over the Laurent Hopf algebra.

    Generators u, v with v u = e^{i theta} u v for a rational angle
    (theta_root = e^{i theta} a root of unity); the coaction grades by
    the winding difference and the coinvariants span the powers of uv.
    """
    if multiplicative_order(theta_root) is None:
        raise ValueError("theta_root must be a root of unity")
    so = theta_root.order
    one = CycScalar.one(so)
    hopf = build_laurent_hopf(scalar_order=so)

    def ix(mm, nn):
        return ("uv", mm, nn)

    basis = BasisFamily(window_fn=lambda w: [ix(mm, nn) for mm in range(-w, w + 1) for nn in range(-w, w + 1)])

    def mult(i, j):
        (_, mi, ni), (_, pj, qj) = i, j
        return FreeVector.basis(ix(mi + pj, ni + qj), theta_root ** (ni * pj))

    algebra = AlgebraPresentation(
        name="T_theta", basis=basis, mult=mult, unit=FreeVector.basis(ix(0, 0), one), scalar_order=so
    )

    def coaction(i):
        _, mm, nn = i
        return FreeVector.basis(tensor_index(i, ("t", mm - nn)), one)

    def w_ix(k):
        return ("w", k)

    base = AlgebraPresentation(
        name="k[w,w^-1]",
        basis=BasisFamily(window_fn=lambda w: [w_ix(k) for k in range(-w, w + 1)]),
        mult=lambda i, j: FreeVector.basis(w_ix(i[1] + j[1]), one),
        unit=FreeVector.basis(w_ix(0), one),
        scalar_order=so,
    )

    def base_embed(i):
        k = i[1]
        return FreeVector.basis(ix(k, k), theta_root ** (k * (k - 1) // 2))

    coinv = CoinvariantFamily(algebra=base, embed=base_embed, declared=True)
    comodule = ComoduleAlgebra(algebra=algebra, hopf=hopf, coaction=coaction, coinvariants=coinv)

    def cleaving(i):
        k = i[1]
        return FreeVector.basis(ix(k, 0) if k >= 0 else ix(0, -k), one)

    def cleaving_inv(i):
        k = i[1]
        return FreeVector.basis(ix(-k, 0) if k >= 0 else ix(0, k), one)

    return TorusData(
        comodule=comodule,
        theta_root=theta_root,
        base=base,
        base_embed=base_embed,
        cleaving=LinOp(cleaving, name="j"),
        cleaving_inv=LinOp(cleaving_inv, name="j^-1"),
    )


# ---------------------------------------------------------------------------
# structure-constant text format
# ---------------------------------------------------------------------------

_ARROW_LINE = re.compile(r"^\s*(\S+)\s+(.*?)\s*->\s*(.*?)\s*:\s*(.*)$")
_PLAIN_LINE = re.compile(r"^\s*(\S+)\s+(.*?)\s*:\s*(.*)$")


def parse_structure_constants(text: str) -> HopfData:
    """Hopf data from the line-oriented structure-constant format.

    Header: ``HOPF <name>``, ``DIM <d>``, ``SCALAR_ORDER <M>``; then one
    line per nonzero constant: ``MUL i j -> k : <scalar>``,
    ``COMUL i -> j k : <scalar>``, ``COUNIT i : <scalar>``,
    ``ANTIPODE i -> j : <scalar>``.  Unknown directives are errors.
    The unit and the inverse antipode are solved for, not declared.
    """
    name, dim, so = None, None, None
    mul, comul_t, counit_t, antipode_t = {}, {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word = line.split(None, 1)[0]
        try:
            if word == "HOPF":
                name = line.split(None, 1)[1]
            elif word == "DIM":
                dim = int(line.split(None, 1)[1])
            elif word == "SCALAR_ORDER":
                so = int(line.split(None, 1)[1])
            elif word == "MUL":
                m = _ARROW_LINE.match(line)
                i, j = (int(p) for p in m.group(2).split())
                k = int(m.group(3))
                mul.setdefault((i, j), {})[k] = parse_scalar(m.group(4))
            elif word == "COMUL":
                m = _ARROW_LINE.match(line)
                i = int(m.group(2))
                j, k = (int(p) for p in m.group(3).split())
                comul_t.setdefault(i, {})[(j, k)] = parse_scalar(m.group(4))
            elif word == "COUNIT":
                m = _PLAIN_LINE.match(line)
                counit_t[int(m.group(2))] = parse_scalar(m.group(3))
            elif word == "ANTIPODE":
                m = _ARROW_LINE.match(line)
                antipode_t.setdefault(int(m.group(2)), {})[int(m.group(3))] = parse_scalar(m.group(4))
            else:
                raise ValueError(f"line {lineno}: unknown directive {word!r}")
        except (AttributeError, IndexError, TypeError) as exc:
            raise ValueError(f"line {lineno}: malformed {word} line: {raw!r}") from exc
    if name is None or dim is None or so is None:
        raise ValueError("missing header (HOPF / DIM / SCALAR_ORDER)")

    def ix(i):
        return ("u", i)

    zero = CycScalar.zero(so)
    basis_ix = [ix(i) for i in range(dim)]

    def mult(a, b):
        row = mul.get((a[1], b[1]), {})
        return FreeVector({ix(k): c for k, c in row.items()})

    def comul(a):
        row = comul_t.get(a[1], {})
        return FreeVector({tensor_index(ix(j), ix(k)): c for (j, k), c in row.items()})

    def counit(a):
        return counit_t.get(a[1], zero)

    def antipode_ix(a):
        row = antipode_t.get(a[1], {})
        return FreeVector({ix(j): c for j, c in row.items()})

    antipode = LinOp(antipode_ix, name="S")

    # solve for the unit: u with u*e_i = e_i*u = e_i for every i
    def unit_column(u_ix):
        out = FreeVector.zero()
        for b in basis_ix:
            left = mult(u_ix, b).map_indices(lambda t: ("L", b, t))
            right = mult(b, u_ix).map_indices(lambda t: ("R", b, t))
            out = out + left + right
        return out

    target = FreeVector.zero()
    for b in basis_ix:
        target = target + FreeVector.basis(("L", b, b), CycScalar.one(so))
        target = target + FreeVector.basis(("R", b, b), CycScalar.one(so))
    unit = solve_linear(LinOp(unit_column), target, basis_ix)
    if isinstance(unit, NoSolution):
        raise ValueError("multiplication table has no unit element")

    algebra = AlgebraPresentation(
        name=name, basis=BasisFamily(indices=basis_ix), mult=mult, unit=unit, scalar_order=so
    )
    inv_values = {}
    for b in basis_ix:
        sol = solve_linear(antipode, FreeVector.basis(b), basis_ix)
        if isinstance(sol, NoSolution):
            raise ValueError("declared antipode is not invertible")
        inv_values[b] = sol
    return HopfData(
        algebra=algebra,
        comul=comul,
        counit=counit,
        antipode=antipode,
        antipode_inv=LinOp(lambda b: inv_values[b], name="S^-1"),
        name=name,
    )


def render_structure_constants(h: HopfData) -> str:
    """Inverse of parse_structure_constants for finite-dimensional data."""
    basis = h.algebra.basis.enumerate()
    pos = {ixx: i for i, ixx in enumerate(basis)}
    lines = [f"HOPF {h.name or h.algebra.name}", f"DIM {len(basis)}", f"SCALAR_ORDER {h.algebra.scalar_order}"]
    for i in basis:
        for j in basis:
            for k, c in h.algebra.mult(i, j).items():
                lines.append(f"MUL {pos[i]} {pos[j]} -> {pos[k]} : {c.to_text()}")
    for i in basis:
        for pair, c in h.comul(i).items():
            lines.append(f"COMUL {pos[i]} -> {pos[pair[1]]} {pos[pair[2]]} : {c.to_text()}")
    for i in basis:
        c = h.counit(i)
        if not c.is_zero():
            lines.append(f"COUNIT {pos[i]} : {c.to_text()}")
    for i in basis:
        for j, c in h.antipode(i).items():
            lines.append(f"ANTIPODE {pos[i]} -> {pos[j]} : {c.to_text()}")
    return "\n".join(lines) + "\n"


_VEC_TERM = re.compile(r"^\s*(?:\(\s*(?P<paren>[^()]*)\s*\)|(?P<atom>[^*\s]+))\s*(?:\*\s*(?P<idx>\d+))?\s*$")


def parse_basis_combination(text: str, index_fn=None):
    """Parse ``(scalar) * i + ... `` combinations over integer basis positions.

    Bare ``i`` means coefficient 1; scalars with internal +/- must be
    parenthesized.  index_fn maps the integer position to a basis index.
    """
    index_fn = index_fn or (lambda i: ("u", i))
    out = FreeVector.zero()
    sign = 1
    depth = 0
    chunk = ""
    chunks = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and chunk.strip() and not chunk.rstrip().endswith(("^", "*", "/")):
            chunks.append((sign, chunk))
            sign = 1 if ch == "+" else -1
            chunk = ""
        elif ch == "-" and depth == 0 and not chunk.strip():
            sign = -sign
        else:
            chunk += ch
    chunks.append((sign, chunk))
    for sgn, part in chunks:
        m = _VEC_TERM.match(part)
        if not m:
            raise ValueError(f"bad vector term {part!r}")
        if m.group("paren") is not None:
            coeff = parse_scalar(m.group("paren"))
            if m.group("idx") is None:
                raise ValueError(f"missing basis index in term {part!r}")
            ixn = int(m.group("idx"))
        elif m.group("idx") is not None:
            coeff = parse_scalar(m.group("atom"))
            ixn = int(m.group("idx"))
        else:
            coeff = CycScalar.one()
            ixn = int(m.group("atom"))
        out = out + FreeVector.basis(index_fn(ixn)).scale(coeff * sgn if sgn < 0 else coeff)
    return out
