"""Sparse exact linear algebra over cyclotomic scalars.

Vectors are finitely supported maps from opaque basis indices to
CycScalar.  An index is any nesting of tuples, ints and strings; the
convention throughout the package is ``(tag, key...)`` with a string
tag first.  Tensor product indices are ``("@", left, right)``.

Elimination is exact over the field with deterministic pivoting
(smallest index first), so kernels, images, ranks and quotients are
reproducible bit for bit.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from hopfcalc.scalars import CycScalar

__all__ = [
    "FreeVector",
    "LinOp",
    "Subspace",
    "NoSolution",
    "vector_ops",
    "kernel_image",
    "solve_linear",
    "quotient_basis",
    "QuotientSpace",
    "tensor_index",
]

Index = tuple


def index_sort_key(ix):
    """Total order on heterogeneous indices: ints, then strings, then tuples."""
    if isinstance(ix, tuple):
        return (2, tuple(index_sort_key(part) for part in ix))
    if isinstance(ix, bool):
        return (0, int(ix))
    if isinstance(ix, int):
        return (0, ix)
    return (1, str(ix))


def tensor_index(left, right) -> Index:
    return ("@", left, right)


def format_index(ix) -> str:
    if isinstance(ix, tuple):
        if len(ix) == 3 and ix[0] == "@":
            return f"({format_index(ix[1])} (x) {format_index(ix[2])})"
        if len(ix) >= 1 and isinstance(ix[0], str):
            inner = ",".join(format_index(p) for p in ix[1:])
            return f"{ix[0]}({inner})" if inner else ix[0]
        return "(" + ",".join(format_index(p) for p in ix) + ")"
    return str(ix)


class FreeVector:
    """Finitely supported linear combination of basis indices."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        data = {}
        if terms:
            for ix, c in terms.items():
                if not c.is_zero():
                    data[ix] = c
        object.__setattr__(self, "terms", data)

    def __setattr__(self, name, value):
        raise AttributeError("FreeVector is immutable")

    @staticmethod
    def zero() -> "FreeVector":
        return _ZERO

    @staticmethod
    def basis(ix, coeff: CycScalar | int = 1) -> "FreeVector":
        c = coeff if isinstance(coeff, CycScalar) else CycScalar.from_rational(coeff)
        return FreeVector({ix: c})

    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: index_sort_key(kv[0]))

    def support(self):
        return sorted(self.terms.keys(), key=index_sort_key)

    def coeff(self, ix) -> CycScalar:
        return self.terms.get(ix, CycScalar.zero())

    def leading_index(self):
        return min(self.terms.keys(), key=index_sort_key) if self.terms else None

    def __add__(self, other: "FreeVector") -> "FreeVector":
        if not other.terms:
            return self
        if not self.terms:
            return other
        data = dict(self.terms)
        for ix, c in other.terms.items():
            prev = data.get(ix)
            s = c if prev is None else prev + c
            if s.is_zero():
                data.pop(ix, None)
            else:
                data[ix] = s
        out = FreeVector.__new__(FreeVector)
        object.__setattr__(out, "terms", data)
        return out

    def __neg__(self) -> "FreeVector":
        return self.scale(CycScalar.from_rational(-1))

    def __sub__(self, other: "FreeVector") -> "FreeVector":
        return self + (-other)

    def scale(self, c: CycScalar) -> "FreeVector":
        if c.is_zero() or not self.terms:
            return _ZERO
        if c.is_one():
            return self
        return FreeVector({ix: v * c for ix, v in self.terms.items()})

    def tensor(self, other: "FreeVector") -> "FreeVector":
        data = {}
        for i, ci in self.terms.items():
            for j, cj in other.terms.items():
                data[tensor_index(i, j)] = ci * cj
        return FreeVector(data)

    def map_indices(self, fn) -> "FreeVector":
        data = {}
        for ix, c in self.terms.items():
            jx = fn(ix)
            prev = data.get(jx)
            data[jx] = c if prev is None else prev + c
        return FreeVector(data)

    def __eq__(self, other):
        if not isinstance(other, FreeVector):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(c == other.terms[ix] for ix, c in self.terms.items())

    __hash__ = None

    def __repr__(self):
        return f"FreeVector({self.to_text()})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for ix, c in self.items():
            parts.append(f"({c.to_text()})*{format_index(ix)}")
        return " + ".join(parts)


_ZERO = FreeVector.__new__(FreeVector)
object.__setattr__(_ZERO, "terms", {})


def vector_ops(v: FreeVector, w: FreeVector | None = None, c: CycScalar | None = None, op: str = "add") -> FreeVector:
    """Dispatch over the basic vector operations by name."""
    if op == "add":
        return v + w
    if op == "scale":
        return v.scale(c)
    if op == "tensor":
        return v.tensor(w)
    raise ValueError(f"unknown vector operation {op!r}")


class LinOp:
    """A linear operator given by its action on basis indices."""

    def __init__(self, action: Callable[[Index], FreeVector], name: str = ""):
        self.action = action
        self.name = name
        self._matrix_cache = {}

    def __call__(self, arg) -> FreeVector:
        if isinstance(arg, FreeVector):
            out = FreeVector.zero()
            for ix, c in arg.terms.items():
                out = out + self.action(ix).scale(c)
            return out
        return self.action(arg)

    def then(self, other: "LinOp") -> "LinOp":
        return LinOp(lambda ix: other(self.action(ix)), name=f"{other.name}.{self.name}")

    def columns(self, domain: Iterable[Index]) -> list[FreeVector]:
        """Images of the domain basis, cached per domain tuple (the exact matrix)."""
        key = tuple(domain)
        if key not in self._matrix_cache:
            self._matrix_cache[key] = [self.action(ix) for ix in key]
        return self._matrix_cache[key]

    @staticmethod
    def identity() -> "LinOp":
        return LinOp(lambda ix: FreeVector.basis(ix), name="id")

    @staticmethod
    def zero() -> "LinOp":
        return LinOp(lambda ix: FreeVector.zero(), name="0")


class _Echelon:
    """Reduced echelon rows with deterministic smallest-index pivots."""

    def __init__(self):
        self.rows = {}  # pivot index -> monic FreeVector row

    def reduce(self, v: FreeVector) -> FreeVector:
        while True:
            hit = None
            for ix in v.terms:
                if ix in self.rows:
                    hit = ix
                    break
            if hit is None:
                return v
            v = v - self.rows[hit].scale(v.terms[hit])

    def reduce_tracked(self, v, track):
        while True:
            hit = None
            for ix in v.terms:
                if ix in self.rows:
                    hit = ix
                    break
            if hit is None:
                return v, track
            c = v.terms[hit]
            v = v - self.rows[hit].scale(c)
            track = track - self._tracks[hit].scale(c)

    def insert(self, v: FreeVector) -> bool:
        v = self.reduce(v)
        if v.is_zero():
            return False
        pivot = v.leading_index()
        row = v.scale(v.terms[pivot].inverse())
        # keep reduced form: eliminate the new pivot from existing rows
        for p in list(self.rows):
            c = self.rows[p].terms.get(pivot)
            if c is not None:
                self.rows[p] = self.rows[p] - row.scale(c)
        self.rows[pivot] = row
        return True

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        return [self.rows[p] for p in sorted(self.rows, key=index_sort_key)]


class Subspace:
    """Span of finitely many vectors, held in reduced echelon form."""

    def __init__(self, generators: Iterable[FreeVector] = ()):
        self.generators = list(generators)
        self._ech = _Echelon()
        for g in self.generators:
            self._ech.insert(g)

    @property
    def dim(self) -> int:
        return self._ech.dim

    def basis(self) -> list[FreeVector]:
        return self._ech.basis()

    def pivots(self) -> list[Index]:
        return sorted(self._ech.rows, key=index_sort_key)

    def contains(self, v: FreeVector) -> bool:
        return self._ech.reduce(v).is_zero()

    def reduce(self, v: FreeVector) -> FreeVector:
        return self._ech.reduce(v)

    def add(self, v: FreeVector) -> bool:
        """Grow the span; True if v was independent."""
        grew = self._ech.insert(v)
        if grew:
            self.generators.append(v)
        return grew

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis())

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.contains_subspace(other) and other.contains_subspace(self)

    __hash__ = None


class NoSolution:
    """Returned by solve_linear when the system is inconsistent."""

    def __repr__(self):
        return "NoSolution"


NO_SOLUTION = NoSolution()


def _eliminate_tracked(columns: list[FreeVector], domain: list[Index]):
    """Echelon of the given columns while tracking domain combinations.

    Returns (echelon, kernel_vectors); echelon rows carry tracks giving,
    for each image row, a domain combination mapping onto it.
    """
    ech = _Echelon()
    ech._tracks = {}
    kernel = []
    for ix, col in zip(domain, columns):
        v, track = ech.reduce_tracked(col, FreeVector.basis(ix))
        if v.is_zero():
            kernel.append(track)
            continue
        pivot = v.leading_index()
        inv = v.terms[pivot].inverse()
        row, tr = v.scale(inv), track.scale(inv)
        for p in list(ech.rows):
            c = ech.rows[p].terms.get(pivot)
            if c is not None:
                ech.rows[p] = ech.rows[p] - row.scale(c)
                ech._tracks[p] = ech._tracks[p] - tr.scale(c)
        ech.rows[pivot] = row
        ech._tracks[pivot] = tr
    return ech, kernel


class LinearSolver:
    """One elimination of f on a fixed domain, reused across many solves."""

    def __init__(self, f: LinOp, domain: Iterable[Index]):
        self.f = f
        self.domain = sorted(domain, key=index_sort_key)
        self._ech, self._kernel = _eliminate_tracked(f.columns(self.domain), self.domain)

    def solve(self, target: FreeVector):
        residual, track = self._ech.reduce_tracked(target, FreeVector.zero())
        if not residual.is_zero():
            return NO_SOLUTION
        solution = -track
        assert self.f(solution) == target, "solver post-condition violated"
        return solution

    def kernel(self) -> Subspace:
        return Subspace(self._kernel)

    def image(self) -> Subspace:
        return Subspace(self._ech.basis())

    @property
    def rank(self) -> int:
        return self._ech.dim


class TrackedSpan:
    """Incrementally grown span with exact coordinates over inserted labels."""

    def __init__(self):
        self._ech = _Echelon()
        self._ech._tracks = {}
        self.labels: list[Index] = []
        self.vectors: dict[Index, FreeVector] = {}

    def add(self, label: Index, v: FreeVector) -> bool:
        """Insert v under the given label; False if v was dependent."""
        got, track = self._ech.reduce_tracked(v, FreeVector.zero())
        if got.is_zero():
            return False
        pivot = got.leading_index()
        inv = got.terms[pivot].inverse()
        row = got.scale(inv)
        tr = (track + FreeVector.basis(label)).scale(inv)
        for p in list(self._ech.rows):
            c = self._ech.rows[p].terms.get(pivot)
            if c is not None:
                self._ech.rows[p] = self._ech.rows[p] - row.scale(c)
                self._ech._tracks[p] = self._ech._tracks[p] - tr.scale(c)
        self._ech.rows[pivot] = row
        self._ech._tracks[pivot] = tr
        self.labels.append(label)
        self.vectors[label] = v
        return True

    def express(self, v: FreeVector):
        """Coordinates of v over the inserted labels, or NoSolution."""
        residual, track = self._ech.reduce_tracked(v, FreeVector.zero())
        if not residual.is_zero():
            return NO_SOLUTION
        return -track

    @property
    def dim(self) -> int:
        return len(self.labels)


def kernel_image(f: LinOp, domain: Iterable[Index]) -> tuple[Subspace, Subspace]:
    """Exact kernel and image of f restricted to the span of the domain basis."""
    solver = LinearSolver(f, domain)
    return solver.kernel(), solver.image()


def solve_linear(f: LinOp, target: FreeVector, domain: Iterable[Index]):
    """Some exact solution of f(v) = target with v supported on domain, or NoSolution."""
    return LinearSolver(f, domain).solve(target)


def quotient_basis(ambient: Iterable[Index], sub: Subspace) -> tuple[list[Index], LinOp]:
    """Representatives and idempotent projection for span(ambient)/sub.

    Representatives are the non-pivot ambient indices; project maps each
    ambient index onto the representative span along sub.
    """
    ambient = sorted(ambient, key=index_sort_key)
    ambient_set = set(ambient)
    for row in sub.basis():
        for ix in row.support():
            if ix not in ambient_set:
                raise ValueError(f"subspace leaves the ambient span at {format_index(ix)}")
    pivots = set(sub.pivots())
    representatives = [ix for ix in ambient if ix not in pivots]

    def project_ix(ix):
        if ix not in ambient_set:
            raise KeyError(f"index {format_index(ix)} outside the ambient basis")
        return sub.reduce(FreeVector.basis(ix))

    return representatives, LinOp(project_ix, name="project")


class QuotientSpace:
    """Quotient of a subspace by a smaller subspace, with chosen representatives.

    Used where the ambient space is itself presented by vectors (for
    instance the augmentation ideal inside a Hopf algebra).  Classes are
    tagged ``(cls_tag, position)``.
    """

    def __init__(self, space_vectors: Iterable[FreeVector], sub: Subspace, cls_tag: str = "cls"):
        self.sub = sub
        self.cls_tag = cls_tag
        self._rep_ech = _Echelon()
        self._rep_ech._tracks = {}
        self.representatives = []
        for v in space_vectors:
            reduced = sub.reduce(v)
            pos = len(self.representatives)
            got, track = self._rep_ech.reduce_tracked(reduced, FreeVector.zero())
            if got.is_zero():
                continue
            pivot = got.leading_index()
            inv = got.terms[pivot].inverse()
            row = got.scale(inv)
            tr = (track + FreeVector.basis((cls_tag, pos))).scale(inv)
            for p in list(self._rep_ech.rows):
                c = self._rep_ech.rows[p].terms.get(pivot)
                if c is not None:
                    self._rep_ech.rows[p] = self._rep_ech.rows[p] - row.scale(c)
                    self._rep_ech._tracks[p] = self._rep_ech._tracks[p] - tr.scale(c)
            self._rep_ech.rows[pivot] = row
            self._rep_ech._tracks[pivot] = tr
            self.representatives.append(reduced)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def class_indices(self) -> list[Index]:
        return [(self.cls_tag, i) for i in range(self.dim)]

    def project(self, v: FreeVector) -> FreeVector:
        """Class of v as a combination of class indices; v must lie in the space."""
        reduced = self.sub.reduce(v)
        residual, track = self._rep_ech.reduce_tracked(reduced, FreeVector.zero())
        if not residual.is_zero():
            raise ValueError("vector outside the presented space")
        return -track

    def lift(self, class_vector: FreeVector) -> FreeVector:
        """A representative vector for a combination of class indices."""
        out = FreeVector.zero()
        for (_, pos), c in class_vector.terms.items():
            out = out + self.representatives[pos].scale(c)
        return out


def intersection_dim(u: Subspace, v: Subspace) -> int:
    combined = Subspace(u.basis())
    for row in v.basis():
        combined.add(row)
    return u.dim + v.dim - combined.dim


def matrix_strings(f: LinOp, domain: Iterable[Index]) -> tuple[list[Index], list[list[str]]]:
    """Exact matrix of f on the domain as scalar strings, row-major over
    the sorted codomain indices (for report JSON)."""
    domain = sorted(domain, key=index_sort_key)
    columns = f.columns(domain)
    codomain = sorted({ix for col in columns for ix in col.terms}, key=index_sort_key)
    rows = [[col.coeff(out_ix).to_text() for col in columns] for out_ix in codomain]
    return codomain, rows


def z_window(window: int) -> list[int]:
    return list(range(-window, window + 1))


def z2_window(window: int) -> list[tuple[int, int]]:
    return [(m, n) for m in z_window(window) for n in z_window(window)]
