"""Finite-dimensional algebras given by structure constants.

A :class:`StructureAlgebra` stores its multiplication table as two padded
arrays of shape ``(d, d, K)``: ``table_idx[i, j, k]`` is a basis index (or
``-1`` for an unused slot) and ``table_coef[i, j, k]`` its coefficient in
``b_i * b_j``.  Diagram algebras have ``K == 1``; the target of a product is
kept even when its coefficient vanishes (``delta = 0``), so the combinatorial
shape of the product stays inspectable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .diagrams import (
    BrauerDiagram,
    LinkState,
    assemble,
    decompose,
    family_datum,
    star,
)
from .linalg import Field, PrimeField, field_from_name

FAMILIES = ("brauer", "tl", "jones", "group_cyclic")
DIAGRAM_FAMILIES = ("brauer", "tl", "jones")
DEFAULT_MAX_DIM = 2000


class ResourceCapError(RuntimeError):
    """A configured size limit would be exceeded."""


@dataclass(eq=False)
class StructureAlgebra:
    field: Field
    labels: list
    table_idx: np.ndarray
    table_coef: np.ndarray
    unit: np.ndarray
    aug: np.ndarray
    family: str
    n: int
    delta: object = None
    levels: np.ndarray | None = None
    # basis index -> (p, sigma, q) for diagram families
    coords: list | None = None
    star_perm: np.ndarray | None = None
    # levels removed by quotienting; the datum of the quotient is the rest
    dropped: frozenset = frozenset()
    parent_index: np.ndarray | None = None
    _lookup: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        d = len(self.labels)
        if self.table_idx.shape[:2] != (d, d) or self.table_coef.shape != self.table_idx.shape:
            raise ValueError("multiplication table does not match the basis size")
        self._lookup = {lab: i for i, lab in enumerate(self.labels)}
        if self.parent_index is None:
            self.parent_index = np.arange(d)

    # -- basic data -------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def is_diagram(self) -> bool:
        return self.family in DIAGRAM_FAMILIES

    @property
    def descriptor(self) -> str:
        name = {"brauer": "Br", "tl": "TL", "jones": "J", "group_cyclic": "C"}[self.family]
        if self.family == "group_cyclic":
            base = f"{self.field.descriptor}[C_{self.n}]"
        else:
            base = f"{name}_{self.n}({self.field.render(self.delta)})"
        if self.dropped:
            base += f"/I{{{','.join(map(str, sorted(self.dropped)))}}}"
        return base

    def index(self, label) -> int:
        return self._lookup[label]

    def basis(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, {i: self.field.one})

    def element(self, coeffs: dict) -> "AlgebraElement":
        return AlgebraElement.make(self, coeffs)

    def one(self) -> "AlgebraElement":
        return AlgebraElement.from_dense(self, self.unit)

    def level(self, i: int) -> int:
        return int(self.levels[i])

    # -- dense arithmetic ---------------------------------------------------
    def zeros(self, *shape) -> np.ndarray:
        return self.field.zeros(shape if shape else (self.dim,))

    def basis_product(self, i: int, j: int) -> dict[int, object]:
        out: dict[int, object] = {}
        f = self.field
        for k, c in zip(self.table_idx[i, j], self.table_coef[i, j]):
            if k < 0 or f.is_zero(c):
                continue
            k = int(k)
            out[k] = f.add(out.get(k, f.zero), c)
        return {k: c for k, c in out.items() if not f.is_zero(c)}

    def right_orbit(self, x: np.ndarray) -> np.ndarray:
        """Rows ``b_i * x`` for every basis element, ``x`` a dense (g, d) block vector.

        Returns an array of shape ``(d, g * d)``.
        """
        x = np.atleast_2d(x)
        g, d = x.shape
        f = self.field
        out = f.zeros((d, g * d))
        rows = np.broadcast_to(np.arange(d)[:, None, None], self.table_idx.shape)
        valid = self.table_idx >= 0
        r = rows[valid]
        tgt = self.table_idx[valid]
        for block in range(g):
            xb = x[block]
            if not (xb != 0).any():
                continue
            vals = f.reduce(np.broadcast_to(xb[None, :, None], self.table_idx.shape)[valid] * self.table_coef[valid])
            nz = vals != 0
            acc = f.zeros((d, d))
            np.add.at(acc, (r[nz], tgt[nz]), vals[nz])
            out[:, block * d : (block + 1) * d] = f.reduce(acc)
        return out

    def left_orbit(self, x: np.ndarray) -> np.ndarray:
        """Rows ``x * b_j`` for every basis element ``b_j`` (``x`` dense of length d)."""
        d = self.dim
        f = self.field
        cols = np.broadcast_to(np.arange(d)[None, :, None], self.table_idx.shape)
        valid = self.table_idx >= 0
        vals = f.reduce(np.broadcast_to(np.asarray(x)[:, None, None], self.table_idx.shape)[valid] * self.table_coef[valid])
        acc = f.zeros((d, d))
        nz = vals != 0
        np.add.at(acc, (cols[valid][nz], self.table_idx[valid][nz]), vals[nz])
        return f.reduce(acc)

    def mult_dense(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        f = self.field
        out = f.zeros((self.dim,))
        xi = np.flatnonzero(np.asarray(x) != 0)
        yj = np.flatnonzero(np.asarray(y) != 0)
        if xi.size == 0 or yj.size == 0:
            return out
        idx = self.table_idx[np.ix_(xi, yj)]
        coef = self.table_coef[np.ix_(xi, yj)]
        w = f.reduce(np.asarray(x)[xi][:, None, None] * np.asarray(y)[yj][None, :, None])
        vals = f.reduce(np.broadcast_to(w, idx.shape) * coef)
        valid = idx >= 0
        np.add.at(out, idx[valid], vals[valid])
        return f.reduce(out)

    def aug_dense(self, x: np.ndarray) -> object:
        return self.field.reduce(np.asarray([np.dot(np.asarray(x), self.aug)]))[0]


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Sparse element ``{basis index: nonzero scalar}`` of a fixed algebra."""

    owner: StructureAlgebra
    coeffs: dict

    @classmethod
    def make(cls, owner: StructureAlgebra, coeffs: dict) -> "AlgebraElement":
        f = owner.field
        clean = {}
        for k, c in coeffs.items():
            k = int(k)
            if not 0 <= k < owner.dim:
                raise IndexError(f"basis index {k} out of range")
            c = f(c)
            if not f.is_zero(c):
                clean[k] = c
        return cls(owner, clean)

    @classmethod
    def from_dense(cls, owner: StructureAlgebra, vec: np.ndarray) -> "AlgebraElement":
        vec = np.asarray(vec)
        return cls(owner, {int(i): owner.field(vec[i]) for i in np.flatnonzero(vec != 0)})

    def to_dense(self) -> np.ndarray:
        out = self.owner.field.zeros((self.owner.dim,))
        for k, c in self.coeffs.items():
            out[k] = c
        return out

    def _check(self, other: "AlgebraElement"):
        if other.owner is not self.owner:
            raise ValueError("elements belong to different algebras")

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        f = self.owner.field
        s = f(other)
        return AlgebraElement.make(self.owner, {k: f.mul(c, s) for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        f = self.owner.field
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = f.add(out.get(k, f.zero), c)
        return AlgebraElement.make(self.owner, out)

    def __neg__(self) -> "AlgebraElement":
        f = self.owner.field
        return AlgebraElement(self.owner, {k: f.neg(c) for k, c in self.coeffs.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return other.owner is self.owner and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> set[int]:
        return set(self.coeffs)

    def __repr__(self):
        f = self.owner.field
        if not self.coeffs:
            return "0"
        return " + ".join(f"({f.render(c)})*[{self.owner.labels[k]}]" for k, c in sorted(self.coeffs.items()))


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    A = a.owner
    f = A.field
    out: dict[int, object] = {}
    for i, ci in a.coeffs.items():
        for j, cj in b.coeffs.items():
            w = f.mul(ci, cj)
            for k, c in A.basis_product(i, j).items():
                out[k] = f.add(out.get(k, f.zero), f.mul(w, c))
    return AlgebraElement.make(A, out)


def apply_aug(a: AlgebraElement):
    f = a.owner.field
    total = f.zero
    for k, c in a.coeffs.items():
        total = f.add(total, f.mul(c, a.owner.aug[k]))
    return total


def star_elem(a: AlgebraElement) -> AlgebraElement:
    A = a.owner
    if A.star_perm is None:
        raise ValueError(f"{A.descriptor} has no anti-involution on record")
    return AlgebraElement(A, {int(A.star_perm[k]): c for k, c in a.coeffs.items()})


# ---------------------------------------------------------------------------
# construction


def _coef_array(field: Field, values: list) -> np.ndarray:
    if field.dtype is object:
        arr = np.empty(len(values), dtype=object)
        arr[:] = values
        return arr
    return np.array(values, dtype=np.int64)


def diagram_basis(family: str, n: int) -> list[tuple[BrauerDiagram, tuple]]:
    """Canonical basis order: by level, then left state, group element, right state."""
    levels, groups, states = family_datum(family, n)
    out = []
    for t in levels:
        for p in states[t]:
            for sigma in groups[t]:
                for q in states[t]:
                    out.append((assemble(p, sigma, q), (p, sigma, q)))
    return out


def build_algebra(
    family: str,
    n: int,
    delta=0,
    field: Field | str | int = 2,
    max_dim: int = DEFAULT_MAX_DIM,
) -> StructureAlgebra:
    """Brauer, Temperley-Lieb or Jones annular algebra, or a cyclic group algebra."""
    if not isinstance(field, (PrimeField,)) and not hasattr(field, "dtype"):
        field = field_from_name(field)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if family == "group_cyclic":
        return _build_cyclic(n, field, max_dim)
    delta = field(delta)
    basis = diagram_basis(family, n)
    d = len(basis)
    if d > max_dim:
        raise ResourceCapError(f"{family} n={n} has dimension {d} above the cap {max_dim}")
    if n > _kernels.MAX_KEY_STRANDS:
        raise ResourceCapError(f"product tables are limited to n <= {_kernels.MAX_KEY_STRANDS}")
    labels = [b for b, _ in basis]
    coords = [c for _, c in basis]
    if n == 0:
        keys = np.zeros((1, 1), dtype=np.uint64)
        loops = np.zeros((1, 1), dtype=np.int64)
        basis_keys = np.zeros(1, dtype=np.uint64)
    else:
        mats = np.array([b.matching for b in labels], dtype=np.int64)
        keys, loops = _kernels.product_table(mats)
        basis_keys = _kernels.matching_keys(mats)
    order = np.argsort(basis_keys)
    pos = np.searchsorted(basis_keys[order], keys)
    pos = np.minimum(pos, d - 1)
    idx = order[pos]
    if not (basis_keys[idx] == keys).all():
        raise ValueError(f"{family} n={n}: basis is not closed under multiplication")
    powers = _coef_array(field, [field.pow(delta, k) for k in range(n + 1)])
    coef = powers[loops]
    levels = np.array([p.t for (p, _, _) in coords], dtype=np.int64)
    aug = _coef_array(field, [field.one if lev == n else field.zero for lev in levels])
    unit = field.zeros((d,))
    unit[labels.index(BrauerDiagram.identity(n)) if n else 0] = field.one
    lookup = {lab: i for i, lab in enumerate(labels)}
    star_perm = np.array([lookup[star(b)] for b in labels], dtype=np.int64)
    return StructureAlgebra(
        field=field,
        labels=labels,
        table_idx=idx.reshape(d, d, 1).astype(np.int64),
        table_coef=coef.reshape(d, d, 1),
        unit=unit,
        aug=aug,
        family=family,
        n=n,
        delta=delta,
        levels=levels,
        coords=coords,
        star_perm=star_perm,
    )


def _build_cyclic(n: int, field: Field, max_dim: int) -> StructureAlgebra:
    if n < 1:
        raise ValueError("the cyclic group algebra needs n >= 1")
    if n > max_dim:
        raise ResourceCapError(f"C_{n} has dimension {n} above the cap {max_dim}")
    g = np.arange(n)
    idx = ((g[:, None] + g[None, :]) % n).reshape(n, n, 1)
    coef = field.zeros((n, n, 1))
    coef[...] = field.one
    unit = field.zeros((n,))
    unit[0] = field.one
    aug = field.zeros((n,))
    aug[:] = field.one
    return StructureAlgebra(
        field=field,
        labels=list(range(n)),
        table_idx=idx.astype(np.int64),
        table_coef=coef,
        unit=unit,
        aug=aug,
        family="group_cyclic",
        n=n,
        delta=None,
        star_perm=(-g) % n,
    )


# ---------------------------------------------------------------------------
# ideals and quotients


@dataclass(frozen=True)
class IdealBasis:
    """A subset of the basis of ``owner``, spanning an ideal."""

    owner: StructureAlgebra = dc_field(compare=False, hash=False)
    indices: tuple[int, ...]

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in set(self.indices)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.owner.dim, dtype=bool)
        m[list(self.indices)] = True
        return m

    def contains_element(self, a: AlgebraElement) -> bool:
        return a.support() <= set(self.indices)


def level_set(A: StructureAlgebra) -> list[int]:
    """Levels of the datum still present in ``A``."""
    if A.levels is None:
        raise ValueError(f"{A.descriptor} carries no level data")
    return sorted(set(int(t) for t in A.levels))


def ideal_I(A: StructureAlgebra, X: Iterable[int]) -> IdealBasis:
    X = set(X)
    return IdealBasis(A, tuple(int(i) for i in np.flatnonzero(np.isin(A.levels, list(X)))))


def ideal_J(A: StructureAlgebra, q: LinkState) -> IdealBasis:
    return IdealBasis(A, tuple(i for i, (_, _, qq) in enumerate(A.coords) if qq == q))


def ideal_J_leq(A: StructureAlgebra, q: LinkState, leq: Callable[[LinkState, LinkState], bool]) -> IdealBasis:
    return IdealBasis(A, tuple(i for i, (_, _, qq) in enumerate(A.coords) if leq(qq, q)))


def closure_violations(A: StructureAlgebra, ideal: IdealBasis, side: str = "both") -> list[tuple[int, int, int]]:
    """Basis products leaving ``ideal``: triples ``(i, j, k)`` with ``b_i b_j`` hitting ``b_k``."""
    inside = ideal.mask()
    idx = list(ideal.indices)
    bad = []
    checks = []
    if side in ("left", "both"):
        checks.append((np.arange(A.dim), np.array(idx, dtype=np.int64)))
    if side in ("right", "both"):
        checks.append((np.array(idx, dtype=np.int64), np.arange(A.dim)))
    for rows, cols in checks:
        if rows.size == 0 or cols.size == 0:
            continue
        T = A.table_idx[np.ix_(rows, cols)]
        C = A.table_coef[np.ix_(rows, cols)]
        live = (T >= 0) & (C != 0)
        out = live & ~inside[np.where(T >= 0, T, 0)]
        for a, b, k in zip(*np.nonzero(out)):
            bad.append((int(rows[a]), int(cols[b]), int(T[a, b, k])))
    return bad


def quotient(A: StructureAlgebra, X: Iterable[int]) -> StructureAlgebra:
    """``A / I_X`` for a downward closed set of levels ``X``."""
    X = set(int(x) for x in X)
    present = level_set(A)
    if not X & set(present):
        return A
    if set(present) <= X:
        raise ValueError("cannot quotient by every level")
    top = max(X & set(present))
    if any(t <= top and t not in X for t in present):
        raise ValueError(f"level set {sorted(X)} is not downward closed")
    keep = np.flatnonzero(~np.isin(A.levels, list(X)))
    new_of = -np.ones(A.dim, dtype=np.int64)
    new_of[keep] = np.arange(keep.size)
    T = A.table_idx[np.ix_(keep, keep)]
    C = A.table_coef[np.ix_(keep, keep)].copy()
    T2 = np.where(T >= 0, new_of[np.where(T >= 0, T, 0)], -1)
    C[T2 < 0] = A.field.zero
    star_perm = None if A.star_perm is None else new_of[A.star_perm[keep]]
    return StructureAlgebra(
        field=A.field,
        labels=[A.labels[i] for i in keep],
        table_idx=T2,
        table_coef=C,
        unit=A.unit[keep].copy(),
        aug=A.aug[keep].copy(),
        family=A.family,
        n=A.n,
        delta=A.delta,
        levels=A.levels[keep].copy(),
        coords=None if A.coords is None else [A.coords[i] for i in keep],
        star_perm=star_perm,
        dropped=frozenset(A.dropped | X),
        parent_index=A.parent_index[keep].copy(),
    )


# ---------------------------------------------------------------------------
# structural checks


def check_unit(A: StructureAlgebra) -> bool:
    u = A.unit
    eye = A.field.eye(A.dim)
    return bool((A.left_orbit(u) == eye).all() and (A.right_orbit(u[None, :]) == eye).all())


def _monomial(A: StructureAlgebra) -> bool:
    return A.table_idx.shape[2] == 1


def associativity_violations(A: StructureAlgebra, limit: int = 10) -> list[tuple[int, int, int]]:
    """Triples of basis indices with ``(b_i b_j) b_k != b_i (b_j b_k)``."""
    d = A.dim
    f = A.field
    if _monomial(A):
        T = A.table_idx[:, :, 0]
        C = A.table_coef[:, :, 0]
        Ts = np.where(T >= 0, T, 0)
        # (b_i b_j) b_k, indexed [i, j, k]
        l_idx = T[Ts]
        l_coef = f.reduce(C[:, :, None] * C[Ts, :])
        l_idx = np.where(T[:, :, None] >= 0, l_idx, -1)
        # b_i (b_j b_k), indexed [i, j, k]
        r_idx = T[:, Ts]
        r_coef = f.reduce(C[None, :, :] * C[:, Ts])
        r_idx = np.where(T[None, :, :] >= 0, r_idx, -1)
        l_zero = (l_coef == 0) | (l_idx < 0)
        r_zero = (r_coef == 0) | (r_idx < 0)
        bad = ~(l_zero & r_zero) & ((l_idx != r_idx) | (l_coef != r_coef) | (l_zero != r_zero))
        return [tuple(int(x) for x in t) for t in np.argwhere(bad)[:limit]]
    eye = f.eye(d)
    bad = []
    for i in range(d):
        for j in range(d):
            bij = A.mult_dense(eye[i], eye[j])
            for k in range(d):
                if (A.mult_dense(bij, eye[k]) != A.mult_dense(eye[i], A.mult_dense(eye[j], eye[k]))).any():
                    bad.append((i, j, k))
                    if len(bad) >= limit:
                        return bad
    return bad


def aug_violations(A: StructureAlgebra) -> list[tuple[int, int]]:
    """Pairs with ``aug(b_i b_j) != aug(b_i) aug(b_j)``."""
    f = A.field
    valid = A.table_idx >= 0
    hit = A.aug[np.where(valid, A.table_idx, 0)]
    contrib = f.reduce(np.where(valid, hit, f.zero) * A.table_coef)
    lhs = f.reduce(contrib.sum(axis=2))
    rhs = f.reduce(np.outer(A.aug, A.aug))
    return [(int(i), int(j)) for i, j in np.argwhere(lhs != rhs)]


def star_violations(A: StructureAlgebra) -> list[tuple[int, int]]:
    """Pairs with ``star(b_i b_j) != star(b_j) star(b_i)``; ``(-1, -1)`` flags a
    star map that is not an involution."""
    s = A.star_perm
    if s is None:
        return []
    bad = []
    if int(np.count_nonzero(s[s] != np.arange(A.dim))):
        bad.append((-1, -1))
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = {int(s[k]): c for k, c in A.basis_product(i, j).items()}
            if lhs != A.basis_product(int(s[j]), int(s[i])):
                bad.append((i, j))
    return bad


# ---------------------------------------------------------------------------
# dump / load


def dump_algebra(A: StructureAlgebra) -> str:
    """Serialize basis labels and the multiplication table as JSON text."""
    f = A.field
    entries = []
    for i in range(A.dim):
        for j in range(A.dim):
            terms = [
                [int(k), f.render(c)]
                for k, c in zip(A.table_idx[i, j], A.table_coef[i, j])
                if k >= 0
            ]
            if terms:
                entries.append([i, j, terms])
    doc = {
        "family": A.family,
        "n": A.n,
        "ring": f.name,
        "delta": None if A.delta is None else f.render(A.delta),
        "dropped": sorted(A.dropped),
        "labels": [str(lab) for lab in A.labels],
        "levels": None if A.levels is None else [int(t) for t in A.levels],
        "unit": [f.render(c) for c in A.unit],
        "aug": [f.render(c) for c in A.aug],
        "star": None if A.star_perm is None else [int(s) for s in A.star_perm],
        "table": entries,
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def load_algebra(text: str) -> StructureAlgebra:
    doc = json.loads(text)
    f = field_from_name(doc["ring"])
    family = doc["family"]
    n = int(doc["n"])
    if family == "group_cyclic":
        labels = [int(x) for x in doc["labels"]]
        coords = None
    else:
        labels = [BrauerDiagram.parse(x) for x in doc["labels"]]
        coords = [decompose(b) for b in labels]
    d = len(labels)
    K = max([len(e[2]) for e in doc["table"]] + [1])
    idx = -np.ones((d, d, K), dtype=np.int64)
    coef = f.zeros((d, d, K))
    for i, j, terms in doc["table"]:
        for slot, (k, c) in enumerate(terms):
            idx[i, j, slot] = k
            coef[i, j, slot] = f.parse(c)
    return StructureAlgebra(
        field=f,
        labels=labels,
        table_idx=idx,
        table_coef=coef,
        unit=_coef_array(f, [f.parse(c) for c in doc["unit"]]),
        aug=_coef_array(f, [f.parse(c) for c in doc["aug"]]),
        family=family,
        n=n,
        delta=None if doc["delta"] is None else f.parse(doc["delta"]),
        levels=None if doc["levels"] is None else np.array(doc["levels"], dtype=np.int64),
        coords=coords,
        star_perm=None if doc["star"] is None else np.array(doc["star"], dtype=np.int64),
        dropped=frozenset(doc.get("dropped", [])),
    )


def mutate_entry(A: StructureAlgebra, i: int, j: int, coef=None, target: int | None = None) -> StructureAlgebra:
    """Copy of ``A`` with one product entry altered (for fault injection)."""
    idx = A.table_idx.copy()
    cf = A.table_coef.copy()
    f = A.field
    if target is not None:
        idx[i, j, 0] = target
    if coef is not None:
        cf[i, j, 0] = f(coef)
    else:
        cf[i, j, 0] = f.add(cf[i, j, 0], f.one)
    return StructureAlgebra(
        field=f,
        labels=list(A.labels),
        table_idx=idx,
        table_coef=cf,
        unit=A.unit.copy(),
        aug=A.aug.copy(),
        family=A.family,
        n=A.n,
        delta=A.delta,
        levels=None if A.levels is None else A.levels.copy(),
        coords=A.coords,
        star_perm=A.star_perm,
        dropped=A.dropped,
        parent_index=A.parent_index,
    )
