"""Naive-cellular and diagram-like axiom checks, link modules and bilinear forms.

Everything here reads coefficients straight off the multiplication table of
a diagram algebra (or one of its quotients); closed-form predictions from
pair graphs live in the tests and in :func:`form_closed_form`, never in the
verifiers themselves.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import AlgebraElement, StructureAlgebra
from .diagrams import (
    LinkState,
    Permutation,
    assemble,
    compose,
    family_datum,
    inverse,
    pair_graph,
)
from .linalg import Matrix


@dataclass
class CellDatum:
    """Levels, groups, link states and the basis bijection of a diagram algebra."""

    owner: StructureAlgebra
    levels: list[int]
    groups: dict[int, list[Permutation]]
    states: dict[int, list[LinkState]]
    index: dict[tuple, int]
    group_pos: dict[int, dict[Permutation, int]]
    state_pos: dict[int, dict[LinkState, int]]

    @classmethod
    def from_algebra(cls, A: StructureAlgebra) -> "CellDatum":
        if not A.is_diagram:
            raise ValueError(f"{A.descriptor} has no diagram datum")
        all_levels, groups, states = family_datum(A.family, A.n)
        levels = [t for t in all_levels if t not in A.dropped]
        groups = {t: groups[t] for t in levels}
        states = {t: states[t] for t in levels}
        index = {}
        for t in levels:
            for p in states[t]:
                for s in groups[t]:
                    for q in states[t]:
                        b = assemble(p, s, q)
                        index[(p, s, q)] = A._lookup.get(b, -1)
        return cls(
            owner=A,
            levels=levels,
            groups=groups,
            states=states,
            index=index,
            group_pos={t: {g: k for k, g in enumerate(groups[t])} for t in levels},
            state_pos={t: {s: k for k, s in enumerate(states[t])} for t in levels},
        )

    def C(self, p: LinkState, sigma: Permutation, q: LinkState) -> int:
        return self.index[(p, sigma, q)]

    def identity(self, t: int) -> Permutation:
        return tuple(range(t))


@dataclass
class Report:
    """Outcome of a verification pass; certificates name offending tuples."""

    name: str
    passed: bool = True
    certificates: list = dc_field(default_factory=list)
    checked: int = 0

    def fail(self, *cert, limit: int = 20):
        self.passed = False
        if len(self.certificates) < limit:
            self.certificates.append(cert)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "certificates": [[str(x) for x in c] for c in self.certificates],
        }


# ---------------------------------------------------------------------------
# axioms


def verify_naive_cellular(A: StructureAlgebra, datum: CellDatum | None = None) -> Report:
    """Check the basis bijection, the anti-involution and left equivariance."""
    datum = datum or CellDatum.from_algebra(A)
    rep = Report("naive-cellular")
    # W1: the datum indexes every basis element exactly once
    hits = [i for i in datum.index.values()]
    if -1 in hits:
        for key, i in datum.index.items():
            if i == -1:
                rep.fail("W1-missing", key)
    if len(set(hits) - {-1}) != len(hits) - hits.count(-1) or len(set(hits) - {-1}) != A.dim:
        rep.fail("W1-count", len(set(hits) - {-1}), A.dim)
    if not rep.passed:
        return rep
    coords = {i: key for key, i in datum.index.items()}
    level_of = {i: len(key[1]) for i, key in coords.items()}

    # W2: star maps C_{p,q}^s to C_{q,p}^{s^-1} and reverses products
    s = A.star_perm
    for i, (p, sig, q) in coords.items():
        if s is None or s[i] != datum.index[(q, inverse(sig), p)]:
            rep.fail("W2-basis", i)
    if not rep.passed:
        return rep
    for i, j in _anti_violations(A):
        rep.fail("W2-anti", i, j)
    rep.checked += A.dim * A.dim

    # W3: a * C_{p,q}^s, kept at level t, has coefficients r_a(p', s's^-1, p)
    for t in datum.levels:
        G = datum.groups[t]
        for a in range(A.dim):
            for p in datum.states[t]:
                ref = None
                for sig in G:
                    sig_inv = inverse(sig)
                    for q in datum.states[t]:
                        j = datum.index[(p, sig, q)]
                        sig_map = {}
                        for k, c in A.basis_product(a, j).items():
                            if level_of[k] < t:
                                continue
                            p2, sig2, q2 = coords[k]
                            if level_of[k] > t or q2 != q:
                                rep.fail("W3-shape", a, j, k)
                                continue
                            sig_map[(p2, compose(sig2, sig_inv))] = c
                        rep.checked += 1
                        if ref is None:
                            ref = sig_map
                        elif sig_map != ref:
                            rep.fail("W3-depends", a, p, sig, q)
    return rep


def _anti_violations(A: StructureAlgebra) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` with ``star(b_i b_j) != star(b_j) star(b_i)``."""
    s = A.star_perm
    d = A.dim
    if A.table_idx.shape[2] == 1:
        T, C = A.table_idx[:, :, 0], A.table_coef[:, :, 0]
        live = (T >= 0) & (C != 0)
        lhs_idx = np.where(live, s[np.maximum(T, 0)], -1)
        rT, rC = T[np.ix_(s, s)].T, C[np.ix_(s, s)].T
        rlive = (rT >= 0) & (rC != 0)
        rhs_idx = np.where(rlive, rT, -1)
        bad = (lhs_idx != rhs_idx) | (live & (C != rC))
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(bad))]
    out = []
    for i in range(d):
        for j in range(d):
            lhs = {int(s[k]): c for k, c in A.basis_product(i, j).items()}
            if lhs != A.basis_product(int(s[j]), int(s[i])):
                out.append((i, j))
    return out


def _first_conflict(keys: np.ndarray, values: list[np.ndarray]) -> int | None:
    """Position of an entry whose values differ from another entry with the same key."""
    if keys.size == 0:
        return None
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    start = np.r_[True, k[1:] != k[:-1]]
    leader = order[np.maximum.accumulate(np.where(start, np.arange(k.size), 0))]
    bad = np.zeros(k.size, dtype=bool)
    for v in values:
        bad |= np.asarray(v[order] != v[leader], dtype=bool)
    hits = np.flatnonzero(bad)
    return int(order[hits[0]]) if hits.size else None


def verify_diagram_like(A: StructureAlgebra, datum: CellDatum | None = None) -> Report:
    """Every basis product is a multiple of one basis element, with the five
    dependency conditions checked by grouping over all free variables."""
    datum = datum or CellDatum.from_algebra(A)
    rep = Report("diagram-like")
    d = A.dim
    if A.table_idx.shape[2] != 1 or (A.table_idx[:, :, 0] < 0).any():
        rep.fail("not-monomial")
        return rep
    coords = [None] * d
    for key, i in datum.index.items():
        if i >= 0:
            coords[i] = key
    if any(c is None for c in coords):
        rep.fail("W1-incomplete")
        return rep
    # integer codes for states, permutations and levels
    state_ids: dict[LinkState, int] = {}
    perm_ids: dict[Permutation, int] = {}
    for t in datum.levels:
        for s in datum.states[t]:
            state_ids.setdefault(s, len(state_ids))
        for g in datum.groups[t]:
            perm_ids.setdefault(g, len(perm_ids))
    P = np.array([state_ids[c[0]] for c in coords])
    S = np.array([perm_ids[c[1]] for c in coords])
    Q = np.array([state_ids[c[2]] for c in coords])
    L = np.array([len(c[1]) for c in coords])
    nS, nG = len(state_ids), len(perm_ids)
    # sigma * sigma2^-1 as a code, via a composition table over all levels
    perms = sorted(perm_ids, key=perm_ids.get)
    comp_inv = np.full((nG, nG), -1, dtype=np.int64)
    for a in perms:
        for b in perms:
            if len(a) == len(b):
                comp_inv[perm_ids[a], perm_ids[b]] = perm_ids[compose(a, inverse(b))]

    T = A.table_idx[:, :, 0]
    kappa = A.table_coef[:, :, 0]
    i1, i2 = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    i1, i2, T, kappa = i1.ravel(), i2.ravel(), T.ravel(), kappa.ravel()
    lam, lam1, lam2 = L[T], L[i1], L[i2]
    p1, s1, q1 = P[i1], S[i1], Q[i1]
    p2, s2, q2 = P[i2], S[i2], Q[i2]
    p, s, q = P[T], S[T], Q[T]
    rep.checked = d * d

    def report(tag, pos):
        if pos is not None:
            rep.fail(tag, int(i1[pos]), int(i2[pos]), int(T[pos]))

    bad = np.flatnonzero((lam > lam1) | (lam > lam2))
    if bad.size:
        report("dl1", bad[0])
    report("dl2", _first_conflict(q1 * nS + p2, [lam, kappa]))
    report("dl3", _first_conflict(((s1 * nS + q1) * nS + p2) * nG + s2, [s]))
    report("dl4", _first_conflict(((p1 * nG + s1) * nS + q1) * nS + p2, [p]))
    top = np.flatnonzero(lam == lam2)
    bad = top[q[top] != q2[top]]
    if bad.size:
        report("dl5-q", bad[0])
    ratio = comp_inv[s[top], s2[top]]
    pos = _first_conflict(((s1[top] * nS + q1[top]) * nS + p2[top]), [ratio])
    report("dl5-sigma", None if pos is None else top[pos])
    return rep


# ---------------------------------------------------------------------------
# link modules and forms


def _coefficient(A: StructureAlgebra, i: int, j: int, target: int):
    return A.basis_product(i, j).get(target, A.field.zero)


def r_coefficients(A: StructureAlgebra, datum: CellDatum, a: AlgebraElement, lam: int, p: LinkState):
    """``{(p', s'): r_a(p', s', p)}`` read off ``a * C_{p,q}^1`` for a fixed ``q``."""
    f = A.field
    q = datum.states[lam][0]
    one = datum.identity(lam)
    j = datum.C(p, one, q)
    out = {}
    for pp in datum.states[lam]:
        for s in datum.groups[lam]:
            k = datum.C(pp, s, q)
            c = f.zero
            for i, ci in a.coeffs.items():
                c = f.add(c, f.mul(ci, _coefficient(A, i, j, k)))
            out[(pp, s)] = c
    return out


def link_module_matrix(A: StructureAlgebra, datum: CellDatum, a: AlgebraElement, lam: int) -> Matrix:
    """Matrix of ``a`` acting on the link module: entry ``(p', p)`` sums ``r_a`` over the group."""
    f = A.field
    M = datum.states[lam]
    pos = datum.state_pos[lam]
    out = f.zeros((len(M), len(M)))
    for col, p in enumerate(M):
        for (pp, _), c in r_coefficients(A, datum, a, lam, p).items():
            out[pos[pp], col] = f.add(out[pos[pp], col], c)
    return Matrix(f, out)


def s_function(
    A: StructureAlgebra,
    datum: CellDatum,
    lam: int,
    sigma1: Permutation,
    q1: LinkState,
    p2: LinkState,
    rho: Permutation,
    p1: LinkState | None = None,
    q2: LinkState | None = None,
    sigma2: Permutation | None = None,
):
    """``s(sigma1, q1, p2, rho)``: the coefficient of ``C_{p1,q2}^{rho sigma2}`` in
    ``C_{p1,q1}^{sigma1} C_{p2,q2}^{sigma2}``, with ``p1``, ``q2`` defaulting to
    the first link state and ``sigma2`` to the identity."""
    M = datum.states[lam]
    p1 = M[0] if p1 is None else p1
    q2 = M[0] if q2 is None else q2
    sigma2 = datum.identity(lam) if sigma2 is None else sigma2
    i = datum.C(p1, sigma1, q1)
    j = datum.C(p2, sigma2, q2)
    k = datum.C(p1, compose(rho, sigma2), q2)
    return _coefficient(A, i, j, k)


def bilinear_form(
    A: StructureAlgebra,
    datum: CellDatum,
    lam: int,
    q: LinkState,
    p: LinkState,
    tau: Permutation,
    p1: LinkState | None = None,
    q2: LinkState | None = None,
):
    """``<C_q, C_p>_tau``: coefficient of ``C_{p1,q2}^tau`` in ``C_{p1,q}^1 C_{p,q2}^1``."""
    if not datum.states.get(lam):
        raise ValueError(f"no link states at level {lam}")
    one = datum.identity(lam)
    return s_function(A, datum, lam, one, q, p, tau, p1=p1, q2=q2, sigma2=one)


@dataclass
class GramTable:
    lam: int
    rows: list[LinkState]
    cols: list[tuple[LinkState, Permutation]]
    values: dict[tuple[LinkState, LinkState, Permutation], object]
    field: object

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if not self.rows:
            return ""
        w.writerow(["q"] + [f"{p} | {list(t)}" for p, t in self.cols])
        for q in self.rows:
            w.writerow([str(q)] + [self.field.render(self.values[(q, p, t)]) for p, t in self.cols])
        return buf.getvalue()


def gram_table(A: StructureAlgebra, datum: CellDatum, lam: int) -> GramTable:
    M = datum.states.get(lam, [])
    G = datum.groups.get(lam, [])
    values = {}
    for q in M:
        for p in M:
            for t in G:
                values[(q, p, t)] = bilinear_form(A, datum, lam, q, p, t)
    return GramTable(lam, list(M), [(p, t) for p in M for t in G], values, A.field)


def form_closed_form(A: StructureAlgebra, q: LinkState, p: LinkState) -> tuple[int, int]:
    """``(pair set size, loop count)`` of the pair graph of ``q`` and ``p``."""
    g = pair_graph(q, p)
    return g.pair_set_size, g.loop_count


def check_hypothesis_dagger(A: StructureAlgebra, datum: CellDatum, t: int) -> tuple[bool, dict]:
    """Search each ``q`` at level ``t`` for a ``p`` whose pair graph has a full
    pair set and an invertible power of delta; returns the first witnesses."""
    return hypothesis_dagger(datum.states.get(t, []), A.field, A.delta, t)


def hypothesis_dagger(states: list[LinkState], field, delta, t: int) -> tuple[bool, dict]:
    """:func:`check_hypothesis_dagger` on a bare list of link states."""
    witnesses = {}
    for q in states:
        for p in states:
            g = pair_graph(q, p)
            if g.pair_set_size == t and field.is_unit(field.pow(delta, g.loop_count)):
                witnesses[q] = p
                break
        else:
            return False, witnesses
    return True, witnesses
