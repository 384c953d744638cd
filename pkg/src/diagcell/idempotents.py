"""Idempotent generators of the ideals J_q, the Temperley-Lieb link-state
order, and the K_i cover of the augmentation ideal of TL_n."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Callable

import numpy as np

from .algebra import (
    AlgebraElement,
    IdealBasis,
    StructureAlgebra,
    ideal_J,
    ideal_J_leq,
    level_set,
    quotient,
)
from .cellular import CellDatum, bilinear_form
from .diagrams import (
    BrauerDiagram,
    LinkState,
    assemble,
    compose,
    decompose,
    identity_perm,
    inverse,
    is_planar,
    pair_graph,
)
from .linalg import Matrix, rank_array, solve


class IdempotentError(RuntimeError):
    """A candidate idempotent failed direct verification."""


def working_quotient(A: StructureAlgebra, lam: int) -> StructureAlgebra:
    """``A`` modulo every level strictly below ``lam``."""
    below = [t for t in level_set(A) if t < lam]
    return quotient(A, set(below) | set(A.dropped)) if below else A


def _prepare(A: StructureAlgebra, datum: CellDatum | None, lam: int) -> tuple[StructureAlgebra, CellDatum]:
    Aq = working_quotient(A, lam)
    if datum is None or datum.owner is not Aq:
        datum = CellDatum.from_algebra(Aq)
    return Aq, datum


def is_right_identity(e: AlgebraElement, ideal: IdealBasis) -> bool:
    """Whether ``y * e == y`` for every basis element ``y`` of ``ideal``."""
    A = e.owner
    orbit = A.right_orbit(e.to_dense()[None, :])
    idx = np.asarray(ideal.indices, dtype=np.int64)
    if idx.size == 0:
        return True
    expect = np.zeros((idx.size, A.dim), dtype=bool)
    expect[np.arange(idx.size), idx] = True
    rows = orbit[idx]
    return bool(((rows != 0) == expect).all() and (rows[expect] == A.field.one).all())


def solve_idempotent(
    A: StructureAlgebra, datum: CellDatum | None, lam: int, q: LinkState
) -> AlgebraElement | None:
    """Idempotent generator of the image of ``J_q`` in ``A / I_{<lam}``.

    Solves for ``alpha`` in ``sum alpha_{p,s} <C_q, C_p>_{tau s^-1} = [tau == 1]``
    and returns ``sum alpha_{p,s} C_{p,q}^s`` as an element of the quotient,
    or ``None`` when the system has no solution.
    """
    Aq, datum = _prepare(A, datum, lam)
    f = Aq.field
    M, G = datum.states[lam], datum.groups[lam]
    unknowns = [(p, s) for p in M for s in G]
    rows = []
    for tau in G:
        rows.append([bilinear_form(Aq, datum, lam, q, p, compose(tau, inverse(s))) for p, s in unknowns])
    rhs = Matrix.from_rows(f, [[f.one if tau == identity_perm(lam) else f.zero] for tau in G])
    sol = solve(Matrix.from_rows(f, rows, cols=len(unknowns)), rhs)
    if sol is None:
        return None
    e = AlgebraElement.make(Aq, {datum.C(p, s, q): sol[k, 0] for k, (p, s) in enumerate(unknowns)})
    if not (e * e == e and is_right_identity(e, ideal_J(Aq, q))):
        raise IdempotentError(f"solution for {q} is not an idempotent generator")
    return e


def ez_idempotent(
    A: StructureAlgebra, datum: CellDatum | None, lam: int, q: LinkState, p: LinkState, power_i: int
) -> AlgebraElement:
    """Idempotent ``delta^-i C_{p,q}^{s^-1}`` from a witness ``p`` whose pair
    graph with ``q`` has a full pair set and ``i`` loops."""
    Aq, datum = _prepare(A, datum, lam)
    f = Aq.field
    g = pair_graph(q, p)
    scale = f.pow(Aq.delta, power_i)
    if g.pair_set_size != lam or g.loop_count != power_i or not f.is_unit(scale):
        raise ValueError(f"{p} is not a witness for {q}")
    hits = [(tau, v) for tau in datum.groups[lam] if not f.is_zero(v := bilinear_form(Aq, datum, lam, q, p, tau))]
    if len(hits) != 1 or hits[0][1] != scale:
        raise ValueError(f"form of {q} against {p} is not a single power of delta")
    sigma = hits[0][0]
    return AlgebraElement.make(Aq, {datum.C(p, inverse(sigma), q): f.inv(scale)})


def same_left_ideal(a: AlgebraElement, b: AlgebraElement) -> bool:
    """Whether ``A a == A b`` as subspaces."""
    A = a.owner
    f = A.field
    Ua = A.right_orbit(a.to_dense()[None, :])
    Ub = A.right_orbit(b.to_dense()[None, :])
    ra = rank_array(f, Ua)
    return ra == rank_array(f, Ub) == rank_array(f, np.concatenate([Ua, Ub]))


# ---------------------------------------------------------------------------
# Temperley-Lieb link-state order


def tl_leq(a: LinkState, b: LinkState) -> bool:
    """``a <= b`` when every connection of ``b`` is a connection of ``a``."""
    return a.n == b.n and all(a.partner[i] == j for i, j in b.connections)


def tl_order(a: LinkState, b: LinkState) -> str:
    lo, hi = tl_leq(a, b), tl_leq(b, a)
    if lo and hi:
        return "eq"
    return "lt" if lo else "gt" if hi else "incomparable"


def tl_meet(a: LinkState, b: LinkState) -> LinkState | None:
    """Greatest common lower bound, or ``None`` when there is none."""
    if a.n != b.n:
        raise ValueError("link states on different vertex counts")
    partner = list(range(a.n))
    for s in (a, b):
        for i, j in s.connections:
            if (partner[i] not in (i, j)) or (partner[j] not in (j, i)):
                return None
            partner[i], partner[j] = j, i
    m = LinkState(tuple(partner))
    return m if is_planar(m) else None


def tl_factorize(d: BrauerDiagram, q: LinkState) -> tuple[BrauerDiagram, BrauerDiagram]:
    """Write ``d = C_{p,q'}^1`` with ``q' < q`` as ``left * right`` where
    ``right`` has right state ``q`` and the product closes no loops.

    The right factor stretches the new connections of ``q'`` into the middle
    and routes the first through strand along a zigzag of the freed vertices.
    """
    p, sigma, qq = decompose(d)
    n, t = q.n, q.t
    if qq == q or not tl_leq(qq, q):
        raise ValueError(f"{qq} is not strictly below {q}")
    if t < 1:
        raise ValueError("target state has no defects")
    free = n - t
    # middle state seen from the right factor: detour defect first
    s_partner = list(range(n))
    for k in range(1, free, 2):
        s_partner[k], s_partner[k + 1] = k + 1, k
    s_state = LinkState(tuple(s_partner))
    # middle state seen from the left factor: cups, then q' on q's defects
    r_partner = list(range(n))
    for k in range(0, free, 2):
        r_partner[k], r_partner[k + 1] = k + 1, k
    slot = {v: free + k for k, v in enumerate(q.defects)}
    for i, j in qq.connections:
        if i in slot and j in slot:
            r_partner[slot[i]], r_partner[slot[j]] = slot[j], slot[i]
    r_state = LinkState(tuple(r_partner))
    left = assemble(p, sigma, r_state)
    right = assemble(s_state, identity_perm(t), q)
    return left, right


# ---------------------------------------------------------------------------
# lifting


def stable_partners(datum: CellDatum, lam: int, q: LinkState) -> set[LinkState]:
    """States ``p`` at level ``lam`` whose products against ``q`` stay at ``lam``."""
    return {p for p in datum.states[lam] if pair_graph(q, p).pair_set_size == lam}


def lift_idempotent(
    A: StructureAlgebra,
    datum: CellDatum | None,
    lam: int,
    q: LinkState,
    eps_q: AlgebraElement,
    leq: Callable[[LinkState, LinkState], bool] | None = None,
) -> AlgebraElement:
    """Lift an idempotent generator of the image of ``J_q`` in ``A / I_{<lam}``
    to an idempotent of ``A`` generating ``J_{<=q}`` as a left ideal."""
    if leq is None:
        if A.family != "tl":
            raise ValueError(f"no default link-state order for {A.family}")
        leq = tl_leq
    Aq = eps_q.owner
    if datum is None or datum.owner is not Aq:
        datum = CellDatum.from_algebra(Aq)
    S_q = stable_partners(datum, lam, q)
    parent_pos = {int(v): k for k, v in enumerate(A.parent_index)}
    coeffs = {}
    for i, c in eps_q.coeffs.items():
        p, sigma, qq = Aq.coords[i]
        if qq != q or len(sigma) != lam:
            raise IdempotentError(f"{eps_q} has terms outside J_q")
        if p in S_q:
            coeffs[parent_pos[int(Aq.parent_index[i])]] = c
    e = AlgebraElement.make(A, coeffs)
    verify_left_generator(e, ideal_J_leq(A, q, leq))
    return e


def verify_left_generator(e: AlgebraElement, ideal: IdealBasis) -> None:
    """Raise unless ``e`` is idempotent and ``A e`` equals ``ideal``."""
    A = e.owner
    f = A.field
    if not e * e == e:
        raise IdempotentError("lifted element is not idempotent")
    orbit = A.right_orbit(e.to_dense()[None, :])
    mask = ideal.mask()
    if (orbit[:, ~mask] != 0).any():
        raise IdempotentError("left ideal generated by e leaves the target ideal")
    if rank_array(f, orbit) != len(ideal):
        raise IdempotentError("left ideal generated by e is smaller than the target ideal")


# ---------------------------------------------------------------------------
# covers


def cover_state(n: int, S) -> LinkState:
    """The state with connections ``{i, i+1}`` for ``i`` in ``S`` (1-based)."""
    return LinkState.from_connections(n, [(i - 1, i) for i in S])


def is_innermost(S) -> bool:
    S = set(S)
    return not any(i + 1 in S for i in S)


@dataclass
class Cover:
    owner: StructureAlgebra
    K: list[IdealBasis]
    status: dict[tuple[int, ...], str]
    height: int
    width: int
    notes: dict[tuple[int, ...], str] = dc_field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "status": {" ".join(map(str, S)) or "-": v for S, v in sorted(self.status.items())},
        }


def tl_cover(A: StructureAlgebra, max_size: int | None = None) -> Cover:
    """The ideals ``K_i`` of ``TL_n`` and the status of every intersection.

    Each nonempty ``S`` is classified as ``zero``, ``idempotent`` (a lifted
    idempotent was verified to generate the intersection) or ``fail``.
    """
    if A.family != "tl":
        raise ValueError("covers are only built for Temperley-Lieb algebras")
    n = A.n
    w = n - 1
    right = [c[2] for c in A.coords]
    K = []
    for i in range(w):
        K.append(IdealBasis(A, tuple(k for k, q in enumerate(right) if q.partner[i] == i + 1)))
    masks = [k.mask() for k in K]
    status: dict[tuple[int, ...], str] = {}
    notes: dict[tuple[int, ...], str] = {}
    cache: dict[LinkState, tuple[str, str]] = {}
    top = w if max_size is None else min(w, max_size)
    for size in range(1, top + 1):
        for S in combinations(range(1, n), size):
            inter = np.logical_and.reduce([masks[i - 1] for i in S])
            if not is_innermost(S):
                status[S] = "zero" if not inter.any() else "fail"
                if inter.any():
                    notes[S] = "adjacent indices with nonzero intersection"
                continue
            q = cover_state(n, S)
            if not (inter == ideal_J_leq(A, q, tl_leq).mask()).all():
                status[S], notes[S] = "fail", "intersection differs from J_<=q"
                continue
            if q not in cache:
                cache[q] = _idempotent_status(A, q)
            status[S], note = cache[q]
            if note:
                notes[S] = note
    height = 0
    for h in range(1, top + 1):
        if all(v != "fail" for S, v in status.items() if len(S) == h):
            height = h
        else:
            break
    return Cover(A, K, status, height, w, notes)


def _idempotent_status(A: StructureAlgebra, q: LinkState) -> tuple[str, str]:
    lam = q.t
    try:
        eps = solve_idempotent(A, None, lam, q)
        if eps is None:
            return "fail", "no idempotent generator in the quotient"
        lift_idempotent(A, None, lam, q, eps, tl_leq)
    except IdempotentError as exc:
        return "fail", str(exc)
    return "idempotent", ""
