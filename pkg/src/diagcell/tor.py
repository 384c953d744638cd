"""Tor_*^A(t, t) of an augmented algebra over a field, from an explicit free
resolution of the trivial module, plus a closed-form oracle for cyclic groups."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import StructureAlgebra
from .linalg import EchelonBasis, Field, PrimeField, Rationals, kernel_array, rank_array

STRATEGIES = ("random", "greedy", "reversed", "full")
DEFAULT_CAP = {"prime": 2_000_000, "rational": 100_000}


def default_cap(field: Field) -> int:
    return DEFAULT_CAP["rational" if isinstance(field, Rationals) else "prime"]


@dataclass
class TorReport:
    ring: str
    algebra: str
    qmax: int
    dims: list[int]
    partial: bool = False
    generators: list[int] = dc_field(default_factory=list)
    strategy: str = "random"
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "ring": self.ring,
            "algebra": self.algebra,
            "qmax": self.qmax,
            "dims": list(self.dims),
            "partial": self.partial,
            "generators": list(self.generators),
            "strategy": self.strategy,
            "note": self.note,
        }


@dataclass
class ResolutionStage:
    """Generators of ``F_k`` as vectors in ``F_{k-1} = A^{g_{k-1}}``.

    Coordinate ``l * d + i`` of a vector in ``A^g`` is the coefficient of
    ``b_i e_l``.
    """

    gens: np.ndarray  # (g_k, g_{k-1} * d)
    kernel: np.ndarray | None = None  # basis of ker(F_k -> F_{k-1}), rows


@dataclass
class FreeResolution:
    owner: StructureAlgebra
    stages: list[ResolutionStage]
    partial: bool = False
    note: str = ""

    @property
    def ranks(self) -> list[int]:
        return [1] + [s.gens.shape[0] for s in self.stages]

    def orbit_matrix(self, k: int) -> np.ndarray:
        """Matrix of ``F_k -> F_{k-1}`` on the basis ``b_i e_j``; rows indexed ``j * d + i``."""
        A = self.owner
        g_prev = self.ranks[k - 1]
        gens = self.stages[k - 1].gens
        if gens.shape[0] == 0:
            return A.field.zeros((0, g_prev * A.dim))
        return np.concatenate([A.right_orbit(x.reshape(g_prev, A.dim)) for x in gens], axis=0)

    def tensored(self, k: int) -> np.ndarray:
        """``t (x)_A (F_k -> F_{k-1})`` as a ``g_k x g_{k-1}`` matrix."""
        A = self.owner
        g_prev = self.ranks[k - 1]
        gens = self.stages[k - 1].gens
        out = A.field.zeros((gens.shape[0], g_prev))
        for j, x in enumerate(gens):
            blocks = x.reshape(g_prev, A.dim)
            out[j] = A.field.reduce(blocks @ A.aug)
        return A.field.reduce(out)


def _random_vector(field: Field, rng: np.random.Generator, m: int) -> np.ndarray:
    if isinstance(field, PrimeField):
        return rng.integers(0, field.p, size=m).astype(np.int64)
    return np.array([field(int(v)) for v in rng.integers(-3, 4, size=m)], dtype=object)


def choose_generators(
    A: StructureAlgebra,
    K: np.ndarray,
    g_prev: int,
    strategy: str = "random",
    rng: np.random.Generator | None = None,
    prune: bool = False,
) -> np.ndarray:
    """Vectors of the submodule with basis ``K`` (rows) whose orbits span it."""
    f = A.field
    m, N = K.shape
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if m == 0:
        return f.zeros((0, N))

    def orbit(x):
        return A.right_orbit(x.reshape(g_prev, A.dim))

    if strategy == "full":
        gens = [K[i] for i in range(m)]
    else:
        span = EchelonBasis(f, N)
        gens = []
        if strategy == "random":
            rng = rng or np.random.default_rng(0)
            tries = 0
            while span.rank < m:
                x = f.reduce(f.matmul(_random_vector(f, rng, m)[None, :], K))[0]
                if span.add(orbit(x)) > 0:
                    gens.append(x)
                tries += 1
                if tries > 50 * (m + 1):
                    raise RuntimeError("random generators failed to span the kernel")
        else:
            order = range(m) if strategy == "greedy" else range(m - 1, -1, -1)
            for i in order:
                if span.rank == m:
                    break
                if not span.contains(K[i]):
                    span.add(orbit(K[i]))
                    gens.append(K[i])
    # basis walks pick many redundant vectors, so they are always pruned
    if prune or strategy in ("greedy", "reversed"):
        gens = prune_generators(A, gens, g_prev, m)
    return np.array(gens, dtype=f.dtype).reshape(len(gens), N)


def prune_generators(A: StructureAlgebra, gens: list, g_prev: int, m: int) -> list:
    """Drop generators, first to last, while the rest still span ``m`` dimensions."""
    f = A.field
    orbits = [A.right_orbit(np.asarray(x).reshape(g_prev, A.dim)) for x in gens]
    keep = list(range(len(gens)))
    for j in list(keep):
        rest = [orbits[i] for i in keep if i != j]
        if rest and rank_array(f, np.concatenate(rest, axis=0)) == m:
            keep.remove(j)
    return [gens[i] for i in keep]


def free_resolution(
    A: StructureAlgebra,
    length: int,
    strategy: str = "random",
    seed: int = 0,
    prune: bool = False,
    cap: int | None = None,
    keep_kernels: bool = False,
) -> FreeResolution:
    """Free resolution ``F_length -> ... -> F_0 = A -> t`` (or a capped prefix)."""
    f = A.field
    d = A.dim
    cap = default_cap(f) if cap is None else cap
    rng = np.random.default_rng(seed)
    K = kernel_array(f, A.aug[None, :].astype(f.dtype))
    res = FreeResolution(A, [])
    g_prev = 1
    for k in range(1, length + 1):
        gens = choose_generators(A, K, g_prev, strategy, rng, prune)
        g = gens.shape[0]
        if g * d > cap:
            res.partial = True
            res.note = f"stage {k} needs {g} x {d} = {g * d} coordinates, cap {cap}"
            return res
        stage = ResolutionStage(gens)
        res.stages.append(stage)
        if k == length:
            break
        V = res.orbit_matrix(k)
        K_next = kernel_array(f, np.ascontiguousarray(V.T))
        # the orbits span K, so rank-nullity fixes the next kernel's size
        if K_next.shape[0] != g * d - K.shape[0]:
            raise RuntimeError(f"stage {k}: kernel dimension {K_next.shape[0]}, expected {g * d - K.shape[0]}")
        K = K_next
        if keep_kernels:
            stage.kernel = K
        g_prev = g
    return res


def tor_dims(
    A: StructureAlgebra,
    qmax: int = 3,
    strategy: str = "random",
    seed: int = 0,
    prune: bool = False,
    cap: int | None = None,
) -> TorReport:
    """Dimensions of ``Tor_q^A(t, t)`` for ``q <= qmax``."""
    f = A.field
    if not any(not f.is_zero(v) for v in A.aug):
        raise ValueError("augmentation is zero")
    res = free_resolution(A, qmax + 1, strategy, seed, prune, cap)
    ranks = res.ranks
    D = [0] + [rank_array(f, res.tensored(k)) for k in range(1, len(ranks))]
    top = len(ranks) - 2 if res.partial else qmax
    dims = [ranks[q] - D[q] - D[q + 1] for q in range(top + 1)]
    return TorReport(
        ring=f.descriptor,
        algebra=A.descriptor,
        qmax=qmax,
        dims=dims,
        partial=res.partial,
        generators=ranks,
        strategy=strategy + ("+prune" if prune and strategy == "random" else ""),
        note=res.note,
    )


def cyclic_group_oracle(n: int, field: Field, qmax: int = 3) -> TorReport:
    """Tor of the cyclic group of order ``n`` from its 2-periodic resolution.

    Builds left multiplication by ``g - 1`` and by the norm element as
    ``n x n`` matrices on the group basis, checks the periodic complex is
    exact, then tensors with the trivial module.
    """
    f = field
    g = np.roll(f.eye(n), 1, axis=0)  # g * g^i = g^{i+1}
    minus = f.reduce(g - f.eye(n))
    norm = f.reduce(np.ones((n, n), dtype=np.int64).astype(f.dtype) * f.one)
    aug = np.array([f.one] * n, dtype=f.dtype)
    if (f.reduce(minus @ norm) != 0).any() or (f.reduce(norm @ minus) != 0).any():
        raise RuntimeError("periodic complex does not square to zero")
    r_minus, r_norm = rank_array(f, minus), rank_array(f, norm)
    if r_minus + r_norm != n or rank_array(f, aug[None, :]) + r_minus != n:
        raise RuntimeError("periodic complex is not exact")
    # after tensoring: g - 1 becomes 0 and the norm becomes n
    scalar = {1: f.zero, 0: f.reduce(np.array([n], dtype=f.dtype))[0]}
    D = [0] + [0 if f.is_zero(scalar[k % 2]) else 1 for k in range(1, qmax + 2)]
    dims = [1 - D[q] - D[q + 1] for q in range(qmax + 1)]
    return TorReport(ring=f.descriptor, algebra=f"C_{n}", qmax=qmax, dims=dims, strategy="periodic")


def compare_reports(a: TorReport, b: TorReport, upto: int) -> bool:
    if len(a.dims) <= upto or len(b.dims) <= upto:
        return False
    return a.dims[: upto + 1] == b.dims[: upto + 1]
