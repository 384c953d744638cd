"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from diagcell.algebra import build_algebra, ideal_J_leq, quotient
from diagcell.cellular import (
    CellDatum,
    bilinear_form,
    hypothesis_dagger,
    verify_diagram_like,
    verify_naive_cellular,
)
from diagcell.diagrams import (
    concat_product,
    decompose,
    enumerate_link_states,
    family_datum,
    greedy_partner,
    is_planar,
    pair_graph,
    rotate,
)
from diagcell.idempotents import lift_idempotent, solve_idempotent, tl_cover, tl_leq
from diagcell.linalg import (
    QQ,
    Matrix,
    PrimeField,
    field_from_name,
    kernel_basis,
    rank,
    rank_array,
    rref,
    solve,
)
from diagcell.tor import cyclic_group_oracle, tor_dims


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            status = "PASS" if ok else "FAIL"
            print(f"\n[criterion {number:2d}] {status} {title}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {number}: {detail}"

    return emit


def _field(ring):
    return field_from_name(ring)


def test_01_axiom_suite(report):
    slowest, failures = 0.0, []
    for family, top in (("brauer", 4), ("tl", 6), ("jones", 6)):
        for n, ring, delta in itertools.product(range(1, top + 1), ("2", "5", "Q"), (0, 1, 2)):
            F = _field(ring)
            start = time.perf_counter()
            A = build_algebra(family, n, F(delta), F)
            D = CellDatum.from_algebra(A)
            ok = verify_naive_cellular(A, D).passed and verify_diagram_like(A, D).passed
            elapsed = time.perf_counter() - start
            slowest = max(slowest, elapsed)
            if not ok or elapsed >= 60:
                failures.append((family, n, ring, delta, round(elapsed, 1)))
    report(1, "axiom suite", not failures, f"slowest run {slowest:.1f}s, failures {failures}")


def test_02_product_formula(report):
    start = time.perf_counter()
    F = PrimeField(7)
    A = build_algebra("brauer", 4, F(3), F)
    bad = 0
    for i, (_, _, q1) in enumerate(A.coords):
        for j, (p2, s2, _) in enumerate(A.coords):
            prod = A.basis_product(i, j)
            g = pair_graph(q1, p2)
            _, d = concat_product(A.labels[i], A.labels[j])
            (k, c), = prod.items()
            t = len(decompose(A.labels[k])[1])
            bad += A.labels[k] != d
            bad += c != F.pow(F(3), g.loop_count)
            bad += (t == len(s2)) != (g.pair_set_size == len(s2))
    elapsed = time.perf_counter() - start
    report(2, "product formula on Br_4", bad == 0 and elapsed < 60, f"{A.dim ** 2} pairs, {bad} mismatches, {elapsed:.1f}s")


def _expected_tau(q, p):
    """Entry ``i`` is the index of the defect of ``q`` sharing a pair-graph component with the ``i``-th defect of ``p``."""
    n = q.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in (q, p):
        for a, b in s.connections:
            parent[find(a)] = find(b)
    q_rank = {find(v): k for k, v in enumerate(q.defects)}
    return tuple(q_rank.get(find(v), -1) for v in p.defects)


def test_03_form_dichotomy(report):
    checked, bad = 0, 0
    for family, n in (("brauer", 4), ("tl", 6), ("jones", 6)):
        for delta in (0, 2):
            F = PrimeField(5)
            A = build_algebra(family, n, F(delta), F)
            D = CellDatum.from_algebra(A)
            for lam in D.levels:
                for q, p in itertools.product(D.states[lam], repeat=2):
                    g = pair_graph(q, p)
                    sigma = _expected_tau(q, p)
                    for tau in D.groups[lam]:
                        v = bilinear_form(A, D, lam, q, p, tau)
                        if g.pair_set_size < lam:
                            want = 0
                        else:
                            want = F.pow(F(delta), g.loop_count) if tau == sigma else 0
                        checked += 1
                        bad += v != want
    report(3, "bilinear form closed form", bad == 0, f"{checked} entries, {bad} mismatches")


def test_04_rotation(report):
    bad = 0
    for n in range(1, 9):
        for t in range(n % 2 or 2, n + 1, 2):
            for q in enumerate_link_states(n, t, "annular"):
                g = pair_graph(q, rotate(q))
                bad += g.loop_count != 0 or g.pair_set_size != t
    F = PrimeField(5)
    dagger = []
    for n in range(2, 9):
        levels, _, states = family_datum("jones", n)
        for t in levels:
            if 1 <= t <= n - 1:
                dagger.append(hypothesis_dagger(states[t], F, F(0), t)[0])
    report(4, "rotation partner and hypothesis dagger for Jones", bad == 0 and all(dagger), f"{bad} bad rotations, {dagger.count(False)} dagger failures")


def test_05_greedy_partner(report):
    bad, total = 0, 0
    for n in range(1, 9):
        for t in range(n % 2 or 2, n + 1, 2):
            for q in enumerate_link_states(n, t, "planar"):
                p = greedy_partner(q)
                g = pair_graph(q, p)
                total += 1
                bad += not (is_planar(p) and g.loop_count == 0 and g.pair_set_size == t)
    report(5, "greedy partner", bad == 0, f"{total} states, {bad} failures")


def test_06_idempotents(report):
    failures, slowest = [], 0.0
    for n in range(1, 7):
        start = time.perf_counter()
        for ring, delta in itertools.product(("5", "Q"), (0, 1)):
            F = _field(ring)
            A = build_algebra("tl", n, F(delta), F)
            for t in range(n % 2 or 2, n + 1, 2):
                for q in enumerate_link_states(n, t, "planar"):
                    eps = solve_idempotent(A, None, t, q)
                    e = lift_idempotent(A, None, t, q, eps)
                    J = ideal_J_leq(A, q, tl_leq)
                    orbit = A.right_orbit(e.to_dense()[None, :])
                    basis = F.eye(A.dim)[list(J.indices)]
                    span_ok = rank_array(F, orbit) == len(J) == rank_array(F, np.concatenate([orbit, basis]))
                    if not (e * e == e and span_ok):
                        failures.append((n, ring, delta, str(q)))
        slowest = max(slowest, time.perf_counter() - start)
    report(6, "lifted idempotents generate J_<=q", not failures and slowest < 120, f"slowest n {slowest:.1f}s, failures {failures}")


def test_07_cover_heights(report):
    F = PrimeField(5)
    got = {}
    for n, delta in ((5, 0), (5, 1), (7, 0), (7, 1), (4, 0), (6, 0)):
        c = tl_cover(build_algebra("tl", n, F(delta), F))
        got[(n, delta)] = c.height
        if n % 2 and c.height != c.width:
            got[(n, delta)] = (c.height, "width", c.width)
    want = {(5, 0): 4, (5, 1): 4, (7, 0): 6, (7, 1): 6, (4, 0): 1, (6, 0): 2}
    report(7, "cover heights", got == want, f"heights {got}")


def test_08_tor_odd(report):
    got = {}
    for n, delta, p in itertools.product((3, 5, 7), (0, 1), (2, 5)):
        F = PrimeField(p)
        r = tor_dims(build_algebra("tl", n, F(delta), F), 3)
        got[(n, delta, p)] = tuple(r.dims) + (("partial",) if r.partial else ())
    bad = {k: v for k, v in got.items() if v != (1, 0, 0, 0)}
    report(8, "Tor of TL_n vanishes for odd n", not bad, f"{len(got)} runs, deviations {bad}")


def test_09_tor_even(report):
    six = {}
    for p in (2, 5):
        F = PrimeField(p)
        six[p] = tor_dims(build_algebra("tl", 6, F(0), F), 1)
    ok6 = all(not r.partial and r.dims[1] == 0 for r in six.values())
    F = PrimeField(2)
    r8 = tor_dims(build_algebra("tl", 8, F(0), F), 2)
    ok8 = r8.partial or r8.dims[1:3] == [0, 0]
    detail = f"TL_6 {[r.dims for r in six.values()]}, TL_8 {r8.dims}" + (" partial" if r8.partial else "")
    report(9, "Tor of TL_n vanishes in the low range for even n", ok6 and ok8, detail)


def test_10_jones_global(report):
    got = {}
    for n, p in ((5, 5), (5, 2), (3, 3), (3, 2)):
        F = PrimeField(p)
        r = tor_dims(build_algebra("jones", n, F(0), F), 3)
        got[(n, p)] = (r.dims, cyclic_group_oracle(n, F, 3).dims)
    want = {(5, 5): [1, 1, 1, 1], (5, 2): [1, 0, 0, 0], (3, 3): [1, 1, 1, 1], (3, 2): [1, 0, 0, 0]}
    ok = all(a == b == want[k] for k, (a, b) in got.items())
    report(10, "Jones Tor equals cyclic group Tor", ok, f"{got}")


def test_11_jones_top_quotient(report):
    bad = 0
    for n, p in itertools.product(range(1, 7), (2, 5)):
        F = PrimeField(p)
        J = build_algebra("jones", n, F(0), F)
        Q = quotient(J, [t for t in range(n) if (n - t) % 2 == 0])
        C = build_algebra("group_cyclic", n, 0, F)
        relabel = {i: Q.coords[i][1][0] for i in range(Q.dim)}
        bad += sorted(relabel.values()) != list(range(n))
        for i, j in itertools.product(range(Q.dim), repeat=2):
            lhs = {relabel[k]: c for k, c in Q.basis_product(i, j).items()}
            bad += lhs != C.basis_product(relabel[i], relabel[j])
        bad += any(Q.unit[i] != C.unit[relabel[i]] or Q.aug[i] != C.aug[relabel[i]] for i in range(Q.dim))
    report(11, "top quotient of J_n is the cyclic group algebra", bad == 0, f"{bad} mismatches")


def test_12_resolution_independence(report):
    got = {}
    for A in (build_algebra("tl", 4, 0, PrimeField(3)), build_algebra("group_cyclic", 6, 0, PrimeField(3))):
        runs = [tor_dims(A, 3), tor_dims(A, 3, strategy="reversed"), tor_dims(A, 3, prune=True), tor_dims(A, 3, strategy="greedy")]
        got[A.descriptor] = [r.dims for r in runs]
    ok = all(all(d == dims[0] for d in dims) for dims in got.values())
    report(12, "Tor independent of generator choice", ok, f"{got}")


def _random(F, rng, rows, cols):
    k = int(rng.integers(0, min(rows, cols) + 1))
    if isinstance(F, PrimeField):
        a = rng.integers(0, F.p, (rows, k))
        b = rng.integers(0, F.p, (k, cols))
        return Matrix(F, F.matmul(a, b) if k else F.zeros((rows, cols)))
    a = F.array(rng.integers(-4, 5, (rows, k)).tolist()) if k else None
    b = F.array(rng.integers(-4, 5, (k, cols)).tolist()) if k else None
    return Matrix(F, F.matmul(a, b) if k else F.zeros((rows, cols)))


def test_13_linear_algebra_properties(report):
    rng = np.random.default_rng(2024)
    bad = {}
    for F in (PrimeField(2), PrimeField(5), PrimeField(7919), QQ):
        fails = 0
        for _ in range(1000):
            rows, cols = (int(x) for x in rng.integers(1, 9, 2))
            m = _random(F, rng, rows, cols)
            K = kernel_basis(m)
            fails += rank(m) + K.cols != cols
            fails += not (m @ K).is_zero()
            R, piv = rref(m)
            fails += rref(R)[0] != R or rref(R)[1] != piv
            x0 = _random(F, rng, cols, 1)
            rhs = m @ x0
            x = solve(m, rhs)
            fails += x is None or m @ x != rhs
        bad[F.descriptor if isinstance(F, PrimeField) else "Q"] = fails
    report(13, "linear algebra property suite", not any(bad.values()), f"1000 cases per ring, failures {bad}")
