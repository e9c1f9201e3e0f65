"""Shared generators and oracles for the test suite."""

import itertools

from koszulkit.complexes import ChainComplex, tensor_layout
from koszulkit.descent import Assignment, SystemVariable, _assignment_matrix
from koszulkit.linalg import invert
from koszulkit.matrices import Matrix


def random_element(ring, rng):
    if ring.is_finite():
        pool = list(ring.elements())
        return pool[rng.randrange(len(pool))]
    if ring.kind == "integers":
        return ring.from_int(rng.randint(-9, 9))
    if ring.kind == "rationals":
        from fractions import Fraction
        from koszulkit.rings import RingElement
        return RingElement(ring, Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
    raise ValueError(f"no generator for {ring}")


def random_matrix(ring, rows, cols, rng):
    if rows == 0 or cols == 0:
        return Matrix.zeros(ring, rows, cols)
    return Matrix.from_rows(
        ring, [[random_element(ring, rng) for _ in range(cols)] for _ in range(rows)])


def random_invertible(ring, n, rng, tries=200):
    if n == 0:
        return Matrix.zeros(ring, 0, 0)
    for _ in range(tries):
        M = random_matrix(ring, n, n, rng)
        if invert(ring, M) is not None:
            return M
    raise RuntimeError("no invertible matrix found")


def maximal_ideal_pool(ring):
    """All non-unit elements of a finite local ring."""
    return [a for a in ring.elements() if not a.is_unit()]


def random_minimal_complex(ring, rng, max_top=3, max_rank=2):
    """A minimal complex supported on 0..m with differential entries in the
    maximal ideal; built by rejection on the square-zero condition."""
    pool = maximal_ideal_pool(ring)
    while True:
        m = rng.randint(0, max_top)
        ranks = {n: rng.randint(1, max_rank) for n in range(m + 1)}
        diffs = {}
        ok = True
        for n in range(1, m + 1):
            rows, cols = ranks[n - 1], ranks[n]
            d = Matrix.from_rows(ring, [
                [pool[rng.randrange(len(pool))] for _ in range(cols)]
                for _ in range(rows)])
            diffs[n] = d
        for n in range(1, m):
            if not (diffs[n] * diffs[n + 1]).is_zero():
                ok = False
                break
        if ok:
            return ChainComplex(ring, ranks, diffs)


def random_bounded_complex(ring, rng, max_degrees=3, max_rank=2):
    """Any bounded complex (not necessarily minimal), by rejection."""
    while True:
        lo = rng.randint(0, 1)
        width = rng.randint(0, max_degrees - 1)
        ranks = {n: rng.randint(1, max_rank) for n in range(lo, lo + width + 1)}
        diffs = {}
        ok = True
        for n in range(lo + 1, lo + width + 1):
            diffs[n] = random_matrix(ring, ranks[n - 1], ranks[n], rng)
        for n in range(lo + 1, lo + width):
            if not (diffs[n] * diffs[n + 1]).is_zero():
                ok = False
                break
        if ok:
            return ChainComplex(ring, ranks, diffs)


def brute_force_kernel(ring, A):
    """Every kernel vector of a matrix over a small finite ring."""
    pool = list(ring.elements())
    out = set()
    for combo in itertools.product(pool, repeat=A.cols):
        col = Matrix(ring, A.cols, 1, tuple((x,) for x in combo))
        if (A * col).is_zero():
            out.add(tuple(x.payload for x in combo))
    return out


def span_of_columns(ring, K):
    """Every element of the column span over a small finite ring."""
    pool = list(ring.elements())
    out = set()
    if K.cols == 0:
        out.add(tuple(ring.zero.payload for _ in range(K.rows)))
        return out
    for combo in itertools.product(pool, repeat=K.cols):
        acc = [ring.zero] * K.rows
        for j, c in enumerate(combo):
            for i in range(K.rows):
                acc[i] = acc[i] + K.data[i][j] * c
        out.add(tuple(x.payload for x in acc))
    return out


def conjugated_assignment(K, P, system, sol, rng):
    """Transport the canonical solution along a random degreewise change of
    basis of P: X conjugates, Y and Z ride along the induced isomorphism of
    the extension and its cone."""
    ring = K.ring
    shape = system.shape
    g = {n: random_invertible(ring, shape.s_at(n), rng)
         for n in range(shape.m + 1)}
    ginv = {n: invert(ring, g[n]) for n in g}

    def gamma(n, inverse=False):
        blocks = []
        for (p, mrank, prank) in tensor_layout(K.complex, P, n):
            if mrank * prank:
                blocks.append(Matrix.identity(ring, mrank).kron(
                    ginv[p] if inverse else g[p]))
        if not blocks:
            return Matrix.zeros(ring, shape.r_at(n), shape.r_at(n))
        grid = [[blocks[i] if i == j else
                 Matrix.zeros(ring, blocks[i].rows, blocks[j].cols)
                 for j in range(len(blocks))] for i in range(len(blocks))]
        return Matrix.block(grid)

    gam = {n: gamma(n) for n in range(shape.m + shape.e + 1)}
    gaminv = {n: gamma(n, inverse=True) for n in range(shape.m + shape.e + 1)}

    def theta(n, inverse=False):
        src = gam if inverse else gaminv
        top = src.get(n, Matrix.zeros(ring, shape.r_at(n), shape.r_at(n)))
        bot = Matrix.identity(ring, shape.r_at(n - 1))
        return Matrix.block([[top, Matrix.zeros(ring, top.rows, bot.cols)],
                             [Matrix.zeros(ring, bot.rows, top.cols), bot]])

    vals = {}
    for n in range(1, shape.m + 1):
        Xn = _assignment_matrix(sol, "X", n, shape.s_at(n - 1), shape.s_at(n), ring)
        Xp = ginv[n - 1] * Xn * g[n]
        for i in range(Xp.rows):
            for j in range(Xp.cols):
                vals[SystemVariable("X", n, i + 1, j + 1)] = Xp.data[i][j]
    for n in range(shape.m + shape.e + 1):
        Yn = _assignment_matrix(sol, "Y", n, shape.r_at(n), shape.r_at(n), ring)
        Yp = gaminv[n] * Yn
        for i in range(Yp.rows):
            for j in range(Yp.cols):
                vals[SystemVariable("Y", n, i + 1, j + 1)] = Yp.data[i][j]
    for n in range(shape.m + shape.e + 1):
        Zn = _assignment_matrix(sol, "Z", n, shape.r_at(n + 1) + shape.r_at(n),
                                shape.r_at(n) + shape.r_at(n - 1), ring)
        Zp = theta(n + 1) * Zn * theta(n, inverse=True)
        for i in range(Zp.rows):
            for j in range(Zp.cols):
                vals[SystemVariable("Z", n, i + 1, j + 1)] = Zp.data[i][j]
    return Assignment(sol.hom, vals)
