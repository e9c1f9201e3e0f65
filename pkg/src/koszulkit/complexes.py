"""Bounded complexes of finite-rank free modules.

Homological grading: the differential in degree n maps degree n to degree
n-1.  Construction always validates d.d = 0; a non-complex is never stored.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    CapabilityMissing, DimensionMismatch, MixedRings, NotAComplex, NotLocal,
)
from .linalg import homology_module, kernel_basis, minimal_generators
from .matrices import Matrix


class ChainComplex:
    __slots__ = ("ring", "_ranks", "_diffs")

    def __init__(self, ring, ranks, diffs, _validated=False):
        self.ring = ring
        self._ranks = {n: r for n, r in ranks.items() if r > 0}
        self._diffs = {}
        for n, d in diffs.items():
            if d.rows == self.rank(n - 1) and d.cols == self.rank(n):
                if d.rows and d.cols:
                    self._diffs[n] = d
            else:
                raise DimensionMismatch(
                    f"diff({n}) is {d.rows}x{d.cols}, expected "
                    f"{self.rank(n - 1)}x{self.rank(n)}")
        if not _validated:
            self._validate()

    def _validate(self):
        for n in sorted(self._diffs):
            if n + 1 in self._diffs:
                if not (self._diffs[n] * self._diffs[n + 1]).is_zero():
                    raise NotAComplex(n)

    # -- shape ------------------------------------------------------------------

    def rank(self, n):
        return self._ranks.get(n, 0)

    @property
    def support(self):
        return tuple(sorted(self._ranks))

    def is_zero_complex(self):
        return not self._ranks

    def degrees(self):
        """All degrees from min to max support, inclusive; empty when zero."""
        if not self._ranks:
            return range(0)
        lo, hi = min(self._ranks), max(self._ranks)
        return range(lo, hi + 1)

    def diff(self, n):
        d = self._diffs.get(n)
        if d is None:
            return Matrix.zeros(self.ring, self.rank(n - 1), self.rank(n))
        return d

    def total_rank(self):
        return sum(self._ranks.values())

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.ring == other.ring and self._ranks == other._ranks
                and self._diffs == other._diffs)

    def __repr__(self):
        if not self._ranks:
            return "ChainComplex(0)"
        parts = [f"{n}:{self.rank(n)}" for n in self.degrees()]
        return f"ChainComplex({', '.join(parts)})"


def make_complex(ring, ranks, diffs):
    """Validated complex from rank and differential data.

    `ranks` maps degree to rank; `diffs` maps degree n to the matrix of the
    map from degree n to degree n-1.  Fails loudly on shape errors or
    d.d != 0 (reporting the first offending degree).
    """
    return ChainComplex(ring, dict(ranks), dict(diffs))


def zero_complex(ring):
    return ChainComplex(ring, {}, {}, _validated=True)


def free_module_complex(ring, rank, degree=0):
    """A free module viewed as a complex concentrated in one degree."""
    return ChainComplex(ring, {degree: rank}, {}, _validated=True)


# ---------------------------------------------------------------------------
# chain maps and homotopies


class ChainMap:
    """Degreewise maps between complexes; validity is checked on demand."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components):
        if source.ring != target.ring:
            raise MixedRings("chain map between complexes over different rings")
        self.source = source
        self.target = target
        self.components = {}
        for n, m in components.items():
            if (m.rows, m.cols) != (target.rank(n), source.rank(n)):
                raise DimensionMismatch(
                    f"component {n} is {m.rows}x{m.cols}, expected "
                    f"{target.rank(n)}x{source.rank(n)}")
            if m.rows and m.cols:
                self.components[n] = m

    def component(self, n):
        m = self.components.get(n)
        if m is None:
            return Matrix.zeros(self.source.ring, self.target.rank(n),
                                self.source.rank(n))
        return m

    @staticmethod
    def identity(complex_):
        return ChainMap(complex_, complex_, {
            n: Matrix.identity(complex_.ring, complex_.rank(n))
            for n in complex_.support})

    @staticmethod
    def zero(source, target):
        return ChainMap(source, target, {})

    def compose(self, other):
        """self after other."""
        if other.target is not self.source and other.target != self.source:
            raise DimensionMismatch("composition of non-matching chain maps")
        comps = {}
        for n in set(self.components) | set(other.components):
            comps[n] = self.component(n) * other.component(n)
        return ChainMap(other.source, self.target, comps)


@dataclass
class Homotopy:
    """Degree +1 maps on a complex (contraction) or between two (null)."""

    components: dict      # degree n -> Matrix of shape carrier(n+1) x carrier(n)
    kind: str             # "contraction" | "null"

    def component(self, n, rows, cols, ring):
        m = self.components.get(n)
        if m is None:
            return Matrix.zeros(ring, rows, cols)
        return m


def is_chain_map(phi):
    """Pure equation check d_target . phi = phi . d_source in every degree."""
    src, tgt = phi.source, phi.target
    degrees = set(src.degrees()) | set(tgt.degrees())
    for n in sorted(degrees):
        lhs = tgt.diff(n) * phi.component(n)
        rhs = phi.component(n - 1) * src.diff(n)
        if lhs != rhs:
            return False
    return True


def is_null_homotopy(sigma, phi):
    """d_target . sigma + sigma . d_source = phi, degreewise."""
    src, tgt = phi.source, phi.target
    ring = src.ring
    degrees = set(src.degrees()) | set(tgt.degrees())
    for n in sorted(degrees):
        s_n = sigma.component(n, tgt.rank(n + 1), src.rank(n), ring)
        s_prev = sigma.component(n - 1, tgt.rank(n), src.rank(n - 1), ring)
        lhs = tgt.diff(n + 1) * s_n + s_prev * src.diff(n)
        if lhs != phi.component(n):
            return False
    return True


def is_contraction(sigma, complex_):
    """sigma(n-1) . d(n) + d(n+1) . sigma(n) = id, degreewise."""
    ring = complex_.ring
    for n in complex_.degrees():
        s_n = sigma.component(n, complex_.rank(n + 1), complex_.rank(n), ring)
        s_prev = sigma.component(n - 1, complex_.rank(n), complex_.rank(n - 1), ring)
        lhs = s_prev * complex_.diff(n) + complex_.diff(n + 1) * s_n
        if lhs != Matrix.identity(ring, complex_.rank(n)):
            return False
    return True


# ---------------------------------------------------------------------------
# constructions


def shift(M, m):
    """m-fold shift: degree n holds M_{n-m}; differentials scale by (-1)^m."""
    ranks = {n + m: r for n, r in M._ranks.items()}
    sign = M.ring.one if m % 2 == 0 else -M.ring.one
    diffs = {n + m: d.scale(sign) for n, d in M._diffs.items()}
    return ChainComplex(M.ring, ranks, diffs, _validated=True)


def truncate_below(M, m):
    """Drop everything below degree m; the crossing differential is zeroed."""
    ranks = {n: r for n, r in M._ranks.items() if n >= m}
    diffs = {n: d for n, d in M._diffs.items() if n > m}
    return ChainComplex(M.ring, ranks, diffs, _validated=True)


def truncate_above(M, m):
    """Drop everything above degree m; the crossing differential is zeroed."""
    ranks = {n: r for n, r in M._ranks.items() if n <= m}
    diffs = {n: d for n, d in M._diffs.items() if n <= m}
    return ChainComplex(M.ring, ranks, diffs, _validated=True)


def tensor_layout(M, N, n):
    """Summand bookkeeping for (M (x) N)_n = sum over p of M_{n-p} (x) N_p.

    Returns [(p, rank M_{n-p}, rank N_p)] for p ascending over N's support,
    zero-width summands included so offsets stay stable across degrees.
    """
    return [(p, M.rank(n - p), N.rank(p)) for p in N.support]


def tensor(M, N):
    """Tensor product complex with the usual sign on the right differential.

    Summands ordered by p ascending; each M_{n-p} (x) N_p block carries the
    row-major tensor basis, so the structure maps are Kronecker products.
    """
    if M.ring != N.ring:
        raise MixedRings("tensor over different rings")
    ring = M.ring
    if M.is_zero_complex() or N.is_zero_complex():
        return zero_complex(ring)
    degrees = range(min(M.support) + min(N.support),
                    max(M.support) + max(N.support) + 1)
    ranks = {}
    for n in degrees:
        ranks[n] = sum(mr * nr for _, mr, nr in tensor_layout(M, N, n))
    diffs = {}
    one = ring.one
    for n in degrees:
        src = tensor_layout(M, N, n)
        tgt = tensor_layout(M, N, n - 1)
        if not any(mr * nr for _, mr, nr in src):
            continue
        if not any(mr * nr for _, mr, nr in tgt):
            continue
        grid = []
        for (q, mq, nq) in tgt:
            row = []
            for (p, mp, np_) in src:
                rows_, cols_ = mq * nq, mp * np_
                if p == q:
                    block = M.diff(n - p).kron(Matrix.identity(ring, np_)) \
                        if rows_ and cols_ else Matrix.zeros(ring, rows_, cols_)
                elif p == q + 1:
                    sign = one if (n - p) % 2 == 0 else -one
                    block = Matrix.identity(ring, mp).kron(N.diff(p)).scale(sign) \
                        if rows_ and cols_ else Matrix.zeros(ring, rows_, cols_)
                else:
                    block = Matrix.zeros(ring, rows_, cols_)
                row.append(block)
            grid.append(row)
        diffs[n] = Matrix.block(grid)
    return ChainComplex(ring, ranks, diffs)


def hom_layout(M, N, n):
    """Summands of Hom(M, N)_n = sum over i of Hom(M_i, N_{i+n}).

    Returns [(i, rank N_{i+n}, rank M_i)] for i ascending over M's support;
    each block uses the row-major (target index, source index) basis.
    """
    return [(i, N.rank(i + n), M.rank(i)) for i in M.support]


def hom_complex(M, N):
    """Hom complex with d(f) = d_N . f - (-1)^{|f|} f . d_M."""
    if M.ring != N.ring:
        raise MixedRings("hom over different rings")
    ring = M.ring
    if M.is_zero_complex() or N.is_zero_complex():
        return zero_complex(ring)
    lo = min(N.support) - max(M.support)
    hi = max(N.support) - min(M.support)
    ranks = {}
    for n in range(lo, hi + 1):
        ranks[n] = sum(a * b for _, a, b in hom_layout(M, N, n))
    diffs = {}
    one = ring.one
    for n in range(lo, hi + 1):
        src = hom_layout(M, N, n)
        tgt = hom_layout(M, N, n - 1)
        if not any(a * b for _, a, b in src) or not any(a * b for _, a, b in tgt):
            continue
        sign = one if n % 2 == 0 else -one
        grid = []
        for (i2, a2, b2) in tgt:
            row = []
            for (i, a, b) in src:
                rows_, cols_ = a2 * b2, a * b
                if i2 == i and rows_ and cols_:
                    # postcompose with d_N: vec_row(D F) = (D kron I) vec_row(F)
                    block = N.diff(i + n).kron(Matrix.identity(ring, b))
                elif i2 == i + 1 and rows_ and cols_:
                    # precompose with d_M, sign -(-1)^n: (I kron d_M^T)
                    block = Matrix.identity(ring, a2).kron(
                        M.diff(i + 1).transpose()).scale(-sign)
                else:
                    block = Matrix.zeros(ring, rows_, cols_)
                row.append(block)
            grid.append(row)
        diffs[n] = Matrix.block(grid)
    return ChainComplex(ring, ranks, diffs)


def cone(phi):
    """Mapping cone: degree n is target_n + source_{n-1}, block differential
    [[d_target, phi], [0, -d_source]]."""
    src, tgt = phi.source, phi.target
    ring = src.ring
    degrees = sorted(set(n for n in src.degrees()) | set(tgt.degrees())
                     | set(n + 1 for n in src.degrees()))
    ranks = {n: tgt.rank(n) + src.rank(n - 1) for n in degrees}
    diffs = {}
    for n in degrees:
        rows = tgt.rank(n - 1) + src.rank(n - 2)
        cols = tgt.rank(n) + src.rank(n - 1)
        if rows == 0 or cols == 0:
            continue
        grid = [[tgt.diff(n), phi.component(n - 1)],
                [Matrix.zeros(ring, src.rank(n - 2), tgt.rank(n)),
                 src.diff(n - 1).scale(-ring.one)]]
        diffs[n] = Matrix.block(grid)
    return ChainComplex(ring, {n: r for n, r in ranks.items() if r}, diffs)


def cone_contraction_of_identity(M):
    """The standard contraction of cone(id): lower-left identity blocks."""
    ring = M.ring
    comps = {}
    for n in M.degrees():
        rows = M.rank(n + 1) + M.rank(n)
        cols = M.rank(n) + M.rank(n - 1)
        if rows == 0 or cols == 0:
            continue
        grid = [[Matrix.zeros(ring, M.rank(n + 1), M.rank(n)),
                 Matrix.zeros(ring, M.rank(n + 1), M.rank(n - 1))],
                [Matrix.identity(ring, M.rank(n)),
                 Matrix.zeros(ring, M.rank(n), M.rank(n - 1))]]
        comps[n] = Matrix.block(grid)
    return Homotopy(comps, "contraction")


def base_change(hom, M):
    """Apply a ring homomorphism to every differential entry."""
    tgt = hom.target
    diffs = {n: d.map_entries(hom, tgt) for n, d in M._diffs.items()}
    return ChainComplex(tgt, dict(M._ranks), diffs)


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyBounds:
    acyclic: bool
    sup: int | None
    inf: int | None


def homology(M, n):
    return homology_module(M.ring, M.diff(n + 1), M.diff(n))


def sup_inf(M):
    """Degrees of extreme nonzero homology, or an explicit acyclic flag."""
    if not has_solver(M.ring):
        raise CapabilityMissing(f"homology needs linear solving over {M.ring}")
    found = [n for n in M.degrees() if not homology(M, n).is_zero]
    if not found:
        return HomologyBounds(True, None, None)
    return HomologyBounds(False, max(found), min(found))


def has_solver(ring):
    from .linalg import has_linear_solve
    return has_linear_solve(ring)


def is_quasi_iso(phi, homotopy=None):
    """Quasiisomorphism check.

    Certificate mode: a supplied contraction of the cone is verified by
    matrix arithmetic and works over every ring tier.  Computational mode
    (no homotopy): the cone's homology must vanish, linear_solve rings only.
    """
    c = cone(phi)
    if homotopy is not None:
        return is_contraction(homotopy, c)
    return sup_inf(c).acyclic


def is_minimal(M):
    """True when every differential entry is a non-unit (local rings only)."""
    if not M.ring.local:
        raise NotLocal(f"{M.ring} is not certified local")
    for d in M._diffs.values():
        for row in d.data:
            for x in row:
                if x.is_unit():
                    return False
    return True


def augment_by_resolution(A, m, depth_budget=4):
    """Extend A above degree m by a free resolution of ker(diff(m)).

    The result agrees with A up to degree m and is exact in degrees
    m..m+depth_budget-1; over non-field rings the resolution may continue
    forever, so the top added degree can carry homology (windowed output).
    """
    if not has_solver(A.ring):
        raise CapabilityMissing(f"resolution needs linear solving over {A.ring}")
    if A.support and max(A.support) > m:
        raise DimensionMismatch(f"support of A must lie in degrees <= {m}")
    ranks = dict(A._ranks)
    diffs = dict(A._diffs)
    current = A.diff(m)
    degree = m
    for _ in range(depth_budget):
        K = kernel_basis(A.ring, current)
        K = minimal_generators(A.ring, K)
        if K.cols == 0:
            break
        degree += 1
        ranks[degree] = K.cols
        diffs[degree] = K
        current = K
    return ChainComplex(A.ring, ranks, diffs)
