"""Exact linear algebra over rings with the linear_solve capability.

One engine drives everything: matrices over Z, Z/n, F_p[x] and its
quotients are lifted to a Euclidean domain where a Smith decomposition
with recorded transforms exists; fields use the same machinery with
trivial gcds; finite-dimensional quotient algebras over F_p expand to
plain F_p linear algebra.  Kernels, solvability, module cardinalities
and subquotient presentations all read off these decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapabilityMissing, DimensionMismatch, NotAComplex
from .matrices import Matrix
from .rings import (
    INTEGERS, POLYQUOT, PRIMEFIELD, RATIONALS, ZMOD, RingElement,
)

_SMITH_SWEEP_CAP = 10_000


# ---------------------------------------------------------------------------
# Euclidean payload domains


class IntED:
    """Integers as a Euclidean domain on raw int payloads."""

    zero = 0
    one = 1

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def quo(a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact division")
        return q

    @staticmethod
    def divmod_(a, b):
        q = a // b
        return q, a - q * b

    @staticmethod
    def gcdex(a, b):
        x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
        while ng:
            q = g // ng
            x, nx = nx, x - q * nx
            y, ny = ny, y - q * ny
            g, ng = ng, g - q * ng
        if g < 0:
            x, y, g = -x, -y, -g
        return g, x, y

    @staticmethod
    def canon(a):
        """a = unit * canonical; canonical is nonnegative."""
        return (-1, -a) if a < 0 else (1, a)

    @staticmethod
    def unit_inv(u):
        return u

    @staticmethod
    def size(a):
        return abs(a)

    @staticmethod
    def is_unit(a):
        return a in (1, -1)

    @staticmethod
    def mod(a, f):
        return a % f

    @staticmethod
    def inv_mod(a, f):
        return pow(a, -1, f)

    @staticmethod
    def quotient_card(g):
        """|Z/(g)| for g != 0."""
        return abs(g)


class PolyED:
    """Univariate polynomials over F_p; payloads are little-endian tuples."""

    def __init__(self, p):
        self.p = p
        self.zero = ()
        self.one = (1 % p,)

    @staticmethod
    def is_zero(a):
        return not a

    def _trim(self, coeffs):
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return tuple(coeffs)

    def add(self, a, b):
        n = max(len(a), len(b))
        out = [( (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) ) % self.p
               for i in range(n)]
        return self._trim(out)

    def neg(self, a):
        return tuple((-c) % self.p for c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] = (out[i + j] + ca * cb) % self.p
        return self._trim(out)

    def divmod_(self, a, b):
        if not b:
            raise ZeroDivisionError
        a = list(a)
        q = [0] * max(0, len(a) - len(b) + 1)
        inv_lead = pow(b[-1], -1, self.p)
        for i in range(len(a) - len(b), -1, -1):
            c = (a[i + len(b) - 1] * inv_lead) % self.p
            if c:
                q[i] = c
                for j, cb in enumerate(b):
                    a[i + j] = (a[i + j] - c * cb) % self.p
        return self._trim(q), self._trim(a)

    def quo(self, a, b):
        q, r = self.divmod_(a, b)
        if r:
            raise ArithmeticError("inexact division")
        return q

    def gcdex(self, a, b):
        x, nx, y, ny, g, ng = self.one, self.zero, self.zero, self.one, a, b
        while ng:
            q, r = self.divmod_(g, ng)
            x, nx = nx, self.add(x, self.neg(self.mul(q, nx)))
            y, ny = ny, self.add(y, self.neg(self.mul(q, ny)))
            g, ng = ng, r
        if g:
            u = pow(g[-1], -1, self.p)
            scale = (u,)
            g, x, y = self.mul(scale, g), self.mul(scale, x), self.mul(scale, y)
        return g, x, y

    def canon(self, a):
        if not a:
            return self.one, a
        u = (a[-1],)
        return u, self.mul((pow(a[-1], -1, self.p),), a)

    def unit_inv(self, u):
        return (pow(u[0], -1, self.p),)

    @staticmethod
    def size(a):
        return len(a)

    @staticmethod
    def is_unit(a):
        return len(a) == 1

    def mod(self, a, f):
        return self.divmod_(a, f)[1]

    def inv_mod(self, a, f):
        g, s, _ = self.gcdex(a, f)
        if not self.is_unit(g):
            raise ArithmeticError("not invertible")
        return self.mod(self.mul(self.quo(self.one, g), s), f) if g != self.one \
            else self.mod(s, f)

    def quotient_card(self, g):
        return self.p ** (len(g) - 1)


class FieldED:
    """Any field ring as a trivial Euclidean domain on RingElement payloads."""

    def __init__(self, ring):
        self.ring = ring
        self.zero = ring.zero
        self.one = ring.one

    @staticmethod
    def is_zero(a):
        return a.is_zero()

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    def inv(self, a):
        r = self.ring
        if r.kind == RATIONALS:
            return RingElement(r, Fraction(1) / a.payload)
        if r.kind == PRIMEFIELD:
            return RingElement(r, pow(a.payload, -1, r.modulus))
        raise CapabilityMissing(f"no field inverse over {r}")

    def quo(self, a, b):
        return a * self.inv(b)

    def divmod_(self, a, b):
        return self.quo(a, b), self.zero

    def gcdex(self, a, b):
        if not a.is_zero():
            return self.one, self.inv(a), self.zero
        if not b.is_zero():
            return self.one, self.zero, self.inv(b)
        return self.zero, self.one, self.zero

    def canon(self, a):
        if a.is_zero():
            return self.one, a
        return a, self.one

    def unit_inv(self, u):
        return self.inv(u)

    @staticmethod
    def size(a):
        return 1

    @staticmethod
    def is_unit(a):
        return not a.is_zero()


# ---------------------------------------------------------------------------
# ring -> lift context


@dataclass
class _LiftContext:
    ed: object
    modulus: object          # ED payload, or None when the ring is the domain itself
    to_payload: callable     # RingElement -> ED payload
    from_payload: callable   # ED payload -> RingElement
    finite_card: int | None  # |ring| when finite


def _poly_payload_to_dense(ring, payload):
    out = []
    for (e,), c in payload:
        while len(out) <= e:
            out.append(0)
        out[e] = c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _dense_to_poly_payload(ring, dense):
    items = [(((i,), c)) for i, c in enumerate(dense) if c]
    items.sort(key=lambda item: ring._key(item[0]), reverse=True)
    return tuple(items)


def lift_context(ring):
    """The Euclidean lift behind a linear_solve ring, or None."""
    if ring.kind == INTEGERS:
        return _LiftContext(IntED, None, lambda x: x.payload,
                            lambda p: RingElement(ring, p), None)
    if ring.kind in (ZMOD, PRIMEFIELD) and ring.kind == ZMOD:
        n = ring.modulus
        return _LiftContext(IntED, n, lambda x: x.payload,
                            lambda p: RingElement(ring, p % n), n)
    if ring.kind == PRIMEFIELD:
        ed = FieldED(ring)
        return _LiftContext(ed, None, lambda x: x, lambda p: p, ring.modulus)
    if ring.kind == RATIONALS:
        ed = FieldED(ring)
        return _LiftContext(ed, None, lambda x: x, lambda p: p, None)
    if ring.kind == POLYQUOT and len(ring.variables) == 1 and ring.coeff.kind == "Fp":
        ed = PolyED(ring.coeff.p)
        gb = ring.groebner
        modulus = _poly_payload_to_dense(ring, gb[0]) if gb else None
        card = ring.cardinality()
        return _LiftContext(
            ed, modulus,
            lambda x: _poly_payload_to_dense(ring, x.payload),
            lambda p: RingElement(ring, _dense_to_poly_payload(
                ring, p if modulus is None else ed.mod(p, modulus))),
            card)
    return None


def _expansion(ring):
    if ring.kind == POLYQUOT and ring._finite_dimensional() and ring.coeff.kind == "Fp":
        return _FiniteDimExpansion.get(ring)
    return None


def has_linear_solve(ring):
    return lift_context(ring) is not None or _expansion(ring) is not None


def _require_solver(ring):
    if not has_linear_solve(ring):
        raise CapabilityMissing(f"{ring} does not support linear solving")


# ---------------------------------------------------------------------------
# Smith decomposition over a Euclidean domain, with recorded transforms


class _SmithData:
    def __init__(self, ed, rows, cols):
        self.ed = ed
        self.rows = rows
        self.cols = cols
        self.m = None      # diagonalized grid
        self.S = None      # left transform and its inverse
        self.Si = None
        self.T = None      # right transform and its inverse
        self.Ti = None

    def diag(self, i):
        if i < min(self.rows, self.cols):
            return self.m[i][i]
        return self.ed.zero


def _identity_grid(ed, n):
    return [[ed.one if i == j else ed.zero for j in range(n)] for i in range(n)]


def smith_data(ed, grid, rows, cols):
    """S * grid * T = D diagonal with divisibility chain; all over `ed`."""
    m = [list(r) for r in grid]
    sd = _SmithData(ed, rows, cols)
    S, Si = _identity_grid(ed, rows), _identity_grid(ed, rows)
    T, Ti = _identity_grid(ed, cols), _identity_grid(ed, cols)

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        S[i], S[j] = S[j], S[i]
        for r in Si:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in T:
            r[i], r[j] = r[j], r[i]
        Ti[i], Ti[j] = Ti[j], Ti[i]

    def row_combine(i, j, a, b, c, d):
        # rows (i,j) <- (a ri + b rj, c ri + d rj); requires det = ad - bc = 1
        for mat in (m, S):
            ri, rj = mat[i], mat[j]
            mat[i] = [ed.add(ed.mul(a, x), ed.mul(b, y)) for x, y in zip(ri, rj)]
            mat[j] = [ed.add(ed.mul(c, x), ed.mul(d, y)) for x, y in zip(ri, rj)]
        # Si <- Si * inverse([[a,b],[c,d]]) acting on columns i, j
        for r in Si:
            x, y = r[i], r[j]
            r[i] = ed.add(ed.mul(d, x), ed.neg(ed.mul(c, y)))
            r[j] = ed.add(ed.mul(a, y), ed.neg(ed.mul(b, x)))

    def col_combine(i, j, a, b, c, d):
        # cols (i,j) <- (a ci + b cj, c ci + d cj); requires det = ad - bc = 1
        for mat in (m, T):
            for r in mat:
                x, y = r[i], r[j]
                r[i] = ed.add(ed.mul(a, x), ed.mul(b, y))
                r[j] = ed.add(ed.mul(c, x), ed.mul(d, y))
        ri, rj = Ti[i], Ti[j]
        Ti[i] = [ed.add(ed.mul(d, x), ed.neg(ed.mul(c, y))) for x, y in zip(ri, rj)]
        Ti[j] = [ed.add(ed.mul(a, y), ed.neg(ed.mul(b, x))) for x, y in zip(ri, rj)]

    def eliminate_row(k, i):
        # kill m[i][k] against the pivot m[k][k]; leave the pivot row alone
        # whenever the pivot divides the entry (prevents swap oscillation)
        a, b = m[k][k], m[i][k]
        if not ed.is_zero(a):
            q, r = ed.divmod_(b, a)
            if ed.is_zero(r):
                row_combine(k, i, ed.one, ed.zero, ed.neg(q), ed.one)
                return
        g, s, t = ed.gcdex(a, b)
        row_combine(k, i, s, t, ed.neg(ed.quo(b, g)), ed.quo(a, g))

    def eliminate_col(k, j):
        a, b = m[k][k], m[k][j]
        if not ed.is_zero(a):
            q, r = ed.divmod_(b, a)
            if ed.is_zero(r):
                col_combine(k, j, ed.one, ed.zero, ed.neg(q), ed.one)
                return
        g, s, t = ed.gcdex(a, b)
        col_combine(k, j, s, t, ed.neg(ed.quo(b, g)), ed.quo(a, g))

    def clear_at(k):
        while True:
            for i in range(k + 1, rows):
                if not ed.is_zero(m[i][k]):
                    eliminate_row(k, i)
            if all(ed.is_zero(m[k][j]) for j in range(k + 1, cols)):
                return
            for j in range(k + 1, cols):
                if not ed.is_zero(m[k][j]):
                    eliminate_col(k, j)
            if all(ed.is_zero(m[i][k]) for i in range(k + 1, rows)):
                return

    limit = min(rows, cols)
    for sweep in range(_SMITH_SWEEP_CAP):
        for k in range(limit):
            pivot = None
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    if not ed.is_zero(m[i][j]):
                        s = ed.size(m[i][j])
                        if best is None or s < best:
                            best, pivot = s, (i, j)
            if pivot is None:
                break
            if pivot != (k, k):
                if pivot[0] != k:
                    row_swap(k, pivot[0])
                if pivot[1] != k:
                    col_swap(k, pivot[1])
            clear_at(k)
        # enforce the divisibility chain d1 | d2 | ...
        violation = None
        for i in range(limit - 1):
            a, b = m[i][i], m[i + 1][i + 1]
            if ed.is_zero(a) and not ed.is_zero(b):
                violation = i
                break
            if not ed.is_zero(a) and not ed.is_zero(b):
                _, r = ed.divmod_(b, a)
                if not ed.is_zero(r):
                    violation = i
                    break
        if violation is None:
            break
        i = violation
        # fold the next diagonal entry into row i so the gcd step can run
        row_combine(i, i + 1, ed.one, ed.one, ed.zero, ed.one)
    else:
        raise ArithmeticError("smith sweep cap exceeded")

    # canonicalize diagonal units (positive integers / monic polynomials)
    for i in range(limit):
        u, c = ed.canon(m[i][i])
        if not ed.is_unit(u) and not ed.is_zero(m[i][i]):
            raise ArithmeticError("canon returned a non-unit")
        if c != m[i][i]:
            inv = ed.unit_inv(u)
            m[i] = [ed.mul(inv, x) for x in m[i]]
            S[i] = [ed.mul(inv, x) for x in S[i]]
            for r in Si:
                r[i] = ed.mul(u, r[i])

    sd.m, sd.S, sd.Si, sd.T, sd.Ti = m, S, Si, T, Ti
    return sd


# ---------------------------------------------------------------------------
# the finite-dimensional F_p expansion path


def _fp_rref(p, rows, ncols):
    """In-place reduced row echelon; returns pivot column list.

    For p = 2 rows are ints (bit j = column j); otherwise lists of ints.
    """
    pivots = []
    rank = 0
    if p == 2:
        for col in range(ncols):
            bit = 1 << col
            sel = None
            for r in range(rank, len(rows)):
                if rows[r] & bit:
                    sel = r
                    break
            if sel is None:
                continue
            rows[rank], rows[sel] = rows[sel], rows[rank]
            pivot_row = rows[rank]
            for r in range(len(rows)):
                if r != rank and rows[r] & bit:
                    rows[r] ^= pivot_row
            pivots.append(col)
            rank += 1
        return pivots
    for col in range(ncols):
        sel = None
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                sel = r
                break
        if sel is None:
            continue
        rows[rank], rows[sel] = rows[sel], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(inv * x) % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return pivots


def _fp_kernel(p, rows, ncols):
    """Kernel basis vectors (lists of ints) of the matrix given by rows."""
    work = list(rows)
    pivots = _fp_rref(p, work, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for r, pc in enumerate(pivots):
            if p == 2:
                if work[r] & (1 << free):
                    vec[pc] = 1
            else:
                if work[r][free] % p:
                    vec[pc] = (-work[r][free]) % p
        basis.append(vec)
    return basis


def _fp_solve(p, rows, ncols, b):
    """One solution of rows * x = b over F_p, or None."""
    if len(b) != len(rows):
        raise DimensionMismatch("rhs length does not match row count")
    if p == 2:
        work = [r | (bit << ncols) for r, bit in zip(rows, b)]
        pivots = _fp_rref(2, work, ncols)
        x = [0] * ncols
        for r, pc in enumerate(pivots):
            if work[r] & (1 << ncols):
                x[pc] = 1
        for r in range(len(pivots), len(work)):
            if work[r] >> ncols:
                return None
        return x
    work = [list(r) + [bb % p] for r, bb in zip(rows, b)]
    pivots = _fp_rref(p, work, ncols)
    x = [0] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = work[r][ncols]
    for r in range(len(pivots), len(work)):
        if work[r][ncols] % p:
            return None
    return x


def _fp_rank(p, rows, ncols):
    work = list(rows) if p == 2 else [list(r) for r in rows]
    return len(_fp_rref(p, work, ncols))


class _FiniteDimExpansion:
    """Linear algebra over a finite-dimensional F_p-algebra by expansion."""

    _cache = {}

    @classmethod
    def get(cls, ring):
        key = id(ring)
        if key not in cls._cache:
            cls._cache[key] = cls(ring)
        return cls._cache[key]

    def __init__(self, ring):
        self.ring = ring
        self.p = ring.coeff.p
        self.std = list(ring._std_monomials)
        self.index = {m: i for i, m in enumerate(self.std)}
        self.dim = len(self.std)
        self._mult_cache = {}

    def coords(self, payload):
        out = [0] * self.dim
        for e, c in payload:
            out[self.index[e]] = c
        return out

    def from_coords(self, coords):
        d = {self.std[i]: c % self.p for i, c in enumerate(coords) if c % self.p}
        items = sorted(d.items(), key=lambda kv: self.ring._key(kv[0]), reverse=True)
        return RingElement(self.ring, tuple(items))

    def mult_columns(self, payload):
        """Columns of the multiplication-by-payload map on the standard basis."""
        if payload not in self._mult_cache:
            cols = []
            for mono in self.std:
                prod = self.ring.mul_payload(payload, ((mono, 1),))
                cols.append(self.coords(prod))
            self._mult_cache[payload] = cols
        return self._mult_cache[payload]

    def expand_matrix(self, A):
        """(rows*dim) x (cols*dim) F_p rows; bitmask ints when p = 2.

        Zero entries are skipped entirely, which matters for the sparse
        block matrices of hom complexes.
        """
        D = self.dim
        nrows, ncols = A.rows * D, A.cols * D
        if self.p == 2:
            rows = [0] * nrows
            for i in range(A.rows):
                base_row = i * D
                for j in range(A.cols):
                    payload = A.data[i][j].payload
                    if not payload:
                        continue
                    cols = self.mult_columns(payload)
                    base_col = j * D
                    for bcol in range(D):
                        col = cols[bcol]
                        bit = 1 << (base_col + bcol)
                        for brow in range(D):
                            if col[brow]:
                                rows[base_row + brow] |= bit
            return rows, ncols
        grid = [[0] * ncols for _ in range(nrows)]
        for i in range(A.rows):
            for j in range(A.cols):
                payload = A.data[i][j].payload
                if not payload:
                    continue
                cols = self.mult_columns(payload)
                for bcol in range(D):
                    col = cols[bcol]
                    for brow in range(D):
                        if col[brow]:
                            grid[i * D + brow][j * D + bcol] = col[brow]
        return grid, ncols

    def expand_column(self, b):
        out = []
        for i in range(b.rows):
            out.extend(self.coords(b.data[i][0].payload))
        return out

    def column_from_vector(self, vec, nentries):
        D = self.dim
        entries = [self.from_coords(vec[k * D:(k + 1) * D]) for k in range(nentries)]
        return Matrix(self.ring, nentries, 1, tuple((e,) for e in entries))


# ---------------------------------------------------------------------------
# public operations


def _matrix_to_grid(ctx, A):
    return [[ctx.to_payload(A.data[i][j]) for j in range(A.cols)] for i in range(A.rows)]


def _smith_of(ring, A):
    ctx = lift_context(ring)
    grid = _matrix_to_grid(ctx, A)
    return ctx, smith_data(ctx.ed, grid, A.rows, A.cols)


def kernel_basis(ring, A):
    """Columns generating ker(A) as a module (a basis over fields, Z, F_p[x])."""
    _require_solver(ring)
    ctx = lift_context(ring)
    if ctx is None:
        exp = _expansion(ring)
        rows, ncols = exp.expand_matrix(A)
        vecs = [exp.column_from_vector(v, A.cols) for v in _fp_kernel(exp.p, rows, ncols)]
        gens = [v for v in vecs if not v.is_zero()]
        if not gens:
            return Matrix.zeros(ring, A.cols, 0)
        out = gens[0]
        for g in gens[1:]:
            out = out.hstack(g)
        return out
    ed = ctx.ed
    sd = smith_data(ed, _matrix_to_grid(ctx, A), A.rows, A.cols)
    f = ctx.modulus
    gens = []
    for j in range(A.cols):
        d = sd.diag(j)
        if f is None:
            if not ed.is_zero(d):
                continue
            scale = ed.one
        else:
            g, _, _ = ed.gcdex(d, f)
            scale = ed.quo(f, g)
            _, r = ed.divmod_(scale, f)
            if ed.is_zero(r):
                continue  # annihilator is zero: this column contributes nothing
        col = [ed.mul(sd.T[i][j], scale) for i in range(A.cols)]
        if f is not None:
            col = [ed.mod(x, f) for x in col]
        if all(ed.is_zero(x) for x in col):
            continue
        gens.append([ctx.from_payload(x) for x in col])
    if not gens:
        return Matrix.zeros(ring, A.cols, 0)
    return Matrix(ring, A.cols, len(gens),
                  tuple(tuple(g[i] for g in gens) for i in range(A.cols)))


def solve(ring, A, B):
    """Some X with A X = B, or None; B may have several columns."""
    _require_solver(ring)
    if A.rows != B.rows:
        raise DimensionMismatch(f"A is {A.rows}x{A.cols}, rhs has {B.rows} rows")
    ctx = lift_context(ring)
    if ctx is None:
        exp = _expansion(ring)
        rows, ncols = exp.expand_matrix(A)
        cols = []
        for b in B.columns():
            vec = _fp_solve(exp.p, rows, ncols, exp.expand_column(b))
            if vec is None:
                return None
            cols.append(exp.column_from_vector(vec, A.cols))
        if not cols:
            return Matrix.zeros(ring, A.cols, 0)
        out = cols[0]
        for c in cols[1:]:
            out = out.hstack(c)
        return out
    ed = ctx.ed
    sd = smith_data(ed, _matrix_to_grid(ctx, A), A.rows, A.cols)
    f = ctx.modulus
    out_cols = []
    for b in B.columns():
        bp = [ctx.to_payload(b.data[i][0]) for i in range(b.rows)]
        c = [None] * A.rows
        for i in range(A.rows):
            acc = ed.zero
            for k in range(A.rows):
                acc = ed.add(acc, ed.mul(sd.S[i][k], bp[k]))
            c[i] = acc if f is None else ed.mod(acc, f)
        y = [ed.zero] * A.cols
        ok = True
        for i in range(A.rows):
            d = sd.diag(i) if i < A.cols else ed.zero
            ci = c[i]
            if f is None:
                if ed.is_zero(d):
                    if not ed.is_zero(ci):
                        ok = False
                        break
                else:
                    q, r = ed.divmod_(ci, d)
                    if not ed.is_zero(r):
                        ok = False
                        break
                    if i < A.cols:
                        y[i] = q
            else:
                g, _, _ = ed.gcdex(d, f) if not ed.is_zero(d) else (f, None, None)
                if ed.is_zero(g):
                    # f itself is zero cannot happen here (finite quotient)
                    g = f
                _, rem = ed.divmod_(ci, g)
                if not ed.is_zero(rem):
                    ok = False
                    break
                fg = ed.quo(f, g)
                if i < A.cols and not ed.is_unit(fg):
                    dg = ed.quo(d, g) if not ed.is_zero(d) else ed.zero
                    cg = ed.quo(ci, g)
                    if ed.is_zero(dg):
                        y[i] = ed.zero
                    else:
                        y[i] = ed.mod(ed.mul(cg, ed.inv_mod(dg, fg)), fg)
        if not ok:
            return None
        x = []
        for i in range(A.cols):
            acc = ed.zero
            for k in range(A.cols):
                acc = ed.add(acc, ed.mul(sd.T[i][k], y[k]))
            x.append(ctx.from_payload(acc if f is None else ed.mod(acc, f)))
        out_cols.append(x)
    if not out_cols:
        return Matrix.zeros(ring, A.cols, 0)
    return Matrix(ring, A.cols, len(out_cols),
                  tuple(tuple(col[i] for col in out_cols) for i in range(A.cols)))


def invert(ring, A):
    """Two-sided inverse of a square matrix, or None."""
    if A.rows != A.cols:
        return None
    X = solve(ring, A, Matrix.identity(ring, A.rows))
    if X is None:
        return None
    if not (X * A - Matrix.identity(ring, A.rows)).is_zero():
        return None
    return X


def kernel_cardinality(ring, A):
    """|ker A| over a finite ring."""
    ctx = lift_context(ring)
    if ctx is None:
        exp = _expansion(ring)
        rows, ncols = exp.expand_matrix(A)
        return exp.p ** (ncols - _fp_rank(exp.p, rows, ncols))
    if ctx.finite_card is None:
        raise CapabilityMissing(f"{ring} is not finite")
    ed = ctx.ed
    if isinstance(ed, FieldED):
        sd = smith_data(ed, _matrix_to_grid(ctx, A), A.rows, A.cols)
        rank = sum(1 for i in range(min(A.rows, A.cols)) if not ed.is_zero(sd.diag(i)))
        return ctx.finite_card ** (A.cols - rank)
    sd = smith_data(ed, _matrix_to_grid(ctx, A), A.rows, A.cols)
    f = ctx.modulus
    total = 1
    for j in range(A.cols):
        d = sd.diag(j)
        if ed.is_zero(d):
            total *= ctx.finite_card
        else:
            g, _, _ = ed.gcdex(d, f)
            total *= ed.quotient_card(g)
    return total


def span_cardinality(ring, A):
    """|column span of A| as a submodule of ring^rows (finite rings)."""
    if A.cols == 0:
        return 1
    ctx = lift_context(ring)
    if ctx is None:
        exp = _expansion(ring)
        rows, ncols = exp.expand_matrix(A)
        return exp.p ** _fp_rank(exp.p, rows, ncols)
    if ctx.finite_card is None:
        raise CapabilityMissing(f"{ring} is not finite")
    return ctx.finite_card ** A.cols // kernel_cardinality(ring, A)


# ---------------------------------------------------------------------------
# normal forms with certificates


@dataclass
class NormalFormResult:
    form: str
    ring: object
    matrix: Matrix
    left: Matrix
    left_inv: Matrix
    right: Matrix
    right_inv: Matrix
    original: Matrix

    def verify(self):
        n_l = Matrix.identity(self.ring, self.left.rows)
        n_r = Matrix.identity(self.ring, self.right.rows)
        return ((self.left * self.original * self.right) == self.matrix
                and (self.left * self.left_inv) == n_l
                and (self.right * self.right_inv) == n_r)

    def diagonal(self):
        return [self.matrix.data[i][i]
                for i in range(min(self.matrix.rows, self.matrix.cols))]


def _grid_to_matrix(ring, ctx, grid):
    f = ctx.modulus
    ed = ctx.ed
    conv = (lambda p: ctx.from_payload(ed.mod(p, f))) if f is not None else ctx.from_payload
    if not grid:
        return Matrix.zeros(ring, 0, 0)
    return Matrix(ring, len(grid), len(grid[0]),
                  tuple(tuple(conv(x) for x in row) for row in grid))


def smith_form(ring, A):
    """Smith form over Z or F_p[x] (also valid over fields)."""
    ctx = lift_context(ring)
    if ctx is None or ctx.modulus is not None:
        raise CapabilityMissing(f"smith form needs a domain, not {ring}")
    sd = smith_data(ctx.ed, _matrix_to_grid(ctx, A), A.rows, A.cols)
    return NormalFormResult(
        "smith", ring, _grid_to_matrix(ring, ctx, sd.m),
        _grid_to_matrix(ring, ctx, sd.S), _grid_to_matrix(ring, ctx, sd.Si),
        _grid_to_matrix(ring, ctx, sd.T), _grid_to_matrix(ring, ctx, sd.Ti), A)


def row_echelon(ring, A):
    """Reduced row echelon over a field, with recorded row transform."""
    if ring.kind not in (RATIONALS, PRIMEFIELD):
        raise CapabilityMissing(f"row echelon requires a field, got {ring}")
    ed = FieldED(ring)
    m = [list(r) for r in A.data]
    L = _identity_grid(ed, A.rows)
    Li = _identity_grid(ed, A.rows)
    rank = 0
    for col in range(A.cols):
        sel = None
        for r in range(rank, A.rows):
            if not m[r][col].is_zero():
                sel = r
                break
        if sel is None:
            continue
        if sel != rank:
            m[rank], m[sel] = m[sel], m[rank]
            L[rank], L[sel] = L[sel], L[rank]
            for row in Li:
                row[rank], row[sel] = row[sel], row[rank]
        c = m[rank][col]
        inv = ed.inv(c)
        m[rank] = [inv * x for x in m[rank]]
        L[rank] = [inv * x for x in L[rank]]
        for row in Li:
            row[rank] = c * row[rank]
        for r in range(A.rows):
            if r != rank and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
                L[r] = [x - f * y for x, y in zip(L[r], L[rank])]
                # (I + f e_r e_rank^T)^-1 adds f * column r into column rank
                for row in Li:
                    row[rank] = row[rank] + f * row[r]
        rank += 1
    to_m = lambda g, rows, cols: Matrix(ring, rows, cols, tuple(tuple(r) for r in g)) \
        if rows else Matrix.zeros(ring, 0, cols)
    return NormalFormResult(
        "echelon", ring, to_m(m, A.rows, A.cols),
        to_m(L, A.rows, A.rows), to_m(Li, A.rows, A.rows),
        Matrix.identity(ring, A.cols), Matrix.identity(ring, A.cols), A)


def howell_form(ring, A):
    """Howell form over Z/n, canonical for the row span.

    Computed as the Hermite form over Z of the lift stacked on n*I; the
    recorded transforms act on that padded matrix (the `original` field),
    which is A with `cols` extra zero rows appended.
    """
    if ring.kind not in (ZMOD, PRIMEFIELD):
        raise CapabilityMissing(f"howell form is for Z/n, got {ring}")
    n = ring.modulus
    ed = IntED
    rows, cols = A.rows, A.cols
    grid = [[A.data[i][j].payload for j in range(cols)] for i in range(rows)]
    grid += [[n if i == j else 0 for j in range(cols)] for i in range(cols)]
    total = rows + cols
    U = _identity_grid(ed, total)
    Ui = _identity_grid(ed, total)

    def combine(i, j, a, b, c, d):
        # rows (i,j) <- (a ri + b rj, c ri + d rj), det = ad - bc = 1
        for mat in (grid, U):
            ri, rj = mat[i], mat[j]
            mat[i] = [a * x + b * y for x, y in zip(ri, rj)]
            mat[j] = [c * x + d * y for x, y in zip(ri, rj)]
        for r in Ui:
            x, y = r[i], r[j]
            r[i] = d * x - c * y
            r[j] = a * y - b * x

    def negate_row(i):
        grid[i] = [-x for x in grid[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    # hermite: column by column on the padded stack
    pivot_row = 0
    for col in range(cols):
        for i in range(pivot_row + 1, total):
            if grid[i][col]:
                a, b = grid[pivot_row][col], grid[i][col]
                g, s, t = ed.gcdex(a, b)
                combine(pivot_row, i, s, t, -(b // g), a // g)
        if grid[pivot_row][col]:
            if grid[pivot_row][col] < 0:
                negate_row(pivot_row)
            piv = grid[pivot_row][col]
            for i in range(pivot_row):
                q = grid[i][col] // piv
                if q:
                    combine(i, pivot_row, 1, -q, 0, 1)
            pivot_row += 1
            if pivot_row == total:
                break

    def conv(g, width):
        if not g:
            return Matrix.zeros(ring, 0, width)
        return Matrix(ring, len(g), width,
                      tuple(tuple(RingElement(ring, x % n) for x in row) for row in g))

    padded = A.vstack(Matrix.zeros(ring, cols, cols))
    return NormalFormResult(
        "howell", ring, conv(grid, cols), conv(U, total), conv(Ui, total),
        Matrix.identity(ring, cols), Matrix.identity(ring, cols), padded)


def matrix_normal_form(ring, A):
    """The ring-appropriate normal form: echelon, smith, or howell."""
    if ring.kind in (RATIONALS, PRIMEFIELD):
        return row_echelon(ring, A)
    if ring.kind == ZMOD:
        return howell_form(ring, A)
    if ring.kind == INTEGERS:
        return smith_form(ring, A)
    ctx = lift_context(ring)
    if ctx is not None and ctx.modulus is None:
        return smith_form(ring, A)
    raise CapabilityMissing(f"no matrix normal form over {ring}")


# ---------------------------------------------------------------------------
# homology presentations


@dataclass
class HomologySummary:
    """ker/im presented at the level each ring supports.

    Fields are None when not applicable: `dimension` over fields,
    `cardinality` over finite rings, `free_rank`/`invariant_factors`
    over Z and F_p[x].
    """

    ring: object
    is_zero: bool
    ngens: int
    cardinality: int | None = None
    dimension: int | None = None
    free_rank: int | None = None
    invariant_factors: tuple = None

    def describe(self):
        r = self.ring
        if self.is_zero:
            return "0"
        if r.kind in (RATIONALS, PRIMEFIELD) and self.dimension is not None:
            return f"k^{self.dimension}"
        if self.free_rank is not None or self.invariant_factors:
            parts = []
            if self.free_rank:
                parts.append(f"Z^{self.free_rank}")
            parts.extend(f"Z/{f}" for f in (self.invariant_factors or ()))
            if parts:
                return " + ".join(parts)
        return f"card {self.cardinality}"

    def same_as(self, other):
        """Equality at the strongest level both sides support."""
        if self.is_zero or other.is_zero:
            return self.is_zero == other.is_zero
        if self.dimension is not None and other.dimension is not None:
            return self.dimension == other.dimension
        if self.cardinality is not None and other.cardinality is not None:
            return self.cardinality == other.cardinality
        return (self.free_rank, self.invariant_factors) == \
            (other.free_rank, other.invariant_factors)


def _domain_subquotient(ring, V, W):
    """span(V)/span(W) over Z or F_p[x]: free rank plus invariant factors."""
    ctx = lift_context(ring)
    ed = ctx.ed
    sd = smith_data(ed, _matrix_to_grid(ctx, V), V.rows, V.cols)
    # basis of span(V): nonzero d_i times column i of S^{-1}
    basis_cols = []
    for i in range(min(V.rows, V.cols)):
        d = sd.diag(i)
        if not ed.is_zero(d):
            basis_cols.append([ed.mul(sd.Si[r][i], d) for r in range(V.rows)])
    k = len(basis_cols)
    if k == 0:
        return HomologySummary(ring, True, 0, free_rank=0, invariant_factors=())
    B = Matrix(ring, V.rows, k,
               tuple(tuple(ctx.from_payload(basis_cols[j][i]) for j in range(k))
                     for i in range(V.rows)))
    coords = solve(ring, B, W) if W.cols else Matrix.zeros(ring, k, 0)
    if coords is None:
        raise ArithmeticError("image generators not inside the kernel span")
    csd = smith_data(ed, _matrix_to_grid(ctx, coords), k, coords.cols)
    factors = []
    rank_rel = 0
    for i in range(min(k, coords.cols)):
        d = csd.diag(i)
        if ed.is_zero(d):
            continue
        rank_rel += 1
        if not ed.is_unit(d):
            factors.append(ctx.from_payload(d))
    free_rank = k - rank_rel
    is_zero = free_rank == 0 and not factors
    return HomologySummary(ring, is_zero, k, free_rank=free_rank,
                           invariant_factors=tuple(factors))


def _zmod_invariants(ring, V, W):
    """Abelian-group invariant factors of span(V)/span(W) over Z/n."""
    n = ring.modulus
    u = V.rows
    zz_cols_v = [[V.data[i][j].payload for i in range(u)] for j in range(V.cols)]
    zz_cols_w = [[W.data[i][j].payload for i in range(u)] for j in range(W.cols)]
    for i in range(u):
        e = [n if k == i else 0 for k in range(u)]
        zz_cols_v.append(e)
        zz_cols_w.append(e)
    ed = IntED
    grid_v = [[col[i] for col in zz_cols_v] for i in range(u)]
    sd = smith_data(ed, grid_v, u, len(zz_cols_v))
    basis = []
    for i in range(u):
        d = sd.diag(i)
        if d == 0:
            raise ArithmeticError("lattice above nZ^u must have full rank")
        basis.append([sd.Si[r][i] * d for r in range(u)])
    # coordinates of W generators in that basis, computed over Z
    bgrid = [[basis[j][i] for j in range(u)] for i in range(u)]
    bsd = smith_data(ed, bgrid, u, u)
    factors = []
    rel_cols = []
    for col in zz_cols_w:
        c = [sum(bsd.S[i][k] * col[k] for k in range(u)) for i in range(u)]
        y = [0] * u
        good = True
        for i in range(u):
            d = bsd.diag(i)
            q, r = divmod(c[i], d)
            if r:
                good = False
                break
            y[i] = q
        if not good:
            raise ArithmeticError("relation outside the lattice")
        rel_cols.append([sum(bsd.T[i][k] * y[k] for k in range(u)) for i in range(u)])
    rel_grid = [[col[i] for col in rel_cols] for i in range(u)]
    rsd = smith_data(ed, rel_grid, u, len(rel_cols))
    card = 1
    for i in range(u):
        d = rsd.diag(i)
        if d == 0:
            raise ArithmeticError("finite quotient expected")
        card *= abs(d)
        if abs(d) != 1:
            factors.append(abs(d))
    return card, tuple(sorted(factors))


def subquotient(ring, V, W):
    """Present span(V)/span(W); W's columns must lie inside span(V)."""
    _require_solver(ring)
    if V.rows != W.rows:
        raise DimensionMismatch("ambient ranks differ")
    if ring.kind in (RATIONALS, PRIMEFIELD):
        ed = FieldED(ring)
        sdv = smith_data(ed, [[x for x in r] for r in V.data] if V.rows else [],
                         V.rows, V.cols)
        rank_v = sum(1 for i in range(min(V.rows, V.cols))
                     if not ed.is_zero(sdv.diag(i)))
        sdw = smith_data(ed, [[x for x in r] for r in W.data] if W.rows else [],
                         W.rows, W.cols)
        rank_w = sum(1 for i in range(min(W.rows, W.cols))
                     if not ed.is_zero(sdw.diag(i)))
        dim = rank_v - rank_w
        card = None
        if ring.kind == PRIMEFIELD:
            card = ring.modulus ** dim
        return HomologySummary(ring, dim == 0, V.cols, dimension=dim,
                               cardinality=card)
    if ring.kind == ZMOD:
        card, factors = _zmod_invariants(ring, V, W)
        return HomologySummary(ring, card == 1, V.cols, cardinality=card,
                               invariant_factors=factors,
                               free_rank=0 if card else None)
    ctx = lift_context(ring)
    if ctx is not None and ctx.modulus is None:
        return _domain_subquotient(ring, V, W)
    # finite quotient rings: cardinality ratio
    cv = span_cardinality(ring, V)
    cw = span_cardinality(ring, W)
    if cv % cw:
        raise ArithmeticError("image span does not divide kernel span")
    card = cv // cw
    return HomologySummary(ring, card == 1, V.cols, cardinality=card)


def homology_module(ring, d_in, d_out):
    """ker(d_out)/im(d_in) for consecutive differentials d_out . d_in = 0."""
    _require_solver(ring)
    if d_out.cols != d_in.rows:
        raise DimensionMismatch(
            f"d_out takes {d_out.cols} columns but d_in lands in {d_in.rows}")
    if not (d_out * d_in).is_zero():
        raise NotAComplex(0, "d_out . d_in != 0")
    V = kernel_basis(ring, d_out)
    return subquotient(ring, V, d_in)


def image_membership(ring, V, W):
    """True when every column of V lies in the column span of W."""
    if V.cols == 0:
        return True
    return solve(ring, W, V) is not None


# ---------------------------------------------------------------------------
# minimal generating sets (Nakayama reduction over local rings)


class _FpSpan:
    """Incremental membership-only span of F_p vectors.

    Rows are kept in descending pivot order (pivot = highest nonzero index),
    so a single reduction pass decides membership.
    """

    def __init__(self, p):
        self.p = p
        self.rows = []  # (vector, pivot index); bitmask ints when p = 2

    def _reduce(self, vec):
        if self.p == 2:
            for row, piv in self.rows:
                if (vec >> piv) & 1:
                    vec ^= row
            return vec
        v = list(vec)
        for row, piv in self.rows:
            c = v[piv] % self.p
            if c:
                f = (c * pow(row[piv], -1, self.p)) % self.p
                v = [(x - f * y) % self.p for x, y in zip(v, row)]
        return v

    def _insert(self, row, piv):
        lo = 0
        while lo < len(self.rows) and self.rows[lo][1] > piv:
            lo += 1
        self.rows.insert(lo, (row, piv))

    def add(self, vec):
        r = self._reduce(vec)
        if self.p == 2:
            if r:
                self._insert(r, r.bit_length() - 1)
                return True
            return False
        piv = None
        for i, x in enumerate(r):
            if x % self.p:
                piv = i
        if piv is None:
            return False
        self._insert(r, piv)
        return True

    def contains(self, vec):
        r = self._reduce(vec)
        if self.p == 2:
            return r == 0
        return all(x % self.p == 0 for x in r)


def _pack(p, vec):
    if p == 2:
        return sum((x & 1) << i for i, x in enumerate(vec))
    return vec


def _maximal_ideal_elements(ring):
    out = []
    for g in ring.maximal_ideal:
        if isinstance(g, int):
            out.append(ring.from_int(g))
        else:
            out.append(ring.variable(g))
    return out


def _hstack_all(cols, ring, rows):
    if not cols:
        return Matrix.zeros(ring, rows, 0)
    out = cols[0]
    for c in cols[1:]:
        out = out.hstack(c)
    return out


def _expansion_minimal_generators(ring, exp, M):
    monomials = [RingElement(ring, ((m, 1),)) for m in exp.std]
    nonconstant = [e for m, e in zip(exp.std, monomials) if sum(m) > 0]
    span = _FpSpan(exp.p)
    cols = [c for c in M.columns() if not c.is_zero()]
    for c in cols:
        for g in nonconstant:
            span.add(_pack(exp.p, exp.expand_column(c.scale(g))))
    kept = []
    for c in cols:
        if not span.contains(_pack(exp.p, exp.expand_column(c))):
            kept.append(c)
            for g in monomials:
                span.add(_pack(exp.p, exp.expand_column(c.scale(g))))
    return _hstack_all(kept, ring, M.rows)


def minimal_generators(ring, M):
    """Reduce the columns of M to a minimal generating set of their span.

    Nakayama over certified-local rings; elsewhere only zero columns are
    dropped (kernel bases over Z and F_p[x] are already minimal).
    """
    cols = [c for c in M.columns() if not c.is_zero()]
    if len(cols) != M.cols:
        M = _hstack_all(cols, ring, M.rows)
    if M.cols <= 1 or not ring.local:
        return M
    exp = _expansion(ring)
    if exp is not None:
        return _expansion_minimal_generators(ring, exp, M)
    mgens = _maximal_ideal_elements(ring)
    cols = M.columns()
    changed = True
    while changed and len(cols) > 1:
        changed = False
        for j in range(len(cols)):
            others = [c for k, c in enumerate(cols) if k != j]
            mcols = [c.scale(g) for g in mgens for c in cols]
            W = _hstack_all(others + mcols, ring, M.rows)
            if W.cols and solve(ring, W, cols[j]) is not None:
                cols.pop(j)
                changed = True
                break
    return _hstack_all(cols, ring, M.rows)
