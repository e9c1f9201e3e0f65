"""Descent equation systems for Koszul extensions.

Given a Koszul algebra K on e elements and a minimal bounded complex P on
degrees 0..m, four polynomial systems over the coefficient ring describe
exactly the data of a complex A of the same shape together with a K-linear
quasiisomorphism from the given DG module onto K (x) A:

  S1  square-zero equations for the candidate differential (X variables),
  S2  the chain-map equations for the comparison map (Y variables),
  S3  K-linearity of the comparison map in every basis element,
  S4  a contracting homotopy of the mapping cone (Z variables), with the
      Kronecker delta as constant term.

Solutions are verified by pure evaluation over any ring tier; a verified
solution reconstructs the descended complex with an independently
re-checked certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .complexes import (
    ChainComplex, ChainMap, Homotopy, augment_by_resolution, cone, homology,
    is_chain_map, is_contraction, is_minimal, tensor, tensor_layout,
)
from .dgmodules import DGModule, extend, is_k_linear, verify_dg_module
from .errors import (
    CapabilityMissing, IncompleteAssignment, NonCanonicalHarness, RankMismatch,
    ShapeMismatch, UnverifiedDGModule, VerificationFailed, WindowViolated,
)
from .koszul import koszul_base_change
from .linalg import has_linear_solve
from .matrices import Matrix
from .rings import RingHom


class SystemVariable(NamedTuple):
    family: str   # "X" | "Y" | "Z"
    n: int
    i: int        # 1-based row index
    j: int        # 1-based column index

    def token(self):
        return f"{self.family}_{self.n}_{self.i}_{self.j}"


_FAMILY_ORDER = {"X": 0, "Y": 1, "Z": 2}


def variable_sort_key(v):
    return (_FAMILY_ORDER[v.family], v.n, v.i, v.j)


# ---------------------------------------------------------------------------
# polynomials in system variables


class VarPoly:
    """Fully expanded polynomial in system variables with ring coefficients.

    Monomials are sorted tuples of variables; no simplification happens
    beyond coefficient normal forms, so serialized systems are byte-stable.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    @classmethod
    def constant(cls, ring, value):
        if value.is_zero():
            return cls(ring, {})
        return cls(ring, {(): value})

    @classmethod
    def variable(cls, ring, var):
        return cls(ring, {(var,): ring.one})

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, VarPoly):
            return other
        from .rings import RingElement
        if isinstance(other, RingElement):
            return VarPoly.constant(self.ring, other)
        if isinstance(other, int):
            return VarPoly.constant(self.ring, self.ring.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono)
            s = c if s is None else s + c
            if s.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = s
        return VarPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return VarPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(sorted(m1 + m2, key=variable_sort_key))
                c = c1 * c2
                s = terms.get(mono)
                s = c if s is None else s + c
                if s.is_zero():
                    terms.pop(mono, None)
                else:
                    terms[mono] = s
        return VarPoly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = VarPoly.constant(self.ring, self.ring.one)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, VarPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(),
                                 key=lambda kv: tuple(map(variable_sort_key, kv[0])))))

    def variables(self):
        out = set()
        for mono in self.terms:
            out.update(mono)
        return out

    def evaluate(self, values, hom):
        """Plug target-ring values in for variables, mapping coefficients
        through the completion-pair homomorphism."""
        target = hom.target
        acc = target.zero
        for mono, c in self.terms.items():
            term = hom(c)
            for v in mono:
                term = term * values[v]
            acc = acc + term
        return acc

    def degree(self):
        return max((len(m) for m in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (-len(kv[0]), tuple(map(variable_sort_key, kv[0]))))

    def __repr__(self):
        return format_varpoly(self)


def format_varpoly(poly):
    """Canonical text: degree-descending terms, coefficient then variables."""
    from .rings import format_element
    if poly.is_zero():
        return "0"
    parts = []
    for mono, coeff in poly.sorted_terms():
        cs = format_element(coeff)
        negative = cs.startswith("-")
        if negative:
            cs = cs[1:]
        factors = [v.token() for v in mono]
        if not factors:
            body = cs
        elif cs == "1":
            body = "*".join(factors)
        else:
            body = "*".join([cs] + factors)
        parts.append(("-" if negative else "+", body))
    sign, body = parts[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class VarPolyRing:
    """Scalar adapter so Matrix can hold VarPoly entries."""

    def __init__(self, base):
        self.base = base
        self.zero = VarPoly.zero(base)
        self.one = VarPoly.constant(base, base.one)

    def __eq__(self, other):
        return isinstance(other, VarPolyRing) and self.base == other.base

    def __repr__(self):
        return f"VarPoly({self.base})"


def symbolic_matrix(vring, family, n, rows, cols):
    return Matrix(vring, rows, cols, tuple(
        tuple(VarPoly.variable(vring.base, SystemVariable(family, n, i + 1, j + 1))
              for j in range(cols)) for i in range(rows)))


def constant_matrix(vring, M):
    return M.map_entries(lambda x: VarPoly.constant(vring.base, x), vring)


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class SystemShape:
    m: int
    e: int
    s: tuple   # ranks of P in degrees 0..m
    r: tuple   # ranks of the extension in degrees 0..m+e

    def s_at(self, n):
        return self.s[n] if 0 <= n <= self.m else 0

    def r_at(self, n):
        return self.r[n] if 0 <= n <= self.m + self.e else 0


def shape_of(K, P):
    if P.support and min(P.support) < 0:
        raise ShapeMismatch("P must be supported in nonnegative degrees")
    m = max(P.support) if P.support else 0
    e = K.e
    s = tuple(P.rank(n) for n in range(m + 1))
    ext = tensor(K.complex, P)
    r = tuple(ext.rank(n) for n in range(m + e + 1))
    return SystemShape(m, e, s, r)


def koszul_side_action(K, P, H, n):
    """Multiplication by e_H on the extension, block-diagonal over summands."""
    ring = K.ring
    src = tensor_layout(K.complex, P, n)
    tgt = tensor_layout(K.complex, P, n + len(H))
    grid = []
    for (q, mq, nq) in tgt:
        row = []
        for (p, mp, np_) in src:
            if p == q and mq * nq and mp * np_:
                row.append(K.mult_matrix(H, n - p).kron(Matrix.identity(ring, np_)))
            else:
                row.append(Matrix.zeros(ring, mq * nq, mp * np_))
        grid.append(row)
    if not grid or not grid[0]:
        return Matrix.zeros(ring, sum(a * b for _, a, b in tgt),
                            sum(a * b for _, a, b in src))
    return Matrix.block(grid)


def build_B_blocks(K, P, x_mats, scalar_ring=None):
    """The block differentials of the extension with prescribed degree maps.

    `x_mats[n]` is the degree-n map of P (concrete ring entries or symbolic
    VarPoly entries); returns {n: matrix} for n = 1 .. m+e+1 in the same
    scalar domain.  With the actual differentials of P this reproduces
    tensor(K, P) exactly.
    """
    sample = next((mat for mat in x_mats.values() if mat.rows and mat.cols), None)
    if scalar_ring is not None:
        ring = scalar_ring
    elif sample is not None:
        ring = sample.ring
    else:
        ring = K.ring
    symbolic = isinstance(ring, VarPolyRing)
    base = ring.base if symbolic else K.ring
    if symbolic:
        embed = lambda M: constant_matrix(ring, M)
        ident = lambda k: constant_matrix(ring, Matrix.identity(K.ring, k))
        sign_of = lambda s: VarPoly.constant(base, base.one if s == 1 else -base.one)
    else:
        embed = lambda M: M
        ident = lambda k: Matrix.identity(K.ring, k)
        sign_of = lambda s: base.one if s == 1 else -base.one

    shape = shape_of(K, P)
    m, e = shape.m, shape.e
    out = {}
    for n in range(1, m + e + 2):
        src = tensor_layout(K.complex, P, n)
        tgt = tensor_layout(K.complex, P, n - 1)
        grid = []
        for (q, mq, nq) in tgt:
            row = []
            for (p, mp, np_) in src:
                rows_, cols_ = mq * nq, mp * np_
                if p == q and rows_ and cols_:
                    row.append(embed(K.complex.diff(n - p)).kron(ident(np_)))
                elif p == q + 1 and rows_ and cols_:
                    x = x_mats.get(p)
                    if x is None:
                        x = Matrix.zeros(ring, shape.s_at(p - 1), shape.s_at(p))
                    block = ident(mp).kron(x)
                    s = sign_of(1 if (n - p) % 2 == 0 else -1)
                    row.append(block.scale(s))
                else:
                    row.append(Matrix.zeros(ring, rows_, cols_) if symbolic
                               else Matrix.zeros(K.ring, rows_, cols_))
            grid.append(row)
        if grid and grid[0]:
            out[n] = Matrix.block(grid)
        else:
            out[n] = Matrix.zeros(ring if symbolic else K.ring,
                                  shape.r_at(n - 1), shape.r_at(n))
    return out


# ---------------------------------------------------------------------------
# the system


@dataclass
class Equation:
    tag: str          # "S1".."S4"
    h: int | None     # basis index for S3 (1-based), None elsewhere
    n: int
    row: int          # 1-based
    col: int          # 1-based
    poly: VarPoly

    def position(self):
        return (self.tag, self.h, self.n, self.row, self.col)


@dataclass
class PolynomialSystem:
    ring: object                 # coefficient ring
    shape: SystemShape
    variables: list
    equations: list
    koszul_elements: tuple       # the sequence defining K (coefficient ring)
    u_mats: dict                 # degree -> Matrix: differentials of the module side
    v_mats: dict                 # basis tuple -> degree -> Matrix: its actions
    canonical_p_diffs: dict | None   # set when built from the canonical harness

    def variable_counts(self):
        out = {"X": 0, "Y": 0, "Z": 0}
        for v in self.variables:
            out[v.family] += 1
        return out

    def equation_counts(self):
        out = {}
        for eq in self.equations:
            out[eq.tag] = out.get(eq.tag, 0) + 1
        return out

    def canonical_solution(self):
        if self.canonical_p_diffs is None:
            raise NonCanonicalHarness(
                "the system was generated from a non-canonical DG module")
        return _canonical_assignment(self.ring, self.shape, self.canonical_p_diffs)


def _basis_list(K):
    return [S for d in sorted(K.basis) for S in K.basis[d]]


def _matrix_equations(tag, h, n, lhs):
    eqs = []
    for i in range(lhs.rows):
        for j in range(lhs.cols):
            eqs.append(Equation(tag, h, n, i + 1, j + 1, lhs.data[i][j]))
    return eqs


def generate_system(K, P, F=None, check_minimal=True):
    """Compile the four descent subsystems for (K, P) against the module F.

    F defaults to the canonical extension K (x) P.  F must have the ranks
    of the extension (RankMismatch otherwise) and pass the DG module
    axioms (UnverifiedDGModule).  P must be minimal when the ring has a
    certified maximal ideal.
    """
    ring = K.ring
    if check_minimal and ring.local and not is_minimal(P):
        from .errors import NotMinimal
        raise NotMinimal("P has a unit entry in some differential")
    shape = shape_of(K, P)
    m, e = shape.m, shape.e
    canonical = F is None
    if F is None:
        F = extend(K, P)
    for n in range(m + e + 1):
        if F.underlying.rank(n) != shape.r_at(n):
            raise RankMismatch(
                f"module rank {F.underlying.rank(n)} at degree {n}, "
                f"expected {shape.r_at(n)}")
    if not verify_dg_module(F).ok:
        raise UnverifiedDGModule("the supplied DG module fails its axioms")

    vring = VarPolyRing(ring)
    xmat = {n: symbolic_matrix(vring, "X", n, shape.s_at(n - 1), shape.s_at(n))
            for n in range(1, m + 1)}
    ymat = {n: symbolic_matrix(vring, "Y", n, shape.r_at(n), shape.r_at(n))
            for n in range(0, m + e + 1)}
    zmat = {n: symbolic_matrix(vring, "Z", n,
                               shape.r_at(n + 1) + shape.r_at(n),
                               shape.r_at(n) + shape.r_at(n - 1))
            for n in range(0, m + e + 1)}
    B = build_B_blocks(K, P, xmat, scalar_ring=vring)

    def y_at(n):
        if n in ymat:
            return ymat[n]
        return Matrix.zeros(vring, shape.r_at(n), shape.r_at(n))

    def z_at(n):
        if n in zmat:
            return zmat[n]
        return Matrix.zeros(vring, shape.r_at(n + 1) + shape.r_at(n),
                            shape.r_at(n) + shape.r_at(n - 1))

    def u_at(n):
        d = F.underlying.diff(n)
        return constant_matrix(vring, d)

    equations = []
    # S1: the candidate differential squares to zero
    for n in range(1, m):
        equations.extend(_matrix_equations("S1", None, n, xmat[n] * xmat[n + 1]))
    # S2: chain-map equations against the block differentials
    for n in range(1, m + e + 1):
        lhs = y_at(n - 1) * u_at(n) - B[n] * y_at(n)
        equations.extend(_matrix_equations("S2", None, n, lhs))
    # S3: K-linearity for every basis element
    basis = _basis_list(K)
    for h_index, H in enumerate(basis, start=1):
        hdeg = len(H)
        for n in range(0, m + e - hdeg + 1):
            v = constant_matrix(vring, F.action_matrix(H, n))
            w = constant_matrix(vring, koszul_side_action(K, P, H, n))
            lhs = y_at(n + hdeg) * v - w * y_at(n)
            equations.extend(_matrix_equations("S3", h_index, n, lhs))
    # S4: contraction of the mapping cone, Kronecker delta constant term
    def cone_diff(n):
        top_left = B[n] if n in B else Matrix.zeros(
            vring, shape.r_at(n - 1), shape.r_at(n))
        grid = [[top_left, y_at(n - 1)],
                [Matrix.zeros(vring, shape.r_at(n - 2), shape.r_at(n)),
                 u_at(n - 1).scale(VarPoly.constant(ring, -ring.one))]]
        return Matrix.block(grid)

    one = VarPoly.constant(ring, ring.one)
    for n in range(0, m + e + 2):
        size = shape.r_at(n) + shape.r_at(n - 1)
        lhs = z_at(n - 1) * cone_diff(n) + cone_diff(n + 1) * z_at(n)
        delta = Matrix.identity(vring, size)
        equations.extend(_matrix_equations("S4", None, n, lhs - delta))

    variables = []
    for n in sorted(xmat):
        variables.extend(v for row in xmat[n].data for p in row for v in sorted(
            p.variables(), key=variable_sort_key))
    for n in sorted(ymat):
        variables.extend(v for row in ymat[n].data for p in row for v in sorted(
            p.variables(), key=variable_sort_key))
    for n in sorted(zmat):
        variables.extend(v for row in zmat[n].data for p in row for v in sorted(
            p.variables(), key=variable_sort_key))
    variables.sort(key=variable_sort_key)

    u_mats = {n: F.underlying.diff(n) for n in range(1, m + e + 1)}
    v_mats = {H: {n: F.action_matrix(H, n) for n in range(0, m + e - len(H) + 1)}
              for H in basis}
    return PolynomialSystem(
        ring, shape, variables, equations, tuple(K.elements), u_mats, v_mats,
        {n: P.diff(n) for n in range(1, m + 1)} if canonical else None)


# ---------------------------------------------------------------------------
# assignments


@dataclass
class Assignment:
    """Values for every system variable in a target ring, reached through a
    homomorphism from the coefficient ring (identity for the default
    completion pair)."""

    hom: RingHom
    values: dict

    @property
    def target(self):
        return self.hom.target

    def value(self, var):
        return self.values[var]


def _canonical_assignment(ring, shape, p_diffs):
    hom = RingHom.identity(ring)
    values = {}
    for n in range(1, shape.m + 1):
        d = p_diffs[n]
        for i in range(d.rows):
            for j in range(d.cols):
                values[SystemVariable("X", n, i + 1, j + 1)] = d.data[i][j]
    for n in range(0, shape.m + shape.e + 1):
        r = shape.r_at(n)
        for i in range(r):
            for j in range(r):
                values[SystemVariable("Y", n, i + 1, j + 1)] = \
                    ring.one if i == j else ring.zero
    for n in range(0, shape.m + shape.e + 1):
        rows = shape.r_at(n + 1) + shape.r_at(n)
        cols = shape.r_at(n) + shape.r_at(n - 1)
        for i in range(rows):
            for j in range(cols):
                lower_left = (i >= shape.r_at(n + 1) and j < shape.r_at(n)
                              and i - shape.r_at(n + 1) == j)
                values[SystemVariable("Z", n, i + 1, j + 1)] = \
                    ring.one if lower_left else ring.zero
    return Assignment(hom, values)


def canonical_solution(K, P):
    """X = differentials of P, Y = identity, Z = the cone-of-identity
    contraction (lower-left identity blocks)."""
    shape = shape_of(K, P)
    return _canonical_assignment(K.ring, shape,
                                 {n: P.diff(n) for n in range(1, shape.m + 1)})


# ---------------------------------------------------------------------------
# verification


@dataclass
class SubsystemReport:
    tag: str
    total: int
    first_failure: tuple | None = None

    @property
    def ok(self):
        return self.first_failure is None

    def line(self):
        if self.ok:
            return f"{self.tag} ok"
        h, n, row, col = self.first_failure
        pos = f"n={n} row={row} col={col}"
        if h is not None:
            pos = f"h={h} " + pos
        return f"{self.tag} FAIL {pos}"


@dataclass
class VerificationReport:
    subsystems: list

    @property
    def passed(self):
        return all(s.ok for s in self.subsystems)

    def lines(self):
        return [s.line() for s in self.subsystems]


def verify_assignment(system, assignment):
    """Evaluate every equation under the assignment; report per subsystem.

    Works over any ring tier (pure arithmetic).  Verification runs in
    canonical equation order and records the first failing position of
    each subsystem.
    """
    missing = [v for v in system.variables if v not in assignment.values]
    if missing:
        raise IncompleteAssignment(f"missing values for {missing[:5]}"
                                   + ("..." if len(missing) > 5 else ""))
    status = {tag: SubsystemReport(tag, 0) for tag in ("S1", "S2", "S3", "S4")}
    for eq in system.equations:
        rep = status[eq.tag]
        rep.total += 1
        if rep.first_failure is not None:
            continue
        value = eq.poly.evaluate(assignment.values, assignment.hom)
        if not value.is_zero():
            rep.first_failure = (eq.h, eq.n, eq.row, eq.col)
    return VerificationReport([status[t] for t in ("S1", "S2", "S3", "S4")])


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class DescentCertificate:
    complex: ChainComplex        # the descended complex A over the target ring
    phi: ChainMap                # module side -> extension of A
    sigma: Homotopy              # contraction of cone(phi)
    extension: DGModule
    module_side: DGModule
    report: VerificationReport
    rechecks: dict


def _assignment_matrix(assignment, family, n, rows, cols, ring):
    grid = [[assignment.values[SystemVariable(family, n, i + 1, j + 1)]
             for j in range(cols)] for i in range(rows)]
    if rows == 0 or cols == 0:
        return Matrix.zeros(ring, rows, cols)
    return Matrix.from_rows(ring, grid)


def reconstruct(K, system, assignment):
    """Build the descended complex and its quasiisomorphism certificate.

    Verifies the assignment first; every certified property (square-zero,
    chain map, K-linearity, contraction) is then re-checked by independent
    matrix arithmetic, and any disagreement raises VerificationFailed.
    """
    report = verify_assignment(system, assignment)
    if not report.passed:
        raise VerificationFailed(
            "assignment fails: " + "; ".join(
                s.line() for s in report.subsystems if not s.ok))
    shape = system.shape
    target = assignment.target
    hom = assignment.hom
    K_t = K if hom.is_identity() else koszul_base_change(hom, K)

    ranks = {n: shape.s_at(n) for n in range(shape.m + 1)}
    diffs = {}
    for n in range(1, shape.m + 1):
        diffs[n] = _assignment_matrix(assignment, "X", n, shape.s_at(n - 1),
                                      shape.s_at(n), target)
    try:
        A = ChainComplex(target, ranks, diffs)
    except Exception as exc:
        raise VerificationFailed(f"S1 passed but d.d != 0 on values: {exc}")

    ext = extend(K_t, A)
    # module side mapped into the target ring
    module_under = ChainComplex(
        target, {n: shape.r_at(n) for n in range(shape.m + shape.e + 1)},
        {n: system.u_mats[n].map_entries(hom, target)
         for n in system.u_mats})
    module_action = {}
    for H, per in system.v_mats.items():
        module_action[H] = {n: mat.map_entries(hom, target)
                            for n, mat in per.items()}
    module_side = DGModule(K_t, module_under, module_action)

    phi = ChainMap(module_under, ext.underlying, {
        n: _assignment_matrix(assignment, "Y", n, shape.r_at(n), shape.r_at(n),
                              target)
        for n in range(shape.m + shape.e + 1)})
    sigma = Homotopy({
        n: _assignment_matrix(assignment, "Z", n,
                              shape.r_at(n + 1) + shape.r_at(n),
                              shape.r_at(n) + shape.r_at(n - 1), target)
        for n in range(shape.m + shape.e + 1)}, "contraction")

    rechecks = {
        "chain_map": is_chain_map(phi),
        "k_linear": is_k_linear(phi, module_side, ext),
        "contraction": is_contraction(sigma, cone(phi)),
    }
    if not all(rechecks.values()):
        failing = [k for k, v in rechecks.items() if not v]
        raise VerificationFailed(
            f"equations verified but independent re-checks failed: {failing}")
    return DescentCertificate(A, phi, sigma, ext, module_side, report, rechecks)


# ---------------------------------------------------------------------------
# the truncate-extend step


@dataclass
class TruncateExtendCertificate:
    m: int
    e: int
    sup_bound: int
    depth: int
    window: tuple                 # (low, high): checked H_i(M) = 0 for low < i < high
    koszul_window: tuple          # same for K (x) M with the widened bound
    checked_degrees: tuple


def truncate_extend(K, A, sup_bound, depth_budget=None):
    """Extend A above its top degree m by a free resolution and verify the
    vanishing window sup_bound + e < i < m, plus the widened window for the
    extension.  m must be at least sup_bound + 2e + 1."""
    ring = A.ring
    if not has_linear_solve(ring):
        raise CapabilityMissing(f"truncate_extend needs linear solving over {ring}")
    if not A.support:
        raise ShapeMismatch("cannot extend the zero complex")
    m = max(A.support)
    e = K.e
    s = sup_bound
    if m < s + 2 * e + 1:
        raise ShapeMismatch(
            f"top degree {m} is below the required s + 2e + 1 = {s + 2 * e + 1}")
    depth = depth_budget if depth_budget is not None else e + 2
    M = augment_by_resolution(A, m, depth_budget=depth)
    checked = []
    for i in range(s + e + 1, m):
        if not homology(M, i).is_zero:
            raise WindowViolated(i)
        checked.append(i)
    ext = tensor(K.complex, M)
    koszul_checked = []
    for i in range(s + 2 * e + 1, m):
        if not homology(ext, i).is_zero:
            raise WindowViolated(i, f"extension has homology at degree {i}")
        koszul_checked.append(i)
    cert = TruncateExtendCertificate(
        m, e, s, depth, (s + e, m), (s + 2 * e, m),
        tuple(checked + koszul_checked))
    return M, cert
