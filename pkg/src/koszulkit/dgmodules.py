"""DG modules over a Koszul algebra.

A DG module stores one action matrix per algebra basis element per degree.
The redundancy (actions of products are determined by the generators) is
deliberate: every structure matrix is a stored artifact that verification
can check directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import ChainMap, tensor, tensor_layout
from .errors import MixedRings
from .matrices import Matrix


class DGModule:
    """A complex with a Koszul-algebra action given by explicit matrices."""

    def __init__(self, algebra, underlying, action):
        if algebra.ring != underlying.ring:
            raise MixedRings("algebra and underlying complex over different rings")
        self.algebra = algebra
        self.underlying = underlying
        # action[H][n]: underlying_n -> underlying_{n + |H|}
        self.action = action

    def action_matrix(self, H, n):
        H = tuple(H)
        per = self.action.get(H)
        m = per.get(n) if per else None
        if m is None:
            return Matrix.zeros(self.underlying.ring,
                                self.underlying.rank(n + len(H)),
                                self.underlying.rank(n))
        return m

    def ring(self):
        return self.underlying.ring

    def __repr__(self):
        return f"DGModule({self.algebra!r}, {self.underlying!r})"


def extend(K, M):
    """The extension K (x) M with action e_h . (u (x) x) = (e_h u) (x) x.

    On the summand K_{n-p} (x) M_p the action of e_h is the Kronecker
    product of the algebra's multiplication matrix with the identity.
    """
    if K.ring != M.ring:
        raise MixedRings("extend over different rings")
    ring = K.ring
    under = tensor(K.complex, M)
    action = {}
    for H in (S for d in K.basis.values() for S in d):
        per = {}
        for n in under.degrees():
            src = tensor_layout(K.complex, M, n)
            tgt = tensor_layout(K.complex, M, n + len(H))
            rows = sum(a * b for _, a, b in tgt)
            cols = sum(a * b for _, a, b in src)
            if rows == 0 or cols == 0:
                continue
            grid = []
            for (q, mq, nq) in tgt:
                row = []
                for (p, mp, np_) in src:
                    r_, c_ = mq * nq, mp * np_
                    if p == q and r_ and c_:
                        row.append(K.mult_matrix(H, n - p).kron(
                            Matrix.identity(ring, np_)))
                    else:
                        row.append(Matrix.zeros(ring, r_, c_))
                grid.append(row)
            per[n] = Matrix.block(grid)
        action[H] = per
    D = DGModule(K, under, action)
    report = verify_dg_module(D)
    if not report.ok:
        raise ArithmeticError(f"extension failed its own axioms: {report.failures()}")
    return D


@dataclass
class AxiomResult:
    name: str
    ok: bool
    counterexample: str = ""


@dataclass
class DgModuleReport:
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.ok]

    def lines(self):
        return [f"{r.name}: {'ok' if r.ok else 'FAIL ' + r.counterexample}"
                for r in self.results]


def verify_dg_module(D):
    """Unitality, associativity and Leibniz on all basis elements and degrees."""
    K = D.algebra
    under = D.underlying
    ring = under.ring
    report = DgModuleReport()
    degrees = list(under.degrees())

    ok, ce = True, ""
    for n in degrees:
        if D.action_matrix((), n) != Matrix.identity(ring, under.rank(n)):
            ok, ce = False, f"degree {n}"
            break
    report.results.append(AxiomResult("unitality", ok, ce))

    ok, ce = True, ""
    all_basis = [S for d in K.basis.values() for S in d]
    for G in all_basis:
        for H in all_basis:
            prod = K.product_of_basis(G, H)
            for n in degrees:
                lhs = D.action_matrix(G, n + len(H)) * D.action_matrix(H, n)
                if prod is None:
                    if not lhs.is_zero():
                        ok, ce = False, f"e_{G} . e_{H} at degree {n}"
                        break
                else:
                    sign, U = prod
                    rhs = D.action_matrix(U, n)
                    if sign == -1:
                        rhs = rhs.scale(-ring.one)
                    if lhs != rhs:
                        ok, ce = False, f"e_{G} . e_{H} at degree {n}"
                        break
            if not ok:
                break
        if not ok:
            break
    report.results.append(AxiomResult("associativity", ok, ce))

    ok, ce = True, ""
    for H in all_basis:
        h = len(H)
        sign = ring.one if h % 2 == 0 else -ring.one
        for n in degrees:
            lhs = under.diff(n + h) * D.action_matrix(H, n) \
                - D.action_matrix(H, n - 1).scale(sign) * under.diff(n)
            rhs = Matrix.zeros(ring, under.rank(n + h - 1), under.rank(n))
            for coeff, H2 in K.diff_of_basis(H):
                rhs = rhs + D.action_matrix(H2, n).scale(coeff)
            if lhs != rhs:
                ok, ce = False, f"e_{H} at degree {n}"
                break
        if not ok:
            break
    report.results.append(AxiomResult("leibniz", ok, ce))
    return report


def is_k_linear(phi, source_dg, target_dg):
    """Do the action squares commute with phi in every degree and basis element."""
    K = source_dg.algebra
    if target_dg.algebra is not K and target_dg.algebra.elements != K.elements:
        raise MixedRings("DG modules over different algebras")
    for H in (S for d in K.basis.values() for S in d):
        h = len(H)
        for n in set(source_dg.underlying.degrees()) | set(target_dg.underlying.degrees()):
            lhs = phi.component(n + h) * source_dg.action_matrix(H, n)
            rhs = target_dg.action_matrix(H, n) * phi.component(n)
            if lhs != rhs:
                return False
    return True


# ---------------------------------------------------------------------------
# adjunction between complex maps M -> N and K-linear maps K (x) M -> N


@dataclass
class AdjunctionTransport:
    """forward: psi (M -> underlying N) to the K-linear extension; backward:
    restrict along the unit summand 1 (x) M.  backward . forward = id always;
    forward . backward = id exactly on K-linear maps."""

    K: object
    M: object
    N: object

    def forward(self, psi):
        K, M, N = self.K, self.M, self.N
        ring = K.ring
        ext = tensor(K.complex, M)
        comps = {}
        for n in ext.degrees():
            cols = []
            for (p, mrank, prank) in tensor_layout(K.complex, M, n):
                if mrank == 0 or prank == 0:
                    continue
                for H in K.basis[n - p]:
                    block = N.action_matrix(H, p) * psi.component(p)
                    cols.append(block)
            if not cols:
                continue
            acc = cols[0]
            for c in cols[1:]:
                acc = acc.hstack(c)
            comps[n] = acc
        return ChainMap(ext, self.N.underlying, comps)

    def backward(self, Phi):
        K, M = self.K, self.M
        comps = {}
        for n in M.support:
            src = tensor_layout(K.complex, M, n)
            offset = 0
            sliced = None
            for (p, mrank, prank) in src:
                width = mrank * prank
                if p == n and width:
                    sliced = Phi.component(n).submatrix(
                        range(Phi.component(n).rows), range(offset, offset + width))
                offset += width
            if sliced is not None:
                comps[n] = sliced
        return ChainMap(M, Phi.target, comps)


def adjunction_transport(K, M, N):
    """Correspondence object for maps M -> N.underlying vs K (x) M -> N."""
    return AdjunctionTransport(K, M, N)


def unit_map(K, M):
    """The chain map M -> K (x) M embedding into the unit summand."""
    ext = tensor(K.complex, M)
    ring = K.ring
    comps = {}
    for n in M.support:
        rows = ext.rank(n)
        cols = M.rank(n)
        if rows == 0 or cols == 0:
            continue
        offset = 0
        grid_rows = [[ring.zero] * cols for _ in range(rows)]
        for (p, mrank, prank) in tensor_layout(K.complex, M, n):
            width = mrank * prank
            if p == n and width:
                # the unit basis vector of K_0 is first in its summand
                for i in range(cols):
                    grid_rows[offset + i][i] = ring.one
            offset += width
        comps[n] = Matrix.from_rows(ring, grid_rows)
    return ChainMap(M, ext, comps)


def multiplication_map(K, D):
    """The action K (x) D.underlying -> D.underlying as a chain map.

    Columns over the summand K_{n-p} (x) D_p send the (H, x) basis vector
    to the action of e_H on x.
    """
    M = D.underlying
    ext = tensor(K.complex, M)
    comps = {}
    for n in ext.degrees():
        cols = []
        for (p, mrank, prank) in tensor_layout(K.complex, M, n):
            if mrank == 0 or prank == 0:
                continue
            for H in K.basis[n - p]:
                cols.append(D.action_matrix(H, p))
        if not cols:
            continue
        acc = cols[0]
        for c in cols[1:]:
            acc = acc.hstack(c)
        comps[n] = acc
    return ChainMap(ext, M, comps)
