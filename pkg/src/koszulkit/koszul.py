"""The Koszul complex on a sequence as an explicit DG algebra.

Basis convention: degree-n basis vectors are the size-n subsets of
{1..e}, each subset stored as a sorted tuple and subsets ordered
lexicographically within a degree.  The empty subset is the unit.
The differential takes e_S to the alternating sum of a_{s_j} e_{S - s_j};
products carry the shuffle sign (-1)^{#inversions}.  Any convention
satisfying the DG axioms is admissible; this one is fixed so every
matrix below is reproducible byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complexes import ChainComplex, homology, sup_inf, tensor
from .errors import CapabilityMissing, MixedRings
from .matrices import Matrix


def subsets_by_degree(e):
    """Degree n -> list of sorted index tuples, lexicographic inside a degree."""
    table = {}
    for n in range(e + 1):
        table[n] = sorted(itertools.combinations(range(1, e + 1), n))
    return table


def shuffle_sign(S, T):
    """(-1)^{#{(s,t) in S x T : s > t}}; None when S and T meet."""
    if set(S) & set(T):
        return None
    inv = sum(1 for s in S for t in T if s > t)
    return -1 if inv % 2 else 1


class KoszulAlgebra:
    """Exterior-algebra data for a sequence: differential and all
    multiplication matrices, verified at construction."""

    def __init__(self, ring, elements):
        self.ring = ring
        self.elements = tuple(elements)
        for a in self.elements:
            if a.ring != ring:
                raise MixedRings("sequence entries must live in the given ring")
        self.e = len(self.elements)
        self.basis = subsets_by_degree(self.e)
        self.index = {S: i for n in self.basis for i, S in enumerate(self.basis[n])}
        self.complex = self._build_complex()
        self.mult = self._build_mult()

    # -- structure constants -------------------------------------------------

    def diff_of_basis(self, S):
        """d(e_S) as [(coefficient, subset)] with the alternating sign."""
        out = []
        for j, s in enumerate(S):
            coeff = self.elements[s - 1]
            if j % 2 == 1:
                coeff = -coeff
            out.append((coeff, tuple(x for x in S if x != s)))
        return out

    def product_of_basis(self, S, T):
        """e_S * e_T as (sign, subset) or None when the product vanishes."""
        sign = shuffle_sign(S, T)
        if sign is None:
            return None
        return sign, tuple(sorted(set(S) | set(T)))

    # -- matrices ---------------------------------------------------------------

    def _build_complex(self):
        ring = self.ring
        ranks = {n: len(self.basis[n]) for n in range(self.e + 1)}
        diffs = {}
        for n in range(1, self.e + 1):
            rows = len(self.basis[n - 1])
            cols = len(self.basis[n])
            grid = [[ring.zero] * cols for _ in range(rows)]
            for j, S in enumerate(self.basis[n]):
                for coeff, S2 in self.diff_of_basis(S):
                    grid[self.index[S2]][j] = coeff
            diffs[n] = Matrix.from_rows(ring, grid)
        return ChainComplex(ring, ranks, diffs)

    def _build_mult(self):
        """mult[h][n]: the matrix of e_h * (-) from degree n to n + |h|."""
        ring = self.ring
        mult = {}
        for h_deg in range(self.e + 1):
            for H in self.basis[h_deg]:
                per_degree = {}
                for n in range(0, self.e - h_deg + 1):
                    rows = len(self.basis[n + h_deg])
                    cols = len(self.basis[n])
                    grid = [[ring.zero] * cols for _ in range(rows)]
                    for j, S in enumerate(self.basis[n]):
                        prod = self.product_of_basis(H, S)
                        if prod is not None:
                            sign, U = prod
                            grid[self.index[U]][j] = \
                                ring.one if sign == 1 else -ring.one
                    per_degree[n] = Matrix.from_rows(ring, grid)
                mult[H] = per_degree
        return mult

    def mult_matrix(self, H, n):
        per = self.mult.get(tuple(H))
        if per is None or n not in per:
            rows = len(self.basis.get(n + len(H), []))
            cols = len(self.basis.get(n, []))
            return Matrix.zeros(self.ring, rows, cols)
        return per[n]

    def degree_rank(self, n):
        return len(self.basis.get(n, []))

    def __repr__(self):
        seq = ", ".join(repr(a) for a in self.elements)
        return f"Koszul({self.ring}; {seq})"


def koszul(ring, elements):
    """Koszul DG algebra on a sequence; e = 0 gives the unit algebra."""
    elems = [ring.from_int(a) if isinstance(a, int) else a for a in elements]
    K = KoszulAlgebra(ring, elems)
    report = verify_dga(K)
    if not report.ok:
        raise ArithmeticError(f"internal DG axiom failure: {report.failures()}")
    return K


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomResult:
    name: str
    ok: bool
    counterexample: str = ""


@dataclass
class DgaReport:
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.ok]

    def lines(self):
        out = []
        for r in self.results:
            status = "ok" if r.ok else f"FAIL {r.counterexample}"
            out.append(f"{r.name}: {status}")
        return out


def verify_dga(K, mult_override=None):
    """Check the DG algebra axioms on the finite basis.

    `mult_override` substitutes the multiplication matrices (used by tests
    to plant sign errors); everything else reads from K.
    """
    mult = mult_override if mult_override is not None else K.mult
    ring = K.ring
    report = DgaReport()

    def mat(H, n):
        per = mult.get(tuple(H))
        if per is None or n not in per:
            return Matrix.zeros(ring, K.degree_rank(n + len(H)), K.degree_rank(n))
        return per[n]

    # d squared
    ok, ce = True, ""
    for n in range(1, K.e + 1):
        if not (K.complex.diff(n - 1) * K.complex.diff(n)).is_zero():
            ok, ce = False, f"degree {n}"
            break
    report.results.append(AxiomResult("d_squared_zero", ok, ce))

    # unitality: the empty subset acts as the identity
    ok, ce = True, ""
    for n in range(K.e + 1):
        if mat((), n) != Matrix.identity(ring, K.degree_rank(n)):
            ok, ce = False, f"degree {n}"
            break
    report.results.append(AxiomResult("unitality", ok, ce))

    # matrix products realize the structure constants (associativity)
    ok, ce = True, ""
    for G in (S for d in K.basis.values() for S in d):
        for H in (S for d in K.basis.values() for S in d):
            if len(G) + len(H) > K.e:
                continue
            prod = K.product_of_basis(G, H)
            for n in range(0, K.e - len(G) - len(H) + 1):
                lhs = mat(G, n + len(H)) * mat(H, n)
                if prod is None:
                    rhs = Matrix.zeros(ring, lhs.rows, lhs.cols)
                else:
                    sign, U = prod
                    rhs = mat(U, n) if sign == 1 else mat(U, n).scale(-ring.one)
                if lhs != rhs:
                    ok, ce = False, f"e_{G} * e_{H} at degree {n}"
                    break
            if not ok:
                break
        if not ok:
            break
    report.results.append(AxiomResult("associativity", ok, ce))

    # graded commutativity on basis pairs, via structure constants
    ok, ce = True, ""
    for G in (S for d in K.basis.values() for S in d):
        for H in (S for d in K.basis.values() for S in d):
            ab = K.product_of_basis(G, H)
            ba = K.product_of_basis(H, G)
            expected = -1 if (len(G) * len(H)) % 2 else 1
            if (ab is None) != (ba is None):
                ok, ce = False, f"e_{G}, e_{H}"
                break
            if ab is not None and ab[0] != expected * ba[0]:
                ok, ce = False, f"e_{G}, e_{H}"
                break
        if not ok:
            break
    report.results.append(AxiomResult("graded_commutativity", ok, ce))

    # odd-degree squares vanish
    ok, ce = True, ""
    for d in K.basis.values():
        for S in d:
            if len(S) % 2 == 1 and K.product_of_basis(S, S) is not None:
                ok, ce = False, f"e_{S}"
                break
    report.results.append(AxiomResult("odd_squares_zero", ok, ce))

    # Leibniz: d . mult(H) - (-1)^{|H|} mult(H) . d = action of d(e_H)
    ok, ce = True, ""
    for Hdeg in range(K.e + 1):
        for H in K.basis[Hdeg]:
            sign = ring.one if Hdeg % 2 == 0 else -ring.one
            for n in range(0, K.e - Hdeg + 1):
                lhs = K.complex.diff(n + Hdeg) * mat(H, n) \
                    - mat(H, n - 1).scale(sign) * K.complex.diff(n)
                rhs = Matrix.zeros(ring, K.degree_rank(n + Hdeg - 1), K.degree_rank(n))
                for coeff, H2 in K.diff_of_basis(H):
                    rhs = rhs + mat(H2, n).scale(coeff)
                if lhs != rhs:
                    ok, ce = False, f"e_{H} at degree {n}"
                    break
            if not ok:
                break
        if not ok:
            break
    report.results.append(AxiomResult("leibniz", ok, ce))
    return report


# ---------------------------------------------------------------------------
# base change and homological probes


def koszul_base_change(hom, K):
    """The Koszul algebra on the image sequence over the target ring."""
    return koszul(hom.target, [hom(a) for a in K.elements])


def co_complete_witness(K):
    """Can the quotient by the sequence be certified complete?

    True exactly when the ring is finite (finite quotients are complete);
    None means unknown, never silently assumed.
    """
    return True if K.ring.is_finite() else None


def depth_sensitivity_probe(K, module_rank_or_complex):
    """sup of H(K (x) M) for a module M placed in degree 0.

    Returns the top nonzero homology degree, or None when acyclic; equals 0
    exactly when the sequence is regular on the free module at desk scale.
    """
    from .complexes import free_module_complex
    if isinstance(module_rank_or_complex, int):
        M = free_module_complex(K.ring, module_rank_or_complex)
    else:
        M = module_rank_or_complex
        if set(M.support) - {0}:
            raise CapabilityMissing("probe expects a module in degree 0")
    bounds = sup_inf(tensor(K.complex, M))
    return None if bounds.acyclic else bounds.sup
