"""Semidualizing, biduality, Ext and lifting checks at desk scale.

Modules enter as free presentations (cokernels of explicit matrices).
Resolutions are built by repeated kernels, minimalized over local rings,
and every infinite-resolution statement is windowed: verdicts carry the
depth they were checked to.  Over finite rings homology cardinalities are
computed by span-counting, never by enumeration of module elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import ChainComplex, free_module_complex, hom_complex, homology, tensor
from .errors import CapabilityMissing, DimensionMismatch, NotLocal, NotRegular
from .linalg import (
    HomologySummary, has_linear_solve, image_membership, kernel_basis,
    minimal_generators, solve, span_cardinality, subquotient,
)
from .matrices import Matrix
from .rings import INTEGERS, POLYQUOT, RingHom, Zmod, poly_quotient


@dataclass
class ModulePresentation:
    """coker(relations : R^c -> R^gens)."""

    ring: object
    gens: int
    relations: Matrix

    def __post_init__(self):
        if self.relations.rows != self.gens:
            raise DimensionMismatch(
                f"relations have {self.relations.rows} rows for {self.gens} generators")

    @staticmethod
    def free(ring, n):
        return ModulePresentation(ring, n, Matrix.zeros(ring, n, 0))

    @staticmethod
    def residue_field(ring):
        """R / (maximal ideal), for rings with a certified maximal ideal."""
        if not ring.local:
            raise NotLocal(f"{ring} is not certified local")
        from .linalg import _maximal_ideal_elements
        gens = _maximal_ideal_elements(ring)
        if not gens:
            return ModulePresentation.free(ring, 1)
        rel = Matrix.from_rows(ring, [[g for g in gens]])
        return ModulePresentation(ring, 1, rel)

    @staticmethod
    def cyclic(ring, annihilators):
        """R / (annihilators)."""
        if not annihilators:
            return ModulePresentation.free(ring, 1)
        rel = Matrix.from_rows(ring, [list(annihilators)])
        return ModulePresentation(ring, 1, rel)

    def cardinality(self):
        if span_cardinality(self.ring, Matrix.identity(self.ring, self.gens)) is None:
            return None
        total = self.ring.cardinality() ** self.gens
        return total // span_cardinality(self.ring, self.relations)

    def map_through(self, hom):
        return ModulePresentation(
            hom.target, self.gens, self.relations.map_entries(hom, hom.target))


def resolve(pres, depth):
    """Free resolution differentials [d_1, ..., d_depth], minimalized where
    the ring is local; the list stops early when a kernel vanishes."""
    ring = pres.ring
    if not has_linear_solve(ring):
        raise CapabilityMissing(f"cannot resolve over {ring}")
    diffs = []
    current = minimal_generators(ring, pres.relations)
    diffs.append(current)
    for _ in range(depth - 1):
        if current.cols == 0:
            break
        K = kernel_basis(ring, current)
        K = minimal_generators(ring, K)
        diffs.append(K)
        current = K
    return diffs


def resolution_complex(pres, depth):
    """The resolution as a validated free complex F_0 <- F_1 <- ..."""
    diffs = resolve(pres, depth)
    ranks = {0: pres.gens}
    dmap = {}
    for i, d in enumerate(diffs, start=1):
        ranks[i] = d.cols
        dmap[i] = d
    return ChainComplex(pres.ring, ranks, dmap)


# ---------------------------------------------------------------------------
# presented-complex homology
#
# A presented complex is a free complex of ambients together with one
# relation matrix per degree; differentials must map relation spans into
# relation spans.  Homology at degree t:
#     { v : d_t v in span(rel_{t-1}) }  /  ( im d_{t+1} + span(rel_t) )
# Over finite rings the cardinality is
#     |amb_t| * |span rel_{t-1}| / |span [d_t | rel_{t-1}]| / |span [d_{t+1} | rel_t]|.


@dataclass
class PresentedComplex:
    ambient: ChainComplex
    relations: dict                        # degree -> Matrix
    _cache: dict = field(default_factory=dict)

    def relation(self, n):
        m = self.relations.get(n)
        if m is None:
            return Matrix.zeros(self.ambient.ring, self.ambient.rank(n), 0)
        return m

    def _rel_card(self, n):
        key = ("rel", n)
        if key not in self._cache:
            self._cache[key] = span_cardinality(self.ambient.ring, self.relation(n))
        return self._cache[key]

    def _boundary_card(self, n):
        # |span [d_n | rel_{n-1}]|, shared between adjacent homology degrees
        key = ("bnd", n)
        if key not in self._cache:
            self._cache[key] = span_cardinality(
                self.ambient.ring, self.ambient.diff(n).hstack(self.relation(n - 1)))
        return self._cache[key]


def presented_homology(pc, t):
    ring = pc.ambient.ring
    amb_rank = pc.ambient.rank(t)
    if amb_rank == 0:
        return HomologySummary(ring, True, 0, cardinality=1 if ring.is_finite() else None,
                               dimension=0 if ring.kind in ("rationals", "primefield") else None,
                               free_rank=0, invariant_factors=())
    d_t = pc.ambient.diff(t)
    d_next = pc.ambient.diff(t + 1)
    rel_prev = pc.relation(t - 1)
    rel_t = pc.relation(t)
    if ring.is_finite():
        amb_card = ring.cardinality() ** amb_rank
        num = amb_card * pc._rel_card(t - 1)
        den = pc._boundary_card(t)
        wcard = pc._boundary_card(t + 1)
        if num % den or (num // den) % wcard:
            raise ArithmeticError("span cardinalities violate divisibility")
        card = num // den // wcard
        return HomologySummary(ring, card == 1, amb_rank, cardinality=card)
    # explicit subquotient over Z, F_p[x], Q
    V = kernel_basis(ring, d_t.hstack(rel_prev))
    V = V.submatrix(range(amb_rank), range(V.cols)) if V.cols else \
        Matrix.zeros(ring, amb_rank, 0)
    W = d_next.hstack(rel_t)
    return subquotient(ring, V, W)


def hom_into_presented(source_free, target):
    """Hom(source, target) as a presented complex.

    `source_free` is a free complex, `target` a PresentedComplex; the
    result's ambient is the hom complex of the ambients.  Relations are
    block-diagonal over the summands Hom(M_i, N_{i+n}), each block
    kron(rel_{i+n}, I_{rank M_i}) in the (target, source) row-major layout.
    """
    from .complexes import hom_layout
    amb = hom_complex(source_free, target.ambient)
    ring = amb.ring
    relations = {}
    for n in amb.degrees():
        layout = hom_layout(source_free, target.ambient, n)
        specs = []
        for (i, a, b) in layout:
            rel = target.relation(i + n)
            specs.append((a * b, rel.cols * b,
                          rel.kron(Matrix.identity(ring, b))
                          if a * b and rel.cols * b else None))
        total_rows = sum(s[0] for s in specs)
        total_cols = sum(s[1] for s in specs)
        if total_rows == 0 or total_cols == 0:
            continue
        grid = []
        for bi, (h, w, blk) in enumerate(specs):
            row = []
            for bj, (h2, w2, blk2) in enumerate(specs):
                if bi == bj and blk is not None:
                    row.append(blk)
                else:
                    row.append(Matrix.zeros(ring, h, w2))
            grid.append(row)
        relations[n] = Matrix.block(grid)
    return PresentedComplex(amb, relations)


def module_as_presented_complex(pres, degree=0):
    amb = free_module_complex(pres.ring, pres.gens, degree)
    return PresentedComplex(amb, {degree: pres.relations})


def tensor_koszul_presented(K, pres):
    """K (x) M as a presented complex: ambients K_j (x) R^g, relations
    spread block-diagonally."""
    ring = K.ring
    amb = tensor(K.complex, free_module_complex(ring, pres.gens))
    relations = {}
    for j in range(K.e + 1):
        binom = K.degree_rank(j)
        if binom and pres.relations.cols:
            relations[j] = Matrix.identity(ring, binom).kron(pres.relations)
    return PresentedComplex(amb, relations)


# ---------------------------------------------------------------------------
# Ext


def ext_table(M, N, window):
    """[Ext^i(M, N) for i = 0..window] as homology summaries.

    M and N are presentations over a linear_solve ring; the resolution of M
    is taken to depth window + 1, so every listed value is exact.
    """
    res = resolution_complex(M, window + 1)
    target = module_as_presented_complex(N)
    G = hom_into_presented(res, target)
    # Hom(F_i, N) sits in homological degree -i
    return [presented_homology(G, -i) for i in range(window + 1)]


def ext_sup(M, N, window):
    """Largest i <= window with Ext^i nonzero, or None; flags top-of-window."""
    table = ext_table(M, N, window)
    nonzero = [i for i, h in enumerate(table) if not h.is_zero]
    top = not table[window].is_zero
    return (max(nonzero) if nonzero else None), top


# ---------------------------------------------------------------------------
# semidualizing checks


@dataclass
class SdcVerdict:
    outcome: str              # "semidualizing" | "not_semidualizing" | "inconclusive"
    window: int
    witness_degree: int | None = None
    witness: HomologySummary | None = None
    hom_cardinality: int | None = None
    annihilator_cardinality: int | None = None
    ring_cardinality: int | None = None

    @property
    def ok(self):
        return self.outcome == "semidualizing"

    def line(self):
        if self.outcome == "semidualizing":
            return f"semidualizing (window {self.window})"
        if self.outcome == "not_semidualizing":
            if self.witness_degree == 0:
                return (f"not semidualizing: endomorphisms have cardinality "
                        f"{self.hom_cardinality} vs ring {self.ring_cardinality}, "
                        f"annihilator {self.annihilator_cardinality}")
            return (f"not semidualizing: Ext^{self.witness_degree} nonzero "
                    f"({self.witness.describe()})")
        return f"inconclusive (window {self.window})"


def _identity_hom_vector(ring, g):
    """vec of the identity endomorphism; the diagonal slots are layout-safe."""
    vec = [ring.zero] * (g * g)
    for k in range(g):
        vec[k * g + k] = ring.one
    return Matrix(ring, g * g, 1, tuple((v,) for v in vec))


def homothety_check(C, window):
    """Is the map sending 1 to the identity of C a quasiisomorphism onto the
    derived endomorphisms of C, up to the window depth.

    Requires a finite local linear_solve ring.  NotSemidualizing verdicts
    carry a concrete witness; positives mean no obstruction within the
    window plus an exact degree-zero isomorphism check.
    """
    ring = C.ring
    if not ring.local:
        raise NotLocal(f"{ring} is not certified local")
    if not ring.is_finite() or not has_linear_solve(ring):
        raise CapabilityMissing("homothety check needs a finite linear_solve ring")
    table = ext_table(C, C, window)
    for i in range(1, window + 1):
        if not table[i].is_zero:
            return SdcVerdict("not_semidualizing", window, i, table[i],
                              ring_cardinality=ring.cardinality())
    # degree zero: Hom(C, C) against the ring through 1 -> id
    hom_card = table[0].cardinality
    g = C.gens
    # relation span of Hom(F_0, C), (target, source) row-major layout
    U0 = C.relations.kron(Matrix.identity(ring, g)) if C.relations.cols else \
        Matrix.zeros(ring, g * g, 0)
    id_vec = _identity_hom_vector(ring, g)
    ann = 0
    for r in ring.elements():
        scaled = id_vec.scale(r)
        if U0.cols:
            if solve(ring, U0, scaled) is not None:
                ann += 1
        elif scaled.is_zero():
            ann += 1
    ring_card = ring.cardinality()
    if ann == 0:
        ann = 1  # zero always annihilates into the span
    if hom_card == ring_card and ann == 1:
        return SdcVerdict("semidualizing", window,
                          hom_cardinality=hom_card,
                          annihilator_cardinality=ann,
                          ring_cardinality=ring_card)
    return SdcVerdict("not_semidualizing", window, 0, table[0],
                      hom_cardinality=hom_card,
                      annihilator_cardinality=ann,
                      ring_cardinality=ring_card)


# ---------------------------------------------------------------------------
# biduality


@dataclass
class BidualityVerdict:
    outcome: str          # "reflexive" | "not_reflexive" | "inconclusive"
    window: int
    detail: str = ""

    @property
    def ok(self):
        return self.outcome == "reflexive"


def biduality_check(X, C, window):
    """C-reflexivity of X within the window.

    Stage one checks boundedness of the derived homs: Ext^i(X, C) must
    vanish at the top of the window.  For free X the biduality map reduces
    componentwise to the homothety of C and the verdict is exact; other
    positives are reported as inconclusive (windowed honesty).
    """
    sup_val, top_nonzero = ext_sup(X, C, window)
    if top_nonzero:
        return BidualityVerdict(
            "not_reflexive", window,
            f"Ext^{window}(X, C) nonzero at the window top; derived homs unbounded")
    if X.relations.cols == 0:
        inner = homothety_check(C, window)
        if inner.ok:
            return BidualityVerdict("reflexive", window,
                                    "free module over a semidualizing target")
        return BidualityVerdict("not_reflexive", window,
                                f"free module, but target fails: {inner.line()}")
    return BidualityVerdict(
        "inconclusive", window,
        f"homs bounded in window (top nonzero degree "
        f"{sup_val if sup_val is not None else 'none'}); biduality map not "
        f"constructed for non-free sources")


# ---------------------------------------------------------------------------
# the transfer check: ring-level vs DG-level verdicts


@dataclass
class TransferVerdict:
    ring_level: SdcVerdict
    dg_match: bool
    window: int
    degrees: tuple
    details: tuple

    @property
    def agree(self):
        return self.ring_level.ok == self.dg_match


def koszul_sdc_transfer(K, C, window):
    """Paired verdicts: the ring-level homothety check of C, and the
    DG-level comparison of derived homs into the extension against the
    homology of the algebra itself.

    The DG side computes H of Hom(res C, K (x) C) and matches it degreewise
    against H(K) on [-window, e]; by the adjunction reduction this is the
    homothety condition for the extension.
    """
    ring_level = homothety_check(C, window)
    res = resolution_complex(C, window + K.e + 1)
    target = tensor_koszul_presented(K, C)
    G = hom_into_presented(res, target)
    degrees = tuple(range(-window, K.e + 1))
    details = []
    match = True
    for t in degrees:
        left = presented_homology(G, t)
        right = homology(K.complex, t)
        same = left.same_as(right)
        details.append((t, left.cardinality, right.cardinality, same))
        if not same:
            match = False
    return TransferVerdict(ring_level, match, window, degrees, tuple(details))


# ---------------------------------------------------------------------------
# Ext sup through the extension


@dataclass
class ExtSupResult:
    direct_sup: int | None        # largest nonzero degree inside the window
    koszul_sup: int | None
    direct_top_nonzero: bool      # nonzero anywhere in [window, window + e]
    koszul_top_nonzero: bool      # extension side nonzero at the window top

    @property
    def agree(self):
        if self.direct_top_nonzero or self.koszul_top_nonzero:
            return self.direct_top_nonzero == self.koszul_top_nonzero
        return self.direct_sup == self.koszul_sup


def ext_sup_via_koszul(M, X, K, window):
    """The largest degree with nonvanishing Ext, computed twice.

    Directly from Hom(res M, X), and through the extension Hom(res M,
    K (x) X).  The bottom nonzero homology degree is preserved by the
    extension, so away from the window edge the two sups agree exactly.
    At the edge the extension side at depth `window` aggregates the e
    degrees above it, so the direct side scans [window, window + e] when
    deciding whether the edge is active.
    """
    e = K.e
    table = ext_table(M, X, window + e)
    nonzero_direct = [i for i in range(window + 1) if not table[i].is_zero]
    direct_sup = max(nonzero_direct) if nonzero_direct else None
    direct_top = any(not table[i].is_zero
                     for i in range(window, window + e + 1))
    # degree -window of the hom complex into the extension is exact only
    # when the resolution reaches e + 1 steps further down
    res = resolution_complex(M, window + e + 1)
    target = tensor_koszul_presented(K, X)
    G = hom_into_presented(res, target)
    nonzero = [i for i in range(window + 1)
               if not presented_homology(G, -i).is_zero]
    k_sup = max(nonzero) if nonzero else None
    k_top = window in nonzero
    return ExtSupResult(direct_sup, k_sup, direct_top, k_top)


# ---------------------------------------------------------------------------
# liftings along R -> R/(x)


@dataclass
class LiftingVerdict:
    ok: bool
    tor_witness: tuple | None      # (degree, summary) for the first nonzero Tor
    iso_found: bool
    reason: str

    def line(self):
        if self.ok:
            return "lifting verified"
        if self.tor_witness:
            i, h = self.tor_witness
            return f"not a lifting: Tor_{i} nonzero ({h.describe()})"
        return f"not a lifting: {self.reason}"


def quotient_by_element(ring, x):
    """R/(x) together with the projection, for R = Z or F_p[t]."""
    if ring.kind == INTEGERS:
        n = abs(x.payload)
        if n < 2:
            raise NotRegular(f"quotient by {x!r} is not a proper finite ring")
        S = Zmod(n)
        return S, RingHom(ring, S)
    if ring.kind == POLYQUOT and not ring.ideal and len(ring.variables) == 1 \
            and ring.coeff.kind == "Fp":
        from .rings import format_element
        S = poly_quotient(f"F{ring.coeff.p}", list(ring.variables),
                          [format_element(x)], order=ring.order)
        images = {v: S.variable(v) for v in ring.variables}
        return S, RingHom(ring, S, images)
    raise CapabilityMissing(f"no quotient construction for {ring}")


def _chain_ring_iso(S, M1, M2):
    """Explicit isomorphism between cokernels over Z/n or F_p[t]/(f).

    Both presentations are decomposed through lifted Smith transforms into
    sums of cyclic modules; matching factor multisets are aligned by a
    permutation and conjugated back.  Returns (phi, psi) or None.
    """
    from .linalg import lift_context, smith_data, _matrix_to_grid, _grid_to_matrix
    ctx = lift_context(S)
    ed, f = ctx.ed, ctx.modulus

    def decomposition(pres):
        sd = smith_data(ed, _matrix_to_grid(ctx, pres.relations),
                        pres.gens, pres.relations.cols)
        factors = []
        for j in range(pres.gens):
            d = sd.diag(j) if j < min(pres.gens, pres.relations.cols) else ed.zero
            g, _, _ = ed.gcdex(d, f)
            factors.append(g)
        lam = _grid_to_matrix(S, ctx, sd.S)
        lam_inv = _grid_to_matrix(S, ctx, sd.Si)
        return factors, lam, lam_inv

    f1, lam1, lam1i = decomposition(M1)
    f2, lam2, lam2i = decomposition(M2)
    nontrivial1 = sorted((g, j) for j, g in enumerate(f1) if not ed.is_unit(g))
    nontrivial2 = sorted((g, j) for j, g in enumerate(f2) if not ed.is_unit(g))
    if [g for g, _ in nontrivial1] != [g for g, _ in nontrivial2]:
        return None
    P = Matrix.zeros(S, M2.gens, M1.gens)
    Q = Matrix.zeros(S, M1.gens, M2.gens)
    prows = [[S.zero] * M1.gens for _ in range(M2.gens)]
    qrows = [[S.zero] * M2.gens for _ in range(M1.gens)]
    for (g1, j1), (g2, j2) in zip(nontrivial1, nontrivial2):
        prows[j2][j1] = S.one
        qrows[j1][j2] = S.one
    if M2.gens and M1.gens:
        P = Matrix.from_rows(S, prows)
        Q = Matrix.from_rows(S, qrows)
    phi = lam2i * P * lam1
    psi = lam1i * Q * lam2
    return phi, psi


def _verify_iso(M1, M2, phi, psi):
    S = M1.ring
    if not image_membership(S, phi * M1.relations, M2.relations):
        return False
    if not image_membership(S, psi * M2.relations, M1.relations):
        return False
    d1 = psi * phi - Matrix.identity(S, M1.gens)
    d2 = phi * psi - Matrix.identity(S, M2.gens)
    return image_membership(S, d1, M1.relations) and \
        image_membership(S, d2, M2.relations)


def lifting_verify(R, x, M, N):
    """Is M (over R) a lifting of N (over S = R/(x)) along the projection.

    x is a single regular element (our solvable domains have depth one).
    Computes S (x) M and Tor_1 through the length-one Koszul complex on x;
    the verdict is positive exactly when Tor_1 vanishes and an explicit,
    verified isomorphism S (x) M = N is found.
    """
    if isinstance(x, (list, tuple)):
        if len(x) != 1:
            raise CapabilityMissing(
                "only length-one regular sequences exist over the supported domains")
        x = x[0]
    if M.ring != R:
        raise DimensionMismatch("M must be presented over the base ring")
    # regularity witness: multiplication by x is injective on the base
    xmat = Matrix.from_rows(R, [[x]])
    if kernel_basis(R, xmat).cols != 0:
        raise NotRegular(f"{x!r} is a zerodivisor on the base ring")
    S, proj = quotient_by_element(R, x)
    if N.ring != S:
        raise DimensionMismatch(f"N must be presented over {S}")
    # Tor_1(S, M) = {v : x v in span(relations)} / span(relations)
    g = M.gens
    xI = Matrix.identity(R, g).scale(x)
    V = kernel_basis(R, xI.hstack(M.relations))
    V = V.submatrix(range(g), range(V.cols)) if V.cols else Matrix.zeros(R, g, 0)
    tor1 = subquotient(R, V.hstack(M.relations), M.relations)
    if not tor1.is_zero:
        return LiftingVerdict(False, (1, tor1), False, "Tor obstruction")
    SM = M.map_through(proj)
    # find and verify an explicit isomorphism S (x) M = N
    from .linalg import lift_context
    ctx = lift_context(S)
    pair = _chain_ring_iso(S, SM, N) if ctx is not None and \
        ctx.modulus is not None else None
    if pair is not None and _verify_iso(SM, N, *pair):
        return LiftingVerdict(True, None, True, "")
    return LiftingVerdict(False, None, False,
                          "no isomorphism between the reductions was found")
