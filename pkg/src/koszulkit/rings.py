"""Exact arithmetic in computable commutative rings.

Supported kinds: the integers, the rationals, Z/n, prime fields, and
multivariate polynomial quotients over Q or F_p with Groebner normal forms.
Elements are stored canonically, so structural equality is ring equality.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .errors import (
    ElementSyntaxError,
    EmptyVariableList,
    GroebnerBudgetExceeded,
    MixedRings,
    NonPrimeModulus,
    NotAHomomorphism,
    UnknownVariable,
)

INTEGERS = "integers"
RATIONALS = "rationals"
ZMOD = "zmod"
PRIMEFIELD = "primefield"
POLYQUOT = "polyquot"

MONOMIAL_ORDERS = ("degrevlex", "deglex", "lex")

DEFAULT_GROEBNER_BUDGET = 100_000
DEFAULT_NILPOTENCY_BOUND = 64


def is_prime(n):
    """Deterministic Miller-Rabin, exact for anything we will ever see."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power_root(n):
    """Return (p, k) with n = p**k, or None if n is not a prime power."""
    for p in range(2, n + 1):
        if p * p > n:
            break
        if n % p == 0:
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            return (p, k) if m == 1 else None
    return (n, 1) if is_prime(n) else None


# ---------------------------------------------------------------------------
# monomial orders
#
# A monomial is a tuple of exponents, one slot per ring variable.  The order
# key is built so plain tuple comparison realizes the classical orders.

def monomial_key(order):
    if order == "lex":
        return lambda e: e
    if order == "deglex":
        return lambda e: (sum(e), e)
    if order == "degrevlex":
        return lambda e: (sum(e), tuple(-x for x in reversed(e)))
    raise ValueError(f"unknown monomial order {order!r}")


def monomial_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def monomial_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def monomial_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# polynomial payloads
#
# Payload: tuple of (exponent tuple, coefficient payload), sorted descending
# in the ring's monomial order, zero coefficients dropped.  Coefficients
# live in the coefficient field (Fraction for Q, int residue for F_p).


class _CoeffField:
    """Arithmetic on coefficient payloads of a polynomial quotient ring."""

    def __init__(self, kind, p=None):
        self.kind = kind  # "Q" or "Fp"
        self.p = p

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        return a + b if self.kind == "Q" else (a + b) % self.p

    def neg(self, a):
        return -a if self.kind == "Q" else (-a) % self.p

    def mul(self, a, b):
        return a * b if self.kind == "Q" else (a * b) % self.p

    def inv(self, a):
        return Fraction(1) / a if self.kind == "Q" else pow(a, -1, self.p)

    def from_int(self, n):
        return Fraction(n) if self.kind == "Q" else n % self.p

    def is_zero(self, a):
        return a == 0

    def __eq__(self, other):
        return isinstance(other, _CoeffField) and (self.kind, self.p) == (other.kind, other.p)

    def __repr__(self):
        return "Q" if self.kind == "Q" else f"F{self.p}"


def _poly_from_dict(d, key):
    items = [(e, c) for e, c in d.items() if c != 0]
    items.sort(key=lambda item: key(item[0]), reverse=True)
    return tuple(items)


def _poly_add(a, b, cf, key):
    d = dict(a)
    for e, c in b:
        s = cf.add(d.get(e, cf.zero()), c)
        if cf.is_zero(s):
            d.pop(e, None)
        else:
            d[e] = s
    return _poly_from_dict(d, key)


def _poly_neg(a, cf, key):
    return tuple((e, cf.neg(c)) for e, c in a)


def _poly_mul(a, b, cf, key):
    d = {}
    for ea, ca in a:
        for eb, cb in b:
            e = monomial_mul(ea, eb)
            s = cf.add(d.get(e, cf.zero()), cf.mul(ca, cb))
            if cf.is_zero(s):
                d.pop(e, None)
            else:
                d[e] = s
    return _poly_from_dict(d, key)


def _poly_scale(a, c, cf, key):
    if cf.is_zero(c):
        return ()
    return tuple((e, cf.mul(c, x)) for e, x in a)


def _poly_reduce(f, basis, cf, key):
    """Full normal form of f modulo a list of polynomials with unit LT."""
    if not basis:
        return f
    result = {}
    work = dict(f)
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        if cf.is_zero(c):
            continue
        for g in basis:
            ge, gc = g[0]
            if monomial_divides(ge, e):
                factor = cf.mul(c, cf.inv(gc))
                q = monomial_div(e, ge)
                for me, mc in g:
                    t = monomial_mul(me, q)
                    s = cf.add(work.get(t, cf.zero()), cf.neg(cf.mul(factor, mc)))
                    if cf.is_zero(s):
                        work.pop(t, None)
                    else:
                        work[t] = s
                # the leading term of the multiple cancels e exactly
                work.pop(e, None)
                break
        else:
            result[e] = c
    return _poly_from_dict(result, key)


def _spoly(f, g, cf, key):
    fe, fc = f[0]
    ge, gc = g[0]
    l = monomial_lcm(fe, ge)
    mf = _poly_from_dict({monomial_div(l, fe): cf.inv(fc)}, key)
    mg = _poly_from_dict({monomial_div(l, ge): cf.inv(gc)}, key)
    return _poly_add(_poly_mul(mf, f, cf, key), _poly_neg(_poly_mul(mg, g, cf, key), cf, key), cf, key)


def groebner_basis(gens, cf, key, budget=DEFAULT_GROEBNER_BUDGET):
    """Reduced Groebner basis via a plain Buchberger loop.

    The budget caps processed S-pairs; exceeding it raises, never returns a
    partial basis.
    """
    basis = [g for g in gens if g]
    basis = [_poly_scale(g, cf.inv(g[0][1]), cf, key) for g in basis]
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    steps = 0
    while pairs:
        i, j = pairs.pop(0)
        steps += 1
        if steps > budget:
            raise GroebnerBudgetExceeded(f"S-pair budget {budget} exceeded")
        s = _spoly(basis[i], basis[j], cf, key)
        r = _poly_reduce(s, basis, cf, key)
        if r:
            r = _poly_scale(r, cf.inv(r[0][1]), cf, key)
            basis.append(r)
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    # inter-reduce to the unique reduced basis
    reduced = []
    for idx, g in enumerate(basis):
        others = [h for k, h in enumerate(basis) if k != idx]
        r = _poly_reduce(g, others, cf, key)
        if r:
            reduced.append(_poly_scale(r, cf.inv(r[0][1]), cf, key))
    # a second pass reduces tails against the surviving leading terms
    final = []
    for idx, g in enumerate(reduced):
        others = [h for k, h in enumerate(reduced) if k != idx]
        r = _poly_reduce(g, others, cf, key)
        if r:
            final.append(_poly_scale(r, cf.inv(r[0][1]), cf, key))
    final.sort(key=lambda g: key(g[0][0]))
    return tuple(final)


# ---------------------------------------------------------------------------
# rings


class Ring:
    """A computable commutative ring descriptor with capability flags.

    Instances are immutable; construct through the module helpers (ZZ, QQ,
    Zmod, GF, poly_quotient) or `make_ring`.
    """

    def __init__(self, kind, modulus=None, coeff=None, variables=None,
                 ideal=None, order="degrevlex", groebner=None,
                 budget=DEFAULT_GROEBNER_BUDGET):
        self.kind = kind
        self.modulus = modulus
        self.coeff = coeff
        self.variables = tuple(variables) if variables else None
        self.order = order
        self.ideal = ideal
        self.groebner = groebner
        self._key = monomial_key(order) if kind == POLYQUOT else None
        self._budget = budget
        self._derive_capabilities()
        self.zero_payload = self._zero_payload()
        self.zero = RingElement(self, self.zero_payload)
        self.one = RingElement(self, self._one_payload())

    # -- capability derivation ------------------------------------------------

    def _derive_capabilities(self):
        self.has_eq = True  # every supported representation is canonical
        self.local = False
        self.nilpotency_bound = None
        self.maximal_ideal = ()
        if self.kind == INTEGERS:
            self.linear_solve = True
        elif self.kind == RATIONALS:
            # a field is local with maximal ideal (0)
            self.linear_solve = True
            self.local = True
            self.nilpotency_bound = 1
        elif self.kind in (ZMOD, PRIMEFIELD):
            self.linear_solve = True
            pk = prime_power_root(self.modulus)
            if pk is not None:
                p, k = pk
                self.local = True
                self.nilpotency_bound = k
                self.maximal_ideal = () if k == 1 and self.kind == PRIMEFIELD else (p,)
                if self.kind == ZMOD and k == 1:
                    self.maximal_ideal = (p,)
        elif self.kind == POLYQUOT:
            self._std_monomials = self._standard_monomials()
            self.linear_solve = (
                len(self.variables) == 1 and self.coeff.kind == "Fp"
            ) or (self._std_monomials is not None and self.coeff.kind == "Fp")
            self._detect_local()

    def _detect_local(self):
        # certified only: every variable nilpotent modulo the ideal
        if not self.groebner:
            return
        bound = DEFAULT_NILPOTENCY_BOUND
        if self._std_monomials is not None:
            bound = len(self._std_monomials) + 1
        witnesses = []
        nvars = len(self.variables)
        for i in range(nvars):
            e1 = tuple(1 if j == i else 0 for j in range(nvars))
            x = self.normal_form_payload(((e1, self.coeff.one()),))
            power = x
            k = 1
            while power and k <= bound:
                power = self.normal_form_payload(_poly_mul(power, x, self.coeff, self._key))
                k += 1
            if power:
                return
            witnesses.append(k)
        self.local = True
        self.nilpotency_bound = max(witnesses, default=1)
        self.maximal_ideal = self.variables

    def _standard_monomials(self):
        """Monomials outside the leading-term ideal, or None when infinite."""
        if self.groebner is None:
            return None
        lts = [g[0][0] for g in self.groebner]
        n = len(self.variables)
        bounds = []
        for i in range(n):
            cap = None
            for lt in lts:
                if lt[i] > 0 and all(lt[j] == 0 for j in range(n) if j != i):
                    cap = lt[i] if cap is None else min(cap, lt[i])
            if cap is None:
                return None
            bounds.append(cap)
        std = []
        for exps in itertools.product(*(range(b) for b in bounds)):
            if not any(monomial_divides(lt, exps) for lt in lts):
                std.append(exps)
        std.sort(key=self._key)
        return tuple(std)

    # -- payload-level arithmetic ----------------------------------------------

    def _zero_payload(self):
        if self.kind == INTEGERS:
            return 0
        if self.kind == RATIONALS:
            return Fraction(0)
        if self.kind in (ZMOD, PRIMEFIELD):
            return 0
        return ()

    def _one_payload(self):
        if self.kind == INTEGERS:
            return 1
        if self.kind == RATIONALS:
            return Fraction(1)
        if self.kind in (ZMOD, PRIMEFIELD):
            return 1 % self.modulus
        zero_exp = tuple(0 for _ in self.variables)
        return ((zero_exp, self.coeff.one()),)

    def add_payload(self, a, b):
        if self.kind in (INTEGERS, RATIONALS):
            return a + b
        if self.kind in (ZMOD, PRIMEFIELD):
            return (a + b) % self.modulus
        if not a:
            return b
        if not b:
            return a
        return _poly_add(a, b, self.coeff, self._key)

    def neg_payload(self, a):
        if self.kind in (INTEGERS, RATIONALS):
            return -a
        if self.kind in (ZMOD, PRIMEFIELD):
            return (-a) % self.modulus
        return _poly_neg(a, self.coeff, self._key)

    def mul_payload(self, a, b):
        if self.kind in (INTEGERS, RATIONALS):
            return a * b
        if self.kind in (ZMOD, PRIMEFIELD):
            return (a * b) % self.modulus
        if not a or not b:
            return ()
        return self.normal_form_payload(_poly_mul(a, b, self.coeff, self._key))

    def normal_form_payload(self, a):
        if self.kind != POLYQUOT or not self.groebner:
            return a
        return _poly_reduce(a, self.groebner, self.coeff, self._key)

    def from_int(self, n):
        if self.kind == INTEGERS:
            return RingElement(self, n)
        if self.kind == RATIONALS:
            return RingElement(self, Fraction(n))
        if self.kind in (ZMOD, PRIMEFIELD):
            return RingElement(self, n % self.modulus)
        c = self.coeff.from_int(n)
        if self.coeff.is_zero(c):
            return self.zero
        zero_exp = tuple(0 for _ in self.variables)
        return RingElement(self, ((zero_exp, c),))

    def variable(self, name):
        if self.kind != POLYQUOT or name not in self.variables:
            raise UnknownVariable(f"{name!r} is not a variable of {self}")
        i = self.variables.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(self.variables)))
        return RingElement(self, self.normal_form_payload(((e, self.coeff.one()),)))

    # -- predicates -------------------------------------------------------------

    def is_unit_payload(self, a):
        if self.kind == INTEGERS:
            return a in (1, -1)
        if self.kind == RATIONALS:
            return a != 0
        if self.kind in (ZMOD, PRIMEFIELD):
            from math import gcd
            return a != 0 and gcd(a, self.modulus) == 1
        # polynomial quotient
        if not a:
            return False
        if self._finite_dimensional():
            return self._unit_by_multiplication_matrix(a)
        # no quotient relations: units are the nonzero constants
        if not self.groebner:
            return len(a) == 1 and sum(a[0][0]) == 0
        raise NotImplementedError(
            "unit test unavailable for infinite-dimensional proper quotients")

    def _finite_dimensional(self):
        return self.kind == POLYQUOT and self._std_monomials is not None

    def _unit_by_multiplication_matrix(self, a):
        # mult-by-a on the standard monomial basis, invertible over the field
        std = self._std_monomials
        index = {m: i for i, m in enumerate(std)}
        cf = self.coeff
        cols = []
        for m in std:
            prod = self.normal_form_payload(_poly_mul(a, ((m, cf.one()),), cf, self._key))
            col = [cf.zero()] * len(std)
            for e, c in prod:
                col[index[e]] = c
            cols.append(col)
        # Gaussian elimination over the coefficient field
        n = len(std)
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        rank = 0
        for col in range(n):
            piv = None
            for r in range(rank, n):
                if not cf.is_zero(mat[r][col]):
                    piv = r
                    break
            if piv is None:
                continue
            mat[rank], mat[piv] = mat[piv], mat[rank]
            inv = cf.inv(mat[rank][col])
            mat[rank] = [cf.mul(inv, x) for x in mat[rank]]
            for r in range(n):
                if r != rank and not cf.is_zero(mat[r][col]):
                    f = mat[r][col]
                    mat[r] = [cf.add(x, cf.neg(cf.mul(f, y))) for x, y in zip(mat[r], mat[rank])]
            rank += 1
        return rank == n

    # -- finite enumeration -------------------------------------------------------

    def is_finite(self):
        if self.kind in (ZMOD, PRIMEFIELD):
            return True
        return self.kind == POLYQUOT and self._finite_dimensional()

    def cardinality(self):
        if self.kind in (ZMOD, PRIMEFIELD):
            return self.modulus
        if self.kind == POLYQUOT and self._finite_dimensional():
            if self.coeff.kind != "Fp":
                return None
            return self.coeff.p ** len(self._std_monomials)
        return None

    def elements(self):
        """Iterate every element of a finite ring."""
        if self.kind in (ZMOD, PRIMEFIELD):
            for a in range(self.modulus):
                yield RingElement(self, a)
            return
        if self.kind == POLYQUOT and self._finite_dimensional() and self.coeff.kind == "Fp":
            std = self._std_monomials
            for combo in itertools.product(range(self.coeff.p), repeat=len(std)):
                d = {m: c for m, c in zip(std, combo) if c}
                yield RingElement(self, _poly_from_dict(d, self._key))
            return
        raise ValueError(f"{self} is not a finite ring")

    # -- identity ---------------------------------------------------------------

    def _signature(self):
        if self.kind == POLYQUOT:
            return (self.kind, self.coeff.kind, self.coeff.p, self.variables,
                    self.order, self.groebner)
        return (self.kind, self.modulus)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Ring) and self._signature() == other._signature()

    def __hash__(self):
        return hash(self._signature())

    def __repr__(self):
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == RATIONALS:
            return "Q"
        if self.kind == ZMOD:
            return f"Z/{self.modulus}"
        if self.kind == PRIMEFIELD:
            return f"F{self.modulus}"
        gens = ", ".join(format_element(RingElement(self, g)) for g in self.ideal)
        return f"{self.coeff}[{', '.join(self.variables)}]/({gens})"


class RingElement:
    """Canonical element of a Ring; equality is structural."""

    __slots__ = ("ring", "payload")

    def __init__(self, ring, payload):
        self.ring = ring
        self.payload = payload

    def _coerce(self, other):
        if isinstance(other, RingElement):
            if other.ring is not self.ring and other.ring != self.ring:
                raise MixedRings(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.add_payload(self.payload, other.payload))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.add_payload(
            self.payload, self.ring.neg_payload(other.payload)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg_payload(self.payload))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.mul_payload(self.payload, other.payload))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers are not defined in a general ring")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.payload == other.payload and \
            (self.ring is other.ring or self.ring == other.ring)

    def __hash__(self):
        return hash((id(self.ring), self.payload))

    def is_zero(self):
        return self.payload == self.ring.zero_payload

    def is_unit(self):
        return self.ring.is_unit_payload(self.payload)

    def __repr__(self):
        return format_element(self)


# ---------------------------------------------------------------------------
# constructors


_Z = None
_Q = None


def ZZ():
    global _Z
    if _Z is None:
        _Z = Ring(INTEGERS)
    return _Z


def QQ():
    global _Q
    if _Q is None:
        _Q = Ring(RATIONALS)
    return _Q


_zmod_cache = {}
_gf_cache = {}


def Zmod(n):
    if not isinstance(n, int) or n < 2:
        raise ValueError("Z/n requires an integer modulus n >= 2")
    if n not in _zmod_cache:
        _zmod_cache[n] = Ring(ZMOD, modulus=n)
    return _zmod_cache[n]


def GF(p):
    if not is_prime(p):
        raise NonPrimeModulus(f"{p} is not prime")
    if p not in _gf_cache:
        _gf_cache[p] = Ring(PRIMEFIELD, modulus=p)
    return _gf_cache[p]


def coeff_field(spec):
    """'Q' or 'F<p>' to a coefficient-field handle."""
    if spec == "Q":
        return _CoeffField("Q")
    m = re.fullmatch(r"F(\d+)", spec)
    if m:
        p = int(m.group(1))
        if not is_prime(p):
            raise NonPrimeModulus(f"{p} is not prime")
        return _CoeffField("Fp", p)
    raise ValueError(f"unknown coefficient field {spec!r}")


def poly_quotient(coeff, variables, ideal_texts=(), order="degrevlex",
                  budget=DEFAULT_GROEBNER_BUDGET):
    """Polynomial quotient ring coeff[variables]/(ideal).

    `coeff` is 'Q' or 'F<p>' (or a _CoeffField); ideal generators are given
    in the element grammar.  The reduced Groebner basis is computed here and
    cached on the ring.
    """
    if isinstance(coeff, str):
        coeff = coeff_field(coeff)
    variables = tuple(variables)
    if not variables:
        raise EmptyVariableList("a polynomial quotient needs at least one variable")
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    if order not in MONOMIAL_ORDERS:
        raise ValueError(f"unknown monomial order {order!r}")
    key = monomial_key(order)
    # parse generators in a relation-free scratch ring with the same variables
    scratch = Ring(POLYQUOT, coeff=coeff, variables=variables, ideal=(),
                   order=order, groebner=())
    gens = []
    for text in ideal_texts:
        if isinstance(text, str):
            gens.append(parse_element(scratch, text).payload)
        else:
            gens.append(text)
    gb = groebner_basis(gens, coeff, key, budget=budget)
    return Ring(POLYQUOT, coeff=coeff, variables=variables,
                ideal=tuple(gens), order=order, groebner=gb, budget=budget)


def make_ring(spec, budget=DEFAULT_GROEBNER_BUDGET):
    """Build a ring from its one-line textual description.

    Grammar:
        integers | rationals | zmod <n> | primefield <p>
        polyquot coeff=<Q|F p> vars=<v,...> order=<ord> ideal=[g1, g2, ...]
    """
    text = spec.strip()
    if text == "integers":
        return ZZ()
    if text == "rationals":
        return QQ()
    m = re.fullmatch(r"zmod\s+(\d+)", text)
    if m:
        return Zmod(int(m.group(1)))
    m = re.fullmatch(r"primefield\s+(\d+)", text)
    if m:
        return GF(int(m.group(1)))
    m = re.fullmatch(
        r"polyquot\s+coeff=(\S+)\s+vars=(\S+)\s+order=(\S+)\s+ideal=\[(.*)\]", text)
    if m:
        coeff, vars_, order, ideal = m.groups()
        names = tuple(v.strip() for v in vars_.split(",") if v.strip())
        gens = [g.strip() for g in ideal.split(",") if g.strip()]
        return poly_quotient(coeff, names, gens, order=order, budget=budget)
    raise ValueError(f"unrecognized ring spec {spec!r}")


def ring_spec(ring):
    """Inverse of make_ring: the canonical one-line description."""
    if ring.kind == INTEGERS:
        return "integers"
    if ring.kind == RATIONALS:
        return "rationals"
    if ring.kind == ZMOD:
        return f"zmod {ring.modulus}"
    if ring.kind == PRIMEFIELD:
        return f"primefield {ring.modulus}"
    gens = ", ".join(format_element(RingElement(ring, g)) for g in ring.ideal)
    return (f"polyquot coeff={ring.coeff} vars={','.join(ring.variables)} "
            f"order={ring.order} ideal=[{gens}]")


# ---------------------------------------------------------------------------
# printing

def _format_coeff(cf, c):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def format_element(x):
    ring = x.ring
    p = x.payload
    if ring.kind == INTEGERS:
        return str(p)
    if ring.kind == RATIONALS:
        return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"
    if ring.kind in (ZMOD, PRIMEFIELD):
        return str(p)
    if not p:
        return "0"
    parts = []
    for e, c in p:
        factors = []
        for name, exp in zip(ring.variables, e):
            if exp == 1:
                factors.append(name)
            elif exp > 1:
                factors.append(f"{name}^{exp}")
        coeff_str = _format_coeff(ring.coeff, c)
        negative = coeff_str.startswith("-")
        if negative:
            coeff_str = coeff_str[1:]
        if not factors:
            body = coeff_str
        elif coeff_str == "1":
            body = "*".join(factors)
        else:
            body = "*".join([coeff_str] + factors)
        parts.append(("-" if negative else "+", body))
    sign, body = parts[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# parsing
#
# Element grammar (whitespace insignificant):
#   integer:    -?[0-9]+
#   fraction:   int "/" posint           (rationals only)
#   polynomial: terms joined by + or -, term = optional coefficient joined
#               by "*" with variable powers  var ^ posint

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()])|$)")


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.items = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise ElementSyntaxError(f"unexpected character {text[pos]!r}", pos)
            num, name, op = m.groups()
            if num is not None:
                self.items.append(("num", num, m.start(1)))
            elif name is not None:
                self.items.append(("name", name, m.start(2)))
            elif op is not None:
                self.items.append(("op", op, m.start(3)))
            pos = m.end()
        self.items.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.items[self.i]

    def next(self):
        item = self.items[self.i]
        self.i += 1
        return item


def parse_element(ring, text, variable_hook=None):
    """Parse text in the element grammar into a canonical RingElement.

    `variable_hook(name)` may claim identifier tokens (used by the descent
    system format for X_/Y_/Z_ variables); it returns an opaque symbol or
    None to fall through to ring variables.
    """
    toks = _Tokens(text)
    result = _parse_sum(ring, toks, variable_hook)
    kind, val, pos = toks.peek()
    if kind != "end":
        raise ElementSyntaxError(f"trailing input {val!r}", pos)
    return result


def _parse_sum(ring, toks, hook):
    acc = None
    sign = 1
    kind, val, pos = toks.peek()
    if kind == "op" and val in "+-":
        toks.next()
        sign = -1 if val == "-" else 1
    while True:
        term = _parse_term(ring, toks, hook)
        if sign == -1:
            term = _negate(term)
        acc = term if acc is None else _add(acc, term)
        kind, val, pos = toks.peek()
        if kind == "op" and val in "+-":
            toks.next()
            sign = -1 if val == "-" else 1
            continue
        return acc


def _parse_term(ring, toks, hook):
    factors = [_parse_factor(ring, toks, hook)]
    while True:
        kind, val, pos = toks.peek()
        if kind == "op" and val == "*":
            toks.next()
            factors.append(_parse_factor(ring, toks, hook))
        else:
            break
    acc = factors[0]
    for f in factors[1:]:
        acc = _mul(acc, f)
    return acc


def _parse_factor(ring, toks, hook):
    kind, val, pos = toks.next()
    if kind == "num":
        base = int(val)
        nk, nv, npos = toks.peek()
        if nk == "op" and nv == "/":
            toks.next()
            dk, dv, dpos = toks.next()
            if dk != "num":
                raise ElementSyntaxError("expected a positive integer denominator", dpos)
            den = int(dv)
            if den == 0:
                raise ElementSyntaxError("zero denominator", dpos)
            if ring.kind != RATIONALS:
                raise ElementSyntaxError("fractions are only valid over the rationals", pos)
            return ring.from_int(base) * _invert_int(ring, den)
        value = ring.from_int(base)
    elif kind == "name":
        sym = hook(val) if hook is not None else None
        if sym is not None:
            value = sym
        else:
            if ring.kind != POLYQUOT or val not in (ring.variables or ()):
                raise UnknownVariable(f"unknown variable {val!r} at position {pos}")
            value = ring.variable(val)
    else:
        raise ElementSyntaxError(f"expected a number or variable, got {val!r}", pos)
    nk, nv, npos = toks.peek()
    if nk == "op" and nv == "^":
        toks.next()
        ek, ev, epos = toks.next()
        if ek != "num":
            raise ElementSyntaxError("expected a positive integer exponent", epos)
        value = _pow(value, int(ev))
    return value


def _invert_int(ring, n):
    return RingElement(ring, Fraction(1, n))


# The parser works both on RingElements and on descent-system symbol values;
# these tiny dispatch helpers keep it generic without a class hierarchy.

def _add(a, b):
    return a + b


def _mul(a, b):
    return a * b


def _negate(a):
    return -a


def _pow(a, n):
    return a ** n


# ---------------------------------------------------------------------------
# normal form / parse entry points named as in the public surface

def normal_form(ring, element):
    """Canonicalize a raw element of `ring` (idempotent by construction)."""
    if isinstance(element, RingElement):
        if element.ring != ring:
            raise MixedRings(f"{element.ring} vs {ring}")
        return RingElement(ring, ring.normal_form_payload(element.payload))
    if isinstance(element, int):
        return ring.from_int(element)
    return RingElement(ring, ring.normal_form_payload(element))


# ---------------------------------------------------------------------------
# ring homomorphisms


class RingHom:
    """A homomorphism between rings, given on generators.

    For integer-like sources the map is canonical (1 -> 1); polynomial
    quotient sources additionally need images for each variable.  `check()`
    verifies that relations die, via normal forms in the target.
    """

    def __init__(self, source, target, var_images=None):
        self.source = source
        self.target = target
        self.var_images = dict(var_images or {})
        self.check()

    def check(self):
        src, tgt = self.source, self.target
        if src.kind == INTEGERS:
            return
        if src.kind == RATIONALS:
            if tgt.kind != RATIONALS:
                raise NotAHomomorphism("the rationals only map to themselves here")
            return
        if src.kind in (ZMOD, PRIMEFIELD):
            if not (tgt.from_int(src.modulus)).is_zero():
                raise NotAHomomorphism(
                    f"{src.modulus} is not zero in {tgt}; Z/{src.modulus} does not map")
            return
        # polynomial quotient: need variable images killing the ideal
        for v in src.variables:
            if v not in self.var_images:
                raise NotAHomomorphism(f"no image supplied for variable {v!r}")
        for gen in src.ideal:
            img = self._apply_payload(gen)
            if not img.is_zero():
                raise NotAHomomorphism(
                    f"ideal generator {format_element(RingElement(src, gen))} "
                    f"maps to {img!r} != 0")

    def _apply_payload(self, payload):
        src, tgt = self.source, self.target
        acc = tgt.zero
        for e, c in payload:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise NotAHomomorphism("cannot map non-integral coefficients")
                term = tgt.from_int(c.numerator)
            else:
                term = tgt.from_int(c)
            for name, exp in zip(src.variables, e):
                if exp:
                    term = term * (self.var_images[name] ** exp)
            acc = acc + term
        return acc

    def __call__(self, x):
        if x.ring != self.source:
            raise MixedRings(f"element of {x.ring} fed to a map from {self.source}")
        src, tgt = self.source, self.target
        if src == tgt and not self.var_images:
            return x
        if src.kind == INTEGERS:
            return tgt.from_int(x.payload)
        if src.kind == RATIONALS:
            return RingElement(tgt, x.payload)
        if src.kind in (ZMOD, PRIMEFIELD):
            return tgt.from_int(x.payload)
        return self._apply_payload(x.payload)

    def is_identity(self):
        if self.source != self.target:
            return False
        if self.source.kind != POLYQUOT:
            return True
        return all(self.var_images[v] == self.source.variable(v)
                   for v in self.source.variables)

    @staticmethod
    def identity(ring):
        images = None
        if ring.kind == POLYQUOT:
            images = {v: ring.variable(v) for v in ring.variables}
        return RingHom(ring, ring, images)
