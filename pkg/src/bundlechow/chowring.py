"""Chow-ring presentations of multiprojective bundles over projective space.

A bundle P(E1) x ... x P(Er) over P^n, with every Ei either split (a sum of
line bundles O(d)) or the tangent bundle of the base, has intersection ring

    Z[t, u1, ..., ur] / (t^(n+1), G1(u1, t), ..., Gr(ur, t)),

one relation per factor, each monic in its ui and encoded by the factor's
Chern class. The monomials t^a * u1^a1 * ... * ur^ar with a <= n and
ai <= qi (rank Ei = qi + 1) form a free Z-basis, which makes normal forms,
products and graded ranks exact integer computations.

Presentations are immutable after construction and all operations here are
pure, so they are safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

from .errors import BasisLimitError, InvalidSpecError
from .poly import Poly, deglex_key, format_poly

SPLIT = "split"
TANGENT = "tangent"

MAX_BASIS_ENV = "BUNDLECHOW_MAX_BASIS"
DEFAULT_MAX_BASIS = 10**6


def _basis_cap(explicit):
    if explicit is not None:
        return int(explicit)
    raw = os.environ.get(MAX_BASIS_ENV)
    if raw is None:
        return DEFAULT_MAX_BASIS
    try:
        return int(raw)
    except ValueError:
        raise BasisLimitError(f"{MAX_BASIS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class BundleDescriptor:
    """A bundle factor at the level of Chern data.

    ``split`` carries its integer twists (rank = number of twists, at least
    2); ``tangent`` is the tangent bundle of the base and needs n >= 2 so
    the projectivization is proper.
    """

    kind: str
    twists: tuple | None = None

    @classmethod
    def split(cls, twists):
        return cls(SPLIT, tuple(int(d) for d in twists))

    @classmethod
    def tangent(cls):
        return cls(TANGENT)

    @classmethod
    def coerce(cls, value):
        """Accept a descriptor, the string 'tangent', or a twist list."""
        if isinstance(value, cls):
            return value
        if value == TANGENT:
            return cls.tangent()
        if isinstance(value, dict):
            return cls.from_json(value)
        if isinstance(value, (list, tuple)):
            return cls.split(value)
        raise InvalidSpecError(f"cannot interpret {value!r} as a bundle factor")

    @classmethod
    def from_json(cls, data):
        kind = data.get("kind")
        if kind == SPLIT:
            return cls.split(data["twists"])
        if kind == TANGENT:
            return cls.tangent()
        raise InvalidSpecError(f"unknown factor kind {kind!r}")

    def to_json(self):
        if self.kind == SPLIT:
            return {"kind": SPLIT, "twists": list(self.twists)}
        return {"kind": TANGENT}

    def validate(self, n):
        if n < 1:
            raise InvalidSpecError("base dimension must be >= 1")
        if self.kind == SPLIT:
            if not self.twists or len(self.twists) < 2:
                raise InvalidSpecError("split factor needs at least 2 twists (rank >= 2)")
        elif self.kind == TANGENT:
            if self.twists is not None:
                raise InvalidSpecError("tangent factor carries no twists")
            if n < 2:
                raise InvalidSpecError("tangent factor needs base dimension >= 2")
        else:
            raise InvalidSpecError(f"unknown factor kind {self.kind!r}")

    def rank(self, n):
        return len(self.twists) if self.kind == SPLIT else n

    def fiber_dim(self, n):
        return self.rank(n) - 1

    def is_trivial_up_to_twist(self):
        return self.kind == SPLIT and len(set(self.twists)) == 1

    def normalized_key(self):
        """Canonical form modulo line-bundle twist, for factor matching."""
        if self.kind == TANGENT:
            return (TANGENT,)
        return (SPLIT, normalize_twists(self.twists))


def normalize_twists(twists):
    """Sort and shift so the smallest twist is 0."""
    ts = sorted(int(d) for d in twists)
    return tuple(d - ts[0] for d in ts)


@dataclass(frozen=True)
class ChernClass:
    """Total Chern class truncated at the base dimension: coefficients
    (c0, ..., cn) of 1 + c1*t + ... + cn*t^n, with c0 = 1."""

    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] != 1:
            raise ValueError("a total Chern class starts with c0 = 1")

    @property
    def n(self):
        return len(self.coefficients) - 1


def chern_of_descriptor(descriptor, n):
    """Chern class of a descriptor over P^n.

    Split [d1, ..., dk] gives the product of (1 + dj*t); the tangent bundle
    gives (1 + t)^(n+1), both truncated at degree n.
    """
    descriptor = BundleDescriptor.coerce(descriptor)
    descriptor.validate(n)
    if descriptor.kind == TANGENT:
        coeffs = [math.comb(n + 1, k) for k in range(n + 1)]
    else:
        coeffs = [1] + [0] * n
        for d in descriptor.twists:
            for k in range(n, 0, -1):
                coeffs[k] += d * coeffs[k - 1]
    return ChernClass(tuple(coeffs))


def grothendieck_relation(chern, rank, nvars=2, var_index=1):
    """The relation satisfied by the relative hyperplane class of a rank
    ``rank`` factor with the given Chern class.

    Returns G(U, T) = sum_k (-1)^k c_k U^(rank-k) T^k, homogeneous of degree
    ``rank``, monic in U, with c_k = 0 beyond the base dimension. The sign
    rule is forced by requiring G(1, -t) to reproduce the Chern class; for
    split twists it expands the product of (U - dj*T).
    """
    if rank < 2:
        raise InvalidSpecError("projective bundle factors need rank >= 2")
    if not 1 <= var_index < nvars:
        raise ValueError("var_index must name a u-variable")
    n = chern.n
    terms = {}
    for k in range(rank + 1):
        ck = chern.coefficients[k] if k <= n else 0
        if not ck:
            continue
        mono = [0] * nvars
        mono[0] = k
        mono[var_index] = rank - k
        terms[tuple(mono)] = (-1) ** k * ck
    return Poly(nvars, terms)


class ChowPresentation:
    """Relations (t^(n+1), G1, ..., Gr), the monomial basis and graded ranks.

    ``reduce`` rewrites any polynomial to its unique representative on the
    basis: ui^(qi+1) is replaced via Gi and t-exponents above n die. The
    relation leading monomials ui^(qi+1), t^(n+1) are pairwise coprime, so
    the rewriting system is confluent and the result does not depend on
    reduction order.
    """

    def __init__(self, n, factor_relations, max_basis=None):
        n = int(n)
        if n < 1:
            raise InvalidSpecError("base dimension must be >= 1")
        gs = tuple(factor_relations)
        if not gs:
            raise InvalidSpecError("need at least one factor relation")
        nvars = len(gs) + 1
        ranks = []
        for i, g in enumerate(gs, start=1):
            if not isinstance(g, Poly) or g.nvars != nvars:
                raise ValueError(f"relation {i} must be a Poly in {nvars} variables")
            if g.is_zero() or not g.is_homogeneous():
                raise InvalidSpecError(f"relation {i} must be homogeneous and nonzero")
            d = g.degree()
            if d < 2:
                raise InvalidSpecError(f"relation {i} must have degree >= 2 (rank >= 2)")
            for mono in g.terms:
                if any(e and j not in (0, i) for j, e in enumerate(mono)):
                    raise InvalidSpecError(f"relation {i} may only involve t and u{i}")
            lead = tuple(d if j == i else 0 for j in range(nvars))
            if g.terms.get(lead) != 1:
                raise InvalidSpecError(f"relation {i} must be monic in u{i}")
            ranks.append(d)
        self.n = n
        self.r = len(gs)
        self.nvars = nvars
        self.ranks = tuple(ranks)
        self.qs = tuple(d - 1 for d in ranks)

        size = (n + 1) * math.prod(self.ranks)
        cap = _basis_cap(max_basis)
        if size > cap:
            raise BasisLimitError(f"basis size {size} exceeds the cap {cap}")

        self.relations = (Poly.variable(0, nvars) ** (n + 1),) + gs
        tails = []
        for i, g in enumerate(gs, start=1):
            lead = tuple(ranks[i - 1] if j == i else 0 for j in range(nvars))
            tails.append(tuple((m, -c) for m, c in g.terms.items() if m != lead))
        self._tails = tuple(tails)

        self.basis = tuple(
            sorted(
                itertools.product(range(n + 1), *[range(q + 1) for q in self.qs]),
                key=deglex_key,
            )
        )
        self.dim = n + sum(self.qs)
        counts = [0] * (self.dim + 1)
        for mono in self.basis:
            counts[sum(mono)] += 1
        self.betti = tuple(counts)
        self._basis_index = {m: i for i, m in enumerate(self.basis)}

    def signature(self):
        return (self.n, tuple(tuple(sorted(g.terms.items())) for g in self.relations))

    def __eq__(self, other):
        if not isinstance(other, ChowPresentation):
            return NotImplemented
        return self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        rels = ", ".join(format_poly(g) for g in self.relations)
        return f"ChowPresentation(n={self.n}, relations=[{rels}])"

    def reduce(self, f):
        """Normal form of ``f`` as a Poly supported on the basis monomials."""
        if f.nvars != self.nvars:
            raise ValueError("variable count mismatch with the presentation")
        out = {}
        work = dict(f.terms)
        while work:
            mono, coeff = work.popitem()
            if mono[0] > self.n:
                continue
            target = 0
            for i in range(1, self.nvars):
                if mono[i] > self.qs[i - 1]:
                    target = i
                    break
            if not target:
                s = out.get(mono, 0) + coeff
                if s:
                    out[mono] = s
                else:
                    del out[mono]
                continue
            base = list(mono)
            base[target] -= self.qs[target - 1] + 1
            for tmono, tcoeff in self._tails[target - 1]:
                new = tuple(b + e for b, e in zip(base, tmono))
                s = work.get(new, 0) + coeff * tcoeff
                if s:
                    work[new] = s
                else:
                    del work[new]
        return Poly(self.nvars, out)

    def element(self, f):
        return ChowElement(self, self.reduce(f))


@dataclass(frozen=True)
class ChowElement:
    """A ring element in normal form, tied to its presentation."""

    presentation: ChowPresentation
    value: Poly

    def _lift(self, other):
        if isinstance(other, ChowElement):
            if other.presentation != self.presentation:
                raise ValueError("elements live in different presentations")
            return other.value
        if isinstance(other, (Poly, int)):
            return other
        return None

    def __add__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ChowElement(self.presentation, self.presentation.reduce(self.value + v))

    __radd__ = __add__

    def __neg__(self):
        return ChowElement(self.presentation, -self.value)

    def __sub__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ChowElement(self.presentation, self.presentation.reduce(self.value - v))

    def __mul__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ChowElement(self.presentation, self.presentation.reduce(self.value * v))

    __rmul__ = __mul__

    def __pow__(self, exponent):
        e = int(exponent)
        if e < 0:
            raise ValueError("negative power")
        out = ChowElement(self.presentation, Poly.one(self.presentation.nvars))
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, ChowElement):
            return self.presentation == other.presentation and self.value == other.value
        if isinstance(other, (Poly, int)):
            return self.value == other
        return NotImplemented

    __hash__ = None

    def is_zero(self):
        return self.value.is_zero()

    def vector(self):
        """Coordinates over the basis monomials, in basis order."""
        return tuple(self.value.terms.get(m, 0) for m in self.presentation.basis)

    def __str__(self):
        return format_poly(self.value)


def build_presentation(n, factors, max_basis=None):
    """Presentation of the multiprojective bundle with the given factors."""
    descs = [BundleDescriptor.coerce(f) for f in factors]
    if not descs:
        raise InvalidSpecError("need at least one factor")
    for d in descs:
        d.validate(n)
    nvars = len(descs) + 1
    gs = []
    for i, d in enumerate(descs, start=1):
        chern = chern_of_descriptor(d, n)
        gs.append(grothendieck_relation(chern, d.rank(n), nvars=nvars, var_index=i))
    return ChowPresentation(n, gs, max_basis=max_basis)


def normal_form(presentation, f):
    """Unique basis representative of ``f`` in the presentation. Linear in
    ``f``; the result is zero exactly when ``f`` lies in the relation ideal."""
    return presentation.element(f)


def betti(presentation):
    """Rank of each graded piece, degree 0 up to n + sum(qi)."""
    return list(presentation.betti)
