"""Invariants of relative symmetric powers of projective bundles.

For the r-th fiberwise symmetric power of a P^p-bundle over P^n with
r >= 2 and p >= 2, the total space Z has dim Z = n + r*p, the singular
locus has codimension p, the (r-1)-st iterated singular locus is the
diagonal copy of the bundle (dimension n + p), the r-th is empty, and the
Picard rank is 2. These invariants separate non-isomorphic symmetric
powers and drive the isomorphism decision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chowring import SPLIT
from .classify import IsoCertificate, Obstruction
from .errors import FiberTooSmallError, InvalidSpecError

CLASS_GROUP_NOTE = "Cl(fiber) ≅ Z ⊕ Z/2Z"


@dataclass(frozen=True)
class StratumReport:
    n: int
    r: int
    p: int
    total_dim: int
    sing_codim: int
    diag_level: int
    empty_level: int
    picard_rank: int
    class_group_note: str

    @property
    def diagonal_dim(self):
        return self.n + self.p

    def to_json(self):
        return {
            "n": self.n,
            "r": self.r,
            "p": self.p,
            "total_dim": self.total_dim,
            "sing_codim": self.sing_codim,
            "diag_level": self.diag_level,
            "empty_level": self.empty_level,
            "diagonal_dim": self.diagonal_dim,
            "picard_rank": self.picard_rank,
            "class_group_note": self.class_group_note,
        }


def sym_invariants(n, r, p):
    """Stratification and Picard data of the r-th symmetric power of a
    P^p-bundle over P^n. Requires r >= 2 and p >= 2; intermediate singular
    strata between level 1 and level r-1 are deliberately not reported."""
    n, r, p = int(n), int(r), int(p)
    if n < 1:
        raise InvalidSpecError("base dimension must be >= 1")
    if r < 2:
        raise InvalidSpecError("symmetric power needs r >= 2")
    if p < 2:
        raise FiberTooSmallError("fiber dimension p must be >= 2")
    return StratumReport(
        n=n,
        r=r,
        p=p,
        total_dim=n + r * p,
        sing_codim=p,
        diag_level=r - 1,
        empty_level=r,
        picard_rank=2,
        class_group_note=CLASS_GROUP_NOTE,
    )


def _single_factor(spec, side):
    spec.validate()
    if len(spec.factors) != 1:
        raise InvalidSpecError(f"{side} spec must have exactly one factor for a symmetric power")
    return spec.factors[0]


def sym_iso_check(left, r, right, s):
    """Decide isomorphism of two relative symmetric powers.

    ``left``/``right`` are single-factor bundle specs and r, s >= 2 the
    power exponents. Isomorphic iff the bases, powers and fiber dimensions
    agree and the factors match up to a line-bundle twist; the certificate
    carries the shift. Rank-2 factors (fiber dimension 1) are rejected
    with FiberTooSmallError rather than silently decided.
    """
    r, s = int(r), int(s)
    f = _single_factor(left, "left")
    g = _single_factor(right, "right")
    if r < 2 or s < 2:
        raise InvalidSpecError("symmetric powers need exponent >= 2")
    p = f.fiber_dim(left.n)
    q = g.fiber_dim(right.n)
    if p < 2 or q < 2:
        raise FiberTooSmallError(
            "rank-2 factor gives fiber dimension 1, outside the supported regime"
        )
    if left.n != right.n:
        return Obstruction("base-mismatch", f"base P^{left.n} vs P^{right.n}")
    if r != s:
        return Obstruction("power-mismatch", f"symmetric power {r} vs {s}")
    if p != q:
        return Obstruction("rank-mismatch", f"fiber dimension {p} vs {q}")
    if f.normalized_key() != g.normalized_key():
        return Obstruction(
            "no-matching-permutation", "factors are not equal up to a line-bundle twist"
        )
    shift = min(g.twists) - min(f.twists) if f.kind == SPLIT else 0
    return IsoCertificate((1,), (shift,), "identity", None)
