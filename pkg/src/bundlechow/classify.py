"""Isomorphism of multiprojective bundles from split/tangent descriptor data.

Two such bundles over the same projective space are isomorphic exactly when
some permutation matches their factors up to line-bundle twists (tangent
factors match only tangent factors). Pullback along an automorphism of the
base fixes every O(d) and the tangent bundle, so at the descriptor level
the base automorphism never enters the comparison; certificates therefore
carry a permutation and twist shifts, with the base map flagged but not
computed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chowring import SPLIT, TANGENT, BundleDescriptor, normalize_twists
from .errors import InvalidSpecError
from .fibration import SecondFibration, second_fibration_exists

OBSTRUCTION_REASONS = (
    "rank-mismatch",
    "factor-count-mismatch",
    "base-mismatch",
    "no-matching-permutation",
    "power-mismatch",
)


def normalize_split(twists):
    """Twists sorted ascending and shifted so the minimum is 0. Idempotent;
    two twist lists describe the same bundle up to a line-bundle twist
    exactly when their normal forms agree."""
    if len(twists) < 2:
        raise InvalidSpecError("split factor needs at least 2 twists (rank >= 2)")
    return list(normalize_twists(twists))


@dataclass(frozen=True)
class MultiBundleSpec:
    """Base dimension plus an ordered tuple of proper bundle factors."""

    n: int
    factors: tuple

    @classmethod
    def of(cls, n, factors):
        return cls(int(n), tuple(BundleDescriptor.coerce(f) for f in factors))

    def validate(self):
        if not self.factors:
            raise InvalidSpecError("need at least one factor")
        for f in self.factors:
            f.validate(self.n)


@dataclass(frozen=True)
class IsoCertificate:
    """Witness for an isomorphism: left factor i matches right factor
    sigma[i] (1-based) after twisting by shifts[i]. ``psi_note`` records
    that the base automorphism is not computed; descriptor matching makes
    the identity work."""

    sigma: tuple
    shifts: tuple
    psi_note: str = "identity"
    second_fibration: SecondFibration | None = None

    def to_json(self):
        return {
            "sigma": list(self.sigma),
            "shifts": list(self.shifts),
            "psi": self.psi_note,
            "second_fibration": None
            if self.second_fibration is None
            else self.second_fibration.to_json(),
        }


@dataclass(frozen=True)
class Obstruction:
    """Machine-readable reason two specs are not isomorphic."""

    reason: str
    detail: str

    def __post_init__(self):
        if self.reason not in OBSTRUCTION_REASONS:
            raise ValueError(f"unknown obstruction reason {self.reason!r}")

    def to_json(self):
        return {"reason": self.reason, "detail": self.detail}


def multi_iso_check(left, right):
    """Decide whether the two bundles are isomorphic as abstract varieties.

    Sound and complete for split/tangent data: isomorphic iff the bases
    agree, the factor counts agree, and a permutation matches normalized
    descriptors (split twists up to shift, tangent to tangent). Returns an
    IsoCertificate or an Obstruction. The certificate also records whether
    a second fibration exists, which determines whether every isomorphism
    must live over the base.
    """
    left.validate()
    right.validate()
    if left.n != right.n:
        return Obstruction("base-mismatch", f"base P^{left.n} vs P^{right.n}")
    if len(left.factors) != len(right.factors):
        return Obstruction(
            "factor-count-mismatch",
            f"{len(left.factors)} factors vs {len(right.factors)}",
        )
    lranks = sorted(f.rank(left.n) for f in left.factors)
    rranks = sorted(f.rank(right.n) for f in right.factors)
    if lranks != rranks:
        return Obstruction("rank-mismatch", f"factor ranks {lranks} vs {rranks}")
    used = [False] * len(right.factors)
    sigma = []
    shifts = []
    for i, f in enumerate(left.factors):
        key = f.normalized_key()
        match = None
        for j, g in enumerate(right.factors):
            if not used[j] and g.normalized_key() == key:
                match = j
                break
        if match is None:
            return Obstruction(
                "no-matching-permutation",
                f"left factor {i + 1} has no partner equal up to twist",
            )
        used[match] = True
        sigma.append(match + 1)
        g = right.factors[match]
        if f.kind == SPLIT:
            shifts.append(min(g.twists) - min(f.twists))
        else:
            shifts.append(0)
    context = second_fibration_exists(left.n, list(left.factors))
    return IsoCertificate(tuple(sigma), tuple(shifts), "identity", context)


def verify_certificate(left, right, certificate):
    """Check that the certificate really matches the two specs."""
    r = len(left.factors)
    if sorted(certificate.sigma) != list(range(1, r + 1)):
        return False
    if len(certificate.shifts) != r:
        return False
    for i, f in enumerate(left.factors):
        g = right.factors[certificate.sigma[i] - 1]
        shift = certificate.shifts[i]
        if f.kind != g.kind:
            return False
        if f.kind == TANGENT:
            if shift != 0:
                return False
        else:
            if [d + shift for d in sorted(f.twists)] != sorted(g.twists):
                return False
    return True
