"""Structured automorphism-group descriptors.

Groups are emitted as expression trees over the atoms PGL(k), the
fiberwise automorphism group of a factor, symmetric groups and Z/2, glued
by product, semidirect product and extension nodes. Dimensions and
component-group orders are computed from the atoms and are the testable
surface; groups are never reported as bare strings.

For a multiprojective bundle that is a product of projective spaces (all
factors trivial up to twist), or such a product times the projectivized
tangent bundle, the closed product formulas apply, with factors of equal
dimension grouped together. In every other case the answer is an
extension of the full base automorphism group PGL(n+1) by the fiberwise
kernel: for split and tangent data the pullback of every factor along a
base automorphism is isomorphic to the factor, so the quotient condition
"ψ*P ≅ P over P^n" cuts out all of PGL(n+1). The quotient node carries
that condition so that future descriptor kinds cannot silently reuse it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .chowring import SPLIT, TANGENT, BundleDescriptor
from .errors import InvalidSpecError

H_CONDITION = "ψ*P ≅ P over P^n"


@dataclass(frozen=True)
class PGL:
    k: int

    @property
    def dimension(self):
        return self.k * self.k - 1

    @property
    def component_order(self):
        return 1

    def to_json(self):
        return {"atom": "pgl", "k": self.k}


@dataclass(frozen=True)
class FiberAut:
    """Automorphisms of one factor over the base, with its dimension."""

    descriptor: BundleDescriptor
    dimension: int

    @property
    def component_order(self):
        return 1

    def to_json(self):
        return {
            "atom": "fiber_aut",
            "descriptor": self.descriptor.to_json(),
            "dimension": self.dimension,
        }


@dataclass(frozen=True)
class Sym:
    a: int

    @property
    def dimension(self):
        return 0

    @property
    def component_order(self):
        return math.factorial(self.a)

    def to_json(self):
        return {"atom": "sym", "a": self.a}


@dataclass(frozen=True)
class Z2:
    @property
    def dimension(self):
        return 0

    @property
    def component_order(self):
        return 2

    def to_json(self):
        return {"atom": "z2"}


@dataclass(frozen=True)
class Product:
    items: tuple

    @property
    def dimension(self):
        return sum(item.dimension for item in self.items)

    @property
    def component_order(self):
        return math.prod(item.component_order for item in self.items)

    def to_json(self):
        return {"op": "product", "items": [item.to_json() for item in self.items]}


@dataclass(frozen=True)
class Semidirect:
    kernel: object
    actor: object

    @property
    def dimension(self):
        return self.kernel.dimension + self.actor.dimension

    @property
    def component_order(self):
        return self.kernel.component_order * self.actor.component_order

    def to_json(self):
        return {
            "op": "semidirect",
            "kernel": self.kernel.to_json(),
            "actor": self.actor.to_json(),
        }


@dataclass(frozen=True)
class Extension:
    kernel: object
    quotient: object
    quotient_condition: str | None = None

    @property
    def dimension(self):
        return self.kernel.dimension + self.quotient.dimension

    @property
    def component_order(self):
        return self.kernel.component_order * self.quotient.component_order

    def to_json(self):
        return {
            "op": "extension",
            "kernel": self.kernel.to_json(),
            "quotient": self.quotient.to_json(),
            "quotient_condition": self.quotient_condition,
        }


@dataclass(frozen=True)
class GroupDescriptor:
    expression: object
    dimension: int
    component_order: int | str

    @classmethod
    def of(cls, expression):
        return cls(expression, expression.dimension, expression.component_order)

    def to_json(self):
        return {
            "expression": self.expression.to_json(),
            "dimension": self.dimension,
            "component_order": self.component_order,
        }


def h0_line(n, d):
    """dim H^0(P^n, O(d)): binomial(n+d, n) for d >= 0, else 0."""
    n, d = int(n), int(d)
    if n < 1:
        raise InvalidSpecError("base dimension must be >= 1")
    return math.comb(n + d, n) if d >= 0 else 0


def dim_aut_fiberwise(n, descriptor):
    """Dimension of the group of automorphisms over the base of a split
    factor: sum of h0(O(dj - di)) over all twist pairs, minus 1 for the
    global scalar."""
    descriptor = BundleDescriptor.coerce(descriptor)
    descriptor.validate(n)
    if descriptor.kind != SPLIT:
        raise InvalidSpecError("fiberwise dimension is only defined for split factors here")
    twists = descriptor.twists
    return sum(h0_line(n, dj - di) for di in twists for dj in twists) - 1


def _fiber_aut_atom(n, descriptor):
    # the only fiber-preserving automorphism of the projectivized tangent
    # bundle is the identity, so its fiberwise group is 0-dimensional
    if descriptor.kind == TANGENT:
        return FiberAut(descriptor, 0)
    return FiberAut(descriptor, dim_aut_fiberwise(n, descriptor))


def _grouped_projective_blocks(dims):
    """Blocks (PGL(m+1)^a) ⋊ S_a for a multiset of projective-space
    dimensions, equal dimensions grouped together."""
    blocks = []
    for m, a in sorted(Counter(dims).items()):
        factors = Product(tuple(PGL(m + 1) for _ in range(a))) if a > 1 else PGL(m + 1)
        blocks.append(Semidirect(factors, Sym(a)) if a > 1 else factors)
    return blocks


def _wrap_product(blocks):
    return blocks[0] if len(blocks) == 1 else Product(tuple(blocks))


def describe_aut_multi(n, factors_with_multiplicities):
    """Automorphism-group descriptor of prod_i Pi^(ai) over P^n.

    Factors must be pairwise non-isomorphic over the base after twist
    normalization (merge duplicates into multiplicities first). Product
    formulas apply when the total space is a product of projective spaces,
    or such a product times the projectivized tangent bundle; otherwise
    the group is an extension of PGL(n+1) by the fiberwise kernel
    prod_i (FiberAut_i^(ai) ⋊ S_(ai)).
    """
    n = int(n)
    pairs = []
    for descriptor, multiplicity in factors_with_multiplicities:
        descriptor = BundleDescriptor.coerce(descriptor)
        descriptor.validate(n)
        multiplicity = int(multiplicity)
        if multiplicity < 1:
            raise InvalidSpecError("multiplicities must be >= 1")
        pairs.append((descriptor, multiplicity))
    if not pairs:
        raise InvalidSpecError("need at least one factor")
    keys = [d.normalized_key() for d, _ in pairs]
    if len(set(keys)) != len(keys):
        raise InvalidSpecError(
            "duplicate factors up to twist: merge them into multiplicities"
        )

    tangent_pairs = [(d, a) for d, a in pairs if d.kind == TANGENT]
    others_trivial = all(
        d.is_trivial_up_to_twist() for d, _ in pairs if d.kind != TANGENT
    )

    if not tangent_pairs and others_trivial:
        # product of projective spaces, the base included
        dims = [n]
        for d, a in pairs:
            dims.extend([d.fiber_dim(n)] * a)
        return GroupDescriptor.of(_wrap_product(_grouped_projective_blocks(dims)))

    if len(tangent_pairs) == 1 and tangent_pairs[0][1] == 1 and others_trivial:
        # projectivized tangent bundle times a product of projective spaces
        tangent_block = Semidirect(PGL(n + 1), Z2())
        dims = []
        for d, a in pairs:
            if d.kind != TANGENT:
                dims.extend([d.fiber_dim(n)] * a)
        blocks = [tangent_block] + _grouped_projective_blocks(dims)
        return GroupDescriptor.of(_wrap_product(blocks))

    kernel_blocks = []
    for d, a in pairs:
        atom = _fiber_aut_atom(n, d)
        if a > 1:
            kernel_blocks.append(Semidirect(Product(tuple(atom for _ in range(a))), Sym(a)))
        else:
            kernel_blocks.append(atom)
    kernel = _wrap_product(kernel_blocks)
    return GroupDescriptor.of(Extension(kernel, PGL(n + 1), H_CONDITION))


def describe_aut_sym(n, r, descriptor):
    """Automorphism-group descriptor of the r-th symmetric power of a
    projective bundle over P^n: the full group is the group of bundle
    automorphisms over some base automorphism, an extension of PGL(n+1)
    by the fiberwise group. For the tangent factor the fiberwise part is
    trivial, and the factor swap of its two fibrations does not survive
    into any r >= 2 symmetric power because it moves the fixed projection.
    """
    n, r = int(n), int(r)
    if r < 2:
        raise InvalidSpecError("symmetric power needs r >= 2")
    descriptor = BundleDescriptor.coerce(descriptor)
    descriptor.validate(n)
    kernel = _fiber_aut_atom(n, descriptor)
    return GroupDescriptor.of(Extension(kernel, PGL(n + 1), H_CONDITION))
