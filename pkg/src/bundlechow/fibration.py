"""Alternative fibration data inside a Chow presentation.

Three layers: enumeration of nilpotent degree-one classes (candidates for
pullbacks of hyperplane classes under maps to P^n), exact rational solving
for monic relations satisfied by a candidate basis, and a box search for
unimodular degree-one correspondences between two presentations.

Numerical caveats, also spelled out on the operations: nilpotency of a
degree-one class does not imply an actual fibration, and a unimodular ring
correspondence is necessary but not sufficient for the varieties to be
isomorphic. Box searches are exhaustive only within the box.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .chowring import BundleDescriptor, ChowPresentation, build_presentation
from .errors import InvalidSpecError
from .poly import Poly, deglex_key, format_class_vector

__all__ = [
    "DegreeOneClass",
    "nilpotent_degree_one_classes",
    "SecondFibration",
    "second_fibration_exists",
    "MonicForm",
    "FormSolve",
    "solve_monic_forms",
    "LemmaAlgReport",
    "lemma_alg_check",
    "HarnessSummary",
    "run_lemma_alg_harness",
    "random_unimodular",
    "chow_structure_search",
]

RING_SEARCH_NOTE = (
    "a unimodular ring correspondence is necessary but not sufficient for an "
    "isomorphism of the underlying varieties; absence within the box is "
    "evidence, not proof"
)


@dataclass(frozen=True)
class DegreeOneClass:
    """The class a*t + b1*u1 + ... + br*ur, stored primitive with the first
    nonzero coefficient positive."""

    coeffs: tuple

    def __post_init__(self):
        if not any(self.coeffs):
            raise ValueError("the zero class is not a degree-one class")
        if math.gcd(*self.coeffs) != 1:
            raise ValueError(f"{self.coeffs} is not primitive")
        if next(c for c in self.coeffs if c) < 0:
            raise ValueError(f"{self.coeffs} is not sign-canonical")

    @classmethod
    def canonical(cls, coeffs):
        """Divide out the gcd and fix the sign."""
        vec = [int(c) for c in coeffs]
        if not any(vec):
            raise ValueError("the zero class is not a degree-one class")
        g = math.gcd(*vec)
        vec = [c // g for c in vec]
        if next(c for c in vec if c) < 0:
            vec = [-c for c in vec]
        return cls(tuple(vec))

    def as_poly(self):
        return Poly.linear(self.coeffs)

    def expression(self):
        return format_class_vector(self.coeffs)


def _vector_of(value):
    if isinstance(value, DegreeOneClass):
        return tuple(value.coeffs)
    return tuple(int(c) for c in value)


def nilpotent_degree_one_classes(presentation, bound):
    """All primitive sign-canonical classes with coefficients in
    [-bound, bound] whose (n+1)-st power reduces to zero.

    Always contains t. Exhaustive within the box only. Nilpotency is a
    numerical condition: it does not certify a second fibration.
    """
    bound = int(bound)
    if bound < 1:
        raise InvalidSpecError("bound must be >= 1")
    n = presentation.n
    found = []
    for vec in itertools.product(range(-bound, bound + 1), repeat=presentation.nvars):
        if not any(vec):
            continue
        first = next(c for c in vec if c)
        if first < 0 or math.gcd(*vec) != 1:
            continue
        if presentation.reduce(Poly.linear(vec) ** (n + 1)).is_zero():
            found.append(DegreeOneClass(vec))
    found.sort(key=lambda c: c.coeffs)
    return found


@dataclass(frozen=True)
class SecondFibration:
    """Whether the bundle admits a projective-space fibration besides the
    structural one, decided at the descriptor level."""

    exists: bool
    case: int | None
    detail: str

    def to_json(self):
        return {"exists": self.exists, "case": self.case, "detail": self.detail}


def second_fibration_exists(n, factors):
    """Descriptor-level dichotomy: a second fibration exists iff either
    every factor is trivial up to a line-bundle twist (case 1), or exactly
    one factor is the tangent bundle and every other factor is trivial up
    to twist (case 2). Otherwise every isomorphism from or to this bundle
    lies over an automorphism of the base."""
    descs = [BundleDescriptor.coerce(f) for f in factors]
    if not descs:
        raise InvalidSpecError("need at least one factor")
    for d in descs:
        d.validate(n)
    tangents = [d for d in descs if d.kind == "tangent"]
    others_trivial = all(d.is_trivial_up_to_twist() for d in descs if d.kind != "tangent")
    if not tangents and others_trivial:
        return SecondFibration(True, 1, "every factor is trivial up to a line-bundle twist")
    if len(tangents) == 1 and others_trivial:
        return SecondFibration(True, 2, "one tangent factor, all other factors trivial up to twist")
    return SecondFibration(False, None, "no second fibration: isomorphisms are over the base")


@dataclass(frozen=True)
class MonicForm:
    """Monic homogeneous form Y^d + e1*Y^(d-1)*X + ... + ed*X^d with
    rational coefficients (coeffs[0] = 1)."""

    degree: int
    coeffs: tuple

    def __post_init__(self):
        if self.coeffs[0] != 1 or len(self.coeffs) != self.degree + 1:
            raise ValueError("monic form needs coefficients (1, e1, ..., ed)")

    def expression(self):
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            body = []
            if self.degree - j:
                body.append("y" if self.degree - j == 1 else f"y^{self.degree - j}")
            if j:
                body.append("x" if j == 1 else f"x^{j}")
            mono = "*".join(body) if body else "1"
            coeff = "" if c == 1 and body else f"{c}*" if body else str(c)
            parts.append(f"{coeff}{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def coefficient_strings(self):
        return [str(c) for c in self.coeffs]


@dataclass(frozen=True)
class FormSolve:
    """Either a full list of monic forms or the index where solving failed."""

    forms: tuple | None
    failed_index: int | None

    def __bool__(self):
        return self.forms is not None


def _solve_rational(columns, rhs):
    """Solve sum(x_j * columns[j]) == rhs exactly over the rationals.

    Columns and rhs are Polys read as coefficient vectors. Returns a list
    of Fractions with free variables pinned to 0, or None if inconsistent.
    """
    support = sorted(
        {m for col in columns for m in col.terms} | set(rhs.terms), key=deglex_key
    )
    ncols = len(columns)
    matrix = [
        [Fraction(col.terms.get(m, 0)) for col in columns] + [Fraction(rhs.terms.get(m, 0))]
        for m in support
    ]
    nrows = len(matrix)
    pivots = []
    row = 0
    for col in range(ncols):
        pivot = next((i for i in range(row, nrows) if matrix[i][col]), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        inv = matrix[row][col]
        matrix[row] = [x / inv for x in matrix[row]]
        for i in range(nrows):
            if i != row and matrix[i][col]:
                f = matrix[i][col]
                matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    for i in range(row, nrows):
        if matrix[i][ncols]:
            return None
    solution = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        solution[c] = matrix[r][ncols]
    return solution


def solve_monic_forms(presentation, x, ys, degrees):
    """For each yi, look for rational e1, ..., ed with
    yi^d + e1*yi^(d-1)*x + ... + ed*x^d = 0 in the presentation (one exact
    linear solve per yi, free coefficients pinned to 0).

    Returns all forms, or the index of the first yi without a solution.
    """
    ys = list(ys)
    degrees = [int(d) for d in degrees]
    if len(ys) != len(degrees):
        raise InvalidSpecError("one degree per y-class is required")
    xp = Poly.linear(_vector_of(x))
    if xp.nvars != presentation.nvars:
        raise InvalidSpecError("class length does not match the presentation")
    forms = []
    for index, (y, d) in enumerate(zip(ys, degrees)):
        if d < 2:
            raise InvalidSpecError("monic form degrees must be >= 2")
        yp = Poly.linear(_vector_of(y))
        columns = [presentation.reduce(yp ** (d - j) * xp**j) for j in range(1, d + 1)]
        rhs = -presentation.reduce(yp**d)
        solution = _solve_rational(columns, rhs)
        if solution is None:
            return FormSolve(None, index)
        forms.append(MonicForm(d, (Fraction(1), *solution)))
    return FormSolve(tuple(forms), None)


# ---------------------------------------------------------------------------
# The unimodular two-factor check: a 3x3 integer matrix with det +-1 maps
# (t, u1, u2) to (x, y1, y2); if x^(n+1) = 0, both yi admit monic quadratic
# relations over x, and the first row is centered against the averages of
# the gi-roots, then b1*b2 = 0. Any full-hypothesis instance with
# b1*b2 != 0 would be a counterexample; the harness looks for one.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaAlgReport:
    matrix: tuple
    n: int
    b1: int
    b2: int
    nilpotent: bool
    forms_found: bool
    centered: bool
    forms: tuple | None

    @property
    def hypotheses_hold(self):
        return self.nilpotent and self.forms_found and self.centered

    @property
    def b_product_zero(self):
        return self.b1 * self.b2 == 0

    @property
    def counterexample(self):
        return self.hypotheses_hold and not self.b_product_zero

    def to_json(self):
        return {
            "matrix": [list(row) for row in self.matrix],
            "n": self.n,
            "b1": self.b1,
            "b2": self.b2,
            "nilpotent": self.nilpotent,
            "forms_found": self.forms_found,
            "centered": self.centered,
            "hypotheses_hold": self.hypotheses_hold,
            "b_product_zero": self.b_product_zero,
            "counterexample": self.counterexample,
            "forms": None
            if self.forms is None
            else [f.coefficient_strings() for f in self.forms],
        }


def _det(matrix):
    if len(matrix) == 1:
        return matrix[0][0]
    total = 0
    for j, head in enumerate(matrix[0]):
        if not head:
            continue
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        total += (-1) ** j * head * _det(minor)
    return total


def _monic_quadratic_parts(g, var_index, nvars):
    """Validate a monic quadratic in one u-variable; return (linear, constant)."""
    if g.nvars != nvars:
        raise InvalidSpecError("quadratic has the wrong variable count")
    lead = [0] * nvars
    lead[var_index] = 2
    if g.coefficient(lead) != 1:
        raise InvalidSpecError(f"g{var_index} must be monic of degree 2 in u{var_index}")
    linear = [0] * nvars
    linear[var_index] = 1
    beta = g.coefficient(linear)
    gamma = g.coefficient([0] * nvars)
    expected = {tuple(lead): 1}
    if beta:
        expected[tuple(linear)] = beta
    if gamma:
        expected[tuple([0] * nvars)] = gamma
    if g.terms != expected:
        raise InvalidSpecError(f"g{var_index} may only involve u{var_index}")
    return beta, gamma


def _homogenized_quadratic(var_index, beta, gamma, nvars):
    terms = {}
    lead = [0] * nvars
    lead[var_index] = 2
    terms[tuple(lead)] = 1
    if beta:
        mid = [0] * nvars
        mid[var_index] = 1
        mid[0] = 1
        terms[tuple(mid)] = beta
    if gamma:
        low = [0] * nvars
        low[0] = 2
        terms[tuple(low)] = gamma
    return Poly(nvars, terms)


def lemma_alg_check(matrix, g1, g2, n):
    """Check one instance of the two-factor dichotomy.

    ``matrix`` is a 3x3 integer matrix with det +-1, ``g1``/``g2`` monic
    quadratics in u1/u2 (inhomogeneous; they are homogenized with t), and
    n >= 2. Builds Z[t,u1,u2]/(t^(n+1), G1, G2), reads off (x, y1, y2)
    from the matrix rows, and tests the three hypotheses:

      (i)   x^(n+1) reduces to 0,
      (ii)  both yi admit monic rational quadratics over x,
      (iii) the centering identity a + b1*a1 + b2*a2 = 0, where ai is the
            average of the roots of gi, computed exactly as -(linear)/2.

    Solving in (ii) is over the rationals, which is the testable weakening
    of solvability over an algebraically closed field: an instance without
    a rational solution certainly has no integral one. A report with all
    hypotheses satisfied and b1*b2 != 0 would be a counterexample to the
    dichotomy.
    """
    n = int(n)
    if n < 2:
        raise InvalidSpecError("the two-factor check needs base dimension n >= 2")
    rows = [tuple(int(x) for x in row) for row in matrix]
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise InvalidSpecError("matrix must be 3x3")
    if abs(_det([list(r) for r in rows])) != 1:
        raise InvalidSpecError("matrix must be unimodular (det +-1)")
    beta1, _ = _monic_quadratic_parts(g1, 1, 3)
    beta2, _ = _monic_quadratic_parts(g2, 2, 3)
    relations = [
        _homogenized_quadratic(1, *_monic_quadratic_parts(g1, 1, 3), 3),
        _homogenized_quadratic(2, *_monic_quadratic_parts(g2, 2, 3), 3),
    ]
    presentation = ChowPresentation(n, relations)
    a, b1, b2 = rows[0]
    x = Poly.linear(rows[0])
    nilpotent = presentation.reduce(x ** (n + 1)).is_zero()
    solve = solve_monic_forms(presentation, rows[0], [rows[1], rows[2]], [2, 2])
    alpha1 = Fraction(-beta1, 2)
    alpha2 = Fraction(-beta2, 2)
    centered = a + b1 * alpha1 + b2 * alpha2 == 0
    return LemmaAlgReport(
        matrix=tuple(rows),
        n=n,
        b1=b1,
        b2=b2,
        nilpotent=nilpotent,
        forms_found=bool(solve),
        centered=centered,
        forms=solve.forms,
    )


def _identity(size):
    return [[1 if i == j else 0 for j in range(size)] for i in range(size)]


def _inverse_unimodular_3x3(m):
    det = _det(m)
    assert abs(det) == 1
    cof = [
        [
            (-1) ** (i + j)
            * _det([[m[a][b] for b in range(3) if b != j] for a in range(3) if a != i])
            for j in range(3)
        ]
        for i in range(3)
    ]
    # adjugate transpose divided by det (+-1)
    return [[cof[j][i] * det for j in range(3)] for i in range(3)]


def complete_first_row(row):
    """Extend a primitive integer 3-vector to a 3x3 matrix with det +-1
    whose first row is that vector."""
    w = [int(x) for x in row]
    if len(w) != 3 or math.gcd(*w) != 1:
        raise ValueError("need a primitive integer 3-vector")
    u = _identity(3)
    # integer row reduction of w, mirrored on u, until w = (+-1, 0, 0)
    while sum(1 for x in w if x) > 1 or not w[0]:
        nz = [i for i, x in enumerate(w) if x]
        if len(nz) == 1:
            i = nz[0]
            w[0], w[i] = w[i], w[0]
            u[0], u[i] = u[i], u[0]
            continue
        i, j = sorted(nz[:2], key=lambda k: abs(w[k]), reverse=True)[:2]
        if abs(w[i]) < abs(w[j]):
            i, j = j, i
        q = w[i] // w[j]
        w[i] -= q * w[j]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]
    if w[0] < 0:
        w[0] = -w[0]
        u[0] = [-x for x in u[0]]
    inv = _inverse_unimodular_3x3(u)
    completed = [[inv[i][0], inv[i][1], inv[i][2]] for i in range(3)]
    # first column of inv is the original row; transpose it into row 0
    result = [[completed[j][i] for j in range(3)] for i in range(3)]
    assert result[0] == [int(x) for x in row]
    assert abs(_det(result)) == 1
    return result


def random_unimodular(rng, size=3, ops=8, max_step=2):
    """Random matrix with det +-1 built from elementary row operations."""
    m = _identity(size)
    for _ in range(ops):
        kind = rng.randrange(3)
        i, j = rng.sample(range(size), 2)
        if kind == 0:
            k = rng.randint(-max_step, max_step)
            m[i] = [a + k * b for a, b in zip(m[i], m[j])]
        elif kind == 1:
            m[i], m[j] = m[j], m[i]
        else:
            m[i] = [-a for a in m[i]]
    return m


def _random_monic_quadratic(rng, var_index, even_linear=False):
    beta = rng.randint(-4, 4)
    if even_linear:
        beta = 2 * rng.randint(-2, 2)
    gamma = rng.randint(-4, 4)
    return _inhomogeneous_quadratic(var_index, beta, gamma)


def _inhomogeneous_quadratic(var_index, beta, gamma):
    terms = {}
    lead = [0, 0, 0]
    lead[var_index] = 2
    terms[tuple(lead)] = 1
    if beta:
        mid = [0, 0, 0]
        mid[var_index] = 1
        terms[tuple(mid)] = beta
    if gamma:
        terms[(0, 0, 0)] = gamma
    return Poly(3, terms)


@dataclass(frozen=True)
class HarnessSummary:
    instances: int
    counterexamples: int
    seed: int
    centered_instances: int

    def to_json(self):
        return {
            "instances": self.instances,
            "counterexamples": self.counterexamples,
            "centered_instances": self.centered_instances,
            "seed": self.seed,
        }


def run_lemma_alg_harness(count, seed, base_dims=(2, 3)):
    """Run ``count`` random instances with b1*b2 != 0 and report how many
    violate the dichotomy (the expected answer is zero).

    Half the instances get a first row engineered to satisfy the centering
    identity, so hypothesis (iii) is genuinely exercised rather than
    failing by chance.
    """
    rng = random.Random(seed)
    counterexamples = 0
    centered_count = 0
    for k in range(int(count)):
        n = rng.choice(list(base_dims))
        if k % 2 == 0:
            g1 = _random_monic_quadratic(rng, 1, even_linear=True)
            g2 = _random_monic_quadratic(rng, 2, even_linear=True)
            beta1 = g1.coefficient((0, 1, 0))
            beta2 = g2.coefficient((0, 0, 1))
            b1 = rng.choice([c for c in range(-4, 5) if c])
            b2 = rng.choice([c for c in range(-4, 5) if c])
            a = b1 * beta1 // 2 + b2 * beta2 // 2
            g = math.gcd(a, b1, b2)
            first = [a // g, b1 // g, b2 // g]
            matrix = complete_first_row(first)
            lower = random_unimodular(rng, size=2, ops=5)
            mix = [
                [1, 0, 0],
                [rng.randint(-3, 3), lower[0][0], lower[0][1]],
                [rng.randint(-3, 3), lower[1][0], lower[1][1]],
            ]
            matrix = [
                [sum(mix[i][k2] * matrix[k2][j] for k2 in range(3)) for j in range(3)]
                for i in range(3)
            ]
        else:
            g1 = _random_monic_quadratic(rng, 1)
            g2 = _random_monic_quadratic(rng, 2)
            matrix = random_unimodular(rng, size=3, ops=10)
            while matrix[0][1] * matrix[0][2] == 0:
                matrix = random_unimodular(rng, size=3, ops=10)
        report = lemma_alg_check(matrix, g1, g2, n)
        if report.centered:
            centered_count += 1
        if report.counterexample:
            counterexamples += 1
    return HarnessSummary(int(count), counterexamples, int(seed), centered_count)


# ---------------------------------------------------------------------------
# Box search for unimodular degree-one correspondences between presentations.
# ---------------------------------------------------------------------------


def _entry_key(e):
    # 0 < 1 < -1 < 2 < -2 < ...
    return (abs(e), 0 if e >= 0 else 1)


def _matrix_key(rows):
    size = len(rows)
    flat = [e for row in rows for e in row]
    ident = [1 if i % (size + 1) == 0 else 0 for i in range(size * size)]
    distance = sum(abs(a - b) for a, b in zip(flat, ident))
    return (distance, tuple(_entry_key(e) for e in flat))


def _evaluate_bivariate(g, var_index, x_powers, y):
    """Value of g(t -> x, u_var -> y) given cached powers of x."""
    nvars = y.nvars
    y_powers = {0: Poly.one(nvars)}
    total = Poly.zero(nvars)
    for mono, c in g.terms.items():
        a, b = mono[0], mono[var_index]
        if b not in y_powers:
            y_powers[b] = y**b
        total = total + c * (x_powers[a] * y_powers[b])
    return total


def chow_structure_search(left, right, bound):
    """Search integer matrices with entries in [-bound, bound] and det +-1
    that map the generators of ``left`` into the ring of ``right`` so that
    every relation of ``left`` lands in the relation ideal of ``right``.

    Returns the first hit in canonical order (closest to the identity,
    ties broken entrywise with 0 < 1 < -1 < 2 < ...) or None. A hit
    certifies a graded ring isomorphism; see RING_SEARCH_NOTE for why that
    is weaker than an isomorphism of varieties, and None is only evidence
    within the box.
    """
    bound = int(bound)
    if bound < 1:
        raise InvalidSpecError("bound must be >= 1")
    if left.r != right.r or left.betti != right.betti:
        return None
    nvars = right.nvars
    box = [
        v
        for v in itertools.product(range(-bound, bound + 1), repeat=nvars)
        if any(v)
    ]
    max_rank = max(left.ranks)
    best = None
    best_key = None
    for row0 in box:
        x = Poly.linear(row0)
        if not right.reduce(x ** (left.n + 1)).is_zero():
            continue
        x_powers = [Poly.one(nvars)]
        for _ in range(max_rank):
            x_powers.append(x_powers[-1] * x)
        options = []
        feasible = True
        for i in range(1, left.nvars):
            g = left.relations[i]
            opts = [
                v
                for v in box
                if right.reduce(_evaluate_bivariate(g, i, x_powers, Poly.linear(v))).is_zero()
            ]
            if not opts:
                feasible = False
                break
            options.append(opts)
        if not feasible:
            continue
        for rest in itertools.product(*options):
            rows = (row0,) + rest
            if abs(_det([list(r) for r in rows])) != 1:
                continue
            key = _matrix_key(rows)
            if best_key is None or key < best_key:
                best, best_key = rows, key
    if best is None:
        return None
    return tuple(tuple(r) for r in best)
