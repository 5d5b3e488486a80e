"""Exact sparse polynomial arithmetic in the variables t, u1, ..., ur.

A monomial is an exponent tuple (e0, e1, ..., er): position 0 holds the
t-exponent and position i the ui-exponent. Coefficients are plain Python
ints, so nothing overflows; powers such as (a*t + b1*u1 + b2*u2)^(n+1)
produce multinomial coefficients well past 64 bits. Polynomials are
immutable after construction and every operation is a pure function, so
values can be shared freely between threads.
"""

from __future__ import annotations

from .errors import ExpressionError

__all__ = [
    "Poly",
    "parse_expr",
    "format_poly",
    "format_class_vector",
    "homogenize",
    "monomial_degree",
    "monomial_key",
    "deglex_key",
]


def monomial_degree(mono):
    return sum(mono)


def monomial_key(mono):
    """Canonical monomial order: lexicographic with ur > ... > u1 > t."""
    return tuple(reversed(mono))


def deglex_key(mono):
    """Output order: total degree first, canonical order inside a degree."""
    return (sum(mono), tuple(reversed(mono)))


class Poly:
    """Sparse integer polynomial in t, u1, ..., ur (nvars = r + 1 slots).

    ``terms`` maps exponent tuples to nonzero int coefficients. Zero is the
    empty map. Arithmetic accepts ints and coerces them to constants;
    mixing polynomials with different ``nvars`` raises ``ValueError``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        nvars = int(nvars)
        if nvars < 1:
            raise ValueError("need at least the variable t")
        table = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in monomial {mono}")
            coeff = int(coeff)
            if coeff:
                table[mono] = table.get(mono, 0) + coeff
                if not table[mono]:
                    del table[mono]
        self.nvars = nvars
        self.terms = table

    @classmethod
    def _raw(cls, nvars, terms):
        # internal: terms already validated and zero-free
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(int(nvars), {})

    @classmethod
    def constant(cls, value, nvars):
        value = int(value)
        if not value:
            return cls.zero(nvars)
        return cls._raw(int(nvars), {(0,) * int(nvars): value})

    @classmethod
    def one(cls, nvars):
        return cls.constant(1, nvars)

    @classmethod
    def variable(cls, index, nvars):
        nvars = int(nvars)
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} variables")
        mono = tuple(1 if j == index else 0 for j in range(nvars))
        return cls._raw(nvars, {mono: 1})

    @classmethod
    def linear(cls, coeffs):
        """Degree-one form sum(coeffs[j] * variable j)."""
        coeffs = [int(c) for c in coeffs]
        nvars = len(coeffs)
        terms = {}
        for j, c in enumerate(coeffs):
            if c:
                terms[tuple(1 if k == j else 0 for k in range(nvars))] = c
        return cls._raw(nvars, terms)

    # -- queries ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; 0 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=0)

    def is_homogeneous(self):
        return len({sum(m) for m in self.terms}) <= 1

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), 0)

    def sorted_terms(self, reverse=False):
        return sorted(self.terms.items(), key=lambda kv: deglex_key(kv[0]), reverse=reverse)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, int):
            return Poly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            s = terms.get(mono, 0) + c
            if s:
                terms[mono] = s
            else:
                del terms[mono]
        return Poly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        e = int(exponent)
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.nvars)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.constant(other, self.nvars)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    # -- substitution ----------------------------------------------------

    def substitute_linear(self, matrix):
        """Replace variable j by sum_k matrix[j][k] * variable k.

        The matrix must be square of the ambient size.  Composition obeys
        substitute_linear(substitute_linear(p, M), N) ==
        substitute_linear(p, M @ N).
        """
        rows = [[int(x) for x in row] for row in matrix]
        if len(rows) != self.nvars or any(len(r) != self.nvars for r in rows):
            raise ValueError("substitution matrix must be square of the ambient size")
        images = [Poly.linear(row) for row in rows]
        caches = [{0: Poly.one(self.nvars)} for _ in range(self.nvars)]

        def var_power(j, e):
            cache = caches[j]
            if e not in cache:
                cache[e] = images[j] ** e
            return cache[e]

        total = Poly.zero(self.nvars)
        for mono, coeff in self.terms.items():
            piece = Poly.constant(coeff, self.nvars)
            for j, e in enumerate(mono):
                if e:
                    piece = piece * var_power(j, e)
            total = total + piece
        return total


def homogenize(p, degree, variable=0):
    """Pad every term of ``p`` with powers of the given variable (t by
    default) so the result is homogeneous of the requested degree."""
    degree = int(degree)
    terms = {}
    for mono, c in p.terms.items():
        d = sum(mono)
        if d > degree:
            raise ValueError(f"term of degree {d} cannot be homogenized to degree {degree}")
        new = list(mono)
        new[variable] += degree - d
        new = tuple(new)
        terms[new] = terms.get(new, 0) + c
    return Poly(p.nvars, terms)


# ---------------------------------------------------------------------------
# Expression grammar, shared with the CLI:
#   expr   := ['+'|'-'] term (('+'|'-') term)*
#   term   := factor ('*' factor)*
#   factor := atom ('^' nat)?
#   atom   := int | 't' | 'u'<nat> | '(' expr ')'
# Variable names are case-insensitive; 't' is position 0 and 'u1' position 1.
# ---------------------------------------------------------------------------


def _tokenize(text):
    tokens = []
    i, nchars = 0, len(text)
    while i < nchars:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < nchars and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j])))
            i = j
            continue
        low = ch.lower()
        if low == "t":
            tokens.append(("var", 0))
            i += 1
            continue
        if low == "u":
            j = i + 1
            while j < nchars and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ExpressionError("'u' must carry an index, e.g. u1")
            index = int(text[i + 1 : j])
            if index < 1:
                raise ExpressionError("u-indices start at 1")
            tokens.append(("var", index))
            i = j
            continue
        if ch in "+-*^()":
            tokens.append((ch, None))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r} in {text!r}")
    return tokens


class _Parser:
    def __init__(self, tokens, nvars):
        self.tokens = tokens
        self.pos = 0
        self.nvars = nvars

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        total = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            nxt = self.term()
            total = total + nxt if op == "+" else total - nxt
        return total

    def term(self):
        total = self.factor()
        while self.peek() == "*":
            self.take()
            total = total * self.factor()
        return total

    def factor(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            kind, value = self.take() if self.pos < len(self.tokens) else (None, None)
            if kind != "int":
                raise ExpressionError("'^' must be followed by a non-negative integer")
            return base ** value
        return base

    def atom(self):
        if self.peek() is None:
            raise ExpressionError("unexpected end of expression")
        kind, value = self.take()
        if kind == "int":
            return Poly.constant(value, self.nvars)
        if kind == "var":
            if value >= self.nvars:
                raise ExpressionError(f"variable u{value} not available (only {self.nvars - 1} u-variables)")
            return Poly.variable(value, self.nvars)
        if kind == "(":
            inner = self.expr()
            if self.peek() != ")":
                raise ExpressionError("missing closing parenthesis")
            self.take()
            return inner
        raise ExpressionError(f"unexpected token {kind!r}")


def parse_expr(text, nvars=None):
    """Parse an expression into a Poly.

    When ``nvars`` is None it is inferred as 1 + the largest u-index
    occurring in the text (so a t-only expression gets one slot).
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionError("empty expression")
    if nvars is None:
        nvars = 1 + max((v for k, v in tokens if k == "var"), default=0)
    parser = _Parser(tokens, int(nvars))
    poly = parser.expr()
    if parser.pos != len(tokens):
        raise ExpressionError(f"trailing input starting at token {parser.pos}")
    return poly


def _format_monomial(mono):
    parts = []
    for i in range(1, len(mono)):
        e = mono[i]
        if e == 1:
            parts.append(f"u{i}")
        elif e > 1:
            parts.append(f"u{i}^{e}")
    e = mono[0]
    if e == 1:
        parts.append("t")
    elif e > 1:
        parts.append(f"t^{e}")
    return "*".join(parts)


def _join_signed(pieces):
    out = []
    for coeff, body in pieces:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        if body:
            core = body if mag == 1 else f"{mag}*{body}"
        else:
            core = str(mag)
        if not out:
            out.append(core if sign == "+" else "-" + core)
        else:
            out.append(sign + core)
    return "".join(out)


def format_poly(p):
    """Render in the expression grammar; highest degree first, canonical
    order inside a degree. Round-trips through parse_expr."""
    if p.is_zero():
        return "0"
    pieces = [(c, _format_monomial(m)) for m, c in p.sorted_terms(reverse=True)]
    return _join_signed(pieces)


def format_class_vector(coeffs):
    """Render a degree-one class (a, b1, ..., br) as a*t + b1*u1 + ...,
    with the t-term first the way such classes are usually written."""
    pieces = []
    if coeffs[0]:
        pieces.append((coeffs[0], "t"))
    for i, c in enumerate(coeffs[1:], start=1):
        if c:
            pieces.append((c, f"u{i}"))
    if not pieces:
        return "0"
    return _join_signed(pieces)
