"""Sparse multivariate polynomials and dense univariate polynomials.

Multivariate polynomials are stored as a mapping from exponent tuples to
real coefficients.  Univariate polynomials (line restrictions, density
pieces, phases) use a dense ascending-power coefficient tuple.  All values
are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]

_UNIT_NORM_TOL = 1e-12


def _binomial_row(base: float, step: float, j: int) -> np.ndarray:
    """Coefficients of (base + step*t)**j in ascending powers of t."""
    out = np.zeros(j + 1)
    for i in range(j + 1):
        out[i] = math.comb(j, i) * base ** (j - i) * step**i
    return out


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial on R^n; ``terms`` maps exponent tuples to coefficients.

    Zero coefficients are never stored.  The zero polynomial has an empty
    term map and total degree 0 by convention.
    """

    n: int
    terms: Mapping[Exponent, float]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        clean: dict[Exponent, float] = {}
        for exp, coeff in self.terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.n:
                raise ValueError(f"exponent {exp} has length != n={self.n}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = float(coeff)
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        clean = {e: c for e, c in clean.items() if c != 0.0}
        object.__setattr__(self, "terms", clean)

    # ---------------------------------------------------------------- basics

    @staticmethod
    def zero(n: int) -> "Polynomial":
        return Polynomial(n, {})

    @staticmethod
    def constant(n: int, c: float) -> "Polynomial":
        return Polynomial(n, {(0,) * n: c})

    @staticmethod
    def coordinate(n: int, k: int) -> "Polynomial":
        """The monomial x_{k+1} (0-based index k)."""
        e = [0] * n
        e[k] = 1
        return Polynomial(n, {tuple(e): 1.0})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree d(f); 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def individual_degree(self) -> int:
        if not self.terms:
            return 0
        return max(max(e) for e in self.terms)

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other: "Polynomial | float") -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, float(other))
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial | float") -> "Polynomial":
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, float(other))
        return self + (-other)

    def __mul__(self, other: "Polynomial | float") -> "Polynomial":
        if isinstance(other, (int, float)):
            return Polynomial(self.n, {e: c * other for e, c in self.terms.items()})
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out: dict[Exponent, float] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.n, out)

    __rmul__ = __mul__

    # ------------------------------------------------------------ evaluation

    def eval(self, x: Sequence[float]) -> float:
        """Exact monomial-sum evaluation with compensated summation."""
        if len(x) != self.n:
            raise ValueError(f"point has dimension {len(x)}, expected {self.n}")
        parts = []
        for e, c in self.terms.items():
            v = c
            for xi, ei in zip(x, e):
                if ei:
                    v *= xi**ei
            parts.append(v)
        return math.fsum(parts)

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (N, n) array of points."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.n:
            raise ValueError(f"expected (N, {self.n}) array, got {points.shape}")
        out = np.zeros(points.shape[0])
        for e, c in self.terms.items():
            term = np.full(points.shape[0], c)
            for k, ek in enumerate(e):
                if ek:
                    term *= points[:, k] ** ek
            out += term
        return out

    # ------------------------------------------------------------- calculus

    def partial(self, k: int) -> "Polynomial":
        """Partial derivative with respect to x_{k+1}."""
        out: dict[Exponent, float] = {}
        for e, c in self.terms.items():
            if e[k] == 0:
                continue
            d = list(e)
            d[k] -= 1
            de = tuple(d)
            out[de] = out.get(de, 0.0) + c * e[k]
        return Polynomial(self.n, out)

    def derive(self, alpha: Sequence[int]) -> "Polynomial":
        """Iterated partial derivative for a multi-index ``alpha``."""
        if len(alpha) != self.n:
            raise ValueError("multi-index dimension mismatch")
        if any(a < 0 for a in alpha):
            raise ValueError("multi-index must be componentwise >= 0")
        out = self
        for k, a in enumerate(alpha):
            for _ in range(a):
                out = out.partial(k)
        return out

    def gradient(self) -> list["Polynomial"]:
        return [self.partial(k) for k in range(self.n)]

    def directional_derivative(self, theta: Sequence[float]) -> "Polynomial":
        """d/dt f(x + t*theta) at t=0 for a unit vector theta."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n,):
            raise ValueError("direction dimension mismatch")
        norm = float(np.linalg.norm(theta))
        if abs(norm - 1.0) > _UNIT_NORM_TOL:
            raise ValueError(f"direction must be a unit vector, |theta| = {norm!r}")
        out = Polynomial.zero(self.n)
        for k in range(self.n):
            if theta[k]:
                out = out + self.partial(k) * float(theta[k])
        return out

    def restrict_line(self, y: Sequence[float], theta: Sequence[float]) -> "Polynomial1D":
        """Univariate restriction t -> f(y + t*theta) for unit ``theta``."""
        y = np.asarray(y, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if y.shape != (self.n,) or theta.shape != (self.n,):
            raise ValueError("base point / direction dimension mismatch")
        norm = float(np.linalg.norm(theta))
        if abs(norm - 1.0) > _UNIT_NORM_TOL:
            raise ValueError(f"direction must be a unit vector, |theta| = {norm!r}")
        deg = self.degree()
        acc = np.zeros(deg + 1)
        for e, c in self.terms.items():
            row = np.array([c])
            for k, ek in enumerate(e):
                if ek:
                    row = np.convolve(row, _binomial_row(y[k], theta[k], ek))
            acc[: row.size] += row
        return Polynomial1D(tuple(acc))

    # ----------------------------------------------------- degree invariants

    def leading_data(self) -> tuple[int, float, float]:
        """(d(f), [f]_2, [f]_inf) computed from the top-total-degree terms."""
        if not self.terms:
            raise ValueError("leading data undefined for the zero polynomial")
        d = self.degree()
        top = [c for e, c in self.terms.items() if sum(e) == d]
        l2 = math.sqrt(math.fsum(c * c for c in top))
        linf = max(abs(c) for c in top)
        return d, l2, linf

    # ------------------------------------------------------------- rescaling

    def box_rescale(self, boxes: Sequence[tuple[float, float]]) -> "Polynomial":
        """Pull back onto the unit cube: g(y) = f(L y), L_k(y) = (a_k+b_k)/2 + y_k (b_k-a_k).

        Maps Q^n = [-1/2, 1/2]^n onto the product of the given intervals.
        """
        if len(boxes) != self.n:
            raise ValueError("need one interval per coordinate")
        centers, widths = [], []
        for a, b in boxes:
            if not b > a:
                raise ValueError(f"degenerate interval [{a}, {b}]")
            centers.append((a + b) / 2.0)
            widths.append(b - a)
        out: dict[Exponent, float] = {}
        for e, c in self.terms.items():
            rows = [_binomial_row(centers[k], widths[k], ek) for k, ek in enumerate(e)]
            for combo in itertools.product(*(range(len(r)) for r in rows)):
                coeff = c
                for r, i in zip(rows, combo):
                    coeff *= r[i]
                if coeff:
                    out[combo] = out.get(combo, 0.0) + coeff
        return Polynomial(self.n, out)

    # ------------------------------------------------------------ cube moments

    def cube_moment(self) -> float:
        """Exact integral over Q^n = [-1/2, 1/2]^n via per-coordinate moments."""
        parts = []
        for e, c in self.terms.items():
            v = c
            for j in e:
                if j % 2 == 1:
                    v = 0.0
                    break
                v *= (0.5**j) / (j + 1)
            parts.append(v)
        return math.fsum(parts)

    def cube_variance(self) -> float:
        """Exact variance over Q^n; clamps roundoff to keep the result >= 0."""
        m2 = (self * self).cube_moment()
        m1 = self.cube_moment()
        var = m2 - m1 * m1
        if var < 0.0:
            if var < -1e-12 * max(1.0, abs(m2)):
                raise ArithmeticError(f"variance computed as {var}")
            var = 0.0
        return var

    # ------------------------------------------------------------ text format

    def to_text(self) -> str:
        """Canonical text form: graded-lex term order, monomials like 3*x1^2*x2."""
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
        chunks: list[str] = []
        for e in keys:
            c = self.terms[e]
            mono = "*".join(
                f"x{k + 1}" if ek == 1 else f"x{k + 1}^{ek}"
                for k, ek in enumerate(e)
                if ek
            )
            mag = abs(c)
            if not mono:
                body = repr(mag)
            elif mag == 1.0:
                body = mono
            else:
                body = f"{mag!r}*{mono}"
            if not chunks:
                chunks.append(body if c > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(chunks)

    @staticmethod
    def from_text(text: str, n: int | None = None) -> "Polynomial":
        return parse_polynomial(text, n=n)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_text()


_MONO_FACTOR = re.compile(r"^(?:x(\d+)|t)(?:\^(\d+))?$")


def parse_polynomial(text: str, n: int | None = None) -> Polynomial:
    """Parse the term-joined text format; ``t`` is accepted as an alias for x1.

    Whitespace is ignored.  The dimension is inferred from the largest
    variable index unless ``n`` is given.
    """
    src = text.replace(" ", "").replace("\t", "")
    if not src:
        raise ValueError("empty polynomial text")
    # split into signed monomial chunks
    chunks: list[str] = []
    start = 0
    for i, ch in enumerate(src):
        if ch in "+-" and i > 0 and src[i - 1] not in "eE+-*^":
            chunks.append(src[start:i])
            start = i
    chunks.append(src[start:])
    raw_terms: list[tuple[dict[int, int], float]] = []
    max_var = 0
    for chunk in chunks:
        if not chunk or chunk in "+-":
            raise ValueError(f"malformed term in {text!r}")
        sign = 1.0
        while chunk and chunk[0] in "+-":
            if chunk[0] == "-":
                sign = -sign
            chunk = chunk[1:]
        coeff = sign
        exps: dict[int, int] = {}
        for factor in chunk.split("*"):
            if not factor:
                raise ValueError(f"malformed factor in {text!r}")
            m = _MONO_FACTOR.match(factor)
            if m:
                var = int(m.group(1)) if m.group(1) else 1
                power = int(m.group(2)) if m.group(2) else 1
                if var < 1:
                    raise ValueError(f"bad variable index in {factor!r}")
                exps[var] = exps.get(var, 0) + power
                max_var = max(max_var, var)
            else:
                try:
                    coeff *= float(factor)
                except ValueError as exc:
                    raise ValueError(f"cannot parse factor {factor!r}") from exc
        raw_terms.append((exps, coeff))
    dim = n if n is not None else max(max_var, 1)
    if max_var > dim:
        raise ValueError(f"variable x{max_var} exceeds dimension {dim}")
    terms: dict[Exponent, float] = {}
    for exps, coeff in raw_terms:
        e = tuple(exps.get(k + 1, 0) for k in range(dim))
        terms[e] = terms.get(e, 0.0) + coeff
    return Polynomial(dim, terms)


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial1D:
    """Dense univariate polynomial, coefficients in ascending power order.

    Trailing zero coefficients are trimmed; the zero polynomial is ``(0.0,)``.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cs = [float(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0.0:
            cs.pop()
        if not cs:
            cs = [0.0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @staticmethod
    def zero() -> "Polynomial1D":
        return Polynomial1D((0.0,))

    @staticmethod
    def constant(c: float) -> "Polynomial1D":
        return Polynomial1D((float(c),))

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def leading(self) -> float:
        return self.coeffs[-1]

    # ------------------------------------------------------------ evaluation

    def eval(self, t: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def eval_many(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        acc = np.zeros_like(t)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    __call__ = eval

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other: "Polynomial1D | float") -> "Polynomial1D":
        if isinstance(other, (int, float)):
            cs = list(self.coeffs)
            cs[0] += float(other)
            return Polynomial1D(tuple(cs))
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return Polynomial1D(
            tuple(
                (a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
                for i in range(size)
            )
        )

    __radd__ = __add__

    def __neg__(self) -> "Polynomial1D":
        return Polynomial1D(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial1D | float") -> "Polynomial1D":
        if isinstance(other, (int, float)):
            return self + (-float(other))
        return self + (-other)

    def __mul__(self, other: "Polynomial1D | float") -> "Polynomial1D":
        if isinstance(other, (int, float)):
            return Polynomial1D(tuple(c * float(other) for c in self.coeffs))
        out = np.convolve(np.asarray(self.coeffs), np.asarray(other.coeffs))
        return Polynomial1D(tuple(out))

    __rmul__ = __mul__

    # -------------------------------------------------------------- calculus

    def derivative(self) -> "Polynomial1D":
        if len(self.coeffs) == 1:
            return Polynomial1D.zero()
        return Polynomial1D(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def antiderivative(self) -> "Polynomial1D":
        return Polynomial1D((0.0,) + tuple(c / (i + 1) for i, c in enumerate(self.coeffs)))

    def integral(self, a: float, b: float) -> float:
        anti = self.antiderivative()
        return anti.eval(b) - anti.eval(a)

    def compose_affine(self, c0: float, c1: float) -> "Polynomial1D":
        """p(c0 + c1*t) expanded in t."""
        acc = np.zeros(len(self.coeffs))
        for j, c in enumerate(self.coeffs):
            if c:
                acc[: j + 1] += c * _binomial_row(c0, c1, j)
        return Polynomial1D(tuple(acc))

    def shift_arg(self, h: float) -> "Polynomial1D":
        """p(t + h)."""
        return self.compose_affine(h, 1.0)

    # ----------------------------------------------------------- conversions

    def as_polynomial(self) -> Polynomial:
        return Polynomial(1, {(i,): c for i, c in enumerate(self.coeffs) if c})

    def to_text(self) -> str:
        return self.as_polynomial().to_text()

    @staticmethod
    def from_text(text: str) -> "Polynomial1D":
        p = parse_polynomial(text, n=1)
        cs = [0.0] * (p.degree() + 1)
        for e, c in p.terms.items():
            cs[e[0]] = c
        return Polynomial1D(tuple(cs))

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_text()
