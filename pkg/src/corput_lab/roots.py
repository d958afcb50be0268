"""Real root isolation for univariate polynomials.

Roots on a finite interval are bracketed with a Sturm sequence and refined
by sign-change bisection; multiplicities come from square-free layers
obtained by repeated GCD.  Coefficients are doubles, so remainder chains
drop coefficients below a relative tolerance tied to the leading magnitude.
"""

from __future__ import annotations

import math

from .poly import Polynomial1D

COEFF_DROP_REL = 1e-12
ROOT_WIDTH_REL = 1e-12


def _trim(coeffs: list[float], tol: float) -> list[float]:
    cs = list(coeffs)
    while len(cs) > 1 and abs(cs[-1]) <= tol:
        cs.pop()
    if not cs or all(abs(c) <= tol for c in cs):
        cs = [0.0]
    return cs


def poly_divmod(u: list[float], v: list[float]) -> tuple[list[float], list[float]]:
    """Long division of coefficient lists (ascending powers); v must be nonzero."""
    u = list(u)
    dv = len(v) - 1
    lead = v[-1]
    if lead == 0.0:
        raise ZeroDivisionError("division by zero polynomial")
    if len(u) - 1 < dv:
        return [0.0], u
    q = [0.0] * (len(u) - dv)
    for i in range(len(u) - 1, dv - 1, -1):
        c = u[i] / lead
        q[i - dv] = c
        if c:
            for j in range(dv + 1):
                u[i - dv + j] -= c * v[j]
    return q, u[:dv]


def poly_gcd(a: Polynomial1D, b: Polynomial1D) -> Polynomial1D:
    """Euclidean GCD with relative coefficient-drop tolerance; monic result.

    Every remainder is rescaled to unit max-coefficient before the next
    division, so the zero test stays relative to the current frame; without
    this, geometrically decaying remainders of coprime inputs get trimmed
    into a spurious nontrivial divisor.
    """

    def normalized(cs: list[float]) -> list[float]:
        m = max(abs(c) for c in cs)
        if m == 0.0:
            return [0.0]
        cs = [c / m for c in cs]
        # a near-degenerate leading coefficient makes the next division
        # meaningless; trim it at a looser threshold than the zero test
        while len(cs) > 1 and abs(cs[-1]) <= 1e-10:
            cs.pop()
        return _trim(cs, COEFF_DROP_REL)

    u = normalized(list(a.coeffs))
    v = normalized(list(b.coeffs))
    while v != [0.0]:
        _, r = poly_divmod(u, v)
        rscale = max((abs(c) for c in r), default=0.0)
        if rscale > 1e8:
            # backward error blew up: the inputs are numerically coprime
            return Polynomial1D((1.0,))
        if rscale <= COEFF_DROP_REL:
            r = [0.0]
        else:
            r = normalized(r)
        u, v = v, r
    lead = u[-1]
    return Polynomial1D(tuple(c / lead for c in u)) if lead else Polynomial1D.zero()


def square_free_layers(p: Polynomial1D) -> list[Polynomial1D]:
    """Square-free parts [q1, q2, ...]: a root of multiplicity m divides q1..qm."""
    layers: list[Polynomial1D] = []
    g = p
    while g.degree() > 0:
        g1 = poly_gcd(g, g.derivative())
        q, _ = poly_divmod(list(g.coeffs), list(g1.coeffs))
        layers.append(Polynomial1D(tuple(q)))
        if g1.degree() == 0:
            break
        g = g1
    return layers


def _sturm_chain(p: Polynomial1D) -> list[list[float]]:
    chain = [list(p.coeffs), list(p.derivative().coeffs)]
    while True:
        prev, cur = chain[-2], chain[-1]
        scale = max(abs(c) for c in cur)
        if scale == 0.0 or (len(cur) == 1 and cur[0] == 0.0):
            chain.pop()
            break
        if len(cur) == 1:
            break
        _, r = poly_divmod(prev, cur)
        rscale = max((abs(c) for c in r), default=0.0)
        if rscale <= COEFF_DROP_REL * scale:
            break
        # normalize to keep magnitudes tame, and drop near-degenerate
        # leading coefficients that would poison the next division
        r = [-c / rscale for c in r]
        while len(r) > 1 and abs(r[-1]) <= 1e-10:
            r.pop()
        if len(r) == 1 and abs(r[0]) <= 1e-10:
            break
        chain.append(r)
    return chain


def _eval(cs: list[float], t: float) -> float:
    acc = 0.0
    for c in reversed(cs):
        acc = acc * t + c
    return acc


def _variations(chain: list[list[float]], t: float) -> int:
    signs = []
    for cs in chain:
        v = _eval(cs, t)
        if v != 0.0:
            signs.append(1 if v > 0 else -1)
    count = 0
    for a, b in zip(signs, signs[1:]):
        if a != b:
            count += 1
    return count


def _bisect_root(p: Polynomial1D, lo: float, hi: float, width: float) -> float:
    flo = p.eval(lo)
    if flo == 0.0:
        return lo
    fhi = p.eval(hi)
    if fhi == 0.0:
        return hi
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = p.eval(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) != (fm < 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _simple_roots(p: Polynomial1D, a: float, b: float, width: float) -> list[float]:
    """Roots of a square-free polynomial in [a, b], each localized to ``width``."""
    deg = p.degree()
    if deg == 0:
        return []
    if deg == 1:
        c0, c1 = p.coeffs
        r = -c0 / c1
        return [r] if a - width <= r <= b + width else []
    if deg == 2:
        c0, c1, c2 = p.coeffs
        disc = c1 * c1 - 4.0 * c0 * c2
        scale = max(abs(c1 * c1), abs(4.0 * c0 * c2), 1e-300)
        if disc < 0.0 and abs(disc) > 4.0 * COEFF_DROP_REL * scale:
            return []
        if disc <= 0.0:
            roots = [-c1 / (2.0 * c2)]
        else:
            sq = math.sqrt(disc)
            q = -0.5 * (c1 + math.copysign(sq, c1))
            r1 = q / c2
            r2 = c0 / q if q != 0.0 else -c1 / (2.0 * c2)
            roots = sorted({r1, r2})
        return [r for r in roots if a - width <= r <= b + width]

    chain = _sturm_chain(p)
    # nudge probe points off exact roots of chain members
    span = max(b - a, 1.0)

    def var(t: float) -> int:
        probe = t
        for _ in range(60):
            if _eval(chain[0], probe) != 0.0:
                break
            probe += 1e-14 * span
        return _variations(chain, probe)

    def split_point(lo: float, hi: float) -> float:
        # the split must not sit on a root of p, or the subinterval
        # bookkeeping double-counts it
        mid = 0.5 * (lo + hi)
        step = (hi - lo) * 1e-3
        for _ in range(60):
            if p.eval(mid) != 0.0:
                break
            mid += step
        return mid

    out: list[float] = []
    stack = [(a, b, var(a), var(b))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        k = vlo - vhi
        if k <= 0:
            continue
        if k == 1 and (p.eval(lo) < 0) != (p.eval(hi) < 0) and p.eval(lo) != 0.0:
            out.append(_bisect_root(p, lo, hi, width))
            continue
        if hi - lo <= width:
            # variation count says root, sign test disagrees: only accept
            # when the residual is consistent with a root (guards against a
            # degraded chain inventing variations)
            mid = 0.5 * (lo + hi)
            local = max(abs(p.eval(lo)), abs(p.eval(hi)), abs(p.eval(mid)))
            coeff_scale = max(abs(c) for c in p.coeffs)
            if local <= 1e-7 * max(coeff_scale, 1.0):
                out.append(mid)
            continue
        mid = split_point(lo, hi)
        vm = var(mid)
        stack.append((lo, mid, vlo, vm))
        stack.append((mid, hi, vm, vhi))
    return sorted(out)


def real_roots(
    p: Polynomial1D, a: float, b: float, width: float | None = None
) -> list[tuple[float, int]]:
    """All real roots of ``p`` in [a, b] as sorted (root, multiplicity) pairs."""
    if p.is_zero:
        raise ValueError("root isolation needs a nonzero polynomial")
    if b < a:
        raise ValueError("empty interval")
    if p.degree() == 0:
        return []
    if width is None:
        width = ROOT_WIDTH_REL * max(1.0, abs(a), abs(b))
    layers = square_free_layers(p)
    if not layers:
        return []
    # enlarge by one localization width so endpoint roots sit inside
    base = _simple_roots(layers[0], a - width, b + width, width)
    out: list[tuple[float, int]] = []
    match_tol = max(10.0 * width, 1e-9 * max(1.0, abs(a), abs(b)))
    for r in base:
        mult = 1
        for layer in layers[1:]:
            if layer.degree() == 0:
                break
            deeper = _simple_roots(layer, r - match_tol, r + match_tol, width)
            if any(abs(x - r) <= match_tol for x in deeper):
                mult += 1
            else:
                break
        out.append((min(max(r, a), b), mult))
    return out


def real_roots_simple(p: Polynomial1D, a: float, b: float) -> list[float]:
    """Root locations only (no multiplicities); empty for constant p."""
    if p.is_zero or p.degree() == 0:
        return []
    layers = square_free_layers(p)
    width = ROOT_WIDTH_REL * max(1.0, abs(a), abs(b))
    roots = _simple_roots(layers[0], a - width, b + width, width)
    return [min(max(r, a), b) for r in roots]
