"""The x-derivative D_x and x-average S_x, their compositions and identities.

The computational path expands the argument over cached monomial images
D_x z^n and S_x z^n, which are built by the coupled product-rule
recurrences

    D_x z^n = S_x z^(n-1) + (S_x z) D_x z^(n-1)
    S_x z^n = U2 D_x z^(n-1) + (S_x z) S_x z^(n-1)

seeded with D_x z = 1 and the degree-one average S_x z.  These involve
no divided differences of evaluations, so they stay numerically stable
on lattices whose nodes spread exponentially.

A second, fully independent route (`dx_interp`, `sx_interp`) evaluates
the argument at x(s +- 1/2) over interpolation nodes and interpolates
the result back into the monomial basis; the test suite cross-checks
both routes on exact rationals, alongside the printed top coefficients
of D_x z^n and S_x z^n (`monomial_action`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .lattice import Lattice, LatticeError
from .polynomials import Polynomial, interpolate

HALF = Fraction(1, 2)


def _dd_nodes(lat: Lattice, m: int) -> List[tuple]:
    """m nodes (z, z_plus, z_minus) with a nonzero divided-difference step."""
    out = []
    budget = 4 * m + 8
    for s, z in lat.node_stream():
        zp = lat.x(s + HALF)
        zm = lat.x(s - HALF)
        if (zp - zm) != 0:
            out.append((z, zp, zm))
            if len(out) == m:
                return out
        if s > budget:
            break
    raise LatticeError(f"could not find {m} usable operator nodes on {lat!r}")


def dx_interp(lat: Lattice, f: Polynomial) -> Polynomial:
    """D_x f computed by divided differences over lattice nodes.

    Independent of the recurrence-built monomial images; used as a
    cross-check oracle (prefer `dx` for real work, it is stabler).
    """
    if f.degree <= 0:
        return Polynomial.zero(lat.field)
    if lat.is_constant:
        return f.derivative()
    pts = []
    for z, zp, zm in _dd_nodes(lat, f.degree):
        pts.append((z, (f(zp) - f(zm)) / (zp - zm)))
    return interpolate(lat.field, pts)


def sx_interp(lat: Lattice, f: Polynomial) -> Polynomial:
    if f.degree <= 0 or lat.is_constant:
        return f
    pts = []
    for z, zp, zm in _dd_nodes(lat, f.degree + 1):
        pts.append((z, (f(zp) + f(zm)) / 2))
    return interpolate(lat.field, pts)


def _monomial_cache(lat: Lattice) -> dict:
    cache = getattr(lat, "_monomial_images", None)
    if cache is None:
        field = lat.field
        if lat.is_q_lattice:
            alpha = lat.constants.alpha
            sz = Polynomial(field, ((field.one - alpha) * lat.c[2], alpha))
        else:
            sz = Polynomial(field, (lat.constants.beta, field.one))
        cache = {
            "dx": [Polynomial.zero(field), Polynomial.one(field)],
            "sx": [Polynomial.one(field), sz],
            "sz": sz,
            "u2": lat.u2(),
        }
        lat._monomial_images = cache
    return cache


def _grow_monomial_images(lat: Lattice, n: int) -> dict:
    cache = _monomial_cache(lat)
    dximg, sximg = cache["dx"], cache["sx"]
    sz, u2 = cache["sz"], cache["u2"]
    while len(dximg) <= n:
        m = len(dximg)
        dximg.append(sximg[m - 1] + sz * dximg[m - 1])
        sximg.append(u2 * dximg[m - 1] + sz * sximg[m - 1])
    return cache


def dx_monomial(lat: Lattice, n: int) -> Polynomial:
    """D_x z^n, cached per lattice (the moment transforms hit these hard)."""
    return _grow_monomial_images(lat, n)["dx"][n]


def sx_monomial(lat: Lattice, n: int) -> Polynomial:
    return _grow_monomial_images(lat, n)["sx"][n]


def dx(lat: Lattice, f: Polynomial) -> Polynomial:
    if f.degree <= 0:
        return Polynomial.zero(lat.field)
    if lat.is_constant:
        return f.derivative()
    out = Polynomial.zero(lat.field)
    for k in range(1, f.degree + 1):
        out = out + f.coeff(k) * dx_monomial(lat, k)
    return out


def sx(lat: Lattice, f: Polynomial) -> Polynomial:
    if f.degree <= 0 or lat.is_constant:
        return f
    out = Polynomial(lat.field, (f.coeff(0),))
    for k in range(1, f.degree + 1):
        out = out + f.coeff(k) * sx_monomial(lat, k)
    return out


def dx_power(lat: Lattice, f: Polynomial, n: int) -> Polynomial:
    for _ in range(n):
        f = dx(lat, f)
    return f


@dataclass
class MonomialAction:
    """Leading coefficients of D_x z^n and S_x z^n on a q-lattice."""

    n: int
    gamma_n: object
    u_n: object
    v_n: object
    alpha_n: object
    u_hat_n: object
    v_hat_n: object


def monomial_action(lat: Lattice, n: int) -> MonomialAction:
    if not lat.is_q_lattice:
        raise LatticeError("monomial_action closed forms require a q-lattice")
    if n < 0:
        raise ValueError("degree must be >= 0")
    field = lat.field
    con = lat.constants
    c1, c2, c3 = lat.c
    c1c2 = c1 * c2

    def g(k: int):
        return con.gamma_n(k) if k >= -1 else field.zero

    def a(k: int):
        return con.alpha_n(k) if k >= -1 else field.zero

    if n >= 1:
        u_n = (n * g(n - 1) - (n - 1) * g(n)) * c3
        u_hat = field(n) * (a(n - 1) - a(n)) * c3
    else:
        u_n = field.zero
        u_hat = field.zero
    if n >= 2:
        v_n = (n * g(n - 2) - (n - 2) * g(n)) * c1c2 + (
            field(n * (n - 1)) * g(n - 2)
            - field(2 * n * (n - 2)) * g(n - 1)
            + field((n - 1) * (n - 2)) * g(n)
        ) / 2 * (c3 * c3)
        v_hat = field(n) * (a(n - 2) - a(n)) * c1c2 + field(n * (n - 1)) * (
            con.alpha - field.one
        ) * a(n - 1) * (c3 * c3)
    else:
        v_n = field.zero
        v_hat = field.zero
    return MonomialAction(
        n=n,
        gamma_n=g(n),
        u_n=u_n,
        v_n=v_n,
        alpha_n=a(n),
        u_hat_n=u_hat,
        v_hat_n=v_hat,
    )


def tnk(lat: Lattice, f: Polynomial, n: int, k: int) -> Polynomial:
    """The Leibniz coefficient polynomials T_{n,k} f.

    T_{0,0} f = f and

        T_{n,k} f = S_x T_{n-1,k} f
                    - (gamma_{n-k}/alpha_{n-k}) U1 D_x T_{n-1,k} f
                    + (1/alpha_{n+1-k}) D_x T_{n-1,k-1} f,

    with T_{n,k} f = 0 whenever k < 0 or k > n.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    zero = Polynomial.zero(lat.field)
    if k < 0 or k > n:
        return zero
    con = lat.constants
    u1 = lat.u1()
    memo = {(0, 0): f}

    def rec(m: int, j: int) -> Polynomial:
        if j < 0 or j > m:
            return zero
        got = memo.get((m, j))
        if got is not None:
            return got
        prev_same = rec(m - 1, j)
        prev_down = rec(m - 1, j - 1)
        value = sx(lat, prev_same)
        value = value - (con.gamma_n(m - j) / con.alpha_n(m - j)) * (
            u1 * dx(lat, prev_same)
        )
        value = value + (lat.field.one / con.alpha_n(m + 1 - j)) * dx(lat, prev_down)
        memo[(m, j)] = value
        return value

    return rec(n, k)


OPERATOR_IDENTITIES = ("product_dx", "product_sx", "swap_sx", "swap_dx", "dxn_sx")


@dataclass
class IdentityReport:
    identity: str
    residual: float
    passed: bool
    detail: Optional[str] = None

    def to_json(self):
        out = {"identity": self.identity, "residual": self.residual, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


def _identity_lhs_rhs(lat: Lattice, identity: str, f: Polynomial,
                      g: Optional[Polynomial], n: Optional[int]):
    field = lat.field
    alpha = lat.constants.alpha
    inv_alpha = field.one / alpha
    u1 = lat.u1()
    u2 = lat.u2()
    if identity == "product_dx":
        return dx(lat, f * g), dx(lat, f) * sx(lat, g) + sx(lat, f) * dx(lat, g)
    if identity == "product_sx":
        return sx(lat, f * g), dx(lat, f) * dx(lat, g) * u2 + sx(lat, f) * sx(lat, g)
    if identity == "swap_sx":
        lhs = f * sx(lat, g)
        inner = (sx(lat, f) - inv_alpha * (u1 * dx(lat, f))) * g
        rhs = sx(lat, inner) - inv_alpha * (u2 * dx(lat, g * dx(lat, f)))
        return lhs, rhs
    if identity == "swap_dx":
        lhs = f * dx(lat, g)
        inner = (sx(lat, f) - inv_alpha * (u1 * dx(lat, f))) * g
        rhs = dx(lat, inner) - inv_alpha * sx(lat, g * dx(lat, f))
        return lhs, rhs
    if identity == "dxn_sx":
        if n is None:
            raise ValueError("dxn_sx needs the composition order n")
        con = lat.constants
        lhs = dx_power(lat, sx(lat, f), n)
        rhs = con.alpha_n(n) * sx(lat, dx_power(lat, f, n)) + con.gamma_n(n) * (
            u1 * dx_power(lat, f, n + 1)
        )
        return lhs, rhs
    raise ValueError(f"unknown operator identity {identity!r}")


def verify_operator_identity(lat: Lattice, identity: str, f: Polynomial,
                             g: Optional[Polynomial] = None,
                             n: Optional[int] = None) -> IdentityReport:
    """Max |coefficient| of LHS - RHS for one printed operator identity."""
    if identity in ("product_dx", "product_sx", "swap_sx", "swap_dx") and g is None:
        raise ValueError(f"{identity} needs a second polynomial")
    lhs, rhs = _identity_lhs_rhs(lat, identity, f, g, n)
    diff = lhs - rhs
    residual = diff.max_abs_coeff()
    field = lat.field
    if field.name == "exact":
        passed = diff.is_zero
    else:
        scale = max(1.0, lhs.max_abs_coeff(), rhs.max_abs_coeff())
        passed = residual <= field.magnitude(field.eps) * scale
    return IdentityReport(identity=identity, residual=residual, passed=passed)
