"""Numerical Abelian integrals over real ovals around center singularities.

An extremum of F inside a bounded cell is surrounded by closed real level
curves {F = t} for t slightly past the critical value.  Such an oval is
traced by predictor-corrector marching (tangent step, Newton pullback onto
the level set) and then used as an integration cycle.

The logarithmic family

    w = F (sum_k lambda_k dR_k/R_k + lambda_{d+1} dQ/Q) + dG,
    sum_k lambda_k + (d+1) lambda_{d+1} = 0,  G meromorphic with poles on Q,

integrates to zero over every such oval: F is constant on the trace, each
dR_k/R_k contributes 2*pi*i times the winding of R_k around 0 (zero for a
real oval avoiding the line), and dG is exact.  The quadrature must find
this zero without knowing it; the winding oracle and the exactness of dF
and dG supply independent cross-checks, while generic polynomial 1-forms
provide nonvanishing controls.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .arrangement import Arrangement
from .critical import (
    KIND_CENTER_P,
    KIND_CENTER_Q,
    CriticalPoint,
    hessian_log_f,
)
from .errors import InvalidParameterError, PoleProximityError, TraceFailureError
from .jsonio import fmt_float, frac_str

TRACE_TOL = 1e-10
CLOSURE_TOL = 1e-8
QUAD_TOL = 1e-8
VANISH_TOL = 1e-6
CONTROL_TOL = 1e-3
LINE_CLEARANCE = 1e-6
DEFAULT_NODES = 512


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MONODROMY_LAB_THREADS", "1")))
    except ValueError:
        return 1


# --- polynomials and 1-forms -------------------------------------------------

class Poly2:
    """Sparse bivariate polynomial, sum of coeff * x^i * y^j."""

    def __init__(self, monomials: dict[tuple[int, int], object] | None = None):
        self.monomials = {k: v for k, v in (monomials or {}).items() if v != 0}

    def __bool__(self) -> bool:
        return bool(self.monomials)

    def eval(self, x, y):
        total = 0
        for (i, j), c in self.monomials.items():
            total = total + float(c) * x**i * y**j
        return total if self.monomials else np.zeros_like(np.asarray(x, dtype=float))

    def grad(self) -> tuple["Poly2", "Poly2"]:
        gx, gy = {}, {}
        for (i, j), c in self.monomials.items():
            if i > 0:
                gx[(i - 1, j)] = gx.get((i - 1, j), 0) + i * c
            if j > 0:
                gy[(i, j - 1)] = gy.get((i, j - 1), 0) + j * c
        return Poly2(gx), Poly2(gy)

    @classmethod
    def random(cls, rng: np.random.Generator, max_deg: int = 2,
               coeff_range: int = 3, nonzero: bool = True,
               min_deg: int = 0) -> "Poly2":
        mono = {}
        for i in range(max_deg + 1):
            for j in range(max_deg + 1 - i):
                if i + j < min_deg:
                    continue
                c = int(rng.integers(-coeff_range, coeff_range + 1))
                if c:
                    mono[(i, j)] = c
        if nonzero and not mono:
            mono[(1, 0)] = 1
        return cls(mono)

    def describe(self) -> list:
        return [[i, j, str(c)] for (i, j), c in sorted(self.monomials.items())]


class _LineData:
    """Float view of the family used by every form evaluation."""

    def __init__(self, arr: Arrangement):
        self.a = np.array([float(l.a) for l in arr.lines])
        self.b = np.array([float(l.b) for l in arr.lines])
        self.c = np.array([float(l.c) for l in arr.lines])
        self.p_mask = np.array([l.side == "P" for l in arr.lines])
        self.norms = np.hypot(self.a, self.b)
        self.d = arr.d

    def values(self, x, y):
        """Line values R_k at points; shape (lines, npoints)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return self.a[:, None] * x[None, :] + self.b[:, None] * y[None, :] + self.c[:, None]

    def f(self, x, y):
        r = self.values(x, y)
        return np.prod(r[self.p_mask], axis=0) / np.prod(r[~self.p_mask], axis=0)

    def grad_f(self, x, y):
        r = self.values(x, y)
        f = np.prod(r[self.p_mask], axis=0) / np.prod(r[~self.p_mask], axis=0)
        s = np.where(self.p_mask, 1.0, -1.0)
        gx = ((s / r.T).T * self.a[:, None]).sum(axis=0)
        gy = ((s / r.T).T * self.b[:, None]).sum(axis=0)
        return f * gx, f * gy

    def guard_clearance(self, x, y, clearance: float = LINE_CLEARANCE):
        r = np.abs(self.values(x, y)) / self.norms[:, None]
        if float(r.min()) < clearance:
            raise PoleProximityError(
                f"node within {clearance:g} of a line of the family"
            )


class LogFamilyForm:
    """The admissible logarithmic family; integrates to zero over real ovals.

    `lambdas` has length d+2; exact rationals keep the degree constraint
    sum(lambdas[:d+1]) + (d+1)*lambdas[d+1] == 0 machine-checkable.  The
    optional potential G = g/Q adds the exact part dG.
    """

    kind = "log_family"

    def __init__(self, arr: Arrangement, lambdas, g: Poly2 | None = None):
        self._ld = _LineData(arr)
        d = arr.d
        if len(lambdas) != d + 2:
            raise InvalidParameterError(f"need {d + 2} coefficients, got {len(lambdas)}")
        self.lambdas = tuple(lambdas)
        self.g = g
        if all(isinstance(l, Fraction) for l in self.lambdas):
            residue = sum(self.lambdas[: d + 1], Fraction(0)) + (d + 1) * self.lambdas[d + 1]
            exact = residue == 0
        else:
            residue = sum(complex(l) for l in self.lambdas[: d + 1]) \
                + (d + 1) * complex(self.lambdas[d + 1])
            exact = abs(residue) <= 1e-12
        if not exact:
            raise InvalidParameterError(f"coefficient constraint violated: residue {residue}")

    def _per_line_coeffs(self) -> np.ndarray:
        d = self._ld.d
        lam = [complex(l) for l in self.lambdas]
        return np.array([lam[k] if k <= d else lam[d + 1] for k in range(2 * d + 2)])

    def log_components(self, x, y):
        """The purely logarithmic part F * sum lambda dR/R, without dG."""
        ld = self._ld
        ld.guard_clearance(x, y)
        r = ld.values(x, y)
        f = np.prod(r[ld.p_mask], axis=0) / np.prod(r[~ld.p_mask], axis=0)
        w = self._per_line_coeffs()[:, None] / r
        return f * (w * ld.a[:, None]).sum(axis=0), f * (w * ld.b[:, None]).sum(axis=0)

    def components(self, x, y):
        ax, ay = self.log_components(x, y)
        if self.g:
            gx, gy = _grad_over_q(self._ld, self.g, 1, x, y)
            ax, ay = ax + gx, ay + gy
        return ax, ay

    def potential(self, x, y):
        """G = g/Q where defined; used to integrate the dG part exactly."""
        if not self.g:
            return np.zeros_like(np.asarray(x, dtype=float))
        r = self._ld.values(x, y)
        q = np.prod(r[~self._ld.p_mask], axis=0)
        return self.g.eval(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) / q

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "lambdas": [frac_str(l) if isinstance(l, Fraction) else str(l)
                        for l in self.lambdas],
            "g": self.g.describe() if self.g else None,
        }


def _grad_over_q(ld: _LineData, g: Poly2, power: int, x, y):
    """Gradient of g / Q^power via d(g/Q^m) = dg/Q^m - m (g/Q^m) dQ/Q."""
    r = ld.values(x, y)
    q = np.prod(r[~ld.p_mask], axis=0)
    gx_p, gy_p = g.grad()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    base = g.eval(x, y) / q**power
    dq_x = (ld.a[~ld.p_mask, None] / r[~ld.p_mask]).sum(axis=0)
    dq_y = (ld.b[~ld.p_mask, None] / r[~ld.p_mask]).sum(axis=0)
    return (gx_p.eval(x, y) / q**power - power * base * dq_x,
            gy_p.eval(x, y) / q**power - power * base * dq_y)


class ExactDifferential:
    """d(g / Q^power): closed and exact, so every closed integral vanishes."""

    kind = "exact"

    def __init__(self, arr: Arrangement, g: Poly2, power: int = 0):
        self._ld = _LineData(arr)
        self.g = g
        self.power = power

    def components(self, x, y):
        if self.power == 0:
            gx, gy = self.g.grad()
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            return gx.eval(x, y), gy.eval(x, y)
        self._ld.guard_clearance(x, y)
        return _grad_over_q(self._ld, self.g, self.power, x, y)

    def describe(self) -> dict:
        return {"kind": self.kind, "g": self.g.describe(), "power": self.power}


class FDifferential:
    """dF itself; vanishes over any closed trace inside a regular region."""

    kind = "dF"

    def __init__(self, arr: Arrangement):
        self._ld = _LineData(arr)

    def components(self, x, y):
        self._ld.guard_clearance(x, y)
        return self._ld.grad_f(x, y)

    def describe(self) -> dict:
        return {"kind": self.kind}


class PolynomialForm:
    """A dx + B dy with polynomial coefficients; the nonvanishing control.

    An optional origin shifts the polynomial basis to (x-x0, y-y0), which
    keeps coefficients and node norms on comparable scales when the cycle
    sits far from the coordinate origin.
    """

    kind = "polynomial"

    def __init__(self, a: Poly2, b: Poly2, origin: tuple[float, float] = (0.0, 0.0)):
        self.a = a
        self.b = b
        self.origin = (float(origin[0]), float(origin[1]))

    def components(self, x, y):
        x = np.asarray(x, dtype=float) - self.origin[0]
        y = np.asarray(y, dtype=float) - self.origin[1]
        return self.a.eval(x, y), self.b.eval(x, y)

    def describe(self) -> dict:
        return {"kind": self.kind, "a": self.a.describe(), "b": self.b.describe(),
                "origin": [fmt_float(self.origin[0]), fmt_float(self.origin[1])]}


# --- oval tracing -------------------------------------------------------------

@dataclass
class OvalTrace:
    t: float
    nodes: np.ndarray          # (N+1, 2), last row equals the first
    midpoints: np.ndarray      # (N, 2), corrected onto the level set
    closed: bool
    arc_length: float
    center: int                # index into the critical-point catalog
    face: int                  # containing bounded cell of the full arrangement
    step: float

    def reversed(self) -> "OvalTrace":
        return OvalTrace(self.t, self.nodes[::-1].copy(), self.midpoints[::-1].copy(),
                         self.closed, self.arc_length, self.center, self.face, self.step)


def _newton_to_level(ld: _LineData, pt: np.ndarray, t: float,
                     tol: float, max_steps: int = 8) -> np.ndarray | None:
    for _ in range(max_steps):
        f = float(ld.f(pt[0], pt[1])[0])
        if abs(f - t) <= tol:
            return pt
        gx, gy = ld.grad_f(pt[0], pt[1])
        g2 = float(gx[0]) ** 2 + float(gy[0]) ** 2
        if g2 == 0 or not np.isfinite(g2):
            return None
        pt = pt - (f - t) / g2 * np.array([float(gx[0]), float(gy[0])])
    f = float(ld.f(pt[0], pt[1])[0])
    return pt if abs(f - t) <= tol else None


def _face_polygon_float(arr: Arrangement, face_id: int) -> np.ndarray:
    f = arr.bounded_faces[face_id]
    return np.array([[float(arr.vertices[v].point[0]), float(arr.vertices[v].point[1])]
                     for v in f.vertex_cycle])


def _inside_float(poly: np.ndarray, pt: np.ndarray) -> bool:
    nxt = np.roll(poly, -1, axis=0)
    cross = (nxt[:, 0] - poly[:, 0]) * (pt[1] - poly[:, 1]) \
        - (nxt[:, 1] - poly[:, 1]) * (pt[0] - poly[:, 0])
    return bool(np.all(cross > 0))


def value_gap(points: list[CriticalPoint], center: CriticalPoint) -> float:
    """Distance from the center's value to the nearest other real critical value."""
    c = center.value
    finite = [p.value for p in points if math.isfinite(p.value) and p.value != c]
    return min(abs(v - c) for v in finite)


def trace_oval(
    arr: Arrangement,
    points: list[CriticalPoint],
    center: CriticalPoint,
    s: float = 0.1,
    t: float | None = None,
    n_target: int = DEFAULT_NODES,
    trace_tol: float = TRACE_TOL,
    line_clearance: float = LINE_CLEARANCE,
    max_retries: int = 6,
) -> OvalTrace:
    """March a closed level curve {F = t} around a center singularity.

    The level defaults to c* + s*gap into the regular side, where gap is the
    distance from the critical value c* to the nearest other real critical
    value.  Marching uses tangent predictor steps of length ~ perimeter/n_target
    with Newton correction back onto the level set; the loop must close and
    stay strictly inside the center's bounded cell (retried with a halved
    step, then reported as a trace failure).
    """
    if center.kind not in (KIND_CENTER_P, KIND_CENTER_Q):
        raise InvalidParameterError(f"cannot trace an oval around kind {center.kind}")
    if not 0 < s <= 0.5:
        raise InvalidParameterError(f"offset fraction must be in (0, 1/2], got {s}")

    ld = _LineData(arr)
    cpt = np.array([center.x, center.y])
    cval = center.value
    if t is None:
        gap = value_gap(points, center)
        h_log = hessian_log_f(arr, center.x, center.y)
        direction = 1.0 if cval * h_log[0, 0] > 0 else -1.0   # +1 at a local minimum
        t = cval + s * gap * direction
    t = float(t)
    level_tol = 0.5 * trace_tol * max(abs(t), 1e-300)

    poly = _face_polygon_float(arr, center.face)
    reach = np.linalg.norm(poly - cpt, axis=1).max()

    # first node: walk along +x until the level is bracketed, then solve
    u = np.array([1.0, 0.0])
    sign0 = math.copysign(1.0, cval - t)
    r_lo, r_hi = 0.0, None
    r = 1e-6 * reach
    while r < 4 * reach:
        p = cpt + r * u
        if not _inside_float(poly, p):
            break
        val = float(ld.f(p[0], p[1])[0]) - t
        if math.copysign(1.0, val) != sign0:
            r_hi = r
            break
        r_lo = r
        r *= 1.7
    if r_hi is None:
        raise TraceFailureError(
            f"no level crossing along the seed ray for t={t:g} at {center.kind}"
        )
    r_star = brentq(lambda rr: float(ld.f(*(cpt + rr * u))[0]) - t, r_lo, r_hi,
                    xtol=1e-15, rtol=8.9e-16)
    start = cpt + r_star * u

    step = 2 * math.pi * r_star / n_target
    last_error: str = ""
    for _ in range(max_retries):
        nodes = _march(ld, start, t, step, level_tol, poly, n_target)
        if nodes is not None:
            break
        last_error = f"step {step:g} failed to close"
        step *= 0.5
    else:
        raise TraceFailureError(f"oval did not close around {center.kind}: {last_error}")

    if float(np.linalg.norm(nodes[0] - nodes[-1])) > CLOSURE_TOL:
        raise TraceFailureError("trace endpoints do not coincide")

    # enforce counterclockwise orientation
    area2 = float(np.sum(nodes[:-1, 0] * nodes[1:, 1] - nodes[1:, 0] * nodes[:-1, 1]))
    if area2 < 0:
        nodes = nodes[::-1].copy()

    ld.guard_clearance(nodes[:, 0], nodes[:, 1], line_clearance)

    mids = 0.5 * (nodes[:-1] + nodes[1:])
    for i in range(len(mids)):
        corrected = _newton_to_level(ld, mids[i], t, level_tol)
        if corrected is None:
            raise TraceFailureError("midpoint correction failed")
        mids[i] = corrected

    arc = float(np.sum(np.linalg.norm(np.diff(nodes, axis=0), axis=1)))
    return OvalTrace(t=t, nodes=nodes, midpoints=mids, closed=True, arc_length=arc,
                     center=points.index(center), face=center.face, step=step)


def _march(ld, start, t, step, level_tol, poly, n_target):
    nodes = [start]
    prev_tan = None
    max_steps = 16 * n_target
    for _ in range(max_steps):
        x = nodes[-1]
        gx, gy = ld.grad_f(x[0], x[1])
        tan = np.array([-float(gy[0]), float(gx[0])])
        norm = np.linalg.norm(tan)
        if norm == 0 or not np.isfinite(norm):
            return None
        tan /= norm
        if prev_tan is not None and float(tan @ prev_tan) < 0:
            tan = -tan
        prev_tan = tan
        nxt = _newton_to_level(ld, x + step * tan, t, level_tol)
        if nxt is None or not _inside_float(poly, nxt):
            return None
        if len(nodes) > 4 and np.linalg.norm(nxt - nodes[0]) < step:
            nodes.append(nodes[0])
            return np.array(nodes)
        nodes.append(nxt)
    return None


# --- quadrature ---------------------------------------------------------------

def integrate(form, trace: OvalTrace) -> tuple[complex, float]:
    """Composite Simpson quadrature of the form pulled back along the trace.

    Each segment is replaced by the quadratic path through its endpoints and
    the level-set-corrected midpoint; Simpson in the path parameter is exact
    for that interpolant, so the samples are genuine on-curve values.
    Returns (value, error_estimate) where the estimate accumulates the
    per-segment discrepancy against the chord trapezoid rule.  Forms
    carrying a closed-form potential G contribute their exact part as the
    telescoped difference G(end) - G(start), which vanishes identically on
    closed traces and leaves the quadrature to the logarithmic part.
    """
    nodes, mids = trace.nodes, trace.midpoints
    p, q, m = nodes[:-1], nodes[1:], mids

    if isinstance(form, LogFamilyForm):
        ap, bp = form.log_components(p[:, 0], p[:, 1])
        aq, bq = form.log_components(q[:, 0], q[:, 1])
        am, bm = form.log_components(m[:, 0], m[:, 1])
    else:
        ap, bp = form.components(p[:, 0], p[:, 1])
        aq, bq = form.components(q[:, 0], q[:, 1])
        am, bm = form.components(m[:, 0], m[:, 1])

    for arrs in (ap, bp, aq, bq, am, bm):
        if not np.all(np.isfinite(np.asarray(arrs, dtype=complex))):
            raise PoleProximityError("form evaluates non-finite on the trace")

    # velocity of the quadratic interpolant at tau = 0, 1/2, 1
    v0 = -3 * p + 4 * m - q
    vh = q - p
    v1 = p - 4 * m + 3 * q
    seg = (ap * v0[:, 0] + bp * v0[:, 1]
           + 4 * (am * vh[:, 0] + bm * vh[:, 1])
           + aq * v1[:, 0] + bq * v1[:, 1]) / 6.0
    trap = (vh[:, 0] * (ap + aq) + vh[:, 1] * (bp + bq)) / 2.0
    total = complex(np.sum(seg))
    err = float(np.sum(np.abs(seg - trap)))

    if isinstance(form, LogFamilyForm) and form.g:
        g_start = complex(form.potential(nodes[0, 0], nodes[0, 1])[0])
        g_end = complex(form.potential(nodes[-1, 0], nodes[-1, 1])[0])
        total += g_end - g_start
    return total, err


def form_scale(form, trace: OvalTrace) -> float:
    """arc length times the largest node magnitude of the form."""
    a, b = form.components(trace.nodes[:, 0], trace.nodes[:, 1])
    mag = np.sqrt(np.abs(np.asarray(a, dtype=complex)) ** 2
                  + np.abs(np.asarray(b, dtype=complex)) ** 2)
    return trace.arc_length * float(mag.max())


def winding_oracle(trace, line, min_modulus: float = 1e-12) -> int:
    """Winding number of the line value around 0 along the (closed) trace.

    Works for complex node coordinates as well; for a real oval avoiding the
    line the values keep one sign and the winding is 0.  The accumulated
    argument must land within a tenth of a turn of an integer.
    """
    nodes = trace.nodes if isinstance(trace, OvalTrace) else np.asarray(trace)
    w = np.asarray([complex(line.a) * complex(x) + complex(line.b) * complex(y)
                    + complex(line.c) for x, y in nodes])
    if float(np.abs(w).min()) < min_modulus:
        raise PoleProximityError("trace node lies on the line")
    if abs(w[0] - w[-1]) > 0:
        w = np.append(w, w[0])
    total = float(np.sum(np.angle(w[1:] / w[:-1])))
    turns = total / (2 * math.pi)
    winding = round(turns)
    if abs(turns - winding) > 0.1:
        raise PoleProximityError(f"ambiguous winding: {turns} turns")
    return winding


# --- randomized vanishing check ------------------------------------------------

def random_admissible_lambdas(rng: np.random.Generator, d: int) -> tuple[Fraction, ...]:
    """Rational coefficients satisfying the degree constraint exactly."""
    lams = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
            for _ in range(d + 1)]
    if not any(lams):
        lams[0] = Fraction(1)
    last = -sum(lams, Fraction(0)) / (d + 1)
    return tuple(lams + [last])


def random_control_form(rng: np.random.Generator,
                        origin: tuple[float, float] = (0.0, 0.0)) -> PolynomialForm:
    """Random polynomial 1-form whose loop integrals are generically nonzero.

    The polynomial basis is centred at `origin` (normally the traced
    extremum), constant terms are omitted (exact, they only inflate the
    node norm), and draws whose curl dB/dx - dA/dy vanishes at the origin
    are redrawn: those sit in the nearly-closed tail that a nonvanishing
    control is meant to avoid.
    """
    while True:
        a = Poly2.random(rng, max_deg=2, min_deg=1)
        b = Poly2.random(rng, max_deg=2, min_deg=1)
        curl_at_origin = (b.grad()[0].monomials.get((0, 0), 0)
                          - a.grad()[1].monomials.get((0, 0), 0))
        if abs(curl_at_origin) >= 1:
            return PolynomialForm(a, b, origin)


def check_center_vanishing(
    arr: Arrangement,
    points: list[CriticalPoint],
    trials: int = 20,
    seed: int = 0,
    s: float = 0.1,
    vanish_tol: float = VANISH_TOL,
    control_tol: float = CONTROL_TOL,
    n_target: int = DEFAULT_NODES,
) -> dict:
    """Integrate random admissible forms and controls over every center oval.

    For each center the report records: `trials` admissible logarithmic
    draws (all must vanish below vanish_tol * scale), the same number of
    random polynomial controls (at least 90% must stay above
    control_tol * scale), and the winding of every family line along the
    trace (all must be 0).  `scale` is arc length times the largest node
    magnitude of the form, so thresholds track the form's own size.
    """
    d = arr.d
    if d < 2:
        raise InvalidParameterError("no center singularities exist for d < 2")
    rng = np.random.default_rng(seed)
    centers = [p for p in points if p.kind in (KIND_CENTER_P, KIND_CENTER_Q)]

    tasks = []
    for center in centers:
        log_forms = []
        control_forms = []
        for _ in range(trials):
            lams = random_admissible_lambdas(rng, d)
            g = Poly2.random(rng, max_deg=2, nonzero=False)
            log_forms.append(LogFamilyForm(arr, lams, g if g else None))
            control_forms.append(random_control_form(rng, (center.x, center.y)))
        tasks.append((center, log_forms, control_forms))

    def run_center(task):
        center, log_forms, control_forms = task
        trace = trace_oval(arr, points, center, s=s, n_target=n_target)
        windings = [winding_oracle(trace, line) for line in arr.lines]
        entry = {
            "kind": center.kind,
            "x": fmt_float(center.x),
            "y": fmt_float(center.y),
            "value": fmt_float(center.value),
            "t": fmt_float(trace.t),
            "nodes": len(trace.nodes) - 1,
            "arc_length": fmt_float(trace.arc_length),
            "windings": windings,
            "winding_all_zero": all(w == 0 for w in windings),
            "log_trials": [],
            "control_trials": [],
        }
        for form in log_forms:
            val, err = integrate(form, trace)
            scale = form_scale(form, trace)
            entry["log_trials"].append({
                "form": form.describe(),
                "integral": [fmt_float(val.real), fmt_float(val.imag)],
                "error_estimate": fmt_float(err),
                "scale": fmt_float(scale),
                "pass": abs(val) <= vanish_tol * scale,
            })
        for form in control_forms:
            val, err = integrate(form, trace)
            scale = form_scale(form, trace)
            entry["control_trials"].append({
                "form": form.describe(),
                "integral": [fmt_float(val.real), fmt_float(val.imag)],
                "error_estimate": fmt_float(err),
                "scale": fmt_float(scale),
                "nonzero": abs(val) >= control_tol * scale,
            })
        entry["log_pass_count"] = sum(t["pass"] for t in entry["log_trials"])
        entry["control_nonzero_count"] = sum(t["nonzero"] for t in entry["control_trials"])
        need_controls = math.ceil(0.9 * trials)
        entry["pass"] = (
            entry["log_pass_count"] == trials
            and entry["control_nonzero_count"] >= need_controls
            and entry["winding_all_zero"]
        )
        return entry

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            center_reports = list(pool.map(run_center, tasks))
    else:
        center_reports = [run_center(t) for t in tasks]

    return {
        "d": d,
        "s": s,
        "seed": seed,
        "trials": trials,
        "vanish_tol": vanish_tol,
        "control_tol": control_tol,
        "centers": center_reports,
        "pass": all(c["pass"] for c in center_reports),
    }
