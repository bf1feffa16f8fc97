"""Polynomial container, Newton-polygon analysis, and the root solver.

Coefficient magnitudes can span thousands of nats, so no fixed-precision
method applied to raw values is meaningful.  The solver therefore works on the
Newton polygon of the coefficients: the upper convex hull of (j, logmag c_j)
groups the root moduli into circles, circles separated by a large radial gap
are solved as independent blocks, and each block runs a simultaneous
Newton-with-repulsion iteration in a locally rescaled frame where the iterates
fit ordinary complex arithmetic.  Evaluation of the full polynomial and its
derivative happens in log space with max-factoring, so a block's view of the
polynomial is exact no matter how enormous the remaining coefficients are.

Residuals are relative backward errors |p(z)| / sum_j |c_j||z|^j; a RootSet
only reports converged = True when every residual is at or below 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sampler import CoefficientVector
from .xnum import (
    TAU,
    SaturationError,
    XComplex,
    wrap_phase,
    xdiv,
    xneg,
)
from .xvec import as_arrays, from_arrays, wrap_phase_vec

_GOLDEN = 0.6180339887498949
_BLOCK_GAP = 60.0  # nats between circle radii that force a block split
_BLOCK_SPREAD = 500.0  # maximum radial extent of one block frame
_RESIDUAL_OK = 1e-10  # converged RootSets guarantee residuals at or below this
_RESIDUAL_STOP = 1e-11  # per-root early stop on relative backward error
_STEP_CAP = 50.0  # a correction never exceeds e^50 times the iterate


@dataclass(frozen=True, slots=True)
class Polynomial:
    """Coefficients indexed by power, lowest first; both ends nonzero."""

    coeffs: tuple[XComplex, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True, slots=True)
class RootSet:
    roots: tuple[XComplex, ...]
    residuals: tuple[float, ...]
    converged: bool


@dataclass(frozen=True, slots=True)
class PredictedRoots:
    """Closed-form roots of the two dominant-coefficient binomial equations."""

    inner: tuple[XComplex, ...]
    outer: tuple[XComplex, ...]

    @property
    def inner_radius(self) -> float:
        return self.inner[0].logmag

    @property
    def outer_radius(self) -> float:
        return self.outer[0].logmag

    def all_roots(self) -> tuple[XComplex, ...]:
        return self.inner + self.outer


def polynomial(coeffs) -> Polynomial:
    cs = tuple(coeffs)
    if not cs:
        raise ValueError("empty coefficient list")
    if cs[0].zero or cs[-1].zero:
        raise ValueError("constant and leading coefficients must be nonzero")
    return Polynomial(cs)


def trim(raw_coeffs) -> tuple[Polynomial, int, int]:
    """Strip zero coefficients at both ends.

    Returns (polynomial, zero_root_multiplicity, degree_deficit): the number
    of exact zero roots stripped from the low end and the drop in degree from
    the high end.
    """
    cs = list(raw_coeffs)
    if not cs or all(c.zero for c in cs):
        raise ValueError("all coefficients are zero")
    hi = len(cs) - 1
    while cs[hi].zero:
        hi -= 1
    lo = 0
    while cs[lo].zero:
        lo += 1
    return polynomial(cs[lo : hi + 1]), lo, len(cs) - 1 - hi


def reverse(p: Polynomial) -> Polynomial:
    """Coefficients in reverse order; roots become reciprocals."""
    return Polynomial(tuple(reversed(p.coeffs)))


def _upper_hull(xs: list[int], ys: list[Fraction]) -> list[int]:
    """Indices of the upper convex hull vertices, left to right.

    The cross products are exact rationals, so the hull is the true hull of
    the coefficient exponents even when those exponents are astronomically
    large and a float cross product would be all rounding noise.
    """
    hull: list[int] = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (ys[i] - ys[i0]) - (ys[i1] - ys[i0]) * (
                xs[i] - xs[i0]
            )
            if cross >= 0:  # middle point on or below the chord
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _polygon_segments(p: Polynomial) -> list[tuple[Fraction, int, int]]:
    """Hull segments as (modulus logmag, j_lo, j_hi), ascending in modulus.

    Radii stay exact rationals: a float radius at scale 1e20 or beyond has an
    absolute rounding error of whole nats, enough to misgroup segments into
    blocks and to push a block's balance point out of the representable frame.
    """
    xs = [j for j, c in enumerate(p.coeffs) if not c.zero]
    ys = [Fraction(p.coeffs[j].logmag) for j in xs]
    # hull positions must be the true exponents: zero coefficients leave gaps,
    # and a hull taken over compressed positions picks the wrong vertices
    hull = _upper_hull(xs, ys)
    segs = []
    for t in range(len(hull) - 1):
        a, b = hull[t], hull[t + 1]
        j1, j2 = xs[a], xs[b]
        segs.append(((ys[a] - ys[b]) / (j2 - j1), j1, j2))
    return segs


def newton_polygon_radii(p: Polynomial) -> list[tuple[float, int]]:
    """(modulus_logmag, count) per hull segment; counts sum to the degree."""
    return [(float(r), j2 - j1) for r, j1, j2 in _polygon_segments(p)]


def _split_blocks(
    segs: list[tuple[Fraction, int, int]],
) -> list[list[tuple[Fraction, int, int]]]:
    """Group radially adjacent circles; split at big gaps or excessive spread."""
    blocks = [[segs[0]]]
    for seg in segs[1:]:
        cur = blocks[-1]
        if (seg[0] - cur[-1][0]) >= _BLOCK_GAP or (seg[0] - cur[0][0]) > _BLOCK_SPREAD:
            blocks.append([seg])
        else:
            cur.append(seg)
    return blocks


def _initial_iterates(segs, sigma: Fraction, t0: int) -> np.ndarray:
    """Equispaced points on each circle with a golden-ratio phase offset."""
    parts = []
    for t, (r, j1, j2) in enumerate(segs):
        m = j2 - j1
        off = TAU * (((t0 + t + 1) * _GOLDEN) % 1.0)
        phases = off + TAU * np.arange(m) / m
        parts.append(math.exp(float(r - sigma)) * np.exp(1j * phases))
    return np.concatenate(parts)


def _solve_block(lm, ph, segs, t0, tol, max_iter):
    """Iterate one block in its own frame u = z * exp(-sigma).

    Returns (root logmags, root phases, residuals, settled) with values in the
    original frame.
    """
    n = lm.size - 1
    jpow = np.arange(n + 1, dtype=np.float64)
    radii = [s[0] for s in segs]
    # roots of radially lower blocks sit near 0 in this frame; a point charge
    # there makes the update Aberth on the implicitly deflated polynomial
    # (fixed points are unchanged: the correction is zero only where p is)
    charge_below = float(segs[0][1])
    anchor = segs[0][1]
    # The frame center is an exact rational.  A float midrange at scale 1e20+
    # carries an absolute rounding error of whole nats, which displaces the
    # in-frame balance points by the same amount -- far beyond the e^+-600
    # window once the scale passes ~1e18, making the block unsolvable.
    sigma = (min(radii) + max(radii)) / 2
    # Term exponents are carried relative to the block's first hull vertex,
    # formed exactly (floats are exact rationals) and rounded once.  Within
    # the block every difference is small by construction; entries from other
    # blocks are exponentially suppressed here, so their underflow to -inf is
    # the correct limit, not an error.
    base = Fraction(float(lm[anchor])) + anchor * sigma
    shift = np.empty(n + 1)
    for j in range(n + 1):
        lmj = float(lm[j])
        if not math.isfinite(lmj):
            shift[j] = -math.inf
            continue
        try:
            shift[j] = float(Fraction(lmj) + j * sigma - base)
        except OverflowError:
            shift[j] = math.inf if Fraction(lmj) + j * sigma > base else -math.inf
    if np.any(shift == np.inf):
        raise SaturationError("coefficient magnitudes overflow the block frame")
    jrel = jpow - float(anchor)
    tol_eff = max(tol, 1.4e-14)
    rho_lo = float(min(radii) - sigma)
    rho_hi = float(max(radii) - sigma)
    lo_a = math.exp(max(rho_lo - 100.0, -600.0))
    hi_a = math.exp(min(rho_hi + 100.0, 600.0))

    u = _initial_iterates(segs, sigma, t0)
    m = u.size

    def evaluate(uc):
        alm = np.log(np.abs(uc))
        aph = np.angle(uc)
        # column-wise this differs from the true term exponents only by a
        # constant (the anchor's), which cancels from every downstream
        # difference; phases are exact as-is
        tl = shift[:, None] + jrel[:, None] * alm[None, :]
        tp = ph[:, None] + jpow[:, None] * aph[None, :]
        mx = np.max(tl, axis=0)  # finite: the constant term always is
        w = np.exp(tl - mx[None, :])
        ct = np.cos(tp)
        st = np.sin(tp)
        re = np.einsum("ij,ij->j", w, ct)
        im = np.einsum("ij,ij->j", w, st)
        wj = w * jpow[:, None]
        re2 = np.einsum("ij,ij->j", wj, ct)
        im2 = np.einsum("ij,ij->j", wj, st)
        # all downstream uses are differences in which the factored-out mx
        # cancels exactly, so it is never added back (adding it would destroy
        # the low-order bits whenever mx is large)
        den = np.log(np.sum(w, axis=0))
        pmag = np.hypot(re, im)
        dmag = np.hypot(re2, im2)
        with np.errstate(divide="ignore"):
            plm = np.where(pmag > 0.0, np.log(np.maximum(pmag, 1e-300)), -np.inf)
            dlog = np.where(dmag > 0.0, np.log(np.maximum(dmag, 1e-300)), -np.inf)
        return alm, aph, plm, np.arctan2(im, re), dlog, np.arctan2(im2, re2), den

    rel = np.full(m, np.inf)
    resid = np.full(m, np.inf)
    for _ in range(max_iter):
        alm, aph, plm, pph, dlog, dph2, den = evaluate(u)
        resid = np.exp(np.minimum(plm - den, 0.0))
        if np.all((rel <= tol_eff) | (resid <= _RESIDUAL_STOP)):
            break

        # Newton correction in the block frame: N_u = p(z) / p'(z) / e^sigma
        # with p'(z) = (sum_j j c_j z^j) / z, so |N_u| = |p| |u| / |sum j c_j z^j|.
        with np.errstate(invalid="ignore"):
            nulm = np.where(
                plm == -np.inf,
                -np.inf,
                np.minimum(plm - dlog + alm, alm + _STEP_CAP),
            )
        nph = pph - dph2 + aph
        nc = np.exp(nulm) * (np.cos(nph) + 1j * np.sin(nph))

        diff = u[:, None] - u[None, :]
        np.fill_diagonal(diff, np.inf)
        dup = np.triu(diff == 0, 1).any(axis=0)
        if dup.any():
            idx = np.nonzero(dup)[0]
            u[idx] = u[idx] * np.exp(1j * 1e-9 * (idx + 1))
            diff = u[:, None] - u[None, :]
            np.fill_diagonal(diff, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
        inv[~np.isfinite(inv)] = 0.0
        repulse = inv.sum(axis=1) + charge_below / u

        denom = 1.0 - nc * repulse
        bad = (denom == 0) | ~np.isfinite(denom)
        delta = nc / np.where(bad, 1.0, denom)
        delta = np.where(np.isfinite(delta), delta, nc)

        newu = u - delta
        anorm = np.abs(newu)
        newu = np.where(anorm == 0.0, 1e-300 + 0j, newu)
        anorm = np.abs(newu)
        scale = np.clip(anorm, lo_a, hi_a) / anorm
        newu = newu * scale
        rel = np.abs(delta) / np.abs(newu)
        u = newu

    alm, aph, plm, pph, dlog, dph2, den = evaluate(u)
    resid = np.exp(np.minimum(plm - den, 0.0))
    settled = bool(np.all((rel <= tol_eff) | (resid <= _RESIDUAL_STOP)))
    # one correct rounding of the exact sum, so the reported logmag is the
    # nearest float to the true root logmag even when sigma's own ulp dwarfs
    # the in-frame offset
    out_lm = np.array(
        [float(sigma + Fraction(float(v))) for v in alm], dtype=np.float64
    )
    return out_lm, wrap_phase_vec(aph), resid, settled


def aberth_solve(p: Polynomial, tol: float = 1e-12, max_iter: int = 200) -> RootSet:
    """All complex roots by blockwise simultaneous iteration.

    Initial guesses sit on the Newton-polygon circles; the iteration stops
    when every relative correction is at most tol (or the relative backward
    error of the root is already below 1e-11), or at max_iter.  Non-convergence
    is reported through converged = False, never as an exception.
    """
    n = p.degree
    if n < 1:
        raise ValueError("degree must be at least 1")
    lm, ph = as_arrays(p.coeffs)
    segs = _polygon_segments(p)
    parts_lm = []
    parts_ph = []
    parts_res = []
    settled_all = True
    t0 = 0
    for block in _split_blocks(segs):
        blm, bph, bres, bok = _solve_block(lm, ph, block, t0, tol, max_iter)
        t0 += len(block)
        parts_lm.append(blm)
        parts_ph.append(bph)
        parts_res.append(bres)
        settled_all = settled_all and bok
    rlm = np.concatenate(parts_lm)
    rph = np.concatenate(parts_ph)
    rres = np.concatenate(parts_res)
    order = np.lexsort((rph, rlm))
    roots = tuple(from_arrays(rlm[order], rph[order]))
    residuals = tuple(float(x) for x in rres[order])
    converged = settled_all and max(residuals) <= _RESIDUAL_OK
    return RootSet(roots, residuals, converged)


def _circle_logmag(num: XComplex, den: XComplex, k: int) -> float:
    """(logmag num - logmag den) / k with one correct rounding.

    At huge scales a root logmag's own ulp can exceed any matching tolerance,
    so the predicted radius must be the nearest float to the exact value --
    the same value the solver reports -- rather than a twice-rounded one.
    """
    return float((Fraction(num.logmag) - Fraction(den.logmag)) / k)


def predicted_roots(c: CoefficientVector) -> PredictedRoots:
    """Roots of z^tau = -c_0/c_tau (inner) and z^(n-tau) = -c_tau/c_n (outer).

    The inner circle has logmag (lm_0 - lm_tau)/tau, the outer
    (lm_tau - lm_n)/(n - tau).  Requires 1 <= tau <= n-1.
    """
    n = c.degree
    tau = c.tau
    if tau == 0 or tau == n:
        raise ValueError("argmax coefficient at an extreme index is degenerate")
    base_in = xneg(xdiv(c.coeffs[0], c.coeffs[tau]))
    base_out = xneg(xdiv(c.coeffs[tau], c.coeffs[n]))
    lm_in = _circle_logmag(c.coeffs[0], c.coeffs[tau], tau)
    lm_out = _circle_logmag(c.coeffs[tau], c.coeffs[n], n - tau)
    inner = tuple(
        XComplex(False, lm_in, wrap_phase((base_in.phase + TAU * m) / tau))
        for m in range(tau)
    )
    outer = tuple(
        XComplex(False, lm_out, wrap_phase((base_out.phase + TAU * m) / (n - tau)))
        for m in range(n - tau)
    )
    return PredictedRoots(inner, outer)
