"""Skill-leveled hand-drawn sketch synthesis from BRep coedges.

Each coedge becomes one stroke.  Straight edges get a mean-reverting
jitter field with an occasional bow; circular edges get a low-frequency
harmonic wobble in polar form that vanishes exactly at the arc ends;
everything else gets overlapping windowed line fields.  A skill level
kappa in 1..5 scales every displacement amplitude through
alpha(kappa) = (6 - kappa)/5, so kappa = 5 strokes are five times
cleaner than kappa = 1 strokes, sample for sample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .brep.types import ChainComplex, CoEdge, CURVE_CLASS_CODES, orthonormal_completion
from .brep.walk import mate_loop_id, mate_face_id, owner_face_of_coedge
from .errors import CollinearError, DegenerateInputError
from .brep.sampling import sample_edge_arclength


def skill_alpha(kappa: int) -> float:
    if not 1 <= kappa <= 5:
        raise ValueError(f"skill level must be in 1..5, got {kappa}")
    return (6 - kappa) / 5.0


@dataclass
class SkillParams:
    kappa: int = 3
    c_length: float = 5e-3       # deviation per unit stroke length, in [1e-3, 1e-2]

    @property
    def alpha(self) -> float:
        return skill_alpha(self.kappa)

    def amplitude(self, length: float) -> float:
        return self.alpha * self.c_length * length


@dataclass
class LineJitterParams:
    mr_rate_scale: float = 2.0   # mean-reversion rate theta = scale / L
    mr_sigma: float = 0.4
    bow_prob: float = 0.7
    bow_amp: float = 0.8
    taper_len: float = 0.1       # fraction of L over which endpoint offsets decay
    clip: float = 1.5            # field cap, multiples of the base amplitude
    tangential_amp: float = 0.2
    window: int = 5              # moving-average width, odd >= 3


@dataclass
class ArcJitterParams:
    harmonics: int = 3
    amp_decay: float = 0.5       # a_k, beta_k decay as decay**k
    radial_base: float = 1.0
    angular_base: float = 0.6
    bulge_lo: float = 0.6
    bulge_hi: float = 1.0
    taper_frac: float = 0.15     # raised-cosine rise span at each end


@dataclass
class SketchConfig:
    c_length: float = 5e-3
    base_segments: int = 32
    windows: int = 4             # window count for free-form curves
    skip_prob_scale: float = 0.3
    skip_span_max: float = 0.05
    line: LineJitterParams = field(default_factory=LineJitterParams)
    arc: ArcJitterParams = field(default_factory=ArcJitterParams)


@dataclass
class SketchStroke:
    coedge_id: int
    skill: int
    points: np.ndarray                   # (n, 3) displaced world positions
    labels: dict
    gaps: list                           # [(s0, s1)] skipped arc-length ranges


# ---------------------------------------------------------------------------
# Local frames and circle fitting
# ---------------------------------------------------------------------------

def pca_frame(points: np.ndarray):
    """Centroid + right-handed orthonormal frame from principal directions.

    Collinear inputs fall back to a deterministic completion of the
    leading direction.
    """
    pts = np.asarray(points, dtype=float)
    if len(np.unique(np.round(pts, 12), axis=0)) < 2:
        raise DegenerateInputError("need at least 2 distinct points for a frame")
    o = pts.mean(axis=0)
    cov = np.cov((pts - o).T)
    evals, evecs = np.linalg.eigh(cov)
    e0 = evecs[:, 2]
    if evals[1] <= 1e-12 * max(evals[2], 1e-300):
        e1, e2 = orthonormal_completion(e0)
    else:
        e1 = evecs[:, 1]
        e2 = np.cross(e0, e1)
    return o, e0, e1, e2


@dataclass
class CircleFit:
    center: np.ndarray
    radius: float
    theta_start: float
    theta_end: float
    basis_u: np.ndarray
    basis_v: np.ndarray
    normal: np.ndarray
    rms: float


def fit_circle(points: np.ndarray) -> CircleFit:
    """Algebraic least-squares circle plus one geometric refinement pass."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 3:
        raise CollinearError("need at least 3 points to fit a circle")
    o, e0, e1, e2 = pca_frame(pts)
    rel = pts - o
    spread = np.linalg.norm(rel, axis=1).max()
    if np.abs(rel @ e1).max() <= 1e-9 * max(spread, 1e-300):
        raise CollinearError("points are collinear; no unique circle")
    x, y = rel @ e0, rel @ e1

    # Algebraic (Kasa) fit: x^2 + y^2 = 2a x + 2b y + c.
    A = np.stack([2 * x, 2 * y, np.ones_like(x)], axis=1)
    rhs = x * x + y * y
    (a, b, c), *_ = np.linalg.lstsq(A, rhs, rcond=None)
    r = float(np.sqrt(max(c + a * a + b * b, 1e-300)))

    # One Gauss-Newton step on the geometric residuals.
    for _ in range(1):
        dx, dy = x - a, y - b
        d = np.hypot(dx, dy)
        d = np.maximum(d, 1e-12)
        res = d - r
        J = np.stack([-dx / d, -dy / d, -np.ones_like(d)], axis=1)
        try:
            step, *_ = np.linalg.lstsq(J, -res, rcond=None)
            a, b, r = a + step[0], b + step[1], r + step[2]
        except np.linalg.LinAlgError:
            break

    dx, dy = x - a, y - b
    rms = float(np.sqrt(np.mean((np.hypot(dx, dy) - r) ** 2)))
    center = o + a * e0 + b * e1
    th = np.unwrap(np.arctan2(dy, dx))
    return CircleFit(center, float(r), float(th[0]), float(th[-1]), e0, e1, e2, rms)


# ---------------------------------------------------------------------------
# Displacement fields
# ---------------------------------------------------------------------------

def _moving_average(x: np.ndarray, k: int) -> np.ndarray:
    if k <= 1:
        return x
    pad = k // 2
    xp = np.pad(x, pad, mode="edge")
    kernel = np.ones(k) / k
    return np.convolve(xp, kernel, mode="valid")


def line_field(s: np.ndarray, sk: SkillParams, lp: LineJitterParams, rng) -> tuple:
    """Normal (u) and tangential (t) jitter over uniform arc-length samples.

    Mean-reverting walk + optional bow, clipped, endpoint-tapered, then
    smoothed; every term is proportional to the base amplitude, so skill
    rescales the whole field linearly.
    """
    s = np.asarray(s, dtype=float)
    n = len(s)
    L = s[-1] - s[0] if n > 1 else 1.0
    L = max(L, 1e-12)
    # Build the field at full amplitude and scale by alpha only at the very
    # end, so changing skill rescales every sample bitwise-exactly.
    a0 = sk.c_length * L
    ds = L / max(n - 1, 1)
    theta = lp.mr_rate_scale / L

    xi = rng.standard_normal(n)
    u = np.zeros(n)
    for i in range(1, n):
        u[i] = u[i - 1] * (1.0 - theta * ds) + lp.mr_sigma * a0 * xi[i - 1]

    if rng.uniform() < lp.bow_prob:
        u = u + lp.bow_amp * a0 * np.sin(np.pi * (s - s[0]) / L)

    u = np.clip(u, -lp.clip * a0, lp.clip * a0)

    off0, off1 = rng.uniform(-0.5, 0.5, size=2) * a0
    tl = max(lp.taper_len * L, 1e-12)
    rel = s - s[0]
    u = u + off0 * np.maximum(0.0, 1.0 - rel / tl)
    u = u + off1 * np.maximum(0.0, 1.0 - (L - rel) / tl)

    u = _moving_average(u, lp.window)

    t = lp.tangential_amp * a0 * rng.uniform(-1.0, 1.0, size=n)
    t = _moving_average(t, lp.window)
    return sk.alpha * u, sk.alpha * t


def _raised_cosine_taper(s01: np.ndarray, frac: float) -> np.ndarray:
    """0 at both ends, smooth rise to 1 over the first/last ``frac`` span."""
    frac = min(max(frac, 1e-9), 0.5)
    t = np.ones_like(s01)
    lo = s01 < frac
    hi = s01 > 1.0 - frac
    t[lo] = 0.5 * (1.0 - np.cos(np.pi * s01[lo] / frac))
    t[hi] = 0.5 * (1.0 - np.cos(np.pi * (1.0 - s01[hi]) / frac))
    return t


def arc_field(theta: np.ndarray, radius: float, sk: SkillParams,
              ap: ArcJitterParams, rng, envelope: bool = True) -> tuple:
    """Radial and angular wobble over monotone angle samples.

    The field is a short harmonic series: a full-period bulge pair at the
    fundamental plus tapered higher harmonics.  With ``envelope`` the
    whole field is multiplied by a raised-cosine window, making it
    exactly zero at the first and last samples.
    """
    theta = np.asarray(theta, dtype=float)
    span = abs(theta[-1] - theta[0])
    L = max(radius * span, 1e-12)
    # Full-amplitude field, scaled by alpha at the end (see line_field).
    a = sk.c_length * L

    alpha1 = rng.uniform(ap.bulge_lo, ap.bulge_hi)
    alpha2 = rng.uniform(ap.bulge_lo, ap.bulge_hi)
    phi1, phi2 = rng.uniform(0, 2 * np.pi, size=2)

    s01 = (theta - theta[0]) / (theta[-1] - theta[0]) if len(theta) > 1 else theta * 0
    taper = _raised_cosine_taper(s01, ap.taper_frac)

    dr = a * alpha1 * np.cos(theta + phi1) + 0.5 * a * alpha2 * np.sin(theta + phi2)
    for k in range(2, ap.harmonics + 1):
        a_k = a * ap.radial_base * ap.amp_decay ** k
        psi = rng.uniform(0, 2 * np.pi)
        dr = dr + a_k * taper * (
            np.sin(k * theta + psi) + 0.6 * np.cos(k * theta + 0.73 * psi)
        )

    dth = np.zeros_like(theta)
    for k in range(1, ap.harmonics + 1):
        b_k = (a / radius) * ap.angular_base * ap.amp_decay ** k
        eta = rng.uniform(0, 2 * np.pi)
        dth = dth + b_k * taper * np.sin(k * theta + eta)

    if envelope:
        dr = dr * taper
        dth = dth * taper
    return sk.alpha * dr, sk.alpha * dth


def general_field(s: np.ndarray, sk: SkillParams, lp: LineJitterParams,
                  windows: int, rng) -> tuple:
    """Averaged overlapping line fields; one window degenerates to line_field."""
    s = np.asarray(s, dtype=float)
    if windows <= 1:
        return line_field(s, sk, lp, rng)
    L = s[-1] - s[0]
    width = 2.0 * L / (windows + 1)
    u_sum = np.zeros_like(s)
    t_sum = np.zeros_like(s)
    counts = np.zeros_like(s)
    for w in range(windows):
        start = s[0] + w * width / 2.0
        end = min(start + width, s[-1] + 1e-12)
        mask = (s >= start - 1e-12) & (s <= end + 1e-12)
        if mask.sum() < 2:
            continue
        uw, tw = line_field(s[mask] - start, sk, lp, rng)
        u_sum[mask] += uw
        t_sum[mask] += tw
        counts[mask] += 1.0
    counts = np.maximum(counts, 1.0)
    return u_sum / counts, t_sum / counts


# ---------------------------------------------------------------------------
# Stroke synthesis
# ---------------------------------------------------------------------------

def _edge_labels(cc: ChainComplex, e: CoEdge) -> dict:
    eid = e.coedge_id
    return {
        "edge_id": eid,
        "loop_id": int(cc.parent[eid]),
        "mate_loop_id": mate_loop_id(cc, eid),
        "face_id_a": owner_face_of_coedge(cc, eid),
        "face_id_b": mate_face_id(cc, eid),
        "curve_class": CURVE_CLASS_CODES[e.curve_class],
    }


def _stroke_rng(seed: int, coedge_id: int):
    return np.random.Generator(np.random.PCG64(seed ^ coedge_id))


def _segment_count(cfg: SketchConfig, alpha: float, override: int | None) -> int:
    if override is not None:
        return max(override, 4)
    return max(8, int(round(cfg.base_segments * (1.0 + 2.0 * alpha))))


def synthesize_sketch(
    cc: ChainComplex, kappa: int, config: SketchConfig | None = None,
    seed: int = 0, segments_override: int | None = None,
) -> list[SketchStroke]:
    """One jittered stroke per coedge, deterministic per (seed, coedge)."""
    cfg = config if config is not None else SketchConfig()
    sk = SkillParams(kappa=kappa, c_length=cfg.c_length)
    strokes = []
    for e in cc.coedges:
        rng = _stroke_rng(seed, e.coedge_id)
        n = _segment_count(cfg, sk.alpha, segments_override)
        labels = _edge_labels(cc, e)
        if e.curve_class == "line":
            p0 = np.asarray(e.curve_params[0:3])
            p1 = np.asarray(e.curve_params[3:6])
            L = e.arc_length
            s = np.linspace(0.0, L, n + 1)
            dirv = (p1 - p0) / max(L, 1e-12)
            e1, _ = orthonormal_completion(dirv)
            du, dt = line_field(s, sk, cfg.line, rng)
            pts = p0 + np.outer(s + dt, dirv) + np.outer(du, e1)
            gaps = _maybe_skip(s, sk.alpha, cfg, rng)
            pts, s_kept = _apply_gaps(pts, s, gaps)
        elif e.curve_class == "circle":
            fit = fit_circle(e.polyline)
            closed = len(e.endpoints) == 0
            th1 = fit.theta_start + (2 * np.pi if closed else
                                     fit.theta_end - fit.theta_start)
            theta = np.linspace(fit.theta_start, fit.theta_start + (th1 - fit.theta_start), n + 1)
            if closed:
                theta = np.linspace(fit.theta_start, fit.theta_start + 2 * np.pi, n + 1)
            dr, dth = arc_field(theta, fit.radius, sk, cfg.arc, rng)
            ang = theta + dth
            rad = fit.radius + dr
            pts = (
                fit.center
                + rad[:, None] * (np.cos(ang)[:, None] * fit.basis_u
                                  + np.sin(ang)[:, None] * fit.basis_v)
            )
            s = (theta - theta[0]) * fit.radius
            gaps = _maybe_skip(s, sk.alpha, cfg, rng)
            pts, s_kept = _apply_gaps(pts, s, gaps)
        else:
            samples = sample_edge_arclength(e, e.arc_length / n)
            base = np.array([smp.position for smp in samples])
            o, e0, e1v, _ = pca_frame(base)
            L = e.arc_length
            s = np.linspace(0.0, L, len(base))
            du, dt = general_field(s, sk, cfg.line, cfg.windows, rng)
            pts = base + np.outer(du, e1v) + np.outer(dt, e0)
            gaps = _maybe_skip(s, sk.alpha, cfg, rng)
            pts, s_kept = _apply_gaps(pts, s, gaps)
        if len(pts) >= 2:
            strokes.append(SketchStroke(e.coedge_id, kappa, pts, labels, gaps))
    return strokes


def _maybe_skip(s: np.ndarray, alpha: float, cfg: SketchConfig, rng) -> list:
    """Occasional intentional opening: one short skipped span per stroke."""
    if rng.uniform() >= cfg.skip_prob_scale * alpha:
        return []
    L = s[-1] - s[0]
    span = rng.uniform(0.0, cfg.skip_span_max) * L
    start = s[0] + rng.uniform(0.0, max(L - span, 0.0))
    return [(float(start), float(start + span))]


def _apply_gaps(pts: np.ndarray, s: np.ndarray, gaps: list):
    if not gaps:
        return pts, s
    keep = np.ones(len(s), dtype=bool)
    for g0, g1 in gaps:
        keep &= ~((s > g0) & (s < g1))
    return pts[keep], s[keep]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_sketch(strokes: list[SketchStroke], path) -> None:
    doc = {
        "schema": "a2z-sketch/1",
        "strokes": [
            {
                "coedge_id": st.coedge_id,
                "skill": st.skill,
                "points": np.asarray(st.points).tolist(),
                "labels": st.labels,
                "gaps": [list(g) for g in st.gaps],
            }
            for st in strokes
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def read_sketch(path) -> list[SketchStroke]:
    with open(path) as fh:
        doc = json.load(fh)
    return [
        SketchStroke(
            s["coedge_id"], s["skill"], np.asarray(s["points"], dtype=float),
            s["labels"], [tuple(g) for g in s["gaps"]],
        )
        for s in doc["strokes"]
    ]


def write_sketch_pointcloud(strokes: list[SketchStroke], path) -> None:
    """Flattened ascii PLY with a per-point edge id, for detector training."""
    rows = []
    for st in strokes:
        for p in np.asarray(st.points):
            rows.append((p[0], p[1], p[2], st.labels["edge_id"]))
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(rows)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write("property int edge_id\nend_header\n")
        for x, y, z, eid in rows:
            fh.write(f"{x!r} {y!r} {z!r} {eid}\n")
