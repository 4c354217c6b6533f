"""The decision core: rank/kernel/image profiles, divisibility via kernel
inclusion, pseudoinverse propagators, limit projectors at rank-drop times,
composite propagators, and the CP-divisibility verdict pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import MapFamily
from .errors import (
    CauchyDivergenceError,
    NotDivisibleError,
    NumericalError,
    ProjectorValidationError,
)
from .operator_core import SubspaceBasis, gram_schmidt_hermitian, hermitian_basis, hermitianize
from .superop import Superoperator, apply, devectorize, is_cp, is_tp, vectorize

MAX_BREAKPOINTS = 16


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing times starting at 0, with any known rank-drop
    times flagged as breakpoints."""

    times: np.ndarray
    breakpoints: tuple = ()

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("grid needs at least two times")
        if abs(t[0]) > 1e-15:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("grid times must be strictly increasing")
        object.__setattr__(self, "times", t)
        t.setflags(write=False)


def make_grid(t_max: float, n_points: int = 400) -> TimeGrid:
    return TimeGrid(times=np.linspace(0.0, t_max, n_points))


def _as_times(grid) -> np.ndarray:
    return grid.times if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)


@dataclass
class RankProfile:
    """Numerical rank of the natural matrix along the grid, the full
    singular-value lists, and bisection-refined rank-drop times."""

    times: np.ndarray
    ranks: np.ndarray
    singular_values: np.ndarray
    rtol: float
    threshold: float
    breakpoints: tuple

    @property
    def invertible_everywhere(self) -> bool:
        full = self.singular_values.shape[1]
        return bool(np.all(self.ranks == full))


def rank_profile(family: MapFamily, grid, rtol: float = 1e-9) -> RankProfile:
    """Singular-value profile of Lambda_t with rank drops refined by
    bisection to absolute time precision 1e-6.

    The rank threshold is rtol times the largest singular value at t = 0
    (which is 1 for a dynamical map, since Lambda_0 is the identity).
    """
    times = _as_times(grid)
    svals = np.array([np.linalg.svd(family.evaluate(t).natural, compute_uv=False)
                      for t in times])
    threshold = rtol * float(svals[0][0])
    ranks = np.sum(svals > threshold, axis=1)

    def sval_at(t: float, idx: int) -> float:
        s = np.linalg.svd(family.evaluate(t).natural, compute_uv=False)
        return float(s[idx])

    breakpoints = []
    for k in range(len(times) - 1):
        if ranks[k + 1] < ranks[k]:
            # Bisect on the largest vanishing singular value down to its
            # machine-noise floor; the rank threshold itself sits far above
            # the floor for smoothly decaying maps and would bias the
            # breakpoint early.
            idx = int(ranks[k + 1])
            lo, hi = float(times[k]), float(times[k + 1])
            floor = max(50.0 * np.finfo(float).eps * float(svals[0][0]),
                        2.0 * sval_at(hi, idx))
            while hi - lo > 2.5e-7:
                mid = 0.5 * (lo + hi)
                if sval_at(mid, idx) <= floor:
                    hi = mid
                else:
                    lo = mid
            # Snap just past the crossing: limit projectors need the exactly
            # degenerate side, and the true singular time can sit slightly
            # above the noise-floor crossing.
            breakpoints.append(min(hi + 5e-7, float(times[k + 1])))
            if len(breakpoints) > MAX_BREAKPOINTS:
                raise NumericalError(
                    f"more than {MAX_BREAKPOINTS} rank drops detected; "
                    "accumulating breakpoints are not supported",
                    stage="rank_profile")
    return RankProfile(times=times, ranks=ranks, singular_values=svals,
                       rtol=rtol, threshold=threshold, breakpoints=tuple(breakpoints))


def _subspace_from_vectors(vecs: np.ndarray, d: int, rtol: float) -> SubspaceBasis:
    # Singular vectors are not Hermitian as operators; push the canonical
    # Hermitian basis through the subspace projector and re-orthonormalize.
    proj = vecs @ vecs.conj().T
    candidates = []
    for g in hermitian_basis(d):
        m = devectorize(proj @ vectorize(g), d)
        candidates.append(hermitianize(m))
    return gram_schmidt_hermitian(candidates, tol=max(rtol, 1e-12))


def kernel_basis(s: Superoperator, rtol: float = 1e-9) -> SubspaceBasis | None:
    """Orthonormal Hermitian basis of Ker(s); None when the kernel is trivial."""
    u, sv, vh = np.linalg.svd(s.natural)
    mask = sv <= rtol * max(float(sv[0]), 1.0)
    if not np.any(mask):
        return None
    return _subspace_from_vectors(vh[mask].conj().T, s.dim, rtol)


def image_basis(s: Superoperator, rtol: float = 1e-9) -> SubspaceBasis:
    """Orthonormal Hermitian basis of Im(s)."""
    u, sv, vh = np.linalg.svd(s.natural)
    mask = sv > rtol * max(float(sv[0]), 1.0)
    return _subspace_from_vectors(u[:, mask], s.dim, rtol)


def is_divisible(family: MapFamily, grid, rtol: float = 1e-8,
                 rank_rtol: float = 1e-9):
    """Kernel-inclusion test over consecutive grid pairs.

    Returns (divisible, worst residual, first violation time or None);
    the residual at (s, t) is max_K ||Lambda_t(K)||_HS over an orthonormal
    basis K of Ker(Lambda_s).
    """
    times = _as_times(grid)
    worst = 0.0
    first_violation = None
    for k in range(len(times) - 1):
        ker = kernel_basis(family.evaluate(times[k]), rank_rtol)
        if ker is None:
            continue
        s_next = family.evaluate(times[k + 1])
        resid = max(float(np.linalg.norm(apply(s_next, g))) for g in ker.elements)
        worst = max(worst, resid)
        if resid >= rtol and first_violation is None:
            first_violation = float(times[k + 1])
    return first_violation is None and worst < rtol, worst, first_violation


def is_image_nonincreasing(family: MapFamily, grid, rtol: float = 1e-8,
                           rank_rtol: float = 1e-9):
    """Check Im(Lambda_t) subseteq Im(Lambda_s) for consecutive pairs via
    projector residuals ||(1 - P_s) P_t||."""
    times = _as_times(grid)
    worst = 0.0
    prev = image_basis(family.evaluate(times[0]), rank_rtol).projector_matrix()
    n = family.dim ** 2
    for k in range(1, len(times)):
        cur = image_basis(family.evaluate(times[k]), rank_rtol).projector_matrix()
        resid = float(np.linalg.norm((np.eye(n) - prev) @ cur, 2))
        worst = max(worst, resid)
        prev = cur
    return worst < rtol, worst


@dataclass
class PropagatorResult:
    """A propagator V with Lambda_t = V Lambda_s, built from the
    Moore-Penrose pseudoinverse of the natural matrix, plus its diagnostics."""

    v: Superoperator
    s: float
    t: float
    domain: SubspaceBasis
    composition_residual: float
    tp_on_domain_residual: float
    cp_full: tuple[bool, float]
    tp_full_residual: float


def propagator(family: MapFamily, t: float, s: float, rtol: float = 1e-9,
               kernel_tol: float = 1e-8) -> PropagatorResult:
    """V = N_t N_s^+ — the pseudoinverse propagator.

    This instantiates the (non-unique) propagator construction with the
    HS-orthogonal, Hermiticity-preserving choice of projector onto
    Im(Lambda_s). Raises NotDivisibleError if Ker(Lambda_s) is not
    contained in Ker(Lambda_t).
    """
    if t < s:
        raise ValueError(f"need s <= t, got s={s}, t={t}")
    ns = family.evaluate(s).natural
    nt = family.evaluate(t).natural
    ker = kernel_basis(family.evaluate(s), rtol)
    if ker is not None:
        resid = max(float(np.linalg.norm(nt @ vectorize(g))) for g in ker.elements)
        if resid >= kernel_tol:
            raise NotDivisibleError(
                f"kernel inclusion fails between s={s} and t={t} "
                f"(residual {resid:.3e})", stage="propagator", time=t)
    v = Superoperator(dim=family.dim, natural=nt @ np.linalg.pinv(ns, rcond=rtol))
    comp = float(np.linalg.norm(v.natural @ ns - nt))
    dom = image_basis(family.evaluate(s), rtol)
    tp_dom = max(abs(complex(np.trace(apply(v, g))) - complex(np.trace(g)))
                 for g in dom.elements)
    cp_ok, cp_lo = is_cp(v, tol=1e-9)
    _, tp_res = is_tp(v, tol=1e-9)
    return PropagatorResult(v=v, s=float(s), t=float(t), domain=dom,
                            composition_residual=comp,
                            tp_on_domain_residual=float(tp_dom),
                            cp_full=(cp_ok, cp_lo), tp_full_residual=tp_res)


def limit_projector(family: MapFamily, t_star: float, eps0: float | None = None,
                    shrink: float = 0.5, max_steps: int = 40,
                    tol: float = 1e-8) -> Superoperator:
    """The limit of V_{t*, t*-eps} as eps -> 0+, evaluated on a geometric
    eps schedule with an HS-norm Cauchy stopping rule.

    The result is validated as an idempotent, trace-preserving, completely
    positive projection onto Im(Lambda_{t*}) with tolerance 10*tol; any
    failure raises naming the property.
    """
    if eps0 is None:
        eps0 = 1e-2 * family.t_max
    nt = family.evaluate(t_star).natural
    prev = None
    pi = None
    converged = False
    for k in range(max_steps):
        eps = eps0 * shrink ** k
        if t_star - eps <= 0:
            continue
        ns = family.evaluate(t_star - eps).natural
        cur = nt @ np.linalg.pinv(ns, rcond=1e-13)
        if prev is not None and float(np.linalg.norm(cur - prev)) < tol:
            pi = cur
            converged = True
            break
        prev = cur
    if not converged:
        raise CauchyDivergenceError(
            f"propagator sequence at t*={t_star} not Cauchy within {max_steps} steps "
            "(evidence against CP-divisibility)", stage="limit_projector", time=t_star)

    proj = Superoperator(dim=family.dim, natural=pi)
    vtol = 10.0 * tol
    idem = float(np.linalg.norm(pi @ pi - pi))
    if idem > vtol:
        raise ProjectorValidationError(
            f"limit projector at t*={t_star} is not idempotent (residual {idem:.3e})",
            failed_property="idempotent", time=t_star)
    _, tp_res = is_tp(proj, tol=vtol)
    if tp_res > vtol:
        raise ProjectorValidationError(
            f"limit projector at t*={t_star} is not TP (residual {tp_res:.3e})",
            failed_property="trace_preserving", time=t_star)
    cp_ok, cp_lo = is_cp(proj, tol=vtol)
    if not cp_ok:
        raise ProjectorValidationError(
            f"limit projector at t*={t_star} is not CP (min Choi eig {cp_lo:.3e})",
            failed_property="completely_positive", time=t_star)
    img_target = image_basis(family.evaluate(t_star), 1e-9).projector_matrix()
    img_actual = image_basis(proj, 1e-9).projector_matrix()
    img_res = float(np.linalg.norm(img_actual - img_target, 2))
    if img_res > vtol:
        raise ProjectorValidationError(
            f"limit projector at t*={t_star} has the wrong image "
            f"(projector residual {img_res:.3e})", failed_property="image", time=t_star)
    return proj


def composite_propagator(family: MapFamily, t: float, s: float, grid,
                         rtol: float = 1e-9,
                         projectors: dict | None = None) -> PropagatorResult:
    """Composite V_{t,s} Pi_{t_i} ... Pi_{t_1} for image
    non-increasing families, using the limit projectors at all breakpoints
    up to s."""
    if isinstance(grid, TimeGrid):
        bps = list(grid.breakpoints)
    else:
        bps = list(grid)
    bps = sorted(b for b in bps if b <= s + 1e-12)
    res = propagator(family, t, s, rtol=rtol)
    if not bps:
        return res
    nat = res.v.natural
    for b in reversed(bps):
        pi = (projectors or {}).get(b)
        if pi is None:
            pi = limit_projector(family, b)
        nat = nat @ pi.natural
    # Reversed loop composes V Pi_{t_i} ... Pi_{t_1}; rebuild diagnostics
    # for the full-space composite.
    v = Superoperator(dim=family.dim, natural=nat)
    ns = family.evaluate(s).natural
    nt = family.evaluate(t).natural
    comp = float(np.linalg.norm(nat @ ns - nt))
    cp_ok, cp_lo = is_cp(v, tol=1e-9)
    _, tp_res = is_tp(v, tol=1e-9)
    tp_dom = max(abs(complex(np.trace(apply(v, g))) - complex(np.trace(g)))
                 for g in res.domain.elements)
    return PropagatorResult(v=v, s=float(s), t=float(t), domain=res.domain,
                            composition_residual=comp,
                            tp_on_domain_residual=float(tp_dom),
                            cp_full=(cp_ok, cp_lo), tp_full_residual=tp_res)


class DivisibilityStatus(str, Enum):
    NOT_DIVISIBLE = "NOT_DIVISIBLE"
    DIVISIBLE_ONLY = "DIVISIBLE_ONLY"
    CP_ON_IMAGE_ONLY = "CP_ON_IMAGE_ONLY"
    P_DIVISIBLE = "P_DIVISIBLE"
    CP_DIVISIBLE = "CP_DIVISIBLE"


@dataclass
class VerdictTolerances:
    choi_tol: float = 1e-7
    tp_tol: float = 1e-7
    kernel_tol: float = 1e-8
    rank_rtol: float = 1e-9
    fd_tol: float = 1e-6
    image_rtol: float = 1e-8
    positivity_samples: int = 500
    positivity_tol: float = 1e-7
    witness_samples: int = 32
    seed: int = 2026


@dataclass
class DivisibilityVerdict:
    """Outcome of the decision pipeline with supporting evidence."""

    status: DivisibilityStatus
    ranks: RankProfile
    worst_kernel_residual: float
    first_violation_time: float | None
    image_nonincreasing: bool
    image_residual: float
    invertible_everywhere: bool
    worst_choi_min_eig: float | None = None
    worst_tp_residual: float | None = None
    projectors: tuple = ()
    p_sampling_min_eig: float | None = None
    witness_max_backflow: float | None = None
    notes: list = field(default_factory=list)


def _positivity_sampling(props, dim: int, n_samples: int, seed: int) -> float:
    """Worst output min-eigenvalue of the propagators over random pure
    inputs; evidence for P-divisibility, never a proof."""
    from .superop import random_pure_state
    rng = np.random.default_rng(seed)
    worst = np.inf
    per = -(-n_samples // max(1, len(props)))
    for pr in props:
        for _ in range(per):
            psi = random_pure_state(rng, dim)
            out = apply(pr.v, np.outer(psi, psi.conj()))
            worst = min(worst, float(np.linalg.eigvalsh(hermitianize(out))[0]))
    return float(worst)


def _cp_on_image_sampling(family, props, n_samples: int, seed: int) -> float:
    """Worst output min-eigenvalue of (1 (x) V) over PSD elements of
    Im(1 (x) Lambda_s): a sampled necessary condition for V being CP on
    the image (the regime where only a CP extension is guaranteed)."""
    from .superop import random_pure_state, tensor_with_identity
    rng = np.random.default_rng(seed)
    d = family.dim
    worst = np.inf
    per = max(1, n_samples // max(1, len(props)))
    for pr in props:
        ext_v = tensor_with_identity(pr.v, d)
        ext_s = tensor_with_identity(family.evaluate(pr.s), d)
        for _ in range(per):
            psi = random_pure_state(rng, d * d)
            y = apply(ext_s, np.outer(psi, psi.conj()))
            out = apply(ext_v, y)
            worst = min(worst, float(np.linalg.eigvalsh(hermitianize(out))[0]))
    return float(worst)


def cp_divisibility_verdict(family: MapFamily, grid,
                            tolerances: VerdictTolerances | None = None
                            ) -> DivisibilityVerdict:
    """Full decision pipeline.

    1. kernel-inclusion (divisibility) scan;
    2. rank profile with refined breakpoints;
    3. invertible families: Choi test of all consecutive propagators,
       with sampled positivity plus a system-level witness scan as the
       P-divisibility fallback;
    4. noninvertible, image non-increasing families: composite propagators
       through the limit projectors;
    5. otherwise: propagators can only be certified on the image.
    """
    tl = tolerances or VerdictTolerances()
    times = _as_times(grid)
    verdict_notes: list[str] = []

    div_ok, worst_ker, first_violation = is_divisible(
        family, times, rtol=tl.kernel_tol, rank_rtol=tl.rank_rtol)
    ranks = rank_profile(family, times, rtol=tl.rank_rtol)
    img_ok, img_res = is_image_nonincreasing(family, times, rtol=tl.image_rtol,
                                             rank_rtol=tl.rank_rtol)

    base = dict(ranks=ranks, worst_kernel_residual=worst_ker,
                first_violation_time=first_violation,
                image_nonincreasing=img_ok, image_residual=img_res,
                invertible_everywhere=ranks.invertible_everywhere,
                notes=verdict_notes)

    if not div_ok:
        verdict_notes.append("kernel inclusion fails; no propagator exists")
        return DivisibilityVerdict(status=DivisibilityStatus.NOT_DIVISIBLE, **base)

    projectors = {}
    if not ranks.invertible_everywhere:
        if img_ok:
            try:
                projectors = {b: limit_projector(family, b) for b in ranks.breakpoints}
            except (CauchyDivergenceError, ProjectorValidationError) as exc:
                verdict_notes.append(f"limit projector failure: {exc}")

    props = []
    prop_fail = None
    for k in range(len(times) - 1):
        s, t = float(times[k]), float(times[k + 1])
        try:
            if ranks.invertible_everywhere or not img_ok or not projectors:
                props.append(propagator(family, t, s, rtol=tl.rank_rtol,
                                        kernel_tol=tl.kernel_tol))
            else:
                props.append(composite_propagator(
                    family, t, s, list(ranks.breakpoints),
                    rtol=tl.rank_rtol, projectors=projectors))
        except NotDivisibleError as exc:
            prop_fail = exc
            break
    if prop_fail is not None:
        verdict_notes.append(str(prop_fail))
        return DivisibilityVerdict(status=DivisibilityStatus.NOT_DIVISIBLE, **base)

    worst_choi = min(pr.cp_full[1] for pr in props)
    worst_tp = max(pr.tp_full_residual for pr in props)
    base.update(worst_choi_min_eig=worst_choi, worst_tp_residual=worst_tp,
                projectors=tuple(sorted(projectors.items())))

    cptp_ok = worst_choi >= -tl.choi_tol and worst_tp <= tl.tp_tol
    if cptp_ok and (ranks.invertible_everywhere or img_ok):
        return DivisibilityVerdict(status=DivisibilityStatus.CP_DIVISIBLE, **base)

    if worst_tp <= tl.tp_tol and (ranks.invertible_everywhere or (img_ok and projectors)):
        # CP failed; probe P-divisibility by sampling (evidence, not proof).
        p_min = _positivity_sampling(props, family.dim, tl.positivity_samples, tl.seed)
        from .witnesses import witness_scan
        rec = witness_scan(family, times, ancilla_kind="none",
                           n_samples=tl.witness_samples, n_refine=4, seed=tl.seed)
        base.update(p_sampling_min_eig=p_min, witness_max_backflow=rec.max_backflow)
        fd_budget = tl.fd_tol + 10.0 * float(np.max(np.diff(times))) ** 2
        if p_min >= -tl.positivity_tol and rec.max_backflow <= fd_budget:
            verdict_notes.append(
                "P-divisibility supported by sampling and witness scan; not a certificate")
            return DivisibilityVerdict(status=DivisibilityStatus.P_DIVISIBLE, **base)
        return DivisibilityVerdict(status=DivisibilityStatus.DIVISIBLE_ONLY, **base)

    # Image rotates (or projectors failed): the best that can be certified
    # without an extension search is CP on the image.
    cp_img_min = _cp_on_image_sampling(family, props, tl.positivity_samples, tl.seed)
    base.update(p_sampling_min_eig=cp_img_min)
    if (cp_img_min >= -tl.positivity_tol
            and max(pr.tp_on_domain_residual for pr in props) <= tl.tp_tol):
        verdict_notes.append(
            "propagators are CPTP on the image by sampling; full-space "
            "trace preservation is not guaranteed by construction")
        return DivisibilityVerdict(status=DivisibilityStatus.CP_ON_IMAGE_ONLY, **base)
    return DivisibilityVerdict(status=DivisibilityStatus.DIVISIBLE_ONLY, **base)
