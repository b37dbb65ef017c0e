"""Monotone splitting iterations for the extremal nonnegative solutions of A x^{m-1} = b."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse.csgraph import connected_components

from .spectral import classify, matrix_spectral_radius
from .splitting import PlanError, SplittingPlan, build_plan, default_kind
from .tensor import Tensor, contract, contract_matrix, is_z_tensor, power_vec, semi_symmetrize, subtensor

__all__ = [
    "PreconditionError",
    "NotZTensorError",
    "NotMTensorError",
    "NegativeInnerError",
    "MonotonicityError",
    "SolverOptions",
    "ReductionInfo",
    "SolveReport",
    "RateReport",
    "ComparisonReport",
    "ContinuityReport",
    "Perturbation",
    "DependenceReport",
    "step",
    "minimal_solve",
    "maximal_solve",
    "positive_solve",
    "make_upper_start",
    "detect_and_reduce",
    "estimate_rate",
    "rate_from_report",
    "measured_factor",
    "compare_splittings",
    "continuity_probe",
    "monotone_dependence_probe",
]

log = logging.getLogger(__name__)

CONVERGED = "converged"
DIVERGING = "diverging-unbounded"
PRECONDITION_FAILED = "precondition-failed"
MAX_ITER = "max-iter"


class PreconditionError(ValueError):
    """Input does not satisfy a solver precondition."""


class NotZTensorError(PreconditionError):
    pass


class NotMTensorError(PreconditionError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NegativeInnerError(ArithmeticError):
    """``P^{-1}(L x^{m-1} + b)`` has a negative component; ``inner`` holds it."""

    def __init__(self, inner):
        super().__init__("P^{-1}(L x^{m-1} + b) has a negative component")
        self.inner = inner


class MonotonicityError(AssertionError):
    """An accepted iterate broke monotonicity beyond rounding slack (a bug)."""


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 100_000
    zero_threshold: float | None = None
    divergence_bound: float = 1e150
    x0: object = "auto"
    keep_history: bool = False
    monotone_slack: float = 1e-15

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.divergence_bound > 0:
            raise ValueError("divergence_bound must be positive")
        if isinstance(self.x0, str) and self.x0 not in ("zero", "auto"):
            raise ValueError("x0 must be 'zero', 'auto' or a vector")


@dataclass(frozen=True)
class ReductionInfo:
    k0: int | None
    I: tuple
    I0: tuple
    reduced: bool

    def complement(self, n):
        zero = set(self.I)
        return tuple(i for i in range(n) if i not in zero)


@dataclass(frozen=True)
class SolveReport:
    status: str
    x: np.ndarray
    residual_inf: float
    iterations: int
    monotone: str
    monotone_verified: bool
    reduction: ReductionInfo
    steps: tuple = ()
    trace: tuple = ()
    history: list | None = None
    message: str = ""

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def measured_factor(self):
        return measured_factor(self.steps)


@dataclass(frozen=True)
class RateReport:
    phi_prime: np.ndarray
    rho: float
    conditions: dict
    measured_factor: float | None = None


def _as_vec(v, n, name):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({n},)")
    return v


def _target(b, tol):
    return tol * (np.max(np.abs(b), initial=0.0) + 1.0)


def _residual(A, b, x):
    return float(np.max(np.abs(contract(A, x) - b), initial=0.0))


def step(plan: SplittingPlan, x, b):
    """One splitting step ``x -> (P^{-1}(L x^{m-1} + b))^{[1/(m-1)]}``."""
    inner = plan.solve(plan.apply_L(x) + b)
    if np.any(inner < 0):
        raise NegativeInnerError(inner)
    return power_vec(inner, 1.0 / (plan.order - 1))


def _pattern(x, threshold):
    return tuple(np.flatnonzero(x <= threshold).tolist())


def measured_factor(steps, window=20, floor=1e-10):
    """Median ratio of successive step sizes over the last ``window`` clean steps.

    Steps smaller than ``floor`` times the largest step are rounding-dominated
    and are left out.
    """
    d = np.asarray(steps, dtype=np.float64)
    if d.size < 3:
        return None
    d = d[d > floor * d.max()]
    if d.size < 3:
        return None
    ratios = d[1:] / d[:-1]
    return float(np.median(ratios[-window:]))


def _default_plan(A, plan):
    if plan is None:
        return build_plan(A, default_kind(A.order))
    if plan.A is not A and not (plan.A == A):
        raise ValueError("plan was built for a different tensor")
    return plan


def _iterate(A, b, plan, x0, mode, opts):
    """Shared loop for the increasing (min) and decreasing (max) iterations."""
    n = A.dim
    sign = 1.0 if mode == "min" else -1.0
    thr = opts.zero_threshold
    if thr is None:
        thr = 0.0 if mode == "min" else 1e-13 * float(np.max(x0, initial=0.0))
    I0 = tuple(np.flatnonzero(b == 0).tolist())
    target = _target(b, opts.tol)

    keep = np.arange(n)
    cur_b, cur_plan = b, plan
    x_full = x0.copy()
    x = x_full.copy()
    history = [x_full.copy()] if opts.keep_history else None
    steps, trace = [], []
    k0, zero_set = None, ()
    prev_pattern = _pattern(x_full, thr)
    status, message = MAX_ITER, ""
    residual = _residual(A, b, x_full)
    k = 0

    def report(status, message=""):
        reduced = k0 is not None and 0 < len(zero_set) < n
        info = ReductionInfo(k0=k0, I=zero_set, I0=I0, reduced=reduced)
        return SolveReport(
            status=status,
            x=x_full.copy(),
            residual_inf=residual,
            iterations=k,
            monotone="increasing" if mode == "min" else "decreasing",
            monotone_verified=True,
            reduction=info,
            steps=tuple(steps),
            trace=tuple(trace),
            history=history,
            message=message,
        )

    if residual <= target:
        status = CONVERGED
    while status != CONVERGED and k < opts.max_iter:
        try:
            x_new = step(cur_plan, x, cur_b)
        except NegativeInnerError:
            return report(PRECONDITION_FAILED, "P^{-1}(L x^{m-1} + b) has a negative entry; the equation may have no nonnegative solution")
        delta = x_new - x
        slack = opts.monotone_slack * max(float(np.max(np.abs(x), initial=0.0)), 1e-300)
        worst = float(np.max(-sign * delta, initial=0.0))
        if worst > slack:
            raise MonotonicityError(
                f"{mode} iteration step {k + 1} moved against monotone direction by {worst!r}"
            )
        k += 1
        x = x_new
        x_full = np.zeros(n)
        x_full[keep] = x
        steps.append(float(np.max(np.abs(delta), initial=0.0)))
        if history is not None:
            history.append(x_full.copy())
        norm = float(np.max(np.abs(x), initial=0.0))
        if not np.isfinite(norm) or norm > opts.divergence_bound:
            residual = float("inf")
            return report(DIVERGING, f"iterate norm exceeded {opts.divergence_bound!r}; no nonnegative solution is reachable")
        residual = _residual(A, b, x_full)
        trace.append((k, residual, norm))

        if k0 is None:
            pattern = _pattern(x_full, thr)
            if pattern == prev_pattern:
                k0, zero_set = k - 1, pattern
                if 0 < len(zero_set) < n:
                    keep = np.array(sorted(set(range(n)) - set(zero_set)), dtype=np.int64)
                    cur_b = b[keep]
                    cur_plan = plan.restrict(keep)
                    x = x_full[keep]
                    x_full = np.zeros(n)
                    x_full[keep] = x
                    log.debug("reduced to %d coordinates at k0=%d", keep.size, k0)
            prev_pattern = pattern

        if residual <= target:
            status = CONVERGED
        elif steps[-1] == 0.0:
            message = "iteration stagnated above the residual tolerance"
            break

    if k0 is None and status == CONVERGED:
        # settle the zero pattern with one probe step that is not counted
        try:
            probe = np.zeros(n)
            probe[keep] = step(cur_plan, x, cur_b)
            if _pattern(probe, thr) == _pattern(x_full, thr):
                k0, zero_set = k, _pattern(x_full, thr)
        except NegativeInnerError:
            pass
    return report(status, message)


def minimal_solve(A: Tensor, b, plan=None, opts=None) -> SolveReport:
    """Minimal nonnegative solution from ``x0 = 0`` (increasing iterates)."""
    opts = opts or SolverOptions()
    b = _as_vec(b, A.dim, "b")
    if not is_z_tensor(A):
        raise NotZTensorError("minimal solve requires a Z-tensor")
    if np.any(b < 0):
        raise PreconditionError("minimal solve requires b >= 0")
    if not isinstance(opts.x0, str):
        raise PreconditionError("minimal solve always starts from x0 = 0")
    try:
        plan = _default_plan(A, plan)
    except PlanError as exc:
        raise PreconditionError(str(exc)) from exc
    return _iterate(A, b, plan, np.zeros(A.dim), "min", opts)


def make_upper_start(A: Tensor, b, plan=None, opts=None):
    """A start vector above the maximal solution for every given right side.

    Solves ``A x^{m-1} = b_hat`` with ``b_hat = max(b_1, ..., b_p, delta e)``
    and scales the result so that ``A x0^{m-1} >= b_hat`` holds exactly.
    """
    opts = opts or SolverOptions()
    rhs = [np.asarray(b, dtype=np.float64)] if np.ndim(b) == 1 else [np.asarray(v, dtype=np.float64) for v in b]
    for v in rhs:
        _as_vec(v, A.dim, "b")
    bmax = np.max(np.vstack(rhs), axis=0)
    delta = max(1.0, float(np.max(bmax, initial=0.0)))
    b_hat = np.maximum(bmax, delta)
    # the auxiliary solve keeps the default budget; opts.max_iter bounds the main run
    aux = replace(opts, x0="auto", max_iter=SolverOptions.max_iter, keep_history=False)
    rep = positive_solve(A, b_hat, plan, aux, _skip_classify=True)
    if not rep.converged:
        raise PreconditionError(f"upper start solve ended with status {rep.status}")
    y = contract(A, rep.x)
    if np.any(y <= 0):
        raise PreconditionError("upper start does not satisfy A x0^{m-1} > 0")
    t = (float(np.max(b_hat / y)) * (1.0 + 1e-10)) ** (1.0 / (A.order - 1))
    return t * rep.x


def maximal_solve(A: Tensor, b, plan=None, opts=None) -> SolveReport:
    """Maximal nonnegative solution from an upper start (decreasing iterates)."""
    opts = opts or SolverOptions()
    b = _as_vec(b, A.dim, "b")
    cert = classify(A)
    if not cert.is_nonsingular_m:
        raise NotMTensorError(
            f"maximal solve requires a nonsingular M-tensor (classified {cert.classification})", cert
        )
    try:
        plan = _default_plan(A, plan)
    except PlanError as exc:
        raise PreconditionError(str(exc)) from exc
    if isinstance(opts.x0, str):
        if opts.x0 == "zero":
            raise PreconditionError("maximal solve needs a start with A x0^{m-1} >= b")
        x0 = make_upper_start(A, b, plan, opts)
    else:
        x0 = _as_vec(opts.x0, A.dim, "x0")
        y = contract(A, x0)
        if np.any(x0 <= 0) or np.any(y <= 0) or np.any(y < b):
            raise PreconditionError("explicit x0 must satisfy x0 > 0, A x0^{m-1} > 0 and A x0^{m-1} >= b")
    return _iterate(A, b, plan, x0, "max", opts)


def positive_solve(A: Tensor, b, plan=None, opts=None, cross_check=False, _skip_classify=False):
    """The unique positive solution for ``b > 0`` (minimal iteration from zero)."""
    opts = opts or SolverOptions()
    b = _as_vec(b, A.dim, "b")
    if np.any(b <= 0):
        raise PreconditionError("positive solve requires b > 0")
    if not _skip_classify:
        cert = classify(A)
        if not cert.is_nonsingular_m:
            raise NotMTensorError(f"positive solve requires a nonsingular M-tensor ({cert.classification})", cert)
    rep = minimal_solve(A, b, plan, replace(opts, x0="zero"))
    if cross_check and rep.converged:
        other = maximal_solve(A, b, plan, replace(opts, x0="auto"))
        gap = float(np.max(np.abs(other.x - rep.x)))
        agree = gap <= 10 * opts.tol
        rep = replace(rep, message=f"minimal/maximal agreement gap {gap:.3e} ({'agree' if agree else 'DISAGREE'})")
    return rep


def detect_and_reduce(A: Tensor, b, iterates, zero_threshold=0.0):
    """Find the first repeated zero pattern in ``iterates`` and reduce the equation.

    Returns ``(ReductionInfo, reduced A, reduced b)``; when no reduction
    applies the original tensor and vector are returned.
    """
    b = _as_vec(b, A.dim, "b")
    n = A.dim
    I0 = tuple(np.flatnonzero(b == 0).tolist())
    patterns = [_pattern(np.asarray(x), zero_threshold) for x in iterates]
    for k0 in range(len(patterns) - 1):
        if patterns[k0] == patterns[k0 + 1]:
            I = patterns[k0]
            reduced = 0 < len(I) < n
            info = ReductionInfo(k0=k0, I=I, I0=I0, reduced=reduced)
            if not reduced:
                return info, A, b
            keep = [i for i in range(n) if i not in set(I)]
            return info, subtensor(A, keep), b[keep]
    return ReductionInfo(k0=None, I=(), I0=I0, reduced=False), A, b


def _strongly_connected(G):
    n = G.shape[0]
    if n == 1:
        return bool(G[0, 0] != 0)
    ncomp, _ = connected_components(G != 0, directed=True, connection="strong")
    return ncomp == 1


def _strictly_triangular(G):
    if np.any(np.diag(G) != 0):
        return False
    return np.array_equal(G, np.triu(G)) or np.array_equal(G, np.tril(G))


def _flag(ok):
    return "holds" if ok else "fails"


def estimate_rate(A: Tensor, b, plan: SplittingPlan, x_star, report=None) -> RateReport:
    """Jacobian of the fixed-point map at ``x_star``, its spectral radius and the
    four sufficient conditions for linear convergence.

    ``x_star`` must be positive; reduce the equation first otherwise.
    """
    b = _as_vec(b, A.dim, "b")
    x_star = _as_vec(x_star, A.dim, "x_star")
    if np.any(x_star <= 0):
        raise PreconditionError("x_star has zero components; reduce the equation first")
    m, n = A.order, A.dim
    L_bar = semi_symmetrize(plan.L)
    G = contract_matrix(L_bar, x_star)
    PinvG = np.column_stack([plan.solve(G[:, j]) for j in range(n)])
    phi = PinvG / power_vec(x_star, m - 2)[:, None] if m > 2 else PinvG
    phi = np.maximum(phi, 0.0)  # P^{-1} >= 0 and G >= 0; clears signed zeros only
    rho = matrix_spectral_radius(phi)

    I0 = set(np.flatnonzero(b == 0).tolist())
    cond_a = bool(np.all(plan.solve(b) > 0))
    G_e = contract_matrix(L_bar, np.ones(n))
    cond_b = _strongly_connected(np.column_stack([plan.solve(G_e[:, j]) for j in range(n)]))
    if np.any(np.diag(plan.Q) != 0):
        cond_c = "not-applicable"
    else:
        D = Tensor(m, n, np.repeat(np.arange(n)[:, None], m, axis=1), A.diagonal())
        B_bar = semi_symmetrize(D - A)
        cond_c = _flag(_strictly_triangular(contract_matrix(B_bar, np.ones(n))))
    if not I0:
        cond_d = "not-applicable"
    else:
        ok = True
        for i in I0:
            rows = A.indices[:, 0] == i
            tails = A.indices[rows, 1:]
            if not any(any(t not in I0 for t in tail) for tail in tails.tolist()):
                ok = False
                break
        cond_d = _flag(ok)
    conditions = {"a": _flag(cond_a), "b": _flag(cond_b), "c": cond_c, "d": cond_d}
    factor = report.measured_factor if report is not None else None
    return RateReport(phi_prime=phi, rho=rho, conditions=conditions, measured_factor=factor)


def rate_from_report(A: Tensor, b, plan: SplittingPlan, report: SolveReport):
    """Rate analysis at a computed solution, on the equation reduced to its support.

    Returns ``(RateReport, kept_indices)``.
    """
    b = _as_vec(b, A.dim, "b")
    keep = np.flatnonzero(report.x > 0)
    if keep.size == 0:
        raise PreconditionError("solution is identically zero; no rate to analyse")
    if keep.size < A.dim:
        A, b, plan = subtensor(A, keep), b[keep], plan.restrict(keep)
    return estimate_rate(A, b, plan, report.x[keep], report), keep


@dataclass(frozen=True)
class ComparisonReport:
    mode: str
    steps: int
    smaller_q: str
    holds: bool
    first_violation: int | None
    max_violation: float
    iterates_a: list = field(default_factory=list, repr=False)
    iterates_b: list = field(default_factory=list, repr=False)


def _run_steps(plan, b, x0, steps, mode):
    xs = [x0]
    x = x0
    sign = 1.0 if mode == "min" else -1.0
    for k in range(steps):
        x_new = step(plan, x, b)
        slack = 1e-15 * max(float(np.max(x, initial=0.0)), 1e-300)
        if np.max(-sign * (x_new - x), initial=0.0) > slack:
            raise MonotonicityError(f"{mode} comparison run lost monotonicity at step {k + 1}")
        x = x_new
        xs.append(x)
    return xs


def compare_splittings(A, b, plan_a, plan_b, mode="min", steps=200, x0=None, slack=1e-14):
    """Run two splittings side by side and check termwise ordering.

    With ``Q_hat <= Q`` the smaller-Q iterates stay above (min mode) or
    below (max mode) the other run at every step. ``slack`` is the absolute
    rounding allowance relative to the iterate size.
    """
    b = _as_vec(b, A.dim, "b")
    if np.all(plan_a.Q <= plan_b.Q):
        smaller = "a" if not np.array_equal(plan_a.Q, plan_b.Q) else "equal"
    elif np.all(plan_b.Q <= plan_a.Q):
        smaller = "b"
    else:
        raise ValueError("the two splittings have incomparable Q matrices")
    if mode == "min":
        start = np.zeros(A.dim)
    elif mode == "max":
        start = make_upper_start(A, b, plan_a) if x0 is None else _as_vec(x0, A.dim, "x0")
    else:
        raise ValueError("mode must be 'min' or 'max'")
    xa = _run_steps(plan_a, b, start, steps, mode)
    xb = _run_steps(plan_b, b, start, steps, mode)
    fast, slow = (xa, xb) if smaller in ("a", "equal") else (xb, xa)
    first, worst = None, 0.0
    for k, (f, s) in enumerate(zip(fast, slow)):
        # min mode: fast >= slow; max mode: fast <= slow
        gap = (s - f) if mode == "min" else (f - s)
        if smaller == "equal":
            gap = np.abs(f - s)
        allowed = slack * max(float(np.max(np.abs(s), initial=0.0)), 1e-300)
        v = float(np.max(gap, initial=0.0))
        worst = max(worst, v)
        if v > allowed and first is None:
            first = k
    return ComparisonReport(mode, steps, smaller, first is None, first, worst, xa, xb)


@dataclass(frozen=True)
class ContinuityReport:
    solutions: list
    monotone: bool
    x_max: np.ndarray
    gap: float
    above_max: bool


def continuity_probe(A, b, seq_len=20, opts=None):
    """Solve with ``b + 2^{-k} e`` for ``k = 1..seq_len`` and watch the limit."""
    opts = opts or SolverOptions()
    b = _as_vec(b, A.dim, "b")
    if np.any(b < 0):
        raise PreconditionError("continuity probe needs b >= 0")
    sols = []
    for k in range(1, seq_len + 1):
        rep = positive_solve(A, b + 2.0**-k, opts=opts)
        sols.append(rep.x)
    allow = 10 * opts.tol
    monotone = all(np.all(sols[i + 1] <= sols[i] + allow) for i in range(len(sols) - 1))
    x_max = maximal_solve(A, b, opts=opts).x
    gap = float(np.max(np.abs(sols[-1] - x_max)))
    above = bool(np.all(sols[-1] >= x_max - allow))
    return ContinuityReport(sols, monotone, x_max, gap, above)


@dataclass(frozen=True)
class Perturbation:
    """Change one entry of ``b`` (``target="b"``, index ``i``) or of ``A``
    (``target="A"``, index tuple) to ``value``."""

    target: str
    index: object
    value: float


@dataclass(frozen=True)
class DependenceReport:
    checks: dict
    holds: bool
    note: str = ""


def _perturbed(A, b, p: Perturbation):
    if p.target == "b":
        b2 = b.copy()
        old = b2[p.index]
        b2[p.index] = p.value
        return A, b2, old
    if p.target == "A":
        idx = tuple(p.index)
        old = 0.0
        for t, v in A.entries():
            if t == idx:
                old = v
        delta = Tensor.from_entries(A.order, A.dim, [(idx, p.value - old)])
        return A + delta, b, old
    raise ValueError("perturbation target must be 'A' or 'b'")


def monotone_dependence_probe(A, b, perturbation: Perturbation, opts=None, atol=1e-9):
    """Check how the extremal solutions move under an admissible perturbation.

    Lowering ``b`` (kept nonnegative), raising a diagonal entry or moving an
    off-diagonal entry toward zero can only lower the minimal solution.
    Raising ``b`` or lowering any entry can only raise the maximal solution,
    provided the tensor stays a nonsingular M-tensor.
    """
    opts = opts or SolverOptions()
    b = _as_vec(b, A.dim, "b").copy()
    A2, b2, old = _perturbed(A, b, perturbation)
    new = perturbation.value
    p = perturbation
    diagonal = p.target == "A" and len(set(p.index)) == 1
    lowers_min = (p.target == "b" and 0 <= new <= old) or (
        p.target == "A" and ((diagonal and new >= old) or (not diagonal and old <= new <= 0))
    )
    raises_max = (p.target == "b" and new >= old) or (p.target == "A" and new <= old)
    checks, notes = {}, []
    if lowers_min:
        x0 = minimal_solve(A, b, opts=opts).x
        x1 = minimal_solve(A2, b2, opts=opts).x
        checks["min_nonincreasing"] = bool(np.all(x1 <= x0 + atol))
    if raises_max:
        if classify(A2).is_nonsingular_m and classify(A).is_nonsingular_m:
            x0 = maximal_solve(A, b, opts=opts).x
            x1 = maximal_solve(A2, b2, opts=opts).x
            checks["max_nondecreasing"] = bool(np.all(x1 >= x0 - atol))
        else:
            notes.append("perturbed tensor is not a nonsingular M-tensor; maximal ordering not asserted")
    if not lowers_min and not raises_max:
        notes.append("perturbation is outside the admissible classes")
    return DependenceReport(checks, all(checks.values()), "; ".join(notes))
