"""Storage-cost minimization for width-preserving encoding.

Minimize f(n, l) = n^2 s + (m / (n s)) l over integer matrix sizes n and
per-operation local retention l, subject to the security constraint

    breach^p * d^(-(m/(n s)) * l) <= pu,    1 <= l <= n,  2 <= n <= 2^k - 1.

The relaxed objective is not convex (its Hessian has one negative
eigenvalue), but for fixed n the objective is increasing in l, so the
optimum is found by scanning n with l pinned at the smallest feasible
value. A full (n, l) enumeration is kept alongside as an oracle.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .codec import strict_width
from .errors import ConfigError, EnumerationTooLargeError, InfeasibleError

_BRUTE_FORCE_PAIR_LIMIT = 1 << 24


@dataclass(frozen=True)
class CostProblem:
    """Inputs of the cost minimization.

    m is the message length in base-d digits; all p clouds share one breach
    probability. Width-preserving mode must exist for (k, d).
    """

    m: int
    d: int
    k: int
    p: int
    breach: float
    pu: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ConfigError(f"message length must be >= 1, got {self.m}")
        if self.p < 1:
            raise ConfigError(f"cloud count must be >= 1, got {self.p}")
        if not 0 < self.breach <= 1:
            raise ConfigError(f"breach must be in (0, 1], got {self.breach}")
        if not 0 < self.pu <= 1:
            raise ConfigError(f"pu must be in (0, 1], got {self.pu}")
        strict_width(self.k, self.d)  # raises if unavailable

    @property
    def s(self) -> int:
        return strict_width(self.k, self.d)

    @property
    def curvature_a(self) -> float:
        """Quadratic coefficient of the relaxed objective: k / log2(d)."""
        return self.k / math.log2(self.d)

    @property
    def curvature_b(self) -> float:
        """Retention coefficient of the relaxed objective: m log2(d) / k."""
        return self.m * math.log2(self.d) / self.k

    @property
    def n_max(self) -> int:
        return (1 << self.k) - 1


@dataclass(frozen=True)
class CostSolution:
    """Optimizer output; alpha is the (real-valued) encoding-operation count."""

    n_star: int
    l_star: int
    f_star: float
    alpha: float
    feasible: bool = True


def _feasible(problem: CostProblem, n: np.ndarray, l: np.ndarray) -> np.ndarray:
    """Security constraint in log space, elementwise over n and l."""
    alpha = problem.m / (n * float(problem.s))
    lhs = problem.p * math.log(problem.breach) - alpha * l * math.log(problem.d)
    return lhs <= math.log(problem.pu)


def _cost(problem: CostProblem, n: np.ndarray, l: np.ndarray) -> np.ndarray:
    return n * n * float(problem.s) + (problem.m / (n * float(problem.s))) * l


def _min_retention(problem: CostProblem, ns: np.ndarray) -> np.ndarray:
    """Smallest l >= 1 satisfying the constraint for each n (may exceed n)."""
    ns = ns.astype(np.float64)
    target = problem.p * math.log(problem.breach) - math.log(problem.pu)
    # alpha * l * ln d >= target, alpha = m / (n s)
    raw = target / math.log(problem.d) * ns * problem.s / problem.m
    l = np.maximum(1, np.ceil(raw - 1e-12)).astype(np.int64)
    # settle float wobble against the same predicate the scan uses
    for _ in range(4):
        down = (l > 1) & _feasible(problem, ns, l - 1)
        if not down.any():
            break
        l[down] -= 1
    for _ in range(4):
        up = ~_feasible(problem, ns, l)
        if not up.any():
            break
        l[up] += 1
    return l


def local_retention_min(n: int, problem: CostProblem) -> int:
    """Smallest local retention l making matrix size n feasible (l may be > n)."""
    if not 2 <= n <= problem.n_max:
        raise ConfigError(f"n must be in [2, {problem.n_max}], got {n}")
    return int(_min_retention(problem, np.array([n]))[0])


def solve_cost(problem: CostProblem) -> CostSolution:
    """Scan n with l at its per-n minimum; ties break to smaller n, then l.

    Raises InfeasibleError when no n in [2, 2^k - 1] admits l <= n.
    """
    ns = np.arange(2, problem.n_max + 1, dtype=np.int64)
    ls = _min_retention(problem, ns)
    ok = ls <= ns
    if not ok.any():
        raise InfeasibleError(
            f"no matrix size in [2, {problem.n_max}] satisfies the "
            f"pu={problem.pu} budget with l <= n"
        )
    f = _cost(problem, ns[ok].astype(np.float64), ls[ok].astype(np.float64))
    best = int(np.argmin(f))  # first minimum: smallest feasible n wins ties
    n_star = int(ns[ok][best])
    l_star = int(ls[ok][best])
    return CostSolution(
        n_star=n_star,
        l_star=l_star,
        f_star=float(f[best]),
        alpha=problem.m / (n_star * problem.s),
    )


def brute_force_cost(problem: CostProblem) -> CostSolution:
    """Exhaustive scan of every (n, l) pair with the same tie-break."""
    pairs = (problem.n_max * (problem.n_max + 1)) // 2
    if pairs > _BRUTE_FORCE_PAIR_LIMIT:
        raise EnumerationTooLargeError(
            f"{pairs} (n, l) pairs exceed the enumeration bound "
            f"{_BRUTE_FORCE_PAIR_LIMIT}"
        )
    best: CostSolution | None = None
    for n in range(2, problem.n_max + 1):
        ls = np.arange(1, n + 1, dtype=np.float64)
        narr = np.full(n, float(n))
        ok = _feasible(problem, narr, ls)
        if not ok.any():
            continue
        f = _cost(problem, narr[ok], ls[ok])
        i = int(np.argmin(f))
        if best is None or f[i] < best.f_star:
            best = CostSolution(
                n_star=n,
                l_star=int(ls[ok][i]),
                f_star=float(f[i]),
                alpha=problem.m / (n * problem.s),
            )
    if best is None:
        raise InfeasibleError(
            f"no matrix size in [2, {problem.n_max}] satisfies the "
            f"pu={problem.pu} budget with l <= n"
        )
    return best


def hessian_eigenvalues(a: float, b: float, n: float, l: float) -> tuple[float, float]:
    """Eigenvalues of [[2a + 2bl/n^3, -b/n^2], [-b/n^2, 0]].

    The larger root comes from the quadratic formula; the smaller from the
    product identity lam+ * lam- = -b^2/n^4, which is stable when the
    discriminant nearly cancels. One eigenvalue is always <= 0, so the
    relaxed objective is never convex for b > 0.
    """
    if n <= 0:
        raise ConfigError(f"n must be positive, got {n}")
    h11 = 2 * a + 2 * b * l / n**3
    prod = -((b / n**2) ** 2)
    disc = math.sqrt(h11 * h11 - 4 * prod)
    lam_plus = (h11 + disc) / 2
    lam_minus = prod / lam_plus if lam_plus else 0.0
    return lam_plus, lam_minus


def hessian_spectrum(n: float, l: float, problem: CostProblem) -> tuple[float, float]:
    """Eigenvalue pair of the relaxed objective's Hessian at (n, l)."""
    return hessian_eigenvalues(problem.curvature_a, problem.curvature_b, n, l)


def sweep(problem: CostProblem, m_values) -> list[dict]:
    """Solve across message lengths; one row per m, infeasible rows flagged."""
    rows = []
    for m in m_values:
        prob = CostProblem(
            m=int(m), d=problem.d, k=problem.k, p=problem.p,
            breach=problem.breach, pu=problem.pu,
        )
        row = {
            "m": int(m), "d": prob.d, "k": prob.k, "p": prob.p,
            "q": prob.breach, "pu": prob.pu,
        }
        try:
            sol = solve_cost(prob)
            row.update(
                n_star=sol.n_star, l_star=sol.l_star,
                f_star=sol.f_star, feasible=True,
            )
        except InfeasibleError:
            row.update(n_star="", l_star="", f_star="", feasible=False)
        rows.append(row)
    return rows


SWEEP_COLUMNS = ["m", "d", "k", "p", "q", "pu", "n_star", "l_star", "f_star", "feasible"]


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
