import csv
import io
import math

import numpy as np
import pytest

from ncss import optimizer
from ncss.errors import ConfigError, EnumerationTooLargeError, InfeasibleError
from ncss.optimizer import CostProblem


BASE = CostProblem(m=1024, d=2, k=8, p=3, breach=0.5, pu=1e-6)


class TestCostProblem:
    def test_validation(self):
        with pytest.raises(ConfigError):
            CostProblem(m=0, d=2, k=8, p=3, breach=0.5, pu=1e-6)
        with pytest.raises(ConfigError):
            CostProblem(m=10, d=2, k=8, p=0, breach=0.5, pu=1e-6)
        with pytest.raises(ConfigError):
            CostProblem(m=10, d=2, k=8, p=1, breach=0.0, pu=1e-6)
        with pytest.raises(ConfigError):
            CostProblem(m=10, d=2, k=8, p=1, breach=0.5, pu=2.0)
        with pytest.raises(ConfigError):
            # no width-preserving s for d=8, k=4
            CostProblem(m=10, d=8, k=4, p=1, breach=0.5, pu=0.5)

    def test_derived_constants(self):
        assert BASE.s == 8
        assert BASE.curvature_a == 8.0
        assert BASE.curvature_b == 128.0
        prob = CostProblem(m=1, d=4, k=2, p=1, breach=0.5, pu=1.0)
        assert prob.curvature_a == 1.0
        assert prob.curvature_b == 1.0


class TestLocalRetentionMin:
    def test_worked_instance(self):
        assert optimizer.local_retention_min(2, BASE) == 1

    def test_vacuous_constraint_floors_at_one(self):
        prob = CostProblem(m=100, d=2, k=8, p=1, breach=0.4, pu=0.5)
        assert prob.breach**prob.p <= prob.pu
        for n in (2, 5, 100):
            assert optimizer.local_retention_min(n, prob) == 1

    def test_tiny_budget_exceeds_n(self):
        prob = CostProblem(m=16, d=2, k=8, p=3, breach=0.5, pu=1e-30)
        for n in range(2, prob.n_max + 1):
            assert optimizer.local_retention_min(n, prob) > n

    def test_matches_naive_search(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            prob = CostProblem(
                m=int(rng.integers(1, 10**5)),
                d=2,
                k=int(rng.choice([4, 8])),
                p=int(rng.integers(1, 5)),
                breach=float(rng.uniform(0.05, 1.0)),
                pu=float(10.0 ** rng.uniform(-10, 0)),
            )
            n = int(rng.integers(2, prob.n_max + 1))
            alpha = prob.m / (n * prob.s)
            l = 1
            while prob.breach**prob.p * prob.d ** -(alpha * l) > prob.pu:
                l += 1
            got = optimizer.local_retention_min(n, prob)
            # both sides evaluate the same inequality, modulo log-space
            # rounding; they may disagree only on exact-equality knife edges
            assert abs(got - l) <= 0, (prob, n)

    def test_rejects_bad_n(self):
        with pytest.raises(ConfigError):
            optimizer.local_retention_min(1, BASE)
        with pytest.raises(ConfigError):
            optimizer.local_retention_min(256, BASE)


class TestSolveCost:
    def test_worked_instance(self):
        sol = optimizer.solve_cost(BASE)
        assert (sol.n_star, sol.l_star) == (2, 1)
        assert sol.f_star == pytest.approx(96.0)
        assert sol.alpha == pytest.approx(64.0)

    def test_vacuous_budget_small_message(self):
        prob = CostProblem(m=100, d=2, k=8, p=3, breach=0.5, pu=1.0)
        sol = optimizer.solve_cost(prob)
        s = prob.s
        assert (sol.n_star, sol.l_star) == (2, 1)
        assert sol.f_star == pytest.approx(4 * s + prob.m / (2 * s))

    def test_infeasible(self):
        prob = CostProblem(m=16, d=2, k=8, p=3, breach=0.5, pu=1e-30)
        with pytest.raises(InfeasibleError):
            optimizer.solve_cost(prob)
        with pytest.raises(InfeasibleError):
            optimizer.brute_force_cost(prob)

    def test_oracle_equivalence_sample(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 25:
            prob = CostProblem(
                m=int(rng.integers(100, 10**6)),
                d=int(rng.choice([2, 4])),
                k=int(rng.choice([4, 8])),
                p=int(rng.integers(1, 5)),
                breach=float(rng.uniform(0.05, 0.95)),
                pu=float(10.0 ** rng.uniform(-12, -2)),
            )
            try:
                fast = optimizer.solve_cost(prob)
            except InfeasibleError:
                with pytest.raises(InfeasibleError):
                    optimizer.brute_force_cost(prob)
                continue
            slow = optimizer.brute_force_cost(prob)
            assert (fast.n_star, fast.l_star, fast.f_star) == (
                slow.n_star, slow.l_star, slow.f_star,
            )
            checked += 1

    def test_brute_force_enumeration_guard(self):
        prob = CostProblem(m=10**6, d=2, k=16, p=3, breach=0.5, pu=1e-6)
        with pytest.raises(EnumerationTooLargeError):
            optimizer.brute_force_cost(prob)

    def test_matrix_size_nondecreasing_in_m(self):
        last = 0
        for exp in range(7, 19):
            prob = CostProblem(m=2**exp, d=2, k=8, p=3, breach=0.5, pu=1e-3)
            sol = optimizer.solve_cost(prob)
            assert sol.n_star >= last
            last = sol.n_star


class TestHessian:
    def test_unit_example(self):
        lam_plus, lam_minus = optimizer.hessian_eigenvalues(1, 1, 1, 1)
        assert lam_plus == pytest.approx(2 + math.sqrt(5), rel=1e-12)
        assert lam_minus == pytest.approx(2 - math.sqrt(5), rel=1e-12)

    def test_from_problem(self):
        prob = CostProblem(m=1, d=4, k=2, p=1, breach=0.5, pu=1.0)
        lam_plus, lam_minus = optimizer.hessian_spectrum(1, 1, prob)
        assert lam_plus == pytest.approx(2 + math.sqrt(5), rel=1e-12)
        assert lam_minus == pytest.approx(2 - math.sqrt(5), rel=1e-12)

    def test_degenerate_b_zero(self):
        assert optimizer.hessian_eigenvalues(3.0, 0.0, 5, 2) == (6.0, 0.0)

    def test_product_identity_and_sign(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            prob = CostProblem(
                m=int(rng.integers(1, 10**7)),
                d=int(rng.choice([2, 4, 16])),
                k=int(rng.choice([4, 8, 16])),
                p=int(rng.integers(1, 5)),
                breach=0.5,
                pu=1e-6,
            )
            n = int(rng.integers(2, prob.n_max + 1))
            l = int(rng.integers(1, n + 1))
            lam_plus, lam_minus = optimizer.hessian_spectrum(n, l, prob)
            want = -(prob.curvature_b**2) / float(n) ** 4
            assert lam_plus > 0 > lam_minus
            assert lam_plus * lam_minus == pytest.approx(want, rel=1e-9)


class TestSweep:
    def test_rows_and_csv(self):
        rows = optimizer.sweep(BASE, [128, 1024, 16, 2**20])
        text = optimizer.sweep_csv(rows)
        parsed = list(csv.DictReader(io.StringIO(text)))
        assert len(parsed) == 4
        assert parsed[1]["n_star"] == "2"
        assert parsed[1]["f_star"] == "96.0"
        assert all(r["feasible"] in ("True", "False") for r in parsed)

    def test_infeasible_row(self):
        prob = CostProblem(m=16, d=2, k=8, p=3, breach=0.5, pu=1e-30)
        rows = optimizer.sweep(prob, [16])
        assert rows[0]["feasible"] is False
        assert rows[0]["n_star"] == ""
