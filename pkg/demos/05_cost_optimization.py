"""Storage-cost minimization: matrix size vs local retention.

Cost f(n, l) = n^2 s + (m / n s) l: the matrix itself is stored locally
(quadratic term) and every encoding operation retains l digits locally.
The security constraint couples them; the scan pins l at its per-n minimum
and the exhaustive oracle confirms the scan.
"""

from ncss import optimizer
from ncss.optimizer import CostProblem

base = CostProblem(m=1024, d=2, k=8, p=3, breach=0.5, pu=1e-6)
sol = optimizer.solve_cost(base)
print(f"m=1024, k=8, p=3, breach=0.5, pu=1e-6")
print(f"  -> n*={sol.n_star}, l*={sol.l_star}, cost f*={sol.f_star:g} digits "
      f"({sol.alpha:g} encoding operations)")

oracle = optimizer.brute_force_cost(base)
print(f"  exhaustive oracle agrees: n*={oracle.n_star}, l*={oracle.l_star}, "
      f"f*={oracle.f_star:g}")

# the relaxed objective is not convex: one Hessian eigenvalue is negative
lam_plus, lam_minus = optimizer.hessian_spectrum(sol.n_star, sol.l_star, base)
print(f"\nHessian eigenvalues at the optimum: {lam_plus:.3f}, {lam_minus:.3e}")
print(f"product -b^2/n^4 = {-(base.curvature_b**2) / sol.n_star**4:.3e}")

# matrix size grows with the message in steps; cost curves for different
# budgets merge once l* hits its floor of 1
print("\n      m      n*(k=8)  l*   f*(pu=1e-6)   f*(pu=1e-9)")
for exp in range(8, 23, 2):
    m = 2**exp
    row = []
    for pu in (1e-6, 1e-9):
        s = optimizer.solve_cost(
            CostProblem(m=m, d=2, k=8, p=3, breach=0.5, pu=pu)
        )
        row.append(s)
    print(f"{m:>9}  {row[0].n_star:>7}  {row[0].l_star:>3} "
          f"{row[0].f_star:>13.1f} {row[1].f_star:>13.1f}")

print("\nlarger fields prefer smaller matrices at large m:")
for k in (8, 16):
    s = optimizer.solve_cost(
        CostProblem(m=2**22, d=2, k=k, p=3, breach=0.5, pu=1e-6)
    )
    print(f"  k={k}: n*={s.n_star}, f*={s.f_star:.0f}")

# CSV sweeps feed plotting pipelines
rows = optimizer.sweep(base, [2**e for e in range(7, 13)])
print("\nsweep CSV:")
print(optimizer.sweep_csv(rows))
