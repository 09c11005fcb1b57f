"""Two tangential discs: the best-approximation iteration at its touchiest.

The discs centered at (1, 1) and (-1, 1) with radius 1 meet only at (0, 1).
For a query point on the horizontal line through the tangency the iteration
converges and its shadow finds the tangency point; for any other query the
governing sequence drifts off to infinity -- but slowly, with a vanishing
step length, which is exactly the regime where norm-threshold divergence
tests need patience.
"""

import numpy as np

from aamr import Ball, Status, StoppingPolicy, aamr_solve

A = Ball([1.0, 1.0], 1.0)
B = Ball([-1.0, 1.0], 1.0)

print("discs touching at (0, 1); projecting q = (2, 1):")
res = aamr_solve(A, B, q=[2.0, 1.0], alpha=0.9, beta=0.7,
                 policy=StoppingPolicy.residual(eps=1e-12, max_iter=100_000))
print(f"  {res.status.value} after {res.iterations} iterations, "
      f"shadow = ({res.shadow[0]:.2e}, {res.shadow[1]:.6f})")

print("\nprojecting q = (0, 2), off the tangent line:")
for budget in (10**3, 10**4, 10**5):
    res = aamr_solve(A, B, q=[0.0, 2.0], alpha=0.9, beta=0.7,
                     policy=StoppingPolicy.budget_only(max_iter=budget))
    print(f"  after {budget:>6d} iterations: |x| = {np.linalg.norm(res.iterate):7.2f}, "
          f"step = {np.linalg.norm(res.drift):.2e}, shadow = "
          f"({res.shadow[0]:.1e}, {res.shadow[1]:.4f})")
print("  the norm keeps growing (~ budget^(1/3)) while the step length"
      " decays:\n  unbounded, but far from any fixed threshold.")

print("\nsame off-line query with a divergence threshold of 25:")
res = aamr_solve(A, B, q=[0.0, 2.0], alpha=0.9, beta=0.7,
                 policy=StoppingPolicy.budget_only(max_iter=150_000,
                                                   divergence_threshold=25.0))
assert res.status is Status.DIVERGED
print(f"  certified {res.status.value} at iteration {res.iterations}")
