"""Best-approximation drivers.

Each solver finds (or monitors progress toward) the point of an intersection
of convex sets closest to a query point ``q``, reporting through the shared
:class:`~aamr.operators.SolveResult` /`StoppingPolicy` contract:

* ``aamr_solve`` / ``aamr_product_solve``: averaged alternating modified
  reflections on the q-shifted sets; the monitored "shadow" point is
  ``P_A(x_k + q)`` (resp. ``q`` + the block mean in the product space).
* ``map_solve`` / ``rap_solve``: (relaxed) alternating projections.
* ``dr_solve``: Douglas-Rachford on the unshifted sets, monitoring
  ``P_A(x_k)``; solves the best approximation problem for affine subspaces.
* ``haugazeau_solve``: anchored halfspace-intersection steps, strongly
  convergent to the projection of the starting point.
* ``hlwb_solve``: Halpern-type anchored projections with weights 1/(n+1).
* ``cm_solve``: Combettes' strongly convergent product-space recurrence.

All comparison methods start at ``x0 = q``; the AAMR and CM drivers accept an
arbitrary starting point.
"""

import math

import numpy as np

from .operators import (AamrOperator, DrOperator, NumericalFailure, SolveResult,
                        StoppingPolicy, iterate)
from .sets import (ConvexSet, Diagonal, ProductSet, Translate, as_vector)

__all__ = [
    "aamr_solve",
    "aamr_product_solve",
    "map_solve",
    "rap_solve",
    "dr_solve",
    "haugazeau_solve",
    "hlwb_solve",
    "cm_solve",
    "cm_recurrence",
    "combettes_beta",
    "optimal_rap_mu",
    "recommended_beta",
    "MethodSpec",
    "solve_best_approximation",
]


def _default_policy(policy):
    if policy is None:
        return StoppingPolicy.residual(eps=1e-8)
    return policy


def optimal_rap_mu(theta: float) -> float:
    """Relaxation parameter 2/(1 + sin^2 theta) minimizing the RAP rate for
    a subspace pair with Friedrichs angle ``theta``."""
    return 2.0 / (1.0 + math.sin(theta) ** 2)


def recommended_beta(theta: float) -> float:
    """Angle-based reflection-strength rule fitted on subspace benchmarks:
    0.596*exp(-1.387*theta) + 0.393."""
    return 0.596 * math.exp(-1.387 * theta) + 0.393


def combettes_beta(gamma: float) -> float:
    """Reflection strength equivalent to the CM blending parameter:
    beta = 1/(1 + gamma)."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return 1.0 / (1.0 + gamma)


def _aamr_stepper(a_shift, b_shift, alpha, beta):
    """Step callable for constant or scheduled alpha."""
    if not callable(alpha):
        return AamrOperator(a_shift, b_shift, alpha, beta)
    # schedule hook: alpha(k) must stay in (0, 1] with inf alpha_k > 0;
    # relies on the engine applying the operator exactly once per iteration
    base = AamrOperator(a_shift, b_shift, 1.0, beta)
    counter = [0]

    def step(x):
        a_k = float(alpha(counter[0]))
        counter[0] += 1
        if not 0.0 < a_k <= 1.0:
            raise ValueError(f"alpha schedule left (0, 1] at step {counter[0] - 1}")
        return (1.0 - a_k) * x + a_k * base(x)

    return step


def aamr_solve(a_set: ConvexSet, b_set: ConvexSet, q, x0=None, alpha=0.9,
               beta: float = 0.7, policy: StoppingPolicy | None = None) -> SolveResult:
    """Project ``q`` onto ``A ∩ B`` by averaged alternating modified reflections.

    Iterates the operator built on the shifted sets ``A - q`` and ``B - q``
    from ``x0`` (any point; defaults to ``q``).  The monitored shadow point is
    ``P_A(x_k + q)``, which converges strongly to the projection of ``q`` when
    the governing sequence converges; when it does not, the iterate norm grows
    without bound.  ``alpha`` may be a constant in (0, 1] or a callable
    ``k -> alpha_k`` schedule with ``inf alpha_k > 0``.
    """
    policy = _default_policy(policy)
    q = as_vector(q, a_set.dim)
    x0 = q if x0 is None else as_vector(x0, a_set.dim)
    op = _aamr_stepper(Translate(a_set, q), Translate(b_set, q), alpha, beta)
    return iterate(op, x0, policy, monitor=lambda x: a_set.project(x + q))


def aamr_product_solve(sets, q, x0=None, alpha=0.9, beta: float = 0.7,
                       policy: StoppingPolicy | None = None) -> SolveResult:
    """Project ``q`` onto an intersection of ``r`` sets via the product space.

    Runs ``aamr_solve`` in (R^n)^r with A the diagonal and B the product of
    the q-shifted sets.  The monitored point ``q + mean of the r blocks`` is
    the diagonal identification of the product-space shadow, so it always
    lives in the base space.  ``x0`` may be a base-space vector (tiled), an
    ``(r, n)`` array, or a flat ``r*n`` vector; default is the lift of ``q``.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one set")
    n = sets[0].dim
    copies = len(sets)
    for s in sets:
        if s.dim != n:
            raise ValueError("sets have mixed ambient dimensions")
    policy = _default_policy(policy)
    q = as_vector(q, n)
    if x0 is None:
        x0 = np.tile(q, copies)
    else:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape == (n,):
            x0 = np.tile(x0, copies)
        elif x0.shape == (copies, n):
            x0 = x0.ravel()
        x0 = as_vector(x0, copies * n)
    diag = Diagonal(copies, n)
    shifted = ProductSet([Translate(s, q) for s in sets])
    op = _aamr_stepper(diag, shifted, alpha, beta)
    monitor = lambda x: q + x.reshape(copies, n).mean(axis=0)
    return iterate(op, x0, policy, monitor=monitor)


def rap_solve(u_set: ConvexSet, v_set: ConvexSet, q, mu: float = 1.0,
              policy: StoppingPolicy | None = None) -> SolveResult:
    """Relaxed alternating projections x <- (1-mu)x + mu P_V(P_U(x)) from q."""
    if not 0.0 < mu < 2.0:
        raise ValueError("mu must lie in (0, 2)")
    if u_set.dim != v_set.dim:
        raise ValueError("sets have different ambient dimensions")
    policy = _default_policy(policy)
    q = as_vector(q, u_set.dim)

    def step(x):
        return (1.0 - mu) * x + mu * v_set.project(u_set.project(x))

    return iterate(step, q, policy)


def map_solve(u_set: ConvexSet, v_set: ConvexSet, q,
              policy: StoppingPolicy | None = None) -> SolveResult:
    """Alternating projections (RAP with mu = 1)."""
    return rap_solve(u_set, v_set, q, mu=1.0, policy=policy)


def dr_solve(a_set: ConvexSet, b_set: ConvexSet, q, alpha: float = 0.5,
             policy: StoppingPolicy | None = None) -> SolveResult:
    """Douglas-Rachford from ``x0 = q`` on the unshifted sets.

    The monitored point is ``P_A(x_k)``.  For affine subspaces this solves the
    best approximation problem; for general convex sets it finds some point of
    the intersection.
    """
    policy = _default_policy(policy)
    q = as_vector(q, a_set.dim)
    op = DrOperator(a_set, b_set, alpha)
    return iterate(op, q, policy, monitor=lambda x: a_set.project(x))


def _haugazeau_project(x, y, z):
    """Projection of x onto the two halfspaces encoded by (x, y, z).

    With pi = <x-y, y-z>, mu = ||x-y||^2, nu = ||y-z||^2, rho = mu*nu - pi^2:
    rho = 0 and pi >= 0 gives z; rho > 0 and pi*nu >= rho gives
    x + (1 + pi/nu)(z - y); rho > 0 and pi*nu < rho gives
    y + (nu/rho)(pi(x-y) + mu(z-y)).  The degenerate zero step z = y lands in
    the first branch (pi = nu = rho = 0) and returns y before any division.
    The remaining case means the halfspaces do not intersect, which signals
    inconsistent inputs.
    """
    d_xy = x - y
    d_yz = y - z
    pi = float(d_xy @ d_yz)
    mu = float(d_xy @ d_xy)
    nu = float(d_yz @ d_yz)
    rho = mu * nu - pi * pi
    if rho <= 1e-14 * max(mu * nu, 1e-300):  # rank-deficient Gram: rho == 0
        if pi >= 0.0:
            return z.copy()
        raise NumericalFailure("anchored halfspaces have empty intersection")
    if pi * nu >= rho:
        return x + (1.0 + pi / nu) * (z - y)
    return y + (nu / rho) * (pi * d_xy + mu * (z - y))


def haugazeau_solve(u_set: ConvexSet, v_set: ConvexSet, q,
                    policy: StoppingPolicy | None = None) -> SolveResult:
    """Anchored alternating scheme, strongly convergent to ``P_{U∩V}(q)``.

    Each step projects the anchor ``q`` onto the intersection of two
    halfspaces built from the current iterate and its projection onto U or V
    (alternating).  Inconsistent geometry is reported as a
    ``NUMERICAL_FAILURE`` status.
    """
    if u_set.dim != v_set.dim:
        raise ValueError("sets have different ambient dimensions")
    policy = _default_policy(policy)
    q = as_vector(q, u_set.dim)
    counter = [0]

    def step(x):
        current = u_set if counter[0] % 2 == 0 else v_set
        counter[0] += 1
        return _haugazeau_project(q, x, current.project(x))

    return iterate(step, q, policy)


def hlwb_solve(sets, q, policy: StoppingPolicy | None = None) -> SolveResult:
    """Anchored projections x_{k+1} = q/(k+1) + (1 - 1/(k+1)) P_{C_k}(x_k).

    Cycles through the sets; converges to the projection of ``q`` onto the
    intersection, slowly (the anchor weight decays like 1/k).
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one set")
    dim = sets[0].dim
    for s in sets:
        if s.dim != dim:
            raise ValueError("sets have mixed ambient dimensions")
    policy = _default_policy(policy)
    q = as_vector(q, dim)
    counter = [0]

    def step(x):
        k = counter[0]
        counter[0] += 1
        lam = 1.0 / (k + 1)
        return lam * q + (1.0 - lam) * sets[k % len(sets)].project(x)

    return iterate(step, q, policy)


def _lambda_schedule(lam):
    if callable(lam):
        return lam
    lam = float(lam)
    if not 0.0 < lam <= 2.0:
        raise ValueError("lambda must lie in (0, 2]")
    return lambda k: lam


def cm_recurrence(sets, q, gamma: float = 0.25, lam=1.8, form: str = "direct"):
    """Step and monitor callables for Combettes' product-space recurrence.

    The governing vector z lives in (R^n)^r.  The direct form is

        z <- (1 - lam/2) z + (lam/2) R_D(2 P_C((z + gamma*q)/(gamma + 1)) - z)

    with C the product set, D the diagonal and R_D its reflector.  The
    ``"recast"`` form rewrites the same update through a modified reflector of
    strength beta = 1/(1 + gamma) acting on the scaled-and-shifted product set
    (1/beta)C - ((1-beta)/beta) q; the two trajectories coincide exactly.

    The monitored point is the diagonal value of P_D P_C evaluated at the
    blend (z + gamma*q)/(gamma + 1) — the projection already computed inside
    the step — which converges to the projection of q onto the intersection.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one set")
    n = sets[0].dim
    copies = len(sets)
    for s in sets:
        if s.dim != n:
            raise ValueError("sets have mixed ambient dimensions")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    schedule = _lambda_schedule(lam)
    q = as_vector(q, n)
    q_lift = np.tile(q, copies)
    product = ProductSet(sets)
    diag = Diagonal(copies, n)
    beta = combettes_beta(gamma)
    counter = [0]

    def blend(z):
        return (z + gamma * q_lift) / (gamma + 1.0)

    def monitor(z):
        return diag.project(product.project(blend(z)))[:n]

    if form == "direct":
        def step(z):
            lam_k = float(schedule(counter[0]))
            counter[0] += 1
            if not 0.0 < lam_k <= 2.0:
                raise ValueError("lambda schedule left (0, 2]")
            w = 2.0 * product.project(blend(z)) - z
            return (1.0 - lam_k / 2.0) * z + (lam_k / 2.0) * (2.0 * diag.project(w) - w)
    elif form == "recast":
        shift = ((1.0 - beta) / beta) * q_lift

        def project_scaled(z):
            # P over (1/beta)C - shift, via the dilation and translation rules
            return product.project(beta * (z + shift)) / beta - shift

        def step(z):
            a_k = float(schedule(counter[0])) / 2.0
            counter[0] += 1
            if not 0.0 < a_k <= 1.0:
                raise ValueError("lambda schedule left (0, 2]")
            u = 2.0 * beta * project_scaled(z) - z
            return ((1.0 - a_k) * z + a_k * (2.0 * diag.project(u) - u)
                    + 2.0 * a_k * (1.0 - beta) * q_lift)
    else:
        raise ValueError(f"unknown form {form!r}; expected 'direct' or 'recast'")
    return step, monitor


def cm_solve(sets, q, gamma: float = 0.25, lam=1.8,
             policy: StoppingPolicy | None = None, x0=None,
             form: str = "direct", verify_forms: bool = False) -> SolveResult:
    """Combettes' strongly convergent method in the product space.

    ``lam`` is a constant in (0, 2] or a callable schedule with positive
    infimum; the default 1.8 corresponds to an averaging weight of 0.9.  With
    ``verify_forms=True`` the direct and recast recurrences are run in
    lockstep and checked to agree to 1e-12 at every step.
    """
    sets = list(sets)
    policy = _default_policy(policy)
    n = sets[0].dim
    q = as_vector(q, n)
    if x0 is None:
        z0 = np.tile(q, len(sets))
    else:
        x0 = np.asarray(x0, dtype=float)
        z0 = np.tile(as_vector(x0, n), len(sets)) if x0.shape == (n,) \
            else as_vector(x0.ravel(), len(sets) * n)
    step, monitor = cm_recurrence(sets, q, gamma=gamma, lam=lam, form=form)
    if not verify_forms:
        return iterate(step, z0, policy, monitor=monitor)

    other, _ = cm_recurrence(sets, q, gamma=gamma, lam=lam,
                             form="recast" if form == "direct" else "direct")
    mirror = [np.array(z0)]

    def checked(z):
        z_next = step(z)
        twin = other(mirror[0])
        scale = 1.0 + float(np.linalg.norm(z_next))
        if np.linalg.norm(twin - z_next) > 1e-12 * scale:
            raise NumericalFailure("direct and recast recurrences drifted apart")
        mirror[0] = twin
        return z_next

    return iterate(checked, z0, policy, monitor=monitor)


class MethodSpec:
    """Tagged description of a solver and its parameters.

    ``kind`` is one of aamr, drm, map, rap, haugazeau, hlwb, cm.  Unset
    parameters fall back at solve time: alpha to 0.9 (aamr) or 0.5 (drm), mu
    to the angle-optimal relaxation, beta to the angle-based rule (both need
    the instance angle), gamma to 0.25 and lambda to 1.8 for cm.
    """

    KINDS = ("aamr", "drm", "map", "rap", "haugazeau", "hlwb", "cm")

    def __init__(self, kind: str, alpha=None, beta=None, mu=None, gamma=None, lam=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown method {kind!r}; expected one of {self.KINDS}")
        self.kind = kind
        self.alpha = None if alpha is None else float(alpha)
        self.beta = None if beta is None else float(beta)
        self.mu = None if mu is None else float(mu)
        self.gamma = None if gamma is None else float(gamma)
        self.lam = lam
        if self.alpha is not None:
            hi_open = kind == "drm"
            if not (0.0 < self.alpha < 1.0 or (not hi_open and self.alpha == 1.0)):
                raise ValueError(f"alpha out of range for {kind}")
        if self.beta is not None and not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1); use the drm method for beta = 1")
        if self.mu is not None and not 0.0 < self.mu < 2.0:
            raise ValueError("mu must lie in (0, 2)")
        if self.gamma is not None and not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if self.lam is not None and not callable(self.lam) and not 0.0 < float(self.lam) <= 2.0:
            raise ValueError("lambda must lie in (0, 2]")

    def __repr__(self):
        parts = [f"{k}={getattr(self, k)}" for k in ("alpha", "beta", "mu", "gamma", "lam")
                 if getattr(self, k) is not None]
        return f"MethodSpec({self.kind}" + (", " + ", ".join(parts) if parts else "") + ")"

    def display(self) -> str:
        """Short human-readable label, e.g. ``aamr(a=0.9, b=0.9)``."""
        names = {"alpha": "a", "beta": "b", "mu": "mu", "gamma": "g", "lam": "l"}
        parts = [f"{names[k]}={getattr(self, k):g}"
                 for k in ("alpha", "beta", "mu", "gamma")
                 if getattr(self, k) is not None]
        if self.lam is not None and not callable(self.lam):
            parts.append(f"l={float(self.lam):g}")
        return self.kind + (f"({' '.join(parts)})" if parts else "")

    def resolve(self, theta: float | None = None) -> "MethodSpec":
        """Fill parameter fall-backs, using the instance angle where needed."""
        kind = self.kind
        alpha, beta, mu, gamma, lam = self.alpha, self.beta, self.mu, self.gamma, self.lam
        if kind == "aamr":
            alpha = 0.9 if alpha is None else alpha
            if beta is None:
                if theta is None:
                    raise ValueError("aamr needs beta, or an instance angle for the beta rule")
                beta = recommended_beta(theta)
        elif kind == "drm":
            alpha = 0.5 if alpha is None else alpha
        elif kind == "rap":
            if mu is None:
                if theta is None:
                    raise ValueError("rap needs mu, or an instance angle for the optimal rule")
                mu = optimal_rap_mu(theta)
        elif kind == "cm":
            gamma = 0.25 if gamma is None else gamma
            lam = 1.8 if lam is None else lam
        return MethodSpec(kind, alpha=alpha, beta=beta, mu=mu, gamma=gamma, lam=lam)


def solve_best_approximation(spec: MethodSpec, sets, q,
                             policy: StoppingPolicy | None = None,
                             theta: float | None = None,
                             x0=None) -> SolveResult:
    """Dispatch a solve described by ``spec`` over a list of sets.

    Pairwise methods (drm, map, rap, haugazeau) require exactly two sets;
    aamr uses the two-set driver for pairs and the product-space driver
    otherwise; hlwb and cm accept any number.  ``theta`` (the Friedrichs angle
    of a subspace instance) feeds the parameter fall-backs for ``rap`` and for
    aamr's angle-based beta rule.
    """
    sets = list(sets)
    kind = spec.kind
    if kind in ("drm", "map", "rap", "haugazeau") and len(sets) != 2:
        raise ValueError(f"method {kind} requires exactly two sets, got {len(sets)}")
    spec = spec.resolve(theta)
    if kind == "aamr":
        if len(sets) == 2:
            return aamr_solve(sets[0], sets[1], q, x0=x0, alpha=spec.alpha,
                              beta=spec.beta, policy=policy)
        return aamr_product_solve(sets, q, x0=x0, alpha=spec.alpha, beta=spec.beta,
                                  policy=policy)
    if x0 is not None and kind != "cm":
        raise ValueError(f"method {kind} starts at the projected point; x0 is not free")
    if kind == "drm":
        return dr_solve(sets[0], sets[1], q, alpha=spec.alpha, policy=policy)
    if kind == "map":
        return map_solve(sets[0], sets[1], q, policy=policy)
    if kind == "rap":
        return rap_solve(sets[0], sets[1], q, mu=spec.mu, policy=policy)
    if kind == "haugazeau":
        return haugazeau_solve(sets[0], sets[1], q, policy=policy)
    if kind == "hlwb":
        return hlwb_solve(sets, q, policy=policy)
    if kind == "cm":
        return cm_solve(sets, q, gamma=spec.gamma, lam=spec.lam, policy=policy, x0=x0)
    raise AssertionError(f"unhandled method {kind}")
