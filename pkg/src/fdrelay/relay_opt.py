"""Relay input optimization: bottleneck regime test, Gaussian-regime
capacity, and the concave max-min program over discrete relay distributions
with the self-consistent source threshold and a KKT certificate.

Solver outline
--------------
The capacity is max_p min{g(p), I_RD(p)} over the simplex of symmetric
amplitude distributions with a second-moment budget, where g(p) is the
source-relay rate under the optimal threshold policy (the threshold is
re-solved from the power identity at every evaluation, so the power
constraint holds exactly along the whole trajectory) and I_RD is the
relay-destination mutual information. Both terms are concave, so the
max-min is solved by bisecting the weight xi of the aggregate
xi * g + (1 - xi) * I_RD until the two rates balance; each weighted
subproblem is maximized by pairwise Frank-Wolfe over the polytope's
vertices (singletons and power-tight amplitude pairs). An outer column
generation loop grows the candidate support from the full amplitude grid
until the Frank-Wolfe gap over the full grid certifies optimality.

Mass points are drawn from a uniform amplitude grid. By default the grid
spacing is tied to the destination noise scale (3 sigma_D): amplitudes
closer than that are nearly indistinguishable at the destination, and
this resolution reproduces the reference numerical experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .distributions import (
    BernoulliGaussian,
    DiscreteDistribution,
    GaussianInput,
    RelayInputDistribution,
)
from .linkbudget import NormalizedChannel
from .numerics import (
    QuadratureSpec,
    gauss_expectation,
    gaussian_entropy_bits,
    golden_section_max,
    mixture_entropy,
)
from .source_policy import snr_term, solve_xth_gaussian

LN2 = math.log(2.0)

Regime = Literal["ideal_fd", "gaussian_bottleneck", "discrete", "degenerate"]


class SolverError(RuntimeError):
    """Raised when the discrete solver fails to converge."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the discrete relay-distribution solver.

    grid_points = None picks the amplitude count automatically so that the
    grid spacing is grid_resolution_noise_sd * sigma_D (clipped to at least
    9 and at most max_grid_points candidates).
    """

    grid_points: int | None = None
    x_max_multiplier: float = 5.0
    grid_resolution_noise_sd: float = 3.0
    tol_bits: float = 1e-6
    tol_xth: float = 1e-12
    stat_tol: float = 1e-6
    max_outer: int = 60
    max_inner: int = 2000
    max_bisect: int = 60
    quadrature_order: int = 96
    entropy_grid_step_sd: float = 0.25
    prune_eps: float = 1e-8
    max_grid_points: int = 1200

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(order=self.quadrature_order)


@dataclass(frozen=True)
class RegimeTest:
    """Outcome of the relay-destination bottleneck test.

    lhs/rhs are the two sides of the test in its published form (log2
    without the 1/2 prefactor on either side; the decision is unaffected).
    """

    is_gaussian: bool
    lhs: float
    rhs: float
    x_th: float


@dataclass(frozen=True)
class KktReport:
    xi: float
    lambda1: float
    lambda2: float
    nu: float
    stationarity_residual: float
    stationarity_on_support: float
    complementary_slackness: dict[str, float]


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    regime: Regime
    x_th: float
    dist: RelayInputDistribution
    mi_sr: float
    mi_rd: float
    p_transmit: float
    kkt: KktReport | None
    iterations: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def mi_relay_destination(
    dist: RelayInputDistribution,
    sigma_d_sq: float,
    q: QuadratureSpec | None = None,
) -> float:
    """I(X_R; Y_D) in bits/symbol for Y_D = X_R + N(0, sigma_D^2)."""
    if sigma_d_sq <= 0:
        raise ValueError("sigma_d_sq must be positive")
    if isinstance(dist, GaussianInput):
        return 0.5 * math.log2(1.0 + dist.variance / sigma_d_sq)
    if isinstance(dist, (DiscreteDistribution, BernoulliGaussian)):
        h = mixture_entropy(dist.output_mixture(sigma_d_sq), q)
        return max(0.0, h - gaussian_entropy_bits(sigma_d_sq))
    raise TypeError(f"unsupported relay input distribution {type(dist)!r}")


def check_gaussian_regime(ch: NormalizedChannel, q: QuadratureSpec | None = None) -> RegimeTest:
    """Is the relay-destination link the bottleneck for a Gaussian relay input?

    Compares log2(1 + P_R/sigma_D^2) against the Gaussian-weighted integral
    of log2(1 + P_S(x)/(sigma_R^2 + alpha x^2)) with the threshold solved
    from the Gaussian power identity.
    """
    if ch.alpha <= 0:
        raise ValueError("regime test requires alpha > 0")
    if ch.p_r <= 0 or ch.p_s <= 0:
        raise ValueError("regime test requires positive powers")
    x_th = solve_xth_gaussian(ch.p_r, ch.alpha, ch.p_s)
    lhs = math.log2(1.0 + ch.p_r / ch.sigma_d_sq)
    rhs = gauss_expectation(
        lambda x: 2.0 * snr_term(x, x_th, ch.alpha, ch.sigma_r_sq),
        ch.p_r,
        q,
        kinks=(-x_th, x_th),
    )
    return RegimeTest(is_gaussian=lhs <= rhs, lhs=lhs, rhs=rhs, x_th=x_th)


def capacity_gaussian_regime(p_r: float, sigma_d_sq: float) -> float:
    """Capacity when the relay-destination link is the bottleneck."""
    return 0.5 * math.log2(1.0 + p_r / sigma_d_sq)


def amplitude_grid(
    ch: NormalizedChannel, cfg: SolverConfig, regime_margin: float | None = None
) -> np.ndarray:
    """Candidate mass-point amplitudes on [0, x_max_multiplier * sqrt(P_R)].

    In auto mode the spacing is grid_resolution_noise_sd * sigma_D, shrunk
    (down to 1 sigma_D) when the bottleneck test margin is small: near that
    boundary the optimal input approaches the continuous Gaussian, so the
    grid must resolve it more finely to avoid understating the capacity.
    """
    x_max = cfg.x_max_multiplier * math.sqrt(ch.p_r)
    if cfg.grid_points is not None:
        n = cfg.grid_points
    else:
        factor = cfg.grid_resolution_noise_sd
        if regime_margin is not None and regime_margin < 0.15:
            scale = math.sqrt(max(regime_margin, 0.0) / 0.15)
            factor = max(1.0, cfg.grid_resolution_noise_sd * scale)
        step = factor * math.sqrt(ch.sigma_d_sq)
        n = int(math.ceil(x_max / step)) + 1
        n = min(max(n, 9), cfg.max_grid_points)
    if n < 2:
        raise ValueError("need at least 2 grid points")
    return np.linspace(0.0, x_max, n)


# ---------------------------------------------------------------------------
# internal kernels


class _RdKernel:
    """Trapezoid-rule entropy kernel for output mixtures on a fixed grid.

    Rows of the density matrix hold the symmetric-pair output densities
    0.5 [N(x_j, s2) + N(-x_j, s2)]; value and gradient share the same
    quadrature so Frank-Wolfe sees an internally consistent objective.
    The uniform-grid trapezoid rule is spectrally accurate here because the
    integrand decays like a Gaussian and is smooth at the sigma_D scale.
    """

    def __init__(self, x: np.ndarray, sigma_d_sq: float, step_sd: float, size_cap: int = 40_000_000):
        self.sigma_d_sq = sigma_d_sq
        sd = math.sqrt(sigma_d_sq)
        span = float(x.max()) + 10.0 * sd
        step = step_sd * sd
        m = int(math.ceil(2.0 * span / step)) + 1
        while x.size * m > size_cap and step_sd < 0.5:
            step_sd *= 1.5
            m = int(math.ceil(2.0 * span / (step_sd * sd))) + 1
        if x.size * m > size_cap:
            raise SolverError(
                f"entropy kernel too large ({x.size} x {m}); coarsen the grid or raise size_cap"
            )
        y = np.linspace(-span, span, m)
        self.dy = y[1] - y[0]
        norm = 1.0 / math.sqrt(2.0 * math.pi * sigma_d_sq)
        a = np.exp(-((y[None, :] - x[:, None]) ** 2) / (2.0 * sigma_d_sq))
        b = np.exp(-((y[None, :] + x[:, None]) ** 2) / (2.0 * sigma_d_sq))
        self.phi = 0.5 * norm * (a + b)
        self.h_noise = gaussian_entropy_bits(sigma_d_sq)

    def density(self, p: np.ndarray) -> np.ndarray:
        return p @ self.phi

    def density_sparse(self, idx: np.ndarray, vals: np.ndarray) -> np.ndarray:
        return vals @ self.phi[idx]

    def mi_from_density(self, py: np.ndarray) -> float:
        py = np.maximum(py, 1e-300)
        h = -self.dy * float(py @ np.log2(py))
        return h - self.h_noise

    def mi(self, p: np.ndarray) -> float:
        return self.mi_from_density(self.density(p))

    def mi_and_grad(self, p: np.ndarray) -> tuple[float, np.ndarray]:
        py = np.maximum(self.density(p), 1e-300)
        l2 = np.log2(py)
        h = -self.dy * float(py @ l2)
        grad = -self.dy * (self.phi @ l2) - 1.0 / LN2
        return h - self.h_noise, grad

    def mi_grad_density(self, p: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        py = np.maximum(self.density(p), 1e-300)
        l2 = np.log2(py)
        h = -self.dy * float(py @ l2)
        grad = -self.dy * (self.phi @ l2) - 1.0 / LN2
        return h - self.h_noise, grad, py


class _FiniteAlphaSource:
    """Source-relay rate g(p) with the threshold re-solved per evaluation.

    grad_j = c_j - alpha (t^2 - x_j^2)^+ / (2 ln2 (sigma_R^2 + alpha t^2)),
    the water-level-priced marginal value of mass at x_j.
    """

    mode = "fd"

    def __init__(self, x: np.ndarray, alpha: float, p_s: float, sigma_r_sq: float, tol: float):
        self.x = x
        self.x2 = x * x
        self.alpha = alpha
        self.p_s = p_s
        self.sigma_r_sq = sigma_r_sq
        self.tol = tol
        self._t_hint = math.sqrt(p_s / alpha)

    def x_th(self, p: np.ndarray) -> float:
        a, ps = self.alpha, self.p_s

        def excess(t):
            return a * float(np.maximum(0.0, t * t - self.x2) @ p) - ps

        hi = math.sqrt(ps / a) + float(self.x[-1])
        lo = 0.0
        t = min(max(self._t_hint, 1e-300), hi)
        # expand/shrink around the hint, then bisect + Newton polish
        if excess(t) > 0:
            hi = t
        else:
            lo = t
        for _ in range(200):
            t = 0.5 * (lo + hi)
            if excess(t) > 0:
                hi = t
            else:
                lo = t
            if hi - lo <= 1e-6 * (1.0 + hi):
                break
        t = 0.5 * (lo + hi)
        for _ in range(60):
            p_t = float(p[self.x < t].sum())
            deriv = 2.0 * a * t * p_t
            if deriv <= 0.0:
                break
            step = excess(t) / deriv
            if t - step <= 0.0:
                break
            t -= step
            if abs(step) <= self.tol * (1.0 + t):
                break
        self._t_hint = t
        return t

    def value(self, p: np.ndarray) -> tuple[float, float]:
        t = self.x_th(p)
        c = snr_term(self.x, t, self.alpha, self.sigma_r_sq)
        return float(c @ p), t

    def value_grad(self, p: np.ndarray) -> tuple[float, np.ndarray, float]:
        t = self.x_th(p)
        gap = np.maximum(0.0, t * t - self.x2)
        c = 0.5 * np.log2(1.0 + self.alpha * gap / (self.sigma_r_sq + self.alpha * self.x2))
        grad = c - self.alpha * gap / (2.0 * LN2 * (self.sigma_r_sq + self.alpha * t * t))
        return float(c @ p), grad, t

    def hess_info(self, p: np.ndarray, t: float) -> tuple[np.ndarray, float]:
        """Rank-one Hessian of g away from threshold crossings:
        Hess = scale * outer(vec, vec) with vec the per-state source power."""
        a_pow = self.alpha * np.maximum(0.0, t * t - self.x2)
        n = self.sigma_r_sq + self.alpha * t * t
        p_t = max(float(p[self.x < t].sum()), 1e-12)
        return a_pow, -1.0 / (2.0 * LN2 * n * n * p_t)

    def transmit_prob(self, p: np.ndarray, t: float) -> float:
        return float(p[self.x < t].sum())


class _HdSource:
    """alpha -> infinity specialization: the source talks only over the
    relay's silent symbol, with average power p_s spread over that fraction."""

    mode = "hd"

    def __init__(self, x: np.ndarray, p_s: float, sigma_r_sq: float):
        self.x = x
        self.x2 = x * x
        self.p_s = p_s
        self.sigma_r_sq = sigma_r_sq

    def x_th(self, p: np.ndarray) -> float:
        return 0.0

    def value(self, p: np.ndarray) -> tuple[float, float]:
        p0 = max(float(p[0]), 1e-300)
        u = self.p_s / (self.sigma_r_sq * p0)
        return p0 * 0.5 * math.log2(1.0 + u), 0.0

    def value_grad(self, p: np.ndarray) -> tuple[float, np.ndarray, float]:
        p0 = max(float(p[0]), 1e-300)
        u = self.p_s / (self.sigma_r_sq * p0)
        g = p0 * 0.5 * math.log2(1.0 + u)
        grad = np.zeros_like(p)
        grad[0] = (math.log1p(u) - u / (1.0 + u)) / (2.0 * LN2)
        return g, grad, 0.0

    def hess_info(self, p: np.ndarray, t: float) -> tuple[np.ndarray, float]:
        p0 = max(float(p[0]), 1e-12)
        u = self.p_s / (self.sigma_r_sq * p0)
        vec = np.zeros_like(p)
        vec[0] = 1.0
        scale = -(u * u) / (2.0 * LN2 * p0 * (1.0 + u) ** 2)
        return vec, scale

    def transmit_prob(self, p: np.ndarray, t: float) -> float:
        return float(p[0])


class _Polytope:
    """{p >= 0, sum p = 1, sum x^2 p <= p_r} restricted to grid columns.

    Vertices are feasible singletons and power-tight straddling pairs; the
    linear maximization oracle enumerates both families vectorized.
    """

    def __init__(self, x2: np.ndarray, p_r: float):
        self.x2 = x2
        self.p_r = p_r
        self.inside = np.nonzero(x2 <= p_r * (1.0 + 1e-12))[0]
        self.outside = np.nonzero(x2 > p_r * (1.0 + 1e-12))[0]
        if self.inside.size == 0:
            raise SolverError("no feasible singleton mass point (p_r too small for grid)")
        if self.outside.size:
            xi2 = x2[self.inside][:, None]
            xo2 = x2[self.outside][None, :]
            self.pair_w = (xo2 - p_r) / (xo2 - xi2)
        else:
            self.pair_w = None

    def lmo(self, d: np.ndarray):
        """Maximize <d, p> over the polytope; returns (value, atom).

        atom is ("s", j) or ("d", i, j, w) with w on the inside index.
        """
        ji = self.inside[int(np.argmax(d[self.inside]))]
        best_val = float(d[ji])
        best = ("s", int(ji))
        if self.pair_w is not None:
            vals = self.pair_w * d[self.inside][:, None] + (1.0 - self.pair_w) * d[self.outside][None, :]
            k = int(np.argmax(vals))
            i, j = divmod(k, self.outside.size)
            v = float(vals[i, j])
            if v > best_val:
                best_val = v
                best = ("d", int(self.inside[i]), int(self.outside[j]), float(self.pair_w[i, j]))
        return best_val, best

    def atom_vector(self, atom, n: int) -> np.ndarray:
        v = np.zeros(n)
        if atom[0] == "s":
            v[atom[1]] = 1.0
        else:
            _, i, j, w = atom
            v[i] = w
            v[j] = 1.0 - w
        return v

    @staticmethod
    def atom_indices(atom) -> tuple[int, ...]:
        return (atom[1],) if atom[0] == "s" else (atom[1], atom[2])


def _atom_dot(atom, d: np.ndarray) -> float:
    if atom[0] == "s":
        return float(d[atom[1]])
    _, i, j, w = atom
    return w * float(d[i]) + (1.0 - w) * float(d[j])


class _WeightedMaximizer:
    """Fully corrective Frank-Wolfe for max xi*g + (1-xi)*I_RD.

    Each outer step adds the vertex returned by the linear oracle, then a
    projected-Newton pass re-optimizes all active vertex weights on the
    simplex (the entropy Hessian comes from the shared trapezoid kernel and
    the source-rate Hessian is rank one, so Newton systems are tiny). A
    backtracking Frank-Wolfe step stands in whenever the corrective pass
    fails to improve. Vertex iterates keep supports cleanly sparse.
    """

    def __init__(self, source, rd: _RdKernel, poly: _Polytope, cfg: SolverConfig):
        self.source = source
        self.rd = rd
        self.poly = poly
        self.cfg = cfg
        self.n = source.x.size
        self.atoms: dict[tuple, float] = {("s", 0): 1.0}
        self.p = self.poly.atom_vector(("s", 0), self.n)

    def set_state(self, atoms: dict[tuple, float]):
        self.atoms = dict(atoms)
        self.p = self._combine(self.atoms)

    def _combine(self, atoms: dict[tuple, float]) -> np.ndarray:
        p = np.zeros(self.n)
        for a, w in atoms.items():
            if a[0] == "s":
                p[a[1]] += w
            else:
                _, i, j, ww = a
                p[i] += w * ww
                p[j] += w * (1.0 - ww)
        return p

    def objective(self, xi: float, p: np.ndarray) -> float:
        g, _ = self.source.value(p)
        return xi * g + (1.0 - xi) * self.rd.mi(p)

    def maximize(self, xi: float, tol_gap: float) -> tuple[np.ndarray, float, int]:
        gap = math.inf
        it = 0
        budget = max(self.cfg.max_inner // 10, 20)
        for it in range(1, budget + 1):
            p = self.p
            g, ggrad, _ = self.source.value_grad(p)
            ird, igrad = self.rd.mi_and_grad(p)
            grad = xi * ggrad + (1.0 - xi) * igrad
            lmo_val, fw_atom = self.poly.lmo(grad)
            gap = lmo_val - float(grad @ p)
            if gap <= tol_gap:
                break
            if fw_atom not in self.atoms:
                self.atoms[fw_atom] = 0.0
            improved = self._corrective(xi)
            if not improved:
                if not self._fw_step(xi, grad, fw_atom):
                    break
        self.p = self._combine(self.atoms)
        return self.p, gap, it

    # -- corrective pass ---------------------------------------------------

    def _atom_rows(self, atom_list):
        """Atom output densities and power/second-moment contractions."""
        rows = np.zeros((len(atom_list), self.rd.phi.shape[1]))
        cols = np.zeros((len(atom_list), self.n))
        for k, a in enumerate(atom_list):
            if a[0] == "s":
                rows[k] = self.rd.phi[a[1]]
                cols[k, a[1]] = 1.0
            else:
                _, i, j, w = a
                rows[k] = w * self.rd.phi[i] + (1.0 - w) * self.rd.phi[j]
                cols[k, i] = w
                cols[k, j] = 1.0 - w
        return rows, cols

    def _corrective(self, xi: float, newton_iters: int = 30) -> bool:
        atom_list = list(self.atoms.keys())
        lam = np.asarray([self.atoms[a] for a in atom_list], dtype=float)
        rows, cols = self._atom_rows(atom_list)
        m = lam.size

        def objective(lv):
            p = lv @ cols
            gv, _ = self.source.value(p)
            return xi * gv + (1.0 - xi) * self.rd.mi_from_density(lv @ rows)

        f0 = objective(lam)
        best = f0
        improved = False
        for _ in range(newton_iters):
            p = lam @ cols
            g, ggrad, t = self.source.value_grad(p)
            ird, igrad, py = self.rd.mi_grad_density(p)
            grad_p = xi * ggrad + (1.0 - xi) * igrad
            grad_l = cols @ grad_p
            hvec, hscale = self.source.hess_info(p, t)
            qv = cols @ hvec
            ratio = rows / py[None, :]
            h_rd = -(self.rd.dy / LN2) * (ratio @ rows.T)
            hess = xi * hscale * np.outer(qv, qv) + (1.0 - xi) * h_rd
            free = lam > 0.0
            mu_ref = grad_l[free].max() if free.any() else grad_l.max()
            free |= grad_l >= mu_ref - 1e-15
            idx = np.nonzero(free)[0]
            if idx.size < 1:
                break
            # equality-constrained Newton on the free face (sum of weights fixed)
            hf = hess[np.ix_(idx, idx)]
            gf = grad_l[idx]
            k = idx.size
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = hf - 1e-13 * np.eye(k)
            kkt[:k, k] = 1.0
            kkt[k, :k] = 1.0
            rhs = np.concatenate([-gf, [0.0]])
            try:
                sol = np.linalg.solve(kkt, rhs)
                step = sol[:k]
            except np.linalg.LinAlgError:
                step = gf - gf.mean()
            if float(step @ gf) <= 0.0:
                step = gf - gf.mean()  # projected gradient fallback
                if float(step @ gf) <= 1e-18:
                    break
            delta = np.zeros(m)
            delta[idx] = step
            neg = delta < 0.0
            t_max = 1.0
            if neg.any():
                t_max = min(1.0, float(np.min(lam[neg] / -delta[neg])))
            if t_max <= 0.0:
                break
            t_step = t_max
            val = objective(lam + t_step * delta)
            shrink = 0
            while val < best and shrink < 25:
                t_step *= 0.5
                val = objective(lam + t_step * delta)
                shrink += 1
            if val <= best + 1e-15:
                break
            lam = np.maximum(lam + t_step * delta, 0.0)
            s = lam.sum()
            if s > 0:
                lam /= s
            improved = True
            if val - best < 1e-14:
                best = val
                break
            best = val
        if improved:
            self.atoms = {a: w for a, w in zip(atom_list, lam) if w > 0.0}
            if not self.atoms:
                self.atoms = {("s", 0): 1.0}
            self.p = self._combine(self.atoms)
        return improved

    # -- fallback Frank-Wolfe step ------------------------------------------

    def _fw_step(self, xi: float, grad: np.ndarray, fw_atom) -> bool:
        p = self.p
        away_atom = min(self.atoms, key=lambda a: _atom_dot(a, grad))
        gamma_max = self.atoms[away_atom]
        if fw_atom == away_atom or gamma_max <= 0.0:
            away_atom = None
            d = self.poly.atom_vector(fw_atom, self.n) - p
            gamma_max = 1.0
        else:
            d = self.poly.atom_vector(fw_atom, self.n) - self.poly.atom_vector(away_atom, self.n)
        slope = float(grad @ d)
        if slope <= 0.0:
            return False
        py0 = self.rd.density(p)
        nz = np.nonzero(d)[0]
        dpy = self.rd.density_sparse(nz, d[nz])

        def phi(gamma):
            q = np.maximum(p + gamma * d, 0.0)
            gv, _ = self.source.value(q)
            return xi * gv + (1.0 - xi) * self.rd.mi_from_density(py0 + gamma * dpy)

        phi0 = phi(0.0)
        gamma, val = golden_section_max(phi, 0.0, gamma_max, tol=1e-6 * max(gamma_max, 1e-12))
        if val <= phi0:
            gamma = gamma_max
            ok = False
            for _ in range(60):
                if phi(gamma) > phi0 + 0.3 * slope * gamma:
                    ok = True
                    break
                gamma *= 0.25
                if gamma < 1e-18 * gamma_max:
                    break
            if not ok:
                return False
        if away_atom is None:
            self.atoms = {a: w * (1.0 - gamma) for a, w in self.atoms.items()}
            self.atoms[fw_atom] = self.atoms.get(fw_atom, 0.0) + gamma
        else:
            self.atoms[fw_atom] = self.atoms.get(fw_atom, 0.0) + gamma
            rem = self.atoms[away_atom] - gamma
            if rem <= 1e-15:
                self.atoms.pop(away_atom)
            else:
                self.atoms[away_atom] = rem
        self.p = self._combine(self.atoms)
        return True


def _initial_atoms(poly: _Polytope, n: int) -> dict[tuple, float]:
    idx = sorted(set([0] + list(poly.inside[:: max(1, poly.inside.size // 8)])))
    atoms = {("s", int(j)): 1.0 / (len(idx) + 1) for j in idx}
    atoms[("s", 0)] = atoms.get(("s", 0), 0.0) + 1.0 - sum(atoms.values())
    return atoms


_XI_LOG_RANGE = 44.0  # log2-odds search window; xi spans [2^-44, 1 - 2^-44]


def _xi_from_logodds(u: float) -> float:
    return 1.0 / (1.0 + 2.0 ** (-u))


def _logodds(xi: float) -> float:
    xi = min(max(xi, 1e-13), 1.0 - 1e-13)
    return math.log2(xi / (1.0 - xi))


def _solve_minmax(source, rd, poly, cfg: SolverConfig, atoms=None, xi_hint=None, skip_rd_probe=False):
    """Drive xi until the two rates balance; returns the balanced iterate.

    The rate gap g - I_RD is monotone increasing in xi. The search runs in
    the log-odds domain so boundary layers near xi = 0 or 1 (which appear
    when self-interference is nearly negligible and g(p) is almost flat)
    are resolved, using Illinois-damped regula falsi. The best min(g, I_RD)
    iterate seen anywhere is kept as the answer: every iterate is feasible,
    so the best one is always a certified achievable point.
    """
    wm = _WeightedMaximizer(source, rd, poly, cfg)
    wm.set_state(atoms or _initial_atoms(poly, source.x.size))
    tol_gap = min(cfg.tol_bits * 0.1, cfg.stat_tol * 0.5)
    inner_total = 0
    best = {"v": -math.inf, "p": None, "xi": 0.5, "diff": math.inf}

    def gap_at(u):
        nonlocal inner_total
        xi = _xi_from_logodds(u)
        p, _, it = wm.maximize(xi, tol_gap)
        inner_total += it
        g, _ = source.value(p)
        ird = rd.mi(p)
        v = min(g, ird)
        if v > best["v"]:
            best.update(v=v, p=p.copy(), xi=xi, diff=g - ird)
        return p, g - ird

    if not skip_rd_probe:
        p, diff = gap_at(-_XI_LOG_RANGE)
        if diff >= -cfg.tol_bits:
            return p, 0.0, wm, inner_total, True  # relay-destination limited on this grid
    lo, glo = -_XI_LOG_RANGE, None
    hi, ghi = _XI_LOG_RANGE, None
    if xi_hint is not None:
        u0 = _logodds(xi_hint)
        for probe in (u0 - 0.3, u0 + 0.3):
            p, d = gap_at(probe)
            if abs(d) <= cfg.tol_bits:
                return p, _xi_from_logodds(probe), wm, inner_total, True
            if d < 0 and probe > lo:
                lo, glo = probe, d
            elif d > 0 and probe < hi:
                hi, ghi = probe, d
        if lo >= hi:
            lo, glo, hi, ghi = -_XI_LOG_RANGE, None, _XI_LOG_RANGE, None
    balanced = False
    last_side = None
    u = 0.0
    for k in range(cfg.max_bisect):
        # Illinois-damped regula falsi with a bisection step every 4th
        # iteration; plain false position stagnates on one-sided approaches
        if glo is not None and ghi is not None and ghi > glo and (k % 4) != 3:
            u = lo - glo * (hi - lo) / (ghi - glo)
            u = min(max(u, lo + 1e-12), hi - 1e-12)
        else:
            u = 0.5 * (lo + hi)
        p, diff = gap_at(u)
        if abs(diff) <= cfg.tol_bits:
            balanced = True
            break
        if diff > 0:
            hi, ghi = u, diff
            if last_side == "hi" and glo is not None:
                glo *= 0.5
            last_side = "hi"
        else:
            lo, glo = u, diff
            if last_side == "lo" and ghi is not None:
                ghi *= 0.5
            last_side = "lo"
        if hi - lo <= 1e-12:
            break
    if balanced and min(*_rates(source, rd, p)) >= best["v"] - cfg.tol_bits:
        return p, _xi_from_logodds(u), wm, inner_total, True
    # fall back to the best feasible iterate encountered (wm keeps its own
    # atom state; it is only used to warm-start the next round)
    return (
        best["p"] if best["p"] is not None else p,
        best["xi"],
        wm,
        inner_total,
        abs(best["diff"]) <= cfg.tol_bits,
    )


def _rates(source, rd, p):
    g, _ = source.value(p)
    return g, rd.mi(p)


def _certificate(
    source,
    rd: _RdKernel,
    p: np.ndarray,
    xi: float,
    capacity: float,
    mi_sr: float,
    mi_rd: float,
    p_r: float,
    prune_eps: float,
) -> KktReport:
    """Least-squares multiplier fit over the active mass points plus the
    stationarity profile over the whole grid."""
    x2 = source.x2
    g, ggrad, t = source.value_grad(p)
    ird, igrad = rd.mi_and_grad(p)
    if source.mode == "fd":
        c = snr_term(source.x, t, source.alpha, source.sigma_r_sq)
        a_pow = source.alpha * np.maximum(0.0, t * t - x2)
        power_resid = abs(float(a_pow @ p) - source.p_s)
    else:
        c = ggrad  # perspective derivative doubles as the per-state value slope
        a_pow = np.zeros_like(x2)
        power_resid = 0.0
    i_prime = igrad
    sup = p > prune_eps
    sup[0] = True
    rows = np.stack(
        [c[sup] - i_prime[sup], -a_pow[sup], -x2[sup], -np.ones(int(sup.sum()))], axis=1
    )
    rhs = -i_prime[sup]
    sol, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    xi_fit, lam1, lam2, nu = (float(v) for v in sol)
    xi_fit = min(max(xi_fit, 0.0), 1.0)
    second_moment = float(x2 @ p)
    if lam2 < 0.0 or second_moment < p_r * (1.0 - 1e-9):
        lam2 = 0.0
        rows2 = rows[:, [0, 1, 3]]
        sol2, *_ = np.linalg.lstsq(rows2, rhs, rcond=None)
        xi_fit, lam1, nu = (float(v) for v in sol2)
        xi_fit = min(max(xi_fit, 0.0), 1.0)
    score = xi_fit * c + (1.0 - xi_fit) * i_prime - lam1 * a_pow - lam2 * x2 - nu
    comp = {
        "rate_sr": xi_fit * abs(capacity - mi_sr),
        "rate_rd": (1.0 - xi_fit) * abs(capacity - mi_rd),
        "source_power": abs(lam1) * power_resid,
        "relay_power": lam2 * max(0.0, p_r - second_moment),
        "normalization": abs(nu) * abs(float(p.sum()) - 1.0),
    }
    return KktReport(
        xi=xi_fit,
        lambda1=lam1,
        lambda2=lam2,
        nu=nu,
        stationarity_residual=float(score.max()),
        stationarity_on_support=float(np.abs(score[sup]).max()),
        complementary_slackness=comp,
    )


def _package(
    source,
    rd: _RdKernel,
    poly: _Polytope,
    p: np.ndarray,
    xi: float,
    cfg: SolverConfig,
    rounds: int,
    inner: int,
    converged: bool,
    fw_gap: float,
) -> CapacityResult:
    g, t = source.value(p)
    ird = rd.mi(p)
    capacity = min(g, ird)
    kkt = _certificate(source, rd, p, xi, capacity, g, ird, poly.p_r, cfg.prune_eps)
    keep = p > cfg.prune_eps
    keep[0] = True
    amps = source.x[keep]
    probs = p[keep] / p[keep].sum()
    dist = DiscreteDistribution(amps, probs)
    p_tx = source.transmit_prob(p, t) if source.mode == "fd" else float(p[0])
    return CapacityResult(
        capacity=capacity,
        regime="discrete",
        x_th=t,
        dist=dist,
        mi_sr=g,
        mi_rd=ird,
        p_transmit=p_tx,
        kkt=kkt,
        iterations=rounds,
        converged=converged,
        diagnostics={
            "xi": xi,
            "fw_gap": fw_gap,
            "inner_iterations": inner,
            "grid": source.x,
            "weights": p,
            "second_moment": float(source.x2 @ p),
            "mode": source.mode,
        },
    )


def _solve_on_grid(source, rd, poly, cfg: SolverConfig) -> CapacityResult:
    """Column generation: balance the rates on a growing support until the
    full-grid Frank-Wolfe gap certifies global optimality."""
    n = source.x.size
    atoms = _initial_atoms(poly, n)
    fw_gap = math.inf
    inner_total = 0
    converged = False
    rounds = 0
    p = None
    xi = 0.0
    xi_hint = None
    rd_limited_once = False
    for rounds in range(1, cfg.max_outer + 1):
        p, xi, wm, inner, balanced = _solve_minmax(
            source, rd, poly, cfg, atoms, xi_hint=xi_hint,
            skip_rd_probe=(xi_hint is not None and not rd_limited_once),
        )
        inner_total += inner
        g, ggrad, _ = source.value_grad(p)
        ird, igrad = rd.mi_and_grad(p)
        grad = xi * ggrad + (1.0 - xi) * igrad
        lmo_val, atom = poly.lmo(grad)
        fw_gap = lmo_val - float(grad @ p)
        if fw_gap <= cfg.stat_tol and balanced_or_rd_limited(balanced, xi, g, ird, cfg):
            converged = True
            break
        if fw_gap <= cfg.stat_tol and not balanced and abs(g - ird) <= 1e-3 and rounds >= 3:
            # thin bottleneck pinch: the rate balance cannot tighten further
            # on this grid; the iterate is feasible and certified by fw_gap
            converged = True
            break
        rd_limited_once = xi == 0.0
        xi_hint = None if xi == 0.0 else xi
        # keep the pruned support, seed the violating vertex plus secondary
        # violation peaks so each round can grow the support by a few points
        atoms = {a: w for a, w in wm.atoms.items() if w > cfg.prune_eps}
        total = sum(atoms.values())
        if total <= 0:
            atoms = {("s", 0): 1.0}
            total = 1.0
        new_atoms = [atom]
        for extra in _violation_peaks(grad, poly, p, skip=poly.atom_indices(atom)):
            new_atoms.append(extra)
        seed = 1e-3 * len(new_atoms)
        atoms = {a: w * (1.0 - seed) / total for a, w in atoms.items()}
        for a in new_atoms:
            atoms[a] = atoms.get(a, 0.0) + seed / len(new_atoms)
    if not converged and fw_gap > 10.0 * cfg.stat_tol:
        raise SolverError(
            f"column generation did not converge: fw_gap={fw_gap:.3e} after {rounds} rounds"
        )
    return _package(source, rd, poly, p, xi, cfg, rounds, inner_total, converged, fw_gap)


def _violation_peaks(grad: np.ndarray, poly: _Polytope, p: np.ndarray, skip=(), k: int = 2):
    """Secondary candidate vertices: local maxima of the reduced gradient
    over feasible singletons, at least two grid steps from existing picks."""
    base = float(grad @ p)
    idx = poly.inside
    vals = grad[idx] - base
    order = np.argsort(vals)[::-1]
    picked: list[tuple] = []
    taken = set(skip)
    for o in order[: 8 * k]:
        j = int(idx[o])
        if vals[o] <= 0:
            break
        if any(abs(j - t) < 2 for t in taken):
            continue
        picked.append(("s", j))
        taken.add(j)
        if len(picked) >= k:
            break
    return picked


def balanced_or_rd_limited(balanced: bool, xi: float, g: float, ird: float, cfg: SolverConfig) -> bool:
    if balanced and abs(g - ird) <= cfg.tol_bits:
        return True
    return xi == 0.0 and g - ird >= -cfg.tol_bits


def solve_discrete_capacity(
    ch: NormalizedChannel,
    cfg: SolverConfig | None = None,
    regime: RegimeTest | None = None,
) -> CapacityResult:
    """Solve the discrete-regime capacity program on the amplitude grid.

    When the bottleneck-test margin is negligible the capacity is pinned
    between the two sides of the test, and the zero-mean Gaussian input is
    returned directly: its rate sits within the pinch, so running the grid
    solver could only blur the answer.
    """
    cfg = cfg or SolverConfig()
    if ch.alpha <= 0:
        raise ValueError("discrete solver requires alpha > 0")
    if regime is None:
        regime = check_gaussian_regime(ch, cfg.quadrature())
    pinch = (regime.lhs - regime.rhs) / 2.0
    if 0.0 <= pinch <= 2e-5:
        return CapacityResult(
            capacity=regime.rhs / 2.0,
            regime="discrete",
            x_th=regime.x_th,
            dist=GaussianInput(ch.p_r),
            mi_sr=regime.rhs / 2.0,
            mi_rd=regime.lhs / 2.0,
            p_transmit=math.erf(regime.x_th / math.sqrt(2.0 * ch.p_r)),
            kkt=None,
            iterations=0,
            converged=True,
            diagnostics={"near_boundary": True, "capacity_gap_bound": pinch, "regime_test": regime},
        )
    margin = (regime.lhs - regime.rhs) / max(regime.lhs, 1e-300)
    x = amplitude_grid(ch, cfg, regime_margin=margin)
    source = _FiniteAlphaSource(x, ch.alpha, ch.p_s, ch.sigma_r_sq, cfg.tol_xth)
    rd = _RdKernel(x, ch.sigma_d_sq, cfg.entropy_grid_step_sd)
    poly = _Polytope(x * x, ch.p_r)
    result = _solve_on_grid(source, rd, poly, cfg)
    result.diagnostics["regime_test"] = regime
    return result


def hd_capacity(ch: NormalizedChannel, cfg: SolverConfig | None = None) -> CapacityResult:
    """Two-hop half-duplex relay capacity: the infinite-self-interference
    specialization solved with the same machinery."""
    cfg = cfg or SolverConfig()
    if ch.p_s <= 0 or ch.p_r <= 0:
        return _degenerate_result(ch)
    x = amplitude_grid(ch, cfg)
    source = _HdSource(x, ch.p_s, ch.sigma_r_sq)
    rd = _RdKernel(x, ch.sigma_d_sq, cfg.entropy_grid_step_sd)
    poly = _Polytope(x * x, ch.p_r)
    return _solve_on_grid(source, rd, poly, cfg)


def kkt_certificate(result: CapacityResult, ch: NormalizedChannel, cfg: SolverConfig | None = None) -> KktReport:
    """Recompute the optimality certificate for a solver result."""
    if result.kkt is not None and result.regime == "discrete":
        return result.kkt
    if result.regime in ("gaussian_bottleneck", "ideal_fd", "degenerate"):
        resid = abs(result.capacity - result.mi_rd) if result.regime == "gaussian_bottleneck" else 0.0
        return KktReport(
            xi=0.0,
            lambda1=0.0,
            lambda2=0.0,
            nu=0.0,
            stationarity_residual=0.0,
            stationarity_on_support=0.0,
            complementary_slackness={"rate_rd": resid},
        )
    cfg = cfg or SolverConfig()
    grid = result.diagnostics.get("grid")
    weights = result.diagnostics.get("weights")
    if grid is None or weights is None:
        raise ValueError("result carries no solver grid; cannot rebuild certificate")
    mode = result.diagnostics.get("mode", "fd")
    if mode == "hd":
        source = _HdSource(grid, ch.p_s, ch.sigma_r_sq)
    else:
        source = _FiniteAlphaSource(grid, ch.alpha, ch.p_s, ch.sigma_r_sq, cfg.tol_xth)
    rd = _RdKernel(grid, ch.sigma_d_sq, cfg.entropy_grid_step_sd)
    return _certificate(
        source, rd, weights, result.diagnostics.get("xi", 0.5),
        result.capacity, result.mi_sr, result.mi_rd, ch.p_r, cfg.prune_eps,
    )


def _degenerate_result(ch: NormalizedChannel) -> CapacityResult:
    dist = DiscreteDistribution([0.0], [1.0])
    return CapacityResult(
        capacity=0.0,
        regime="degenerate",
        x_th=0.0,
        dist=dist,
        mi_sr=0.0,
        mi_rd=0.0,
        p_transmit=0.0,
        kkt=None,
        iterations=0,
        converged=True,
        diagnostics={},
    )


def capacity(ch: NormalizedChannel, cfg: SolverConfig | None = None) -> CapacityResult:
    """Capacity of the two-hop FD relay channel with residual self-interference.

    Dispatch: degenerate powers -> 0; alpha = 0 -> ideal FD closed form;
    relay-destination bottleneck -> Gaussian-regime closed form; otherwise
    the discrete relay-distribution solver.
    """
    cfg = cfg or SolverConfig()
    if ch.p_s <= 0 or ch.p_r <= 0:
        return _degenerate_result(ch)
    if ch.alpha == 0.0:
        mi_sr = 0.5 * math.log2(1.0 + ch.p_s / ch.sigma_r_sq)
        mi_rd = 0.5 * math.log2(1.0 + ch.p_r / ch.sigma_d_sq)
        return CapacityResult(
            capacity=min(mi_sr, mi_rd),
            regime="ideal_fd",
            x_th=math.inf,
            dist=GaussianInput(ch.p_r),
            mi_sr=mi_sr,
            mi_rd=mi_rd,
            p_transmit=1.0,
            kkt=None,
            iterations=0,
            converged=True,
            diagnostics={},
        )
    test = check_gaussian_regime(ch, cfg.quadrature())
    if test.is_gaussian:
        cap = capacity_gaussian_regime(ch.p_r, ch.sigma_d_sq)
        result = CapacityResult(
            capacity=cap,
            regime="gaussian_bottleneck",
            x_th=test.x_th,
            dist=GaussianInput(ch.p_r),
            mi_sr=test.rhs / 2.0,
            mi_rd=cap,
            p_transmit=math.erf(test.x_th / math.sqrt(2.0 * ch.p_r)),
            kkt=None,
            iterations=0,
            converged=True,
            diagnostics={"regime_test": test},
        )
        return result
    return solve_discrete_capacity(ch, cfg, regime=test)
