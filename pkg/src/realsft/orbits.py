"""Symmetric periodic orbits by shooting from the fixed locus of an involution.

If ``rho`` is an anti-symplectic involution reversing the flow and ``x0`` is
fixed by ``rho``, the orbit through ``x0`` is symmetric as soon as it meets
``Fix(rho)`` again at some time ``T/2 > 0``: then ``v(t) = rho(v(T - t))`` and
the orbit closes with period ``T``.  The finder solves for the chart
parameters of ``x0`` and ``T/2`` jointly.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateJacobian, NoConvergence, NotOnFixedLocus, StepFailure

DEFAULT_STEPS = 2048
FD_STEP = 1e-6
MIN_HALF_PERIOD = 1e-2


@dataclass(frozen=True)
class InvolutiveFlowSystem:
    """An autonomous flow with a linear time-reversing involution.

    ``vector_field`` acts on arrays of shape ``(..., dimension)``;
    ``involution`` is the matrix of ``rho``.  ``chart`` maps parameter
    vectors to states on ``Fix(rho)``.
    """

    name: str
    dimension: int
    vector_field: callable
    involution: np.ndarray
    chart: callable
    chart_dim: int
    conserved_energy: callable = None
    description: str = ""
    default_seed: tuple = ()
    default_half_period: float = 1.0
    default_energy: float = None
    other_involutions: dict = field(default_factory=dict)

    def rho(self, x):
        return np.asarray(x) @ self.involution.T

    def fixed_locus_chart(self, params):
        return np.asarray(self.chart(np.atleast_1d(np.asarray(params, float))), float)

    def locus_distance(self, x):
        x = np.asarray(x, float)
        return 0.5 * np.linalg.norm(self.rho(x) - x, axis=-1)


def check_system(system, rng, samples=100, scale=1.0):
    """Sup residuals of ``rho^2 = id`` and ``D rho (f(x)) + f(rho x) = 0`` on random states."""
    x = scale * rng.normal(size=(samples, system.dimension))
    sq = np.abs(system.rho(system.rho(x)) - x).max()
    tr = np.abs(system.rho(system.vector_field(x)) + system.vector_field(system.rho(x))).max()
    return float(sq), float(tr)


# ---------------------------------------------------------------------------
# integration

def _rk4(field_fn, x0, dt, steps, keep):
    # x0: (k, d), dt: (k,) -- trajectories with their own step sizes advance together
    x = np.array(x0, float)
    h = dt[:, None]
    half, sixth = 0.5 * h, h / 6.0
    out = np.empty((steps + 1,) + x.shape) if keep else None
    if keep:
        out[0] = x
    for i in range(steps):
        k1 = field_fn(x)
        k2 = field_fn(x + half * k1)
        k3 = field_fn(x + half * k2)
        k4 = field_fn(x + h * k3)
        x = x + sixth * (k1 + 2 * (k2 + k3) + k4)
        if keep:
            out[i + 1] = x
        if i % 64 == 63 and not np.isfinite(x).all():
            raise StepFailure("state became non-finite during integration")
    if not np.isfinite(x).all():
        raise StepFailure("state became non-finite during integration")
    return out if keep else x


def integrate(system, x0, T, steps=DEFAULT_STEPS):
    """Fixed-step RK4 trajectory ``x(k T / steps)``, shape ``(steps + 1, dimension)``."""
    if steps < 16:
        raise ValueError("steps must be at least 16")
    if not T > 0:
        raise ValueError("T must be positive")
    x0 = np.asarray(x0, float)
    return _rk4(system.vector_field, x0[None], np.array([T / steps]), steps, keep=True)[:, 0]


def flow_batch(system, x0s, times, steps=DEFAULT_STEPS):
    """Endpoints of several trajectories, each with its own final time."""
    times = np.asarray(times, float)
    return _rk4(system.vector_field, np.asarray(x0s, float), times / steps, steps, keep=False)


def energy_drift(system, traj):
    if system.conserved_energy is None:
        return 0.0
    e = system.conserved_energy(traj)
    return float(np.abs(e - e[0]).max() / max(abs(e[0]), 1e-300))


def symmetry_residual(system, x0, T_half, steps=DEFAULT_STEPS):
    """Distance ``|rho(y) - y| / 2`` of ``y = Phi_{T_half}(x0)`` from the fixed locus."""
    x0 = np.asarray(x0, float)
    if system.locus_distance(x0) * 2 >= 1e-8:
        raise NotOnFixedLocus(f"|rho(x0) - x0| = {2 * system.locus_distance(x0):.3e}")
    y = flow_batch(system, x0[None], [T_half], steps)[0]
    return float(system.locus_distance(y))


# ---------------------------------------------------------------------------
# orbits

@dataclass
class SymmetricOrbit:
    system: str
    x0: np.ndarray
    T: float
    times: np.ndarray
    samples: np.ndarray
    residuals: dict
    params: np.ndarray = None
    iterations: int = 0

    @property
    def lambda_scale(self):
        """Factor ``c`` such that the orbit has period 1 for the form ``c lambda``."""
        return 1.0 / self.T

    def to_record(self):
        return {
            "system": self.system,
            "x0": self.x0.tolist(),
            "T": self.T,
            "lambda_scale": self.lambda_scale,
            "iterations": self.iterations,
            "samples": [[float(t)] + list(map(float, s)) for t, s in zip(self.times, self.samples)],
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_record(), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{i}" for i in range(self.samples.shape[1])])
        for t, s in zip(self.times, self.samples):
            w.writerow([repr(float(t))] + [repr(float(c)) for c in s])
        return buf.getvalue()

    @classmethod
    def from_record(cls, rec):
        data = np.array(rec["samples"], float)
        return cls(
            system=rec["system"],
            x0=np.array(rec["x0"], float),
            T=float(rec["T"]),
            times=data[:, 0],
            samples=data[:, 1:],
            residuals=dict(rec.get("residuals", {})),
            iterations=int(rec.get("iterations", 0)),
        )


def double_by_reflection(system, half_traj, T):
    """Samples on ``[0, T]`` from samples on ``[0, T/2]`` using ``v(t) = rho(v(T - t))``."""
    n = len(half_traj) - 1
    second = system.rho(half_traj[-2::-1])
    samples = np.concatenate([half_traj, second])
    times = np.linspace(0.0, T, 2 * n + 1)
    return times, samples


def _shooting_residual(system, x0s, halves, steps, energy):
    ys = flow_batch(system, x0s, halves, steps)
    g = 0.5 * (system.rho(ys) - ys)
    if energy is not None:
        e = system.conserved_energy(x0s) - energy
        g = np.concatenate([g, e[:, None]], axis=1)
    return g


def find_symmetric_orbit(
    system,
    seed_params,
    T_half_guess,
    energy=None,
    steps=DEFAULT_STEPS,
    tol=1e-10,
    max_iter=100,
    fd_step=FD_STEP,
    min_half_period=MIN_HALF_PERIOD,
):
    """Shoot from ``Fix(rho)`` until the flow returns to ``Fix(rho)``.

    Damped Gauss-Newton on ``(chart parameters, T_half)`` with min-norm
    least-squares steps and central-difference Jacobians; all perturbed
    trajectories are integrated in one batch.  ``energy`` adds the constraint
    ``H(x0) = energy``.
    """
    if not T_half_guess > 0:
        raise ValueError("T_half_guess must be positive")
    if energy is not None and system.conserved_energy is None:
        raise ValueError("an energy level needs a conserved energy")
    u = np.concatenate([np.atleast_1d(np.asarray(seed_params, float)), [float(T_half_guess)]])
    k = len(u)
    if k - 1 != system.chart_dim:
        raise ValueError(f"{system.name} takes {system.chart_dim} chart parameters")

    def states(us):
        return np.array([system.fixed_locus_chart(v[:-1]) for v in us]), us[:, -1]

    def evaluate(using):
        xs, ts = states(using)
        return _shooting_residual(system, xs, ts, steps, energy)

    eye = fd_step * np.eye(k)

    def batch(v):
        # centre, forward and backward perturbations in one integration
        g_all = evaluate(np.concatenate([v[None], v + eye, v - eye]))
        return g_all[0], ((g_all[1 : k + 1] - g_all[k + 1 :]) / (2 * fd_step)).T

    g, jac = batch(u)
    norm = np.linalg.norm(g)
    it = 0
    while norm >= tol:
        if it == max_iter:
            raise NoConvergence(f"residual {norm:.3e} after {max_iter} iterations")
        if np.linalg.norm(jac) < 1e-12:
            raise DegenerateJacobian("shooting Jacobian vanishes; perturb the seed")
        step = np.linalg.lstsq(jac, -g, rcond=1e-10)[0]
        alpha = 1.0
        for _ in range(30):
            trial = u + alpha * step
            if trial[-1] > 0:
                try:
                    gt, jt = batch(trial)
                except StepFailure:
                    gt = None
                if gt is not None and np.linalg.norm(gt) < norm:
                    break
            alpha *= 0.5
        else:
            raise NoConvergence(f"line search stalled at residual {norm:.3e}")
        u, g, jac, norm = trial, gt, jt, np.linalg.norm(gt)
        it += 1
        if u[-1] < min_half_period:
            raise NoConvergence(f"half period collapsed to {u[-1]:.3e}; the seed converges to the trivial solution")
    if u[-1] < min_half_period:
        raise NoConvergence(f"half period {u[-1]:.3e} is the trivial solution")

    x0 = system.fixed_locus_chart(u[:-1])
    T = 2.0 * u[-1]
    half = integrate(system, x0, u[-1], steps)
    times, samples = double_by_reflection(system, half, T)
    orbit = SymmetricOrbit(system.name, x0, float(T), times, samples, {}, params=u[:-1].copy(), iterations=it)
    orbit.residuals = verify_symmetric_orbit(system, orbit, steps=steps)
    orbit.residuals["shooting"] = float(norm)
    return orbit


def verify_symmetric_orbit(system, orbit, steps=DEFAULT_STEPS):
    """Closure, pointwise symmetry and energy drift recomputed on a grid of ``2 * steps`` steps."""
    fine = 2 * steps
    traj = integrate(system, orbit.x0, orbit.T, fine)
    closure = float(np.linalg.norm(traj[-1] - orbit.x0))
    sym = float(np.linalg.norm(traj - system.rho(traj[::-1]), axis=1).max())
    return {
        "closure": closure,
        "symmetry": sym,
        "locus_start": float(system.locus_distance(orbit.x0)),
        "locus_half": float(system.locus_distance(traj[fine // 2])),
        "energy_drift": energy_drift(system, traj),
    }


# ---------------------------------------------------------------------------
# catalog

GEODESIC_REFLECTION = np.diag([1.0, 1.0, -1.0])


_GEODESIC_GENERATOR = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]]).T


def _geodesic_field(x):
    # (q, p) -> (p, -q)
    return x @ _GEODESIC_GENERATOR


def _geodesic_chart(params):
    (theta,) = params
    return np.array([np.cos(theta), np.sin(theta), 0.0, 0.0, 0.0, 1.0])


def _geodesic_energy(x):
    return 0.5 * (np.sum(x[..., :3] ** 2, axis=-1) + np.sum(x[..., 3:] ** 2, axis=-1))


def geodesic_closed_form(x0, t):
    x0 = np.asarray(x0, float)
    q, p = x0[:3], x0[3:]
    t = np.asarray(t, float)[..., None]
    return np.concatenate([q * np.cos(t) + p * np.sin(t), -q * np.sin(t) + p * np.cos(t)], axis=-1)


def geodesic_system():
    r = GEODESIC_REFLECTION
    d = np.block([[r, np.zeros((3, 3))], [np.zeros((3, 3)), -r]])
    return InvolutiveFlowSystem(
        name="geodesic-s2",
        dimension=6,
        vector_field=_geodesic_field,
        involution=d,
        chart=_geodesic_chart,
        chart_dim=1,
        conserved_energy=_geodesic_energy,
        description="geodesic flow (p, -q) on the unit cotangent bundle of S^2; rho(q, p) = (Rq, -Rp), R = diag(1, 1, -1)",
        default_seed=(0.0,),
        default_half_period=3.0,
    )


HILL_CRITICAL_ENERGY = -0.5 * 3 ** (4.0 / 3.0)
HILL_COLLISION_RADIUS = 1e-3
HILL_ENERGY = -3.0

RHO1 = np.diag([1.0, -1.0, -1.0, 1.0])
RHO2 = np.diag([-1.0, 1.0, 1.0, -1.0])


def hill_hamiltonian(x):
    q1, q2, p1, p2 = np.moveaxis(np.asarray(x, float), -1, 0)
    r = np.hypot(q1, q2)
    return 0.5 * (p1**2 + p2**2) + p1 * q2 - p2 * q1 - 1.0 / r - q1**2 + 0.5 * q2**2


def _hill_field(x):
    q1, q2, p1, p2 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    rr = q1 * q1 + q2 * q2
    if rr.min() < HILL_COLLISION_RADIUS**2:
        raise StepFailure(f"collision: |q| = {np.sqrt(rr.min()):.3e}")
    ir3 = rr ** -1.5
    out = np.empty_like(x)
    out[..., 0] = p1 + q2
    out[..., 1] = p2 - q1
    out[..., 2] = p2 - q1 * ir3 + 2 * q1
    out[..., 3] = -p1 - q2 * ir3 - q2
    return out


def _hill_chart1(params):
    q1, p2 = params
    return np.array([q1, 0.0, 0.0, p2])


def _hill_chart2(params):
    q2, p1 = params
    return np.array([0.0, q2, p1, 0.0])


def hill_system(involution=1):
    """Hill's lunar problem in rotating coordinates with ``rho1`` or ``rho2``."""
    common = dict(
        dimension=4,
        vector_field=_hill_field,
        chart_dim=2,
        conserved_energy=hill_hamiltonian,
        default_energy=HILL_ENERGY,
        other_involutions={"rho1": RHO1, "rho2": RHO2},
    )
    if involution == 1:
        return InvolutiveFlowSystem(
            name="hill",
            involution=RHO1,
            chart=_hill_chart1,
            description="Hill's lunar problem; rho1(q, p) = ((q1, -q2), (-p1, p2)), chart (q1, p2)",
            default_seed=(0.15, -2.6),
            default_half_period=0.17,
            **common,
        )
    return InvolutiveFlowSystem(
        name="hill-rho2",
        involution=RHO2,
        chart=_hill_chart2,
        description="Hill's lunar problem; rho2(q, p) = ((-q1, q2), (p1, -p2)), chart (q2, p1)",
        default_seed=(0.15, 2.6),
        default_half_period=0.17,
        **common,
    )


def hill_momentum_on_locus(q1, h, branch=1):
    """``p2`` with ``H(q1, 0, 0, p2) = h``; ``None`` when the level misses that point."""
    disc = q1**2 + 2 * (h + 1.0 / abs(q1) + q1**2)
    if disc < 0:
        return None
    return q1 + branch * np.sqrt(disc)


def builtin_systems():
    systems = [geodesic_system(), hill_system(1), hill_system(2)]
    return {s.name: s for s in systems}
