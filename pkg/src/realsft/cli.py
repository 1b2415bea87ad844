"""Command line front end: ``realsft <subcommand> [options]``.

Exit status is 0 on success, 2 when a domain error is raised (the output is
then an error record naming it), and 1 on usage errors.  Every record carries
the subcommand and the seed in use.  The seed comes from ``--seed``, then the
``seed`` key of a ``--config`` file, then ``REAL_SFT_SEED``, then 0.
"""

import argparse
import configparser
import csv
import datetime
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import cotangent, energy, holcurve, mobius, orbits, quadric
from .errors import RealSFTError

SEED_ENV = "REAL_SFT_SEED"
DEFAULT_TOLERANCES = {"classification": 1e-8, "residual": 1e-6, "quadrature": 1e-6}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    output_format: str = "json"
    output_path: str = None
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    timestamp: bool = True

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.output_format not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise UsageError(f"tolerance {k} must be positive")


# ---------------------------------------------------------------------------
# argument syntax

def parse_complex(token):
    """``3``, ``-1.5``, ``2i``, ``-i``, ``1+2i``, ``0.5-1e-3i``."""
    t = token.strip().replace("I", "i").replace("J", "j")
    if not t:
        raise UsageError("empty number")
    if t[-1] in "ij":
        body = t[:-1]
        # split at the last sign that is not an exponent sign
        cut = max((k for k, c in enumerate(body) if c in "+-" and (k == 0 or body[k - 1] not in "eE")), default=-1)
        re_part, im_part = (body[:cut], body[cut:]) if cut > 0 else ("", body)
        if im_part in ("", "+", "-"):
            im_part += "1"
        try:
            return complex(float(re_part) if re_part else 0.0, float(im_part))
        except ValueError:
            raise UsageError(f"cannot parse complex number {token!r}") from None
    try:
        return complex(float(t))
    except ValueError:
        raise UsageError(f"cannot parse number {token!r}") from None


def parse_vector(text, real=False):
    vals = [parse_complex(tok) for tok in text.split(",")]
    arr = np.array(vals, complex)
    if real:
        if np.any(arr.imag != 0):
            raise UsageError("expected real entries")
        return arr.real
    return arr


def parse_matrix(text):
    v = parse_vector(text)
    n = int(round(np.sqrt(len(v))))
    if n * n != len(v):
        raise UsageError(f"matrix needs a square number of entries, got {len(v)}")
    return v.reshape(n, n)


def cplx(z):
    z = np.asarray(z, complex)
    return np.stack([z.real, z.imag], axis=-1).tolist()


def _quadric(args):
    if args.B is not None:
        return quadric.Quadric(parse_matrix(args.B))
    return quadric.Quadric.standard(args.quadric_dim)


def _rho(args, size):
    perm = np.arange(size) if args.rho_perm is None else parse_vector(args.rho_perm, real=True).astype(int)
    signs = None if args.rho_signs is None else parse_vector(args.rho_signs, real=True)
    return holcurve.AmbientInvolution(perm, signs)


def _line_map(args):
    q = _quadric(args)
    return holcurve.RationalLineMap(q, [parse_vector(args.p), parse_vector(args.q)])


# ---------------------------------------------------------------------------
# subcommands; each returns a payload dict

def cmd_classify_involution(args, cfg):
    m = mobius.MobiusMap(parse_matrix(args.matrix))
    cls = mobius.classify_pair(m)
    inv = mobius.AntiInvolution(m)
    out = {"type": cls.value, "square_residual": mobius.square_residual(m)}
    if cls is mobius.InvolutionClass.TYPE_I:
        out["fixed_set"] = "circle"
    else:
        out["fixed_set"] = "empty"
        out["grid_min_displacement"] = mobius.min_displacement(inv)
    return out


def cmd_fixed_circle(args, cfg):
    inv = mobius.AntiInvolution(mobius.MobiusMap(parse_matrix(args.matrix)))
    circle = mobius.fixed_point_set(inv)
    if circle is None:
        return {"type": "II", "fixed_set": "empty", "grid_min_displacement": mobius.min_displacement(inv)}
    pts = circle.sample(args.samples)
    return {
        "type": "I",
        "fixed_set": "circle",
        "normal": circle.normal.tolist(),
        "offset": float(circle.offset),
        "center": np.asarray(circle.center).tolist(),
        "radius": float(circle.radius),
        "max_residual": mobius.fixed_point_residual(inv, pts),
    }


def cmd_conjugator(args, cfg):
    inv = mobius.AntiInvolution(mobius.MobiusMap(parse_matrix(args.matrix)))
    psi = mobius.conjugator_to_standard(inv)
    return {"psi": cplx(psi.matrix), "residual": mobius.conjugation_residual(inv, psi)}


def cmd_quadric_contains(args, cfg):
    q = _quadric(args)
    z = q._vec(parse_vector(args.point))
    return {"contains": quadric.contains(q, z), "residual": float(abs(q.bilinear(z, z)))}


def cmd_make_line(args, cfg):
    q = _quadric(args)
    line = quadric.make_line(q, parse_vector(args.p), parse_vector(args.q))
    return {"valid": True, "p": cplx(line.p.coords), "q": cplx(line.q.coords), "residuals": list(map(float, line.residuals()))}


def cmd_gw_count(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    counts, resid, sigma_counts = [], 0.0, []
    for _ in range(args.trials):
        q, p, dec = quadric.random_configuration(args.quadric_dim, rng)
        lines = quadric.enumerate_lines(q, p, dec)
        counts.append(len(lines))
        for line in lines:
            resid = max(resid, *line.residuals())
            sigma_counts.append(holcurve.count_sigma_intersections(holcurve.RationalLineMap.from_line(line), dec))
    return {
        "quadric_dim": args.quadric_dim,
        "trials": args.trials,
        "counts": counts,
        "all_one": all(c == 1 for c in counts),
        "sigma_counts": sigma_counts,
        "max_residual": float(resid),
    }


def cmd_grassmannian(args, cfg):
    if args.point is not None:
        x, y = quadric.grassmannian_correspondence("inverse", parse_vector(args.point))
        back = quadric.grassmannian_correspondence("forward", x, y)
        return {"direction": "inverse", "x": x.tolist(), "y": y.tolist(), "round_trip": back.distance(parse_vector(args.point))}
    if args.x is None or args.y is None:
        raise UsageError("grassmannian needs --point, or both --x and --y")
    x, y = parse_vector(args.x, real=True), parse_vector(args.y, real=True)
    z = quadric.grassmannian_correspondence("forward", x, y)
    x2, y2 = quadric.grassmannian_correspondence("inverse", z.coords)
    dist = np.linalg.norm(quadric.real_plane_projector(x, y) - quadric.real_plane_projector(x2, y2))
    return {"direction": "forward", "point": cplx(z.coords), "round_trip": float(dist)}


def cmd_map_cotangent(args, cfg):
    if args.z is not None:
        z = cotangent.AffineQuadricPoint(parse_vector(args.z))
        s = cotangent.quadric_to_cotangent(z)
        back = cotangent.cotangent_to_quadric(s)
        return {"direction": "to-cotangent", "q": s.q.tolist(), "p": s.p.tolist(), "round_trip": float(np.abs(back.z - z.z).max())}
    if args.q is None or args.p is None:
        raise UsageError("map-cotangent needs --z, or both --q and --p")
    s = cotangent.CotangentState(parse_vector(args.q, real=True), parse_vector(args.p, real=True))
    z = cotangent.cotangent_to_quadric(s)
    back = cotangent.quadric_to_cotangent(z)
    err = max(np.abs(back.q - s.q).max(), np.abs(back.p - s.p).max())
    return {"direction": "to-quadric", "z": cplx(z.z), "round_trip": float(err)}


def cmd_pullback_check(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(args.samples):
        z = cotangent.random_affine_point(args.dim, rng)
        v, w = cotangent.random_tangent_vector(z, rng), cotangent.random_tangent_vector(z, rng)
        r, scale = cotangent.pullback_residual(z, v, w)
        worst = max(worst, r / scale)
    tol = cfg.tolerances["residual"]
    return {"dim": args.dim, "samples": args.samples, "max_scaled_residual": worst, "tolerance": tol, "pass": worst < tol}


def _bump_primitive(m):
    # lambda_can + d f with f(q, p) = sum_j sin(q_j) p_j^2 + q_j p_j
    def form(x):
        q, p = x[:m], x[m:]
        df_dq = np.cos(q) * p**2 + p
        df_dp = 2 * np.sin(q) * p + q
        return cotangent.canonical_primitive(x) + np.concatenate([df_dq, df_dp])

    return form


def cmd_anti_average_check(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    m = args.dim + 1
    r = np.diag(parse_vector(args.reflection, real=True)) if args.reflection else np.eye(m)
    if r.shape != (m, m):
        raise UsageError("reflection must have dim + 1 signs")
    rho = (lambda x: (np.asarray(x, float), np.eye(2 * m))) if args.involution == "identity" else cotangent.phase_involution(r)
    form = _bump_primitive(m)
    pts = [cotangent.random_cotangent_state(args.dim, rng).x for _ in range(args.samples)]
    avg = cotangent.anti_average_primitive(form, rho, pts)
    anti = max(float(np.abs(cotangent.pullback_covector(avg, rho, x) + avg(x)).max()) for x in pts)
    dd = max(
        float(np.abs(cotangent.exterior_derivative(avg, x) - cotangent.exterior_derivative(form, x)).max()) for x in pts
    )
    return {"dim": args.dim, "samples": args.samples, "anti_invariance": anti, "d_difference": dd}


def cmd_involute_line(args, cfg):
    u = _line_map(args)
    iu = holcurve.involute_line(u, _rho(args, u.quadric.ambient_size))
    return {"frame": cplx(iu.frame), "plane_distance": quadric.plane_distance(u.frame, iu.frame)}


def _pseudo_record(res):
    out = {"status": res.status.value, "plane_distance": res.plane_distance}
    if res.phi is not None:
        out.update({"phi": cplx(res.phi.matrix), "class": res.cls.value, "residual": res.residual})
    return out


def cmd_detect_pseudo_fixed(args, cfg):
    u = _line_map(args)
    return _pseudo_record(holcurve.detect_pseudo_fixed(u, _rho(args, u.quadric.ambient_size)))


def cmd_normalize_fixed(args, cfg):
    u = _line_map(args)
    rho = _rho(args, u.quadric.ambient_size)
    res = holcurve.detect_pseudo_fixed(u, rho)
    fixed = holcurve.normalize_to_fixed(u, res, rho)
    return {"detection": _pseudo_record(res), "frame": cplx(fixed.frame), "fixed_residual": holcurve.fixed_residual(fixed, rho)}


def cmd_sigma_count(args, cfg):
    u = _line_map(args)
    sigma = parse_vector(args.sigma) if args.sigma else np.eye(u.quadric.ambient_size)[-1]
    param = holcurve.sigma_intersection(u, sigma)
    return {"count": holcurve.count_sigma_intersections(u, sigma), "parameter": cplx(param)}


def _system(args):
    catalog = orbits.builtin_systems()
    if args.system not in catalog:
        raise UsageError(f"unknown system {args.system!r}; choose from {sorted(catalog)}")
    return catalog[args.system]


def cmd_find_orbit(args, cfg):
    sys_ = _system(args)
    if args.seed_params is not None:
        params = parse_vector(args.seed_params, real=True)
    elif args.seed_angle is not None:
        params = np.array([args.seed_angle])
    else:
        params = np.array(sys_.default_seed, float)
    t_half = sys_.default_half_period if args.t_half is None else args.t_half
    level = args.energy if args.energy is not None else sys_.default_energy
    orbit = orbits.find_symmetric_orbit(sys_, params, t_half, energy=level, steps=args.steps)
    rec = orbit.to_record()
    rec["energy_level"] = level
    rec["_orbit"] = orbit
    return rec


def cmd_verify_orbit(args, cfg):
    with open(args.input) as fh:
        rec = json.load(fh)
    orbit = orbits.SymmetricOrbit.from_record(rec)
    catalog = orbits.builtin_systems()
    if orbit.system not in catalog:
        raise UsageError(f"unknown system {orbit.system!r} in orbit record")
    steps = args.steps or max(16, (len(orbit.samples) - 1) // 2)
    return {"system": orbit.system, "T": orbit.T, "residuals": orbits.verify_symmetric_orbit(catalog[orbit.system], orbit, steps)}


def cmd_list_systems(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    out = []
    for name, s in orbits.builtin_systems().items():
        sq, tr = orbits.check_system(s, rng)
        out.append(
            {
                "name": name,
                "dimension": s.dimension,
                "chart_dim": s.chart_dim,
                "description": s.description,
                "default_seed": list(s.default_seed),
                "default_half_period": s.default_half_period,
                "default_energy": s.default_energy,
                "involution_residual": sq,
                "time_reversal_residual": tr,
            }
        )
    return {"systems": out}


def _disk(args, cfg):
    if args.disk is not None:
        with open(args.disk) as fh:
            return energy.DiscretizedDiskMap.from_json(fh.read())
    kind = args.synthetic
    rings = args.rings
    if kind == "flat":
        return energy.flat_disk(1.0, rings)
    if kind == "smooth":
        return energy.synthetic_disk(*energy.smooth_test_form(), energy.disk_mesh(1.0, rings))
    if kind == "cylinder":
        return energy.cylinder_disk(1.5, rings)
    if kind == "constant":
        return energy.constant_disk(rings)
    if kind == "inflated":
        return energy.inflated_disk(1.5, rings)
    if kind == "line":
        rng = np.random.default_rng(cfg.seed)
        q, p, dec = quadric.random_configuration(args.quadric_dim, rng)
        line = quadric.enumerate_lines(q, p, dec)[0]
        return energy.line_disk(line, dec, args.radius, rings, args.parametrization)
    raise UsageError("choose --disk FILE or --synthetic KIND")


def cmd_sft_energy(args, cfg):
    disk = _disk(args, cfg)
    est = energy.sft_energy_estimate(disk, args.family_size, args.delta)
    bound = energy.disk_bound_check(disk)
    return {
        "family_size": args.family_size,
        "delta": args.delta,
        "energy_lower_bound": est,
        "area": bound["value"],
        "area_bound_pass": bound["pass"],
    }


def cmd_stokes_check(args, cfg):
    disk = _disk(args, cfg)
    out = {
        "residual": energy.stokes_residual(disk),
        "interior": energy.area_integral(disk),
        "boundary": energy.boundary_integral(disk),
        "mesh_size": disk.mesh_size,
    }
    if args.refine:
        if args.disk is not None:
            raise UsageError("--refine needs a synthetic disk")
        args.rings *= 2
        fine = energy.stokes_residual(_disk(args, cfg))
        out["refined_residual"] = fine
        out["ratio"] = out["residual"] / fine if fine > 0 else None
    return out


COMMANDS = {
    "classify-involution": cmd_classify_involution,
    "fixed-circle": cmd_fixed_circle,
    "conjugator": cmd_conjugator,
    "quadric-contains": cmd_quadric_contains,
    "make-line": cmd_make_line,
    "gw-count": cmd_gw_count,
    "grassmannian": cmd_grassmannian,
    "map-cotangent": cmd_map_cotangent,
    "pullback-check": cmd_pullback_check,
    "anti-average-check": cmd_anti_average_check,
    "involute-line": cmd_involute_line,
    "detect-pseudo-fixed": cmd_detect_pseudo_fixed,
    "normalize-fixed": cmd_normalize_fixed,
    "sigma-count": cmd_sigma_count,
    "find-orbit": cmd_find_orbit,
    "verify-orbit": cmd_verify_orbit,
    "list-systems": cmd_list_systems,
    "sft-energy": cmd_sft_energy,
    "stokes-check": cmd_stokes_check,
}


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for randomized fixtures")
    common.add_argument("--config", default=None, help="INI file with [realsft] and [tolerances] sections")
    common.add_argument("--output", default=None, help="write the record here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-identical output")

    parser = _Parser(prog="realsft", description="Quadrics, real involutions, symmetric orbits and disk energies.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    def quadric_opts(p, dim=3):
        p.add_argument("--quadric-dim", type=int, default=dim)
        p.add_argument("--B", default=None, help="row-major symmetric matrix")

    def line_opts(p):
        quadric_opts(p, 2)
        p.add_argument("--p", required=True)
        p.add_argument("--q", required=True)
        p.add_argument("--rho-perm", default=None)
        p.add_argument("--rho-signs", default=None)

    involution_help = {
        "classify-involution": "type of z -> phi(conj z) on the projective line",
        "fixed-circle": "fixed circle of a type I involution",
        "conjugator": "Moebius map conjugating a type I involution to conjugation",
    }
    for name, help_ in involution_help.items():
        p = add(name, help_)
        p.add_argument("--matrix", required=True, help="row-major 2x2 complex matrix of phi")
        if name == "fixed-circle":
            p.add_argument("--samples", type=int, default=32)

    p = add("quadric-contains", "membership test")
    quadric_opts(p)
    p.add_argument("--point", required=True)

    p = add("make-line", "validate a spanning pair")
    quadric_opts(p)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("gw-count", "lines through a random point meeting a random cycle")
    p.add_argument("--quadric-dim", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)

    p = add("grassmannian", "oriented 2-planes <-> points of the standard quadric")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--point")

    p = add("map-cotangent", "affine quadric <-> cotangent bundle of the sphere")
    p.add_argument("--z")
    p.add_argument("--q")
    p.add_argument("--p")

    p = add("pullback-check", "finite-difference symplectic pullback residual")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=100)

    p = add("anti-average-check", "anti-invariant averaging of a perturbed canonical primitive")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--reflection", default=None, help="diagonal signs of R")
    p.add_argument("--involution", choices=("induced", "identity"), default="induced")

    line_help = {
        "involute-line": "image of a line map under u -> rho o u o conj",
        "detect-pseudo-fixed": "whether a line map is fixed up to reparametrization",
        "normalize-fixed": "reparametrize a type I pseudo-fixed line into a fixed one",
    }
    for name, help_ in line_help.items():
        line_opts(add(name, help_))
    p = add("sigma-count", "parameters where a line meets a hyperplane")
    line_opts(p)
    p.add_argument("--sigma", default=None, help="hyperplane coefficients (default: last coordinate)")

    p = add("find-orbit", "shoot a symmetric periodic orbit from the fixed locus")
    p.add_argument("--system", default="geodesic-s2")
    p.add_argument("--seed-angle", type=float, default=None)
    p.add_argument("--seed-params", default=None)
    p.add_argument("--t-half", type=float, default=None)
    p.add_argument("--energy", type=float, default=None)
    p.add_argument("--steps", type=int, default=orbits.DEFAULT_STEPS)

    p = add("verify-orbit", "recompute orbit residuals from a JSON record")
    p.add_argument("--input", required=True)
    p.add_argument("--steps", type=int, default=None)

    add("list-systems", "catalog of flows with involutions")

    disk_help = {
        "sft-energy": "energy lower bound of a disk over test profiles",
        "stokes-check": "interior vs boundary integral",
    }
    for name, help_ in disk_help.items():
        p = add(name, help_)
        p.add_argument("--disk", default=None, help="JSON mesh record")
        p.add_argument(
            "--synthetic", choices=("flat", "smooth", "cylinder", "constant", "inflated", "line"), default="smooth"
        )
        p.add_argument("--rings", type=int, default=8)
        p.add_argument("--quadric-dim", type=int, default=3)
        p.add_argument("--radius", type=float, default=3.0)
        p.add_argument("--parametrization", choices=("area", "affine"), default="area")
        if name == "sft-energy":
            p.add_argument("--family-size", type=int, default=64)
            p.add_argument("--delta", type=float, default=energy.DEFAULT_DELTA)
        else:
            p.add_argument("--refine", action="store_true")
    return parser


def resolve_config(args, environ=None):
    environ = os.environ if environ is None else environ
    file_seed, fmt, tolerances = None, None, dict(DEFAULT_TOLERANCES)
    if args.config:
        cp = configparser.ConfigParser()
        if not cp.read(args.config):
            raise UsageError(f"cannot read config file {args.config!r}")
        if cp.has_section("realsft"):
            sec = cp["realsft"]
            if "seed" in sec:
                file_seed = sec.getint("seed")
            fmt = sec.get("format", None)
        if cp.has_section("tolerances"):
            for k, v in cp["tolerances"].items():
                tolerances[k] = float(v)
    if args.seed is not None:
        seed = args.seed
    elif file_seed is not None:
        seed = file_seed
    elif environ.get(SEED_ENV):
        try:
            seed = int(environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    else:
        seed = 0
    return RunConfig(
        subcommand=args.command,
        seed=seed,
        output_format=args.format or fmt or "json",
        output_path=args.output,
        tolerances=tolerances,
        timestamp=not args.no_timestamp,
    )


# ---------------------------------------------------------------------------
# output

def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items() if not k.startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) + 0.0  # no negative zeros in records
    return obj


def render_json(record):
    return json.dumps(_plain(record), indent=2, sort_keys=True) + "\n"


def render_csv(record, payload):
    if "_orbit" in payload:
        return payload["_orbit"].to_csv()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if record.get("command") == "gw-count" and "counts" in record:
        w.writerow(["trial", "count"])
        for i, c in enumerate(record["counts"]):
            w.writerow([i, c])
        return buf.getvalue()
    w.writerow(["key", "value"])
    for k, v in _plain(record).items():
        w.writerow([k, v if isinstance(v, (str, int, float, bool)) or v is None else json.dumps(v, sort_keys=True)])
    return buf.getvalue()


def _emit(text, path, stream):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)


def run(argv=None, stdout=None, stderr=None, environ=None):
    """Parse ``argv``, dispatch, write the record; return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand; try --help")
        cfg = resolve_config(args, environ)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    base = {"command": cfg.subcommand, "seed": cfg.seed}
    if cfg.timestamp:
        base["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    try:
        with np.errstate(all="ignore"):
            payload = COMMANDS[cfg.subcommand](args, cfg)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except (RealSFTError, ValueError, OSError) as exc:
        name = exc.name if isinstance(exc, RealSFTError) else ("InvalidInput" if isinstance(exc, ValueError) else "IOError")
        record = dict(base, error=name, message=str(exc))
        _emit(render_json(record), cfg.output_path, stdout)
        return 2
    record = dict(base, **payload)
    text = render_json(record) if cfg.output_format == "json" else render_csv(record, payload)
    _emit(text, cfg.output_path, stdout)
    return 0


def main():
    try:
        code = run()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stderr.close()
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
