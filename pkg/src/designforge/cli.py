"""``designforge`` command line.

Every subcommand that writes a file also writes ``<out>.manifest.json``
recording the subcommand, all flags, the seed, the tool version and SHA-256
digests of the files read and written. ``--manifest PATH`` forces a manifest
for subcommands that only print.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .approx import (
    construct_l2_approx,
    construct_tensor_approx,
    epsilon_l2,
    multi_strength_certificates,
    tensor_lower_bound,
)
from .builders import (
    OrbitDesign,
    cross_polytope,
    gaussian_product_design,
    parse_orbit_design,
    signed_design,
    verify_orbit_design,
    write_orbit_design,
)
from .ffield import parse_array, twise_construct, twise_verify, write_array
from .gegenbauer import approx_lower_bound, delsarte_bound, dim_P_gaussian, dim_P_sphere
from .kernel import DesignError, parse_design, write_design
from .moments import gaussian_moment, radial_moment, sphere_moment
from .quad1d import radial_design, unweighted_1d_gaussian_design
from .transfer import gaussian_to_spherical, project_spherical, spherical_to_gaussian
from .verify import DEFAULT_TOL, verify_design


class UsageError(Exception):
    pass


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Run:
    """Collects what a manifest needs while a subcommand executes."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: list[str] = []
        self.outputs: list[str] = []

    def read_text(self, path) -> str:
        self.inputs.append(str(path))
        return Path(path).read_text(encoding="utf-8")

    def wrote(self, path) -> None:
        self.outputs.append(str(path))

    def manifest(self) -> dict:
        flags = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "manifest")}
        return {
            "subcommand": self.args.command,
            "flags": flags,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "inputs": {p: _sha256(p) for p in self.inputs},
            "outputs": {p: _sha256(p) for p in self.outputs},
        }

    def finish(self) -> None:
        target = self.args.manifest
        if target is None and self.outputs:
            primary = getattr(self.args, "out", None) or self.outputs[0]
            target = str(primary) + ".manifest.json"
        if target is not None:
            Path(target).write_text(json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n",
                                    encoding="utf-8")


def _parse_alpha(text: str) -> tuple[int, ...]:
    try:
        alpha = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--alpha: expected comma-separated integers, got {text!r}") from None
    if any(a < 0 for a in alpha):
        raise UsageError("--alpha: exponents must be nonnegative")
    return alpha


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command} {args.action}'")


def _read_any(run: Run, path):
    text = run.read_text(path)
    if text.startswith("orbit v1"):
        return parse_orbit_design(text)
    return parse_design(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_moments(args, run: Run) -> int:
    if args.action == "radial":
        _need(args, "d", "k")
        v = radial_moment(args.k, args.d)
    else:
        _need(args, "alpha")
        alpha = _parse_alpha(args.alpha)
        if args.action == "sphere":
            d = args.d if args.d is not None else len(alpha)
            if len(alpha) != d:
                raise UsageError("--alpha must have --d entries")
            v = sphere_moment(alpha, d)
        else:
            v = gaussian_moment(alpha)
    print(f"exact: {v}")
    print(f"float: {float(v)!r}")
    return 0


def cmd_quad(args, run: Run) -> int:
    if args.action == "radial":
        _need(args, "d", "t")
        rule = radial_design(args.d, args.t)
        for x, w in zip(rule.nodes, rule.weights):
            print(f"{x!r} {w!r}")
    else:
        _need(args, "t", "q", "seed")
        for x in unweighted_1d_gaussian_design(args.t, args.q, args.seed):
            print(repr(x))
    return 0


def cmd_twise(args, run: Run) -> int:
    if args.action == "construct":
        _need(args, "q", "d", "t", "seed", "out")
        arr = twise_construct(args.q, args.d, args.t, args.seed)
        write_array(arr, args.out)
        run.wrote(args.out)
        print(f"rows: {len(arr)}")
        return 0
    _need(args, "t")
    if args.file is None:
        raise UsageError("'twise verify' needs an array file")
    res = twise_verify(parse_array(run.read_text(args.file)), args.t)
    if res.passed:
        print("result: PASS")
        return 0
    print("result: FAIL")
    print(f"columns: {','.join(map(str, res.subset))}")
    print(f"pattern: {','.join(map(str, res.pattern))}")
    print(f"count: {res.count} (expected {res.expected:g})")
    return 1


def cmd_construct(args, run: Run) -> int:
    _need(args, "d", "out")
    if args.action == "cross-polytope":
        design = cross_polytope(args.d)
    elif args.action == "product":
        _need(args, "t", "q", "seed")
        design, arr = gaussian_product_design(args.d, args.t, args.q, args.seed, with_array=True)
        if args.array_out:
            write_array(arr, args.array_out)
            run.wrote(args.array_out)
    else:
        _need(args, "t", "seed")
        if args.t % 2:
            raise UsageError("--t must be even for signed designs (orbits give strength 2s)")
        orbit = signed_design(args.d, args.t // 2, args.measure, args.seed)
        write_orbit_design(orbit, args.out)
        run.wrote(args.out)
        if args.materialize:
            write_design(orbit.materialize(), args.materialize)
            run.wrote(args.materialize)
        print(f"points: {orbit.size()}")
        return 0
    write_design(design, args.out)
    run.wrote(args.out)
    print(f"points: {len(design)}")
    return 0


def cmd_convert(args, run: Run) -> int:
    _need(args, "t", "out")
    X = parse_design(run.read_text(args.file))
    if args.action == "s2g":
        Y = spherical_to_gaussian(X, args.t, check=not args.no_check)
    else:
        Y = gaussian_to_spherical(X, args.t)
    write_design(Y, args.out)
    run.wrote(args.out)
    print(f"points: {len(Y)}")
    return 0


def cmd_project(args, run: Run) -> int:
    _need(args, "k", "t", "out")
    X = parse_design(run.read_text(args.file))
    Y = project_spherical(X, args.k, args.t, check=not args.no_check)
    write_design(Y, args.out)
    run.wrote(args.out)
    print(f"points: {len(Y)}")
    return 0


def cmd_verify(args, run: Run) -> int:
    X = _read_any(run, args.file)
    if isinstance(X, OrbitDesign):
        if args.mode != "exact":
            X = X.materialize().to_float()
            rep = verify_design(X, args.t, "float", args.tol)
        else:
            rep = verify_orbit_design(X, args.t)
    else:
        if args.mode == "float":
            X = X.to_float()
        rep = verify_design(X, args.t, args.mode, args.tol)
    print(rep.summary())
    return 0 if rep.passed else 1


def cmd_certify(args, run: Run) -> int:
    X = parse_design(run.read_text(args.file))
    if args.mode == "l2":
        print(epsilon_l2(X, args.t).summary())
    else:
        for strength, v in multi_strength_certificates(X, args.t).items():
            print(f"strength {strength}: {v!r}")
    return 0


def cmd_bound(args, run: Run) -> int:
    _need(args, "d", "t")
    if args.action == "delsarte":
        print(delsarte_bound(args.d, args.t))
    elif args.action == "dim":
        print(f"sphere: {dim_P_sphere(args.d, args.t)}")
        print(f"gaussian: {dim_P_gaussian(args.d, args.t)}")
    elif args.action == "lp":
        _need(args, "eps")
        print(approx_lower_bound(args.d, args.t, args.eps, exact=True))
    else:
        _need(args, "eps")
        print(tensor_lower_bound(args.d, args.t, args.eps))
    return 0


def cmd_approx(args, run: Run) -> int:
    _need(args, "d", "t", "eps", "seed", "out")
    if args.action == "l2":
        X = construct_l2_approx(args.d, args.t, args.eps, args.seed)
    else:
        X = construct_tensor_approx(args.d, args.t, args.eps, args.seed)
    write_design(X, args.out)
    run.wrote(args.out)
    print(f"points: {len(X)}")
    return 0


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--manifest", help="write the run manifest here (default: <out>.manifest.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="designforge", description="Construct, convert, bound and verify spherical and Gaussian designs.",
                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"designforge {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("moments", help="exact moments of the sphere, Gaussian and radial measures",
                       description="Print the exact and binary64 value of a monomial moment.", allow_abbrev=False)
    p.add_argument("action", choices=["sphere", "gaussian", "radial"])
    p.add_argument("--d", type=int, help="ambient dimension")
    p.add_argument("--alpha", help="exponent vector, e.g. 2,0,2")
    p.add_argument("--k", type=int, help="radial moment order")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("quad", help="one-dimensional quadrature rules",
                       description="radial: Gauss rule for the law of |x| under the Gaussian measure. "
                                   "search1d: unweighted 1-D Gaussian design of a given size.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["radial", "search1d"])
    p.add_argument("--d", type=int, help="ambient dimension (radial)")
    p.add_argument("--t", type=int, help="strength")
    p.add_argument("--q", type=int, help="number of points (search1d)")
    p.add_argument("--seed", type=int, help="search seed (search1d, required)")
    p.set_defaults(func=cmd_quad)

    p = sub.add_parser("twise", help="t-wise independent symbol arrays over finite fields",
                       description="construct: build an array from a t-wise independent vector set. "
                                   "verify: exhaustively check every set of <= t columns. "
                                   "Exit code 1 when verification fails.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["construct", "verify"])
    p.add_argument("file", nargs="?", help="array file to verify")
    p.add_argument("--q", type=int, help="alphabet size (prime or prime power <= 27)")
    p.add_argument("--d", type=int, help="number of columns")
    p.add_argument("--t", type=int, help="independence order")
    p.add_argument("--seed", type=int, help="greedy scan seed (construct, required)")
    p.add_argument("--out", help="output array file")
    p.set_defaults(func=cmd_twise)

    p = sub.add_parser("construct", help="build a design",
                       description="cross-polytope: exact spherical 3-design {+-e_i}. "
                                   "product: unweighted Gaussian t-design over a t-wise independent array. "
                                   "signed: signed design of even strength --t from coordinate orbits.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["cross-polytope", "product", "signed"])
    p.add_argument("--d", type=int, help="dimension")
    p.add_argument("--t", type=int, help="strength")
    p.add_argument("--q", type=int, help="1-D design size / alphabet (product)")
    p.add_argument("--seed", type=int, help="random seed (product, signed: required)")
    p.add_argument("--measure", choices=["sphere", "gaussian"], default="gaussian", help="target measure (signed)")
    p.add_argument("--out", help="output file (orbit file for signed)")
    p.add_argument("--array-out", help="also write the symbol array (product)")
    p.add_argument("--materialize", help="also write every orbit point as a design file (signed)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("convert", help="spherical <-> Gaussian design conversion",
                       description="s2g scales a spherical design by radial Gauss nodes; g2s normalizes, "
                                   "reweights by |x|^s, merges directions and symmetrizes.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["s2g", "g2s"])
    p.add_argument("file", help="input design file")
    p.add_argument("--t", type=int, help="strength")
    p.add_argument("--out", help="output design file")
    p.add_argument("--no-check", action="store_true", help="skip verifying the input (s2g)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("project", help="spherical design in a lower dimension",
                       description="Lift to a Gaussian design, keep the first k coordinates, return to the sphere.",
                       allow_abbrev=False)
    p.add_argument("file", help="input spherical design file")
    p.add_argument("--k", type=int, help="target dimension")
    p.add_argument("--t", type=int, help="strength")
    p.add_argument("--out", help="output design file")
    p.add_argument("--no-check", action="store_true", help="skip verifying the input")
    p.set_defaults(func=cmd_project, action=None)

    p = sub.add_parser("verify", help="check moment residuals of a design or orbit file",
                       description="Exit code 0 when every monomial of degree <= t matches, 1 when one "
                                   "does not, 2 on usage or input errors.",
                       allow_abbrev=False)
    p.add_argument("file", help="design or orbit file")
    p.add_argument("--t", type=int, required=True, help="strength to test")
    p.add_argument("--mode", choices=["exact", "float"], default="float", help="arithmetic")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float tolerance")
    p.set_defaults(func=cmd_verify, action=None)

    p = sub.add_parser("certify", help="approximate-design certificates",
                       description="l2: pair sum of Q_1 + ... + Q_t. tensor: moment-tensor discrepancy "
                                   "at every even strength up to 2t.",
                       allow_abbrev=False)
    p.add_argument("file", help="spherical design file")
    p.add_argument("--mode", choices=["l2", "tensor"], required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_certify, action=None)

    p = sub.add_parser("bound", help="size lower bounds and dimension counts",
                       description="delsarte: minimum size of a spherical t-design. dim: dimensions of "
                                   "the degree-<=t polynomial spaces. lp: LP bound for approximate 2t-designs. "
                                   "tensor: minimum size of a tensor-approximate 2t-design.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["delsarte", "dim", "lp", "tensor"])
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("approx", help="random approximate designs",
                       description="l2: ceil((r-1)/eps^2) uniform points with L2 certificate <= eps. "
                                   "tensor: ceil(eps^-2) uniform points with tensor discrepancy <= eps.",
                       allow_abbrev=False)
    p.add_argument("action", choices=["l2", "tensor"])
    p.add_argument("--d", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--seed", type=int, help="required")
    p.add_argument("--out")
    p.set_defaults(func=cmd_approx)

    for action in sub.choices.values():
        _common(action)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run = Run(args)
        code = args.func(args, run)
        run.finish()
        return code
    except UsageError as exc:
        print(f"designforge: usage error: {exc}", file=sys.stderr)
        return 2
    except (DesignError, ValueError, OSError) as exc:
        print(f"designforge: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
