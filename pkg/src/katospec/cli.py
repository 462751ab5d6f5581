"""Command-line front end.

Subcommands: mesh-info, spectrum, kato, constants, verify. Exactly one
input selector (--mesh, --make, --model) feeds the first three. All
structured outputs are byte-deterministic for a fixed input and seed;
when an output path is given, a PNG figure is rendered next to it
(disable with --no-figures).

Environment overrides: KATOSPEC_SEED and KATOSPEC_MODES replace the
built-in defaults for --seed and --modes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import constants as consts
from . import homology, kato, spectral, verify
from .mesh import (
    MeshError,
    curvature_lowest,
    diameter,
    load_mesh,
    make_bumpy_sphere,
    make_flat_torus_mesh,
    make_icosphere,
    negative_part,
    shifted_negative_part,
)
from .models import ModelManifold, load_model, make_model

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _env_int(name, fallback):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"bad {name}={raw!r} (integer expected)")


def _parse_kv(text):
    out = {}
    if not text:
        return out
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ValueError(f"expected key=value, got {chunk!r}")
        key, val = chunk.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _make_from_spec(spec: str):
    """Inline generator syntax, e.g. icosphere:subdivisions=4,radius=1."""
    name, _, rest = spec.partition(":")
    kv = _parse_kv(rest)
    try:
        if name == "icosphere":
            return make_icosphere(int(kv.get("subdivisions", 3)), float(kv.get("radius", 1.0)))
        if name == "flat_torus":
            tau = 2.0 * math.pi
            return make_flat_torus_mesh(
                float(kv.get("lx", tau)), float(kv.get("ly", tau)),
                int(kv.get("nx", 24)), int(kv.get("ny", 26)),
            )
        if name == "bumpy_sphere":
            return make_bumpy_sphere(
                int(kv.get("subdivisions", 3)), float(kv.get("amplitude", 0.3)),
                int(kv.get("frequency", 4)), int(kv.get("seed", 7)),
            )
    except (KeyError, ValueError) as exc:
        raise MeshError(f"bad generator spec {spec!r}: {exc}") from exc
    raise MeshError(f"unknown generator {name!r} (icosphere, flat_torus, bumpy_sphere)")


def _model_from_spec(spec: str):
    """Inline model syntax (kind=sphere,dim=3,radius=1,modes=60) or a JSON path."""
    if "=" not in spec:
        return load_model(spec)
    kv = _parse_kv(spec)
    kind = kv.get("kind", "sphere")
    n = int(kv.get("dim", 3))
    modes = int(kv.get("modes", 60))
    if "periods" in kv:
        geom = [float(x) for x in kv["periods"].split(";")]
    else:
        geom = float(kv.get("radius", 1.0))
    return make_model(kind, n, geom, modes)


def _load_input(args):
    chosen = [x for x in (args.mesh, args.make, args.model) if x]
    if len(chosen) != 1:
        raise MeshError("exactly one of --mesh, --make, --model is required")
    if args.mesh:
        return load_mesh(args.mesh)
    if args.make:
        return _make_from_spec(args.make)
    return _model_from_spec(args.model)


def _add_input_flags(parser):
    parser.add_argument("--mesh", help="path to an OFF or OBJ triangle mesh")
    parser.add_argument(
        "--make",
        help="inline generator: icosphere:subdivisions=4,radius=1 | "
        "flat_torus:lx=6.28,ly=6.28,nx=24,ny=26 | "
        "bumpy_sphere:subdivisions=4,amplitude=0.3,frequency=4,seed=7",
    )
    parser.add_argument(
        "--model",
        help="inline model kind=sphere,dim=3,radius=1,modes=60 "
        "(periods separated by ';') or a JSON model file",
    )


def _write_output(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _maybe_figure(args, render):
    if args.out and not args.no_figures:
        png = str(Path(args.out).with_suffix(".png"))
        render(png)
        print(f"figure written to {png}", file=sys.stderr)


# -- subcommands -----------------------------------------------------------------


def cmd_mesh_info(args):
    manifold = _load_input(args)
    if isinstance(manifold, ModelManifold):
        lines = [
            f"label\t{manifold.label}",
            f"kind\t{manifold.kind}",
            f"dimension\t{manifold.dimension}",
            f"total_volume\t{manifold.total_volume!r}",
            f"diameter\t{manifold.diameter!r}",
            f"ricci_lowest\t{manifold.ricci_lowest!r}",
            f"modes\t{len(manifold.eigenvalues)}",
        ]
        _write_output("\n".join(lines) + "\n", args.out)
        return EXIT_OK
    rho = curvature_lowest(manifold)
    est = diameter(manifold)
    gb = float(rho.values @ manifold.vertex_volumes) - 2.0 * math.pi * manifold.euler_characteristic()
    lines = [
        f"label\t{manifold.label}",
        f"vertices\t{manifold.vertex_count}",
        f"edges\t{manifold.edge_count}",
        f"faces\t{manifold.face_count}",
        f"total_volume\t{manifold.total_volume!r}",
        f"diameter\t{est.value!r}" + ("" if est.exact else "\t(lower bound)"),
        f"euler_characteristic\t{manifold.euler_characteristic()}",
        f"betti_one\t{homology.betti_one(manifold)}",
        f"curvature_min\t{float(rho.values.min())!r}",
        f"curvature_mean\t{float(rho.values @ manifold.vertex_volumes) / manifold.total_volume!r}",
        f"curvature_max\t{float(rho.values.max())!r}",
        f"gauss_bonnet_residual\t{gb!r}",
    ]
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_spectrum(args):
    manifold = _load_input(args)
    if args.modes < 1:
        raise MeshError("--modes must be at least 1")
    if isinstance(manifold, ModelManifold):
        spec = spectral.decompose(manifold, m=min(args.modes, len(manifold.eigenvalues)),
                                  seed=args.seed)
        resid = np.zeros(spec.mode_count)
    else:
        op = spectral.assemble(manifold)
        spec = spectral.decompose(op, m=min(args.modes, op.vertex_count), seed=args.seed)
        resid = spec.residuals
    lines = ["index\teigenvalue\tresidual"]
    for i, (lam, r) in enumerate(zip(spec.eigenvalues, resid)):
        lines.append(f"{i}\t{float(lam)!r}\t{float(r)!r}")
    _write_output("\n".join(lines) + "\n", args.out)
    from . import figures

    _maybe_figure(args, lambda png: figures.save_spectrum_figure(
        spec.eigenvalues, png, manifold.label))
    return EXIT_OK


def _resolve_potential(args, manifold):
    spec_text = args.potential
    if isinstance(manifold, ModelManifold):
        rho = manifold.ricci_lowest
        if spec_text == "ricci-neg":
            return max(0.0, -rho)
        if spec_text.startswith("shifted:"):
            return max(0.0, float(spec_text.split(":", 1)[1]) - rho)
        if spec_text.startswith("constant:"):
            return float(spec_text.split(":", 1)[1])
        raise MeshError("models support ricci-neg, shifted:<level>, constant:<value>")
    if spec_text == "ricci-neg":
        return negative_part(curvature_lowest(manifold))
    if spec_text.startswith("shifted:"):
        level = float(spec_text.split(":", 1)[1])
        return shifted_negative_part(curvature_lowest(manifold), level)
    if spec_text.startswith("constant:"):
        value = float(spec_text.split(":", 1)[1])
        return manifold.field(np.full(manifold.vertex_count, value))
    if spec_text.startswith("file:"):
        path = spec_text.split(":", 1)[1]
        values = np.loadtxt(path)
        return manifold.field(values)
    raise MeshError(
        "potential must be ricci-neg, shifted:<level>, constant:<value>, or file:<path>"
    )


def cmd_kato(args):
    manifold = _load_input(args)
    if isinstance(manifold, ModelManifold):
        spec = spectral.decompose(manifold, seed=args.seed)
        cap = 10.0 * manifold.diameter**2
    else:
        op = spectral.assemble(manifold)
        spec = spectral.decompose(op, m=min(args.modes, op.vertex_count), seed=args.seed)
        cap = 10.0 * diameter(manifold).value ** 2
    potential = _resolve_potential(args, manifold)

    if args.threshold is not None:
        thr = kato.kato_first_threshold(spec, potential, args.threshold, cap=cap)
        lines = [
            f"target\t{thr.target!r}",
            f"horizon\t{thr.horizon!r}" + ("\t(cap, never exceeds)" if thr.capped else ""),
            f"kappa_at_horizon\t{thr.kappa!r}",
        ]
        _write_output("\n".join(lines) + "\n", args.out)
        return EXIT_OK

    horizon = args.T
    result = kato.kato_constant(spec, potential, horizon)
    if args.series:
        horizons = np.geomspace(horizon / 100.0, horizon, 33)
        kappas = kato.kato_series(spec, potential, horizons)
        lines = ["horizon\tkappa"]
        for t, kv in zip(horizons, kappas):
            lines.append(f"{float(t)!r}\t{float(kv)!r}")
        _write_output("\n".join(lines) + "\n", args.out)
        from . import figures

        _maybe_figure(args, lambda png: figures.save_series_figure(
            horizons, kappas, png, label=manifold.label))
        return EXIT_OK
    lines = [
        f"kappa\t{result.value!r}",
        f"horizon\t{result.horizon!r}",
        f"argmax_vertex\t{'' if result.argmax_vertex is None else result.argmax_vertex}",
        f"truncation\t{result.truncation!r}",
    ]
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _parse_range(text, cast):
    """'a:b:k' grid, 'a:b' pair endpoints, or comma list."""
    if ":" in text:
        parts = text.split(":")
        lo, hi = cast(parts[0]), cast(parts[1])
        count = int(parts[2]) if len(parts) > 2 else int(hi - lo) + 1
        if count < 2:
            return [lo]
        return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
    return [cast(p) for p in text.split(",")]


def cmd_constants(args):
    ns = [int(round(x)) for x in _parse_range(args.n, float)]
    deltas = _parse_range(args.delta, float)
    lines = ["n\tdelta\tp\tgamma\tC_primary\tC_alternate\tdiscrepancy\tbuser_target"]
    curves = {}
    for n in ns:
        for d in deltas:
            buser = consts.hypothesis_threshold("buser_kato", n)
            try:
                sc = consts.sobolev_constants(n, d)
                dc = consts.diameter_constant(n, d)
            except consts.DomainError:
                lines.append(
                    f"{n}\t{d!r}\tout-of-domain\t\t\t\t\t{buser!r}"
                )
                continue
            lines.append(
                f"{n}\t{d!r}\t{sc.exponent!r}\t{sc.coefficient!r}\t"
                f"{dc.value!r}\t{dc.alternate!r}\t{int(dc.discrepancy)}\t{buser!r}"
            )
            curves.setdefault(n, []).append((d, dc.value, dc.alternate))
    _write_output("\n".join(lines) + "\n", args.out)
    if curves:
        n0 = ns[0]
        pts = sorted(curves.get(n0, []))
        if len(pts) > 1:
            from . import figures

            _maybe_figure(args, lambda png: figures.save_constants_figure(
                [p[0] for p in pts], [p[1] for p in pts], [p[2] for p in pts], n0, png))
    return EXIT_OK


def _apply_suite_overrides(config, args):
    overrides = {
        "diameter": {} if args.epsilon is None else {"epsilon": args.epsilon},
        "sobolev": {} if args.delta is None else {"delta": args.delta},
        "geometric_kato": {} if args.scale_fraction is None
        else {"scale_fraction": args.scale_fraction},
        "isoperimetric_ii": {} if args.iso_p is None else {"p": args.iso_p},
    }
    rewritten = []
    for item in config["theorems"]:
        tid = item if isinstance(item, str) else item["id"]
        extra = overrides.get(tid, {})
        if extra:
            entry = {"id": tid} if isinstance(item, str) else dict(item)
            entry.update(extra)
            rewritten.append(entry)
        else:
            rewritten.append(item)
    config["theorems"] = rewritten


def cmd_verify(args):
    if args.config:
        config = verify.load_config(args.config)
    else:
        config = verify.default_config()
        if args.seed is not None:
            config["seed"] = args.seed
        _apply_suite_overrides(config, args)
    reports, status = verify.run_suite(config)
    table = verify.reports_to_table(reports)
    _write_output(table, args.out)
    if args.json:
        Path(args.json).write_text(verify.reports_to_json(reports, config))
    if args.out and not args.no_figures:
        from . import figures

        png = str(Path(args.out).with_suffix(".png"))
        figures.save_suite_figure(reports, png)
        print(f"figure written to {png}", file=sys.stderr)
    return EXIT_FAIL if status else EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser():
    seed_default = _env_int("KATOSPEC_SEED", 42)
    modes_default = _env_int("KATOSPEC_MODES", 300)
    parser = argparse.ArgumentParser(
        prog="katospec",
        description=__doc__,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, modes=True):
        _add_input_flags(p)
        p.add_argument("--seed", type=int, default=seed_default,
                       help="seed for any randomized step (env KATOSPEC_SEED)")
        if modes:
            p.add_argument("--modes", type=int, default=modes_default,
                           help="eigenmode count for meshes (env KATOSPEC_MODES)")
        p.add_argument("--out", help="write delimited output to this path")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering next to --out")

    p = sub.add_parser("mesh-info", help="counts, volume, diameter, topology, curvature",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p, modes=False)
    p.set_defaults(fn=cmd_mesh_info)

    p = sub.add_parser("spectrum", help="eigenvalue table",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("kato", help="Kato constants, thresholds, series",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    common(p)
    p.add_argument("--potential", default="ricci-neg",
                   help="ricci-neg | shifted:<level> | constant:<value> | file:<path>")
    p.add_argument("--T", type=float, default=1.0, help="time horizon")
    p.add_argument("--threshold", type=float,
                   help="report the largest T with kappa_T <= this target instead")
    p.add_argument("--series", action="store_true",
                   help="emit a (T, kappa_T) table on a log grid up to --T")
    p.set_defaults(fn=cmd_kato)

    p = sub.add_parser("constants", help="Sobolev/diameter constant tables",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--n", default="3:6", help="dimension range a:b or comma list")
    p.add_argument("--delta", default="0.85:1.0:7",
                   help="delta grid a:b:count or comma list")
    p.add_argument("--out", help="write the table to this path")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering next to --out")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("verify", help="run the theorem suite",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--config", help="JSON suite config (default: built-in suite)")
    p.add_argument("--suite", choices=["default"], default="default",
                   help="named built-in suite when no --config is given")
    p.add_argument("--seed", type=int, default=None,
                   help="override the built-in suite seed (env KATOSPEC_SEED)")
    p.add_argument("--epsilon", type=float, default=None,
                   help="override the diameter check ellipticity in the built-in suite")
    p.add_argument("--delta", type=float, default=None,
                   help="override the Sobolev delta in the built-in suite")
    p.add_argument("--R", type=float, default=None, dest="scale_fraction",
                   help="override the geometric-Kato scale (fraction of the diameter)")
    p.add_argument("--p", type=float, default=None, dest="iso_p",
                   help="override the isoperimetric exponent for case ii")
    p.add_argument("--json", help="also write the structured report document here")
    p.add_argument("--out", help="write the flat status table to this path")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering next to --out")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (MeshError, verify.ConfigError, consts.DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
