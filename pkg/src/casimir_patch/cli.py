"""Command-line front end: ``shift``, ``map`` and ``verify``.

Exit codes: 0 success, 1 usage or configuration error, 2 domain error
(including divergences on conductors), 3 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

from .core import (
    AxisMap,
    BasisMismatchError,
    BowlGeometry,
    CartPoint,
    CasimirError,
    ConfigurationError,
    CylPoint,
    DipoleVariance,
    DiscGeometry,
    DivergenceError,
    DomainError,
    HalfPlaneGeometry,
    cart_to_cyl,
    energy_to_si,
)
from .fieldmap import (
    Axis,
    GridSpec,
    get_recipe,
    map_params,
    parse_quantity,
    sample_grid,
    write_csv,
    write_json,
)
from .shifts import FDScheme, xi_bowl, xi_disc, xi_halfplane_cart, xi_halfplane_cyl

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3
GEOMETRIES = ("halfplane", "disc", "bowl")
DIVERGENCE_MESSAGE = "divergence: point on conductor"


def _fmt(v: float) -> str:
    return f"{v + 0.0:.15g}"  # + 0.0 turns -0.0 into 0.0


def _triple(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ConfigurationError(f"expected three comma-separated numbers, got {text!r}")
    return tuple(float(p) for p in parts)


def _names(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


@dataclass
class RunConfig:
    """Everything a command needs; built from defaults, a config file and flags."""

    geometry: Optional[str] = None
    n: float = 1.0
    d: float = 1.0
    x: Optional[float] = None
    y: Optional[float] = None
    z: Optional[float] = None
    rho: Optional[float] = None
    phi: Optional[float] = None
    mu: Optional[tuple] = None
    recipe: Optional[str] = None
    quantity: Optional[str] = None
    axis1: Optional[Axis] = None
    axis2: Optional[Axis] = None
    slice: Optional[float] = None
    source: Optional[tuple] = None
    format: str = "csv"
    output: Optional[str] = None
    plot: Optional[str] = None
    workers: int = 1
    h_rel: float = FDScheme().h_rel
    richardson_levels: int = FDScheme().richardson_levels
    length_scale: Optional[float] = None
    seed: int = 0
    suite: tuple = ()
    explicit: frozenset = field(default=frozenset(), repr=False)

    _PARSERS = {
        "n": float, "d": float, "x": float, "y": float, "z": float, "rho": float,
        "phi": float, "mu": _triple, "source": _triple, "axis1": Axis.parse,
        "axis2": Axis.parse, "slice": float, "workers": int, "h_rel": float,
        "richardson_levels": int, "length_scale": float, "seed": int, "suite": _names,
    }

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.name != "explicit"]

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        """Build from string values; keys present in ``values`` count as explicit."""
        kwargs = {}
        for key, raw in values.items():
            if key not in cls.keys():
                raise ConfigurationError(f"unknown configuration key {key!r}")
            parse = cls._PARSERS.get(key, str)
            try:
                kwargs[key] = parse(raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key}: {raw!r} ({exc})") from None
        cfg = cls(**kwargs, explicit=frozenset(values))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.geometry is not None and self.geometry not in GEOMETRIES:
            raise ConfigurationError(f"geometry must be one of {', '.join(GEOMETRIES)}")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        if self.quantity is not None:
            parse_quantity(self.quantity)
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.length_scale is not None and not self.length_scale > 0:
            raise ConfigurationError("length_scale must be > 0")
        self.scheme()

    def scheme(self) -> FDScheme:
        try:
            return FDScheme(self.h_rel, self.richardson_levels)
        except DomainError as exc:
            raise ConfigurationError(str(exc)) from None

    def make_geometry(self):
        try:
            if self.geometry == "halfplane":
                return HalfPlaneGeometry(self.n)
            if self.geometry == "disc":
                return DiscGeometry(self.d, self.n)
            if self.geometry == "bowl":
                if "n" in self.explicit and self.n != 1.0:
                    raise ConfigurationError("the bowl has no substrate; n must be 1")
                return BowlGeometry(self.d)
        except DomainError as exc:
            raise ConfigurationError(str(exc)) from None
        raise ConfigurationError("no geometry given (use --geometry or a recipe)")

    def dump(self) -> str:
        lines = []
        for key in self.keys():
            v = getattr(self, key)
            if v is None or v == ():
                continue
            if isinstance(v, float):
                text = _fmt(v)
            elif isinstance(v, tuple):
                text = ",".join(_fmt(x) if isinstance(x, float) else str(x) for x in v)
            else:
                text = str(v)
            lines.append(f"{key}={text}")
        return "\n".join(lines) + "\n"


def read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _variances(cfg: RunConfig, basis_cyl: bool) -> Optional[DipoleVariance]:
    if cfg.mu is None:
        return None
    try:
        if basis_cyl:
            return DipoleVariance.cylindrical(*cfg.mu)
        return DipoleVariance.cartesian(*cfg.mu)
    except DomainError as exc:
        raise ConfigurationError(str(exc)) from None


def _has_cyl(cfg: RunConfig) -> bool:
    return cfg.rho is not None


def _need(cfg: RunConfig, *names: str) -> None:
    missing = [k for k in names if getattr(cfg, k) is None]
    if missing:
        raise ConfigurationError(f"missing {', '.join('--' + m for m in missing)}")


def cmd_shift(cfg: RunConfig, out=None) -> int:
    """Print the Xi block, prefactor and Delta E at one point."""
    out = out or sys.stdout
    geom = cfg.make_geometry()
    lines = [("geometry", cfg.geometry)]
    if cfg.geometry == "halfplane" and _has_cyl(cfg):
        _need(cfg, "rho", "phi")
        at = CylPoint(cfg.rho, cfg.phi, cfg.z or 0.0)
        brk = xi_halfplane_cyl(geom, at, _variances(cfg, True))
        labels = ("xi_rho", "xi_phi", "xi_z")
    elif cfg.geometry == "disc":
        if _has_cyl(cfg):
            _need(cfg, "z")
            at = CylPoint(cfg.rho, cfg.phi or 0.0, cfg.z)
        else:
            if cfg.x is None or cfg.y is None or cfg.z is None:
                raise ConfigurationError("disc points need --rho [--phi] --z or --x --y --z")
            at = cart_to_cyl(CartPoint(cfg.x, cfg.y, cfg.z), AxisMap.STANDARD)
        brk = xi_disc(geom, at, _variances(cfg, True))
        labels = ("xi_rho", "xi_phi", "xi_z")
    else:
        if _has_cyl(cfg):
            raise ConfigurationError(f"{cfg.geometry} points take --x --y --z")
        # x is irrelevant for the half-plane; the bowl takes omitted x, y as 0
        _need(cfg, *(("y", "z") if cfg.geometry == "halfplane" else ("z",)))
        at = CartPoint(cfg.x or 0.0, cfg.y or 0.0, cfg.z)
        fn = xi_halfplane_cart if cfg.geometry == "halfplane" else xi_bowl
        brk = fn(geom, at, _variances(cfg, False))
        labels = ("xi_x", "xi_y", "xi_z")
    for key in ("n", "d"):
        if key == "n" and cfg.geometry == "bowl":
            continue
        if key == "d" and cfg.geometry == "halfplane":
            continue
        lines.append((key, _fmt(getattr(cfg, key))))
    lines.append(("point", ",".join(_fmt(v) for v in dataclasses.astuple(at))))
    lines.append(("basis", brk.basis.value))
    lines += [(lab, _fmt(v)) for lab, v in zip(labels, brk.xi)]
    lines.append(("prefactor", _fmt(brk.prefactor)))
    lines.append(("sign", f"{brk.sign:+d}"))
    if brk.delta_e is not None:
        lines.append(("delta_e", _fmt(brk.delta_e)))
        if cfg.length_scale is not None:
            lines.append(("delta_e_joule", _fmt(energy_to_si(brk.delta_e, cfg.length_scale))))
    out.write("".join(f"{k}={v}\n" for k, v in lines))
    return EXIT_OK


def _map_inputs(cfg: RunConfig):
    """Geometry, grid, variances and source from a recipe and/or explicit keys."""
    recipe = get_recipe(cfg.recipe) if cfg.recipe else None
    if recipe is None:
        geom = cfg.make_geometry()
        _need(cfg, "quantity", "axis1", "axis2")
        spec = GridSpec(cfg.axis1, cfg.axis2, cfg.slice or 0.0, parse_quantity(cfg.quantity))
        mu = _variances(cfg, isinstance(geom, DiscGeometry))
        return geom, spec, mu, cfg.source, None
    ex = cfg.explicit
    if ex & {"geometry", "n", "d"}:
        base = dataclasses.replace(
            cfg, geometry=cfg.geometry or _geometry_name(recipe.geometry),
            n=cfg.n if "n" in ex else getattr(recipe.geometry, "n", 1.0),
            d=cfg.d if "d" in ex else getattr(recipe.geometry, "d", 1.0))
        geom = base.make_geometry()
    else:
        geom = recipe.geometry
    spec = GridSpec(cfg.axis1 or recipe.spec.axis1, cfg.axis2 or recipe.spec.axis2,
                    recipe.spec.slice if cfg.slice is None else cfg.slice,
                    parse_quantity(cfg.quantity) if cfg.quantity else recipe.spec.quantity)
    mu = _variances(cfg, isinstance(geom, DiscGeometry)) if cfg.mu is not None else recipe.mu
    source = cfg.source if cfg.source is not None else recipe.source
    return geom, spec, mu, source, recipe.name


def _geometry_name(geom) -> str:
    if isinstance(geom, HalfPlaneGeometry):
        return "halfplane"
    return "disc" if isinstance(geom, DiscGeometry) else "bowl"


def effective_config(cfg: RunConfig, command: str) -> RunConfig:
    """``cfg`` with recipe values filled in, as used by ``map``."""
    if command != "map" or not cfg.recipe:
        return cfg
    geom, spec, mu, source, _ = _map_inputs(cfg)
    return dataclasses.replace(
        cfg, geometry=_geometry_name(geom), n=getattr(geom, "n", 1.0), d=getattr(geom, "d", 1.0),
        quantity=spec.quantity.value, axis1=spec.axis1, axis2=spec.axis2, slice=spec.slice,
        mu=None if mu is None else mu.components, source=source)


def cmd_map(cfg: RunConfig, out=None) -> int:
    """Sample a grid and write it as CSV or JSON (optionally also a PNG)."""
    out = out or sys.stdout
    geom, spec, mu, source, recipe = _map_inputs(cfg)
    records = sample_grid(geom, spec, mu, source, cfg.scheme(), workers=cfg.workers)
    extra = {"recipe": recipe} if recipe else {}
    if spec.quantity.value == "force":
        extra.update(h_rel=cfg.h_rel, richardson_levels=cfg.richardson_levels)
    params = map_params(geom, spec, mu, source, extra)
    writer = write_json if cfg.format == "json" else write_csv
    if cfg.output and cfg.output != "-":
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            writer(records, params, fh)
    else:
        writer(records, params, out)
    if cfg.plot:
        from .plotting import render_map
        title = recipe or f"{params['geometry']} {spec.quantity.value}"
        render_map(records, spec, geom, cfg.plot, title=title)
    return EXIT_OK


def _paint(text: str, ok: bool, color: bool) -> str:
    if not color:
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def cmd_verify(cfg: RunConfig, out=None) -> int:
    """Run the self-check suites and print one line per check."""
    out = out or sys.stdout
    from .verify import SUITES, run_suites

    names = cfg.suite or ("boundary", "continuity", "harmonicity", "kelvin", "series",
                          "oracle", "limits", "identities")
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ConfigurationError(f"unknown suite(s) {', '.join(unknown)}; known: {', '.join(SUITES)}")
    color = out.isatty() and "NO_COLOR" not in os.environ
    reports = run_suites(names, seed=cfg.seed)
    for rep in reports:
        for res in rep.results:
            line = res.line()
            status, rest = line.split(" ", 1)
            out.write(f"{_paint(status, res.passed, color)} {rest}\n")
    out.write("\nsuite        result  seconds\n")
    for rep in reports:
        out.write(f"{rep.name:<12} {_paint('PASS' if rep.passed else 'FAIL', rep.passed, color):<6}"
                  f"  {rep.seconds:7.2f}\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


COMMANDS = {"shift": cmd_shift, "map": cmd_map, "verify": cmd_verify}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with the usage code 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add(p, *flags, **kw):
    p.add_argument(*flags, default=argparse.SUPPRESS, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="casimir-patch",
                     description="Casimir-Polder shifts near conducting patches on a substrate.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        _add(p, "--config", metavar="FILE", help="key=value file; flags override its values")
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective configuration and exit")

    def geometry(p):
        _add(p, "--geometry", choices=GEOMETRIES)
        _add(p, "--n", metavar="N", help="substrate refractive index (default 1)")
        _add(p, "--d", metavar="D", help="disc or sphere diameter (default 1)")
        _add(p, "--mu", metavar="M1,M2,M3",
             help="dipole variances; cylindrical (rho,phi,z) for the disc, Cartesian otherwise")
        _add(p, "--h-rel", dest="h_rel", metavar="H", help="finite-difference step / distance")
        _add(p, "--richardson-levels", dest="richardson_levels", metavar="K")

    p = sub.add_parser("shift", help="Xi block and energy shift at one point")
    common(p)
    geometry(p)
    for name in ("x", "y", "z", "rho", "phi"):
        _add(p, f"--{name}", metavar=name.upper())
    _add(p, "--length-scale", dest="length_scale", metavar="METRES",
         help="also print Delta E in joules for lengths in this unit (mu in C^2 m^2)")

    p = sub.add_parser("map", help="sample a quantity on a 2-D grid")
    common(p)
    geometry(p)
    _add(p, "--recipe", help="figure recipe: fig2, fig4, fig5, fig6, fig8")
    _add(p, "--quantity", help="potential, shift_iso, shift_components or force")
    _add(p, "--axis1", metavar="NAME:MIN:MAX:COUNT")
    _add(p, "--axis2", metavar="NAME:MIN:MAX:COUNT")
    _add(p, "--slice", metavar="VALUE", help="value of the third coordinate")
    _add(p, "--source", metavar="X,Y,Z", help="unit charge position for potential maps")
    _add(p, "--format", choices=("csv", "json"))
    _add(p, "--output", "-o", metavar="PATH")
    _add(p, "--plot", metavar="PNG", help="also render the map to this image file")
    _add(p, "--workers", metavar="K", help="worker processes for grid rows")

    p = sub.add_parser("verify", help="run the self-check suites")
    common(p)
    _add(p, "--suite", action="append", metavar="NAME", help="repeatable or comma separated")
    _add(p, "--seed", metavar="S")
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults < config file < flags."""
    values = read_config_file(ns.config) if getattr(ns, "config", None) else {}
    for key, v in vars(ns).items():
        if key in ("command", "config", "dump_config"):
            continue
        values[key] = ",".join(v) if key == "suite" else v
    return RunConfig.from_mapping(values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        if ns.dump_config:
            sys.stdout.write(f"command={ns.command}\n" + effective_config(cfg, ns.command).dump())
            return EXIT_OK
        return COMMANDS[ns.command](cfg)
    except (ConfigurationError, BasisMismatchError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DivergenceError as exc:
        sys.stderr.write(f"{DIVERGENCE_MESSAGE}\n")
        if str(exc) != DIVERGENCE_MESSAGE:
            sys.stderr.write(f"detail: {exc}\n")
        return EXIT_DOMAIN
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except CasimirError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
