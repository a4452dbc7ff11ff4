"""Command-line front end.

Subcommands: ``basis``, ``forward``, ``reconstruct``, ``montecarlo``,
``psf`` and ``sweep``. Settings come from built-in defaults, then an
optional flat JSON file (``--config``, kebab-case keys), then flags. Every
run writes ``manifest.json`` with the resolved settings to the output
directory.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 missing basis cache (run ``basis`` first).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from . import export
from .basisfile import BasisFileError, basis_checksum, load_basis, save_basis
from .fieldmodel import (
    FieldProfile,
    closeness_window,
    count_local_maxima,
    default_object_grid,
    default_spectrum_grid,
    direct_spectrum,
    forward_image,
    make_double_gaussian,
    make_rect_source,
    project_coeffs,
    reconstruct_object,
    reconstruct_spectrum,
    relative_rms,
)
from .metrics import PROBE_WIDTH, imaging_psf, reconstruction_psf, superres_factor, sweep_S_vs_N
from .prolate import build_basis
from .stochastic import NoiseModel, run_ensemble

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_MISSING = 4

CACHE_ENV = "PROLATOSCOPE_CACHE"
FORMATS = ("csv", "json", "svg")
DEFAULT_SWEEP = [10.0**e for e in range(3, 16)]
CLOSENESS_WINDOW = 8.0


class ConfigError(ValueError):
    pass


class MissingArtifact(RuntimeError):
    pass


@dataclass
class RunConfig:
    c: float = 1.0
    modes: int = 18
    precision_bits: int = 256
    object: str = "double-gaussian"
    s0: float = 0.5
    sigma: float = 0.1
    eps: float = PROBE_WIDTH
    photons: float = 1e12
    L: list = field(default_factory=lambda: [7])
    model: str = "coherent"
    r: float = None
    trials: int = 5
    seed: int = 0
    out_dir: str = "."
    formats: list = field(default_factory=lambda: ["csv", "json"])
    sweep_photons: list = field(default_factory=lambda: list(DEFAULT_SWEEP))

    def validate(self, command=None):
        if not self.c > 0:
            raise ConfigError("--c must be positive")
        if self.modes < 1:
            raise ConfigError("--modes must be at least 1")
        if self.precision_bits < 128:
            raise ConfigError("--precision-bits must be at least 128")
        if self.object not in ("double-gaussian", "rect"):
            raise ConfigError("--object must be double-gaussian or rect")
        if not 0 <= self.s0 < 1 or not self.sigma > 0:
            raise ConfigError("need 0 <= s0 < 1 and sigma > 0")
        if not 0 < self.eps <= 2:
            raise ConfigError("--eps must satisfy 0 < eps <= 2")
        if not self.photons > 0:
            raise ConfigError("--photons must be positive")
        if not self.L or any(L < 1 for L in self.L):
            raise ConfigError("--L values must be positive")
        # the basis command ignores --L, so a small --modes is fine there
        if command != "basis" and any(L > self.modes for L in self.L):
            raise ConfigError(f"--L may not exceed --modes ({self.modes})")
        if self.model not in ("coherent", "squeezed"):
            raise ConfigError("--model must be coherent or squeezed")
        if self.r is None:
            self.r = math.log(10) if self.model == "squeezed" else 0.0
        if self.r < 0 or (self.model == "coherent" and self.r != 0):
            raise ConfigError("--r must be >= 0, and 0 for coherent light")
        if self.trials < 1:
            raise ConfigError("--trials must be at least 1")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown formats: {sorted(bad)}")
        if not self.sweep_photons or any(n <= 0 for n in self.sweep_photons):
            raise ConfigError("--sweep-photons must be positive")
        return self

    def noise_model(self):
        return NoiseModel(self.model, self.r)

    def squeezed_r(self):
        return self.r if self.model == "squeezed" and self.r > 0 else math.log(10)


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _str_list(text):
    return [v.strip() for v in str(text).split(",") if v.strip()]


_PARSERS = {
    "c": float,
    "modes": int,
    "precision_bits": int,
    "object": str,
    "s0": float,
    "sigma": float,
    "eps": float,
    "photons": float,
    "L": _int_list,
    "model": str,
    "r": float,
    "trials": int,
    "seed": int,
    "out_dir": str,
    "formats": _str_list,
    "sweep_photons": _float_list,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="prolatoscope", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("basis", "compute or reuse the prolate basis cache and print eigenvalues"),
        ("forward", "object, pupil spectrum and diffraction-limited image"),
        ("reconstruct", "noise-free reconstruction for each --L"),
        ("montecarlo", "ensemble of noisy reconstructions"),
        ("psf", "imaging and reconstruction point-spread functions"),
        ("sweep", "super-resolution factor versus photon number"),
    ):
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="flat JSON file with kebab-case keys")
        for key, conv in _PARSERS.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, type=str if conv in (_int_list, _float_list, _str_list) else conv)
        if name == "basis":
            p.add_argument("--force", action="store_true", help="recompute even on a cache hit")
    return parser


def resolve_config(args, command=None):
    values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            raw = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat JSON object")
        for key, val in raw.items():
            name = key.replace("-", "_")
            if name not in _PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            values[name] = val
    for name in _PARSERS:
        if hasattr(args, name):
            values[name] = getattr(args, name)
    cfg = RunConfig()
    try:
        for name, val in values.items():
            conv = _PARSERS[name]
            if isinstance(val, list):
                val = ",".join(str(v) for v in val)
            setattr(cfg, name, conv(val))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value: {exc}") from None
    return cfg.validate(command)


def cache_dir():
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "prolatoscope")


def basis_path(cfg):
    return cache_dir() / f"basis_c{cfg.c!r}_K{cfg.modes}_p{cfg.precision_bits}.txt"


def require_basis(cfg):
    path = basis_path(cfg)
    if not path.exists():
        raise MissingArtifact(f"no basis cache at {path}; run `prolatoscope basis` with the same --c/--modes/--precision-bits")
    return load_basis(path)


def make_object(cfg):
    if cfg.object == "rect":
        return make_rect_source(cfg.photons, cfg.eps)
    return make_double_gaussian(cfg.photons, cfg.s0, cfg.sigma)


def _out(cfg, name):
    return Path(cfg.out_dir) / name


def cmd_basis(cfg, force=False):
    path = basis_path(cfg)
    basis = None
    if path.exists() and not force:
        try:
            basis = load_basis(path)
            print(f"cache hit: {path}")
        except BasisFileError as exc:
            print(f"cache file unusable ({exc}); recomputing", file=sys.stderr)
    if basis is None:
        basis = build_basis(cfg.c, cfg.modes, cfg.precision_bits)
        save_basis(basis, path)
        print(f"wrote {path}")
    print("index,lambda")
    for mode in basis.modes:
        print(f"{mode.index},{mpmath.nstr(mode.lam, 17, min_fixed=1, max_fixed=0)}")
    return basis


def cmd_forward(cfg):
    basis = require_basis(cfg)
    obj = make_object(cfg)
    s = default_object_grid()
    xi = default_spectrum_grid()
    a = FieldProfile(s, obj(s), "object", basis.c, 0)
    f = direct_spectrum(obj, basis.c, xi)
    e = forward_image(obj, basis, s)
    export.write_profile_csv(_out(cfg, "object.csv"), a)
    export.write_profile_csv(_out(cfg, "spectrum.csv"), f)
    export.write_profile_csv(_out(cfg, "image.csv"), e)
    if "json" in cfg.formats:
        export.write_json(
            _out(cfg, "forward.json"),
            {"passband": [-1.0, 1.0], "image_maxima": count_local_maxima(e.values), "photons": cfg.photons, "c": basis.c},
        )
    if "svg" in cfg.formats:
        export.write_svg(_out(cfg, "object.svg"), [(s, a.values, "a(s)")], "object")
        export.write_svg(_out(cfg, "spectrum.svg"), [(xi, f.values.real, "Re f")], "spectrum")
        export.write_svg(_out(cfg, "image.svg"), [(s, e.values, "e(s)")], "image")


def cmd_reconstruct(cfg):
    basis = require_basis(cfg)
    obj = make_object(cfg)
    coeffs = project_coeffs(obj, basis)
    s = default_object_grid()
    xi = default_spectrum_grid()
    exact = direct_spectrum(obj, basis.c, xi)
    columns = [("xi", xi), ("exact_re", exact.values.real), ("exact_im", exact.values.imag)]
    summary = {"threshold": 0.05, "window": CLOSENESS_WINDOW, "L": {}}
    for L in cfg.L:
        rec = reconstruct_object(coeffs, basis, L, s)
        spec = reconstruct_spectrum(coeffs, basis, L, xi)
        export.write_profile_csv(_out(cfg, f"reconstruction_L{L}.csv"), rec)
        export.write_profile_csv(_out(cfg, f"spectrum_L{L}.csv"), spec)
        columns.append((f"deviation_L{L}", np.abs(spec.values - exact.values)))
        summary["L"][str(L)] = {
            "relative_rms": relative_rms(spec, exact, CLOSENESS_WINDOW),
            "closeness_window": closeness_window(spec, exact),
            "object_maxima": count_local_maxima(rec.values[np.abs(s) <= 1]),
        }
    export.write_table_csv(_out(cfg, "deviation.csv"), columns, [f"c={basis.c!r}", "passband |xi|<=1"])
    if "json" in cfg.formats:
        export.write_json(_out(cfg, "reconstruct.json"), summary)
    if "svg" in cfg.formats:
        series = [(xi, exact.values.real, "exact")]
        series += [(xi, reconstruct_spectrum(coeffs, basis, L, xi).values.real, f"L={L}") for L in cfg.L]
        export.write_svg(_out(cfg, "spectra.svg"), series, "reconstructed spectra")


def cmd_montecarlo(cfg):
    basis = require_basis(cfg)
    obj = make_object(cfg)
    L = cfg.L[0]
    ens = run_ensemble(obj, basis, L, cfg.noise_model(), cfg.trials, cfg.seed)
    xi = default_spectrum_grid()
    spectra = ens.spectra(basis, xi)
    noise_free = ens.noise_free_spectrum(basis, xi)
    exact = direct_spectrum(obj, basis.c, xi)
    columns = [("xi", xi)]
    columns += [(f"realization_{t + 1}", spectra[t].real) for t in range(ens.trials)]
    columns += [
        ("mean", spectra.mean(axis=0).real),
        ("noise_free", noise_free.real),
        ("exact", exact.values.real),
        ("deviation", ens.deviation(basis, xi)),
    ]
    comments = [f"model={cfg.model},r={cfg.r!r},photons={cfg.photons!r},L={L},seed={cfg.seed}", "amplitude-quadrature readout"]
    export.write_table_csv(_out(cfg, "montecarlo_spectra.csv"), columns, comments)
    export.write_table_csv(
        _out(cfg, "montecarlo_coeffs.csv"),
        [
            ("trial", np.repeat(np.arange(ens.trials), L).astype(str)),
            ("k", np.tile(np.arange(L), ens.trials).astype(str)),
            ("re", ens.coeffs.real.ravel()),
            ("im", ens.coeffs.imag.ravel()),
        ],
    )
    if "json" in cfg.formats:
        export.write_json(_out(cfg, "montecarlo.json"), export.ensemble_summary(ens))
    if "svg" in cfg.formats:
        series = [(xi, exact.values.real, "exact"), (xi, noise_free.real, "noise-free")]
        series += [(xi, spectra[t].real, f"trial {t + 1}") for t in range(min(ens.trials, 5))]
        export.write_svg(_out(cfg, "montecarlo.svg"), series, "noisy reconstructions")


def cmd_psf(cfg):
    basis = require_basis(cfg)
    L = cfg.L[0]
    h = imaging_psf(basis.c)
    hr = reconstruction_psf(basis, L, h.grid)
    S, W, W_L = superres_factor(basis, L)
    export.write_table_csv(
        _out(cfg, "psf.csv"), [("s", h.grid), ("imaging", h.values), ("reconstruction", hr.values)], [f"c={basis.c!r},L={L}"]
    )
    export.write_json(_out(cfg, "psf.json"), {"W": W, "W_L": W_L, "S": S, "c": basis.c, "L": L})
    if "svg" in cfg.formats:
        export.write_svg(_out(cfg, "psf.svg"), [(h.grid, h.values, "imaging"), (h.grid, hr.values, f"L={L}")], "PSF")


def cmd_sweep(cfg):
    basis = require_basis(cfg)
    models = [NoiseModel.coherent(), NoiseModel.squeezed(cfg.squeezed_r())]
    points = sweep_S_vs_N(cfg.sweep_photons, models, basis, cfg.eps)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    _out(cfg, "sweep.csv").write_bytes(export.sweep_csv(points).encode("ascii"))
    provenance = {"c": basis.c, "basis_checksum": basis_checksum(basis), "eps": cfg.eps, "modes": basis.num_modes}
    if "json" in cfg.formats:
        export.write_json(_out(cfg, "sweep.json"), export.sweep_json(points, provenance))
    if "svg" in cfg.formats:
        series = []
        for m in models:
            pts = [p for p in points if p.model == m]
            series.append(([math.log10(p.photons) for p in pts], [p.S for p in pts], m.kind))
        export.write_svg(_out(cfg, "sweep.svg"), series, "S vs log10 N")


COMMANDS = {
    "basis": cmd_basis,
    "forward": cmd_forward,
    "reconstruct": cmd_reconstruct,
    "montecarlo": cmd_montecarlo,
    "psf": cmd_psf,
    "sweep": cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, args.command)
        config_record = asdict(cfg)
        if args.command == "basis":
            cmd_basis(cfg, force=getattr(args, "force", False))
        else:
            COMMANDS[args.command](cfg)
        export.write_manifest(cfg.out_dir, args.command, config_record)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MissingArtifact, BasisFileError) as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
