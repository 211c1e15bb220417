"""INI run configurations with sections [physics], [grid], [scheme], [case] and [output]."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .solver import SolverConfig
from .spectral_core import GridSpec, PhysicalParams
from .testcases import CASE_IDS, CaseDefinition, canonical_case, gaussian_1d_ic

RUN_CASES = CASE_IDS + ("gaussian_1d",)

# section -> (required keys, optional keys)
_SCHEMA = {
    "physics": ((), ("f", "g", "H0", "epsilon")),
    "grid": (("nx", "ny", "lx", "ly"), ()),
    "scheme": (("name", "dt", "t_end"), ("mu", "dealias", "sample_interval", "tol", "max_iter", "nonlinear")),
    "case": (("id",), ()),
    "output": ((), ("dir",)),
}


class ConfigError(ValueError):
    """A run configuration that cannot be used."""


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    grid: GridSpec
    solver: SolverConfig
    case_id: str
    out_dir: str = "."

    @classmethod
    def from_case(cls, case: CaseDefinition, scheme="RK4", dt: Optional[float] = None, out_dir: str = ".") -> "RunConfig":
        return cls(case.params, case.grid, case.solver_config(scheme, dt), case.case_id, out_dir)

    def case(self) -> CaseDefinition:
        """The case definition with this config's parameters and grid substituted."""
        if self.case_id == "gaussian_1d":
            return CaseDefinition("gaussian_1d", self.params, self.grid, self.solver.t_end,
                                  self.solver.sample_interval or self.solver.dt, self.solver.mu, self.solver.dealias)
        return replace(canonical_case(self.case_id), params=self.params, grid=self.grid)

    def initial_fields(self) -> np.ndarray:
        if self.case_id == "gaussian_1d":
            return gaussian_1d_ic(self.grid)
        return self.case().initial_fields()

    def to_ini(self) -> str:
        s = self.solver
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp["physics"] = {"f": repr(self.params.f), "g": repr(self.params.g), "H0": repr(self.params.H0)}
        cp["grid"] = {"nx": str(self.grid.nx), "ny": str(self.grid.ny),
                      "lx": repr(self.grid.lx), "ly": repr(self.grid.ly)}
        sch = {"name": s.scheme.name, "dt": repr(s.dt), "t_end": repr(s.t_end), "mu": repr(s.mu),
               "dealias": str(s.dealias).lower(), "tol": repr(s.tol), "max_iter": str(s.max_iter),
               "nonlinear": str(s.nonlinear).lower()}
        if s.sample_interval is not None:
            sch["sample_interval"] = repr(s.sample_interval)
        cp["scheme"] = sch
        cp["case"] = {"id": self.case_id}
        cp["output"] = {"dir": self.out_dir}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _number(section, key, raw, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}") from None


def _bool(section, key, raw):
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")


def parse_run_config(text: str) -> RunConfig:
    """Parse INI text; unknown sections or keys and missing required keys raise :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        req, opt = _SCHEMA[sec]
        for key in cp[sec]:
            if key not in req and key not in opt:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
    for sec, (req, _) in _SCHEMA.items():
        for key in req:
            if not cp.has_section(sec) or key not in cp[sec]:
                raise ConfigError(f"missing required key {key!r} in [{sec}]")

    ph = cp["physics"] if cp.has_section("physics") else {}
    try:
        if "epsilon" in ph:
            if any(k in ph for k in ("f", "g", "H0")):
                raise ConfigError("[physics] give either epsilon or f, g, H0, not both")
            params = PhysicalParams.nondimensional(_number("physics", "epsilon", ph["epsilon"]))
        else:
            for key in ("f", "g", "H0"):
                if key not in ph:
                    raise ConfigError(f"missing required key {key!r} in [physics]")
            params = PhysicalParams(*(_number("physics", k, ph[k]) for k in ("f", "g", "H0")))
        gr = cp["grid"]
        grid = GridSpec(_number("grid", "nx", gr["nx"], int), _number("grid", "ny", gr["ny"], int),
                        _number("grid", "lx", gr["lx"]), _number("grid", "ly", gr["ly"]))
        sc = cp["scheme"]
        kw = {"scheme": sc["name"].strip(), "dt": _number("scheme", "dt", sc["dt"]),
              "t_end": _number("scheme", "t_end", sc["t_end"])}
        for key in ("mu", "sample_interval", "tol"):
            if key in sc:
                kw[key] = _number("scheme", key, sc[key])
        if "max_iter" in sc:
            kw["max_iter"] = _number("scheme", "max_iter", sc["max_iter"], int)
        for key in ("dealias", "nonlinear"):
            if key in sc:
                kw[key] = _bool("scheme", key, sc[key])
        solver = SolverConfig(**kw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    case_id = cp["case"]["id"].strip()
    if case_id not in RUN_CASES:
        raise ConfigError(f"[case] unknown id {case_id!r}; expected one of {RUN_CASES}")
    out_dir = cp["output"].get("dir", ".") if cp.has_section("output") else "."
    return RunConfig(params, grid, solver, case_id, out_dir)


def load_run_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_run_config(text)
