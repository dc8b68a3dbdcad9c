"""Problem configuration files.

A config is a small TOML document with scalar keys in the tables
``[geometry] [shift] [nonlinearity] [ladder] [solver] [checker]``::

    [geometry]
    n = 2
    r0 = 1.0
    r1 = 2.718281828459045

    [nonlinearity]
    f1 = "-0.1*u"
    f2 = "-0.1*v"

Unknown tables or keys are rejected with the offending line number.
"""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field, fields, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .expr import ExprError, parse
from .geometry import AnnulusGeometry, GeometryError
from .hypotheses import LadderError, RadiiLadder, SamplingBudget
from .kernel import KernelError
from .solver import SolveOptions
from .system import EXAMPLE_F1, EXAMPLE_F2, NonlinearSystem

__all__ = ["ConfigError", "ProblemConfig", "load_config", "parse_config", "EXAMPLE_CONFIG"]


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.key = key


@dataclass
class GeometrySection:
    n: int = 2
    r0: float = 1.0
    r1: float = math.e


@dataclass
class ShiftSection:
    omega1: float = 1.0
    omega2: float = 1.0


@dataclass
class NonlinearitySection:
    f1: str = "0"
    f2: str = "0"


@dataclass
class LadderSection:
    rho1: float | None = None
    rho2: float | None = None
    s1: float | None = None
    s2: float | None = None
    theta1: float | None = None
    theta2: float | None = None
    sigma1: float | None = None
    sigma2: float | None = None


@dataclass
class SolverSection:
    n: int = 257
    n_max: int = 2049
    tol: float = 1e-8
    max_iter: int = 50


@dataclass
class CheckerSection:
    base_per_axis: int = 9
    refine_rounds: int = 3
    z_bound: float | None = None
    h_density: int = 17


_SECTIONS = {
    "geometry": GeometrySection,
    "shift": ShiftSection,
    "nonlinearity": NonlinearitySection,
    "ladder": LadderSection,
    "solver": SolverSection,
    "checker": CheckerSection,
}
_INT_KEYS = {("geometry", "n"), ("solver", "n"), ("solver", "n_max"), ("solver", "max_iter"),
             ("checker", "base_per_axis"), ("checker", "refine_rounds"), ("checker", "h_density")}


@dataclass
class ProblemConfig:
    geometry: GeometrySection = field(default_factory=GeometrySection)
    shift: ShiftSection = field(default_factory=ShiftSection)
    nonlinearity: NonlinearitySection = field(default_factory=NonlinearitySection)
    ladder: LadderSection = field(default_factory=LadderSection)
    solver: SolverSection = field(default_factory=SolverSection)
    checker: CheckerSection = field(default_factory=CheckerSection)
    source: str = field(default="", repr=False, compare=False)

    # ---- builders

    def build_geometry(self) -> AnnulusGeometry:
        g = self.geometry
        return AnnulusGeometry(g.n, g.r0, g.r1)

    def build_system(self) -> NonlinearSystem:
        return NonlinearSystem(parse(self.nonlinearity.f1), parse(self.nonlinearity.f2),
                               self.shift.omega1, self.shift.omega2, self.build_geometry())

    def build_ladder(self) -> RadiiLadder | None:
        lad = self.ladder
        base = (lad.rho1, lad.rho2, lad.s1, lad.s2)
        upper = (lad.theta1, lad.theta2, lad.sigma1, lad.sigma2)
        if all(x is None for x in base + upper):
            return None
        if any(x is None for x in base):
            raise LadderError("ladder needs rho1, rho2, s1, s2")
        if all(x is None for x in upper):
            return RadiiLadder((lad.rho1, lad.rho2), (lad.s1, lad.s2))
        if any(x is None for x in upper):
            raise LadderError("four-level ladder needs theta1, theta2, sigma1, sigma2")
        return RadiiLadder((lad.rho1, lad.rho2), (lad.s1, lad.s2), (lad.theta1, lad.theta2),
                           (lad.sigma1, lad.sigma2))

    def z_bound(self) -> float:
        if self.checker.z_bound is not None:
            return self.checker.z_bound
        ladder = self.build_ladder()
        if ladder is None:
            return 10.0
        levels = [*ladder.rho, *ladder.s, *(ladder.theta or ()), *(ladder.sigma or ())]
        return 10.0 * max(levels)

    def build_budget(self) -> SamplingBudget:
        c = self.checker
        return SamplingBudget(c.base_per_axis, c.refine_rounds, self.z_bound(), c.h_density)

    def build_solve_options(self, threads: int | None = None) -> SolveOptions:
        s = self.solver
        return SolveOptions(n=s.n, n_max=s.n_max, tol=s.tol, max_iter=s.max_iter, threads=threads)

    def validate(self) -> None:
        """Build every object once so structural errors surface at load time."""
        for name, build in (("geometry", self.build_geometry), ("nonlinearity", self.build_system),
                            ("ladder", self.build_ladder), ("checker", self.build_budget),
                            ("solver", self.build_solve_options)):
            try:
                build()
            except ExprError as exc:
                raise ConfigError(f"bad expression: {exc}", _line_of(self.source, "nonlinearity", None)) from exc
            except (GeometryError, KernelError, LadderError, ValueError) as exc:
                raise ConfigError(str(exc), _line_of(self.source, name, None)) from exc

    # ---- serialization

    def to_toml(self) -> str:
        lines = []
        for name in _SECTIONS:
            section = getattr(self, name)
            items = [(f.name, getattr(section, f.name)) for f in fields(section)]
            items = [(k, v) for k, v in items if v is not None]
            if not items:
                continue
            lines.append(f"[{name}]")
            for key, value in items:
                lines.append(f"{key} = {_toml_scalar(value)}")
            lines.append("")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {name: {f.name: getattr(getattr(self, name), f.name) for f in fields(getattr(self, name))}
                for name in _SECTIONS}


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"unsupported value {value!r}")


def _line_of(text: str, table: str, key: str | None) -> int | None:
    """1-based line of ``key`` inside ``[table]`` (or of the table header)."""
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        m = re.fullmatch(r"\[\s*([A-Za-z0-9_.-]+)\s*\]", line)
        if m:
            current = m.group(1)
            if key is None and current == table:
                return no
            continue
        if key is not None and current == table and re.match(rf"{re.escape(key)}\s*=", line):
            return no
    return None


def parse_config(text: str) -> ProblemConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"TOML syntax error: {exc}", int(m.group(1)) if m else None) from exc
    cfg = ProblemConfig(source=text)
    for table, content in data.items():
        if table not in _SECTIONS:
            raise ConfigError(f"unknown table [{table}]", _line_of(text, table, None))
        if not isinstance(content, dict):
            raise ConfigError(f"{table} must be a table", None, table)
        cls = _SECTIONS[table]
        known = {f.name for f in fields(cls)}
        values = {}
        for key, value in content.items():
            line = _line_of(text, table, key)
            if key not in known:
                raise ConfigError(f"unknown key in [{table}]", line, key)
            if isinstance(value, (dict, list)) or isinstance(value, bool):
                raise ConfigError("only scalar values are allowed", line, key)
            if table == "nonlinearity":
                if not isinstance(value, str):
                    raise ConfigError("expressions must be quoted strings", line, key)
                try:
                    parse(value)
                except ExprError as exc:
                    raise ConfigError(f"bad expression: {exc}", line, key) from exc
            elif (table, key) in _INT_KEYS:
                if not isinstance(value, int):
                    raise ConfigError("expected an integer", line, key)
            elif not isinstance(value, (int, float)):
                raise ConfigError("expected a number", line, key)
            else:
                value = float(value)
            values[key] = value
        setattr(cfg, table, cls(**values))
    cfg.validate()
    return cfg


def load_config(path) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text)


EXAMPLE_CONFIG = ProblemConfig(
    geometry=GeometrySection(2, 1.0, math.e),
    shift=ShiftSection(1.0, 1.0),
    nonlinearity=NonlinearitySection(EXAMPLE_F1, EXAMPLE_F2),
    ladder=LadderSection(0.5, 0.5, 1.1, 2.0, 3.5, 6.5, 5.0, 8.0),
)


def example_config() -> ProblemConfig:
    cfg = replace(EXAMPLE_CONFIG)
    cfg.source = cfg.to_toml()
    return cfg
