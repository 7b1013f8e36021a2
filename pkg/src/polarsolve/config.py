"""Flat key = value experiment configs.

The format is line-oriented text: one ``key = value`` pair per line,
``#`` starts a comment, blank lines are ignored. Sweep axes use the
``sweep.<param> = v1, v2, ...`` form. The same grammar is used for
``--override key=value`` flags, which are applied after the file.

Validation failures raise ConfigError carrying the offending field and,
when it came from a file, the line number; the CLI turns these into exit
code 2 with a one-line diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

EXPERIMENTS = (
    "solve-single2p",
    "solve-single",
    "solve-stackelberg",
    "solve-mpe",
    "sweep",
    "oracle-check",
)
SOLVER_EXPERIMENTS = ("solve-single2p", "solve-single", "solve-stackelberg", "solve-mpe")
SWEEP_PARAMS = ("k", "pi", "beta", "H", "grid_n", "horizon")
ORACLE_CHECKS = ("period2", "period1", "stackelberg")

DEFAULT_GRID_N = 1001
DEFAULT_GRID_N_MPE = 501


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str, line: int | None = None):
        self.field = field_name
        self.line = line
        where = f"line {line}, " if line is not None else ""
        super().__init__(f"{where}field {field_name!r}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = ""
    pi: float = 0.5
    beta: float = 0.9
    H: float = 1.0
    cost: str = "quadratic"
    k: float = 10.0
    grid_n: int | None = None
    horizon: int = 600
    tol: float = 1e-10
    max_iter: int = 10000
    solver: str = ""
    sweep_axes: tuple[tuple[str, tuple[float, ...]], ...] = ()
    sweep_cap: int = 256
    scan_n: int = 201
    oracle_n: int = 2001
    checks: tuple[str, ...] = ORACLE_CHECKS
    output_dir: str = "out"

    def resolved_grid_n(self, experiment: str | None = None) -> int:
        if self.grid_n is not None:
            return self.grid_n
        exp = experiment or self.experiment
        return DEFAULT_GRID_N_MPE if exp == "solve-mpe" else DEFAULT_GRID_N


def _parse_float(name, raw, line):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(name, f"expected a number, got {raw!r}", line) from None


def _parse_int(name, raw, line):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(name, f"expected an integer, got {raw!r}", line) from None
    return value


def _parse_list(name, raw, line, caster):
    items = [tok.strip() for tok in raw.split(",") if tok.strip()]
    if not items:
        raise ConfigError(name, "expected a non-empty comma-separated list", line)
    return tuple(caster(name, tok, line) for tok in items)


def apply_assignment(config: ExperimentConfig, key: str, raw: str, line: int | None = None) -> ExperimentConfig:
    """Apply one key = value pair, returning an updated config."""
    raw = raw.strip()
    if key.startswith("sweep."):
        param = key[len("sweep.") :]
        if param not in SWEEP_PARAMS:
            raise ConfigError(key, f"sweep axis must be one of {SWEEP_PARAMS}", line)
        caster = _parse_int if param in ("grid_n", "horizon") else _parse_float
        values = _parse_list(key, raw, line, caster)
        axes = tuple(a for a in config.sweep_axes if a[0] != param) + ((param, values),)
        return replace(config, sweep_axes=axes)
    if key == "experiment":
        if raw not in EXPERIMENTS:
            raise ConfigError(key, f"must be one of {EXPERIMENTS}, got {raw!r}", line)
        return replace(config, experiment=raw)
    if key == "solver":
        if raw not in SOLVER_EXPERIMENTS:
            raise ConfigError(key, f"must be one of {SOLVER_EXPERIMENTS}, got {raw!r}", line)
        return replace(config, solver=raw)
    if key == "cost":
        if raw != "quadratic":
            raise ConfigError(key, f"config files support the quadratic cost kind, got {raw!r}", line)
        return replace(config, cost=raw)
    if key == "checks":
        items = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
        for item in items:
            if item not in ORACLE_CHECKS:
                raise ConfigError(key, f"checks must be among {ORACLE_CHECKS}, got {item!r}", line)
        return replace(config, checks=items)
    if key == "output_dir":
        if not raw:
            raise ConfigError(key, "must be a non-empty path", line)
        return replace(config, output_dir=raw)
    if key in ("pi", "beta", "H", "k", "tol"):
        return replace(config, **{key: _parse_float(key, raw, line)})
    if key in ("grid_n", "horizon", "max_iter", "sweep_cap", "scan_n", "oracle_n"):
        return replace(config, **{key: _parse_int(key, raw, line)})
    raise ConfigError(key, "unknown configuration key", line)


def parse_config(text: str) -> ExperimentConfig:
    config = ExperimentConfig()
    seen: dict[str, int] = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        body = rawline.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(body, "expected 'key = value'", lineno)
        key, raw = body.split("=", 1)
        key = key.strip()
        if key in seen:
            raise ConfigError(key, f"duplicate key (first set on line {seen[key]})", lineno)
        seen[key] = lineno
        config = apply_assignment(config, key, raw, lineno)
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())


def apply_overrides(config: ExperimentConfig, overrides) -> ExperimentConfig:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, raw = item.split("=", 1)
        config = apply_assignment(config, key.strip(), raw)
    return config


def validate(config: ExperimentConfig) -> ExperimentConfig:
    """Range-check every field against its target type's invariants."""
    if config.experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {EXPERIMENTS}, got {config.experiment!r}")
    if not 0.0 < config.pi < 1.0:
        raise ConfigError("pi", f"must lie in (0, 1), got {config.pi}")
    if not 0.0 < config.beta < 1.0:
        raise ConfigError("beta", f"must lie in (0, 1), got {config.beta}")
    if not config.H > 0.0:
        raise ConfigError("H", f"must be positive, got {config.H}")
    if config.k < 0.0:
        raise ConfigError("k", f"must be non-negative, got {config.k}")
    grid_n = config.resolved_grid_n()
    if grid_n < 3 or grid_n % 2 == 0:
        raise ConfigError("grid_n", f"must be odd and at least 3, got {grid_n}")
    if config.horizon < 2:
        raise ConfigError("horizon", f"must be at least 2, got {config.horizon}")
    if config.tol <= 0.0:
        raise ConfigError("tol", f"must be positive, got {config.tol}")
    if config.max_iter < 1:
        raise ConfigError("max_iter", f"must be at least 1, got {config.max_iter}")
    if config.sweep_cap < 1:
        raise ConfigError("sweep_cap", f"must be at least 1, got {config.sweep_cap}")
    if config.experiment == "sweep":
        if config.solver not in SOLVER_EXPERIMENTS:
            raise ConfigError("solver", "sweep configs must name a solver experiment")
        if not config.sweep_axes:
            raise ConfigError("sweep_axes", "sweep configs need at least one sweep.<param> axis")
        combos = 1
        for _, values in config.sweep_axes:
            combos *= len(values)
        if combos > config.sweep_cap:
            raise ConfigError(
                "sweep_axes", f"{combos} combinations exceed the cap of {config.sweep_cap}"
            )
    if config.experiment == "oracle-check":
        if config.scan_n < 2:
            raise ConfigError("scan_n", f"must be at least 2, got {config.scan_n}")
        if config.oracle_n < 3 or config.oracle_n % 2 == 0:
            raise ConfigError("oracle_n", f"must be odd and at least 3, got {config.oracle_n}")
        if (config.oracle_n - 1) % (config.scan_n - 1) != 0:
            raise ConfigError(
                "scan_n",
                "scan points must lie on the oracle grid: (oracle_n - 1) must be a multiple of (scan_n - 1)",
            )
        if not config.checks:
            raise ConfigError("checks", "must list at least one check")
    return config


def config_as_dict(config: ExperimentConfig) -> dict:
    """Stable, JSON-friendly echo of a resolved config."""
    return {
        "experiment": config.experiment,
        "pi": config.pi,
        "beta": config.beta,
        "H": config.H,
        "cost": config.cost,
        "k": config.k,
        "grid_n": config.resolved_grid_n(),
        "horizon": config.horizon,
        "tol": config.tol,
        "max_iter": config.max_iter,
        "solver": config.solver,
        "sweep_axes": [[name, list(values)] for name, values in config.sweep_axes],
        "sweep_cap": config.sweep_cap,
        "scan_n": config.scan_n,
        "oracle_n": config.oracle_n,
        "checks": list(config.checks),
        "output_dir": config.output_dir,
    }
