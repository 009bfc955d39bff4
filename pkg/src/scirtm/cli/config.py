"""
Run configuration of the command line: defaults, then environment, then a
JSON file, then flags.
"""

import dataclasses
import logging
import math
import os
from typing import Any, Dict, List, Optional, Tuple

import scirtm.file
import scirtm.file.json

from ..local_analysis import ResonanceId
from ..manifolds.precision import MAX_BITS, MIN_BITS
from ..parallel import CACHE_DIR_ENV, WORKERS_ENV, resolve_workers
from ..stability_domain import RasterSpec

logger = logging.getLogger(__name__)

MAX_Q = 24


def parse_pair(text: str) -> Tuple[float, float]:
    """'a:b' -> (a, b)."""
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ValueError(f"expected 'a:b', got {text!r}")
    return float(parts[0]), float(parts[1])


def parse_range(text: str) -> List[float]:
    """'a:b:step' -> [a, a+step, ..., b], or a single value 'a'."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"expected 'a:b:step', got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    if not step > 0 or hi < lo:
        raise ValueError(f"range {text!r} needs step > 0 and a <= b")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(count)]


def parse_resonance(text: str) -> ResonanceId:
    """'m/n' or 'm,n' -> ResonanceId."""
    for sep in ("/", ","):
        if sep in str(text):
            m, n = str(text).split(sep)
            return ResonanceId(int(m), int(n))
    raise ValueError(f"expected a resonance 'm/n', got {text!r}")


@dataclasses.dataclass
class RunConfig:
    """
    Every setting a subcommand can read.

    Range-valued settings are kept as the strings given on the command line
    ('a:b' or 'a:b:step') so that a saved config reads back unchanged.
    """

    command: Optional[str] = None
    mu: Optional[float] = None
    mu_range: Optional[str] = None
    psi: float = 0.0
    w: float = 0.0
    steps: int = 1
    psi_range: Optional[str] = None
    w_range: Optional[str] = None
    cell_side: float = 1.0 / 1000
    budget_fast: int = 1000
    budget_deep: int = 100_000
    control_w: float = 1.0
    max_passes: int = 50
    local: bool = False
    P: int = 7
    Q: int = 15
    tol: float = 1e-10
    bits: int = 256
    order: int = 100
    domains: int = 10
    branch: str = "unstable"
    resonance: Optional[str] = None
    line: str = "fix_r0"
    kind: Optional[str] = None
    points: int = 101
    h_range: str = "0.30:0.60"
    h_points: int = 8
    scenario: str = "saddle_center"
    ham_order: int = 1
    levels: Optional[str] = None
    cross_check: bool = True
    recipe: Optional[str] = None
    list_recipes: bool = False
    out: Optional[str] = None
    workers: Optional[int] = None
    cache_dir: Optional[str] = None
    progress: bool = False

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def update(self, values: Dict[str, Any], source: str) -> "RunConfig":
        names = set(self.field_names())
        for key, value in values.items():
            if key not in names:
                raise ValueError(f"unknown setting {key!r} in {source}")
            if value is not None:
                setattr(self, key, value)
        return self

    @classmethod
    def from_env(cls) -> Dict[str, Any]:
        values: Dict[str, Any] = {}
        workers = os.environ.get(WORKERS_ENV)
        if workers:
            try:
                values["workers"] = int(workers)
            except ValueError:
                raise ValueError(f"{WORKERS_ENV} must be an integer, got {workers!r}")
        cache_dir = os.environ.get(CACHE_DIR_ENV)
        if cache_dir:
            values["cache_dir"] = cache_dir
        return values

    @classmethod
    def build(cls, flags: Dict[str, Any], config_path: Optional[str] = None) -> "RunConfig":
        """Merges defaults, environment, the JSON file and the explicit flags."""
        config = cls()
        config.update(cls.from_env(), "environment")
        if config_path is not None:
            if not scirtm.file.exists(config_path):
                raise ValueError(f"config file {config_path} does not exist")
            config.update(scirtm.file.json.read(config_path), config_path)
        config.update(flags, "flags")
        logger.debug(f"effective config: {config.to_dict()}")
        return config

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def save(self, path: str) -> None:
        scirtm.file.json.write(path, self.to_dict())

    def validate(self) -> "RunConfig":
        """
        Raises:
            ValueError: on the first setting outside its admissible range.
        """
        if self.mu is not None and not math.isfinite(float(self.mu)):
            raise ValueError(f"mu must be finite, got {self.mu}")
        if not 0 < self.P < self.Q <= MAX_Q:
            raise ValueError(f"need 0 < P < Q <= {MAX_Q}, got P={self.P}, Q={self.Q}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not MIN_BITS <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must lie in [{MIN_BITS}, {MAX_BITS}], got {self.bits}")
        if not self.cell_side > 0:
            raise ValueError(f"cell side must be positive, got {self.cell_side}")
        for name in ("budget_fast", "budget_deep", "max_passes", "order", "points", "h_points"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.domains < 0:
            raise ValueError(f"domains must be >= 0, got {self.domains}")
        if not self.control_w > 0:
            raise ValueError(f"control_w must be positive, got {self.control_w}")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        for name in ("psi_range", "w_range", "h_range"):
            value = getattr(self, name)
            if value is not None:
                lo, hi = parse_pair(value)
                if not lo < hi:
                    raise ValueError(f"{name} must be ordered, got {value!r}")
        if self.mu_range is not None:
            parse_range(self.mu_range)
        if self.resonance is not None:
            parse_resonance(self.resonance)
        if self.line not in ("fix_r0", "fix_r1"):
            raise ValueError(f"line must be fix_r0 or fix_r1, got {self.line!r}")
        if self.branch not in ("unstable", "stable"):
            raise ValueError(f"branch must be unstable or stable, got {self.branch!r}")
        if self.kind not in (None, "elliptic", "hyperbolic"):
            raise ValueError(f"kind must be elliptic or hyperbolic, got {self.kind!r}")
        return self

    def require_mu(self) -> float:
        if self.mu is None:
            raise ValueError(f"{self.command} needs --mu")
        return float(self.mu)

    def raster_spec(self) -> RasterSpec:
        defaults = RasterSpec()
        return RasterSpec(
            psi_range=parse_pair(self.psi_range) if self.psi_range else defaults.psi_range,
            w_range=parse_pair(self.w_range) if self.w_range else defaults.w_range,
            cell_side=self.cell_side,
            escape_budget_fast=self.budget_fast,
            escape_budget_deep=self.budget_deep,
            control_w=self.control_w,
            P=self.P,
            Q=self.Q,
            tol=self.tol,
            max_passes=self.max_passes,
        )

    def job_options(self) -> Dict[str, Any]:
        """Keyword options for :func:`scirtm.parallel.run_jobs`."""
        n_jobs = resolve_workers(self.workers)
        return {
            "n_jobs": n_jobs,
            "process": n_jobs > 1,
            "with_tqdm": self.progress,
            "cache_dir": self.cache_dir,
        }
