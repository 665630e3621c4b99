"""
Run settings: flat ``key = value`` files merged with CLI flags.

Precedence is CLI flag > file value > config.py default. Every report embeds
the resolved settings (RunConfig.as_dict()).
"""

import logging
from fractions import Fraction
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import (
    DEFAULT_ALPHA,
    DEFAULT_GAMMA,
    DEFAULT_MODEL_C,
    DEFAULT_N,
    DEFAULT_TIME_EXPONENT,
    DEFAULT_R_MAX,
    DEFAULT_R_MIN,
    DEFAULT_R_POINTS,
    DEFAULT_REGULARIZED,
    DEFAULT_SEED,
    OUTPUT_DIR,
    POTENTIAL_SAMPLES,
    QUAD_RADIAL_NODES,
    QUAD_REFINEMENT,
    QUAD_T_NODES,
    QUAD_Z_NODES,
    QUAD_Z_NODES_EVEN,
    RESIDUAL_SAMPLES,
)
from core.validation import (
    validate_alpha,
    validate_beta,
    validate_dimension,
    validate_gamma,
    validate_model_c,
    validate_node_count,
    validate_pair,
    validate_r_grid,
)

logger = logging.getLogger(__name__)

REPORT_FORMATS = ('csv', 'json', 'plot')


def _to_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _to_pair(text: str) -> Tuple[str, str]:
    parts = [part.strip() for part in text.split(',')]
    if len(parts) != 2:
        raise ValueError(f"pair must look like 'p,q', got {text!r}")
    return parts[0], parts[1]


def _to_formats(text: str) -> Tuple[str, ...]:
    formats = tuple(part.strip().lower() for part in text.split(',') if part.strip())
    unknown = [f for f in formats if f not in REPORT_FORMATS]
    if unknown:
        raise ValueError(f"unknown report format(s) {', '.join(unknown)}; use {', '.join(REPORT_FORMATS)}")
    return formats


def _to_optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ('', 'none', 'auto') else float(text)


# key -> converter; defaults live on RunConfig
SETTING_CONVERTERS = {
    'n': int,
    'alpha': float,
    'gamma': float,
    'beta': _to_optional_float,
    'model_c': int,
    'pair': _to_pair,
    'r_min': float,
    'r_max': float,
    'r_points': int,
    'geometric': _to_bool,
    'quad_radial': int,
    'quad_z': lambda text: None if text.strip().lower() in ('', 'auto') else int(text),
    'quad_t': int,
    'quad_refinement': int,
    'seed': int,
    'out': str,
    'formats': _to_formats,
    'regularized': _to_bool,
    'residual_samples': int,
    'potential_samples': int,
}


@dataclass(frozen=True)
class RunConfig:
    n: int = DEFAULT_N
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    beta: Optional[float] = None  # None: threshold * BETA_MARGIN
    model_c: int = DEFAULT_MODEL_C
    pair: Optional[Tuple[str, str]] = None  # None: (2, 2n/(n-2))
    r_min: float = DEFAULT_R_MIN
    r_max: float = DEFAULT_R_MAX
    r_points: int = DEFAULT_R_POINTS
    geometric: bool = True
    quad_radial: int = QUAD_RADIAL_NODES
    quad_z: Optional[int] = None  # None: parity default
    quad_t: int = QUAD_T_NODES
    quad_refinement: int = QUAD_REFINEMENT
    seed: int = DEFAULT_SEED
    out: str = OUTPUT_DIR
    formats: Tuple[str, ...] = field(default=REPORT_FORMATS)
    regularized: bool = DEFAULT_REGULARIZED
    residual_samples: int = RESIDUAL_SAMPLES
    potential_samples: int = POTENTIAL_SAMPLES

    def __post_init__(self):
        if self.pair is None and isinstance(self.n, int) and self.n >= 3:
            q = Fraction(2 * self.n, self.n - 2)
            object.__setattr__(self, 'pair', (DEFAULT_TIME_EXPONENT, str(q)))

    @property
    def parity(self) -> str:
        return 'odd' if self.n % 2 else 'even'

    @property
    def z_nodes(self) -> int:
        if self.quad_z is not None:
            return self.quad_z
        return QUAD_Z_NODES if self.parity == 'odd' else QUAD_Z_NODES_EVEN

    def r_grid(self) -> List[float]:
        if self.geometric:
            values = np.geomspace(self.r_min, self.r_max, self.r_points)
        else:
            values = np.linspace(self.r_min, self.r_max, self.r_points)
        return [float(v) for v in values]

    def as_dict(self) -> Dict:
        data = asdict(self)
        data['pair'] = ','.join(self.pair) if self.pair else None
        data['formats'] = list(self.formats)
        data['quad_z'] = self.z_nodes
        return data


def validate_run_config(cfg: RunConfig) -> Tuple[bool, str]:
    """First failing check, or (True, '')."""
    checks = [
        validate_dimension(cfg.n),
        validate_alpha(cfg.alpha),
        validate_gamma(cfg.gamma),
        validate_beta(cfg.beta),
        validate_model_c(cfg.model_c),
        validate_pair(cfg.pair[0], cfg.pair[1], cfg.n) if cfg.pair and isinstance(cfg.n, int) and cfg.n >= 3
        else (True, ""),
        validate_r_grid(cfg.r_min, cfg.r_max, cfg.r_points),
        validate_node_count('quad_radial', cfg.quad_radial),
        validate_node_count('quad_z', cfg.z_nodes),
        validate_node_count('quad_t', cfg.quad_t),
    ]
    for ok, message in checks:
        if not ok:
            return False, message
    if cfg.quad_refinement < 2:
        return False, f"quad_refinement={cfg.quad_refinement} must be at least 2"
    return True, ""


def parse_config_text(text: str, source: str = '<config>') -> Dict[str, object]:
    """Parse ``key = value`` lines; '#' starts a comment, unknown keys are errors."""
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ValueError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.replace('-', '_').lower()
        if key not in SETTING_CONVERTERS:
            known = ', '.join(sorted(SETTING_CONVERTERS))
            raise ValueError(f"{source}:{number}: unknown key {key!r} (known keys: {known})")
        try:
            values[key] = SETTING_CONVERTERS[key](value)
        except ValueError as exc:
            raise ValueError(f"{source}:{number}: bad value for {key}: {exc}") from exc
    return values


def load_config_file(path: str) -> Dict[str, object]:
    with open(path, encoding='utf-8') as handle:
        return parse_config_text(handle.read(), source=path)


def resolve_run_config(file_values: Optional[Dict] = None,
                       overrides: Optional[Dict] = None) -> RunConfig:
    """Merge file values and CLI overrides (None entries are ignored)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = RunConfig(**merged)
    logger.debug("Resolved run config: %s", cfg.as_dict())
    return cfg
