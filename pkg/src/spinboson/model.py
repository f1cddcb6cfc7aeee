"""Parameter types, model taxonomy and validation shared by every module.

Units: hbar = k_B = 1. All frequencies and couplings share one arbitrary
energy unit.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import ConfigError, DomainError


class _ZeroTemperature:
    """Singleton marker for the beta -> infinity limit."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO_T"

    def __reduce__(self):
        return (_ZeroTemperature, ())


ZERO_T = _ZeroTemperature()
_ZERO_T_SPELLINGS = {"zero_t", "zero-t", "zero", "inf", "infinity", "t0"}


def is_zero_t(beta) -> bool:
    return beta is ZERO_T


class Family(str, enum.Enum):
    SIGMA_Z = "sigma_z"
    GENERALIZED_DICKE = "generalized_dicke"
    INTENSITY_DEPENDENT = "intensity_dependent"


class CouplingMode(str, enum.Enum):
    RWA_ONLY = "rwa_only"
    COUNTER_ONLY = "counter_only"
    GENERAL = "general"


_FAMILY_ALIASES = {
    "sigma_z": Family.SIGMA_Z,
    "sigmaz": Family.SIGMA_Z,
    "sigma-z": Family.SIGMA_Z,
    "sigmazcoupled": Family.SIGMA_Z,
    "generalized_dicke": Family.GENERALIZED_DICKE,
    "generalizeddicke": Family.GENERALIZED_DICKE,
    "dicke": Family.GENERALIZED_DICKE,
    "intensity_dependent": Family.INTENSITY_DEPENDENT,
    "intensitydependent": Family.INTENSITY_DEPENDENT,
    "intensity": Family.INTENSITY_DEPENDENT,
}


@dataclass(frozen=True)
class ModelKind:
    """Which of the three spin-boson models, plus coupling-mode metadata.

    ``coupling_mode`` is ``None`` for the sigma-z model and one of
    :class:`CouplingMode` for the two Dicke-type families.
    """

    family: Family
    coupling_mode: CouplingMode | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.SIGMA_Z:
            if self.coupling_mode is not None:
                raise DomainError("coupling_mode", "sigma_z model carries no coupling mode")
        else:
            mode = CouplingMode.GENERAL if self.coupling_mode is None else CouplingMode(self.coupling_mode)
            object.__setattr__(self, "coupling_mode", mode)

    @classmethod
    def sigma_z(cls) -> "ModelKind":
        return cls(Family.SIGMA_Z)

    @classmethod
    def dicke(cls, mode=CouplingMode.GENERAL) -> "ModelKind":
        return cls(Family.GENERALIZED_DICKE, mode)

    @classmethod
    def intensity(cls, mode=CouplingMode.GENERAL) -> "ModelKind":
        return cls(Family.INTENSITY_DEPENDENT, mode)

    @classmethod
    def infer(cls, family, params: "ModelParams") -> "ModelKind":
        """Build a kind whose coupling mode matches the couplings in ``params``."""
        family = parse_family(family)
        if family is Family.SIGMA_Z:
            return cls(family)
        if params.g2 == 0 and params.g1 > 0:
            return cls(family, CouplingMode.RWA_ONLY)
        if params.g1 == 0 and params.g2 > 0:
            return cls(family, CouplingMode.COUNTER_ONLY)
        return cls(family, CouplingMode.GENERAL)

    def to_dict(self) -> dict:
        out = {"model": self.family.value}
        if self.coupling_mode is not None:
            out["coupling_mode"] = self.coupling_mode.value
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelKind":
        mode = data.get("coupling_mode")
        return cls(parse_family(data["model"]), None if mode is None else CouplingMode(mode))


def parse_family(value) -> Family:
    if isinstance(value, Family):
        return value
    key = str(value).strip().lower().replace(" ", "")
    try:
        return _FAMILY_ALIASES[key]
    except KeyError:
        raise DomainError("model", f"unknown model {value!r}") from None


def parse_beta(value):
    """Parse an inverse temperature; the zero-temperature spellings map to ZERO_T."""
    if value is ZERO_T:
        return ZERO_T
    if isinstance(value, str):
        text = value.strip().lower()
        if text in _ZERO_T_SPELLINGS:
            return ZERO_T
        try:
            value = float(text)
        except ValueError:
            raise DomainError("beta", f"cannot parse beta={value!r}") from None
    value = float(value)
    if value == math.inf:
        return ZERO_T
    return value


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters.

    omega_big is the atomic gap, omega0 the mode frequency, g1/g2 the
    rotating/counter-rotating couplings of the Dicke-type models and g the
    single coupling of the sigma-z model.
    """

    omega_big: float = 1.0
    omega0: float = 1.0
    g1: float = 0.0
    g2: float = 0.0
    g: float = 0.0
    n_atoms: int = 1
    beta: Any = 1.0

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    @property
    def tanh_factor(self) -> float:
        """tanh(beta * Omega / 4); exactly 1 at zero temperature."""
        if is_zero_t(self.beta):
            return 1.0
        return math.tanh(self.beta * self.omega_big / 4.0)

    def to_dict(self) -> dict:
        return {
            "omega": self.omega_big,
            "omega0": self.omega0,
            "g1": self.g1,
            "g2": self.g2,
            "g": self.g,
            "n_atoms": self.n_atoms,
            "beta": "zero_t" if is_zero_t(self.beta) else self.beta,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelParams":
        kwargs = {}
        for key, value in data.items():
            if key in ("model", "coupling_mode"):
                continue
            if key not in _PARAM_KEYS:
                raise ConfigError(f"unknown parameter key {key!r}")
            name = _PARAM_KEYS[key]
            try:
                if name == "beta":
                    kwargs[name] = parse_beta(value)
                elif name == "n_atoms":
                    kwargs[name] = _parse_int(value)
                else:
                    kwargs[name] = float(value)
            except (TypeError, ValueError) as exc:
                if isinstance(exc, DomainError):
                    raise
                raise DomainError(name, f"cannot parse {key}={value!r}") from None
        return cls(**kwargs)


_PARAM_KEYS = {
    "omega": "omega_big",
    "omega_big": "omega_big",
    "omega0": "omega0",
    "g1": "g1",
    "g2": "g2",
    "g": "g",
    "n_atoms": "n_atoms",
    "beta": "beta",
}
PARAM_FIELDS = _PARAM_KEYS
PARAM_KEYS = ("model", "omega", "omega0", "g1", "g2", "g", "n_atoms", "beta")


def _parse_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError(value)
    if isinstance(value, int):
        return value
    f = float(value)
    if not f.is_integer():
        raise DomainError("n_atoms", f"n_atoms must be an integer, got {value!r}")
    return int(f)


def validate_params(kind: ModelKind, params: ModelParams) -> ModelParams:
    """Check every parameter invariant; return params with beta canonicalized.

    Raises DomainError naming the first offending field.
    """
    for name in ("omega_big", "omega0", "g1", "g2", "g"):
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DomainError(name, f"{name} must be a finite number, got {value!r}")
    if params.omega_big <= 0:
        raise DomainError("omega_big", f"omega_big must be > 0, got {params.omega_big}")
    if params.omega0 <= 0:
        raise DomainError("omega0", f"omega0 must be > 0, got {params.omega0}")
    for name in ("g1", "g2", "g"):
        if getattr(params, name) < 0:
            raise DomainError(name, f"{name} must be >= 0, got {getattr(params, name)}")
    if isinstance(params.n_atoms, bool) or not isinstance(params.n_atoms, int) or params.n_atoms < 1:
        raise DomainError("n_atoms", f"n_atoms must be an integer >= 1, got {params.n_atoms!r}")

    beta = params.beta
    if not is_zero_t(beta):
        if isinstance(beta, str):
            beta = parse_beta(beta)
        elif isinstance(beta, (int, float)) and not isinstance(beta, bool):
            beta = parse_beta(beta)
        else:
            raise DomainError("beta", f"beta must be a number or ZERO_T, got {beta!r}")
    if not is_zero_t(beta) and not (beta > 0 and math.isfinite(beta)):
        raise DomainError("beta", f"beta must be > 0, got {beta}")

    mode = kind.coupling_mode
    if mode is CouplingMode.RWA_ONLY and params.g2 != 0:
        raise DomainError("g2", "rwa_only coupling mode requires g2 = 0")
    if mode is CouplingMode.COUNTER_ONLY and params.g1 != 0:
        raise DomainError("g1", "counter_only coupling mode requires g1 = 0")

    if beta is params.beta:
        return params
    return params.replace(beta=beta)


def require_finite_beta(params: ModelParams, what: str) -> float:
    if is_zero_t(params.beta):
        raise DomainError("beta", f"{what} needs a finite beta")
    return params.beta


@dataclass
class ThermoReport:
    """Thermodynamic summary from either the closed forms or the oracle."""

    ln_z_ratio: float | None
    ln_z_total: float | None
    mean_energy: float | None
    entropy: float | None
    order_parameter: float | None = None
    source: str = "analytic"
    truncation_metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in ("analytic", "oracle"):
            raise ValueError(f"source must be 'analytic' or 'oracle', got {self.source!r}")
        if self.source == "oracle" and self.entropy is not None and self.entropy < -1e-10:
            raise ValueError(f"oracle entropy must be non-negative, got {self.entropy}")
        if self.order_parameter is not None and self.order_parameter < -1e-12:
            raise ValueError(f"order parameter must be non-negative, got {self.order_parameter}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
