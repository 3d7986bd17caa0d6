"""Pipeline configuration loaded from JSON or YAML."""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from .core.geometry import LedArraySpec, LedIndex, PlanMode, SystemSpec, make_plan
from .core.optics import Grid
from .exceptions import ConfigError, GeometryError
from .imaging.forward import check_plan_fits
from .imaging.objects import MIN_OBJECT_SIZE, ObjectKind
from .reconstruction.solver import ReconConfig

logger = logging.getLogger(__name__)

DEFAULT_SYMMETRIC_PAIRS = ((1, 1), (2, 2), (3, 3), (4, 4))
DEFAULT_PHASE_RANGE_RAD = 0.5 * math.pi


@dataclass
class ObjectConfig:
    """Which object to image."""

    kind: str = ObjectKind.AMPLITUDE_ONLY.value
    """amplitude-only, phase-only, or complex"""

    size_px: int = 512
    """High-resolution object side length"""

    phase_range_rad: float = DEFAULT_PHASE_RANGE_RAD
    """Phase interval upper end"""

    amplitude_path: Path | None = None
    """Grayscale amplitude image; the standard bar target when unset"""

    phase_path: Path | None = None
    """Grayscale phase image; the standard bar target when unset"""

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ObjectConfig:
        """Create from dictionary."""
        amplitude_path = data.get("amplitude_path")
        phase_path = data.get("phase_path")
        return cls(
            kind=str(data.get("kind", ObjectKind.AMPLITUDE_ONLY.value)),
            size_px=int(data.get("size_px", 512)),
            phase_range_rad=float(data.get("phase_range_rad", DEFAULT_PHASE_RANGE_RAD)),
            amplitude_path=Path(amplitude_path) if amplitude_path else None,
            phase_path=Path(phase_path) if phase_path else None,
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "kind": self.kind,
            "size_px": self.size_px,
            "phase_range_rad": self.phase_range_rad,
            "amplitude_path": str(self.amplitude_path) if self.amplitude_path else None,
            "phase_path": str(self.phase_path) if self.phase_path else None,
        }


@dataclass
class PlanConfig:
    """Which LEDs to light."""

    mode: str = PlanMode.FULL.value
    """full, half-rows, or minimal-cover"""

    flip: bool = False
    """Use the mirrored half-plane"""

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PlanConfig:
        """Create from dictionary."""
        return cls(
            mode=str(data.get("mode", PlanMode.FULL.value)),
            flip=bool(data.get("flip", False)),
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"mode": self.mode, "flip": self.flip}


@dataclass
class NoiseConfig:
    """Additive Gaussian noise on simulated frames."""

    sigma_fraction: float = 0.0
    """Standard deviation as a fraction of the stack maximum"""

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> NoiseConfig:
        """Create from dictionary."""
        return cls(sigma_fraction=float(data.get("sigma_fraction", 0.0)))

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"sigma_fraction": self.sigma_fraction}


@dataclass
class PipelineConfig:
    """Everything a pipeline command needs."""

    system: SystemSpec = field(default_factory=SystemSpec)
    led_array: LedArraySpec = field(default_factory=LedArraySpec)
    object: ObjectConfig = field(default_factory=ObjectConfig)
    plan: PlanConfig = field(default_factory=PlanConfig)
    reconstruction: ReconConfig = field(default_factory=ReconConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    symmetric_pairs: list[LedIndex] = field(
        default_factory=lambda: [LedIndex(*p) for p in DEFAULT_SYMMETRIC_PAIRS]
    )
    """LEDs whose point-symmetric pairs compare-symmetric reports"""

    output_dir: Path = Path("fpm_output")
    seed: int = 0
    workers: int = 1
    """Threads used to simulate frames"""

    exposure_ms: float = 600.0
    """Per-frame exposure used for acquisition-time estimates"""

    @property
    def upsampling(self) -> int:
        return self.object.size_px // self.system.camera_pixels

    @property
    def object_grid(self) -> Grid:
        return self.system.object_grid(self.upsampling)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PipelineConfig:
        """Create from dictionary.

        Raises:
            ConfigError: If a section is not a mapping or a value has the wrong type
        """
        if not isinstance(data, dict):
            raise ConfigError(f"Config must be a mapping, got {type(data).__name__}")

        sections = {}
        for name in ("system", "led_array", "object", "plan", "reconstruction", "noise"):
            section = data.get(name) or {}
            if not isinstance(section, dict):
                raise ConfigError(f"{name}: expected a mapping, got {type(section).__name__}")
            sections[name] = section

        try:
            pairs = data.get("symmetric_pairs", [list(p) for p in DEFAULT_SYMMETRIC_PAIRS])
            symmetric_pairs = []
            for k, pair in enumerate(pairs):
                if len(pair) != 2:
                    raise ConfigError(f"symmetric_pairs[{k}]: expected [i, j], got {pair!r}")
                symmetric_pairs.append(LedIndex(int(pair[0]), int(pair[1])))

            return cls(
                system=SystemSpec.from_dict(sections["system"]),
                led_array=LedArraySpec.from_dict(sections["led_array"]),
                object=ObjectConfig.from_dict(sections["object"]),
                plan=PlanConfig.from_dict(sections["plan"]),
                reconstruction=ReconConfig.from_dict(sections["reconstruction"]),
                noise=NoiseConfig.from_dict(sections["noise"]),
                symmetric_pairs=symmetric_pairs,
                output_dir=Path(data.get("output_dir", "fpm_output")),
                seed=int(data.get("seed", 0)),
                workers=int(data.get("workers", 1)),
                exposure_ms=float(data.get("exposure_ms", 600.0)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid config value: {e}") from e

    @classmethod
    def from_yaml(cls, path: Path) -> PipelineConfig:
        """Load from a JSON or YAML file.

        Raises:
            ConfigError: If the file is missing or cannot be parsed
        """
        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse config {path}: {e}") from e

        config = cls.from_dict(data if data is not None else {})
        base = Path(path).parent
        for attr in ("amplitude_path", "phase_path"):
            value = getattr(config.object, attr)
            if value is not None and not value.is_absolute():
                setattr(config.object, attr, base / value)
        logger.debug("Loaded config from %s", path)
        return config

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "system": self.system.to_dict(),
            "led_array": self.led_array.to_dict(),
            "object": self.object.to_dict(),
            "plan": self.plan.to_dict(),
            "reconstruction": self.reconstruction.to_dict(),
            "noise": self.noise.to_dict(),
            "symmetric_pairs": [[p.i, p.j] for p in self.symmetric_pairs],
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "workers": self.workers,
            "exposure_ms": self.exposure_ms,
        }

    def with_overrides(
        self,
        seed: int | None = None,
        plan: str | None = None,
        iterations: int | None = None,
        output_dir: Path | None = None,
    ) -> PipelineConfig:
        """Copy with command-line values applied on top."""
        config = replace(self)
        if seed is not None:
            config.seed = seed
        if plan is not None:
            config.plan = replace(self.plan, mode=plan)
        if iterations is not None:
            config.reconstruction = replace(self.reconstruction, iterations=iterations)
        if output_dir is not None:
            config.output_dir = output_dir
        return config

    def validate(self, plan_modes: Iterable[PlanMode | str] | None = None) -> None:
        """Check every field before any output is written.

        Nothing is created on disk; writers make ``output_dir`` when the first file lands.

        Args:
            plan_modes: Plans whose windows must fit the object spectrum; the configured
                mode when None

        Raises:
            ConfigError: Naming the first offending field
        """
        n = self.system.camera_pixels
        size = self.object.size_px
        if size < MIN_OBJECT_SIZE:
            raise ConfigError(f"object.size_px must be >= {MIN_OBJECT_SIZE}, got {size}")
        if size < n or size % n != 0:
            raise ConfigError(
                f"object.size_px ({size}) must be an integer multiple of "
                f"system.camera_pixels ({n})"
            )
        if self.object.phase_range_rad < 0:
            raise ConfigError(
                f"object.phase_range_rad must be >= 0, got {self.object.phase_range_rad}"
            )
        ObjectKind.parse(self.object.kind)
        PlanMode.parse(self.plan.mode)

        for attr in ("amplitude_path", "phase_path"):
            path = getattr(self.object, attr)
            if path is not None and not path.is_file():
                raise ConfigError(f"object.{attr}: file not found: {path}")

        if self.noise.sigma_fraction < 0:
            raise ConfigError(
                f"noise.sigma_fraction must be >= 0, got {self.noise.sigma_fraction}"
            )
        for k, led in enumerate(self.symmetric_pairs):
            if not self.led_array.contains(led):
                raise ConfigError(
                    f"symmetric_pairs[{k}]: LED ({led.i}, {led.j}) is outside the "
                    f"{self.led_array.side_count}x{self.led_array.side_count} array"
                )
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not self.exposure_ms > 0:
            raise ConfigError(f"exposure_ms must be positive, got {self.exposure_ms}")

        modes = [self.plan.mode] if plan_modes is None else list(plan_modes)
        for mode in modes:
            try:
                plan = make_plan(
                    self.led_array, mode, self.system, self.object_grid, flip=self.plan.flip
                )
                check_plan_fits(plan, n)
            except GeometryError as e:
                raise ConfigError(
                    f"plan.mode {PlanMode.parse(mode).value} does not fit object.size_px "
                    f"({size}): {e}"
                ) from e

        self._check_output_dir()

    def _check_output_dir(self) -> None:
        target = self.output_dir
        if target.exists() and not target.is_dir():
            raise ConfigError(f"output_dir: {target} is not a directory")
        ancestor = target
        while not ancestor.exists():
            ancestor = ancestor.parent
        if not ancestor.is_dir() or not os.access(ancestor, os.W_OK):
            raise ConfigError(f"output_dir: cannot create {target} under {ancestor}")
