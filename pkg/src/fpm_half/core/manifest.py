"""Manifest schema for exported capture stacks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from ..exceptions import DataInconsistencyError
from .geometry import IlluminationPlan, SystemSpec

FORMAT_VERSION = "1.0"


class Provenance(str, Enum):
    """Where the frames of a stack came from."""

    SIMULATED = "simulated"
    LOADED = "loaded"


@dataclass(frozen=True)
class FrameRecord:
    """One exported frame file and the scale needed to dequantize it."""

    file: str
    """File name relative to the stack directory (e.g., 'frame_0000.pgm')"""

    max_intensity: float
    """Physical intensity that the maximum 16-bit code maps to"""

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {"file": self.file, "max_intensity": self.max_intensity}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FrameRecord:
        """Create from dictionary."""
        return cls(file=str(data["file"]), max_intensity=float(data["max_intensity"]))


@dataclass
class StackManifest:
    """Identity document of an exported capture stack.

    Binds each frame file to its plan entry by position and records the system the
    frames were taken with. Located at: <stack dir>/manifest.json
    """

    format_version: str
    """Manifest format version (e.g., '1.0')"""

    provenance: Provenance
    """simulated | loaded"""

    system: SystemSpec
    """Microscope the frames were taken with"""

    plan: IlluminationPlan
    """Plan whose entry k produced frame k"""

    frames: list[FrameRecord] = field(default_factory=list)
    """Frame files in plan order"""

    MANIFEST_FILE = "manifest.json"

    def __post_init__(self) -> None:
        if self.frames and len(self.frames) != len(self.plan):
            raise DataInconsistencyError(
                f"Manifest lists {len(self.frames)} frames for a {len(self.plan)}-entry plan"
            )

    @property
    def upsampling(self) -> int:
        """Ratio of the plan's high-resolution grid to the camera grid."""
        return self.plan.grid.size // self.system.camera_pixels

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "format_version": self.format_version,
            "provenance": self.provenance.value,
            "system": self.system.to_dict(),
            "plan": self.plan.to_dict(),
            "frames": [frame.to_dict() for frame in self.frames],
        }

    def to_json(self, indent: int = 2) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), indent=indent) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> StackManifest:
        """Create from dictionary.

        Raises:
            DataInconsistencyError: If required keys are missing or malformed
        """
        try:
            return cls(
                format_version=str(data["format_version"]),
                provenance=Provenance(data["provenance"]),
                system=SystemSpec.from_dict(data["system"]),
                plan=IlluminationPlan.from_dict(data["plan"]),
                frames=[FrameRecord.from_dict(f) for f in data["frames"]],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataInconsistencyError(f"Malformed stack manifest: {e}") from e

    @classmethod
    def from_json(cls, json_str: str) -> StackManifest:
        """Create from JSON string."""
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            raise DataInconsistencyError(f"Stack manifest is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, directory: Path) -> StackManifest:
        """Load manifest from a stack directory."""
        manifest_path = directory / cls.MANIFEST_FILE
        if not manifest_path.exists():
            raise DataInconsistencyError(f"Stack manifest not found: {manifest_path}")
        return cls.from_json(manifest_path.read_text(encoding="utf-8"))

    def save(self, directory: Path) -> Path:
        """Save manifest to a stack directory."""
        directory.mkdir(parents=True, exist_ok=True)
        manifest_path = directory / self.MANIFEST_FILE
        manifest_path.write_text(self.to_json(), encoding="utf-8")
        return manifest_path
