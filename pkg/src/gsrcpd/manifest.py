"""Run manifests written next to every output file."""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .ingest import file_digest

# ╭──────────────────────────────────────────────────────────────╮
# │ Manifest model                                               │
# ╰──────────────────────────────────────────────────────────────╯

TOOL_VERSION = "0.1.0"
MANIFEST_SUFFIX = ".manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest(BaseModel):
    """What produced an output: command, settings, seed and input digests."""

    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = TOOL_VERSION
    input_hashes: Dict[str, str] = Field(default_factory=dict)
    started_at: str = Field(default_factory=_now)
    finished_at: Optional[str] = None
    outputs: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    def add_input(self, path: str | Path) -> None:
        self.input_hashes[str(path)] = file_digest(path)

    def finish(self) -> "RunManifest":
        self.finished_at = _now()
        return self


def manifest_path(output_path: str | Path) -> Path:
    output = Path(output_path)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(output_path: str | Path, manifest: RunManifest) -> Path:
    """Write ``<output>.manifest.json`` beside ``output_path``."""

    target = manifest_path(output_path)
    if str(output_path) not in manifest.outputs:
        manifest.outputs.append(str(output_path))
    if manifest.finished_at is None:
        manifest.finish()
    target.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return target


__all__ = ["MANIFEST_SUFFIX", "RunManifest", "TOOL_VERSION", "manifest_path", "write_manifest"]
