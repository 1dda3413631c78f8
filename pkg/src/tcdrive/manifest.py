"""Run manifests: reproducibility records written beside command outputs.

The digest is the SHA-256 of the canonical JSON (sorted keys, no
whitespace) of the resolved configuration, the command name, and the
package version — stable across YAML reformatting, key reordering, and
comments, and changed by anything that could change the numbers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__

__all__ = ["RunManifest", "canonical_json", "file_sha256", "write_manifest"]


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: dict
    outputs: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def digest(self) -> str:
        body = {"command": self.command, "version": self.version, "config": self.config}
        return hashlib.sha256(canonical_json(body).encode("utf-8")).hexdigest()

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "version": self.version,
                "digest": self.digest,
                "config": self.config,
                "outputs": self.outputs,
            },
            indent=2,
            sort_keys=True,
        )


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(manifest.to_json() + "\n")
