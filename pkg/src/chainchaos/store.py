"""Content-addressed result store for reproducible runs.

Entries are keyed by the hash of their manifest (command, normalized
flags, system config content), not of their outputs, so re-running the
same manifest lands on the same key and `replay` can diff the fresh
artifacts against the stored ones byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Dict, Optional, Tuple

from .errors import StoreError

ENV_VAR = "CHAINCHAOS_STORE"
DEFAULT_DIR = ".chainchaos-store"


def store_root(explicit: Optional[str] = None) -> Path:
    root = Path(explicit or os.environ.get(ENV_VAR, DEFAULT_DIR))
    root.mkdir(parents=True, exist_ok=True)
    return root


def manifest_hash(manifest: Dict) -> str:
    canon = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def persist(manifest: Dict, artifacts: Dict[str, str],
            root: Optional[str] = None) -> str:
    """Write manifest and artifacts under the manifest hash; returns the key."""
    key = manifest_hash(manifest)
    entry = store_root(root) / key
    entry.mkdir(parents=True, exist_ok=True)
    (entry / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    art_dir = entry / "artifacts"
    art_dir.mkdir(exist_ok=True)
    checksums = {}
    for name, content in sorted(artifacts.items()):
        path = art_dir / name
        path.write_text(content)
        checksums[name] = hashlib.sha256(content.encode()).hexdigest()
    (entry / "checksums.json").write_text(
        json.dumps(checksums, indent=2, sort_keys=True) + "\n")
    return key


def load(key: str, root: Optional[str] = None) -> Tuple[Dict, Dict[str, str]]:
    """Manifest and artifacts for a key, with integrity verification."""
    entry = store_root(root) / key
    if not entry.is_dir():
        raise StoreError(f"no store entry {key}")
    try:
        manifest = json.loads((entry / "manifest.json").read_text())
        checksums = json.loads((entry / "checksums.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreError(f"corrupt store entry {key}: {exc}") from exc
    artifacts = {}
    for name, digest in checksums.items():
        path = entry / "artifacts" / name
        if not path.is_file():
            raise StoreError(f"store entry {key} lost artifact {name}")
        content = path.read_text()
        if hashlib.sha256(content.encode()).hexdigest() != digest:
            raise StoreError(f"store entry {key}: artifact {name} fails its checksum")
        artifacts[name] = content
    return manifest, artifacts


def diff_artifacts(old: Dict[str, str], new: Dict[str, str]) -> Dict[str, str]:
    """Byte-difference report; empty means identical artifact sets."""
    report = {}
    for name in sorted(set(old) | set(new)):
        if name not in old:
            report[name] = "only in replay"
        elif name not in new:
            report[name] = "missing in replay"
        elif old[name] != new[name]:
            report[name] = "content differs"
    return report
