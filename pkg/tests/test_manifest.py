"""Run-manifest records: canonical digests and file hashing."""

import hashlib
import json

import tcdrive
from tcdrive.manifest import (
    RunManifest,
    canonical_json,
    file_sha256,
    write_manifest,
)


def test_canonical_json_sorted_and_compact():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def test_file_sha256_matches_hashlib(tmp_path):
    path = tmp_path / "blob.bin"
    payload = b"x" * 100_000 + b"tail"
    path.write_bytes(payload)
    assert file_sha256(path) == hashlib.sha256(payload).hexdigest()


def test_digest_ignores_insertion_order():
    a = RunManifest(command="simulate", config={"x": 1, "y": 2})
    b = RunManifest(command="simulate", config={"y": 2, "x": 1})
    assert a.digest == b.digest
    assert len(a.digest) == 64


def test_digest_tracks_content():
    a = RunManifest(command="simulate", config={"x": 1})
    assert a.digest != RunManifest(command="simulate", config={"x": 2}).digest
    assert a.digest != RunManifest(command="sweep", config={"x": 1}).digest
    # Outputs are recorded but do not participate in the digest.
    c = RunManifest(command="simulate", config={"x": 1},
                    outputs={"trace.csv": "abc"})
    assert c.digest == a.digest


def test_to_json_structure():
    m = RunManifest(command="simulate", config={"x": 1}, outputs={"f": "h"})
    doc = json.loads(m.to_json())
    assert set(doc) == {"command", "version", "digest", "config", "outputs"}
    assert doc["version"] == tcdrive.__version__
    assert doc["digest"] == m.digest


def test_write_manifest(tmp_path):
    m = RunManifest(command="simulate", config={"x": 1})
    path = tmp_path / "manifest.json"
    write_manifest(m, path)
    raw = path.read_bytes().decode()
    assert "\r" not in raw
    assert raw.endswith("\n")
    assert json.loads(raw)["digest"] == m.digest
