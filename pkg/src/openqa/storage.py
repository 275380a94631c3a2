"""On-disk index layout: the manifest file shared by sparse and dense indexes."""

import os

from .errors import IndexCorrupt, IndexVersionMismatch

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest"


def write_manifest(directory, entries: dict) -> None:
    path = os.path.join(directory, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"format_version={FORMAT_VERSION}\n")
        for key, value in entries.items():
            f.write(f"{key}={value}\n")


def read_manifest(directory) -> dict:
    """Parse the key=value manifest, checking the format version."""
    path = os.path.join(directory, MANIFEST_NAME)
    if not os.path.isfile(path):
        raise IndexCorrupt(f"no manifest in {directory}")
    entries = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise IndexCorrupt(f"malformed manifest line: {line!r}")
            key, _, value = line.partition("=")
            entries[key] = value
    version = entries.get("format_version")
    if version != str(FORMAT_VERSION):
        raise IndexVersionMismatch(f"unsupported index format version {version!r}")
    return entries


def load_index(directory):
    """Load a saved index of either type, dispatching on the manifest."""
    entries = read_manifest(directory)
    kind = entries.get("type")
    if kind == "sparse":
        from .sparse import load_sparse

        return load_sparse(directory)
    if kind == "dense":
        from .dense import load_dense

        return load_dense(directory)
    raise IndexCorrupt(f"unknown index type {kind!r}")
