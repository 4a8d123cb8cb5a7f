"""Shared test helpers; chiefly the Bitcoin-Alpha dataset locator.

The dataset is not bundled with the repository (it is third-party data
redistributed from SNAP), so acceptance tests that need it call
`require_bitcoin_alpha()`, which finds a local copy or downloads one. When
the dataset is genuinely unreachable those tests FAIL with instructions —
they never skip, because the numbers they check are part of the acceptance
contract.
"""

from __future__ import annotations

import gzip
import os
import urllib.error
import urllib.request
from pathlib import Path

import pytest

from balattack import LoadStats, SignedGraph, load_rating_csv

DATASET_URL = "https://snap.stanford.edu/data/soc-sign-bitcoinalpha.csv.gz"
CANDIDATE_NAMES = (
    "soc-sign-bitcoinalpha.csv.gz",
    "soc-sign-bitcoinalpha.csv",
    "bitcoin-alpha.csv.gz",
    "bitcoin-alpha.csv",
    "bitcoin_alpha.csv",
    "bitcoinalpha.csv",
)

_HELP = f"""Bitcoin-Alpha dataset not available.

This acceptance criterion checks published numbers on the real Bitcoin-Alpha
trust graph and cannot run without it. To provide the dataset either:

  1. set BITCOIN_ALPHA_CSV=/path/to/soc-sign-bitcoinalpha.csv[.gz], or
  2. drop one of {', '.join(CANDIDATE_NAMES)}
     into tests/data/ or <repo>/data/ (BALATTACK_DATA overrides the directory), or
  3. allow network access to {DATASET_URL}
     (the suite then downloads it once into tests/data/).

Download attempt result: {{download_error}}
"""

_cache: tuple[str, object] | None = None


def _search_dirs() -> list[Path]:
    dirs = []
    env_dir = os.environ.get("BALATTACK_DATA")
    if env_dir:
        dirs.append(Path(env_dir))
    here = Path(__file__).resolve().parent
    dirs.append(here / "data")
    dirs.append(here.parent / "data")
    return dirs


def _locate() -> Path | None:
    explicit = os.environ.get("BITCOIN_ALPHA_CSV")
    if explicit:
        p = Path(explicit)
        if p.is_file():
            return p
        pytest.fail(
            f"BITCOIN_ALPHA_CSV points to a missing file: {explicit}", pytrace=False
        )
    for d in _search_dirs():
        for name in CANDIDATE_NAMES:
            p = d / name
            if p.is_file():
                return p
    return None


def _download() -> Path | str:
    """Fetch the dataset; returns the saved path, or an error string."""
    try:
        with urllib.request.urlopen(DATASET_URL, timeout=60) as resp:
            payload = resp.read()
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        return f"{type(exc).__name__}: {exc}"
    dest_dir = _search_dirs()[0]
    dest_dir.mkdir(parents=True, exist_ok=True)
    dest = dest_dir / CANDIDATE_NAMES[0]
    dest.write_bytes(payload)
    return dest


def _load(path: Path) -> tuple[SignedGraph, LoadStats]:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8", newline="") as f:
        return load_rating_csv(f)


def require_bitcoin_alpha() -> tuple[SignedGraph, LoadStats]:
    """Parsed Bitcoin-Alpha graph, cached per session; fails the calling
    test with acquisition instructions when the dataset is unreachable."""
    global _cache
    if _cache is None:
        path = _locate()
        if path is None:
            got = _download()
            if isinstance(got, Path):
                path = got
            else:
                _cache = ("fail", _HELP.format(download_error=got))
        if path is not None:
            _cache = ("ok", _load(path))
    kind, value = _cache
    if kind == "fail":
        pytest.fail(value, pytrace=False)  # type: ignore[arg-type]
    return value  # type: ignore[return-value]
