from __future__ import annotations

from pathlib import Path

import pytest

from nomos import check, default_registry, load_dataset, parse

REPO = Path(__file__).resolve().parent.parent
SPECS = REPO / "specs"
FIXTURES = REPO / "fixtures"

# input schemas per corpus spec prefix
_SOURCE_FILES = {
    "compas": ("compas_rows.csv", ("x1",)),
    "mnist": ("mnist_like.csv", ("x1",)),
    "speech": ("mnist_like.csv", ("x1",)),
    "hotel": ("hotel_rows.csv", ("x1", "x2")),
    "lander": ("lander_pool.csv", ("s1",)),
}


def corpus_paths() -> list[Path]:
    return sorted(SPECS.glob("*.nomos"))


def sources_for(spec_path: Path) -> dict:
    prefix = spec_path.stem.split("_")[0]
    csv_name, input_names = _SOURCE_FILES[prefix]
    return {name: load_dataset(FIXTURES / csv_name, name=name) for name in input_names}


def load_checked(spec_path: Path):
    """Parse and check one corpus spec with its matching schemas."""
    sources = sources_for(spec_path)
    spec = parse(spec_path.read_text(encoding="utf-8"))
    schemas = {name: src.shape for name, src in sources.items()}
    typed = check(spec, default_registry(), schemas=schemas, filename=str(spec_path))
    return typed, sources


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def specs_dir() -> Path:
    return SPECS


@pytest.fixture(scope="session")
def compas_source():
    return load_dataset(FIXTURES / "compas_rows.csv", name="x1")


@pytest.fixture(scope="session")
def lander_pool():
    return load_dataset(FIXTURES / "lander_pool.csv", name="s1")
