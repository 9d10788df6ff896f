from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tagmatch.schema import canonical_schema
from tagmatch.tagspace import TagVector, load_annotations, load_catalog

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def schema():
    return canonical_schema()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def bitmoji_catalog(schema):
    with (FIXTURES / "catalog_bitmoji.jsonl").open("rb") as handle:
        return load_catalog(handle, schema, catalog_id="bitmoji")


@pytest.fixture(scope="session")
def all_catalogs(schema):
    catalogs = []
    for name in ("bitmoji", "cartoonset", "metahuman", "novelai"):
        with (FIXTURES / f"catalog_{name}.jsonl").open("rb") as handle:
            catalogs.append(load_catalog(handle, schema, catalog_id=name))
    return catalogs


@pytest.fixture(scope="session")
def agreement_store(schema):
    with (FIXTURES / "annotations_agreement.jsonl").open("rb") as handle:
        return load_annotations(handle, schema)


def random_tags(rng: random.Random, schema) -> TagVector:
    return TagVector.from_dict(
        {attr.id: rng.randrange(attr.cardinality) for attr in schema.attributes}
    )


@pytest.fixture()
def make_random_tags(schema):
    def factory(rng: random.Random) -> TagVector:
        return random_tags(rng, schema)

    return factory
