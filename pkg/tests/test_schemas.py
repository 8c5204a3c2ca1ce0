"""Emitted documents validate against the shipped JSON Schemas."""

import json
from pathlib import Path

import jsonschema
import pytest

from corrcolor import (
    cover_to_json_dict,
    gen_cycle,
    gen_random_bipartite_regular,
    graph_to_json_dict,
    lift_from_lists,
    random_cover,
    shifted_cycle_cover,
)

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def load_schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


@pytest.fixture(scope="module")
def validators():
    return {
        "graph": jsonschema.Draft202012Validator(load_schema("graph.schema.json")),
        "cover": jsonschema.Draft202012Validator(load_schema("cover.schema.json")),
        "weights": jsonschema.Draft202012Validator(load_schema("weights.schema.json")),
    }


def test_graph_documents_validate(validators):
    for g in (gen_cycle(6), gen_random_bipartite_regular(5, 2, seed=0)):
        validators["graph"].validate(json.loads(json.dumps(graph_to_json_dict(g))))


def test_cover_documents_validate(validators):
    g = gen_cycle(6)
    for cover in (
        random_cover(g, 3, seed=1),
        random_cover(g, 3, seed=1, mode="bernoulli", q=0.4),
        lift_from_lists(g, [[1, 2]] * 6),
        shifted_cycle_cover(6),
    ):
        validators["cover"].validate(json.loads(json.dumps(cover_to_json_dict(cover))))


def test_weights_document_validates(validators):
    validators["weights"].validate({"p_hat": 0.5, "p": [0.1, 0.0, 0.5]})
    with pytest.raises(jsonschema.ValidationError):
        validators["weights"].validate({"p_hat": 0.5})
    with pytest.raises(jsonschema.ValidationError):
        validators["graph"].validate({"n": 2})


def test_schema_rejects_malformed_cover(validators):
    bad = {"lists": [[0]], "matchings": {"zero-one": []}}
    with pytest.raises(jsonschema.ValidationError):
        validators["cover"].validate(bad)
