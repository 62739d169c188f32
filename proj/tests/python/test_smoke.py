import os
import pathlib

import pytest

import ecdiff

FIXTURES = pathlib.Path(os.environ.get("ECDIFF_FIXTURE_DIR", pathlib.Path(__file__).parents[2] / "fixtures"))


def source(name):
    return (FIXTURES / f"{name}.cp").read_text()


def test_motivating_diff():
    report = ecdiff.diff(source("mot1_a"), source("mot1_b"))
    assert report["rank_found"] == 1
    assert report["delta12"] == [[["L5", "L2"]]]
    assert report["delta21"] == []
    assert set(report["stats"]) >= {"mayHb_p1", "mayHb_p2", "mayRf_p1", "mayRf_p2", "millis"}


def test_identical_versions_agree():
    text = source("mot2_a")
    assert ecdiff.diff(text, text)["rank_found"] == 0


def test_label_map_is_applied():
    renamed = source("mot1_b").replace("L", "M")
    mapping = "\n".join(f"L{i} -> M{i}" for i in range(1, 6))
    assert ecdiff.diff(source("mot1_a"), renamed, label_map=mapping)["delta12"] == [[["L5", "L2"]]]


def test_analyze_and_facts():
    trace = ecdiff.analyze(source("mot1_a"))
    assert {"mustHb", "mayHb", "mayRf", "noRf"} <= set(trace)
    assert ["L5", "L2"] in trace["mayRf"]
    facts = ecdiff.facts(source("mot1_a"))
    assert {"Po", "Dom", "Store", "Load"} <= set(facts)


def test_oracle():
    ground = ecdiff.oracle(source("mot1_a"), loop_bound=2)
    assert ground["complete"]
    assert ["L5", "L2"] in ground["rf"]


def test_errors():
    with pytest.raises(ecdiff.FrontendError):
        ecdiff.analyze("var x = 0;\nthread t { x = y; }\n")
    with pytest.raises(ValueError):
        ecdiff.diff(source("mot1_a"), source("mot1_b"), label_map="L9 -> L1")
