"""Python access to the ecdiff analyses. Every call takes program source text."""

import json

from . import _ecdiff
from ._ecdiff import DiffError, FrontendError, OracleError

__all__ = ["analyze", "facts", "diff", "oracle", "DiffError", "FrontendError", "OracleError"]


def analyze(source, rank=1, access_restriction=True):
    return json.loads(_ecdiff.analyze(source, rank, access_restriction))


def facts(source):
    return json.loads(_ecdiff.facts(source))


def diff(source1, source2, max_rank=3, label_map="", access_restriction=True):
    """Rank-iterated diff of two versions; `label_map` holds `a -> b` lines."""
    return json.loads(_ecdiff.diff(source1, source2, max_rank, label_map, access_restriction))


def oracle(source, loop_bound=3, rank=1, budget=2_000_000):
    return json.loads(_ecdiff.oracle(source, loop_bound, rank, budget))
