# Copyright 2026 The benchkit Authors.
# SPDX-License-Identifier: Apache-2.0
"""Python access to the benchkit core.

Structured arguments and results are plain dicts and lists; the extension
exchanges them as JSON text.
"""

import json

from . import _benchkit
from ._benchkit import (
    BenchkitError,
    Catalog,
    DuplicateVoteError,
    InsufficientPoolError,
    UnknownTaskError,
    ValidationError,
    __version__,
    load_catalog,
    normalized_entropy,
    overall_score,
    percentages_one_decimal,
    render_stats,
    synthetic_catalog,
)

__all__ = [
    "BenchkitError",
    "Catalog",
    "DuplicateVoteError",
    "InsufficientPoolError",
    "UnknownTaskError",
    "ValidationError",
    "__version__",
    "aggregate_gsb",
    "build_gsb_tasks",
    "build_prompt",
    "catalog_stats",
    "compose_pairs",
    "default_taxonomy",
    "evaluate_benchmark",
    "load_catalog",
    "normalized_entropy",
    "overall_score",
    "percentages_one_decimal",
    "rater_payload",
    "render_leaderboard",
    "render_stats",
    "run_generation",
    "summarize_evaluations",
    "synthetic_catalog",
    "validate_pair",
]


def default_taxonomy():
    return json.loads(_benchkit.default_taxonomy())


def catalog_stats(catalog):
    return json.loads(_benchkit.catalog_stats(catalog))


def compose_pairs(catalog, config):
    return json.loads(_benchkit.compose_pairs(catalog, json.dumps(config)))


def validate_pair(pair, catalog):
    return json.loads(_benchkit.validate_pair(json.dumps(pair), catalog))


def build_prompt(pair, catalog):
    return _benchkit.build_prompt(json.dumps(pair), catalog)


def run_generation(pairs, catalog, system_id, generator_spec):
    """Runs a generator adapter ("mock:<fixture>" or URL) over `pairs`."""
    return json.loads(
        _benchkit.run_generation(json.dumps(pairs), catalog, system_id, generator_spec))


def evaluate_benchmark(pairs, results, system_id, catalog, judge_spec="synthetic"):
    return json.loads(
        _benchkit.evaluate_benchmark(
            json.dumps(pairs), json.dumps(results), system_id, catalog, judge_spec))


def summarize_evaluations(samples, system_id, split="all"):
    return json.loads(_benchkit.summarize_evaluations(json.dumps(samples), system_id, split))


def render_leaderboard(samples, split="single"):
    return _benchkit.render_leaderboard(json.dumps(samples), split)


def build_gsb_tasks(pairs, results, system_a, system_b, catalog, seed=0):
    return json.loads(
        _benchkit.build_gsb_tasks(
            json.dumps(pairs), json.dumps(results), system_a, system_b, catalog, seed))


def rater_payload(task):
    return json.loads(_benchkit.rater_payload(json.dumps(task)))


def aggregate_gsb(votes, tasks, reference):
    return json.loads(_benchkit.aggregate_gsb(json.dumps(votes), json.dumps(tasks), reference))
