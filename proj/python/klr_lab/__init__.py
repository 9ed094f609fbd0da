"""Blow-up graph sampling, canonical counting and lower-regularity checks."""

from ._core import (
    BlowupGraph,
    Pattern,
    adversarial_split,
    census,
    check_block,
    check_graph,
    complete,
    count,
    cycle,
    degrees,
    deletion_set,
    derive_constants,
    glued_identity,
    intersect,
    log_expected_copies,
    log_phi,
    minus_pair,
    multi_exposure,
    new_host,
    partition_exposure,
    path,
    pattern,
    run_config,
    sample,
    two_density,
    unite,
    wilson_interval,
)

__version__ = "0.1.0"
