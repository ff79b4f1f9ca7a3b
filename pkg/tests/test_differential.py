"""Incremental and full installs must leave the receiver in the same state.

Two drivers run from the same seed. They agree on every decision until one
chosen sharing event, where the second one sends a full copy instead of the
incremental payload. The receiver's state right after installation is
compared field by field, and so is everything both runs compute afterwards.
"""

from harness import differential


def test_incremental_install_matches_full_install_on_random_programs():
    result = differential(1000)
    assert result.programs == 1000
    assert result.failures == []
    assert result.incremental_bytes < result.full_bytes
