"""Python interface to the bcore matching/aspiration library.

Instances and state snapshots cross the boundary as JSON strings in the
same formats the `bcore` command line tool reads and writes.
"""

from ._bcore import (
    BcoreError,
    certify,
    generate,
    instance_digest,
    nodes_core,
    oracle_value,
    simulate,
    solve,
)

__all__ = [
    "BcoreError",
    "certify",
    "generate",
    "instance_digest",
    "nodes_core",
    "oracle_value",
    "simulate",
    "solve",
]
