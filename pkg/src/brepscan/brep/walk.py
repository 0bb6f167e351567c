"""Topological walks over the chain complex.

A walk starts on a coedge and composes transitions:

* ``next`` / ``mate``: coedge -> coedge
* ``parent``:          coedge -> loop
* ``owner_face``:      loop   -> face

e.g. the mating face across the edge following ``e`` is reached with the
path ``[next, mate, parent, owner_face]``.
"""

from __future__ import annotations

from collections.abc import Sequence

from ..errors import WalkError
from .types import ChainComplex

STEPS = ("next", "parent", "mate", "owner_face")


def topo_walk(cc: ChainComplex, start_coedge: int, path: Sequence[str]) -> int:
    """Apply a transition sequence starting at a coedge; return the final id."""
    if not 0 <= start_coedge < cc.n_coedges:
        raise WalkError(f"start coedge {start_coedge} out of range")
    kind = "coedge"
    cur = int(start_coedge)
    for step in path:
        if step not in STEPS:
            raise WalkError(f"unknown step {step!r}")
        if step in ("next", "mate", "parent"):
            if kind != "coedge":
                raise WalkError(f"step {step!r} needs a coedge, have a {kind}")
            if step == "next":
                cur = int(cc.next[cur])
            elif step == "mate":
                cur = int(cc.mate[cur])
            else:
                cur = int(cc.parent[cur])
                kind = "loop"
        else:  # owner_face
            if kind != "loop":
                raise WalkError(f"step 'owner_face' needs a loop, have a {kind}")
            cur = cc.loops[cur].owner_face_id
            kind = "face"
    return cur


def mate_loop_id(cc: ChainComplex, coedge_id: int) -> int:
    """Loop owning the mate of a coedge (the loop on the far side)."""
    return topo_walk(cc, coedge_id, ["mate", "parent"])


def mate_face_id(cc: ChainComplex, coedge_id: int) -> int:
    """Face owning the mate of a coedge."""
    return topo_walk(cc, coedge_id, ["mate", "parent", "owner_face"])


def owner_face_of_coedge(cc: ChainComplex, coedge_id: int) -> int:
    return topo_walk(cc, coedge_id, ["parent", "owner_face"])
