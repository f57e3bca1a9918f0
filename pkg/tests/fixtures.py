"""Shared test presentations.

Each fixture is DSL source; graph() parses and caches. The names describe
the shape of the presentation, and the comments say what each one exercises.
"""

import random
from functools import lru_cache

from ugk.dsl import parse_ultragraph

# Two hub edges with cofinite ranges feeding an infinite descending family:
# en[k] loops at vertex k+3 and steps back to k+1. One minimal infinite
# emitter (everything from 3 up), no infinite-emitter vertices, out-degree 1
# everywhere.
COFINITE_HUBS = """
universe ap(1,1)
edge e1 : src 1 -> { all \\ {0,2} }
edge e2 : src 2 -> { all \\ {0,1} }
family en(n) for n in all : src 1*n+3 -> { 1*n+1, 1*n+3 }
"""

# Three vertices, every vertex reaches every vertex through one edge.
# Rich finite fixture: no minimal infinite emitters, all conditions hold.
TRIANGLE = """
universe {0,1,2}
edge a : src 0 -> { {0,1,2} }
edge b : src 1 -> { {0,1,2} }
edge c : src 2 -> { {0,1,2} }
"""

# Infinitely many parallel edges 1 -> {2} plus a return edge. The minimal
# infinite emitter is the singleton {1} (an infinite-emitter vertex).
BUNDLE = """
universe {1,2}
family f(n) for n in all : src 1 -> { 2 }
edge g : src 2 -> { {1,2} }
"""

# One self-loop and nothing else: the loop has no exit, its periodic point
# is isolated and the vertex is V1-degenerate.
LOOP_NO_EXIT = """
universe {0}
edge a : src 0 -> { {0} }
"""

# Same loop with an escape hatch through a second vertex and back.
LOOP_WITH_EXIT = """
universe {0,1}
edge a : src 0 -> { {0} }
edge b : src 0 -> { {1} }
edge c : src 1 -> { {0} }
"""

# Infinite bundle emitted by a vertex nothing points at: the singleton
# emitter consists of sources only (IE1).
SOURCE_BUNDLE = """
universe {0,1}
family f(n) for n in all : src 0 -> { 1 }
edge g : src 1 -> { {1} }
"""

# Infinite bundle whose emitter vertex receives exactly one edge, fed from
# a source (IE2).
FED_BUNDLE = """
universe {0,1,2}
edge e : src 0 -> { {1} }
family f(n) for n in all : src 1 -> { 2 }
edge g : src 2 -> { {2} }
"""

# A self-loop whose vertex also receives one edge from a source (V2).
FED_LOOP = """
universe {0,1}
edge e : src 1 -> { {1} }
edge f : src 0 -> { {1} }
"""

# Two vertices exchanging their only edges (V3).
TWO_SWAP = """
universe {0,1}
edge e : src 0 -> { {1} }
edge f : src 1 -> { {0} }
"""

# Two overlapping simple loops based at one vertex (e1 and e1e2 share their
# first edge); third vertex patched with a return edge to avoid a sink.
OVERLAP_LOOPS = """
universe {1,2,3}
edge e1 : src 1 -> { {1,2} }
edge e2 : src 2 -> { {1,3} }
edge e3 : src 3 -> { {1} }
"""

# Range decomposition failure: r(e1) is the even numbers but the only
# minimal infinite emitter is the multiples of four, leaving an infinite
# remainder.
BAD_DECOMP = """
universe all
family sw(n) for n in all : src n -> { 0 }
edge e1 : src 0 -> { ap(0,2) }
edge e2 : src 0 -> { ap(0,4) }
"""

# Deterministic strictly ascending chain: a unique forward path from every
# vertex, so everything wanders and no two paths ever converge.
RAY = """
universe all
family r(n) for n in all : src n -> { 1*n+1 }
"""

# Ascending like RAY but with a step and a jump out of every vertex, so the
# walk still wanders while paths can branch apart and meet again.
RAILS = """
universe all
family up(n) for n in all : src n -> { 1*n+1 }
family hop(n) for n in all : src n -> { 1*n+2 }
"""

# Finite descent on 0..30: each vertex steps down one and can skip down two,
# with a pair of loops parked at 0 and another pair at 5.  Small enough that
# loop searches exhaust at moderate bounds.
SLALOM = """
universe all \ ap(31,1)
family dn(n) for n in all \ ap(30,1) : src 1*n+1 -> { 1*n }
family dd(n) for n in all \ ap(29,1) : src 1*n+2 -> { 1*n }
edge a : src 0 -> { 0 }
edge b : src 0 -> { 0 }
edge c : src 5 -> { 5 }
edge d : src 5 -> { 5 }
"""

DEGENERATE = {
    "IE1": SOURCE_BUNDLE,
    "IE2": FED_BUNDLE,
    "V1": LOOP_NO_EXIT,
    "V2": FED_LOOP,
    "V3": TWO_SWAP,
}

# fixtures satisfying (K), (W) and (infinity), used by the witness tests
RICH = {
    "cofinite_hubs": COFINITE_HUBS,
    "triangle": TRIANGLE,
    "bundle": BUNDLE,
}

ALL = dict(RICH,
           loop_no_exit=LOOP_NO_EXIT,
           loop_with_exit=LOOP_WITH_EXIT,
           source_bundle=SOURCE_BUNDLE,
           fed_bundle=FED_BUNDLE,
           fed_loop=FED_LOOP,
           two_swap=TWO_SWAP,
           overlap_loops=OVERLAP_LOOPS,
           ray=RAY,
           rails=RAILS)


@lru_cache(maxsize=None)
def graph(source: str):
    return parse_ultragraph(source)


def random_presentation(seed: int) -> str:
    """A small random presentation over universe `all`, never with sinks
    (a sweep family gives every vertex one outgoing edge)."""
    rng = random.Random(seed)
    lines = ["universe all",
             f"family sw(n) for n in all : src n -> {{ {rng.randrange(3)} }}"]
    for i in range(rng.randint(1, 3)):
        kind = rng.choice(["edge", "family", "family"])
        if kind == "edge":
            src = rng.randrange(6)
            lines.append(f"edge s{i} : src {src} -> {{ {_random_epset(rng)} }}")
        else:
            dom = rng.choice(["all", f"ap({rng.randrange(4)},{rng.randint(1, 3)})",
                              "{0,1,2}"])
            coef = rng.randint(0, 2)
            src = f"{coef}*n+{rng.randrange(4)}" if coef else str(rng.randrange(4))
            items = []
            for _ in range(rng.randint(1, 2)):
                c = rng.randint(0, 2)
                items.append(f"{c}*n+{rng.randrange(6)}" if c else str(rng.randrange(6)))
            if rng.random() < 0.5:
                items.append(_random_epset(rng))
            lines.append(f"family f{i}(n) for n in {dom} : "
                         f"src {src} -> {{ {', '.join(items)} }}")
    return "\n".join(lines) + "\n"


def _random_epset(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.4:
        return f"ap({rng.randrange(4)},{rng.randint(1, 3)})"
    if roll < 0.7:
        members = sorted(rng.sample(range(8), rng.randint(1, 3)))
        return "{" + ",".join(map(str, members)) + "}"
    drop = sorted(rng.sample(range(6), rng.randint(1, 2)))
    return "all \\ {" + ",".join(map(str, drop)) + "}"
