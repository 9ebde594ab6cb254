"""Regenerate src/nlsg/data/corpus; every graph is a pure function of its recipe."""

from pathlib import Path

from nlsg.basegraph import build_base
from nlsg.construction import path_with_end_loops, search_classical_base
from nlsg.multigraph import complete, cycle, from_edge_list, random_regular, to_text

OUT = Path(__file__).resolve().parents[1] / "src" / "nlsg" / "data" / "corpus"

PETERSEN = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + \
           [(5 + i, 5 + (i + 2) % 5) for i in range(5)]


def recipes():
    yield "triangle", complete(3)
    yield "k4", complete(4)
    yield "cycle5", cycle(5)
    yield "cycle6", cycle(6)
    yield "petersen", from_edge_list(10, PETERSEN)
    yield "double_edge", from_edge_list(2, [(0, 1), (0, 1)])
    yield "path16_loops", path_with_end_loops(16)
    yield "loops7_d3", random_regular(7, 3, 11)
    yield "rr20_d3", random_regular(20, 3, 1, simple=True)
    yield "rr64_d4", random_regular(64, 4, 2, simple=True)
    yield "rr12_d6", random_regular(12, 6, 3)
    yield "base_n10", build_base(10, 0.1, seed=10)[0]
    best = [c for c in search_classical_base(t0=2, degrees=(2,), tries=20, seed=0)][0]
    yield "classical_base_t2", best.graph


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name, G in recipes():
        (OUT / f"{name}.graph").write_text(to_text(G.check()))
        print(f"{name}: n={G.n} d={G.d}")
