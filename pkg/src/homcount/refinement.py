"""Color-refinement engines: plain 1-round-based refinement, the hom-count
augmented variant, and folklore k-dimensional refinement for k in {1,2,3}.

Two graphs are always refined jointly through one shared hash dictionary, so
color ids are comparable across them. The dictionary maps each distinct
(previous color, sorted neighbor-color multiset) to a fresh dense id, which
makes hashing exact and collision-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from homcount.algebra import SizeGuardError
from homcount.counting import hom_count_dp
from homcount.graphs import Graph, RootedPattern

KWL_TUPLE_GUARD = 10_000_000


@dataclass(frozen=True)
class Coloring:
    """Per-round vertex colors for one graph of a jointly refined pair.

    ``history[d][v]`` is the color of v after round d (round 0 = initial).
    Ids are dense and shared with the partner coloring.
    """

    graph_id: str
    history: tuple[tuple[int, ...], ...]
    stable: bool

    @property
    def rounds(self) -> int:
        return len(self.history) - 1

    def colors_at(self, d: int) -> tuple[int, ...]:
        """Colors after round d; rounds past stabilization return the last."""
        return self.history[min(d, len(self.history) - 1)]

    @property
    def final(self) -> tuple[int, ...]:
        return self.history[-1]

    def partition_at(self, d: int) -> dict[int, list[int]]:
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors_at(d)):
            cells.setdefault(c, []).append(v)
        return cells


@dataclass(frozen=True)
class Verdict:
    """Graph-level distinguishability outcome; ``at_round`` present iff distinguished."""

    distinguished: bool
    at_round: Optional[int]
    witness: str = ""

    def __post_init__(self):
        assert (self.at_round is not None) == self.distinguished

    def to_json(self, pair: Optional[tuple[str, str]] = None) -> dict:
        out: dict = {}
        if pair is not None:
            out["pair"] = list(pair)
        out["distinguished"] = self.distinguished
        out["round"] = self.at_round
        return out


def _joint_refine(
    g: Graph,
    h: Graph,
    init_g: Sequence,
    init_h: Sequence,
    max_rounds: Optional[int],
) -> tuple[Coloring, Coloring]:
    """Shared-dictionary refinement of both graphs until joint stability."""
    if max_rounds is None:
        max_rounds = g.n + h.n
    table: dict = {}

    def dense(key):
        got = table.get(key)
        if got is None:
            got = len(table)
            table[key] = got
        return got

    cg = [dense(("init", x)) for x in init_g]
    ch = [dense(("init", x)) for x in init_h]
    hist_g = [tuple(cg)]
    hist_h = [tuple(ch)]
    stable = False
    for _ in range(max_rounds):
        n_colors = len(set(cg) | set(ch))
        sig_g = [
            (cg[v], tuple(sorted(cg[u] for u in g.adjacency[v]))) for v in range(g.n)
        ]
        sig_h = [
            (ch[v], tuple(sorted(ch[u] for u in h.adjacency[v]))) for v in range(h.n)
        ]
        cg = [dense(s) for s in sig_g]
        ch = [dense(s) for s in sig_h]
        hist_g.append(tuple(cg))
        hist_h.append(tuple(ch))
        if len(set(cg) | set(ch)) == n_colors:
            stable = True
            break
    return (
        Coloring(g.id, tuple(hist_g), stable),
        Coloring(h.id, tuple(hist_h), stable),
    )


def graph_verdict(a: Coloring, b: Coloring) -> Verdict:
    """Compare per-round color multisets; distinguished at the first differing round."""
    rounds = max(len(a.history), len(b.history))
    for d in range(rounds):
        ma = sorted(a.colors_at(d))
        mb = sorted(b.colors_at(d))
        if ma != mb:
            only = set(ma) ^ set(mb)
            wit = f"color multisets differ at round {d}"
            if only:
                wit += f" (e.g. color {min(only)} unmatched)"
            return Verdict(True, d, wit)
    return Verdict(False, None)


def vertices_equivalent(a: Coloring, b: Coloring, v: int, w: int, d: int = -1) -> bool:
    """Vertex-pair verdict under the shared dictionary (d=-1: final colors)."""
    if d < 0:
        return a.final[v] == b.final[w]
    return a.colors_at(d)[v] == b.colors_at(d)[w]


def wl_refine(
    g: Graph,
    h: Graph,
    init_g: Optional[Sequence] = None,
    init_h: Optional[Sequence] = None,
    max_rounds: Optional[int] = None,
) -> tuple[Coloring, Coloring]:
    """Joint 1-dimensional refinement from the given (default: label) initial colors.

    Stops at joint stability: a round that identifies no new vertex pair.
    """
    if init_g is None:
        init_g = g.labels
    if init_h is None:
        init_h = h.labels
    if len(init_g) != g.n or len(init_h) != h.n:
        raise ValueError("initial labels must cover all vertices")
    return _joint_refine(g, h, init_g, init_h, max_rounds)


def f_wl(
    g: Graph,
    h: Graph,
    patterns: Sequence[RootedPattern],
    max_rounds: Optional[int] = None,
) -> tuple[Coloring, Coloring, Verdict]:
    """Refinement whose initial colors carry the label plus one rooted hom count
    per pattern. An empty pattern set reproduces :func:`wl_refine` exactly."""
    init_g = _hom_init(g, patterns)
    init_h = _hom_init(h, patterns)
    a, b = _joint_refine(g, h, init_g, init_h, max_rounds)
    return a, b, graph_verdict(a, b)


def _hom_init(g: Graph, patterns: Sequence[RootedPattern]) -> list:
    vectors = [hom_count_dp(p, g).counts for p in patterns]
    return [
        (g.labels[v],) + tuple(vec[v] for vec in vectors)  # type: ignore[index]
        for v in range(g.n)
    ]


# --- folklore k-WL -----------------------------------------------------------


@dataclass(frozen=True)
class TupleColoring:
    """Per-round colors over all k-tuples of one graph's vertices.

    ``history[d]`` maps each tuple to its color after round d; round 0 encodes
    isomorphism types, so tuples share an initial color iff the map between
    them is a partial isomorphism.
    """

    graph_id: str
    k: int
    history: tuple[dict[tuple[int, ...], int], ...]

    @property
    def rounds(self) -> int:
        return len(self.history) - 1

    @property
    def final(self) -> dict[tuple[int, ...], int]:
        return self.history[-1]


def _isotp(g: Graph, tup: tuple[int, ...]):
    """Isomorphism type of a tuple: labels plus equality and adjacency patterns."""
    k = len(tup)
    labels = tuple(g.labels[v] for v in tup)
    eq = tuple(tup[i] == tup[j] for i in range(k) for j in range(i + 1, k))
    adj = tuple(
        (g.adj_masks[tup[i]] >> tup[j]) & 1 for i in range(k) for j in range(i + 1, k)
    )
    return labels, eq, adj


def k_wl_trace(
    g: Graph, h: Graph, k: int, max_rounds: Optional[int] = None
) -> tuple[TupleColoring, TupleColoring, Verdict]:
    """Folklore k-dimensional refinement of the pair with full round history.

    Update: a tuple's new color hashes its old color with the multiset, over
    all vertices w, of the position-wise substituted tuple colors (positions
    k, k-1, ..., 1), prefixed for k=1 by the isomorphism type of (v, w).
    """
    if k not in (1, 2, 3):
        raise SizeGuardError(f"k must be 1, 2 or 3, got {k}")
    if g.n**k > KWL_TUPLE_GUARD or h.n**k > KWL_TUPLE_GUARD:
        raise SizeGuardError(f"n^k exceeds {KWL_TUPLE_GUARD} tuples")

    table: dict = {}

    def dense(key):
        got = table.get(key)
        if got is None:
            got = len(table)
            table[key] = got
        return got

    tuples_g = list(product(range(g.n), repeat=k))
    tuples_h = list(product(range(h.n), repeat=k))
    cg = {t: dense(("isotp", _isotp(g, t))) for t in tuples_g}
    ch = {t: dense(("isotp", _isotp(h, t))) for t in tuples_h}
    hist_g = [dict(cg)]
    hist_h = [dict(ch)]

    def multisets(grf: Graph, tuples, colors):
        out = {}
        verts = range(grf.n)
        for t in tuples:
            entries = []
            for w in verts:
                subst = tuple(
                    colors[t[:pos] + (w,) + t[pos + 1:]] for pos in range(k - 1, -1, -1)
                )
                if k == 1:
                    entries.append((dense(("pairtp", _isotp(grf, (t[0], w)))),) + subst)
                else:
                    entries.append(subst)
            out[t] = (colors[t], tuple(sorted(entries)))
        return out

    if max_rounds is None:
        max_rounds = len(tuples_g) + len(tuples_h)

    verdict = None
    ma, mb = sorted(cg.values()), sorted(ch.values())
    if ma != mb:
        verdict = Verdict(True, 0, "tuple isomorphism-type multisets differ")
    rounds_run = 0
    while verdict is None and rounds_run < max_rounds:
        n_colors = len(set(cg.values()) | set(ch.values()))
        sigs_g = multisets(g, tuples_g, cg)
        sigs_h = multisets(h, tuples_h, ch)
        cg = {t: dense(s) for t, s in sigs_g.items()}
        ch = {t: dense(s) for t, s in sigs_h.items()}
        hist_g.append(dict(cg))
        hist_h.append(dict(ch))
        rounds_run += 1
        ma, mb = sorted(cg.values()), sorted(ch.values())
        if ma != mb:
            verdict = Verdict(True, rounds_run,
                              f"tuple color multisets differ at round {rounds_run}")
        elif len(set(cg.values()) | set(ch.values())) == n_colors:
            break
    if verdict is None:
        verdict = Verdict(False, None)
    return (
        TupleColoring(g.id, k, tuple(hist_g)),
        TupleColoring(h.id, k, tuple(hist_h)),
        verdict,
    )


def k_wl(g: Graph, h: Graph, k: int, max_rounds: Optional[int] = None) -> Verdict:
    """Folklore k-dimensional refinement verdict for the pair (k in {1,2,3})."""
    return k_wl_trace(g, h, k, max_rounds)[2]


def distinguishability_matrix(
    graphs: Sequence[Graph], patterns: Sequence[RootedPattern]
) -> dict[tuple[str, str], Verdict]:
    """All-pairs hom-augmented refinement verdicts; each pair gets a fresh
    shared dictionary, so results are order-independent."""
    out: dict[tuple[str, str], Verdict] = {}
    for i, a in enumerate(graphs):
        for b in graphs[i:]:
            if a.id == b.id and a is b:
                verdict = Verdict(False, None)
            else:
                _, _, verdict = f_wl(a, b, patterns)
            out[(a.id, b.id)] = verdict
            out[(b.id, a.id)] = verdict
    return out
