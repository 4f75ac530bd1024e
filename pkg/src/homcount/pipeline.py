"""Dataset-level feature pipeline and the pattern-selection advisor.

Feature output is CSV with one row per (graph, vertex): id columns, the vertex
label, then one column per pattern in file order. The log-z normalization
stores per-column statistics in a ``#`` header block so raw counts can be
reconstructed exactly from the file alone.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from homcount.algebra import join_factors, core_of, treewidth
from homcount.counting import hom_count_brute, hom_vector
from homcount.graphs import (
    Graph,
    LabelAlphabet,
    ParseError,
    RootedPattern,
    is_isomorphic,
    parse_graph,
    parse_pattern,
)


def load_dataset(path: str, alphabet: LabelAlphabet) -> list[Graph]:
    """JSON Lines, one graph per line; blank lines ignored; duplicate ids rejected."""
    graphs = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                g = parse_graph(line, alphabet)
            except ParseError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}", field=exc.field) from exc
            if g.id in seen:
                raise ParseError(f"{path}:{lineno}: duplicate graph id {g.id!r}", field="id")
            seen.add(g.id)
            graphs.append(g)
    return graphs


def load_pattern_set(path: str, alphabet: LabelAlphabet) -> list[RootedPattern]:
    """JSON array of pattern records (graph record plus ``root``)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}", field="record") from exc
    if not isinstance(data, list):
        raise ParseError(f"{path}: pattern set must be a JSON array", field="record")
    out = []
    for i, rec in enumerate(data):
        try:
            out.append(parse_pattern(rec, alphabet))
        except ParseError as exc:
            raise ParseError(f"{path}[{i}]: {exc}", field=exc.field) from exc
    return out


@dataclass(frozen=True)
class ColumnTransform:
    """Offset-log then z-score; constant columns emit zeros and are flagged."""

    column: str
    mean: float
    std: float
    constant: bool


@dataclass
class FeatureTable:
    mode: str
    normalize: str
    pattern_ids: tuple[str, ...]
    rows: list[tuple]  # (graph_id, vertex_id, external_label, counts tuple | None)
    transforms: Optional[list[ColumnTransform]] = None
    overflowed_graphs: list[str] = field(default_factory=list)

    @property
    def column_names(self) -> list[str]:
        return [f"{self.mode}_{pid}" for pid in self.pattern_ids]


def _count_rows(args):
    g, patterns, mode = args
    vecs = hom_vector(patterns, g, mode)
    overflow = any(v.overflow for v in vecs)
    rows = []
    for v in range(g.n):
        if overflow:
            rows.append((g.id, v, g.labels[v], None))
        else:
            rows.append(
                (g.id, v, g.labels[v], tuple(vec.counts[v] for vec in vecs))
            )
    return rows, overflow


def _all_count_rows(graphs, patterns, mode, threads):
    jobs = [(g, patterns, mode) for g in graphs]
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads == 1 or len(jobs) <= 1:
        results = [_count_rows(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_count_rows, jobs, chunksize=8))
    rows: list[tuple] = []
    overflowed = []
    for (chunk, overflow), g in zip(results, graphs):
        rows.extend(chunk)
        if overflow:
            overflowed.append(g.id)
    return rows, overflowed


def _column_stats(rows, width):
    """Sample mean/stddev of log1p(count) per column, skipping flagged rows."""
    xs: list[list[float]] = [[] for _ in range(width)]
    for _, _, _, counts in rows:
        if counts is None:
            continue
        for j, c in enumerate(counts):
            xs[j].append(math.log1p(c))
    stats = []
    for vals in xs:
        n = len(vals)
        constant = len(set(vals)) <= 1
        mean = sum(vals) / n if n else 0.0
        if constant or n <= 1:
            stats.append((mean, 0.0, True))
            continue
        var = sum((x - mean) ** 2 for x in vals) / (n - 1)
        stats.append((mean, math.sqrt(var), False))
    return stats


def compute_features(
    graphs: Sequence[Graph],
    patterns: Sequence[RootedPattern],
    mode: str = "hom",
    normalize: str = "none",
    stats_graphs: Optional[Sequence[Graph]] = None,
    threads: int = 1,
) -> FeatureTable:
    """Count features for every (graph, vertex); optional dataset-global log-z.

    ``stats_graphs`` lets normalization statistics come from a different graph
    collection than the one being exported (default: the input itself).
    Overflowing graphs are flagged and skipped, the run continues.
    """
    if mode not in ("hom", "sub"):
        raise ValueError(f"unknown mode {mode!r}")
    if normalize not in ("none", "log-z"):
        raise ValueError(f"unknown normalize {normalize!r}")
    rows, overflowed = _all_count_rows(list(graphs), list(patterns), mode, threads)
    table = FeatureTable(
        mode=mode,
        normalize=normalize,
        pattern_ids=tuple(p.id for p in patterns),
        rows=rows,
        overflowed_graphs=overflowed,
    )
    if normalize == "log-z":
        if stats_graphs is None:
            stat_rows = rows
        else:
            stat_rows, _ = _all_count_rows(list(stats_graphs), list(patterns), mode, threads)
        stats = _column_stats(stat_rows, len(patterns))
        table.transforms = [
            ColumnTransform(name, mean, std, const)
            for name, (mean, std, const) in zip(table.column_names, stats)
        ]
    return table


def write_csv(table: FeatureTable, out: TextIO, alphabet: Optional[LabelAlphabet] = None):
    """RFC-4180-style CSV (LF endings) with a ``#`` header block in front.

    Normalized cells hold z(log(1+c)); the header carries exact float reprs of
    each column's mean/std so counts are reconstructible:
    c = round(exp(z * std + mean) - 1).
    """
    out.write(f"# mode: {table.mode}\n")
    out.write(f"# normalize: {table.normalize}\n")
    if table.transforms is not None:
        out.write("# transform: z(log(1+count)) per column, dataset-global stats\n")
        for t in table.transforms:
            out.write(
                f"# column {t.column}: mean={t.mean!r} std={t.std!r} "
                f"constant={'true' if t.constant else 'false'}\n"
            )
    header = ["graph_id", "vertex_id", "label"] + table.column_names
    out.write(",".join(header) + "\n")
    for gid, v, label, counts in table.rows:
        ext = alphabet.label_of(label) if alphabet is not None else label
        cells = [str(gid), str(v), str(ext)]
        if counts is None:
            cells += ["NA"] * len(table.pattern_ids)
        elif table.transforms is None:
            cells += [str(c) for c in counts]
        else:
            for c, t in zip(counts, table.transforms):
                if t.constant:
                    cells.append("0.0")
                else:
                    cells.append(repr((math.log1p(c) - t.mean) / t.std))
        out.write(",".join(cells) + "\n")


def read_transforms(path_or_lines) -> dict[str, ColumnTransform]:
    """Parse the ``#`` header block back into transforms (for reconstruction)."""
    if isinstance(path_or_lines, str):
        with open(path_or_lines, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    else:
        lines = list(path_or_lines)
    out = {}
    for line in lines:
        if not line.startswith("# column "):
            continue
        body = line[len("# column "):].strip()
        name, rest = body.split(":", 1)
        fields = dict(part.split("=", 1) for part in rest.split())
        out[name] = ColumnTransform(
            name, float(fields["mean"]), float(fields["std"]), fields["constant"] == "true"
        )
    return out


def reconstruct_count(z: float, t: ColumnTransform) -> int:
    """Invert the log-z transform back to the raw integer count."""
    if t.constant:
        raise ValueError("constant columns carry no information")
    return round(math.expm1(z * t.std + t.mean))


# --- pattern-selection advisor ---------------------------------------------------


@dataclass(frozen=True)
class CandidateVerdict:
    candidate_id: str
    verdict: str  # REDUNDANT | GUARANTEED_GAIN | UNKNOWN
    rule: Optional[str]  # treewidth | no-hom (GUARANTEED_GAIN only)
    evidence: dict

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate_id,
            "verdict": self.verdict,
            "rule": self.rule,
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class AdvisorReport:
    verdicts: tuple[CandidateVerdict, ...]
    bound: int  # refinement-dimension bound: max treewidth over kept patterns

    def to_json(self) -> dict:
        return {
            "verdicts": [v.to_json() for v in self.verdicts],
            "dimension_bound": self.bound,
        }


def _rooted_iso(a: RootedPattern, b: RootedPattern) -> bool:
    return is_isomorphic(a.graph, b.graph, g_root=a.root, h_root=b.root)


def advise(
    base: Sequence[RootedPattern], candidates: Sequence[RootedPattern]
) -> AdvisorReport:
    """Classify each candidate against the base set.

    REDUNDANT: the candidate splits at its root into factors already present
    (join factors add no distinguishing power). GUARANTEED_GAIN: with k the
    treewidth of the candidate's core, every base pattern either has treewidth
    below k or admits no homomorphism into the candidate (root-free check).
    Anything else is UNKNOWN. The report ends with the dimension bound: the
    max treewidth over base plus non-redundant candidates.
    """
    base = list(base)
    base_tw = {p.id: treewidth(p.graph)[0] for p in base}
    verdicts = []
    kept_tw = list(base_tw.values()) or [1]
    for q in candidates:
        factors = join_factors(q)
        if len(factors) > 1:
            matches = []
            for f in factors:
                hit = next((p.id for p in base if _rooted_iso(f, p)), None)
                matches.append(hit)
            if all(m is not None for m in matches):
                verdicts.append(
                    CandidateVerdict(
                        q.id,
                        "REDUNDANT",
                        None,
                        {"factors": matches, "factor_sizes": [f.graph.n for f in factors]},
                    )
                )
                continue
        core = core_of(q)
        k = treewidth(core.graph)[0]
        per_base = []
        all_pass = True
        used_no_hom = False
        for p in base:
            tw_ok = base_tw[p.id] < k
            no_hom = False
            if not tw_ok:
                no_hom = hom_count_brute(p.graph, q.graph) == 0
                used_no_hom = used_no_hom or no_hom
            per_base.append(
                {
                    "pattern": p.id,
                    "treewidth": base_tw[p.id],
                    "below_core_width": tw_ok,
                    "no_hom_into_candidate": no_hom,
                }
            )
            if not (tw_ok or no_hom):
                all_pass = False
        evidence = {"core_size": core.graph.n, "core_treewidth": k, "base": per_base}
        if all_pass:
            rule = "no-hom" if used_no_hom else "treewidth"
            verdicts.append(CandidateVerdict(q.id, "GUARANTEED_GAIN", rule, evidence))
        else:
            verdicts.append(CandidateVerdict(q.id, "UNKNOWN", None, evidence))
        kept_tw.append(treewidth(q.graph)[0])
    return AdvisorReport(tuple(verdicts), max(kept_tw))
