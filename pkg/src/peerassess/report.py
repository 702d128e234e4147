"""Report bundles: analysis results as a nested, JSON-ready tree.

A bundle is a plain ``dict`` of lists, dicts, strings and numbers.  Non-finite
floats become ``None`` so the serialized form is strict JSON, and keys are
sorted on output so equal inputs give identical bytes.  The text and
delimited renderings are computed from the bundle alone, which lets
``report`` re-render a bundle written by an earlier ``analyze``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import __version__
from .dataset import Dataset
from .errors import ValidationError
from .io import DATASET_COLUMNS, _record_row, dump_json
from .stats.anova import GamesHowellPair, WelchResult
from .stats.reliability import IccResult, cronbach_alpha, interpret_icc
from .stats.tables import (
    DIFFERENCES,
    RATINGS,
    Descriptive,
    MetricReport,
    accuracy_by_min_count,
    accuracy_final_grade,
    descriptives,
    fairness_by_count,
    grade_difference_table,
    rating_series,
    relationship_bias_report,
)

SELECTORS = ("fairness", "accuracy", "descriptives", "differences", "relationships", "cronbach")
FORMATS = ("text", "json", "csv")


def parse_selectors(which: Iterable[str] | str) -> tuple[str, ...]:
    """Normalise a selector list; ``all`` expands to every selector."""
    if isinstance(which, str):
        which = [w for w in which.replace(",", " ").split() if w]
    chosen = set()
    for w in which:
        if w == "all":
            chosen.update(SELECTORS)
        elif w in SELECTORS:
            chosen.add(w)
        else:
            raise ValidationError(f"unknown analysis {w!r}; choose from {', '.join(SELECTORS + ('all',))}")
    if not chosen:
        raise ValidationError("no analysis selected")
    return tuple(s for s in SELECTORS if s in chosen)


def dataset_digest(ds: Dataset) -> str:
    """sha256 over the canonical flattened export."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DATASET_COLUMNS)
    writer.writerows(_record_row(r) for r in ds.records)
    return hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()


# --- conversion to plain values ------------------------------------------------


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _label(value: Optional[float]) -> Optional[str]:
    try:
        return interpret_icc(value) if value is not None else None
    except ValidationError:
        return None


def _icc(r: IccResult) -> dict:
    return {
        "n": r.n,
        "k": r.k,
        "single": _num(r.single),
        "average": _num(r.average),
        "ci_single": [_num(v) for v in r.ci_single],
        "ci_average": [_num(v) for v in r.ci_average],
        "label_single": _label(_num(r.single)),
        "label_average": _label(_num(r.average)),
        "msb": _num(r.msb),
        "msw": _num(r.msw),
        "f": _num(r.f),
        "p": _num(r.p),
    }


def _descriptive(d: Descriptive) -> dict:
    return {"n": d.n, "mean": _num(d.mean), "sd": _num(d.sd)}


def _welch(w: WelchResult) -> dict:
    return {"f": _num(w.f), "df1": _num(w.df1), "df2": _num(w.df2), "p": _num(w.p)}


def _pair(p: GamesHowellPair) -> dict:
    return {
        "group_a": p.group_a,
        "group_b": p.group_b,
        "mean_diff": _num(p.mean_diff),
        "se": _num(p.se),
        "df": _num(p.df),
        "q": _num(p.q),
        "p": _num(p.p),
        "ci": [_num(v) for v in p.ci],
    }


def _metric(m: Optional[MetricReport]) -> Optional[dict]:
    if m is None:
        return None
    return {
        "groups": {label: _descriptive(d) for label, d in m.groups.items()},
        "max_pairwise_difference": _num(m.max_pairwise_difference()),
        "welch": _welch(m.welch),
        "games_howell": [_pair(p) for p in m.games_howell],
    }


# --- analysis ------------------------------------------------------------------


def run_analysis(
    ds: Dataset,
    which: Iterable[str] | str = "all",
    alpha_level: float = 0.05,
    items: Optional[Sequence[Sequence[float]]] = None,
    *,
    min_count: int = 3,
) -> dict:
    """Run the selected analyses and return a report bundle.

    ``items`` is a respondents x items matrix for Cronbach's alpha.  It is
    required when ``cronbach`` is selected explicitly; under ``all`` the
    section is skipped when no matrix is given.
    """
    explicit = not (which == "all" or (not isinstance(which, str) and list(which) == ["all"]))
    selected = parse_selectors(which)
    if not 0.0 < alpha_level < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha_level}")
    if len(ds) == 0:
        raise ValidationError("dataset contains no completed peer assessments")

    bundle: dict = {
        "meta": {
            "alpha": alpha_level,
            "analyses": list(selected),
            "dataset_digest": dataset_digest(ds),
            "min_count": min_count,
            "posts": len(ds.posts),
            "records": len(ds.records),
            "rounding": ds.rounding,
            "version": __version__,
        }
    }
    if "fairness" in selected:
        bundle["fairness"] = {str(c): _icc(r) for c, r in fairness_by_count(ds, alpha_level).items()}
    if "accuracy" in selected:
        final = accuracy_final_grade(ds, min_count)
        bundle["accuracy"] = {
            "by_min_count": {
                str(m): {"n": r.n, "rs": _num(r.rs), "p": _num(r.p_two_tailed)}
                for m, r in accuracy_by_min_count(ds).items()
            },
            "final_grade": None if final is None else {"n": final.n, "rs": _num(final.rs), "p": _num(final.p_two_tailed)},
        }
    if "descriptives" in selected:
        bundle["descriptives"] = {
            name: _descriptive(d) for name, d in descriptives(ds, min_count).items()
        }
    if "differences" in selected:
        table = grade_difference_table(ds, min_count)
        bundle["differences"] = {
            "counts": {str(r): {str(d): table.counts[r][d] for d in DIFFERENCES} for r in RATINGS},
            "row_totals": {str(r): table.row_total(r) for r in RATINGS},
            "total": table.total,
        }
    if "relationships" in selected:
        rep = relationship_bias_report(ds, alpha_level, min_count)
        bundle["relationships"] = {
            "counts": rep.counts,
            "final_difference": _metric(rep.final_difference),
            "rating_difference": _metric(rep.rating_difference),
        }
    if "cronbach" in selected:
        if items is not None:
            bundle["cronbach"] = {
                "alpha": _num(cronbach_alpha(items)),
                "respondents": len(items),
                "items": len(items[0]) if len(items) else 0,
            }
        elif explicit:
            raise ValidationError("cronbach needs an item matrix (--items)")
        else:
            bundle["meta"]["analyses"].remove("cronbach")
    bundle["series"] = {
        "columns": ["post_id", "professor_rating", "mean_peer_grade", "final_peer_grade"],
        "rows": [[p, r, _num(m), f] for p, r, m, f in rating_series(ds)],
    }
    return bundle


# --- rendering -----------------------------------------------------------------


def _fmt(x, digits=3) -> str:
    if x is None:
        return "NA"
    if isinstance(x, float):
        return f"{x:.{digits}f}"
    return str(x)


def _p(x) -> str:
    if x is None:
        return "NA"
    return "<.001" if x < 0.001 else f"{x:.3f}"


def render_text(bundle: dict) -> str:
    meta = bundle["meta"]
    out = [
        f"peerassess {meta['version']}  records={meta['records']} posts={meta['posts']} alpha={meta['alpha']}",
        f"dataset sha256 {meta['dataset_digest']}",
    ]
    if "fairness" in bundle:
        out += ["", "Reliability by number of assessments (ICC(1))"]
        out.append(f"{'k':>3} {'N':>5} {'single':>8} {'95% CI':>17} {'average':>8} {'95% CI':>17}")
        for c, r in sorted(bundle["fairness"].items(), key=lambda kv: int(kv[0])):
            cs = f"[{_fmt(r['ci_single'][0])}, {_fmt(r['ci_single'][1])}]"
            ca = f"[{_fmt(r['ci_average'][0])}, {_fmt(r['ci_average'][1])}]"
            out.append(f"{c:>3} {r['n']:>5} {_fmt(r['single']):>8} {cs:>17} {_fmt(r['average']):>8} {ca:>17}")
    if "accuracy" in bundle:
        out += ["", "Professor rating vs mean peer grade (Spearman)"]
        out.append(f"{'min':>4} {'N':>5} {'rs':>7} {'p':>7}")
        for m, r in sorted(bundle["accuracy"]["by_min_count"].items(), key=lambda kv: int(kv[0])):
            out.append(f"{m:>4} {r['n']:>5} {_fmt(r['rs']):>7} {_p(r['p']):>7}")
        final = bundle["accuracy"]["final_grade"]
        if final:
            out.append(f"final peer grade: N={final['n']} rs={_fmt(final['rs'])} p={_p(final['p'])}")
    if "descriptives" in bundle:
        out += ["", "Descriptive statistics"]
        for name, d in bundle["descriptives"].items():
            out.append(f"{name:<18} N={d['n']:<5} mean={_fmt(d['mean'])} sd={_fmt(d['sd'])}")
    if "differences" in bundle:
        diffs = [str(d) for d in DIFFERENCES]
        out += ["", "Final peer grade minus professor rating"]
        out.append("rating " + " ".join(f"{d:>5}" for d in diffs) + "  total")
        table = bundle["differences"]
        for r, row in table["counts"].items():
            out.append(f"{r:>6} " + " ".join(f"{row[d]:>5}" for d in diffs) + f"  {table['row_totals'][r]:>5}")
    if "relationships" in bundle:
        rel = bundle["relationships"]
        out += ["", "Grade deviation by relationship", "counts: " + ", ".join(f"{k}={v}" for k, v in rel["counts"].items())]
        for name in ("final_difference", "rating_difference"):
            m = rel[name]
            if m is None:
                continue
            w = m["welch"]
            out.append(f"{name}: Welch F({_fmt(w['df1'], 0)}, {_fmt(w['df2'], 1)}) = {_fmt(w['f'])}, p {_p(w['p'])}")
            for label, d in m["groups"].items():
                out.append(f"  {label:<8} N={d['n']:<5} mean={_fmt(d['mean'])} sd={_fmt(d['sd'])}")
            for pr in m["games_howell"]:
                out.append(
                    f"  {pr['group_b']} - {pr['group_a']}: {_fmt(pr['mean_diff'])} "
                    f"[{_fmt(pr['ci'][0])}, {_fmt(pr['ci'][1])}] p {_p(pr['p'])}"
                )
    if "cronbach" in bundle:
        c = bundle["cronbach"]
        out += ["", f"Cronbach's alpha = {_fmt(c['alpha'])} ({c['respondents']} respondents, {c['items']} items)"]
    return "\n".join(out) + "\n"


def _long_rows(node, path=()):
    if isinstance(node, dict):
        for key in sorted(node):
            yield from _long_rows(node[key], path + (str(key),))
    elif isinstance(node, list) and any(isinstance(v, (dict, list)) for v in node):
        for i, v in enumerate(node):
            yield from _long_rows(v, path + (str(i),))
    elif isinstance(node, list):
        for i, v in enumerate(node):
            yield path + (str(i),), v
    else:
        yield path, node


def render_csv(bundle: dict) -> str:
    """Long format: one ``section,path,value`` row per leaf (series excluded)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("section", "path", "value"))
    for path, value in _long_rows({k: v for k, v in bundle.items() if k != "series"}):
        writer.writerow((path[0], ".".join(path[1:]), "" if value is None else value))
    return buf.getvalue()


def render_series_csv(bundle: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(bundle["series"]["columns"])
    writer.writerows(["" if v is None else v for v in row] for row in bundle["series"]["rows"])
    return buf.getvalue()


def render(bundle: dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(bundle)
    if fmt == "text":
        return render_text(bundle)
    if fmt == "csv":
        return render_csv(bundle)
    raise ValidationError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def write_bundle(bundle: dict, directory) -> dict[str, Path]:
    """Write ``bundle.json``, ``report.txt``, ``report.csv`` and ``rating_series.csv``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = {
        "bundle.json": render(bundle, "json"),
        "report.txt": render_text(bundle),
        "report.csv": render_csv(bundle),
        "rating_series.csv": render_series_csv(bundle),
    }
    out = {}
    for name, text in files.items():
        path = d / name
        path.write_text(text, encoding="utf-8")
        out[name] = path
    return out
