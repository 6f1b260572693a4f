"""Per-case packing reports, reference tables and the discrepancy ledger."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from importlib import resources

import numpy as np

from . import horoball as hb
from . import inball as ib
from .coxeter import CATALOG, REFERENCE_FRAMES, OrthoschemeSpec, RealizedOrthoscheme, parse_symbol, realize
from .volume import ZETA3, VolumeResult, mc_volume, vol_truncated_orthoscheme

SCHEMA_VERSION = 1
EXACT_RTOL = 1e-9

TABLE_COLUMNS = {
    2: ("volume",),
    3: ("inradius", "ball_volume", "volume", "ball_density"),
    4: ("inradius", "ball_volume", "volume", "ball_density"),
    5: ("inradius", "ball_volume", "volume", "ball_density"),
    6: ("piece_volume", "volume", "horoball_density"),
    7: ("piece_volume", "volume", "horoball_density"),
    8: ("pair_piece_volume", "volume", "pair_density"),
    9: ("piece_volume", "volume", "horoball_density"),
    10: ("pair_piece_volume", "volume", "pair_density"),
}


# ------------------------------------------------------------ reference data


def evaluate(expr: str) -> float:
    """Numeric value of a transcribed closed form such as ``"sqrt(2)/48"``."""
    names = {"pi": math.pi, "sqrt": math.sqrt, "zeta3": ZETA3}
    return float(eval(expr, {"__builtins__": {}}, names))


def _unit(decimal_text: str) -> float:
    """One unit in the last printed place."""
    return float(Decimal(1).scaleb(Decimal(decimal_text).as_tuple().exponent))


@functools.lru_cache(maxsize=None)
def load_published() -> dict:
    with resources.files("horopack").joinpath("data/published_values.json").open(encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema_version") != 1:
        raise ValueError("unsupported reference data version")
    return data


def published_entries(table: int | None = None, symbol: str | None = None) -> list[dict]:
    out = []
    for e in load_published()["entries"]:
        if table is not None and e["table"] != table:
            continue
        if symbol is not None and e["symbol"] != symbol:
            continue
        out.append(e)
    return out


def _matches(value: float, exact: str | None, decimal: str | None) -> bool:
    if exact is not None:
        target = evaluate(exact)
        return abs(value - target) <= EXACT_RTOL * max(abs(target), 1e-3)
    return abs(value - float(decimal)) <= _unit(decimal) * (1 + 1e-9)


@dataclass(frozen=True)
class Comparison:
    """A computed value set against a printed reference value."""

    id: str
    computed: float
    printed_text: str
    printed: float
    adopted: float
    delta: float
    flagged: bool
    within_adopted: bool
    status: str | None
    reason: str | None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "printed": self.printed_text,
            "computed": _fmt(self.computed),
            "adopted": _fmt(self.adopted),
            "delta": _fmt(self.delta),
            "status": self.status,
            "reason": self.reason,
        }


def compare(entry: dict, computed: float) -> Comparison:
    exact, decimal = entry["exact"], entry["decimal"]
    ok = True
    if exact is not None:
        ok &= _matches(computed, exact, None)
    if decimal is not None:
        ok &= _matches(computed, None, decimal)
    printed = evaluate(exact) if exact is not None else float(decimal)
    text = " ~ ".join(t for t in (exact, decimal) if t is not None)

    adj = entry.get("adjudication")
    if adj:
        a_exact, a_dec = adj.get("adopted_exact"), adj.get("adopted_decimal")
        adopted = evaluate(a_exact) if a_exact else float(a_dec)
        within = _matches(computed, a_exact, a_dec)
    else:
        adopted, within = printed, ok
    return Comparison(
        entry["id"],
        computed,
        text,
        printed,
        adopted,
        abs(computed - printed),
        not ok,
        within,
        adj["status"] if adj else None,
        adj["reason"] if adj else None,
    )


# ------------------------------------------------------------ computations


@dataclass
class CaseResult:
    spec: OrthoschemeSpec
    orth: RealizedOrthoscheme
    volume: VolumeResult
    inball: ib.InballResult
    ball_volume: float
    ball_density: float
    horoballs: dict[int, hb.Horoball]
    pieces: dict[int, float]
    densities: dict[int, float]
    pair: hb.TwoHoroballResult | None
    reference_pair: hb.TwoHoroballResult | None = None
    reference_horoballs: dict[int, hb.Horoball] = field(default_factory=dict)

    @property
    def best_horoball_density(self) -> float:
        vals = list(self.densities.values())
        if self.pair is not None:
            vals.append(self.pair.density)
        return max(vals)


def _pair(orth: RealizedOrthoscheme, volume: float) -> hb.TwoHoroballResult | None:
    ideal = orth.ideal_indices
    if len(ideal) < 2:
        return None
    # the edge is parameterized from the higher-index vertex
    return hb.optimize_two_horoballs(orth, ideal[-1], ideal[0], volume=volume)


@functools.lru_cache(maxsize=None)
def compute_case(spec: OrthoschemeSpec) -> CaseResult:
    orth = realize(spec)
    vol = vol_truncated_orthoscheme(spec)
    ball = ib.inball_truncated(orth)
    bvol = ib.ball_volume(ball.radius, spec.dim)
    horoballs = {c: hb.max_admissible_horoball(orth, c) for c in orth.ideal_indices}
    pieces = {c: hb.horoball_piece_volume(orth, h) for c, h in horoballs.items()}
    case = CaseResult(
        spec,
        orth,
        vol,
        ball,
        bvol,
        bvol / vol.value,
        horoballs,
        pieces,
        {c: p / vol.value for c, p in pieces.items()},
        _pair(orth, vol.value),
    )
    if spec in REFERENCE_FRAMES:
        ref = realize(spec, frame="reference")
        case.reference_pair = _pair(ref, vol.value)
        case.reference_horoballs = {c: hb.max_admissible_horoball(ref, c) for c in ref.ideal_indices}
    return case


def computed_value(case: CaseResult, quantity: str, center: int | None = None) -> float:
    """Look up the computed counterpart of a reference quantity.

    Horoball parameters and tangency positions depend on the coordinate
    frame; they are taken in the stored reference frame when one exists.
    """
    if quantity == "volume":
        return case.volume.value
    if quantity == "inradius":
        return case.inball.radius
    if quantity == "ball_volume":
        return case.ball_volume
    if quantity == "ball_density":
        return case.ball_density
    if quantity == "piece_volume":
        return case.pieces[center]
    if quantity == "horoball_density":
        return case.densities[center]
    if quantity == "pair_piece_volume":
        return case.pair.total_piece_volume
    if quantity == "pair_density":
        return case.pair.density
    if quantity == "s":
        balls = case.reference_horoballs or case.horoballs
        return balls[center].s
    if quantity == "tangency_t":
        pair = case.reference_pair or case.pair
        return pair.t_first
    raise KeyError(quantity)


def _entry_value(entry: dict) -> float:
    if entry["quantity"] == "piece_volume_5d":
        from .volume import DoublyAsymptoticOrthoscheme5, vol5_doubly_asymptotic

        weights = tuple(int(w) for w in entry["symbol"].strip("{}").split(","))
        return vol5_doubly_asymptotic(DoublyAsymptoticOrthoscheme5.from_symbol(weights))
    return computed_value(compute_case(parse_symbol(entry["symbol"])), entry["quantity"], entry["center"])


def all_comparisons() -> list[Comparison]:
    return [compare(e, _entry_value(e)) for e in load_published()["entries"]]


def discrepancies() -> list[Comparison]:
    """Reference entries whose printed value disagrees with the computation."""
    return [c for c in all_comparisons() if c.flagged]


def argmax_claims() -> list[dict]:
    """Check which catalog symbol is densest per dimension and packing kind."""
    out = []
    for claim in load_published()["claims"]:
        specs = [s for s in CATALOG if s.dim == claim["dim"]]
        cases = [compute_case(s) for s in specs]
        if claim["kind"] == "ball":
            score = [c.ball_density for c in cases]
        else:
            score = [c.best_horoball_density for c in cases]
        k = int(np.argmax(score))
        out.append(
            {
                "kind": claim["kind"],
                "dim": claim["dim"],
                "claimed": claim["symbol"],
                "claimed_density": claim["density"],
                "computed": specs[k].symbol,
                "computed_density": float(score[k]),
                "holds": specs[k].symbol == claim["symbol"],
            }
        )
    return out


# ----------------------------------------------------------------- reports


def _fmt(x):
    """Round floats to 12 significant digits for serialization."""
    if isinstance(x, (float, np.floating)):
        return float(f"{float(x):.12g}")
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_fmt(v) for v in x]
    return x


def _quantity(computed: float, comparison: Comparison | None = None) -> dict:
    q = {"computed": _fmt(computed)}
    if comparison is not None:
        q["published"] = _fmt(comparison.printed)
        q["published_text"] = comparison.printed_text
        q["delta"] = _fmt(comparison.delta)
        q["source"] = comparison.id
    return q


@dataclass
class PackingReport:
    symbol: str
    data: dict
    comparisons: list[Comparison]

    @property
    def golden_failures(self) -> list[Comparison]:
        return [c for c in self.comparisons if not c.within_adopted]

    @property
    def passed(self) -> bool:
        return not self.golden_failures

    def to_dict(self) -> dict:
        return self.data


def run_case(symbol, strict: bool = True, samples: int = 0, seed: int = 0) -> PackingReport:
    """Full packing report for one symbol.

    Every numeric field is a mapping with the computed value and, where a
    printed reference exists, the printed value and their difference.
    """
    spec = parse_symbol(symbol, strict=strict)
    case = compute_case(spec)
    comps = {}
    for e in published_entries(symbol=spec.symbol):
        key = (e["quantity"], e["center"])
        comps.setdefault(key, []).append(compare(e, computed_value(case, e["quantity"], e["center"])))

    def q(value, quantity, center=None):
        # the first reference listing the quantity supplies the printed value
        found = comps.get((quantity, center))
        return _quantity(value, found[0] if found else None)

    orth = case.orth
    data = {
        "schema_version": SCHEMA_VERSION,
        "symbol": spec.symbol,
        "dim": spec.dim,
        "frame": orth.frame,
        "vertex_classes": list(orth.vertex_class),
        "volume": {"method": case.volume.method, "exact": case.volume.exact, "value": q(case.volume.value, "volume")},
        "inball": {
            "type": case.inball.type,
            "touched_faces": list(case.inball.touched_faces),
            "center": _fmt(case.inball.center),
            "criterion": _fmt(case.inball.criterion),
            "radius": q(case.inball.radius, "inradius"),
            "volume": q(case.ball_volume, "ball_volume"),
            "density": q(case.ball_density, "ball_density"),
        },
        "horoballs": [
            {
                "center": c,
                "tangent_facet": h.tangent_facet,
                "s": q(h.s, "s", c) if not case.reference_horoballs else _quantity(h.s),
                "piece_volume": q(case.pieces[c], "piece_volume", c),
                "density": q(case.densities[c], "horoball_density", c),
            }
            for c, h in case.horoballs.items()
        ],
        "pair": None,
    }
    if case.reference_horoballs:
        data["reference_frame_horoballs"] = [
            {"center": c, "s": q(h.s, "s", c)} for c, h in case.reference_horoballs.items()
        ]
    if case.pair is not None:
        p = case.pair
        data["pair"] = {
            "centers": [p.first.center_index, p.second.center_index],
            "s": _fmt([p.first.s, p.second.s]),
            "relation": p.relation,
            "t": _fmt([p.t_first, p.t_second]),
            "piece_volume": q(p.total_piece_volume, "pair_piece_volume"),
            "density": q(p.density, "pair_density"),
        }
        if case.reference_pair is not None:
            r = case.reference_pair
            data["pair"]["reference_frame"] = {
                "s": _fmt([r.first.s, r.second.s]),
                "relation": r.relation,
                "t": q(r.t_first, "tangency_t"),
            }
        elif ("tangency_t", None) in comps:
            data["pair"]["t"] = q(p.t_first, "tangency_t")

    if samples:
        mc = mc_volume(orth, samples=samples, seed=seed)
        data["monte_carlo"] = {
            "samples": samples,
            "seed": seed,
            "value": _fmt(mc.value),
            "stderr": _fmt(mc.stderr),
            "z": _fmt((mc.value - case.volume.value) / mc.stderr),
        }

    flat = [c for cs in comps.values() for c in cs]
    data["discrepancy_notes"] = [c.to_dict() for c in flat if c.flagged]
    data["golden"] = {
        "checked": len(flat),
        "failed": [c.id for c in flat if not c.within_adopted],
    }
    return PackingReport(spec.symbol, data, flat)


# ------------------------------------------------------------------ tables


def table_header(table: int) -> list[str]:
    cols = ["table", "symbol", "center"]
    for quantity in TABLE_COLUMNS[table]:
        cols += [f"{quantity}_printed", f"{quantity}_expected", f"{quantity}_computed", f"{quantity}_delta"]
    return cols + ["flagged"]


def build_table(table: int) -> tuple[list[str], list[list], dict]:
    """Rows of a reference table with printed, expected and computed columns.

    ``expected`` is the adopted value (the printed one unless adjudicated)
    and ``delta`` is |computed - printed|.  The summary holds the largest
    delta per quantity and the number of flagged cells.
    """
    if table not in TABLE_COLUMNS:
        raise KeyError(f"unknown table {table}")
    rows: dict[tuple, dict] = {}
    for e in published_entries(table=table):
        key = (e["symbol"], e["center"])
        rows.setdefault(key, {})[e["quantity"]] = compare(e, _entry_value(e))
    header = table_header(table)
    out = []
    summary = {f"max_delta_{q}": 0.0 for q in TABLE_COLUMNS[table]}
    flagged = 0
    for (symbol, center), comps in rows.items():
        row = [table, symbol, "" if center is None else center]
        for quantity in TABLE_COLUMNS[table]:
            c = comps.get(quantity)
            if c is None:
                row += ["", "", "", ""]
                continue
            row += [c.printed_text, _fmt(c.adopted), _fmt(c.computed), _fmt(c.delta)]
            summary[f"max_delta_{quantity}"] = max(summary[f"max_delta_{quantity}"], c.delta)
            flagged += c.flagged
        row.append(";".join(q for q, c in comps.items() if c.flagged))
        out.append(row)
    summary = {k: _fmt(v) for k, v in summary.items()}
    summary["rows"] = len(out)
    summary["flagged_cells"] = flagged
    return header, out, summary
