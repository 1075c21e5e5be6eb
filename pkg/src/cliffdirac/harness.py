"""Suite runner and machine-readable reports."""
import json
import time
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import _kernels
from .checks import REGISTRY, SUITES, TIERS, Accumulator, Context, planewave_checks, suite_checks
from .errors import ConfigError
from .geometry import CHRISTOFFEL_CONVENTION, DEFAULT_H, ChartBox, check_axioms, parse_metric_spec

TIMING_KEYS = ("wall_time", "total_wall_time")


@dataclass
class SuiteConfig:
    """Every field has a default; ``seed`` determines all random draws."""

    suite: str = "all"
    metric: str = "minkowski"
    box: str = "-1:1,-1:1,-1:1,-1:1@3"
    h: float = DEFAULT_H
    seed: int = 0
    samples: int = 10
    tolerances: dict = field(default_factory=dict)
    inject_failure: bool = False

    def validate(self):
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples must be a positive integer")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError("seed must be a nonnegative integer")
        for key, val in self.tolerances.items():
            if key not in TIERS and key not in REGISTRY and not key.startswith("planewave."):
                raise ConfigError(f"unknown tolerance key {key!r}")
            if not isinstance(val, (int, float)) or val < 0:
                raise ConfigError(f"tolerance {key!r} must be a nonnegative number")
        return self

    @classmethod
    def from_dict(cls, doc):
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        try:
            cfg = cls(**doc)
            cfg.h = float(cfg.h)
            cfg.tolerances = {str(k): float(v) for k, v in dict(cfg.tolerances).items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from None
        return cfg.validate()


def check_rng(seed, cid):
    """Independent stream per check: adding or filtering checks never shifts other draws."""
    return np.random.default_rng([seed, zlib.crc32(cid.encode())])


def _tolerance(cid, tier, h, overrides):
    if cid in overrides:
        return overrides[cid]
    if tier in overrides:
        return overrides[tier]
    return TIERS[tier][0](h)


def _record(cid, anchor, acc, tol, elapsed):
    res = float(acc.worst)
    rec = {
        "id": cid,
        "anchor": anchor,
        "tier": acc.tier,
        "max_residual": res,
        "tolerance": float(tol),
        "passed": bool(res <= tol),
        "samples": int(acc.count),
        "wall_time": round(elapsed, 6),
    }
    if acc.notes:
        rec["notes"] = list(acc.notes)
    return rec


def _report(kind, config, records, started):
    records = sorted(records, key=lambda r: r["id"])
    failed = [r["id"] for r in records if not r["passed"]]
    return {
        "artifact": "cliffdirac",
        "version": __version__,
        "kind": kind,
        "backend": _kernels.BACKEND,
        "christoffel": CHRISTOFFEL_CONVENTION,
        "config": config,
        "checks": records,
        "summary": {"total": len(records), "passed": len(records) - len(failed), "failed": len(failed),
                    "failed_ids": failed},
        "total_wall_time": round(time.perf_counter() - started, 6),
    }


def run_suite(cfg):
    """Run the configured suite; metric axioms are checked on the box first."""
    cfg.validate()
    started = time.perf_counter()
    box = ChartBox.parse(cfg.box, cfg.h)
    mf = parse_metric_spec(cfg.metric, box)
    check_axioms(mf)
    records = []
    for chk in suite_checks(cfg.suite):
        t0 = time.perf_counter()
        ctx = Context(mf, check_rng(cfg.seed, chk.id), cfg.samples, cfg.h, margin=0.2 * min(
            np.asarray(mf.box.hi) - np.asarray(mf.box.lo)) / 2)
        acc = Accumulator(chk.tier)
        chk.fn(ctx, acc)
        if chk.minkowski_only and not mf.constant:
            acc.notes.append("evaluated on the Minkowski metric")
        records.append(_record(chk.id, chk.anchor, acc, _tolerance(chk.id, chk.tier, cfg.h, cfg.tolerances),
                               time.perf_counter() - t0))
    if cfg.inject_failure:
        acc = Accumulator("exact")
        acc.add(1.0)
        records.append(_record("harness.injected_failure", "deliberately failing check", acc, 0.0, 0.0))
    return _report("verify", asdict(cfg), records, started)


def run_planewave(p, m, box, seed=0, h=DEFAULT_H, sign=1, tolerances=None):
    """Construct and verify a Minkowski plane wave; raises on off-shell momentum."""
    started = time.perf_counter()
    if isinstance(box, str):
        box = ChartBox.parse(box, h)
    tolerances = dict(tolerances or {})
    records = []
    t0 = time.perf_counter()
    results = planewave_checks(np.asarray(p, float), float(m), box, np.random.default_rng(seed), h, sign)
    elapsed = (time.perf_counter() - t0) / max(1, len(results))
    for cid, anchor, acc in results:
        records.append(_record(cid, anchor, acc, _tolerance(cid, acc.tier, h, tolerances), elapsed))
    config = {"p": [float(v) for v in p], "m": float(m), "box": box.spec(), "h": h, "seed": seed, "sign": sign,
              "tolerances": tolerances}
    return _report("planewave", config, records, started)


def exit_status(report):
    return 0 if report["summary"]["failed"] == 0 else 1


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def report_body(report):
    """Canonical serialisation without timing fields (used for determinism checks)."""
    return json.dumps(strip_timing(report), sort_keys=True, indent=2)


def format_table(report):
    lines = [f"{'check':40s} {'residual':>12s} {'tolerance':>12s}  status"]
    for r in report["checks"]:
        lines.append(f"{r['id']:40s} {r['max_residual']:12.3e} {r['tolerance']:12.3e}  "
                     f"{'pass' if r['passed'] else 'FAIL'}")
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['total']} checks passed")
    return "\n".join(lines)
