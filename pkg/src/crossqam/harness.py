"""Experiment runner behind the ``crossqam`` command line.

Configs are flat ``key = value`` text files; list values are comma separated.
Every run writes CSV curves plus a JSON summary that echoes the full config,
including the seed.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .constellation import (
    build_dicyclic,
    build_square_qam,
    build_welti_class1,
    constellation_papr,
    min_distance_pairs,
    neighbor_stats,
    trim_high_power,
)
from .exceptions import ConfigurationError
from .graymap import (
    Labeling4D,
    gray_labeling,
    per_bit_reliability,
    progressive_labeling,
    verify_gray,
)
from .ldpc import build_h
from .ofdm import WaveformConfig, ccdf, papr_at_probability, simulate_papr
from .simulation import ber_coded, ber_uncoded, point_rngs

log = logging.getLogger(__name__)

KINDS = ("verify-gray", "papr", "ber-uncoded", "ber-coded", "export-labeling")
CONSTELLATIONS = ("cross-qam", "class1-trim", "dicyclic", "square-qam")
LABELINGS = ("gray", "progressive")


@dataclass
class ExperimentConfig:
    kind: str = "verify-gray"
    constellation: str = "cross-qam"
    m: int = 1
    order: int = 16
    labeling: str = "gray"
    ebn0_db: list = field(default_factory=lambda: [6.0, 8.0, 10.0, 12.0])
    min_errors: int = 100
    max_bits: int = 10_000_000
    max_frames: int = 200
    frame_batch: int = 25
    llr_mode: str = "exact"
    max_iter: int = 50
    ldpc_seed: int = 0
    normalization: str = "average"
    n_symbols: int = 200_000
    m_used: int = 12
    n_total: int = 2048
    oversample: int = 4
    grid_db: list = field(default_factory=lambda: [round(0.05 * i, 2) for i in range(241)])
    seed: int = 0
    out: str = "results"

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.constellation not in CONSTELLATIONS:
            raise ConfigurationError(f"unknown constellation {self.constellation!r}")
        if self.labeling not in LABELINGS:
            raise ConfigurationError(f"unknown labeling {self.labeling!r}")
        if self.labeling == "gray" and self.constellation in ("class1-trim", "dicyclic"):
            raise ConfigurationError(
                f"{self.constellation} admits no Gray labeling: some points have more "
                "minimum-distance neighbours than bits per vector (up to 24 for the "
                "trimmed Class I set against 7 bits); use labeling = progressive"
            )
        for name in ("min_errors", "max_bits", "max_frames", "frame_batch", "n_symbols", "max_iter"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not all(np.isfinite(self.ebn0_db)):
            raise ConfigurationError("SNR grid must be finite")
        if self.normalization not in ("average", "peak"):
            raise ConfigurationError("normalization must be 'average' or 'peak'")

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = ", ".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        parser.read_string("[experiment]\n" + text)
        raw = dict(parser["experiment"])
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(raw)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        defaults = cls()
        kwargs = {}
        known = {f.name for f in dataclasses.fields(cls)}
        for key, value in raw.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigurationError(f"unknown config key {key!r}")
            default = getattr(defaults, key)
            kwargs[key] = _coerce(value, default)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


def _coerce(value, default):
    if not isinstance(value, str):
        return value
    if isinstance(default, list):
        return [float(x) for x in value.split(",") if x.strip()]
    if isinstance(default, int):
        return int(float(value))
    return value.strip()


def build_source(cfg: ExperimentConfig) -> Labeling4D:
    """The 4D labeling selected by a config."""
    if cfg.constellation == "cross-qam":
        lab = gray_labeling(cfg.m)
        return lab if cfg.labeling == "gray" else progressive_labeling(lab, lab.k)
    if cfg.constellation == "class1-trim":
        return progressive_labeling(trim_high_power(build_welti_class1(), 128), 7)
    if cfg.constellation == "dicyclic":
        return progressive_labeling(build_dicyclic(128), 7)
    return square_labeling(cfg.order, gray=cfg.labeling == "gray")


def square_labeling(order: int, gray: bool = True) -> Labeling4D:
    """Two square-QAM symbols side by side as one 4D labeling."""
    c = build_square_qam(order)
    nb = c.bits_per_symbol
    by_label = np.empty((order, 2), dtype=np.int64)
    by_label[c.labels] = c.points
    first = np.repeat(by_label, order, axis=0)
    second = np.tile(by_label, (order, 1))
    lab = Labeling4D(np.hstack([first, second]), name=f"square-qam-{order}-gray")
    return lab if gray else progressive_labeling(lab, 2 * nb)


@dataclass
class ResultRecord:
    config: dict
    summary: dict
    files: list
    ok: bool = True


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def run(cfg: ExperimentConfig) -> ResultRecord:
    """Execute one experiment and write its artifacts under ``cfg.out``.

    ``ResultRecord.ok`` is False when an invariant checked during the run
    fails (a Gray violation for a Gray labeling, a non-monotone CCDF).
    """
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = f"{cfg.kind}_{cfg.constellation}"
    if cfg.constellation == "cross-qam":
        tag += f"_m{cfg.m}"
    elif cfg.constellation == "square-qam":
        tag += f"_{cfg.order}"
    tag += f"_{cfg.labeling}"
    source = build_source(cfg)
    files = []
    ok = True

    if cfg.kind == "verify-gray":
        report = verify_gray(source)
        summary = report.to_dict()
        summary["text"] = str(report)
        summary["per_bit_reliability"] = per_bit_reliability(source).tolist()
        ok = report.is_gray or cfg.labeling != "gray"
    elif cfg.kind == "export-labeling":
        path = out / f"{tag}.csv"
        source.to_csv(path)
        files.append(path.name)
        summary = {"k": source.k, "vectors": len(source.table)}
    elif cfg.kind == "papr":
        wcfg = WaveformConfig(cfg.m_used, cfg.n_total, cfg.oversample)
        paprs = simulate_papr(source, wcfg, cfg.n_symbols, np.random.default_rng(cfg.seed))
        curve = ccdf(paprs, cfg.grid_db)
        path = out / f"{tag}_ccdf.csv"
        curve.to_csv(path)
        files.append(path.name)
        ok = bool(np.all(np.diff(curve.prob) <= 0))
        summary = {
            "constellation_papr_db": constellation_papr(source.table),
            "papr_at_1e-2_db": papr_at_probability(paprs, 1e-2),
            "papr_at_1e-3_db": papr_at_probability(paprs, 1e-3),
            "min_db": float(paprs.min()),
            "max_db": float(paprs.max()),
        }
    else:
        rngs = point_rngs(cfg.seed, len(cfg.ebn0_db))
        points = []
        if cfg.kind == "ber-uncoded":
            for eb, rng in zip(cfg.ebn0_db, rngs):
                p = ber_uncoded(
                    source, eb, rng, max_bits=cfg.max_bits, min_errors=cfg.min_errors,
                    normalization=cfg.normalization,
                )
                log.info("Eb/N0 %.2f dB: BER %.3e (%d errors)", eb, p.ber, p.errors)
                points.append(p)
        else:
            h = build_h(cfg.ldpc_seed)
            alist = out / f"ldpc_n{h.n}_seed{cfg.ldpc_seed}.alist"
            h.to_alist(alist)
            files.append(alist.name)
            for eb, rng in zip(cfg.ebn0_db, rngs):
                p = ber_coded(
                    source, h, eb, rng, max_frames=cfg.max_frames, min_errors=cfg.min_errors,
                    batch=cfg.frame_batch, max_iter=cfg.max_iter, mode=cfg.llr_mode,
                )
                log.info("Eb/N0 %.2f dB: coded BER %.3e (%d errors)", eb, p.ber, p.errors)
                points.append(p)
        path = out / f"{tag}_ber.csv"
        k = source.k
        header = ["ebn0_db", "ber", "half_width", "errors", "bits", "frames"]
        if cfg.kind == "ber-uncoded":
            header += [f"ber_b{i}" for i in range(k)]
        rows = []
        for p in points:
            row = [_fmt(p.ebn0_db), _fmt(p.ber), _fmt(p.half_width), p.errors, p.bits, p.frames]
            if cfg.kind == "ber-uncoded":
                row += [_fmt(e / p.frames) for e in p.per_bit_errors]
            rows.append(row)
        _write_csv(path, header, rows)
        files.append(path.name)
        summary = {"points": [p.to_dict() for p in points]}

    record = ResultRecord(config=dataclasses.asdict(cfg), summary=summary, files=files, ok=ok)
    meta = out / f"{tag}.json"
    meta.write_text(json.dumps(dataclasses.asdict(record), indent=2, default=float) + "\n")
    record.files.append(meta.name)
    return record


def summarize_constellations(m_values=(1, 2)) -> list[dict]:
    """One row of headline metrics per constellation under comparison."""
    rows = []

    def row(name, size, bits_2d, vectors, probs=None, scale=None, stats=True):
        vectors = np.asarray(vectors)
        entry = {
            "name": name,
            "size": size,
            "bits_per_2d": bits_2d,
            "papr_db": constellation_papr(vectors, probs),
        }
        if scale is None:
            es2d = float(np.mean(np.sum(vectors.astype(float) ** 2, axis=1))) * 2 / vectors.shape[1]
            scale = 1 / np.sqrt(es2d)
        dmin, _ = min_distance_pairs(vectors)
        entry["min_distance"] = dmin * scale
        if stats:
            ns = neighbor_stats(vectors)
            entry["neighbors_avg"] = ns.avg
            entry["neighbors_max"] = ns.max
            entry["neighbors_hist"] = ns.histogram()
        rows.append(entry)

    for m in m_values:
        lab = gray_labeling(m)
        row(f"cross-qam-{3 * 4**m} 4D", len(lab.table), lab.k / 2, lab.table, scale=lab.scale)
    class1 = trim_high_power(build_welti_class1(), 128)
    row("class1-trim128", len(class1), 3.5, class1.vectors)
    dic = build_dicyclic(128)
    row("dicyclic-128", len(dic), 3.5, dic.vectors)
    sq = build_square_qam(16)
    row("square-qam-16", len(sq), 4.0, sq.points)
    return rows


def format_summary(rows: list[dict]) -> str:
    header = f"{'constellation':<22}{'size':>6}{'bits/2D':>9}{'PAPR dB':>9}{'dmin':>8}{'nbr avg':>9}{'nbr max':>8}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['name']:<22}{r['size']:>6}{r['bits_per_2d']:>9.2f}{r['papr_db']:>9.3f}"
            f"{r['min_distance']:>8.3f}{r['neighbors_avg']:>9.3f}{r['neighbors_max']:>8d}"
        )
    return "\n".join(lines)


def load_config(path: Optional[str], **overrides) -> ExperimentConfig:
    text = Path(path).read_text() if path else ""
    return ExperimentConfig.from_text(text, **overrides)
