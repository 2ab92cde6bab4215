"""Command-line front end: ``scribble``, ``score`` and ``batch``.

Exit codes: 0 success, 1 I/O or usage error, 2 degenerate input (no edges,
no bleeding edge).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import io
from .cdr import cdr_channels
from .errors import BleedMeterError, DimensionMismatch, NoBleedingEdge, NoEdges
from .imaging import lab_to_rgb, rgb_to_lab
from .metrics import KernelSpec, s_diff
from .profiles import PROFILES, default_profile_name, get_profile
from .report import ScoreParams, canonical_json, score_pair
from .scribble import Scribble, ScribbleParams, generate_pseudo_scribble
from .slic import SlicParams

log = logging.getLogger("bleedmeter")

EXIT_OK, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2
MANIFEST_FIELDS = ("gt", "pred", "init", "scribble", "kernel", "seed")
SUMMARY_METRICS = ("psnr_global_db", "psnr_local_db", "cdr", "edge_fidelity", "consistency")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class JobSpec:
    gt_path: Optional[Path]
    pred_path: Optional[Path] = None
    init_path: Optional[Path] = None
    scribble_path: Optional[Path] = None
    kernel: KernelSpec = KernelSpec(7)
    profile: str = "imagenet"
    width_range: tuple[int, int] = (1, 5)
    region_radius: int = 3
    seed: int = 0
    output_dir: Path = Path("out")
    resize_256: bool = False
    overlays: bool = False

    @property
    def scribble_params(self) -> ScribbleParams:
        return ScribbleParams(get_profile(self.profile), self.width_range, seed=self.seed)

    @property
    def score_params(self) -> ScoreParams:
        return ScoreParams(get_profile(self.profile), SlicParams(), self.region_radius)


def parse_width_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if not 1 <= lo <= hi <= 11:
        raise argparse.ArgumentTypeError(f"width range {text} must lie within 1..11")
    return lo, hi


def parse_kernel(text: str) -> KernelSpec:
    try:
        return KernelSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_scribble(path: Path, resize_256: bool) -> Scribble:
    mask = io.read_mask(path, resize_256)
    sidecar = path.with_suffix(".json")
    width, comp_id = None, 0
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        width = meta.get("width")
        comp_id = int(meta.get("source_component_id", 0))
    return Scribble(mask, width, comp_id)


def _scribble_sidecar(scribble: Scribble, params: ScribbleParams, profile: str) -> dict:
    return {
        "width": scribble.width,
        "seed": params.seed,
        "source_component_id": scribble.source_component_id,
        "params": {**params.to_dict(), "profile": profile},
    }


def write_scribble(out_dir: Path, scribble: Scribble, params: ScribbleParams, profile: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_mask(out_dir / "scribble.png", scribble.mask)
    (out_dir / "scribble.json").write_text(canonical_json(_scribble_sidecar(scribble, params, profile)))


def run_scribble(job: JobSpec) -> Scribble:
    gt = io.read_rgb(job.gt_path, job.resize_256)
    init = io.read_rgb(job.init_path, job.resize_256)
    if gt.shape != init.shape:
        raise DimensionMismatch(f"gt {gt.shape[:2]} and init {init.shape[:2]} differ in size")
    params = job.scribble_params
    scribble = generate_pseudo_scribble(rgb_to_lab(gt), rgb_to_lab(init), params)
    write_scribble(job.output_dir, scribble, params, job.profile)
    return scribble


def _heatmap(values: np.ndarray) -> np.ndarray:
    """Diverging map: blue for negative, white at zero, red for positive."""
    scale = float(np.abs(values).max()) or 1.0
    t = np.clip(values / scale, -1.0, 1.0)
    pos, neg = np.clip(t, 0, 1), np.clip(-t, 0, 1)
    rgb = np.stack([1 - neg, 1 - pos - neg, 1 - pos], axis=-1)
    return np.rint(np.clip(rgb, 0, 1) * 255).astype(np.uint8)


def write_overlays(out_dir: Path, job: JobSpec, pred, gt, init, scribble) -> None:
    if scribble is not None:
        over = pred.astype(np.float64)
        over[scribble.mask] = 0.4 * over[scribble.mask] + 0.6 * np.array([255.0, 0.0, 0.0])
        io.write_rgb(out_dir / "scribble_overlay.png", np.rint(over).astype(np.uint8))
    if init is not None:
        da, db = s_diff(rgb_to_lab(pred), rgb_to_lab(init))
        io.write_rgb(out_dir / "sdiff_a.png", _heatmap(da))
        io.write_rgb(out_dir / "sdiff_b.png", _heatmap(db))
    if not job.kernel.is_full:
        params = job.score_params
        channels = cdr_channels(rgb_to_lab(gt), rgb_to_lab(pred), job.kernel, params.canny, params.slic)
        terms = np.stack([c.terms for c in channels])
        seen = ~np.isnan(terms)
        count = seen.sum(axis=0)
        mean = np.where(count > 0, np.nansum(terms, axis=0) / np.maximum(count, 1), 0.0)
        marked = lab_to_rgb(rgb_to_lab(gt)) // 2
        on = count > 0
        marked[on] = np.stack([255 * (1 - mean[on]), 255 * mean[on], np.zeros(on.sum())], -1).astype(np.uint8)
        io.write_rgb(out_dir / "cdr_edges.png", marked)


def run_score(job: JobSpec) -> dict:
    """Score one job, write ``report.json`` (and overlays) and return the report dict."""
    gt = io.read_rgb(job.gt_path, job.resize_256)
    pred = io.read_rgb(job.pred_path, job.resize_256)
    init = io.read_rgb(job.init_path, job.resize_256) if job.init_path else None
    for name, img in (("pred", pred), ("init", init)):
        if img is not None and img.shape != gt.shape:
            raise DimensionMismatch(f"{name} {img.shape[:2]} and gt {gt.shape[:2]} differ in size")

    scribble, note = None, None
    if job.scribble_path:
        scribble = _read_scribble(job.scribble_path, job.resize_256)
    elif init is not None:
        try:
            scribble = generate_pseudo_scribble(rgb_to_lab(gt), rgb_to_lab(init), job.scribble_params)
        except NoBleedingEdge:
            note = "no bleeding edge found"

    report = score_pair(pred, gt, init, scribble, job.kernel, job.score_params, seed=job.seed)
    if note:
        for key in ("psnr_local", "edge_fidelity", "consistency"):
            if key in report.skipped:
                report.skipped[key] = note
    report.params["profile"] = job.profile
    report.params["width_range"] = list(job.width_range)
    report.params["resize_256"] = job.resize_256

    out = job.output_dir
    out.mkdir(parents=True, exist_ok=True)
    data = report.to_dict()
    (out / "report.json").write_text(canonical_json(data))
    if scribble is not None and not job.scribble_path:
        write_scribble(out, scribble, job.scribble_params, job.profile)
    if job.overlays:
        write_overlays(out, job, pred, gt, init, scribble)
    return json.loads(canonical_json(data))


def _batch_row(args: tuple[int, JobSpec]) -> dict:
    index, job = args
    try:
        report = run_score(job)
    except NoEdges as exc:
        return {"row": index, "status": "error", "error": f"no edges: {exc}"}
    except (BleedMeterError, OSError, ValueError) as exc:
        return {"row": index, "status": "error", "error": f"{type(exc).__name__}: {exc}"}
    return {"row": index, "status": "ok", "error": "", **{k: report[k] for k in SUMMARY_METRICS}}


def read_manifest(path: Path, template: JobSpec) -> list[JobSpec]:
    """Parse a manifest CSV into jobs; relative paths resolve against its folder."""
    base = path.parent
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"gt", "pred"} <= set(reader.fieldnames):
            raise UsageError(f"manifest {path} needs a header with at least gt,pred")
        unknown = set(reader.fieldnames) - set(MANIFEST_FIELDS)
        if unknown:
            raise UsageError(f"manifest {path} has unknown columns {sorted(unknown)}")
        rows = list(reader)
    if not rows:
        raise UsageError(f"manifest {path} has no rows")

    def resolve(value):
        value = (value or "").strip()
        return (base / value) if value else None

    jobs = []
    for i, row in enumerate(rows):
        kernel = (row.get("kernel") or "").strip()
        seed = (row.get("seed") or "").strip()
        try:
            jobs.append(replace(
                template,
                gt_path=resolve(row.get("gt")),
                pred_path=resolve(row.get("pred")),
                init_path=resolve(row.get("init")),
                scribble_path=resolve(row.get("scribble")),
                kernel=KernelSpec.parse(kernel) if kernel else template.kernel,
                seed=int(seed) if seed else template.seed + i,
                output_dir=template.output_dir / f"row_{i:04d}",
            ))
        except ValueError as exc:
            raise UsageError(f"manifest row {i}: {exc}") from None
    return jobs


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_summary(path: Path, rows: list[dict]) -> None:
    fields = ["row", "status", "error", *SUMMARY_METRICS]
    means = {}
    for key in SUMMARY_METRICS:
        vals = [r[key] for r in rows if r["status"] == "ok" and isinstance(r.get(key), (int, float))]
        means[key] = sum(vals) / len(vals) if vals else None
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _fmt(r.get(k)) for k in fields})
        writer.writerow({"row": "mean", "status": "", "error": "", **{k: _fmt(v) for k, v in means.items()}})


def run_batch(jobs: list[JobSpec], out_dir: Path, workers: int = 1) -> list[dict]:
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = list(enumerate(jobs))
    if workers <= 1:
        rows = [_batch_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_batch_row, tasks))
    write_summary(out_dir / "summary.csv", rows)
    return rows


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", choices=sorted(PROFILES), default=None,
                        help="Canny profile (default: $BLEEDMETER_PROFILE or imagenet)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--width-range", type=parse_width_range, default=(1, 5), metavar="A..B")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--resize-256", action="store_true",
                        help="bilinearly resample every input to 256x256 first")
    common.add_argument("-v", "--verbose", action="store_true")

    scoring = argparse.ArgumentParser(add_help=False)
    scoring.add_argument("--kernel", type=parse_kernel, default=KernelSpec(7), metavar="{7|15|23|full}")
    scoring.add_argument("--region-radius", type=int, default=3)
    scoring.add_argument("--overlays", action="store_true")

    parser = _Parser(prog="bleedmeter", description="Color-bleeding metrics and pseudo-scribbles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scribble", parents=[common], help="synthesize a pseudo-scribble")
    p.add_argument("--gt", type=Path, required=True)
    p.add_argument("--init", type=Path, required=True)

    p = sub.add_parser("score", parents=[common, scoring], help="score one prediction")
    p.add_argument("--gt", type=Path, required=True)
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--init", type=Path)
    p.add_argument("--scribble", type=Path)

    p = sub.add_parser("batch", parents=[common, scoring], help="score a CSV manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        profile = args.profile or default_profile_name()
    except ValueError as exc:
        print(f"bleedmeter: {exc}", file=sys.stderr)
        return EXIT_IO

    template = JobSpec(
        gt_path=getattr(args, "gt", None),
        kernel=getattr(args, "kernel", KernelSpec(7)),
        profile=profile,
        width_range=args.width_range,
        region_radius=getattr(args, "region_radius", 3),
        seed=args.seed,
        output_dir=args.out_dir,
        resize_256=args.resize_256,
        overlays=getattr(args, "overlays", False),
    )
    try:
        if args.command == "scribble":
            scribble = run_scribble(replace(template, init_path=args.init))
            log.info("scribble width %d written to %s", scribble.width, args.out_dir)
        elif args.command == "score":
            report = run_score(replace(template, pred_path=args.pred, init_path=args.init,
                                       scribble_path=args.scribble))
            log.info("cdr=%s psnr_global=%s", report["cdr"], report["psnr_global_db"])
        else:
            jobs = read_manifest(args.manifest, template)
            rows = run_batch(jobs, args.out_dir, args.workers)
            failed = [r for r in rows if r["status"] != "ok"]
            for r in failed:
                print(f"bleedmeter: row {r['row']}: {r['error']}", file=sys.stderr)
            if len(failed) == len(rows):
                return EXIT_IO
    except NoBleedingEdge:
        print("bleedmeter: no bleeding edge found", file=sys.stderr)
        return EXIT_DEGENERATE
    except NoEdges as exc:
        print(f"bleedmeter: no edges: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except UsageError as exc:
        print(f"bleedmeter: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, ValueError, BleedMeterError) as exc:
        print(f"bleedmeter: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
