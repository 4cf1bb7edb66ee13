"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data/processing error. All numeric
output is written with 17 significant digits so reruns with the same seed
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import csvio, netpbm
from .datagen import SyntheticSpec, default_spec, gen_four_class, gen_haystack, \
    gen_spliced_image, gen_textured_digits, sample_haystack
from .errors import CpcappError
from .factorization import glrt_statistic, recover_w
from .model_io import load_model, save_model
from .reducers import default_alpha_grid, fit_cpca, fit_cpcapp, fit_pca, sweep_cpca, transform
from .rng import SplitMix64
from .splicing import BG_EDGE_MIN, FG_SPLICE_RANGE, PATCH_SIZE, PATCH_STRIDE, \
    SCORE_THRESHOLD, SPLICE_K, ProbabilityMap, binarize_and_score, edge_mask, \
    extract_patches, f1_score, label_patches, mcc_score, reconstruct_map, score_patches
from .stats import DataMatrix, build_covariance_pair, center


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit(2) -> exception, mapped to exit code 1
        raise UsageError(message)


def _parse_alpha_grid(spec: str) -> np.ndarray:
    if spec == "default":
        return default_alpha_grid()
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"bad alpha grid {spec!r}, expected 'lo:hi:count' or 'default'")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad alpha grid {spec!r}: {exc}") from exc
    if lo <= 0 or hi <= lo or count < 1:
        raise UsageError("alpha grid needs 0 < lo < hi and count >= 1")
    return np.logspace(np.log10(lo), np.log10(hi), count)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cpcapp", description="discriminative dimensionality reduction toolkit")
    parser.add_argument("--threads", type=int, default=None,
                        help="advisory worker count (mirrors CPCAPP_THREADS); "
                             "results do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset")
    gen.add_argument("kind", choices=["four-class", "haystack", "textured-digits", "spliced-image"])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--n-fg", type=int, default=None)
    gen.add_argument("--n-bg", type=int, default=None)
    gen.add_argument("--count", type=int, default=25, help="images to emit (spliced-image)")
    gen.add_argument("--width", type=int, default=64)
    gen.add_argument("--height", type=int, default=64)

    fit = sub.add_parser("fit", help="fit a reduction model on CSV data")
    fit.add_argument("--fg", required=True)
    fit.add_argument("--bg")
    fit.add_argument("--method", choices=["pca", "cpca", "cpca++"], required=True)
    fit.add_argument("-k", type=int, default=2)
    fit.add_argument("--alpha", type=float, default=None)
    fit.add_argument("--alpha-grid", default=None)
    fit.add_argument("--out", required=True)

    tra = sub.add_parser("transform", help="project CSV samples through a model")
    tra.add_argument("--model", required=True)
    tra.add_argument("--in", dest="infile", required=True)
    tra.add_argument("--out", required=True)

    sco = sub.add_parser("score", help="per-sample probability scores through a model")
    sco.add_argument("--model", required=True)
    sco.add_argument("--in", dest="infile", required=True)
    sco.add_argument("--out", required=True)

    den = sub.add_parser("denoise", help="project an image onto the learned basis")
    den.add_argument("--model", required=True)
    den.add_argument("--in", dest="infile", required=True)
    den.add_argument("--out", required=True)
    den.add_argument("-k", type=int, default=None)

    loc = sub.add_parser("localize", help="boundary probability map for a probe image")
    loc.add_argument("--model", required=True)
    loc.add_argument("--image", required=True)
    loc.add_argument("--out", required=True)
    loc.add_argument("--n", type=int, default=PATCH_SIZE)
    loc.add_argument("--stride", type=int, default=PATCH_STRIDE)

    trs = sub.add_parser("train-splice", help="fit a localization model from probe/mask pairs")
    trs.add_argument("--train-dir", required=True)
    trs.add_argument("--out", required=True)
    trs.add_argument("--n", type=int, default=PATCH_SIZE)
    trs.add_argument("--stride", type=int, default=PATCH_STRIDE)
    trs.add_argument("-k", type=int, default=SPLICE_K)
    trs.add_argument("--fg-lo", type=float, default=FG_SPLICE_RANGE[0])
    trs.add_argument("--fg-hi", type=float, default=FG_SPLICE_RANGE[1])
    trs.add_argument("--bg-edge-min", type=float, default=BG_EDGE_MIN)

    eva = sub.add_parser("eval", help="score a probability map against a truth mask")
    eva.add_argument("--pred", required=True)
    eva.add_argument("--truth", required=True)
    eva.add_argument("--threshold", type=float, default=SCORE_THRESHOLD)

    ben = sub.add_parser("bench", help="compare fit times across methods")
    ben.add_argument("--kind", default="four-class",
                     choices=["four-class", "haystack", "textured-digits"])
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--n-fg", type=int, default=None)
    ben.add_argument("--n-bg", type=int, default=None)
    ben.add_argument("-k", type=int, default=2)
    ben.add_argument("--alpha-grid", default="default")
    ben.add_argument("--methods", default="pca,cpca,cpca++")
    return parser


def _spec_for(args, kind: str) -> SyntheticSpec:
    spec = default_spec(kind, args.seed)
    n_fg = args.n_fg if args.n_fg is not None else spec.n_fg
    n_bg = args.n_bg if args.n_bg is not None else spec.n_bg
    return SyntheticSpec(kind=kind, seed=args.seed, n_fg=n_fg, n_bg=n_bg)


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kind = args.kind
    if kind == "four-class":
        fg, bg = gen_four_class(_spec_for(args, kind))
        csvio.write_csv(out / "fg.csv", fg.data.values)
        csvio.write_csv(out / "bg.csv", bg.values)
        csvio.write_csv(out / "labels.csv", fg.labels[None, :].astype(float))
    elif kind == "haystack":
        spec = _spec_for(args, kind)
        r_b, r_f, c_dir, a_dir = gen_haystack(spec)
        csvio.write_csv(out / "rb.csv", r_b)
        csvio.write_csv(out / "rf.csv", r_f)
        csvio.write_csv(out / "directions.csv", np.column_stack([c_dir, a_dir]).T)
        fg, bg = sample_haystack(spec)
        csvio.write_csv(out / "fg.csv", fg.values)
        csvio.write_csv(out / "bg.csv", bg.values)
    elif kind == "textured-digits":
        fg, bg, clean = gen_textured_digits(_spec_for(args, kind))
        csvio.write_csv(out / "fg.csv", fg.data.values)
        csvio.write_csv(out / "bg.csv", bg.values)
        csvio.write_csv(out / "clean.csv", clean.values)
        csvio.write_csv(out / "labels.csv", fg.labels[None, :].astype(float))
    else:  # spliced-image
        seeds = SplitMix64(args.seed).spawn_seeds(args.count)
        for i, seed in enumerate(seeds):
            spec = SyntheticSpec(kind=kind, seed=seed, n_fg=1, n_bg=1,
                                 params={"width": args.width, "height": args.height})
            probe, surface, edge = gen_spliced_image(spec)
            netpbm.write_image(out / f"probe_{i:03d}.ppm", probe)
            netpbm.write_image(out / f"surface_{i:03d}.pgm", surface)
            netpbm.write_image(out / f"edge_{i:03d}.pgm", edge)
    return 0


def _cmd_fit(args) -> int:
    if args.alpha is not None and args.alpha_grid is not None:
        raise UsageError("--alpha and --alpha-grid are mutually exclusive")
    fg = csvio.read_csv(args.fg)
    if args.method == "pca":
        bank = fit_pca(fg, args.k)
        save_model(args.out, bank)
        return 0
    if args.bg is None:
        raise UsageError(f"--bg is required for method {args.method}")
    bg = csvio.read_csv(args.bg)
    pair = build_covariance_pair(bg, fg)
    if args.method == "cpca++":
        bank = fit_cpcapp(pair, args.k)
        save_model(args.out, bank, w=recover_w(pair, bank).w)
        return 0
    if args.alpha is not None:
        bank = fit_cpca(pair, args.k, args.alpha)
    else:
        grid = _parse_alpha_grid(args.alpha_grid or "default")
        banks = sweep_cpca(pair, args.k, grid)
        z_f, z_b = center(fg), center(bg)
        stats = [glrt_statistic(z_f, z_b, b.f) for b in banks]
        bank = banks[int(np.argmax(stats))]
    save_model(args.out, bank)
    return 0


def _cmd_transform(args) -> int:
    bank, _ = load_model(args.model)
    data = csvio.read_csv(args.infile)
    projection = transform(bank, data)
    csvio.write_csv(args.out, projection.y)
    return 0


def _cmd_score(args) -> int:
    bank, _ = load_model(args.model)
    data = csvio.read_csv(args.infile)
    scores = score_patches(bank, data)
    csvio.write_csv(args.out, scores[None, :])
    return 0


def _cmd_denoise(args) -> int:
    bank, w = load_model(args.model)
    if w is None:
        raise CpcappError("model has no basis block; fit with method cpca++")
    image = netpbm.read_image(args.infile)
    if image.ndim != 2:
        raise CpcappError("denoise expects a grayscale image")
    flat = image.astype(float).ravel()
    if flat.shape[0] != bank.features:
        raise CpcappError(
            f"image has {flat.shape[0]} pixels but the model expects {bank.features}"
        )
    k = args.k if args.k is not None else bank.k
    if not 1 <= k <= bank.k:
        raise UsageError(f"-k must be in [1, {bank.k}]")
    recon = w[:, :k] @ (bank.f[:, :k].T @ (flat - bank.train_mean_fg))
    lo, hi = recon.min(), recon.max()
    scaled = (recon - lo) / (hi - lo) if hi > lo else np.zeros_like(recon)
    netpbm.write_image(args.out, np.round(255 * scaled).astype(np.uint8).reshape(image.shape))
    return 0


def _cmd_localize(args) -> int:
    bank, _ = load_model(args.model)
    probe = netpbm.read_image(args.image)
    edge = edge_mask(probe)
    grid = extract_patches(probe, args.n, args.stride)
    if grid.patches.features != bank.features:
        raise CpcappError(
            f"patches have {grid.patches.features} features but the model expects {bank.features}"
        )
    scores = score_patches(bank, grid.patches)
    prob_map = reconstruct_map(scores, grid, edge)
    netpbm.write_probability_map(args.out, prob_map.values)
    return 0


def _cmd_train_splice(args) -> int:
    train_dir = Path(args.train_dir)
    probes = sorted(train_dir.glob("probe_*.ppm"))
    if not probes:
        raise CpcappError(f"{train_dir}: no probe_*.ppm files found")
    fg_cols, bg_cols = [], []
    for probe_path in probes:
        mask_path = train_dir / probe_path.name.replace("probe_", "surface_").replace(".ppm", ".pgm")
        if not mask_path.exists():
            raise CpcappError(f"missing surface mask {mask_path}")
        probe = netpbm.read_image(probe_path)
        surface = netpbm.read_image(mask_path)
        edge = edge_mask(probe)
        grid = extract_patches(probe, args.n, args.stride)
        fg_idx, bg_idx = label_patches(
            grid, surface, edge, fg_range=(args.fg_lo, args.fg_hi), bg_edge_min=args.bg_edge_min
        )
        if fg_idx.size:
            fg_cols.append(grid.patches.values[:, fg_idx])
        if bg_idx.size:
            bg_cols.append(grid.patches.values[:, bg_idx])
    if not fg_cols or not bg_cols:
        raise CpcappError("training images produced no labeled patches; relax the thresholds")
    fg = DataMatrix(values=np.concatenate(fg_cols, axis=1))
    bg = DataMatrix(values=np.concatenate(bg_cols, axis=1))
    pair = build_covariance_pair(bg, fg)
    bank = fit_cpcapp(pair, args.k)
    save_model(args.out, bank, w=recover_w(pair, bank).w)
    return 0


def _cmd_eval(args) -> int:
    pred = netpbm.read_probability_map(args.pred)
    truth = netpbm.read_image(args.truth)
    prob_map = ProbabilityMap(width=pred.shape[1], height=pred.shape[0], values=pred)
    counts = binarize_and_score(prob_map, truth, args.threshold)
    print(f"F1={f1_score(counts)} MCC={mcc_score(counts)}")
    return 0


def _cmd_bench(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    spec = default_spec(args.kind, args.seed)
    n_fg = args.n_fg if args.n_fg is not None else spec.n_fg
    n_bg = args.n_bg if args.n_bg is not None else spec.n_bg
    spec = SyntheticSpec(kind=args.kind, seed=args.seed, n_fg=n_fg, n_bg=n_bg)
    report = bench_mod.run_bench(spec, methods=methods,
                                 alphas=_parse_alpha_grid(args.alpha_grid), k=args.k)
    print(report.format())
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "transform": _cmd_transform,
    "score": _cmd_score,
    "denoise": _cmd_denoise,
    "localize": _cmd_localize,
    "train-splice": _cmd_train_splice,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def cli_dispatch(argv) -> int:
    """Run one subcommand; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help paths
        return 0 if exc.code in (0, None) else 1
    if args.threads is None:
        env = os.environ.get("CPCAPP_THREADS")
        if env is not None and not env.isdigit():
            print(f"error: CPCAPP_THREADS must be an integer, got {env!r}", file=sys.stderr)
            return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CpcappError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
