"""Command-line entry point: `een <subcommand>`.

Every output file carries a manifest comment line (command, inputs,
config hash, seed, tool version, outputs) so downstream consumers can
check provenance.  Outputs are written atomically; errors go to stderr
as single-line JSON with exit codes 2 (bad input/format), 3 (no
qualifying combination), 4 (silent/empty grid).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from een import __version__
from een.errors import (
    AllSilent,
    EenError,
    EmptyGrid,
    NoQualifyingCombo,
)
from een.ingest import (
    EncodeConfig,
    decode_audio,
    encode_buffer,
    read_grid,
    write_grid,
)
from een.metrics import (
    ScorePointSet,
    decile_proportions,
    point_density,
    random_deletion,
    shannon_entropy,
    skewness,
    welch_t_test,
)
from een._engine import word_map_fast
from een.network import (
    NeighborhoodSpec,
    WeightConfig,
    read_words,
    write_words,
)
from een.selforg import (
    default_grid_spec,
    grid_spec_from_json,
    self_organize,
    winner_json_obj,
    write_sweep_csv,
    write_winner_json,
)
from een.synth import ToneEvent, gen_morse, gen_noise, gen_tone_corpus, write_wav
from een.words import (
    rank_table,
    read_rank_table,
    sequence_1d,
    word_grid_2d,
    write_image,
    write_rank_table,
    write_sequence,
    zipf_fit,
)


def _config_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _manifest(command: str, inputs: list[str], config_obj, seed,
              outputs: list[str]) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "config_sha256": _config_hash(config_obj),
        "seed": seed,
        "version": __version__,
        "outputs": outputs,
    }


def _manifest_comment(md: dict) -> str:
    return "manifest " + json.dumps(md, sort_keys=True)


def _read_floats(path: str) -> list[float]:
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            for field in line.replace(",", " ").split():
                vals.append(float(field))
    return vals


def _read_samples(path: str) -> list[float]:
    """Floats file, or the scores column of an x,y,score point CSV."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("x,"):
                return list(ScorePointSet.from_csv(path).scores)
            break
    return _read_floats(path)


def _encode_config(args) -> EncodeConfig:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
    for flag, key in (
        ("n_scales", "n_scales"), ("f0", "f0"), ("frame_sec", "frame_sec"),
        ("vmax", "vmax"), ("db_floor", "db_floor"), ("activity_min", "activity_min"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            base[key] = val  # flags win over the config file
    return EncodeConfig(**base)


def _neighborhood(args) -> NeighborhoodSpec:
    return NeighborhoodSpec(
        mode=args.mode, r_scale=args.r_scale, r_time=args.r_time
    )


def _add_encode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="EncodeConfig JSON file")
    p.add_argument("--n-scales", dest="n_scales", type=int)
    p.add_argument("--f0", type=float)
    p.add_argument("--frame-sec", dest="frame_sec", type=float)
    p.add_argument("--vmax", type=int)
    p.add_argument("--db-floor", dest="db_floor", type=float)
    p.add_argument("--activity-min", dest="activity_min", type=int)


def _add_neighborhood_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["windowed", "global"], default="windowed")
    p.add_argument("--r-scale", dest="r_scale", type=int, default=12)
    p.add_argument("--r-time", dest="r_time", type=int, default=10)


def _print_rows(rows: list[tuple[str, object]]) -> None:
    for name, value in rows:
        print(f"{name},{value!r}" if isinstance(value, float) else f"{name},{value}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_encode(args) -> int:
    cfg = _encode_config(args)
    grid = encode_buffer(decode_audio(args.audio, cfg), cfg)
    md = _manifest("encode", [args.audio], json.loads(cfg.to_json()), None,
                   [args.output])
    write_grid(grid, args.output, [_manifest_comment(md)])
    return 0


def cmd_network(args) -> int:
    grid = read_grid(args.grid)
    w = WeightConfig(args.w1, args.w2, args.w3, args.w4, args.theta)
    # engine path: identical words (tested), memory-bounded on dense grids
    wm = word_map_fast(grid, w, _neighborhood(args))
    md = _manifest("network", [args.grid], w.as_tuple(), None, [args.output])
    write_words(wm, args.output, [_manifest_comment(md)])
    return 0


def cmd_rank(args) -> int:
    rt = rank_table(read_words(args.words))
    md = _manifest("rank", [args.words], None, None, [args.output])
    write_rank_table(rt, args.output, [_manifest_comment(md)])
    return 0


def cmd_fit(args) -> int:
    rt = read_rank_table(args.rank)
    fit = zipf_fit(rt, drop_top=args.drop_top)
    _print_rows([("zipf_a", fit.a), ("zipf_b", fit.b), ("r2", fit.r2),
                 ("n_points", fit.n_points)])
    return 0


def cmd_seq(args) -> int:
    wm = read_words(args.words)
    seq = sequence_1d(wm, include_inactive=args.include_inactive,
                      time_major=args.time_major)
    md = _manifest("seq", [args.words],
                   {"include_inactive": args.include_inactive,
                    "time_major": args.time_major}, None, [args.output])
    write_sequence(seq, args.output, [_manifest_comment(md)])
    return 0


def cmd_image(args) -> int:
    wm = read_words(args.words)
    md = _manifest("image", [args.words], None, None, [args.output])
    write_image(word_grid_2d(wm), args.output, [_manifest_comment(md)])
    return 0


def _load_grid_spec(args, grid):
    if args.grid_spec:
        return grid_spec_from_json(Path(args.grid_spec).read_text(), grid)
    return default_grid_spec(grid)


def cmd_optimize(args) -> int:
    grid = read_grid(args.grid)
    spec = _load_grid_spec(args, grid)
    md_sweep = _manifest("optimize", [args.grid], json.loads(spec.to_json()),
                         None, [args.output])
    try:
        best, results = self_organize(grid, spec, jobs=args.jobs)
    except NoQualifyingCombo as exc:
        write_sweep_csv(exc.results, args.output, [_manifest_comment(md_sweep)])
        raise
    write_sweep_csv(results, args.output, [_manifest_comment(md_sweep)])
    if args.winner:
        md = _manifest("optimize", [args.grid], json.loads(spec.to_json()),
                       None, [args.winner])
        write_winner_json(best, args.winner, md)
    else:
        print(json.dumps(winner_json_obj(best), sort_keys=True))
    return 0


def cmd_run(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    cfg = _encode_config(args)
    cfg_obj = json.loads(cfg.to_json())

    grid = encode_buffer(decode_audio(args.audio, cfg), cfg)
    md = _manifest("run", [args.audio], cfg_obj, None, ["grid.csv"])
    write_grid(grid, out / "grid.csv", [_manifest_comment(md)])

    spec = _load_grid_spec(args, grid)
    run_obj = {"encode": cfg_obj, "grid_spec": json.loads(spec.to_json())}
    md = _manifest("run", [args.audio], run_obj, None, ["sweep.csv"])
    try:
        best, results = self_organize(grid, spec, jobs=args.jobs)
    except NoQualifyingCombo as exc:
        write_sweep_csv(exc.results, out / "sweep.csv", [_manifest_comment(md)])
        raise
    write_sweep_csv(results, out / "sweep.csv", [_manifest_comment(md)])
    write_winner_json(best, out / "best.json",
                      _manifest("run", [args.audio], run_obj, None, ["best.json"]))

    w = best.config
    wm = word_map_fast(grid, w, spec.neighborhood)
    md = _manifest("run", [args.audio], run_obj, None, ["words.csv"])
    write_words(wm, out / "words.csv", [_manifest_comment(md)])
    md = _manifest("run", [args.audio], run_obj, None, ["rank.csv"])
    write_rank_table(rank_table(wm), out / "rank.csv", [_manifest_comment(md)])
    md = _manifest("run", [args.audio], run_obj, None, ["seq.csv"])
    write_sequence(sequence_1d(wm), out / "seq.csv", [_manifest_comment(md)])
    md = _manifest("run", [args.audio], run_obj, None, ["image.csv"])
    write_image(word_grid_2d(wm), out / "image.csv", [_manifest_comment(md)])
    return 0


def cmd_perturb(args) -> int:
    wm = read_words(args.words)
    out = random_deletion(wm, args.loss_rate, args.seed)
    md = _manifest("perturb", [args.words], {"loss_rate": args.loss_rate},
                   args.seed, [args.output])
    write_words(out, args.output, [_manifest_comment(md)])
    return 0


def cmd_stats(args) -> int:
    if args.stat == "entropy":
        probs = _read_floats(args.inputs[0])
        base = None if args.base in (None, "e") else float(args.base)
        _print_rows([("entropy", shannon_entropy(probs, base))])
    elif args.stat == "skew":
        _print_rows([("skewness", skewness(_read_samples(args.inputs[0])))])
    elif args.stat == "density":
        ps = ScorePointSet.from_csv(args.inputs[0])
        _print_rows([("density", point_density(ps, args.per_point))])
    elif args.stat == "deciles":
        ps = ScorePointSet.from_csv(args.inputs[0])
        props = decile_proportions(ps)
        _print_rows([(f"decile_{k}", p) for k, p in enumerate(props)])
    elif args.stat == "ttest":
        res = welch_t_test(_read_floats(args.inputs[0]),
                           _read_floats(args.inputs[1]))
        _print_rows([("t", res.t), ("df", res.df), ("p", res.p)])
    return 0


def cmd_synth(args) -> int:
    if args.kind == "tones":
        cfg = _encode_config(args)
        events = [
            ToneEvent(**ev)
            for ev in json.loads(Path(args.events).read_text())
        ]
        buf = gen_tone_corpus(events, cfg, args.rate, duration=args.duration)
    elif args.kind == "morse":
        buf = gen_morse(args.text, args.wpm, args.carrier, args.rate)
    else:
        if args.duration is None:
            raise ValueError("--duration is required for noise")
        buf = gen_noise(args.kind, args.duration, args.seed, args.rate)
    write_wav(buf, args.output)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="een", description=__doc__)
    ap.add_argument("--version", action="version", version=f"een {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("encode", help="WAV -> een-grid CSV")
    p.add_argument("audio")
    p.add_argument("-o", "--output", required=True)
    _add_encode_flags(p)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("network", help="grid + weights -> een-words CSV")
    p.add_argument("grid")
    p.add_argument("-o", "--output", required=True)
    for name in ("w1", "w2", "w3", "w4", "theta"):
        p.add_argument(f"--{name}", type=float, required=True)
    _add_neighborhood_flags(p)
    p.set_defaults(fn=cmd_network)

    p = sub.add_parser("rank", help="words CSV -> rank-frequency CSV")
    p.add_argument("words")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("fit", help="rank CSV -> power-law fit")
    p.add_argument("rank")
    p.add_argument("--drop-top", dest="drop_top", type=int, default=1)
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("seq", help="words CSV -> 1D sequence CSV")
    p.add_argument("words")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--include-inactive", action="store_true")
    p.add_argument("--time-major", action="store_true")
    p.set_defaults(fn=cmd_seq)

    p = sub.add_parser("image", help="words CSV -> dense 2D image CSV")
    p.add_argument("words")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_image)

    p = sub.add_parser("optimize", help="sweep weight combinations on a grid")
    p.add_argument("grid")
    p.add_argument("-o", "--output", required=True, help="sweep CSV")
    p.add_argument("--winner", help="winner JSON path")
    p.add_argument("--grid-spec", dest="grid_spec", help="GridSpec JSON file")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("run", help="full pipeline: WAV -> all artifacts")
    p.add_argument("audio")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--grid-spec", dest="grid_spec")
    p.add_argument("--jobs", type=int, default=1)
    _add_encode_flags(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("perturb", help="randomly delete words")
    p.add_argument("words")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--loss-rate", dest="loss_rate", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(fn=cmd_perturb)

    p = sub.add_parser("stats", help="print name,value metric rows")
    p.add_argument("stat", choices=["entropy", "skew", "density", "deciles", "ttest"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--base", help="entropy log base (default natural)")
    p.add_argument("--per-point", dest="per_point", action="store_true")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("synth", help="generate synthetic corpora as WAV")
    p.add_argument("kind", choices=["tones", "morse", "white", "pink"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--rate", type=int, default=44100)
    p.add_argument("--events", help="tone events JSON (tones)")
    p.add_argument("--duration", type=float, help="seconds (white/pink/tones)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--text", default="", help="message (morse)")
    p.add_argument("--wpm", type=float, default=12.0)
    p.add_argument("--carrier", type=float, default=600.0)
    _add_encode_flags(p)
    p.set_defaults(fn=cmd_synth)

    return ap


def _error_exit(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps(
        {"error": type(exc).__name__, "message": str(exc)}
    ) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NoQualifyingCombo as exc:
        return _error_exit(exc, 3)
    except (AllSilent, EmptyGrid) as exc:
        return _error_exit(exc, 4)
    except (EenError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        return _error_exit(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
