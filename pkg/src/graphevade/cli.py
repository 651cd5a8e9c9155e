"""Command-line entry point wiring generation, training, attacking, benchmarking,
and re-ranking. Every command echoes its resolved configuration beside its
outputs so reruns are reproducible byte for byte."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, fields
from pathlib import Path

from .attack_engine import STRATEGIES, SURROGATES, AttackConfig, attack_testset, summary_to_json
from .bench_stats import (
    BenchResult,
    MethodSpec,
    ResultTable,
    cd_diagram_text,
    friedman_nemenyi,
    run_benchmark,
)
from .graph_core import ParseError, SchemaError, read_dataset, write_dataset
from .synth_data import GeneratorConfig, InvalidConfig, generate
from .target_lcd import load_target, save_target, train_target

_CONFIG_ERRORS = (InvalidConfig, SchemaError, ParseError, FileNotFoundError,
                  IsADirectoryError, json.JSONDecodeError)


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write_json(path: Path, obj) -> None:
    path.write_text(_canonical_json(obj) + "\n", encoding="utf-8")


def _echo_config(out_dir: Path, command: str, config: dict) -> dict:
    doc = {"command": command, "config": config,
           "config_hash": hashlib.sha256(_canonical_json(config).encode()).hexdigest()}
    _write_json(out_dir / "run_config.json", doc)
    return doc


def _emit(args, human: str, payload: dict) -> None:
    if args.json:
        sys.stdout.write(_canonical_json(payload) + "\n")
    else:
        sys.stdout.write(human)


def _dataclass_from_dict(cls, data: dict, what: str):
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key not in allowed:
            raise InvalidConfig(f"unknown key {key!r} in {what}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"bad {what}: {exc}") from exc


def cmd_gen(args) -> int:
    cfg = GeneratorConfig(
        n_train_per_class=args.n_train,
        n_test_per_class=args.n_test,
        objects_range=(args.objects[0], args.objects[1]),
        features_per_object_range=(args.features[0], args.features[1]),
        vocab_size=args.vocab_size,
        p_obj=args.p_obj,
        p_feat=args.p_feat,
        weight_low=args.weight_low,
        weight_high=args.weight_high,
        delta=args.delta,
        seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = generate(cfg)
    write_dataset(ds, out_dir / "dataset.jsonl")
    config = asdict(cfg)
    config["objects_range"] = list(cfg.objects_range)
    config["features_per_object_range"] = list(cfg.features_per_object_range)
    echo = _echo_config(out_dir, "gen", config)
    manifest = {
        "seed": cfg.seed,
        "config_hash": echo["config_hash"],
        "n_graphs": len(ds),
        "n_train": sum(1 for s in ds.splits if s == "train"),
        "n_test": sum(1 for s in ds.splits if s == "test"),
        "non_separable": cfg.delta == 0,
    }
    _write_json(out_dir / "manifest.json", manifest)
    _emit(args, f"wrote {len(ds)} graphs to {out_dir / 'dataset.jsonl'}\n",
          {"dataset": str(out_dir / "dataset.jsonl"), **manifest})
    return 0


def cmd_train_target(args) -> int:
    ds = read_dataset(args.dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = train_target(ds, wl_iters=args.wl_iters, C=args.C, seed=args.seed)
    save_target(model, out_dir / "model.json")
    metrics = {
        "train_accuracy": model.train_accuracy,
        "test_accuracy": model.test_accuracy,
        "wl_iters": args.wl_iters,
        "C": args.C,
        "seed": args.seed,
    }
    _write_json(out_dir / "metrics.json", metrics)
    _echo_config(out_dir, "train-target",
                 {"dataset": str(args.dataset), "wl_iters": args.wl_iters,
                  "C": args.C, "seed": args.seed})
    _emit(args,
          f"train accuracy {model.train_accuracy:.4f}, "
          f"test accuracy {model.test_accuracy if model.test_accuracy is not None else 'n/a'}\n",
          {"model": str(out_dir / "model.json"), **metrics})
    return 0


def _attack_config(args) -> AttackConfig:
    try:
        return AttackConfig(
            r=args.r,
            strategy=args.strategy,
            surrogate=args.surrogate,
            max_queries=args.max_queries,
            k_candidates=args.k_candidates,
            rounds=args.rounds,
            epochs=args.epochs,
            wl_iters=args.wl_iters,
            oracle=args.oracle,
            seed=args.seed,
        )
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc


def cmd_attack(args) -> int:
    model = load_target(args.model)
    ds = read_dataset(args.dataset)
    test = ds.subset("test")
    if len(test) == 0:
        test = ds
    cfg = _attack_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = attack_testset(model, test, cfg, workers=args.workers)
    doc = summary_to_json(summary, include_records=True)
    _write_json(out_dir / "summary.json", doc)
    _echo_config(out_dir, "attack", doc["config"])
    _emit(args,
          (f"clean accuracy {summary.clean_accuracy:.4f} -> attacked "
           f"{summary.attacked_accuracy:.4f} (decline {summary.decline_pp:+.2f} pp, "
           f"success rate {summary.success_rate:.2f}, "
           f"mean queries {summary.mean_queries:.1f})\n"),
          {"summary": str(out_dir / "summary.json"),
           "clean_accuracy": summary.clean_accuracy,
           "attacked_accuracy": summary.attacked_accuracy,
           "decline_pp": summary.decline_pp,
           "success_rate": summary.success_rate,
           "mean_queries": summary.mean_queries})
    return 0


_BENCH_KEYS = ("seed", "repetitions", "alpha", "lambda", "configs", "methods",
               "budgets", "attack", "target")
_ATTACK_KEYS = ("r", "max_queries", "k_candidates", "rounds", "epochs",
                "wl_iters", "oracle")
_METHOD_KEYS = ("name", "strategy", "surrogate", "r")


def _load_bench_spec(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict) or not spec:
        raise InvalidConfig("bench spec must be a non-empty JSON object")
    for key in spec:
        if key not in _BENCH_KEYS:
            raise InvalidConfig(f"unknown key {key!r} in bench spec")
    if not spec.get("configs"):
        raise InvalidConfig("bench spec needs a non-empty 'configs' map")
    if not spec.get("methods"):
        raise InvalidConfig("bench spec needs a non-empty 'methods' list")
    return spec


def _bench_from_spec(spec: dict, seed_override: int | None, workers: int) -> tuple[BenchResult, dict]:
    seed = spec.get("seed", 42) if seed_override is None else seed_override
    repetitions = spec.get("repetitions", 10)
    alpha = spec.get("alpha", 0.05)
    configs = {}
    for name, raw in spec["configs"].items():
        data = dict(raw)
        for key in ("objects_range", "features_per_object_range"):
            if key in data:
                data[key] = tuple(data[key])
        configs[name] = _dataclass_from_dict(GeneratorConfig, data,
                                             f"generator config {name!r}")
    methods = []
    for raw in spec["methods"]:
        for key in raw:
            if key not in _METHOD_KEYS:
                raise InvalidConfig(f"unknown key {key!r} in method spec")
        if "name" not in raw:
            raise InvalidConfig("each method needs a 'name'")
        methods.append(MethodSpec(
            name=raw["name"],
            strategy=raw.get("strategy", "eigencentrality"),
            surrogate=raw.get("surrogate", "svm_rbf"),
            r=raw.get("r"),
        ))
    attack_raw = dict(spec.get("attack", {}))
    for key in attack_raw:
        if key not in _ATTACK_KEYS:
            raise InvalidConfig(f"unknown key {key!r} in attack spec")
    try:
        base = AttackConfig(seed=seed, reserved_lambda=spec.get("lambda", 0.1),
                            **attack_raw)
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc
    target_raw = dict(spec.get("target", {}))
    for key in target_raw:
        if key not in ("wl_iters", "C"):
            raise InvalidConfig(f"unknown key {key!r} in target spec")
    result = run_benchmark(
        methods=methods,
        configs=configs,
        base=base,
        repetitions=repetitions,
        budgets=spec.get("budgets"),
        seed=seed,
        target_wl_iters=target_raw.get("wl_iters", 3),
        target_c=target_raw.get("C", 10.0),
        workers=workers,
    )
    return result, {"alpha": alpha, "seed": seed, "repetitions": repetitions}


def _write_rank_outputs(out_dir: Path, table: ResultTable, alpha: float) -> dict:
    report = friedman_nemenyi(table, alpha=alpha)
    (out_dir / "results.csv").write_text(table.to_csv(), encoding="utf-8")
    _write_json(out_dir / "results.json", table.to_json())
    _write_json(out_dir / "rank_report.json", report.to_json())
    (out_dir / "rank_report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "cd_diagram.txt").write_text(cd_diagram_text(report), encoding="utf-8")
    return report.to_json()


def cmd_bench(args) -> int:
    spec = _load_bench_spec(args.spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result, meta = _bench_from_spec(spec, args.seed, args.workers)
    report_doc = _write_rank_outputs(out_dir, result.table, meta["alpha"])
    _echo_config(out_dir, "bench", {"spec": spec, "seed": meta["seed"]})
    means = {
        m: float(result.table.method_values(m).mean())
        for m in result.table.method_names
    }
    human = "mean decline per method (pp):\n" + "".join(
        f"  {m}: {means[m]:+.3f}\n" for m in result.table.method_names)
    _emit(args, human, {"out": str(out_dir), "mean_decline_pp": means,
                        "friedman_p": report_doc["friedman_p"],
                        "critical_difference": report_doc["critical_difference"]})
    return 0


def cmd_rank(args) -> int:
    table = ResultTable.from_csv(Path(args.table).read_text(encoding="utf-8"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_doc = _write_rank_outputs(out_dir, table, args.alpha)
    _echo_config(out_dir, "rank", {"table": str(args.table), "alpha": args.alpha})
    _emit(args, f"friedman p = {report_doc['friedman_p']:.6g}, "
                f"CD = {report_doc['critical_difference']:.4f}\n",
          {"out": str(out_dir), **report_doc})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphevade",
                                     description="Evasion attacks on graph-kernel "
                                                 "loop-closure classifiers")
    sub = parser.add_subparsers(dest="command", required=True)

    gen_defaults = GeneratorConfig()
    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=gen_defaults.seed)
    gen.add_argument("--n-train", type=int, default=gen_defaults.n_train_per_class,
                     help="train graphs per class")
    gen.add_argument("--n-test", type=int, default=gen_defaults.n_test_per_class,
                     help="test graphs per class")
    gen.add_argument("--objects", type=int, nargs=2,
                     default=list(gen_defaults.objects_range), metavar=("LO", "HI"))
    gen.add_argument("--features", type=int, nargs=2,
                     default=list(gen_defaults.features_per_object_range),
                     metavar=("LO", "HI"), help="feature nodes per object")
    gen.add_argument("--vocab-size", type=int, default=gen_defaults.vocab_size)
    gen.add_argument("--p-obj", type=float, default=gen_defaults.p_obj)
    gen.add_argument("--p-feat", type=float, default=gen_defaults.p_feat)
    gen.add_argument("--weight-low", type=float, default=gen_defaults.weight_low)
    gen.add_argument("--weight-high", type=float, default=gen_defaults.weight_high)
    gen.add_argument("--delta", type=float, default=gen_defaults.delta)
    gen.add_argument("--json", action="store_true")
    gen.set_defaults(func=cmd_gen)

    tt = sub.add_parser("train-target", help="train the victim classifier")
    tt.add_argument("--dataset", required=True)
    tt.add_argument("--out", required=True)
    tt.add_argument("--wl-iters", type=int, default=3)
    tt.add_argument("--C", type=float, default=10.0)
    tt.add_argument("--seed", type=int, default=42)
    tt.add_argument("--json", action="store_true")
    tt.set_defaults(func=cmd_train_target)

    atk = sub.add_parser("attack", help="attack a trained target over a test set")
    atk.add_argument("--model", required=True)
    atk.add_argument("--dataset", required=True)
    atk.add_argument("--out", required=True)
    atk.add_argument("--r", type=float, default=3e-4)
    atk.add_argument("--strategy", choices=STRATEGIES, default="eigencentrality")
    atk.add_argument("--surrogate", choices=SURROGATES, default="svm_rbf")
    atk.add_argument("--max-queries", type=int, default=50)
    atk.add_argument("--k-candidates", type=int, default=10)
    atk.add_argument("--rounds", type=int, default=10)
    atk.add_argument("--epochs", type=int, default=200)
    atk.add_argument("--wl-iters", type=int, default=3)
    atk.add_argument("--oracle", choices=("score", "label"), default="score")
    atk.add_argument("--seed", type=int, default=42)
    atk.add_argument("--workers", type=int, default=1)
    atk.add_argument("--json", action="store_true")
    atk.set_defaults(func=cmd_attack)

    bench = sub.add_parser("bench", help="run a benchmark spec")
    bench.add_argument("--spec", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--seed", type=int, default=None,
                       help="override the spec's seed")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--json", action="store_true")
    bench.set_defaults(func=cmd_bench)

    rank = sub.add_parser("rank", help="re-rank an existing results.csv")
    rank.add_argument("--table", required=True)
    rank.add_argument("--out", required=True)
    rank.add_argument("--alpha", type=float, default=0.05)
    rank.add_argument("--json", action="store_true")
    rank.set_defaults(func=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
