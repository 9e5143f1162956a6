"""Command line workbench: ingest | synth | run | audit."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

from ..lcp_codec import APPROX, EXACT, CodecConfig
from ..oracle import ancestor_audit
from ..packed_key import BYTES, DNA
from ..parallel_lcp import Policy
from ..zip_trie import TrieConfig, ZipTrie
from . import corpus as corpus_mod
from .runner import WorkloadSpec, aggregate, parse_mix, run, write_csv

ALPHABETS = {"bytes": BYTES, "dna": DNA}


def default_seed() -> int:
    try:
        return int(os.environ.get("ZIPTRIE_SEED", "0"))
    except ValueError:
        return 0


def parse_buckets(text: str):
    """``"64-127,128-255"`` to ``[(64, 127), (128, 255)]``; a bare number is a one-value bucket."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        out.append((int(lo), int(hi) if sep else int(lo)))
    return out


def _load(args):
    return corpus_mod.ingest(args.corpus, args.format, ALPHABETS[args.alphabet])


def _add_corpus_args(p):
    p.add_argument("corpus", help="input file")
    p.add_argument("--format", choices=["lines", "fasta"], default="lines")
    p.add_argument("--alphabet", choices=sorted(ALPHABETS), default="bytes")


def _add_structure_args(p):
    p.add_argument("--structure", choices=["zt", "mi-zt", "sbt"], default="zt",
                   help="zt: approximate metadata, mi-zt: exact metadata, sbt: string B-tree")
    p.add_argument("--mode", choices=["exact", "approx"], default=None,
                   help="override the zip-trie metadata mode")
    p.add_argument("--policy", choices=[p.value for p in Policy], default="none")
    p.add_argument("--B", type=int, default=16, help="block size in words / keys per leaf")
    p.add_argument("--fanout", type=int, default=None)
    p.add_argument("--f", type=int, default=None, help="comparison budget for the LCP grid and fixed chunks")
    p.add_argument("--seed", type=int, default=default_seed())


def cmd_ingest(args) -> int:
    c = _load(args)
    for k, v in asdict(c.stats()).items():
        print(f"{k}\t{v}")
    return 0


def cmd_synth(args) -> int:
    c = corpus_mod.synth(args.n, args.min_len, args.max_len, parse_buckets(args.lcp),
                         args.seed, ALPHABETS[args.alphabet])
    if args.out == "-":
        corpus_mod.write_lines(c, sys.stdout)
    else:
        with open(args.out, "w", encoding="latin-1") as fp:
            corpus_mod.write_lines(c, fp)
    return 0


def _mode(args):
    if args.mode is not None:
        return EXACT if args.mode == "exact" else APPROX
    return EXACT if args.structure == "mi-zt" else APPROX


def cmd_run(args) -> int:
    c = _load(args)
    spec = WorkloadSpec(
        mix=parse_mix(args.mix),
        structure="sbt" if args.structure == "sbt" else "zt",
        mode=_mode(args),
        policy=Policy(args.policy),
        B=args.B,
        fanout=args.fanout,
        f=args.f,
        seed=args.seed,
        ops=args.ops,
        repetitions=args.repetitions,
        oracle_check=args.oracle_check,
    )
    result = run(c, spec)
    rows = aggregate(result.rows) if args.aggregate else result.rows
    if args.csv_out == "-":
        write_csv(sys.stdout, rows)
    else:
        with open(args.csv_out, "w", newline="") as fp:
            write_csv(fp, rows)
    if args.oracle_check:
        print(f"oracle divergences: {result.divergences}", file=sys.stderr)
        return 1 if result.divergences else 0
    return 0


def cmd_audit(args) -> int:
    c = _load(args)
    codec = CodecConfig(args.f) if args.f else CodecConfig.for_capacity()
    trie = ZipTrie(TrieConfig(mode=_mode(args), codec=codec, seed=args.seed), c.alphabet)
    for k in c.keys:
        trie.insert(k)
    report = ancestor_audit(trie)
    print(report)
    md = trie.metadata_report()
    print(f"mean_depth\t{trie.mean_depth():.3f}")
    for k, v in md.items():
        print(f"{k}\t{v:.3f}" if isinstance(v, float) else f"{k}\t{v}")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ziptrie", description="String dictionary workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a corpus and print its statistics")
    _add_corpus_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate keys with planted LCPs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--min-len", type=int, default=8)
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--lcp", default="0-7", help="LCP buckets, e.g. 64-127,128-255")
    p.add_argument("--alphabet", choices=sorted(ALPHABETS), default="bytes")
    p.add_argument("--seed", type=int, default=default_seed())
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run a workload and write per-operation counters as CSV")
    _add_corpus_args(p)
    _add_structure_args(p)
    p.add_argument("--mix", default="search=1", help="e.g. search=0.6,insert=0.2,delete=0.2")
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--csv-out", default="-")
    p.add_argument("--aggregate", action="store_true", help="average rows per LCP bucket")
    p.add_argument("--oracle-check", action="store_true",
                   help="replay against the reference dictionary and report divergences")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("audit", help="build a zip-trie and check all node metadata")
    _add_corpus_args(p)
    _add_structure_args(p)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (corpus_mod.CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
