"""``hexctl``: build hexagons, evaluate words, run the checks, export graphs.

Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

from . import __version__

GRAMMAR = """\
word     := letter (";" letter)*        (empty word = identity)
letter   := "x" i "(" lit ")" | "s1" | "s6" | "h:" ("id" | "sigma" | "sigma2")
            i in {1,...,7,12}; odd i take J-literals, even i take F-literals
lit      := ["-"] (int | "g" | "g^" int | "[" c0 "," c1 "," ... "]")
element  := "(" coords ")" | "(inf)"    points
          | "[" coords "]" | "[inf]"    lines
coords   := 1 to 5 literals, alternating F/J by cell
system   := H1/q | H4/q | H2/q (q = |F|, J = GF(q^3))  or --config file.json
"""

_SHORT_RE = re.compile(r"^\s*(H1|H4|H2|H2-3D4|OneF|ThreeF)\s*[/:]\s*(\d+)\s*$", re.I)


class UsageError(Exception):
    pass


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                break
            return p, k
    raise UsageError(f"{q} is not a prime power")


def parse_system_spec(text: str) -> dict:
    """``H1/4`` -> ``{"kind": "OneF", "p": 2, "k_F": 2}`` and so on."""
    m = _SHORT_RE.match(text)
    if not m:
        raise UsageError(f"cannot read system {text!r}")
    fam, q = m.group(1).upper(), int(m.group(2))
    p, k = _prime_power(q)
    if fam in ("H2", "H2-3D4", "THREEF"):
        return {"kind": "ThreeF", "p": p, "k_F": k}
    if fam == "H4" and p != 3:
        raise UsageError("class H4 needs characteristic 3")
    if fam == "H1" and p == 3:
        raise UsageError("characteristic 3 gives class H4; write H4/q")
    return {"kind": "OneF", "p": p, "k_F": k}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    if "kind" in cfg:
        cfg = {"system": cfg}
    return cfg


def _common(ap: argparse.ArgumentParser, suppress: bool) -> None:
    # global flags are accepted before or after the subcommand
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    ap.add_argument("--config", help="JSON run config or bare system descriptor", **kw)
    ap.add_argument("--system", help="shorthand such as H1/2, H4/3, H2/2", **kw)
    ap.add_argument("--seed", type=int, help="random seed (default 1)", **kw)
    ap.add_argument("--budget", type=int, help="walk steps for random searches", **kw)
    ap.add_argument("--output", "-o", help="write the result here instead of stdout", **kw)
    ap.add_argument("--threads", type=int, help="cap native worker threads (env HEXFORGE_THREADS)", **kw)
    ap.add_argument("--no-timestamp", action="store_true",
                    help="omit timestamp and timings so equal runs give identical bytes", **kw)
    ap.add_argument("--cache-dir", help="build cache directory (default: next to --config)", **kw)
    ap.add_argument("--no-cache", action="store_true", **kw)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hexctl", description="Finite Moufang hexagons and their collineations.",
                                 epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    _common(ap, False)
    ap.add_argument("--version", action="version", version=f"hexctl {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    _common(common, True)
    sub = ap.add_subparsers(dest="command", metavar="command")

    sub.add_parser("build", parents=[common], help="build the hexagon and report its counts")
    sub.add_parser("verify-axioms", parents=[common], help="girth, diameter, degrees, thickness")
    p = sub.add_parser("identities", parents=[common], help="hexagonal-system identities, extension and automorphism checks")
    p.add_argument("--limit", type=int, help="cap on cases per identity (default: exhaustive)")
    p = sub.add_parser("relations", parents=[common], help="validate the relation tables as permutation identities")
    p.add_argument("--limit", type=int, default=64, help="exhaustive coefficient range limit")
    p = sub.add_parser("act", parents=[common], help="image of an element under a word")
    p.add_argument("--word", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--json", action="store_true", help="JSON output instead of the bare element")
    p = sub.add_parser("classify", parents=[common], help="domesticity report for a word")
    p.add_argument("--word", required=True)
    p = sub.add_parser("theorem1", parents=[common], help="run the domestic-collineation classification suite")
    p.add_argument("--seeds", default="1,2,3", help="comma separated seeds for the random clause")
    p.add_argument("--regularity-sample", type=int, help="sample size for regularity at large orders")
    p = sub.add_parser("search-exceptional", parents=[common], help="look for exceptional domestic collineations")
    p.add_argument("--mode", choices=("exhaustive", "random"), default="random")
    p.add_argument("--unfiltered", action="store_true", help="scan every walk element, not only order 4")
    p = sub.add_parser("export", parents=[common], help="write the incidence graph")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    return ap


def _config_argv(cfg: dict) -> list[str]:
    """Turn ``{"command": ..., "args": {...}}`` from a config into argv words."""
    cmd = cfg.get("command")
    if not cmd:
        return []
    out = [cmd]
    for key, val in (cfg.get("args") or {}).items():
        flag = "--" + key.replace("_", "-")
        if val is True:
            out.append(flag)
        elif val not in (False, None):
            out.extend([flag, str(val)])
    return out


def _apply_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get("HEXFORGE_THREADS")
        n = int(env) if env and env.isdigit() else None
    if n is None:
        return
    if n < 1:
        raise UsageError("--threads must be positive")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(n)


class Runner:
    def __init__(self, args, cfg: dict):
        from .hexsystem import system_from_dict

        self.args = args
        if args.system:
            desc = parse_system_spec(args.system)
        elif "system" in cfg:
            desc = cfg["system"]
        else:
            raise UsageError("no system given; use --system or --config")
        self.system = system_from_dict(desc)
        self.seed = args.seed if args.seed is not None else int(cfg.get("seed", 1))
        budget = args.budget if args.budget is not None else cfg.get("budget")
        self.budget = None if budget is None else int(budget)
        self.output = args.output or cfg.get("output")
        if args.no_cache:
            self.cache_dir = None
        elif args.cache_dir:
            self.cache_dir = args.cache_dir
        elif args.config:
            self.cache_dir = str(Path(args.config).resolve().parent)
        else:
            self.cache_dir = None
        self._hexagon = None
        self._ga = None

    @property
    def hexagon(self):
        if self._hexagon is None:
            from .geometry import load_or_build
            self._hexagon = load_or_build(self.system, self.cache_dir)
        return self._hexagon

    @property
    def ga(self):
        if self._ga is None:
            from .groupaction import GroupAction
            self._ga = GroupAction(self.hexagon)
        return self._ga

    def header(self, seed=None, budget=None) -> dict:
        h = {"artifact": "hexforge", "version": __version__, "system": self.system.describe(),
             "label": self.system.label, "seed": self.seed if seed is None else seed,
             "budget": self.budget if budget is None else budget}
        if not self.args.no_timestamp:
            h["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return h

    def emit(self, text: str) -> None:
        if self.output:
            with open(self.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)

    def emit_json(self, payload: dict, **hdr) -> None:
        doc = {"header": self.header(**hdr), **payload}
        self.emit(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    @staticmethod
    def fail(clauses) -> int:
        bad = [c for c in clauses if c["status"] == "fail"]
        if bad:
            first = bad[0]
            print(f"FAIL {first['id']}: {json.dumps(first.get('witness'), sort_keys=True)}", file=sys.stderr)
            return 1
        return 0

    # -- commands -------------------------------------------------------------
    def cmd_build(self) -> int:
        H = self.hexagon
        self.emit_json({"points": H.n_points, "lines": H.n_lines, "incidences": len(H.incidences),
                        "digest": self.system.digest()})
        return 0

    def cmd_verify_axioms(self) -> int:
        rep = self.hexagon.verify_axioms()
        self.emit_json({"axioms": rep.to_dict()})
        if not rep.ok:
            print(f"FAIL axioms: {json.dumps(rep.to_dict(), sort_keys=True)}", file=sys.stderr)
            return 1
        return 0

    def cmd_identities(self) -> int:
        from .hexsystem import automorphism_checks, extension_checks, identity_suite
        S = self.system
        res = identity_suite(S, self.args.limit) + extension_checks(S)
        for name in S.automorphisms():
            res += automorphism_checks(S, name)
        clauses = [c.to_dict() for c in res]
        self.emit_json({"clauses": clauses})
        return self.fail(clauses)

    def cmd_relations(self) -> int:
        clauses = [c.to_dict() for c in self.ga.validate_relations(self.args.limit, self.seed)]
        self.emit_json({"clauses": clauses})
        return self.fail(clauses)

    def cmd_act(self) -> int:
        from .geometry import GeometryError
        H = self.hexagon
        try:
            e = H.parse_element(self.args.element)
            H.vertex(e)
        except (GeometryError, KeyError, ValueError) as exc:
            raise UsageError(f"bad element {self.args.element!r}: {exc}") from None
        img = H.format_element(self.ga.act(self.args.word, e))
        if self.args.json:
            self.emit_json({"word": self.args.word, "element": H.format_element(e), "image": img})
        else:
            self.emit(img + "\n")
        return 0

    def cmd_classify(self) -> int:
        from .domesticity import classify_collineation
        rep = classify_collineation(self.hexagon, self.ga.realize(self.args.word))
        self.emit_json({"report": rep.to_dict(self.hexagon)})
        return 0

    def cmd_theorem1(self) -> int:
        from .domesticity import theorem1_suite
        try:
            seeds = tuple(int(s) for s in self.args.seeds.split(",") if s.strip())
        except ValueError:
            raise UsageError(f"bad --seeds {self.args.seeds!r}") from None
        out = theorem1_suite(self.hexagon, self.ga, exceptional_budget=self.budget or 0, seeds=seeds,
                             regularity_sample=self.args.regularity_sample)
        if self.args.no_timestamp:
            out.pop("timings", None)
        self.emit_json(out, seed=list(seeds))
        return self.fail(out["clauses"])

    def cmd_search_exceptional(self) -> int:
        from .domesticity import search_exceptional
        mode = self.args.mode
        budget = self.budget if self.budget is not None else 10**6
        f = search_exceptional(self.hexagon, mode, budget=budget, seed=self.seed, ga=self.ga,
                               filter_order4=not self.args.unfiltered)
        payload = {"findings": f.to_dict(self.hexagon)}
        if mode == "random" and not f.found:
            payload["note"] = "not found within budget (this is not a proof of nonexistence)"
        self.emit_json(payload, budget=budget if mode == "random" else None)
        if mode == "random" and not f.found:
            print(f"FAIL search-exceptional: no hit within {budget} steps for seed {self.seed}", file=sys.stderr)
            return 1
        return 0

    def cmd_export(self) -> int:
        H = self.hexagon
        if self.args.format == "dot":
            self.emit(H.to_dot())
        else:
            self.emit_json(H.to_json_dict())
        return 0


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = ap.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.command is None:
            extra = _config_argv(cfg)
            if not extra:
                ap.print_usage(sys.stderr)
                print("hexctl: error: no command given\n\n" + GRAMMAR, file=sys.stderr)
                return 2
            args = ap.parse_args(argv + extra)
        _apply_threads(args.threads)
        from .exactfield import FieldError
        from .groupaction import WordError
        try:
            runner = Runner(args, cfg)
        except (FieldError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad system descriptor: {exc}") from None
        try:
            return getattr(runner, "cmd_" + args.command.replace("-", "_"))()
        except (WordError, FieldError) as exc:
            raise UsageError(str(exc)) from None
    except UsageError as exc:
        print(f"hexctl: error: {exc}\n\n{GRAMMAR}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hexctl: I/O failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
