"""Command-line front end.

One binary, subcommand style.  Reports go to standard output as a JSON
envelope (or CSV where curves are more useful to plotters); diagnostics
go to standard error.  Exit codes: 0 = ok, 1 = usage or runtime error,
2 = a verified inequality was violated somewhere (a research event, not
a crash).

Every float is rendered as fixed 17-significant-digit scientific
notation, so identical inputs and flags produce byte-identical output.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .boolfn import BooleanFunction, FamilySpec, from_sign_bits, make_family
from .entropy import analyze, fourier_entropy, term_sum_bits
from .inequality import (
    DEFAULT_EPS_LIST,
    ScalarGridSpec,
    q31_report,
    sweep_gap,
    sweep_gap_random,
)
from .moments import chain, lemma22_check, moment_curve
from .search import SearchJob, batch_stats
from . import search as search_mod
from .spectrum import influences_spectral, wht

_VIOLATION_TOL = 1e-9


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); 2 means violation here
        raise _UsageError(message)


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite float in report: {x}")
    return format(x, ".16e")


def render_json(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, %.16e floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(render_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{render_json(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")


def _envelope(argv, fingerprint, status: str, payload) -> str:
    return render_json(
        {
            "version": __version__,
            "command": list(argv),
            "input": fingerprint,
            "status": status,
            "payload": payload,
        }
    )


def _fingerprint(f: BooleanFunction) -> dict:
    return {
        "n": f.n,
        "table_sha256": hashlib.sha256(f.to_hex().encode()).hexdigest(),
    }


def _add_fn_args(p: _Parser) -> None:
    p.add_argument("--fn", help="truth table as little-endian hex (needs --n)")
    p.add_argument("--n", type=int, help="dimension for --fn")
    p.add_argument("--family", help="family spec, e.g. parity:s=3,n=3")


def _load_function(args) -> tuple[BooleanFunction, FamilySpec | None]:
    if args.family and args.fn:
        raise ValueError("give either --fn or --family, not both")
    if args.family:
        spec = FamilySpec.parse(args.family)
        return make_family(spec), spec
    if args.fn:
        if args.n is None:
            raise ValueError("--fn requires --n")
        return BooleanFunction.from_hex(args.n, args.fn), None
    raise ValueError("an input function is required: --fn HEX --n N or --family SPEC")


def _parse_coords(text: str | None, n: int) -> list[int]:
    if text is None or text == "all":
        return list(range(1, n + 1))
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError:
        raise ValueError(f"malformed coordinate list {text!r}") from None


def _parse_eps_values(text: str | None) -> tuple[float, ...]:
    if text is None:
        return DEFAULT_EPS_LIST
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"eps range must be START:STOP:STEP, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("eps range step must be positive")
        out = []
        value = start
        while value <= stop + 1e-12:
            out.append(round(value, 12))
            value += step
        return tuple(out)
    return tuple(float(p) for p in text.split(",") if p)


def _rng_function(rng: np.random.Generator, n: int) -> BooleanFunction:
    raw = rng.integers(0, 256, size=(1 << n) // 8 or 1, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[: 1 << n]
    return from_sign_bits(bits)


def _cmd_analyze(args):
    f, _ = _load_function(args)
    return _fingerprint(f), "ok", analyze(f).as_dict()


def _cmd_spectrum(args):
    f, _ = _load_function(args)
    spectrum = wht(f)
    if args.format == "csv":
        lines = ["mask,coeff"]
        lines += [f"{mask},{int(c)}" for mask, c in enumerate(spectrum.coeffs)]
        return None, "ok", "\n".join(lines)
    payload = {
        "n": spectrum.n,
        "coeffs": [int(c) for c in spectrum.coeffs],
        "parseval_ok": spectrum.parseval_ok(),
    }
    return _fingerprint(f), "ok", payload


def _cmd_moments(args):
    f, _ = _load_function(args)
    coords = _parse_coords(args.coords, f.n)
    grid = _parse_eps_values(args.eps) if args.eps else None
    curve = moment_curve(f, coords, grid)
    if args.format == "csv":
        lines = ["eps,value"]
        lines += [f"{_fmt_float(e)},{_fmt_float(v)}" for e, v in zip(curve.eps, curve.values)]
        return None, "ok", "\n".join(lines)
    payload = {
        "coords": list(curve.coords),
        "eps": list(curve.eps),
        "values": list(curve.values),
    }
    return _fingerprint(f), "ok", payload


def _cmd_chain(args):
    f, _ = _load_function(args)
    order = _parse_coords(args.order, f.n) if args.order else None
    report = chain(f, args.eps, order=order, allow_large=args.allow_large)
    ok = all(s.delta >= s.floor - _VIOLATION_TOL for s in report.steps)
    ok = ok and report.final >= report.telescoped_floor - _VIOLATION_TOL
    return _fingerprint(f), ("ok" if ok else "violation"), report.as_dict()


def _cmd_q31(args):
    f, _ = _load_function(args)
    return _fingerprint(f), "ok", q31_report(wht(f)).as_dict()


def _verify_scalar(kind: str, args):
    grid = ScalarGridSpec(args.grid, args.grid, _parse_eps_values(args.eps))
    result = sweep_gap(kind, grid)
    payload = {"grid": result.as_dict(), "tolerance": 1e-12}
    violations = result.violations
    if args.random:
        if args.seed is None:
            raise ValueError("--random needs --seed")
        rand = sweep_gap_random(kind, args.random, args.seed)
        payload["random"] = rand.as_dict()
        violations += rand.violations
    return None, ("ok" if violations == 0 else "violation"), payload


def _verify_lemma22(args):
    if args.trials < 1:
        raise ValueError("--trials must be positive")
    rng = np.random.default_rng(args.seed)
    failures = 0
    first = None
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_n + 1))
        f = _rng_function(rng, n)
        size = int(rng.integers(1, n + 1))
        j_set = sorted(rng.choice(np.arange(1, n + 1), size=size, replace=False).tolist())
        k = int(rng.choice(j_set))
        lhs, rhs = lemma22_check(f, j_set, k)
        if lhs != rhs:
            failures += 1
            if first is None:
                first = {
                    "n": n,
                    "fn": f.to_hex(),
                    "J": list(j_set),
                    "k": k,
                    "lhs": str(lhs),
                    "rhs": str(rhs),
                }
    payload = {
        "trials": args.trials,
        "max_n": args.max_n,
        "seed": args.seed,
        "failures": failures,
        "first_failure": first,
    }
    return None, ("ok" if failures == 0 else "violation"), payload


def _verify_lemma31(args):
    if args.trials < 1:
        raise ValueError("--trials must be positive")
    eps_values = (
        _parse_eps_values(args.eps) if args.eps else (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49)
    )
    rng = np.random.default_rng(args.seed)
    checks = 0
    violations = 0
    min_margin = math.inf
    witness = None
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_n + 1))
        f = _rng_function(rng, n)
        order = (rng.permutation(n) + 1).tolist()
        for eps in eps_values:
            report = chain(f, float(eps), order=order)
            margins = [s.delta - s.floor for s in report.steps]
            margins.append(report.final - report.telescoped_floor)
            checks += len(margins)
            low = min(margins)
            violations += sum(1 for m in margins if m < -_VIOLATION_TOL)
            if low < min_margin:
                min_margin = low
                witness = {"n": n, "fn": f.to_hex(), "eps": float(eps), "order": order}
    payload = {
        "trials": args.trials,
        "max_n": args.max_n,
        "seed": args.seed,
        "eps": [float(e) for e in eps_values],
        "checks": checks,
        "violations": violations,
        "min_margin": min_margin,
        "witness_of_min": witness,
        "tolerance": _VIOLATION_TOL,
    }
    return None, ("ok" if violations == 0 else "violation"), payload


def _verify_theorem(args):
    checked = 0
    violations = 0
    max_ratio = -math.inf
    witness = None

    def scan(bits: np.ndarray, tables: list[int], n: int):
        nonlocal checked, violations, max_ratio, witness
        stats = batch_stats(bits)
        keep = stats["nonconstant"]
        checked += int(np.count_nonzero(keep))
        ent, bound = stats["entropy"], stats["bound"]
        drop = stats["bound_drop_one"]
        bad = keep & ((ent > bound + _VIOLATION_TOL) | (ent > drop + _VIOLATION_TOL))
        violations += int(np.count_nonzero(bad))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(keep & (bound > 0), ent / np.where(bound > 0, bound, 1.0), -np.inf)
        top = int(np.argmax(ratio))
        if ratio[top] > max_ratio:
            max_ratio = float(ratio[top])
            witness = {"n": n, "fn": BooleanFunction(n, int(tables[top])).to_hex()}

    if args.random:
        if args.n is None or args.seed is None:
            raise ValueError("--random needs --n and --seed")
        step = 4096
        for start in range(0, args.random, step):
            stop = min(start + step, args.random)
            tables, bits = search_mod._sample_bits(args.n, args.seed, start, stop)
            scan(bits, tables, args.n)
        mode = {"mode": "sample", "n": args.n, "count": args.random, "seed": args.seed}
    else:
        for n in range(1, args.max_n + 1):
            total = 1 << (1 << n)
            for start in range(0, total, 4096):
                stop = min(start + 4096, total)
                tables, bits = search_mod._exhaustive_bits(n, start, stop)
                scan(bits, tables, n)
        mode = {"mode": "exhaustive", "max_n": args.max_n}
    payload = {
        **mode,
        "checked": checked,
        "violations": violations,
        "max_entropy_over_bound": max_ratio,
        "witness_of_max": witness,
        "tolerance": _VIOLATION_TOL,
    }
    return None, ("ok" if violations == 0 else "violation"), payload


def _limit_blocks(s: int, t: int) -> list[float]:
    return [2.0 ** (2 - p) / 3.0 for p in range(1, t + 1)]


def _family_payload(spec: FamilySpec, f: BooleanFunction, targets: set[str], emit_hex: bool):
    profile = influences_spectral(wht(f))
    payload: dict = {
        "family": spec.text(),
        "n": f.n,
        "entropy_bits": fourier_entropy(wht(f)),
        "influence_total": profile.total,
        "term_sum_bits": term_sum_bits(profile),
    }
    if emit_hex:
        payload["hex"] = f.to_hex()
    if "influences" in targets:
        payload["influences"] = [str(ik) for ik in profile.per_coord]
    name = spec.name
    if "limits" in targets and name == "first-even-group":
        s = int(spec.params["s"])
        t = int(spec.params["t"])
        limits = _limit_blocks(s, t)
        rows = []
        max_dev = 0.0
        for k in range(1, f.n + 1):
            p = (k - 1) // s + 1
            dev = abs(float(profile.per_coord[k - 1]) - limits[p - 1])
            max_dev = max(max_dev, dev)
            rows.append(
                {
                    "coord": k,
                    "block": p,
                    "influence": str(profile.per_coord[k - 1]),
                    "block_limit": limits[p - 1],
                    "deviation": dev,
                }
            )
        total = float(profile.total)
        total_limit = 4.0 * s / 3.0
        payload["limits"] = {
            "per_coord": rows,
            "deviation_bound": 2.0 ** (1 - t),
            "max_deviation": max_dev,
            "deviations_ok": max_dev <= 2.0 ** (1 - t),
            "influence_total_limit": total_limit,
            "influence_total_rel_dev": abs(total - total_limit) / total_limit,
        }
        term = term_sum_bits(profile)
        # (4/3)(2 - log2(4/3)) s simplifies to (4/3) log2(3) s; both printed.
        form_a = 4.0 / 3.0 * math.log2(3.0) * s
        form_b = 4.0 / 3.0 * (2.0 - math.log2(4.0 / 3.0)) * s
        payload["term_sum_limit"] = {
            "four_thirds_log2_3_s": form_a,
            "four_thirds_2_minus_log2_4_3_s": form_b,
            "rel_dev": abs(term - form_a) / form_a,
        }
    if "limits" in targets and name == "minblock":
        s = int(spec.params["s"])
        expected = Fraction(1, 1 << (s - 1))
        total = float(profile.total)
        cap = total * math.log2(f.n / total)
        payload["limits"] = {
            "expected_influence": str(expected),
            "influences_ok": all(ik == expected for ik in profile.per_coord),
            "jensen_cap_bits": cap,
            "term_sum_abs_dev": abs(term_sum_bits(profile) - cap),
        }
    if "limits" in targets and name == "parity":
        payload["limits"] = {
            "influence_total_expected": str(spec.params.get("s", f.n)),
            "term_sum_expected": 0.0,
        }
    return payload


def _cmd_family(args):
    spec = FamilySpec.parse(args.family)
    f = make_family(spec)
    targets = set((args.targets or "influences,limits").split(","))
    known = {"influences", "limits"}
    if not targets <= known:
        raise ValueError(f"unknown targets {sorted(targets - known)}; known: {sorted(known)}")
    payload = _family_payload(spec, f, targets, args.emit_hex)
    return _fingerprint(f), "ok", payload


def _resolve_workers(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HYPERCUBE_SPECTRA_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"HYPERCUBE_SPECTRA_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _cmd_search(args):
    workers = _resolve_workers(args.workers)
    if args.resume:
        if not args.checkpoint:
            raise ValueError("--resume requires --checkpoint PATH")
        records = search_mod.resume(args.checkpoint, workers=workers)
    else:
        if args.n is None:
            raise ValueError("search requires --n")
        job = SearchJob(
            n=args.n,
            mode=args.mode,
            count=args.count,
            seed=args.seed,
            metrics=tuple(args.metrics.split(",")) if args.metrics else search_mod.METRICS,
            checkpoint_every=args.checkpoint_every,
            chunk_size=args.chunk_size,
            symmetry=args.symmetry,
            max_tables=args.max_tables,
        )
        records = search_mod.run(job, checkpoint_path=args.checkpoint, workers=workers)
    lines = [render_json(r.as_dict()) for r in records]
    bad = any(
        r.metric == "ent_over_bound" and r.value > 1.0 + _VIOLATION_TOL for r in records
    )
    return lines, bad


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _Parser(prog="hypercube-spectra", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("analyze", help="entropy, influences, bounds, concentration")
    _add_fn_args(p)

    p = sub.add_parser("spectrum", help="integer Walsh-Hadamard coefficients")
    _add_fn_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("moments", help="restriction-moment curve over eps")
    _add_fn_args(p)
    p.add_argument("--coords", help="comma-separated coordinate set (default: all)")
    p.add_argument("--eps", help="eps grid: START:STOP:STEP or comma list")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("chain", help="coordinate-by-coordinate moment chain")
    _add_fn_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--order", help="comma-separated coordinate order")
    p.add_argument("--allow-large", action="store_true")

    p = sub.add_parser("verify", help="numerical verification sweeps")
    vsub = p.add_subparsers(dest="what", required=True)
    for kind in ("lemma24", "eq27"):
        vp = vsub.add_parser(kind)
        vp.add_argument("--grid", type=int, default=200)
        vp.add_argument("--eps", help="eps values: START:STOP:STEP or comma list")
        vp.add_argument("--random", type=int, help="additional random triples")
        vp.add_argument("--seed", type=int)
    vp = vsub.add_parser("lemma22")
    vp.add_argument("--trials", type=int, default=1000)
    vp.add_argument("--max-n", type=int, default=10)
    vp.add_argument("--seed", type=int, default=0)
    vp = vsub.add_parser("lemma31")
    vp.add_argument("--trials", type=int, default=500)
    vp.add_argument("--max-n", type=int, default=8)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--eps", help="eps values: START:STOP:STEP or comma list")
    vp = vsub.add_parser("theorem")
    vp.add_argument("--max-n", type=int, default=4)
    vp.add_argument("--random", type=int, help="sampled mode: number of functions")
    vp.add_argument("--n", type=int, help="dimension for --random")
    vp.add_argument("--seed", type=int)

    p = sub.add_parser("q31", help="cross-term mass over influence, per coordinate")
    _add_fn_args(p)

    p = sub.add_parser("search", help="extremal sweep over truth tables")
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--metrics", help="comma list; default: all")
    p.add_argument("--checkpoint")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--checkpoint-every", type=int)
    p.add_argument("--chunk-size", type=int, default=4096)
    p.add_argument("--symmetry", action="store_true")
    p.add_argument("--max-tables", type=int, default=search_mod.DEFAULT_BUDGET)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("family", help="named family instance report")
    p.add_argument("--family", required=True)
    p.add_argument("--emit-hex", action="store_true")
    p.add_argument("--targets", help="comma list of report sections")

    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    handlers = {
        "analyze": _cmd_analyze,
        "spectrum": _cmd_spectrum,
        "moments": _cmd_moments,
        "chain": _cmd_chain,
        "q31": _cmd_q31,
        "family": _cmd_family,
    }
    try:
        if args.cmd == "search":
            lines, violated = _cmd_search(args)
            for line in lines:
                print(line)
            return 2 if violated else 0
        if args.cmd == "verify":
            verifiers = {
                "lemma24": lambda a: _verify_scalar("lemma24", a),
                "eq27": lambda a: _verify_scalar("eq27", a),
                "lemma22": _verify_lemma22,
                "lemma31": _verify_lemma31,
                "theorem": _verify_theorem,
            }
            fingerprint, status, payload = verifiers[args.what](args)
        else:
            fingerprint, status, payload = handlers[args.cmd](args)
        if isinstance(payload, str):  # CSV body
            print(payload)
            return 0
        print(_envelope(argv, fingerprint, status, payload))
        return 2 if status == "violation" else 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_envelope(argv, None, "error", {"message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
