"""Command-line front end: ``covertower <command> ...``.

Exit status is 0 when every assertion a command makes holds, 1 when one
fails, and 2 for usage, config and horizon errors.
"""
import argparse
import os
import sys
from dataclasses import replace

from .errors import ConfigError, ExplicitLimitExceeded, HorizonExhausted, NoDivergenceWithinHorizon
from .graph import check_bidirectional, check_cover, cover_violations, to_dot
from .points import horizon, orbit_trace, parse_anchor, thread, trace_csv
from .scramble import coverage_check, dense_anchor, equicontinuity_witness, separation_report
from .suites import DEFAULT_SEED, SUITES, run_suite
from .tower import DEFAULT_LIMIT, Tower, TowerConfig, load_config


class _Fail(Exception):
    """An assertion made by a command did not hold."""


def _config(args, depth=None):
    cfg = load_config(args.config) if args.config else TowerConfig()
    if depth is not None:
        cfg = replace(cfg, depth=depth)
    elif args.depth is not None:
        cfg = replace(cfg, depth=args.depth)
    return cfg.validate()


def _tower(args, depth=None):
    return Tower(_config(args, depth), limit=args.limit)


def _emit(args, text, name):
    """Write ``text`` to ``--out`` (a file, or a directory for ``name``) or stdout."""
    if not args.out:
        sys.stdout.write(text)
        return
    path = args.out
    if os.path.isdir(path) or path.endswith(os.sep):
        os.makedirs(path, exist_ok=True)
        path = os.path.join(path, name)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _anchor_depth(text):
    text = text.strip()
    return None if text == "p" else int(text.split(":")[0])


def _tower_for_anchors(args, texts, extra=0):
    depths = [d for d in map(_anchor_depth, texts) if d is not None]
    need = max(depths + [args.level or 0]) + extra
    cfg = _config(args)
    return Tower(replace(cfg, depth=max(cfg.depth, need)), limit=args.limit)


def cmd_build(args):
    t = _tower(args)
    lines = [f"depth={t.depth} levels={t.depth + 1}"]
    for n in range(t.depth + 1):
        lengths = ",".join(str(l) for l in t.lengths(n)) or "-"
        lines.append(f"level {n}: vertices={t.vertex_count(n)} lengths={lengths}")
    ok = True
    for n in range(t.depth):
        if t.vertex_count(n + 1) > t.limit:
            lines.append(f"phi_{n}: skipped (level {n + 1} exceeds limit {t.limit})")
            continue
        h = t.materialize_cover(n)
        cover, bidir = check_cover(h), check_bidirectional(h)
        ok = ok and cover and bidir
        bad = sum(cover_violations(h).values())
        lines.append(f"phi_{n}: cover={'PASS' if cover else 'FAIL'} "
                     f"bidirectional={'PASS' if bidir else 'FAIL'} violations={bad}")
    _emit(args, "\n".join(lines) + "\n", "build.txt")
    if not ok:
        raise _Fail("a cover check failed")


def cmd_verify(args):
    names = SUITES if args.suite == "all" else (args.suite,)
    cfg = load_config(args.config) if args.config else TowerConfig()
    failed = []
    summary = []
    for name in names:
        records = []
        passed = total = 0
        for report in run_suite(name, cfg, args.depth, args.level, args.limit, args.seed):
            records.append(report.to_record())
            total += 1
            if report:
                passed += 1
            elif not failed:
                failed.append(report.to_record())
        summary.append(f"suite={name} records={total} passed={passed} failed={total - passed}")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"verify_{name}.txt")
            with open(path, "w", newline="\n") as fh:
                fh.write("\n".join(records) + "\n")
        else:
            sys.stdout.write("\n".join(records) + "\n")
    sys.stdout.write("\n".join(summary) + "\n")
    if failed:
        raise _Fail(f"first failure: {failed[0]}")


def cmd_orbit(args):
    N = args.level if args.level is not None else 1
    t = _tower_for_anchors(args, [args.anchor])
    a = parse_anchor(t, args.anchor)
    if args.steps is None:
        if a.is_fixed:
            raise ValueError("the fixed point needs --steps")
        k = horizon(t, a)
    else:
        k = args.steps
    trace = orbit_trace(t, a, N, k)
    if args.format == "report":
        text = " ".join(str(v) for v in trace) + "\n"
    else:
        text = trace_csv(trace)
    _emit(args, text, "orbit.csv")


def cmd_pair(args):
    N = args.level if args.level is not None else 1
    t = _tower_for_anchors(args, [args.x, args.y])
    x, y = parse_anchor(t, args.x), parse_anchor(t, args.y)
    r = separation_report(t, x, y, N, args.steps)
    if args.format == "csv":
        head = "x,y,N,horizon,joint_base,divergence,min_distance,max_distance,degree_split"
        vals = [x, y, N, r.horizon, r.first_joint_base, r.first_divergence,
                r.min_distance, r.max_distance, r.first_degree_split]
        text = head + "\n" + ",".join("" if v is None else str(v) for v in vals) + "\n"
    else:
        text = r.to_record() + "\n"
    _emit(args, text, "pair.txt")


def cmd_dense(args):
    N = args.level if args.level is not None else 1
    D = args.depth if args.depth is not None else N + 2
    t = _tower(args, depth=max(D, _config(args).depth))
    a = dense_anchor(t, N, D)
    lines = [f"anchor={a}", "thread=" + ",".join(str(v) for v in thread(t, a))]
    ok = True
    for n in range(N, D - 1):
        covered = coverage_check(t, a, n)
        ok = ok and covered
        lines.append(f"coverage level={n} verdict={'PASS' if covered else 'FAIL'}")
    _emit(args, "\n".join(lines) + "\n", "dense.txt")
    if not ok:
        raise _Fail("coverage failed")


def cmd_witness(args):
    N = args.level if args.level is not None else 1
    t = _tower_for_anchors(args, [args.anchor])
    a = parse_anchor(t, args.anchor)
    try:
        w = equicontinuity_witness(t, a, N)
    except NoDivergenceWithinHorizon as exc:
        raise _Fail(str(exc)) from None
    _emit(args, w.to_record() + "\n", "witness.txt")


def cmd_export(args):
    n = args.level if args.level is not None else 1
    fmt = "dot" if args.dot else args.format or "dot"
    t = _tower(args, depth=max(n + (1 if args.cover else 0), _config(args).depth))
    if args.cover:
        h = t.materialize_cover(n)
        pairs = sorted(h.vmap.items())
        text = "source,target\n" + "".join(f"{u},{v}\n" for u, v in pairs)
        _emit(args, text, f"phi_{n}.csv")
        return
    g = t.materialize_level(n)
    if fmt == "csv":
        e = g.vertex_ids[g.edge_index_pairs]
        text = "source,target\n" + "".join(f"{u},{v}\n" for u, v in e.tolist())
        _emit(args, text, f"level_{n}.csv")
    else:
        _emit(args, to_dot(g, f"G{n}"), f"level_{n}.dot")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="tower config file (key = value lines)")
    common.add_argument("--depth", type=int, help="tower depth (overrides the config)")
    common.add_argument("--limit", type=int, default=DEFAULT_LIMIT,
                        help="largest explicit object to materialize")
    common.add_argument("--level", type=int, help="resolution level N")
    common.add_argument("--steps", type=int, help="number of steps k")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for sampled sweeps")
    common.add_argument("--out", help="output file, or directory for report files")
    common.add_argument("--format", choices=("csv", "dot", "report"))

    p = argparse.ArgumentParser(prog="covertower", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="summarize and validate a tower").set_defaults(
        func=cmd_build)
    v = sub.add_parser("verify", parents=[common], help="run verifier suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.set_defaults(func=cmd_verify)
    o = sub.add_parser("orbit", parents=[common], help="level-N trace of an anchor")
    o.add_argument("anchor")
    o.set_defaults(func=cmd_orbit)
    pr = sub.add_parser("pair", parents=[common], help="separation report of two anchors")
    pr.add_argument("x")
    pr.add_argument("y")
    pr.set_defaults(func=cmd_pair)
    sub.add_parser("dense", parents=[common], help="first-preimage anchor and coverage").set_defaults(
        func=cmd_dense)
    w = sub.add_parser("witness", parents=[common], help="cylinder-mate that separates")
    w.add_argument("anchor")
    w.set_defaults(func=cmd_witness)
    e = sub.add_parser("export", parents=[common], help="DOT or CSV of a level graph")
    e.add_argument("--dot", action="store_true", help="same as --format dot")
    e.add_argument("--cover", action="store_true", help="export phi_n as a vertex map")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.limit < 1:
        print("error: --limit must be at least 1", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except _Fail as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HorizonExhausted as exc:
        print(f"error: {exc} (maximal usable k = {exc.max_steps})", file=sys.stderr)
        return 2
    except ExplicitLimitExceeded as exc:
        print(f"error: {exc}; raise --limit", file=sys.stderr)
        return 2
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
