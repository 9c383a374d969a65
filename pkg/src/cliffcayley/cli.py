"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage or parse error.  Every run
writes a JSON manifest (command line, version, seed, elapsed time, output
digests) to stderr, or to ``--manifest PATH``.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
import time
from pathlib import Path

from . import __version__, core, engine, graphs, presentation, states
from .core import WordParseError, parse_word
from .engine import EXACT, MOD_PHASE

FULL_GENS = "H1,H2,P1,P2,C12,C21"


class UsageError(Exception):
    pass


def _labels(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _mode(args, default: str = EXACT) -> str:
    if getattr(args, "mod_phase", False):
        return MOD_PHASE
    if getattr(args, "exact", False):
        return EXACT
    return default


def _resolve_state(spec: str, n: int | None, seed: int, notes: dict):
    """``generic N`` picks the first seeded random state with trivial stabilizer in the full group."""
    parts = spec.split()
    if parts and parts[0].lower() == "generic":
        if len(parts) != 2 or not parts[1].isdigit():
            raise UsageError(f"malformed state spec {spec!r}")
        m = int(parts[1])
        g = engine.enumerate_group(FULL_GENS, m, MOD_PHASE)
        v, used = states.find_generic_state(g, m, seed)
        notes["generic_seed"] = used
        return v
    v = states.preset_state(spec)
    if n is not None and v.n != n:
        raise UsageError(f"state has {v.n} qubits but --qubits is {n}")
    return v


class Runner:
    def __init__(self, args, out):
        self.args = args
        self.out = out
        self.files: dict[str, str] = {}
        self.notes: dict = {}

    def emit(self, text: str = "") -> None:
        self.out.write(text + "\n")

    def emit_json(self, obj) -> None:
        self.out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")

    def write_file(self, path: str, data: bytes) -> None:
        Path(path).write_bytes(data)
        self.files[path] = hashlib.sha256(data).hexdigest()

    # --- subcommands -----------------------------------------------------

    def verify_relations(self):
        report = presentation.verify_all(self.args.qubits, all_pairs=self.args.all_pairs)
        if self.args.json:
            for r in report.rows:
                self.emit_json({"name": r.name, "qubits": list(r.qubits), "passed": r.passed})
        else:
            self.out.write(report.text())
        return 0 if report.ok else 1

    def enumerate(self):
        g = engine.enumerate_group(self.args.gens, self.args.qubits, _mode(self.args), cap=self.args.cap)
        if self.args.json:
            self.emit_json({"generators": g.labels, "n": g.n, "phase_mode": g.phase_mode, "order": g.order})
        else:
            self.emit(str(g.order))
        return 0

    def table1(self):
        rows = engine.subgroup_table(2, sources=self.args.sources, threads=self.args.threads)
        head = ["generators", "order", "diameter", "factor", "mod-phase diameter"]
        if self.args.json:
            for r in rows:
                self.emit_json(dict(zip(head, r.cells())))
            return 0
        widths = [24, 7, 9, 7, 19]
        self.emit("".join(h.ljust(w) for h, w in zip(head, widths)).rstrip())
        for r in rows:
            self.emit("".join(c.ljust(w) for c, w in zip(r.cells(), widths)).rstrip())
        return 0

    def diameter(self):
        g = engine.enumerate_group(self.args.gens, self.args.qubits, _mode(self.args))
        d = engine.diameter(engine.build_cayley(g), sources=self.args.sources, threads=self.args.threads)
        if self.args.json:
            self.emit_json({"generators": g.labels, "phase_mode": g.phase_mode, "order": g.order, "diameter": d})
        else:
            self.emit(str(d))
        return 0

    def shortest_word(self):
        mode = _mode(self.args)
        g = engine.enumerate_group(self.args.gens, self.args.qubits, mode)
        target = parse_word(self.args.target)
        if target.max_qubit > g.n:
            raise UsageError(f"target acts outside {g.n} qubit(s)")
        w = engine.shortest_word(g, core.word_matrix(target, g.n))
        if self.args.json:
            self.emit_json({"target": str(target), "word": str(w), "length": len(w)})
        else:
            self.emit(f"{len(w)}\t{w if len(w) else '1'}")
        return 0

    def _group_and_state(self, default_mode: str):
        v = _resolve_state(self.args.state, self.args.qubits, self.args.seed, self.notes)
        g = engine.enumerate_group(self.args.group, v.n, _mode(self.args, default_mode))
        return g, v

    def stabilizer(self):
        g, v = self._group_and_state(EXACT)
        st = states.stabilizer_subgroup(g, v)
        words = [str(w) if len(w) else "1" for w in st.words()]
        if self.args.json:
            self.emit_json({"order": st.order, "members": st.members.tolist(), "words": words, "mode": st.mode})
        else:
            self.emit(str(st.order))
            for w in words:
                self.emit(w)
        return 0

    def _reachability_graph(self):
        g, v = self._group_and_state(MOD_PHASE)
        q = states.quotient_graph(g, v)
        lg = q.to_labeled()
        if getattr(self.args, "strip_loops", False):
            lg = graphs.strip_trivial_loops(lg)
        return q, lg

    def reachability(self):
        q, lg = self._reachability_graph()
        data = graphs.export_graph(lg, self.args.format)
        if self.args.output:
            self.write_file(self.args.output, data)
            self.emit(f"{q.num_vertices} vertices, stabilizer order {q.stabilizer.order}")
        else:
            self.out.write(data.decode("utf-8"))
        return 0

    def components(self):
        _, lg = self._reachability_graph()
        comps = graphs.components_by_labels(lg, _labels(self.args.labels))
        if self.args.json:
            self.emit_json({"sizes": comps.sizes})
        else:
            self.emit(" ".join(map(str, comps.sizes)))
        return 0

    def overlay(self):
        _, lg = self._reachability_graph()
        c = graphs.overlay_contraction(lg, _labels(self.args.core), _labels(self.args.overlay))
        pairs = [[a, b, m] for (a, b), m in c.super_edges.items()]
        if self.args.json:
            self.emit_json({"sizes": c.sizes, "super_edges": pairs, "self_links": c.self_links,
                            "complete": c.is_complete()})
        else:
            self.emit("sizes: " + " ".join(map(str, c.sizes)))
            for a, b, m in pairs:
                self.emit(f"{a} -- {b}: {m}")
            self.emit("self links: " + " ".join(map(str, c.self_links)))
            self.emit(f"complete: {'yes' if c.is_complete() else 'no'}")
        return 0

    def isomorphic(self):
        a = graphs.import_graph(Path(self.args.file_a).read_bytes())
        b = graphs.import_graph(Path(self.args.file_b).read_bytes())
        r = graphs.iso_test(a, b, self.args.budget)
        if self.args.json:
            self.emit_json({"status": r.status, "nodes": r.nodes, "reason": r.reason})
        else:
            self.emit(r.status + (f" ({r.reason})" if r.reason else ""))
        return 0

    def export(self):
        mode = _mode(self.args)
        if self.args.state:
            v = _resolve_state(self.args.state, self.args.qubits, self.args.seed, self.notes)
            g = engine.enumerate_group(self.args.gens, v.n, mode)
            lg = states.quotient_graph(g, v).to_labeled()
        else:
            g = engine.enumerate_group(self.args.gens, self.args.qubits, mode)
            lg = engine.build_cayley(g).to_labeled()
        data = graphs.export_graph(lg, self.args.format)
        if self.args.output:
            self.write_file(self.args.output, data)
        else:
            self.out.write(data.decode("utf-8"))
        return 0

    def count_stabilizer_states(self):
        self.emit(str(states.stabilizer_state_count(self.args.n)))
        return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable rows")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0, help="seed for generic-state search")
    common.add_argument("--manifest", metavar="PATH", help="write the run manifest here instead of stderr")

    p = argparse.ArgumentParser(prog="cliffcayley", description="Clifford group Cayley graphs and reachability quotients.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add("verify-relations", help="check every catalogue relation")
    s.add_argument("--qubits", type=int, default=2)
    s.add_argument("--all-pairs", action="store_true")

    for name in ("enumerate", "diameter"):
        s = add(name)
        s.add_argument("--gens", required=True)
        s.add_argument("--qubits", type=int)
        s.add_argument("--mod-phase", action="store_true")
        if name == "enumerate":
            s.add_argument("--cap", type=int, default=engine.DEFAULT_CAP)
        else:
            s.add_argument("--sources", choices=("all", "identity"), default="all")

    s = add("table1", help="recompute the two-qubit subgroup survey")
    s.add_argument("--sources", choices=("all", "identity"), default="identity")

    s = add("shortest-word")
    s.add_argument("--gens", required=True)
    s.add_argument("--qubits", type=int)
    s.add_argument("--target", required=True)
    s.add_argument("--mod-phase", action="store_true")

    s = add("stabilizer")
    s.add_argument("--group", required=True)
    s.add_argument("--qubits", type=int)
    s.add_argument("--state", required=True)
    s.add_argument("--mod-phase", action="store_true")

    for name in ("reachability", "components", "overlay"):
        s = add(name)
        s.add_argument("--group", required=True)
        s.add_argument("--qubits", type=int)
        s.add_argument("--state", required=True)
        s.add_argument("--exact", action="store_true", help="keep global phases (default quotients by them)")
        s.add_argument("--strip-loops", action="store_true")
        if name == "reachability":
            s.add_argument("--format", choices=("json", "dot"), default="json")
            s.add_argument("--output")
        elif name == "components":
            s.add_argument("--labels", required=True)
        else:
            s.add_argument("--core", required=True)
            s.add_argument("--overlay", required=True)

    s = add("isomorphic")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--budget", type=int, default=10**6)

    s = add("export")
    s.add_argument("--gens", required=True)
    s.add_argument("--qubits", type=int)
    s.add_argument("--state")
    s.add_argument("--mod-phase", action="store_true")
    s.add_argument("--format", choices=("json", "dot"), default="json")
    s.add_argument("--output")

    s = add("count-stabilizer-states")
    s.add_argument("n", type=int)
    return p


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    buf = io.StringIO()
    runner = Runner(args, buf)
    handler = getattr(runner, args.command.replace("-", "_"))
    try:
        code = handler()
    except (WordParseError, UsageError) as exc:
        stderr.write(f"{parser.prog} {args.command}: error: {exc}\n")
        code = 2
    except (ValueError, KeyError, ArithmeticError, RuntimeError, OSError) as exc:
        stderr.write(f"{parser.prog} {args.command}: {exc}\n")
        code = 1
    text = buf.getvalue()
    stdout.write(text)
    manifest = {
        "argv": argv,
        "version": __version__,
        "seed": args.seed,
        "elapsed_s": round(time.perf_counter() - start, 3),
        "exit_code": code,
        "stdout_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "files": runner.files,
    }
    manifest.update(runner.notes)
    line = json.dumps(manifest, sort_keys=True) + "\n"
    if args.manifest:
        Path(args.manifest).write_text(line, encoding="utf-8")
    else:
        stderr.write(line)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
