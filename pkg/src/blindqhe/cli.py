"""Command-line front end.

Exit codes: 0 all verified / passed, 1 a protocol or verification failure,
2 a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .circuits import CircuitParseError, non_clifford_lines, parse_circuit, simulate_plain
from .pauli_crypto import PauliKey, bitstring, to_bits
from .protocols import KeySearchError, run_protocol1, run_protocol2
from .statevector import fidelity, new_basis_state, new_uniform

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PLAIN_STATE = "|+>|+>"


@dataclass
class RunReport:
    mode: str
    seed: int
    ek: str
    y: str
    d: str
    c: str
    encrypted_result: str
    dk: str
    decrypted: str
    verified: bool
    elapsed_ms: float


@dataclass
class CliffordReport:
    mode: str
    seed: int
    circuit: str
    n: int
    input: str
    ek: str
    dk: str
    attempts: int
    fidelity: float
    verified: bool
    elapsed_ms: float


# (x0, z0, y1, d1, c1, encrypted result, dk, decrypted result)
TABLE2_ROWS = [
    ("100", "110", "1010110", "0111001", "1110111", "01", "11", "10"),
    ("100", "010", "1110011", "1011010", "1000010", "00", "10", "10"),
    ("100", "100", "0100001", "0000101", "0000101", "01", "11", "10"),
    ("010", "110", "0000011", "0111110", "1001101", "11", "01", "10"),
    ("110", "110", "0101100", "0001010", "1011101", "10", "00", "10"),
]


class UsageError(ValueError):
    pass


def _report_from_result(res, seed: int, elapsed: float, mode: str = "search") -> RunReport:
    return RunReport(
        mode=mode,
        seed=seed,
        ek=bitstring(res.ek.x) + bitstring(res.ek.z),
        y=bitstring(res.y),
        d=bitstring(res.d),
        c=bitstring(res.c),
        encrypted_result=bitstring(res.encrypted_result),
        dk=bitstring(res.dk),
        decrypted=bitstring(res.decrypted),
        verified=res.verified,
        elapsed_ms=round(elapsed * 1000, 3),
    )


def _split_ek(text: str) -> PauliKey:
    bits = to_bits(text)
    if len(bits) not in (4, 6):
        raise UsageError(f"--ek takes x then z over 2 or 3 wires (4 or 6 bits), got {len(bits)}")
    return PauliKey.from_vector(bits)


def _split_evk(text: str, gadgets: int = 7) -> tuple[tuple, tuple]:
    bits = to_bits(text)
    if len(bits) != 2 * gadgets:
        raise UsageError(f"--evk takes y then d ({2 * gadgets} bits), got {len(bits)}")
    return bits[:gadgets], bits[gadgets:]


def _search_trial(job: tuple) -> tuple[RunReport, str]:
    target, seed, script_c, ek, evk, transcript_json, amplitudes = job
    t0 = time.perf_counter()
    res = run_protocol1(target, seed=seed, scripted_c=script_c, forced_ek=ek, forced_yd=evk)
    elapsed = time.perf_counter() - t0
    tr = res.transcript.to_json(amplitudes) if transcript_json else res.transcript.serialize()
    return _report_from_result(res, seed, elapsed), tr


def _render(rows: list, fmt: str, columns: list[str] | None = None) -> str:
    dicts = [asdict(r) for r in rows]
    if fmt == "json":
        return json.dumps(dicts, indent=2) + "\n"
    columns = columns or ([f.name for f in fields(rows[0])] if rows else [])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(dicts)
        return buf.getvalue()
    widths = {c: max([len(c)] + [len(str(d[c])) for d in dicts]) for c in columns}
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    lines += ["  ".join(str(d[c]).ljust(widths[c]) for c in columns) for d in dicts]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_search(args) -> int:
    target = to_bits(args.target)
    if len(target) != 2:
        raise UsageError(f"--target must be 2 bits, got {args.target!r}")
    script_c = to_bits(args.script_c) if args.script_c is not None else None
    if script_c is not None and len(script_c) != 7:
        raise UsageError(f"--script-c must have one bit per gadget (7), got {len(script_c)}")
    ek = _split_ek(args.ek) if args.ek else None
    evk = _split_evk(args.evk) if args.evk else None
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    transcript_json = bool(args.transcript and args.transcript.endswith(".json"))
    jobs = [
        (target, args.seed + i, script_c, ek, evk, transcript_json, args.amplitudes)
        for i in range(args.trials)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_search_trial, jobs))
    else:
        results = [_search_trial(j) for j in jobs]
    reports = [r for r, _ in results]
    if args.transcript:
        Path(args.transcript).write_text("".join(t for _, t in results))
    cols = ["seed", "ek", "y", "d", "c", "encrypted_result", "dk", "decrypted", "verified"]
    _emit(_render(reports, args.format, None if args.format != "table" else cols), args.out)
    return EXIT_OK if all(r.verified for r in reports) else EXIT_FAIL


def check_table2_rows(rows=TABLE2_ROWS) -> list[dict]:
    """Replay each row with forced inputs and compare the three outcome columns."""
    out = []
    for k, (x0, z0, y1, d1, c1, enc, dk, dec) in enumerate(rows, start=1):
        res = run_protocol1("10", forced_ek=PauliKey(x0, z0), forced_yd=(y1, d1), scripted_c=c1)
        got = {
            "encrypted_result": bitstring(res.encrypted_result),
            "dk": bitstring(res.dk),
            "decrypted": bitstring(res.decrypted),
        }
        want = {"encrypted_result": enc, "dk": dk, "decrypted": dec}
        diff = {key: f"expected {want[key]} got {got[key]}" for key in want if want[key] != got[key]}
        out.append({
            "row": k, "plain_state": PLAIN_STATE, "ek": f"x0={x0} z0={z0}",
            "evk": f"y1={y1} d1={d1}", "c1": c1, **got,
            "status": "PASS" if not diff else "FAIL", "diff": diff,
        })
    return out


def cmd_table2(args) -> int:
    rows = check_table2_rows()
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        cols = ["row", "plain_state", "ek", "evk", "c1", "encrypted_result", "dk", "decrypted", "status"]
        flat = [{**r, "diff": "; ".join(f"{k}: {v}" for k, v in r["diff"].items())} for r in rows]
        if args.format == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=cols + ["diff"], lineterminator="\n")
            w.writeheader()
            w.writerows(flat)
            text = buf.getvalue()
        else:
            widths = {c: max(len(c), *(len(str(r[c])) for r in flat)) for c in cols}
            lines = ["  ".join(c.ljust(widths[c]) for c in cols)]
            for r in flat:
                line = "  ".join(str(r[c]).ljust(widths[c]) for c in cols)
                lines.append(line + (f"  {r['diff']}" if r["diff"] else ""))
            passed = sum(r["status"] == "PASS" for r in rows)
            lines.append(f"{passed}/{len(rows)} rows match")
            text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(r["status"] == "PASS" for r in rows) else EXIT_FAIL


def cmd_clifford(args) -> int:
    path = Path(args.circuit)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read circuit file: {exc}") from None
    bad = non_clifford_lines(text)
    if bad:
        lineno, line = bad[0]
        raise UsageError(f"{path}:{lineno}: non-Clifford gate {line!r}; only Clifford circuits are supported")
    circuit = parse_circuit(text)
    w = circuit.num_wires
    n = args.n if args.n is not None else w
    if not 1 <= n <= min(3, w):
        raise UsageError(f"--n must be between 1 and {min(3, w)}")
    if args.input == "uniform":
        plain = new_uniform(w)
    else:
        bits = to_bits(args.input)
        if len(bits) != w:
            raise UsageError(f"--input needs {w} bits for this circuit, got {len(bits)}")
        plain = new_basis_state(w, bits)
    t0 = time.perf_counter()
    res = run_protocol2(circuit, plain, n=n, seed=args.seed)
    elapsed = time.perf_counter() - t0
    f = fidelity(res.state, simulate_plain(circuit, plain))
    report = CliffordReport(
        mode="clifford", seed=args.seed, circuit=str(path), n=n, input=args.input,
        ek=bitstring(res.ek.vector()), dk=bitstring(res.dk.vector()), attempts=res.attempts,
        fidelity=f, verified=f >= 1 - 1e-9, elapsed_ms=round(elapsed * 1000, 3),
    )
    if args.transcript:
        tr = res.transcript
        Path(args.transcript).write_text(
            tr.to_json(args.amplitudes) if args.transcript.endswith(".json") else tr.serialize()
        )
    _emit(_render([report], args.format), args.out)
    return EXIT_OK if report.verified else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .checks import run_all

    results = run_all(args.seed)
    if args.json or args.format == "json":
        text = json.dumps({r.name: {"passed": r.passed, "detail": r.detail} for r in results}, indent=2) + "\n"
    else:
        text = "".join(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail}\n" for r in results)
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "table", "csv"], default="table")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="blindqhe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common], help="run blind Grover search trials")
    p.add_argument("--target", required=True, help="2-bit search target, e.g. 10")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--script-c", help="force the 7 gadget measurement outcomes")
    p.add_argument("--ek", help="encryption key, x bits then z bits")
    p.add_argument("--evk", help="evaluation key, 7 y bits then 7 d bits")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    p.add_argument("--transcript", help="write transcripts here (.json for JSON)")
    p.add_argument("--amplitudes", action="store_true", help="include hex amplitude dumps in JSON transcripts")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("table2", parents=[common], help="replay the reference outcome table")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("clifford", parents=[common], help="evaluate a Clifford circuit compactly")
    p.add_argument("--circuit", required=True, help="circuit file in the line format")
    p.add_argument("--input", default="uniform", help="basis-state bits or 'uniform'")
    p.add_argument("--n", type=int, help="number of encrypted wires (trailing wires, at most 3)")
    p.add_argument("--transcript", help="write the transcript here (.json for JSON)")
    p.add_argument("--amplitudes", action="store_true")
    p.set_defaults(func=cmd_clifford)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    p.add_argument("--json", action="store_true", help="machine-readable pass/fail map")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CircuitParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeySearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
