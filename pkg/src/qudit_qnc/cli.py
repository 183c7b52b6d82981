"""Command-line front end.

Subcommands: ``run``, ``example``, ``audit``, ``validate-rules``. Exit status
is 0 when every check passes, 1 when checks ran and failed, 2 on a usage or
configuration error.

Randomness comes from numpy's ``default_rng(seed)``, i.e. the PCG64 bit
generator. For ``run`` the draws happen in this order: phi (if random),
psi (if random), keys (if random), P1's Bell measurement, P2's Bell
measurement, then the sink measurements. A random state takes d real parts
then d imaginary parts from ``standard_normal``; random keys take two
``integers(0, d)`` draws.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import report
from .audit import SUPPORTED_DIMENSIONS, audit_all
from .butterfly import EDGES, NodeId, SharedKeys, run_protocol, verify_recovery
from .core import StateVector, as_dimension, basis_state, make_state
from .errors import QuditError
from .frame import check_u_translation, cx_forms_agree, validate_rule
from .teleport import BellOutcome

RNG_NAME = "numpy.random.default_rng (PCG64)"
GATES = ("X", "Y", "Z", "H", "S", "T", "CX")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    d: int
    seed: int = 0
    phi: str = "random"
    psi: str = "random"
    keys: str = "random"
    forced_outcomes: Optional[str] = None
    output_path: Optional[str] = None
    tolerance: float = 1e-9
    swap_sinks: bool = False


def _ints(text: str, n: int, what: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be {n} comma-separated integers, got {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} must have {n} entries, got {len(vals)}")
    return vals


def parse_state(spec: str, dim, rng: np.random.Generator) -> StateVector:
    """Parse ``basis:k``, ``uniform``, ``random`` or a comma list of complex amplitudes."""
    dim = as_dimension(dim)
    d = dim.d
    if spec == "random":
        re = rng.standard_normal(d)
        im = rng.standard_normal(d)
        return make_state(dim, re + 1j * im)
    if spec == "uniform":
        return make_state(dim, np.ones(d))
    if spec.startswith("basis:"):
        k = _ints(spec[len("basis:"):], 1, "basis index")[0]
        if not 0 <= k < d:
            raise UsageError(f"basis index {k} out of range for d={d}")
        return basis_state(dim, k)
    try:
        amps = [complex(x.replace(" ", "")) for x in spec.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse state {spec!r}") from None
    if len(amps) != d:
        raise UsageError(f"state needs {d} amplitudes, got {len(amps)}")
    try:
        return make_state(dim, amps)
    except QuditError as e:
        raise UsageError(str(e)) from None


def _check_d(d: int) -> None:
    if d < 2:
        raise UsageError(f"d must be at least 2, got {d}")


def cmd_run(cfg: RunConfig, command: str = "run") -> dict:
    _check_d(cfg.d)
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    dim = as_dimension(cfg.d)
    d = cfg.d
    rng = np.random.default_rng(cfg.seed)
    phi = parse_state(cfg.phi, dim, rng)
    psi = parse_state(cfg.psi, dim, rng)
    if cfg.keys == "random":
        keys = SharedKeys(*(int(v) for v in rng.integers(0, d, size=2)))
    else:
        keys = SharedKeys(*_ints(cfg.keys, 2, "keys"))
    forced = None
    if cfg.forced_outcomes is not None:
        m = _ints(cfg.forced_outcomes, 4, "forced outcomes")
        if any(not 0 <= v < d for v in m):
            raise UsageError(f"forced outcomes must lie in 0..{d - 1}")
        forced = (BellOutcome(m[0], m[1]), BellOutcome(m[2], m[3]))

    trace = run_protocol(dim, phi, psi, keys, rng, forced, swap_sinks=cfg.swap_sinks)
    rec = verify_recovery(trace)
    m1, m2 = trace.outcomes
    q1, q2 = trace.nodes[NodeId.Q1], trace.nodes[NodeId.Q2]
    results = {
        "inputs": {"phi": phi, "psi": psi},
        "keys": {"s1": keys.s1, "s2": keys.s2},
        "outcomes": {"M1": [m1.m1, m1.m2], "M2": [m2.m1, m2.m2], "forced": forced is not None},
        "messages": [
            {
                "step": msg.step,
                "edge": msg.edge.value,
                "from": EDGES[msg.edge][0].value,
                "to": EDGES[msg.edge][1].value,
                "particle": msg.label,
                "amplitudes": [[a["index"], a["re"], a["im"]] for a in report.amplitude_table(msg.state)],
            }
            for msg in trace.messages
        ],
        "steps": [
            {
                "step": snap.step,
                "groups": [
                    {"particles": list(g.labels), "holders": list(g.holders), "amplitudes": g.state}
                    for g in snap.groups
                ],
            }
            for snap in trace.snapshots
        ],
        "sinks": {
            node.value: {
                "carriers": list(s.carriers),
                "decryption_key": [s.derived_key.p, s.derived_key.q],
                "measurement": list(s.measurement),
                "recovered": s.recovered,
            }
            for node, s in ((NodeId.Q1, q1), (NodeId.Q2, q2))
        },
        "fidelity": {"Q1": rec.fidelity_q1, "Q2": rec.fidelity_q2},
        "phase": {
            "Q1": rec.phase_q1,
            "Q2": rec.phase_q2,
            "expected_Q1": rec.expected_phase_q1,
            "expected_Q2": rec.expected_phase_q2,
            "match": rec.phases_match(cfg.tolerance),
        },
    }
    config = {k: v for k, v in asdict(cfg).items() if k != "output_path"}
    config["rng"] = RNG_NAME
    return report.build(command, config, results, rec.passes(cfg.tolerance))


def cmd_audit(
    d: int,
    tolerance: float = 1e-9,
    leak_keys: bool = False,
    keys: str = "1,1",
    forced_outcomes: str = "0,0,0,0",
    conditional: Optional[bool] = None,
) -> dict:
    if d not in SUPPORTED_DIMENSIONS:
        raise UsageError(f"audit supports d in {SUPPORTED_DIMENSIONS.start}..{SUPPORTED_DIMENSIONS.stop - 1}")
    leak = None
    if leak_keys:
        k = _ints(keys, 2, "keys")
        m = _ints(forced_outcomes, 4, "forced outcomes")
        leak = (SharedKeys(*k), (BellOutcome(m[0], m[1]), BellOutcome(m[2], m[3])))
    reports = audit_all(d, tolerance, conditional=conditional, leak=leak)
    D = report.Distance
    rows = []
    for r in reports:
        rows.append(
            {
                "scenario": r.scenario.tag,
                "edges": sorted(e.value for e in r.scenario.edges),
                "particles": [lab for lab, _ in r.scenario.particles],
                "test": "joint" if r.scenario.joint else "each particle",
                "runs": r.runs,
                "distance": D(r.distance),
                "joint_distance": D(r.joint_distance),
                "marginal_distances": [D(x) for x in r.marginal_distances],
                "keys_only_distance": None if r.keys_only_distance is None else D(r.keys_only_distance),
                "passes": r.passes,
            }
        )
    config = {"d": d, "tolerance": tolerance, "leak_keys": leak_keys}
    if leak_keys:
        config.update({"keys": keys, "forced_outcomes": forced_outcomes})
    return report.build("audit", config, {"scenarios": rows}, all(r.passes for r in reports))


def cmd_validate_rules(d_set: Sequence[int], convention: str = "xz") -> dict:
    for d in d_set:
        _check_d(d)
    rows, translation = [], []
    ok = True
    for d in d_set:
        for g in GATES:
            r = validate_rule(g, d, convention)
            if r.status != "unsupported":
                ok &= r.has_working_update
            rows.append(
                {
                    "gate": g,
                    "d": d,
                    "status": r.status,
                    "holds_exactly": r.holds_exactly,
                    "holds_up_to_phase": r.holds_up_to_phase,
                    "residual_phase": r.residual_phase,
                    "paper_homomorphic": r.paper_homomorphic,
                    "stated_update": r.paper_update,
                    "corrected_update": r.corrected_update,
                    "certified_homomorphic": r.certified_homomorphic,
                    "cases": r.cases_checked,
                    "notes": list(r.notes),
                }
            )
        t = check_u_translation(d)
        translation.append(
            {
                "d": d,
                "U_equals_Xdag_Z_exactly": t.exact,
                "up_to_phase": t.up_to_phase,
                "phase_is_omega_minus_ab": t.phase_is_omega_minus_ab,
                "U_equals_Z_Xdag_exactly": t.reordered_exact,
                "cx_forms_agree_stated": cx_forms_agree(d, "paper"),
                "cx_forms_agree_certified": cx_forms_agree(d, "certified"),
            }
        )
    config = {"d": list(d_set), "convention": convention}
    return report.build("validate-rules", config, {"rules": rows, "translation": translation}, ok)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qudit-qnc", description="Qudit QFHE butterfly-network simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--tolerance", type=float, default=1e-9)

    for name in ("run", "example"):
        sp = sub.add_parser(name, help="run one protocol instance" if name == "run" else "the d=3 worked example")
        sp.add_argument("--d", type=int, default=3 if name == "example" else None, required=name == "run")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--phi", default="random")
        sp.add_argument("--psi", default="random")
        sp.add_argument("--keys", default="2,1" if name == "example" else "random")
        sp.add_argument("--force-outcomes", default="0,1,1,2" if name == "example" else None)
        sp.add_argument("--swap-sinks", action="store_true")
        common(sp)

    sp = sub.add_parser("audit", help="exhaustive intercept audit")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--leak-keys", action="store_true", help="negative control: attacker knows keys and outcomes")
    sp.add_argument("--keys", default="1,1", help="keys known to the attacker with --leak-keys")
    sp.add_argument("--force-outcomes", default="0,0,0,0", help="outcomes known to the attacker with --leak-keys")
    sp.add_argument("--conditional", choices=("auto", "on", "off"), default="auto",
                    help="keys-only diagnostic (auto: on for d <= 4)")
    common(sp)

    sp = sub.add_parser("validate-rules", help="check key-update rules against the matrix oracle")
    sp.add_argument("--d", default="2,3,5", help="comma-separated dimensions")
    sp.add_argument("--convention", choices=("xz", "u"), default="xz")
    common(sp)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command in ("run", "example"):
            cfg = RunConfig(
                d=args.d,
                seed=args.seed,
                phi=args.phi,
                psi=args.psi,
                keys=args.keys,
                forced_outcomes=args.force_outcomes,
                output_path=args.out,
                tolerance=args.tolerance,
                swap_sinks=args.swap_sinks,
            )
            doc = cmd_run(cfg, args.command)
        elif args.command == "audit":
            conditional = {"auto": None, "on": True, "off": False}[args.conditional]
            doc = cmd_audit(args.d, args.tolerance, args.leak_keys, args.keys, args.force_outcomes, conditional)
        else:
            doc = cmd_validate_rules(_ints(args.d, len(args.d.split(",")), "--d"), args.convention)
    except (UsageError, QuditError) as e:
        print(f"qudit-qnc: error: {e}", file=sys.stderr)
        return 2
    text = report.render(doc, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0 if doc["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
