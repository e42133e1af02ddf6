"""Configuration-driven command line front end.

One JSON run-config drives every subcommand (evolve, measure, tree, lz,
cost, validate). The schema is strict: unknown keys are rejected and
every referenced id must resolve, so a config is a complete, diffable
record of an experiment. All randomness flows from the single config
seed (or its --seed override); outputs are byte-stable for a fixed
config and seed.

Exit codes: 0 success, 2 config error, 3 runtime error, 4 a scattering
node exhausted its retries.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import criteria as crit
from . import io as out_io
from . import lzcost, symmetry, tree, weakmeas
from .errors import ConfigError, NodeExhausted, SimulationError
from .evolution import (DensityMatrix, autocorrelation, default_step_count,
                        propagate, spectrum)
from .grid import GridSpec, ParticleSet, enumerate_basis
from .hamiltonian import (Schedule, ScheduledHamiltonian, TrapSpec,
                          build_coulomb, build_kinetic, build_trap,
                          zero_block)
from .units import unit_convert

SCHEMA_VERSION = 1

_TOP_KEYS = {"schema_version", "seed", "grid", "particles", "symmetry",
             "hamiltonian", "schedule", "evolve", "criteria", "measure",
             "tree", "lz", "cost", "validate"}

_SECTION_KEYS = {
    "grid": {"points_per_axis", "dims", "box_length"},
    "particles": {"n_el", "nuclear_masses", "nuclear_charges",
                  "electron_spin", "nuclear_spin", "cap"},
    "symmetry": {"bosonic_sets", "fermionic_sets"},
    "hamiltonian": {"subsystem_a", "subsystem_b", "softening",
                    "include_kinetic", "include_coulomb", "trap"},
    "schedule": {"s0", "s1", "f_shape", "g_shape"},
    "evolve": {"s_from", "s_to", "n_steps", "initial", "autocorrelation"},
    "measure": {"criterion", "delta", "initial", "repeat"},
    "tree": {"leaves", "leaf_ids", "arity", "children", "root", "leaf_dim",
             "leaf_state", "nodes", "overrides"},
    "lz": {"mu", "omega", "omega_a", "v"},
    "cost": {"n_el", "n_nuc", "grid_points", "box_volume", "trap_volume",
             "omega_max", "m_max", "bits", "doublings"},
    "validate": {"criterion", "symmetrize"},
}

_NODE_KEYS = {"success_weight", "delta", "max_iters", "delta_ramp",
              "renaturalize"}


def _check_keys(section: str, data, allowed) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be an object")
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown keys in {section!r}: {sorted(unknown)}")
    return data


def _require(section: dict, name: str, key: str):
    if key not in section:
        raise ConfigError(f"missing required key {name}.{key}")
    return section[key]


def load_config(path: str) -> dict:
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys("<top level>", cfg, _TOP_KEYS)
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}")
    for name, keys in _SECTION_KEYS.items():
        if name in cfg:
            _check_keys(name, cfg[name], keys)
    return cfg


def emit_config(cfg: dict) -> str:
    """Canonical serialization; parse(emit(cfg)) round-trips."""
    return json.dumps(cfg, sort_keys=True, indent=2) + "\n"


def _section(cfg: dict, name: str) -> dict:
    if name not in cfg:
        raise ConfigError(f"missing required section {name!r}")
    return cfg[name]


def _build_grid(cfg: dict) -> GridSpec:
    sec = _section(cfg, "grid")
    return GridSpec(points_per_axis=int(_require(sec, "grid", "points_per_axis")),
                    dims=int(_require(sec, "grid", "dims")),
                    box_length=float(_require(sec, "grid", "box_length")))


def _build_particles(cfg: dict) -> tuple[ParticleSet, int]:
    sec = _section(cfg, "particles")
    particles = ParticleSet(
        n_el=int(_require(sec, "particles", "n_el")),
        nuclear_masses=tuple(sec.get("nuclear_masses", ())),
        nuclear_charges=tuple(sec.get("nuclear_charges", ())),
        electron_spin=bool(sec.get("electron_spin", False)),
        nuclear_spin=bool(sec.get("nuclear_spin", False)))
    return particles, int(sec.get("cap", 4096))


def _build_basis(cfg: dict):
    grid = _build_grid(cfg)
    particles, cap = _build_particles(cfg)
    return enumerate_basis(grid, particles, cap=cap)


def _build_declaration(cfg: dict) -> symmetry.SymmetryDeclaration:
    sec = _section(cfg, "symmetry")
    return symmetry.SymmetryDeclaration(
        bosonic_sets=tuple(tuple(s) for s in sec.get("bosonic_sets", ())),
        fermionic_sets=tuple(tuple(s) for s in sec.get("fermionic_sets", ())))


def _build_criteria(cfg: dict) -> dict[str, crit.GeometricCriterion]:
    table: dict[str, crit.GeometricCriterion] = {}
    for row in _section(cfg, "criteria"):
        _check_keys("criteria[]", row, {"id", "mode", "unit", "pairs"})
        cid = str(_require(row, "criteria[]", "id"))
        if cid in table:
            raise ConfigError(f"duplicate criterion id {cid!r}")
        table[cid] = crit.GeometricCriterion(
            mode=str(_require(row, "criteria[]", "mode")),
            constraints=tuple(tuple(p) for p in
                              _require(row, "criteria[]", "pairs")),
            unit=str(row.get("unit", "bohr")))
    return table


def _build_schedule(cfg: dict) -> Schedule:
    sec = _section(cfg, "schedule")
    return Schedule(s0=float(_require(sec, "schedule", "s0")),
                    s1=float(_require(sec, "schedule", "s1")),
                    f_shape=str(sec.get("f_shape", "linear")),
                    g_shape=str(sec.get("g_shape", "linear")))


def _build_scheduled_hamiltonian(cfg: dict, basis) -> ScheduledHamiltonian:
    sec = _section(cfg, "hamiltonian")
    particles = basis.particles
    regs = set(range(particles.n_particles))
    sub_a = [int(i) for i in sec.get("subsystem_a", sorted(regs))]
    sub_b = [int(i) for i in sec.get("subsystem_b", [])]
    if set(sub_a) | set(sub_b) != regs or set(sub_a) & set(sub_b):
        raise ConfigError("subsystem_a and subsystem_b must partition "
                          "the particle registers")
    softening = float(sec.get("softening", basis.grid.spacing))
    dim = basis.size

    include_kinetic = bool(sec.get("include_kinetic", True))
    include_coulomb = bool(sec.get("include_coulomb", True))

    def fragment_block(registers):
        block = zero_block(dim)
        if include_kinetic and registers:
            block = block + build_kinetic(basis, registers)
        pairs = [(i, j) for i in registers for j in registers if i < j]
        if include_coulomb and pairs:
            block = block + build_coulomb(basis, softening, pairs)
        return block

    h_a = fragment_block(sub_a)
    h_b = fragment_block(sub_b)
    cross = [(i, j) for i in sub_a for j in sub_b]
    h_ab = (build_coulomb(basis, softening, cross)
            if include_coulomb and cross else zero_block(dim))

    if sec.get("trap"):
        trap_sec = _check_keys("hamiltonian.trap", sec["trap"],
                               {"centers", "omega", "frequencies",
                                "isotropic"})
        if "omega" in trap_sec:
            trap = TrapSpec.isotropic_spec(trap_sec["centers"],
                                           float(trap_sec["omega"]))
        else:
            trap = TrapSpec(tuple(tuple(c) for c in trap_sec["centers"]),
                            tuple(tuple(f) for f in trap_sec["frequencies"]),
                            bool(trap_sec.get("isotropic", False)))
        v_trap = build_trap(basis, trap)
    else:
        v_trap = zero_block(dim)

    return ScheduledHamiltonian(h_a=h_a, h_b=h_b, h_ab=h_ab, v_trap=v_trap,
                                schedule=_build_schedule(cfg))


def _initial_vector(spec: dict, dim: int, hamiltonian=None) -> np.ndarray:
    _check_keys("initial", spec, {"kind", "index", "s"})
    kind = spec.get("kind", "basis_state")
    if kind == "basis_state":
        v = np.zeros(dim, dtype=complex)
        v[int(spec.get("index", 0))] = 1.0
        return v
    if kind == "uniform":
        return np.ones(dim, dtype=complex) / math.sqrt(dim)
    if kind == "eigenstate":
        if hamiltonian is None:
            raise ConfigError("eigenstate initial state needs a Hamiltonian")
        _, vecs = np.linalg.eigh(hamiltonian)
        return vecs[:, int(spec.get("index", 0))].astype(complex)
    raise ConfigError(f"unknown initial state kind {kind!r}")


def cmd_evolve(cfg: dict, out_dir: str, fmt: str) -> dict:
    basis = _build_basis(cfg)
    sh = _build_scheduled_hamiltonian(cfg, basis)
    sec = _section(cfg, "evolve")
    s_from = float(sec.get("s_from", 0.0))
    s_to = float(sec.get("s_to", sh.schedule.s1))
    n_steps = int(sec.get("n_steps", 0)) or default_step_count(sh, s_from, s_to)
    h0 = sh.evaluate(s_from).matrix
    psi0 = _initial_vector(sec.get("initial", {}), basis.size, h0)
    report = propagate(DensityMatrix.from_pure(psi0), sh, s_from, s_to, n_steps)

    artifacts = []
    payload = {"status": "ok", "dim": basis.size, "steps": report.steps,
               "norm_drift": report.norm_drift,
               "purity": report.final_state.purity(),
               "trace": report.final_state.trace()}
    path = os.path.join(out_dir, "evolve_report.json")
    out_io.write_json(path, payload)
    artifacts.append(path)

    auto = sec.get("autocorrelation")
    if auto:
        _check_keys("evolve.autocorrelation", auto,
                    {"t_max", "n_samples", "window", "fixed_s"})
        fixed_s = auto.get("fixed_s")
        target = sh.evaluate(float(fixed_s)) if fixed_s is not None else sh
        times, values = autocorrelation(
            psi0, target, float(_require(auto, "autocorrelation", "t_max")),
            int(_require(auto, "autocorrelation", "n_samples")))
        corr_path = os.path.join(out_dir, "correlation.csv")
        out_io.write_correlation_csv(corr_path, times, values)
        freqs, intensity = spectrum(times, values,
                                    window=auto.get("window", "hann"))
        spec_path = os.path.join(out_dir, "spectrum.csv")
        out_io.write_spectrum_csv(spec_path, freqs, intensity)
        artifacts.extend([corr_path, spec_path])
    payload["artifacts"] = artifacts
    return payload


def cmd_measure(cfg: dict, out_dir: str, fmt: str, seed: int) -> dict:
    basis = _build_basis(cfg)
    criteria_table = _build_criteria(cfg)
    sec = _section(cfg, "measure")
    cid = str(_require(sec, "measure", "criterion"))
    if cid not in criteria_table:
        raise ConfigError(f"measure.criterion {cid!r} does not resolve")
    bip = crit.bipartition(criteria_table[cid], basis)
    psi0 = _initial_vector(sec.get("initial", {}), basis.size)
    state = DensityMatrix.from_pure(psi0)
    spec = weakmeas.WeakMeasurementSpec(
        bip, float(_require(sec, "measure", "delta")), rng_seed=seed)
    rng = np.random.default_rng(seed)
    trace = weakmeas.TraceLog()

    payload: dict = {"status": "ok", "criterion": cid,
                     "p_suc": weakmeas.p_success_weight(state, bip)}
    repeat = sec.get("repeat")
    if repeat:
        _check_keys("measure.repeat", repeat, {"max_iters", "delta_ramp"})
        post, iters = weakmeas.repeat_until_success(
            state, spec, lambda s, k: s,
            int(repeat.get("max_iters", 64)), rng=rng,
            delta_ramp=float(repeat.get("delta_ramp", 1.0)),
            trace=trace, node_id="measure")
        payload.update({"iterations": iters,
                        "post_purity": post.purity()})
    else:
        outcome = weakmeas.weak_measure(state, spec, rng)
        trace.record("measure", 1, spec.delta, outcome.flag,
                     outcome.branches.p1, outcome.p_suc_before)
        payload.update({"flag": outcome.flag,
                        "probability": outcome.probability,
                        "p1": outcome.branches.p1,
                        "p0": outcome.branches.p0})

    report_path = os.path.join(out_dir, "measure_report.json")
    out_io.write_json(report_path, payload)
    trace_path = os.path.join(out_dir, "measure_trace.jsonl")
    out_io.write_jsonl(trace_path, trace)
    payload["artifacts"] = [report_path, trace_path]
    return payload


def _tree_from_config(sec: dict) -> tree.ScatterTree:
    if "children" in sec:
        children = sec["children"]
        root = str(_require(sec, "tree", "root"))
        ids = set(children) | {c for kids in children.values() for c in kids}
        nodes = []
        leaf_counter = 0
        for node_id in sorted(ids):
            kids = tuple(children.get(node_id, ()))
            if kids:
                nodes.append(tree.ScatterNode(node_id=node_id, children=kids))
            else:
                nodes.append(tree.ScatterNode(
                    node_id=node_id, subsystem=frozenset({leaf_counter})))
                leaf_counter += 1
        built = tree.ScatterTree(nodes, root)
        # fill internal subsystems bottom-up
        for node_id in built.postorder():
            node = built.node(node_id)
            if not node.is_leaf:
                union = frozenset().union(
                    *(built.node(c).subsystem for c in node.children))
                built = built.configure(node_id, subsystem=union)
        return built
    if "leaf_ids" in sec:
        return tree.plan_tree([str(x) for x in sec["leaf_ids"]],
                              arity=int(sec.get("arity", 2)))
    return tree.plan_tree(int(_require(sec, "tree", "leaves")),
                          arity=int(sec.get("arity", 2)))


def cmd_tree(cfg: dict, out_dir: str, fmt: str, seed: int) -> dict:
    sec = _section(cfg, "tree")
    shape = _tree_from_config(sec)
    leaf_dim = int(sec.get("leaf_dim", 2))
    defaults = _check_keys("tree.nodes", sec.get("nodes", {}), _NODE_KEYS)
    overrides = sec.get("overrides", {})
    for node_id, row in overrides.items():
        if node_id not in shape.nodes:
            raise ConfigError(f"override for unknown node {node_id!r}")
        _check_keys(f"tree.overrides.{node_id}", row, _NODE_KEYS)

    dims: dict[str, int] = {}
    for node_id in shape.postorder():
        node = shape.node(node_id)
        if node.is_leaf:
            dims[node_id] = leaf_dim
        else:
            d = 1
            for child in node.children:
                d *= dims[child]
            dims[node_id] = d

    configured = shape
    for node_id in shape.internal_ids():
        row = {**defaults, **overrides.get(node_id, {})}
        dim = dims[node_id]
        mask = np.arange(dim) < max(1, dim // 2)
        bip = crit.Bipartition(mask)
        channel = tree.PumpChannel(bip, float(row.get("success_weight", 1.0)))
        retry = tree.RetryPolicy(
            max_iters=int(row.get("max_iters", 64)),
            delta_ramp=float(row.get("delta_ramp", 1.0)),
            renaturalize=bool(row.get("renaturalize", False)))
        configured = configured.configure(
            node_id, channel=channel, bipartition=bip,
            delta=float(row.get("delta", math.pi / 2.0)), retry=retry)

    leaf_state_spec = sec.get("leaf_state", {"kind": "basis_state", "index": 0})
    states = {}
    for leaf in configured.leaf_ids():
        if leaf_state_spec.get("kind") == "maximally_mixed":
            states[leaf] = DensityMatrix.maximally_mixed(leaf_dim)
        else:
            states[leaf] = DensityMatrix.from_pure(
                _initial_vector(leaf_state_spec, leaf_dim))

    report_path = os.path.join(out_dir, "tree_report.json")
    trace_path = os.path.join(out_dir, "tree_trace.jsonl")
    try:
        report = tree.run_tree(configured, states, global_seed=seed)
    except NodeExhausted as exc:
        payload = exc.report.to_json_dict() if exc.report else {}
        payload.update({"status": "node_exhausted", "node_id": exc.node_id})
        out_io.write_json(report_path, payload)
        out_io.write_jsonl(trace_path,
                           exc.report.trace if exc.report else [])
        raise
    payload = report.to_json_dict()
    payload["status"] = "ok"
    out_io.write_json(report_path, payload)
    out_io.write_jsonl(trace_path, report.trace)
    payload["artifacts"] = [report_path, trace_path]
    return payload


def _unit_value(obj, kind: str, target: str) -> float:
    if isinstance(obj, (int, float)):
        return float(obj)
    _check_keys(kind, obj, {"value", "unit"})
    return unit_convert(float(_require(obj, kind, "value")),
                        str(_require(obj, kind, "unit")), target)


def cmd_lz(cfg: dict, out_dir: str, fmt: str) -> dict:
    sec = _section(cfg, "lz")
    params = lzcost.LZParams(
        mu=_unit_value(_require(sec, "lz", "mu"), "lz.mu", "me"),
        omega=_unit_value(_require(sec, "lz", "omega"), "lz.omega", "au"),
        omega_a=_unit_value(_require(sec, "lz", "omega_a"), "lz.omega_a", "au"),
        v=1.0)
    v_sec = _require(sec, "lz", "v")
    if isinstance(v_sec, dict) and "values" in v_sec:
        _check_keys("lz.v", v_sec, {"values"})
        v_values = [float(x) for x in v_sec["values"]]
    else:
        _check_keys("lz.v", v_sec, {"min", "max", "points", "scale"})
        lo = float(_require(v_sec, "lz.v", "min"))
        hi = float(_require(v_sec, "lz.v", "max"))
        pts = int(_require(v_sec, "lz.v", "points"))
        if v_sec.get("scale", "log") == "log":
            v_values = list(np.geomspace(lo, hi, pts))
        else:
            v_values = list(np.linspace(lo, hi, pts))

    rows = []
    for v, result in lzcost.sweep_velocity(params, v_values):
        rows.append((v, result.gamma, result.p_lz, result.p_lz_bound,
                     result.p_suc))
    artifacts = []
    payload = {"status": "ok",
               "mu_me": params.mu, "omega_au": params.omega,
               "omega_a_au": params.omega_a,
               "p_suc_min": min(r[4] for r in rows),
               "p_suc_max": max(r[4] for r in rows)}
    if fmt == "json":
        payload["rows"] = [list(r) for r in rows]
        path = os.path.join(out_dir, "lz_sweep.json")
        out_io.write_json(path, payload)
    else:
        path = os.path.join(out_dir, "lz_sweep.csv")
        out_io.write_csv(path, ["v_au", "gamma", "p_lz", "p_lz_bound",
                                "p_suc"], rows)
    artifacts.append(path)
    payload["artifacts"] = artifacts
    return payload


_COST_COLUMNS = ["scenario", "n_el", "n_nuc", "grid_points", "box_volume",
                 "trap_volume", "omega_max", "alpha_t", "alpha_v", "alpha_u",
                 "alpha_trap", "prep_branches", "sel_ancillas", "repetitions"]


def _cost_row(name: str, params: lzcost.CostParams, bits: int) -> list:
    alphas = lzcost.alpha_factors(params)
    est = lzcost.lcu_query_model(params, bits)
    return [name, params.n_el, params.n_nuc, params.grid_points,
            params.box_volume, params.trap_volume, params.omega_max,
            alphas.alpha_t, alphas.alpha_v, alphas.alpha_u, alphas.alpha_trap,
            est.prep_branches, est.sel_ancillas,
            est.block_encoding_repetitions]


def cmd_cost(cfg: dict, out_dir: str, fmt: str) -> dict:
    sec = _section(cfg, "cost")
    base = lzcost.CostParams(
        n_el=int(_require(sec, "cost", "n_el")),
        n_nuc=int(_require(sec, "cost", "n_nuc")),
        grid_points=int(_require(sec, "cost", "grid_points")),
        box_volume=float(_require(sec, "cost", "box_volume")),
        trap_volume=float(_require(sec, "cost", "trap_volume")),
        omega_max=float(_require(sec, "cost", "omega_max")),
        m_max=float(sec.get("m_max", 1.0)))
    bits = int(sec.get("bits", 32))
    doublings = sec.get("doublings", [])
    numeric = {"n_el", "n_nuc", "grid_points", "box_volume", "trap_volume",
               "omega_max"}
    rows = [_cost_row("base", base, bits)]
    for name in doublings:
        if name == "bits":
            rows.append(_cost_row("2x bits", base, 2 * bits))
            continue
        if name not in numeric:
            raise ConfigError(f"cannot double unknown parameter {name!r}")
        kwargs = {k: getattr(base, k) for k in
                  ("n_el", "n_nuc", "grid_points", "box_volume",
                   "trap_volume", "omega_max", "m_max")}
        kwargs[name] = (2 * kwargs[name] if isinstance(kwargs[name], int)
                        else 2.0 * kwargs[name])
        if name == "box_volume":
            kwargs["trap_volume"] = min(kwargs["trap_volume"],
                                        kwargs["box_volume"])
        rows.append(_cost_row(f"2x {name}", lzcost.CostParams(**kwargs), bits))

    payload = {"status": "ok", "bits": bits}
    if fmt == "json":
        payload["columns"] = _COST_COLUMNS
        payload["rows"] = [list(r) for r in rows]
        path = os.path.join(out_dir, "cost_table.json")
        out_io.write_json(path, payload)
    else:
        path = os.path.join(out_dir, "cost_table.csv")
        out_io.write_csv(path, _COST_COLUMNS, rows)
    payload["artifacts"] = [path]
    return payload


def cmd_validate(cfg: dict, out_dir: str, fmt: str, seed: int) -> dict:
    basis = _build_basis(cfg)
    declaration = _build_declaration(cfg)
    declaration.check_against(basis.particles)
    criteria_table = _build_criteria(cfg)
    sec = _section(cfg, "validate")
    cid = str(_require(sec, "validate", "criterion"))
    if cid not in criteria_table:
        raise ConfigError(f"validate.criterion {cid!r} does not resolve")
    criterion = criteria_table[cid]
    if bool(sec.get("symmetrize", False)):
        criterion = crit.symmetrize_criterion(criterion, declaration)
    result = crit.validate_symmetric(criterion, declaration, basis, seed=seed)
    payload = {"status": "ok", "criterion": cid,
               "symmetric": result.symmetric,
               "checked": result.checked, "sampled": result.sampled,
               "counterexample": None}
    if result.counterexample is not None:
        perm, config = result.counterexample
        payload["counterexample"] = {
            "permutation": [list(m) for m in perm.moves],
            "labels": [list(l) for l in config.labels],
            "spins": [s for s in config.spins]}
    path = os.path.join(out_dir, "validate_report.json")
    out_io.write_json(path, payload)
    payload["artifacts"] = [path]
    return payload


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mergosim",
        description="Desk-scale simulator of scheduled merge dynamics, "
                    "heralded weak measurement and scattering trees.")
    parser.add_argument("command",
                        choices=["evolve", "measure", "tree", "lz", "cost",
                                 "validate"])
    parser.add_argument("--config", required=True, help="run config (JSON)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=["json", "csv"], default="csv",
                        help="table format for lz/cost outputs")
    args = parser.parse_args(argv)

    def emit_error(status: str, error: Exception, code: int, **extra) -> int:
        record = {"status": status, "error": str(error), **extra}
        print(json.dumps(record, sort_keys=True))
        return code

    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        os.makedirs(args.out, exist_ok=True)
        if args.command == "evolve":
            payload = cmd_evolve(cfg, args.out, args.format)
        elif args.command == "measure":
            payload = cmd_measure(cfg, args.out, args.format, seed)
        elif args.command == "tree":
            payload = cmd_tree(cfg, args.out, args.format, seed)
        elif args.command == "lz":
            payload = cmd_lz(cfg, args.out, args.format)
        elif args.command == "cost":
            payload = cmd_cost(cfg, args.out, args.format)
        else:
            payload = cmd_validate(cfg, args.out, args.format, seed)
    except ConfigError as exc:
        return emit_error("config_error", exc, 2)
    except NodeExhausted as exc:
        return emit_error("node_exhausted", exc, 4, node_id=exc.node_id)
    except (SimulationError, ValueError, KeyError) as exc:
        return emit_error("runtime_error", exc, 3)

    print(json.dumps({"status": payload.get("status", "ok"),
                      "artifacts": payload.get("artifacts", [])},
                     sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
