"""Command line front end.

One executable, nested subcommands, stable file formats.  Conventions:

* complexes travel as JSON ({"num_vertices": V, "edges": [[i,j],...],
  "triangles": [[i,j,k],...]});
* signals travel as CSV, one signal per column, no index column, with an
  optional `# layer=k` comment;
* sample sets travel as CSV rows `index` (bare sets) or `index,value`
  (sets with measured values);
* frequency bands travel as JSON {"F0": [...], "F1": [...], "F2": [...]}.

Every run prints its resolved configuration to stderr.  Results go to
--out when given, to stdout otherwise.  Exit codes: 0 success, 2 input
validation, 3 recovery/convergence failure (artifact still written with
a status field), 1 internal error.

CSV floats use 17 significant digits.  JSON floats use the platform
shortest round-trip form; both parse back to the exact same double.
"""

import argparse
import io
import json
import logging
import sys

import numpy as np

from .complexes import (SimplicialComplex2, betti_numbers, build_incidence,
                        complex_to_dict, enumerate_3cliques, layer_size,
                        load_complex, LayerSignal, save_complex)
from .errors import (HodgeflowError, NotConverged, NotRecoverable,
                     SingularSystem)
from .flowfilter import MetricSet, solve_pf
from .hodge import decompose
from .inference import (basis_pursuit, clique_candidates,
                        cross_validate_tstar, mtv_infer, pca_bfmtv_infer,
                        sol_harm_energy_test)
from .sampling import (BandModel, SampleSet, check_recoverable,
                       recover_single_layer, recover_three_layer,
                       recover_two_layer, select_samples_greedy)
from .spectral import (SPECTRAL_TOL, hodge_basis, lovasz_tv, relaxed_tv)
from .synth import (ExperimentConfig, add_noise, experiment_pe_vs_snr,
                    experiment_recovery_vs_samples, random_bandlimited,
                    random_complex, table_to_csv)

log = logging.getLogger("hodgeflow")

_LAYER_WORDS = {0: "vertex", 1: "edge", 2: "triangle"}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jsonify(obj):
    """numpy payloads -> plain Python so json.dumps round-trips them."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)


def _emit_json(args, payload: dict) -> None:
    _emit(args, json.dumps(_jsonify(payload), indent=2) + "\n")


def _load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc


def _resolve_format(args, default: str, allowed: tuple) -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise ValueError(
            f"format: '{args.command}' writes {'|'.join(allowed)}, not {fmt}")
    return fmt


def _signal_csv(values: np.ndarray, layer=None, status=None) -> str:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[0] == 1 and values.size > 1:
        values = values.T             # a single signal is one column
    buf = io.StringIO()
    if layer is not None:
        buf.write(f"# layer={layer}\n")
    if status is not None:
        buf.write(f"# status={status}\n")
    for row in values:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _read_csv_matrix(path) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: not a numeric CSV ({exc})") from exc
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    return data


def _read_signals(path):
    """-> (E x M matrix, layer or None).  Layer comes from a '# layer=k'
    comment when present; callers validate it against the complex."""
    layer = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") and "layer=" in line:
                layer = int(line.split("layer=")[1].strip())
                break
    return _read_csv_matrix(path), layer


def _read_samples(path):
    """-> (indices, values or None).  Accepts one column (bare index set)
    or two columns (index,value rows)."""
    data = _read_csv_matrix(path)
    if data.shape[1] == 1:
        return data[:, 0].astype(int), None
    if data.shape[1] == 2:
        return data[:, 0].astype(int), data[:, 1]
    raise ValueError(f"{path}: expected 1 or 2 columns, got {data.shape[1]}")


def _band_model(path) -> BandModel:
    d = _load_json(path)
    unknown = set(d) - {"F0", "F1", "F2"}
    if unknown:
        raise ValueError(f"{path}: unknown band field {sorted(unknown)[0]!r}")
    return BandModel(f0=tuple(d.get("F0", ())), f1=tuple(d.get("F1", ())),
                     f2=tuple(d.get("F2", ())))


def _load_signal_for(ip, path, layer: int) -> LayerSignal:
    values, tagged = _read_signals(path)
    if tagged is not None and tagged != layer:
        raise ValueError(f"{path}: tagged layer={tagged}, expected {layer}")
    if values.shape[1] != 1:
        raise ValueError(f"{path}: expected a single signal column")
    flat = values[:, 0]
    if flat.shape[0] != layer_size(ip, layer):
        raise ValueError(f"{path}: {flat.shape[0]} rows, "
                         f"layer {layer} has {layer_size(ip, layer)}")
    return LayerSignal(layer=layer, values=flat)


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


# ---------------------------------------------------------------- complex

def _cmd_complex_info(args) -> int:
    c = load_complex(args.complex)
    ip = build_incidence(c)
    betti = betti_numbers(ip)
    cliques = enumerate_3cliques(c)
    summary = {
        "num_vertices": c.num_vertices,
        "num_edges": c.num_edges,
        "num_triangles": c.num_triangles,
        "betti": list(betti),
        "three_cliques": len(cliques),
    }
    if args.out is not None:
        _emit_json(args, summary)
    print(f"V={c.num_vertices} E={c.num_edges} T={c.num_triangles}")
    print(f"betti={betti}")
    print(f"three_cliques={len(cliques)}")
    return 0


def _cmd_complex_validate(args) -> int:
    c = load_complex(args.complex)     # constructor rejects bad simplices
    build_incidence(c)
    print(f"ok: {args.complex}")
    return 0


# --------------------------------------------------------------- spectral

def _cmd_spectral_basis(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip, tol=args.tol)
    buf = io.StringIO()
    buf.write(f"# layer={args.layer}\n")
    if args.layer == 1:
        for name in ("irr_idx", "sol_idx", "harm_idx"):
            idx = getattr(basis, name)
            buf.write(f"# {name}={','.join(str(i) for i in idx)}\n")
    evals = basis.eigenvalues(args.layer)
    evecs = basis.eigenvectors(args.layer)
    buf.write(",".join(_fmt(v) for v in evals) + "\n")
    for row in evecs:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _emit(args, buf.getvalue())
    return 0


def _cmd_spectral_tv(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    x1 = _load_signal_for(ip, args.signal, 1)
    values = {"lovasz_tv": lovasz_tv(ip, x1), "relaxed_tv": relaxed_tv(ip, x1)}
    if args.out is not None:
        _emit_json(args, values)
    print(f"lovasz_tv={_fmt(values['lovasz_tv'])}")
    print(f"relaxed_tv={_fmt(values['relaxed_tv'])}")
    return 0


# -------------------------------------------------------------- decompose

def _cmd_decompose(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    x1 = _load_signal_for(ip, args.signal, 1)
    comps = decompose(ip, x1)
    energies = comps.energies()
    energies["input"] = float(x1.values @ x1.values)
    _emit_json(args, {
        "s_irr": comps.s_irr,
        "s_sol": comps.s_sol,
        "s_harm": comps.s_harm,
        "s0_hat": comps.s0_hat,
        "s2_hat": comps.s2_hat,
        "energies": energies,
    })
    return 0


# ----------------------------------------------------------------- sample

def _cmd_sample_select(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip)
    freqs = _band_model(args.band_file).frequencies(args.layer)
    chosen = select_samples_greedy(basis, args.layer, freqs, args.budget)
    norm = check_recoverable(basis, chosen, freqs)
    log.info("selected %d %s samples, norm=%s", len(chosen),
             _LAYER_WORDS[args.layer], _fmt(norm))
    fmt = _resolve_format(args, "csv", ("csv", "json"))
    if fmt == "json":
        _emit_json(args, {"layer": args.layer,
                          "indices": list(chosen.indices),
                          "norm": norm})
    else:
        buf = io.StringIO()
        buf.write(f"# layer={args.layer}\n")
        for i in chosen.indices:
            buf.write(f"{i}\n")
        _emit(args, buf.getvalue())
    return 0


def _cmd_sample_check(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip)
    freqs = _band_model(args.band_file).frequencies(args.layer)
    indices, _ = _read_samples(args.samples)
    norm = check_recoverable(basis, SampleSet(args.layer, indices), freqs)
    verdict = "yes" if norm < 1.0 else "no"
    if args.out is not None:
        _emit_json(args, {"norm": norm, "recoverable": norm < 1.0})
    print(f"norm={_fmt(norm)}")
    print(f"recoverable={verdict}")
    return 0


def _cmd_sample_recover(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip)
    freqs = _band_model(args.band_file).frequencies(args.layer)
    indices, values = _read_samples(args.samples)
    if values is None:
        raise ValueError(f"{args.samples}: recovery needs index,value rows")
    fmt = _resolve_format(args, "csv", ("csv", "json"))
    try:
        rec = recover_single_layer(basis, values,
                                   SampleSet(args.layer, indices), freqs)
    except (NotRecoverable, SingularSystem) as exc:
        status = ("not_recoverable" if isinstance(exc, NotRecoverable)
                  else "singular_system")
        log.error("%s", exc)
        if fmt == "json":
            _emit_json(args, {"status": status, "values": None,
                              "detail": str(exc)})
        else:
            _emit(args, f"# layer={args.layer}\n# status={status}\n")
        return 3
    if fmt == "json":
        _emit_json(args, {"status": "ok", "layer": args.layer,
                          "values": rec.values})
    else:
        _emit(args, _signal_csv(rec.values[:, None], layer=args.layer,
                                status="ok"))
    return 0


def _cmd_sample_recover_multi(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip)
    band = _band_model(args.band_file)
    idx0, val0 = _read_samples(args.samples0)
    idx1, val1 = _read_samples(args.samples1)
    if val0 is None or val1 is None:
        raise ValueError("recovery needs index,value rows on every layer")
    a = SampleSet(0, idx0)
    s = SampleSet(1, idx1)
    f1 = band.f1 or None            # default: classification from the basis
    try:
        if args.samples2 is None:
            rec = recover_two_layer(ip, basis, val0, a, val1, s,
                                    band.f0, f_sh=f1)
            payload = {"status": "ok", "s0": rec.s0, "s1_bar": rec.s1_bar,
                       "s1": rec.s1, "metadata": rec.metadata}
        else:
            idx2, val2 = _read_samples(args.samples2)
            if val2 is None:
                raise ValueError(
                    f"{args.samples2}: recovery needs index,value rows")
            rec = recover_three_layer(ip, basis, val0, a, val1, s,
                                      val2, SampleSet(2, idx2),
                                      band.f0, band.f2, f_h=f1)
            payload = {"status": "ok", "s0": rec.s0, "s1_harm": rec.s1_harm,
                       "s2": rec.s2, "s1": rec.s1, "metadata": rec.metadata}
    except (NotRecoverable, SingularSystem) as exc:
        log.error("%s", exc)
        payload = {"status": "not_recoverable", "detail": str(exc)}
        if isinstance(exc, NotRecoverable):
            payload["norm"] = exc.norm
            payload["layer"] = exc.layer
        _emit_json(args, payload)
        return 3
    _emit_json(args, payload)
    return 0


# ------------------------------------------------------------------ infer

def _tstar_arg(text: str):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"tstar: expected an integer or 'auto', got {text!r}")


def _infer_setup(args):
    c = load_complex(args.complex)
    graph = SimplicialComplex2(c.num_vertices, c.edges, ())
    ip = build_incidence(graph)
    candidates = clique_candidates(graph)
    values, tagged = _read_signals(args.signals)
    if tagged is not None and tagged != 1:
        raise ValueError(f"{args.signals}: tagged layer={tagged}, expected 1")
    if values.shape[0] != ip.num_edges:
        raise ValueError(f"{args.signals}: {values.shape[0]} rows, "
                         f"graph has {ip.num_edges} edges")
    basis = hodge_basis(ip)
    x_sh, proceed = sol_harm_energy_test(basis, values, eta=args.eta)
    return ip, candidates, values, x_sh, proceed


def _resolve_tstar(args, ip, candidates, x_sh) -> int:
    if args.tstar == "auto":
        t_star = cross_validate_tstar(ip, candidates, x_sh)
        log.info("cross-validated t*=%d", t_star)
        return t_star
    return args.tstar


def _selected_triples(candidates, t):
    return [list(candidates.cliques[n]) for n in np.flatnonzero(t)]


def _energy_stop_payload(values, x_sh):
    total = float(np.linalg.norm(values))
    kept = float(np.linalg.norm(x_sh))
    return {
        "status": "below_energy_threshold",
        "energy_ratio": 0.0 if total == 0 else kept / total,
        "t": None, "selected": None, "c": None, "objective_trace": None,
    }


def _cmd_infer_mtv(args) -> int:
    ip, candidates, values, x_sh, proceed = _infer_setup(args)
    if not proceed:
        _emit_json(args, _energy_stop_payload(values, x_sh))
        return 0
    t_star = _resolve_tstar(args, ip, candidates, x_sh)
    result = mtv_infer(candidates, x_sh, t_star)
    _emit_json(args, {
        "status": "ok",
        "tstar": t_star,
        "t": result.t,
        "selected": _selected_triples(candidates, result.t),
        "c": result.c,
        "objective_trace": result.objective_trace,
        "iterations": result.iterations,
        "converged": result.converged,
    })
    return 0


def _cmd_infer_pcabfmtv(args) -> int:
    ip, candidates, values, x_sh, proceed = _infer_setup(args)
    if not proceed:
        _emit_json(args, _energy_stop_payload(values, x_sh))
        return 0
    t_star = _resolve_tstar(args, ip, candidates, x_sh)
    f = None if args.pca_energy else args.pca_dim
    result, s_hat = pca_bfmtv_infer(candidates, x_sh, t_star, f=f,
                                    gamma=args.gamma,
                                    max_iter=args.max_iter)
    _emit_json(args, {
        "status": "ok" if result.converged else "not_converged",
        "tstar": t_star,
        "t": result.t,
        "selected": _selected_triples(candidates, result.t),
        "c": result.c,
        "objective_trace": result.objective_trace,
        "iterations": result.iterations,
        "converged": result.converged,
        "pca_dim": s_hat.shape[0],
    })
    return 0 if result.converged else 3


def _cmd_infer_bp(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    x1 = _load_signal_for(ip, args.signal, args.layer)
    if args.basis_file is not None:
        table = _read_csv_matrix(args.basis_file)
        v = table[1:, :]              # row 0 is the eigenvalue header
    else:
        v = hodge_basis(ip).eigenvectors(args.layer)
    coeffs = basis_pursuit(v, x1.values, args.eps)
    residual = float(np.linalg.norm(x1.values - v @ coeffs))
    fmt = _resolve_format(args, "json", ("csv", "json"))
    if fmt == "json":
        _emit_json(args, {"status": "ok", "coefficients": coeffs,
                          "l1_norm": float(np.abs(coeffs).sum()),
                          "residual": residual, "eps": args.eps})
    else:
        _emit(args, _signal_csv(coeffs[:, None], status="ok"))
    return 0


# ----------------------------------------------------------------- filter

def _metric_entry(d, key):
    entry = d.get(key)
    if entry is None:
        return None
    arr = np.asarray(entry, dtype=float)
    if arr.ndim not in (1, 2):
        raise ValueError(f"metrics: {key} must be a vector or a matrix")
    return arr


def _cmd_filter(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    x1 = _load_signal_for(ip, args.signal, 1)
    metrics = None
    if args.metrics is not None:
        d = _load_json(args.metrics)
        unknown = set(d) - {"M0", "M1", "M2"}
        if unknown:
            raise ValueError(
                f"{args.metrics}: unknown metric field {sorted(unknown)[0]!r}")
        metrics = MetricSet.for_incidence(
            ip, m0=_metric_entry(d, "M0"), m1=_metric_entry(d, "M1"),
            m2=_metric_entry(d, "M2"))
    res = solve_pf(ip, x1, metrics=metrics, lam=args.lam, gamma=args.gamma,
                   max_iter=args.max_iter, tol=args.tol)
    status = "ok" if res.converged else "not_converged"
    log.info("filter: %d iterations, residual=%s, %s",
             res.iterations, _fmt(res.residual), status)
    fmt = _resolve_format(args, "csv", ("csv", "json"))
    if fmt == "json":
        _emit_json(args, {"status": status, "values": res.signal.values,
                          "residual": res.residual,
                          "iterations": res.iterations,
                          "objective": res.objective_trace[-1]})
    else:
        _emit(args, _signal_csv(res.signal.values[:, None], layer=1,
                                status=status))
    return 0 if res.converged else 3


# ------------------------------------------------------------- experiment

def _experiment_config(args) -> ExperimentConfig:
    d = _load_json(args.config)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"{args.config}: unknown config field "
                         f"{sorted(unknown)[0]!r}")
    if args.seed is not None:
        d["seed"] = args.seed          # the flag wins over the file
    for key in ("snr_db", "sample_budgets"):
        if key in d and d[key] is not None:
            d[key] = tuple(d[key])
    return ExperimentConfig(**d)


def _cmd_experiment_pe(args) -> int:
    table = experiment_pe_vs_snr(_experiment_config(args))
    _resolve_format(args, "csv", ("csv",))
    _emit(args, table_to_csv(table))
    return 0


def _cmd_experiment_recovery(args) -> int:
    table = experiment_recovery_vs_samples(_experiment_config(args))
    _resolve_format(args, "csv", ("csv",))
    _emit(args, table_to_csv(table))
    return 0


# ------------------------------------------------------------------ synth

def _cmd_synth_complex(args) -> int:
    c = random_complex(_seed(args), args.vertices, args.edge_prob,
                       args.fill_fraction, trial=args.trial)
    _resolve_format(args, "json", ("json",))
    if args.out is None:
        _emit_json(args, complex_to_dict(c))
    else:
        save_complex(c, args.out)
        log.info("wrote %s", args.out)
    return 0


def _cmd_synth_signal(args) -> int:
    ip = build_incidence(load_complex(args.complex))
    basis = hodge_basis(ip)
    freqs = _band_model(args.band_file).frequencies(args.layer)
    sig = random_bandlimited(basis, args.layer, freqs, _seed(args),
                             trial=args.trial)
    if args.snr_db is not None:
        sig = add_noise(sig, args.snr_db, _seed(args), trial=args.trial)
    _resolve_format(args, "csv", ("csv",))
    _emit(args, _signal_csv(sig.values[:, None], layer=args.layer))
    return 0


# ----------------------------------------------------------------- wiring

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default 0; overrides config files)")
    common.add_argument("--out", default=None,
                        help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format where the command supports both")
    common.add_argument("--log-level", default="warning",
                        choices=("debug", "info", "warning", "error"))

    parser = argparse.ArgumentParser(
        prog="hodgeflow",
        description="Signals on simplicial 2-complexes: decomposition, "
                    "sampling, filtering, triangle inference.")
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, command, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func, command=command)
        return p

    g = top.add_parser("complex", help="inspect and validate complex files")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "info", _cmd_complex_info, "complex info",
             help="print sizes, Betti numbers and the 3-clique count")
    p.add_argument("--complex", required=True)
    p = leaf(sub, "validate", _cmd_complex_validate, "complex validate",
             help="check closure and index ranges")
    p.add_argument("--complex", required=True)

    g = top.add_parser("spectral", help="eigenbases and total variation")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "basis", _cmd_spectral_basis, "spectral basis",
             help="export one layer's eigenbasis as CSV")
    p.add_argument("--complex", required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--tol", type=float, default=SPECTRAL_TOL)
    p = leaf(sub, "tv", _cmd_spectral_tv, "spectral tv",
             help="total variation of an edge flow")
    p.add_argument("--complex", required=True)
    p.add_argument("--signal", required=True)

    p = leaf(top, "decompose", _cmd_decompose, "decompose",
             help="split an edge flow into gradient, curl, harmonic parts")
    p.add_argument("--complex", required=True)
    p.add_argument("--signal", required=True)

    g = top.add_parser("sample", help="bandlimited sampling and recovery")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "select", _cmd_sample_select, "sample select",
             help="greedy sample selection for a frequency band")
    p.add_argument("--complex", required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--band-file", required=True)
    p.add_argument("--budget", type=int, required=True)
    p = leaf(sub, "check", _cmd_sample_check, "sample check",
             help="report the recoverability norm of a sample set")
    p.add_argument("--complex", required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--band-file", required=True)
    p.add_argument("--samples", required=True)
    p = leaf(sub, "recover", _cmd_sample_recover, "sample recover",
             help="recover a bandlimited signal from samples")
    p.add_argument("--complex", required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--band-file", required=True)
    p.add_argument("--samples", required=True)
    p = leaf(sub, "recover-multi", _cmd_sample_recover_multi,
             "sample recover-multi",
             help="joint recovery from vertex+edge(+triangle) samples")
    p.add_argument("--complex", required=True)
    p.add_argument("--band-file", required=True)
    p.add_argument("--samples0", required=True,
                   help="vertex samples (index,value rows)")
    p.add_argument("--samples1", required=True,
                   help="edge samples (index,value rows)")
    p.add_argument("--samples2", default=None,
                   help="triangle samples; enables three-layer recovery")

    g = top.add_parser("infer", help="triangle structure from edge flows")
    sub = g.add_subparsers(dest="command", required=True)
    for name, func in (("mtv", _cmd_infer_mtv),
                       ("pcabfmtv", _cmd_infer_pcabfmtv)):
        p = leaf(sub, name, func, f"infer {name}",
                 help=f"{name} triangle inference")
        p.add_argument("--complex", required=True,
                       help="graph JSON; triangles, if any, are ignored")
        p.add_argument("--signals", required=True)
        p.add_argument("--tstar", type=_tstar_arg, required=True,
                       help="number of triangles, or 'auto' to cross-validate")
        p.add_argument("--eta", type=float, default=1e-2,
                       help="energy-test threshold")
        if name == "pcabfmtv":
            dim = p.add_mutually_exclusive_group()
            dim.add_argument("--pca-dim", type=int, default=None)
            dim.add_argument("--pca-energy", action="store_true",
                             help="pick the PCA dimension by the 95%% "
                                  "eigenvalue-energy rule (the default)")
            p.add_argument("--gamma", type=float, default=1e-2)
            p.add_argument("--max-iter", type=int, default=100)
    p = leaf(sub, "bp", _cmd_infer_bp, "infer bp",
             help="basis pursuit against an orthonormal eigenbasis")
    p.add_argument("--complex", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--basis-file", default=None,
                   help="CSV from 'spectral basis' (default: built in-process)")

    p = leaf(top, "filter", _cmd_filter, "filter",
             help="smooth+sparse edge flow filtering")
    p.add_argument("--complex", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--metrics", default=None,
                   help="JSON with optional M0/M1/M2 (matrix or diagonal)")
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-12)

    g = top.add_parser("experiment", help="reproducible experiment sweeps")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "pe-vs-snr", _cmd_experiment_pe, "experiment pe-vs-snr",
             help="inference error probability against SNR")
    p.add_argument("--config", required=True)
    p = leaf(sub, "recovery-vs-samples", _cmd_experiment_recovery,
             "experiment recovery-vs-samples",
             help="recovery error against sample budget")
    p.add_argument("--config", required=True)

    g = top.add_parser("synth", help="seeded random complexes and signals")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "complex", _cmd_synth_complex, "synth complex",
             help="random connected complex with filled cliques")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--edge-prob", type=float, required=True)
    p.add_argument("--fill-fraction", type=float, required=True)
    p.add_argument("--trial", type=int, default=0)
    p = leaf(sub, "signal", _cmd_synth_signal, "synth signal",
             help="random bandlimited signal, optionally noisy")
    p.add_argument("--complex", required=True)
    p.add_argument("--layer", type=int, choices=(0, 1, 2), default=1)
    p.add_argument("--band-file", required=True)
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--trial", type=int, default=0)

    return parser


def _print_config(args) -> None:
    skip = {"func", "group"}
    pairs = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    print("config: " + json.dumps(pairs, default=str), file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper()),
                        format="%(levelname)s %(message)s")
    _print_config(args)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (NotRecoverable, NotConverged, SingularSystem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError, HodgeflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:           # pragma: no cover - internal faults
        log.debug("internal error", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
