"""Command-line front end.

Subcommands:

* ``analyze``: spectral report plus regime verdict for the given parameters.
* ``regime``: regime verdict only; exit code 3 when out of regime.
* ``verify``: run the oracle-equivalence and inequality suite on an instance.
* ``sample``: emit chain configurations as JSON lines.
* ``mix``: emit an empirical total-variation curve as CSV.
* ``estimate-z``: emit a partition-function estimate as JSON.

Exit codes: 0 success / in regime, 2 usage error, 3 out of regime,
4 resource limit, 5 internal violation or solver failure. Machine outputs
embed the seed, a configuration hash and the library version.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import (ConvergenceError, DegenerateConditioningError,
                     GraphFormatError, ResourceLimitError, VerificationError)
from .gibbs import (GibbsSpec, Pinning, b_marginal_bound, exact_partition,
                    influence_matrix_exact)
from .graph import Graph, load_edge_list
from .regimes import (check_delta_contraction, hc_potential_params,
                      ising_uniqueness_interval, lambda_c, si_bound_rhs,
                      RegimeVerdict)
from .spectral import spectral_report
from .tsaw import influence_matrix_tsaw
from . import dynamics

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_OUT_OF_REGIME = 3
EXIT_RESOURCE = 4
EXIT_VIOLATION = 5


def _add_common(parser):
    parser.add_argument("--graph", required=True, help="edge-list file ('n m' header)")
    parser.add_argument("--model", choices=["hardcore", "ising", "general"],
                        default="general")
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--lambda", dest="lam", type=float, default=None)
    parser.add_argument("--pin", default=None, help="pinning file ('v +1' lines)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output file (stdout otherwise)")
    parser.add_argument("--cap-nodes", type=int, default=1_000_000,
                        help="walk-tree node cap")
    parser.add_argument("--cap-walks", type=int, default=10_000_000,
                        help="walk enumeration cap")


def _build_spec(args) -> GibbsSpec:
    if args.model == "hardcore":
        if args.lam is None:
            raise ValueError("hardcore model needs --lambda")
        return GibbsSpec.hardcore(args.lam)
    if args.model == "ising":
        if args.beta is None:
            raise ValueError("ising model needs --beta")
        return GibbsSpec.ising(args.beta, args.lam if args.lam is not None else 1.0)
    if args.beta is None or args.gamma is None or args.lam is None:
        raise ValueError("general model needs --beta, --gamma and --lambda")
    return GibbsSpec(beta=args.beta, gamma=args.gamma, lam=args.lam)


def _config_hash(args) -> str:
    payload = {k: v for k, v in sorted(vars(args).items())
               if k not in ("func", "out")}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    try:
        with open(args.graph, "rb") as fh:
            blob += fh.read()
    except OSError:
        pass
    return hashlib.sha256(blob).hexdigest()[:16]


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(args):
    return {"seed": args.seed, "config_hash": _config_hash(args),
            "version": __version__}


def _regime_verdict(spec: GibbsSpec, g: Graph, args) -> RegimeVerdict:
    """Regime check against the requested spectral observable."""
    report = spectral_report(g, args.k, args.n_power, cap_walks=args.cap_walks)
    if args.observable == "adjacency":
        rho = report.rho_adjacency
    elif args.observable == "nonbacktracking":
        rho = dict(report.hk_root_norms)[args.n_power]
    else:
        rho = report.connective_k
    detail = {"observable": args.observable, "rho": rho, "kind": spec.kind}
    if rho <= 1.0:
        return RegimeVerdict(in_regime=False, threshold=None, margin=-math.inf,
                             detail=dict(detail, reason="observable must exceed 1"))
    if spec.kind == "hard_core":
        threshold = lambda_c(rho)
        margin = threshold - spec.lam
        verdict = RegimeVerdict(in_regime=spec.lam < threshold, threshold=threshold,
                                margin=margin, detail=detail)
        if verdict.in_regime:
            eps = 1.0 - spec.lam / threshold
            params = hc_potential_params(spec.lam)
            verdict.bound_rhs = si_bound_rhs(
                "potential", epsilon=eps, s=params.s, zeta=params.c * rho,
                max_degree=g.max_degree, rho=rho,
            )
        return verdict
    if spec.kind == "ising":
        epsilon = args.epsilon if args.epsilon is not None else 1e-6
        lo, hi = ising_uniqueness_interval(rho, epsilon)
        in_regime = lo <= spec.beta <= hi
        margin = min(spec.beta - lo, hi - spec.beta)
        verdict = RegimeVerdict(in_regime=in_regime, threshold=(lo, hi),
                                margin=margin, detail=detail)
        if in_regime:
            verdict.bound_rhs = si_bound_rhs("contraction", epsilon=epsilon)
        return verdict
    epsilon = args.epsilon if args.epsilon is not None else 1e-6
    delta = (1.0 - epsilon) / rho
    verdict = check_delta_contraction(spec, max(g.max_degree, 2), delta)
    verdict.detail.update(detail)
    if verdict.in_regime:
        verdict.bound_rhs = si_bound_rhs("contraction", epsilon=epsilon)
    return verdict


def cmd_analyze(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    report = spectral_report(g, args.k, args.n_power, cap_walks=args.cap_walks)
    verdict = _regime_verdict(spec, g, args)
    payload = {
        "spectral_report": report.to_json_dict(),
        "regime_verdict": verdict.to_json_dict(),
        **_envelope(args),
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    if not args.out:
        return EXIT_OK
    # Short human summary when the JSON went to a file.
    root = dict(report.hk_root_norms).get(args.n_power)
    print(f"rho(A) = {report.rho_adjacency:.6g}, "
          f"hk_root_norm(N={args.n_power}) = {root:.6g}, "
          f"connective_k = {report.connective_k:.6g}, "
          f"in_regime = {verdict.in_regime}")
    return EXIT_OK


def cmd_regime(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    verdict = _regime_verdict(spec, g, args)
    payload = {**verdict.to_json_dict(), **_envelope(args)}
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if verdict.in_regime else EXIT_OUT_OF_REGIME


def cmd_verify(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    pin = Pinning.from_file(args.pin) if args.pin else Pinning.empty()
    tolerance = max(args.tolerance, 1e-9)
    checks = []

    exact = influence_matrix_exact(spec, g, pin)
    tree = influence_matrix_tsaw(spec, g, pin, cap_nodes=args.cap_nodes)
    gap = float(np.max(np.abs(exact.data - tree.data))) if exact.data.size else 0.0
    checks.append(("influence tree vs exact", gap, gap <= tolerance))

    z = exact_partition(spec, g, pin)
    checks.append(("support nonempty", 0.0 if z > 0 else 1.0, z > 0))

    from .spectral import involution_r, knb_matrix, matrix_power_int, sigma_kl
    for k in (1, 2):
        try:
            h = knb_matrix(g, k)
        except ValueError:
            continue
        r = involution_r(h.row_labels).data
        for power in (1, 2, 3):
            hl = matrix_power_int(h.data, power)
            sym_gap = int(np.max(np.abs(hl @ r - (hl @ r).T)))
            checks.append((f"PT invariance k={k} l={power}", float(sym_gap), sym_gap == 0))
            sigma = sigma_kl(g, k, power)
            entry_gap = float(hl.max() - sigma)
            checks.append((f"max entry vs sigma k={k} l={power}", entry_gap,
                           entry_gap <= tolerance))

    if g.n <= 10:
        b = b_marginal_bound(spec, g)
        checks.append(("b-marginal bound positive", 0.0 if b > 0 else 1.0, b > 0))

    lines = []
    worst = True
    for name, margin, ok in checks:
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} (residual {margin:.3g})")
        worst = worst and ok
    _emit(args, "\n".join(lines) + "\n")
    if not worst:
        raise VerificationError("instance verification reported violations")
    return EXIT_OK


def cmd_sample(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    lines = [json.dumps({"meta": _envelope(args)})]
    from .rng import derive_seed
    for chain in range(args.chains):
        sigma = dynamics.run_chain(spec, g, args.burn, derive_seed(args.seed, chain))
        for t in range(args.samples):
            sigma = dynamics.run_chain(spec, g, args.thin if args.thin else g.n,
                                       derive_seed(args.seed, (chain + 1) * 1_000_003 + t),
                                       sigma=sigma)
            lines.append(json.dumps({"chain": chain, "index": t,
                                     "sigma": [int(s) for s in sigma]}))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_mix(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    est = dynamics.estimate_tv_curve(spec, g, chains=args.chains,
                                     horizon=args.horizon, seed=args.seed)
    env = _envelope(args)
    rows = [f"# seed={env['seed']} config_hash={env['config_hash']} "
            f"version={env['version']} mode={est.mode} chains={est.chains}",
            "t,tv"]
    rows += [f"{t},{tv:.8f}" for t, tv in est.tv_curve]
    _emit(args, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_estimate_z(args) -> int:
    g = load_edge_list(args.graph)
    spec = _build_spec(args)
    est = dynamics.estimate_partition_function(
        spec, g, epsilon=args.epsilon if args.epsilon is not None else 0.05,
        confidence=args.confidence, seed=args.seed)
    payload = {**est.to_json_dict(), **_envelope(args)}
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gibbs-spectral",
        description="Spectral and Monte Carlo analysis of two-spin systems on graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectral report and regime verdict")
    _add_common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--N", dest="n_power", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--observable", choices=["adjacency", "nonbacktracking", "connective"],
                   default="adjacency")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("regime", help="regime verdict only (exit 3 when outside)")
    _add_common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--N", dest="n_power", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--observable", choices=["adjacency", "nonbacktracking", "connective"],
                   default="adjacency")
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("verify", help="oracle suite on one instance")
    _add_common(p)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="emit configurations as JSON lines")
    _add_common(p)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--burn", type=int, default=1000)
    p.add_argument("--thin", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("mix", help="empirical total-variation curve (CSV)")
    _add_common(p)
    p.add_argument("--chains", type=int, default=0)
    p.add_argument("--horizon", type=int, default=0)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("estimate-z", help="telescoping partition-function estimate")
    _add_common(p)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--confidence", type=float, default=0.9)
    p.set_defaults(func=cmd_estimate_z)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (GraphFormatError, ValueError, DegenerateConditioningError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (VerificationError, ConvergenceError) as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
