"""Service endpoints: one POST per subcommand, each returning the same
self-describing report document the CLI writes to disk. Construction
errors map to HTTP 400 (client exit: input error); budget exhaustion and
defects stay HTTP 200 with the report's exit code set accordingly."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..barycenter import BarycenterConfig, BarycenterError, beta_rational
from ..chains import ChainBudgetError, cauchy_check, consistency_bound_check
from ..doss import banach_witness_search, doss_membership, doss_set_finite
from ..extension import (ExtensionBudgetError, ExtensionError, build_S_map,
                         certify_extension)
from ..halfplane import beta_H, distinctness_certificate, sigma_H
from ..handles import DefectReport, GridError
from ..linprog import LPBudgetError
from ..moduli import (PreconditionError, SweepConfig, conical_defect,
                      consistency_defect, convexity_defect, geodesic_defect,
                      reversibility_defect, straightness_defect,
                      strengthened_defect)
from ..rationals import NumberFormatError, format_rational
from ..registry import (InputSpecError, build_bicombing, build_measure,
                        build_space, default_bicombing, parse_point)
from ..reports import (EXIT_BUDGET, EXIT_DEFECT, EXIT_OK, defect_exit,
                       report_document)
from ..sampling import rng_from_seed
from ..spaces import SpaceError, dist
from ..tightspan import (embed, embedding_isometry_defect, ex_bicombing,
                         make_tightspan, retract_with_stats, sample_extremal,
                         star_residual)
from ..wasserstein import (MeasureError, kantorovich_dual, w1_general,
                           w1_two_point)
from .schemas import (BarycenterRequest, CertifyRequest, DossRequest,
                      ExtendRequest, HalfplaneDemoRequest, ImproveRequest,
                      ReportDoc, RunConfig, TightspanRequest, W1Request)

INPUT_ERRORS = (InputSpecError, SpaceError, MeasureError, NumberFormatError,
                GridError)
BUDGET_ERRORS = (ChainBudgetError, ExtensionBudgetError, LPBudgetError,
                 BarycenterError)


def _respond(command: str, config: RunConfig, fn) -> dict:
    cfg_echo = config.model_dump()
    try:
        results, notes, exit_code = fn()
    except INPUT_ERRORS as e:
        raise HTTPException(status_code=400, detail=str(e))
    except BUDGET_ERRORS as e:
        extra = {"error": str(e)}
        if isinstance(e, ExtensionBudgetError):
            extra["violation"] = e.violation
        if isinstance(e, ChainBudgetError):
            extra["partial_residual"] = e.chain.residual
        return report_document(command, cfg_echo, extra, EXIT_BUDGET)
    except ExtensionError as e:
        results = {"error": str(e)}
        if e.report is not None:
            results["gate"] = e.report
        return report_document(command, cfg_echo, results, EXIT_DEFECT)
    return report_document(command, cfg_echo, results, exit_code, notes)


def create_app() -> FastAPI:
    app = FastAPI(title="bicomb", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/w1", response_model=ReportDoc)
    def w1(req: W1Request):
        def run():
            space = build_space(req.space) if req.space else None
            mu = build_measure(req.mu, space)
            nu = build_measure(req.nu, space if space is not None else mu.space)
            res = w1_general(mu, nu)
            results = {
                "value": float(res.value),
                "exact": res.exact,
                "plan": res.plan,
                "mu": mu.to_dict(),
                "nu": nu.to_dict(),
            }
            if res.exact:
                results["value_exact"] = format_rational(res.value)
            if mu.space.kind == "finite":
                dual = kantorovich_dual(mu, nu)
                gap = abs(res.value - dual.value)
                results["dual"] = {
                    "value": float(dual.value),
                    "value_exact": format_rational(dual.value),
                    "potential": dual.f,
                    "feasibility_defect": float(dual.feasibility_defect()),
                    "duality_gap": float(gap),
                }
            if mu.size <= 2 and nu.size <= 2:
                a, wa = list(mu.support), list(mu.weights)
                b, wb = list(nu.support), list(nu.weights)
                while len(a) < 2:
                    a.append(a[0]); wa = [wa[0], 0]
                while len(b) < 2:
                    b.append(b[0]); wb = [wb[0], 0]
                tp, _ = w1_two_point(mu.space, a[0], a[1], wa[1],
                                     b[0], b[1], wb[1])
                results["two_point"] = {
                    "value": float(tp),
                    "gap": abs(float(tp) - float(res.value)),
                }
            return results, [], EXIT_OK

        return _respond("w1", req.config, run)

    @app.post("/v1/tightspan", response_model=ReportDoc)
    def tightspan(req: TightspanRequest):
        def run():
            cfg = req.config
            base = build_space(req.space)
            space = base if base.kind == "tightspan" else make_tightspan(base.metric)
            rng = rng_from_seed(cfg.seed)
            pts = [sample_extremal(space, rng) for _ in range(min(cfg.samples, 200))]

            ident, ident_w = 0.0, None
            lip, lip_w = float("-inf"), None
            extr = 0.0
            iters = 0
            for i, f in enumerate(pts):
                stats_pt, stats = retract_with_stats(space, f.values)
                gap = dist(space, stats_pt, f)
                if gap > ident:
                    ident, ident_w = gap, i
                extr = max(extr, star_residual(space, f.values))
                iters = max(iters, stats.iterations)
            rng2 = rng_from_seed(cfg.seed + 1)
            diam = float(space.metric.diameter)
            n = space.metric.size
            for k in range(min(cfg.samples, 500)):
                raw_f = tuple(float(v) for v in rng2.uniform(0, diam, n))
                raw_g = tuple(float(v) for v in rng2.uniform(0, diam, n))
                rf = retract_with_stats(space, raw_f)[0]
                rg = retract_with_stats(space, raw_g)[0]
                gap = (dist(space, rf, rg)
                       - max(abs(a - b) for a, b in zip(raw_f, raw_g)))
                if gap > lip:
                    lip, lip_w = gap, k
            reports = [
                DefectReport("retract_identity", ident, ident_w, len(pts),
                             1e-9, {}),
                DefectReport("retract_lipschitz", lip, lip_w,
                             min(cfg.samples, 500), 1e-9, {}),
                DefectReport("retract_extremal", extr, None, len(pts),
                             max(cfg.eps, 1e-8), {}),
                conical_defect(ex_bicombing(space), SweepConfig(
                    samples=min(cfg.samples, 300), seed=cfg.seed,
                    tolerance=max(cfg.eps, 1e-8))),
            ]
            results = {
                "labels": list(space.metric.labels),
                "size": n,
                "diameter": diam,
                "embedding_isometry_defect": embedding_isometry_defect(space),
                "max_retract_iterations": iters,
                "embedded_points": [embed(space, i) for i in range(n)],
                "reports": reports,
            }
            return results, [], defect_exit(reports)

        return _respond("tightspan", req.config, run)

    @app.post("/v1/barycenter", response_model=ReportDoc)
    def barycenter(req: BarycenterRequest):
        def run():
            cfg = req.config
            space = build_space(req.space) if req.space else None
            mu = build_measure(req.measure, space)
            sigma = (build_bicombing(req.bicombing, mu.space)
                     if req.bicombing else default_bicombing(mu.space))
            bcfg = BarycenterConfig(eps=cfg.eps)
            rep = beta_rational(mu, sigma, bcfg)
            results = {
                "value": rep.value,
                "increments": rep.increments,
                "converged": rep.converged,
                "closed_form": rep.closed_form,
                "denominator": rep.denominator,
                "evaluations": rep.evaluations,
                "midpoint_gap": rep.midpoint_gap,
                "bicombing": sigma.name,
            }
            code = EXIT_OK if (rep.converged or rep.closed_form) else EXIT_BUDGET
            return results, [], code

        return _respond("barycenter", req.config, run)

    @app.post("/v1/halfplane-demo", response_model=ReportDoc)
    def halfplane_demo(req: HalfplaneDemoRequest):
        def run():
            cfg = req.config
            cert = distinctness_certificate(eps=min(cfg.eps, 1e-9),
                                            seed=cfg.seed)
            sig = sigma_H(cfg.grid)
            con = conical_defect(sig, SweepConfig(
                samples=min(cfg.samples, 1000), seed=cfg.seed,
                tolerance=max(cfg.eps, 1e-8)))
            results = {"certificate": cert, "conical": con}
            notes = []
            code = defect_exit(results)
            if not cert["distinct"]:
                notes.append("distinctness certificate failed")
                code = EXIT_DEFECT
            return results, notes, code

        return _respond("halfplane-demo", req.config, run)

    @app.post("/v1/doss", response_model=ReportDoc)
    def doss(req: DossRequest):
        def run():
            cfg = req.config
            space = build_space(req.space) if req.space else None
            mu = build_measure(req.measure, space)
            space = mu.space
            if space.kind == "finite":
                members = doss_set_finite(mu)
                results = {
                    "exhaustive": True,
                    "doss_set": [space.metric.labels[i] for i in members],
                    "size": len(members),
                }
                return results, [], EXIT_OK
            if req.point is not None:
                z = parse_point(space, req.point)
                z_how = "supplied"
            elif space.kind == "halfplane":
                z = beta_H(mu)
                z_how = "halfplane barycenter"
            else:
                rep = beta_rational(mu, default_bicombing(space))
                z = rep.value
                z_how = "linear barycenter"
            search = banach_witness_search(mu, z, seed=cfg.seed,
                                           budget=cfg.budget, tol=cfg.eps)
            member, worst_w, worst_v = doss_membership(
                mu, z, list(mu.support) + ([search.witness] if search.witness
                                           else []), tol=cfg.eps)
            results = {
                "exhaustive": False,
                "candidate": z,
                "candidate_source": z_how,
                "witness": search.witness,
                "violation": search.violation,
                "checked": search.checked,
                "member_vs_checked_witnesses": member and search.witness is None,
                "worst_support_violation": worst_v,
            }
            return results, [], EXIT_OK

        return _respond("doss", req.config, run)

    @app.post("/v1/certify", response_model=ReportDoc)
    def certify(req: CertifyRequest):
        def run():
            cfg = req.config
            space = build_space(req.space) if req.space else None
            sigma = build_bicombing(req.bicombing, space)
            sweep = SweepConfig(samples=cfg.samples, seed=cfg.seed,
                                tolerance=cfg.eps)
            reports = [
                conical_defect(sigma, sweep),
                geodesic_defect(sigma, sweep),
                reversibility_defect(sigma, sweep),
                consistency_defect(sigma, sweep),
                straightness_defect(sigma, sweep),
                convexity_defect(sigma, sweep),
            ]
            notes = []
            try:
                reports.append(strengthened_defect(sigma, sweep))
            except PreconditionError as e:
                notes.append(f"strengthened check skipped: {e}")
                reports.append(e.report)
            results = {
                "bicombing": sigma.name,
                "flags": {"conical": sigma.conical,
                          "reversible": sigma.reversible,
                          "consistent": sigma.consistent},
                "reports": reports,
            }
            return results, notes, defect_exit(reports)

        return _respond("certify", req.config, run)

    @app.post("/v1/improve", response_model=ReportDoc)
    def improve(req: ImproveRequest):
        def run():
            cfg = req.config
            if cfg.n is None:
                raise InputSpecError("improve needs --n (curve endpoint)")
            space = build_space(req.space) if req.space else None
            sigma = (build_bicombing(req.bicombing, space)
                     if req.bicombing else sigma_H(cfg.grid))
            curve = []
            reports = []
            for n in range(1, cfg.n + 1):
                row = {"n": n, "consistency_bound": 2.0 / n,
                       "cauchy_bound": 1.0 / (n + 1)}
                con = consistency_bound_check(sigma, n, SweepConfig(
                    samples=cfg.samples, radius=0.5, seed=cfg.seed,
                    tolerance=cfg.eps))
                row["consistency_defect"] = con.max_violation
                reports.append(con)
                if n <= 6:
                    cau = cauchy_check(sigma, n, _origin(sigma.space),
                                       SweepConfig(samples=min(cfg.samples, 24),
                                                   seed=cfg.seed,
                                                   tolerance=max(cfg.eps, 1e-6)))
                    row["cauchy_value"] = cau.max_violation
                    reports.append(cau)
                else:
                    row["cauchy_value"] = None
                curve.append(row)
            results = {"bicombing": sigma.name, "curve": curve,
                       "reports": reports}
            return results, [], defect_exit(reports)

        return _respond("improve", req.config, run)

    @app.post("/v1/extend", response_model=ReportDoc)
    def extend(req: ExtendRequest):
        def run():
            cfg = req.config
            base = build_space(req.space)
            space = base if base.kind == "tightspan" else make_tightspan(base.metric)
            sigma = (build_bicombing(req.bicombing, space)
                     if req.bicombing else ex_bicombing(space))
            store = build_S_map(sigma, grid=cfg.grid, eps=cfg.eps)
            reports = certify_extension(store, samples=cfg.samples,
                                        seed=cfg.seed,
                                        tolerance=max(100 * cfg.eps, 1e-6),
                                        budget=cfg.budget)
            results = {
                "bicombing": sigma.name,
                "reports": reports,
                "store_size": len(store),
                "store": store.to_dict(),
            }
            return results, [], defect_exit(reports)

        return _respond("extend", req.config, run)

    return app


def _origin(space):
    if space.kind in ("linf", "halfplane"):
        return tuple(0.0 for _ in range(space.dim))
    raise InputSpecError("cauchy curve needs a coordinate space")


app = create_app()
