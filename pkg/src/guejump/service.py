"""HTTP service exposing the library operations.

Every endpoint accepts a small JSON request and returns a uniform
``TableResponse`` (metadata, column names, rows), which the CLI writes to
CSV/JSON files unchanged.  Numerical failures map to HTTP 400 with a
machine-readable {"error": tag, "message": ...} record.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import NumericalError
from .op_engine import JumpWeightSpec, compute_recurrence, log_hankel_gue
from .painleve_ii import (CPIIParams, conditional_distribution_limit,
                          edge_coordinate, gap_probability_limit,
                          hankel_ratio_prediction, orthopoly_predictions,
                          solve_cpii, tracy_widom_cdf)
from .painleve_iv import (cpiv_ode_residual, cpiv_scaling_check,
                          dlog_gamma_residual, thm_identity_residuals)
from .rmt_oracles import (fredholm_airy_discontinuous,
                          mc_conditional_distribution, mc_gap_probability)

app = FastAPI(title="guejump", version=__version__,
              description="Hankel determinants, orthogonal polynomials and "
                          "edge limit laws for the Gaussian weight with two "
                          "jump discontinuities")


@app.exception_handler(NumericalError)
async def _numerical_error_handler(request: Request, exc: NumericalError):
    return JSONResponse(status_code=400, content=exc.record())


@app.exception_handler(ValueError)
async def _value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=422,
                        content={"error": "invalid-parameters",
                                 "message": str(exc)})


class TableResponse(BaseModel):
    meta: dict
    columns: list[str]
    rows: list[list[float | int | str]]


class SpecRequest(BaseModel):
    s1: float
    s2: float
    omega1: float = Field(ge=0)
    omega2: float = Field(ge=0)

    def spec(self) -> JumpWeightSpec:
        return JumpWeightSpec(s1=self.s1, s2=self.s2,
                              omega1=self.omega1, omega2=self.omega2)


class RecurrenceRequest(SpecRequest):
    n: int = Field(ge=1, le=500)
    nodes_per_panel: int = Field(default=40, ge=10, le=200)


class VerifyRequest(SpecRequest):
    n: int = Field(ge=1, le=200)
    h: float = Field(default=1e-3, ge=1e-4, le=1e-2)


class CpivScalingRequest(BaseModel):
    n: int = Field(ge=16, le=500)
    t1: float
    t2: float
    omega1: float = Field(ge=0)
    omega2: float = Field(ge=0)


class CpiiSolveRequest(BaseModel):
    omega1: float = Field(ge=0)
    omega2: float = Field(ge=0)
    s: float = Field(ge=0)
    x_min: float = Field(ge=-10)
    x_max: float = Field(default=12.0, ge=8)
    tol: float = Field(default=1e-11, ge=1e-13, le=1e-8)
    grid_step: float = Field(default=0.02, gt=0)


class GapLimitRequest(BaseModel):
    t1: float
    t2: float
    tol: float = Field(default=1e-11, ge=1e-13, le=1e-8)
    oracle: str = Field(default="fredholm", pattern="^(fredholm|none)$")
    m_nodes: int = Field(default=80, ge=20, le=200)


class ConditionalLimitRequest(BaseModel):
    t1: float
    t2: float
    p: float = Field(gt=0, lt=1)
    tol: float = Field(default=1e-11, ge=1e-13, le=1e-8)
    oracle: str = Field(default="fredholm", pattern="^(fredholm|none)$")
    m_nodes: int = Field(default=80, ge=20, le=200)


class TwRequest(BaseModel):
    t_min: float = Field(default=-5.0, ge=-9.5)
    t_max: float = Field(default=2.0)
    points: int = Field(default=36, ge=2, le=2000)
    tol: float = Field(default=1e-11, ge=1e-13, le=1e-8)
    oracle: str = Field(default="none", pattern="^(fredholm|none)$")
    m_nodes: int = Field(default=80, ge=20, le=200)


class AsymptoticsRequest(BaseModel):
    n: int = Field(ge=16, le=500)
    t1: float
    t2: float
    omega1: float = Field(ge=0)
    omega2: float = Field(ge=0)


class McGapRequest(BaseModel):
    n: int = Field(ge=2, le=2000)
    s1: float
    s2: float
    n_samples: int = Field(ge=10_000)
    seed: int = 0
    n_streams: int = Field(default=1, ge=1, le=64)


class McConditionalRequest(BaseModel):
    n: int = Field(ge=2, le=2000)
    x: float
    y: float
    p: float = Field(gt=0, lt=1)
    n_samples: int = Field(ge=10_000)
    seed: int = 0
    n_streams: int = Field(default=1, ge=1, le=64)


class FredholmRequest(BaseModel):
    t1: float
    t2: float
    omega1: float = Field(default=0.0, ge=0)
    omega2: float = Field(default=1.0, ge=0)
    m_nodes: int = Field(default=80, ge=20, le=200)


def _nn(v):
    """JSON-safe cell: NaN becomes the string 'nan'."""
    return "nan" if isinstance(v, float) and math.isnan(v) else v


def _meta(command: str, req: BaseModel, **extra) -> dict:
    meta = {"command": command, "version": __version__}
    meta.update(req.model_dump())
    meta.update(extra)
    return meta


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/recurrence", response_model=TableResponse)
def recurrence(req: RecurrenceRequest):
    table = compute_recurrence(req.spec(), req.n, req.nodes_per_panel)
    return TableResponse(meta=_meta("recurrence", req),
                         columns=["n", "alpha", "beta2", "gamma", "log_hankel"],
                         rows=[list(r) for r in table.rows()])


@app.post("/hankel", response_model=TableResponse)
def hankel(req: RecurrenceRequest):
    table = compute_recurrence(req.spec(), req.n, req.nodes_per_panel)
    rows = []
    for k in range(1, req.n + 1):
        lh = float(table.log_hankel[k - 1])
        lg = log_hankel_gue(k)
        rows.append([k, lh, lg, lh - lg])
    return TableResponse(meta=_meta("hankel", req),
                         columns=["n", "log_hankel", "log_hankel_gue",
                                  "log_ratio"],
                         rows=rows)


@app.post("/verify-thm1", response_model=TableResponse)
def verify_thm1(req: VerifyRequest):
    spec = req.spec()
    table = compute_recurrence(spec, req.n + 1)
    res = thm_identity_residuals(spec, table, req.n)
    res["gamma"] = dlog_gamma_residual(spec, req.n, req.h)
    rows = [[name, value, req.h, req.n, spec.s1, spec.s2, spec.omega1,
             spec.omega2] for name, value in res.items()]
    worst = max(res.values())
    return TableResponse(
        meta=_meta("verify-thm1", req, max_residual=worst,
                   tolerance=1e-7, ok=bool(worst < 1e-7)),
        columns=["quantity", "residual", "h", "n", "s1", "s2", "omega1",
                 "omega2"],
        rows=rows)


@app.post("/cpiv-residuals", response_model=TableResponse)
def cpiv_residuals(req: VerifyRequest):
    spec = req.spec()
    rows = []
    worst = 0.0
    for h in (req.h, req.h / 2.0):
        r = cpiv_ode_residual(spec, req.n, h)
        for name, value in r.as_dict().items():
            rows.append([name, value, h, req.n, spec.s1, spec.s2,
                         spec.omega1, spec.omega2])
        worst = max(worst, r.max() if h == req.h else 0.0)
    return TableResponse(
        meta=_meta("cpiv-residuals", req, max_residual_at_h=worst),
        columns=["quantity", "residual", "h", "n", "s1", "s2", "omega1",
                 "omega2"],
        rows=rows)


@app.post("/cpiv-scaling", response_model=TableResponse)
def cpiv_scaling(req: CpivScalingRequest):
    traj = solve_cpii(CPIIParams(omega1=req.omega1, omega2=req.omega2,
                                 s=req.t2 - req.t1), x_min=req.t1 - 0.5)
    dev = cpiv_scaling_check(req.n, req.t1, req.t2, req.omega1, req.omega2,
                             traj)
    bound = 5.0 * req.n ** (-1.0 / 3.0)
    rows = [[name, value, req.n] for name, value in dev.as_dict().items()]
    return TableResponse(
        meta=_meta("cpiv-scaling", req, bound=bound,
                   ok=bool(dev.max() < bound)),
        columns=["quantity", "deviation", "n"],
        rows=rows)


@app.post("/cpii-solve", response_model=TableResponse)
def cpii_solve(req: CpiiSolveRequest):
    params = CPIIParams(omega1=req.omega1, omega2=req.omega2, s=req.s)
    traj = solve_cpii(params, x_min=req.x_min, x_max=req.x_max, tol=req.tol,
                      grid_step=req.grid_step)
    return TableResponse(
        meta=_meta("cpii-solve", req, hamiltonian_drift=traj.hamiltonian_drift()),
        columns=["x", "v1", "v2", "w1", "w2", "H"],
        rows=[[("nan" if isinstance(v, float) and math.isnan(v) else v)
               for v in row] for row in traj.rows()])


@app.post("/gap-limit", response_model=TableResponse)
def gap_limit(req: GapLimitRequest):
    value = gap_probability_limit(req.t1, req.t2, tol=req.tol)
    if req.oracle == "fredholm":
        oracle = fredholm_airy_discontinuous(req.t1, req.t2, 0.0, 1.0,
                                             req.m_nodes)
        diff = abs(value - oracle)
    else:
        oracle, diff = math.nan, math.nan
    return TableResponse(
        meta=_meta("gap-limit", req),
        columns=["t1", "t2", "ode_value", "oracle_value", "difference"],
        rows=[[req.t1, req.t2, value, _nn(oracle), _nn(diff)]])


@app.post("/conditional-limit", response_model=TableResponse)
def conditional_limit(req: ConditionalLimitRequest):
    value = conditional_distribution_limit(req.t1, req.t2, req.p, tol=req.tol)
    if req.oracle == "fredholm":
        num = fredholm_airy_discontinuous(req.t1, req.t2, req.p, 0.0,
                                          req.m_nodes)
        den = fredholm_airy_discontinuous(req.t1, req.t2, req.p, req.p,
                                          req.m_nodes)
        oracle = num / den
        diff = abs(value - oracle)
    else:
        oracle, diff = math.nan, math.nan
    return TableResponse(
        meta=_meta("conditional-limit", req),
        columns=["t1", "t2", "p", "ode_value", "oracle_value", "difference"],
        rows=[[req.t1, req.t2, req.p, value, _nn(oracle), _nn(diff)]])


@app.post("/tw", response_model=TableResponse)
def tw(req: TwRequest):
    ts = np.linspace(req.t_min, req.t_max, req.points)
    curve = tracy_widom_cdf(ts, tol=req.tol)
    rows = [list(r) for r in curve.rows()]
    if req.oracle == "fredholm":
        for t in ts:
            v = fredholm_airy_discontinuous(float(t), float(t) + 1.0, 0.0,
                                            0.0, req.m_nodes)
            rows.append([float(t), v, "fredholm"])
    return TableResponse(meta=_meta("tw", req),
                         columns=["t", "value", "method"],
                         rows=rows)


@app.post("/hankel-asymptotics", response_model=TableResponse)
def hankel_asymptotics(req: AsymptoticsRequest):
    pred = hankel_ratio_prediction(req.n, req.t1, req.t2, req.omega1,
                                   req.omega2)
    spec = JumpWeightSpec(s1=edge_coordinate(req.n, req.t1),
                          s2=edge_coordinate(req.n, req.t2),
                          omega1=req.omega1, omega2=req.omega2)
    table = compute_recurrence(spec, req.n)
    numeric = float(table.log_hankel[req.n - 1]) - pred.log_hankel_gue
    bound = 1.5 * req.n ** (-1.0 / 6.0)
    return TableResponse(
        meta=_meta("hankel-asymptotics", req, bound=bound),
        columns=["n", "log_ratio_numeric", "log_ratio_predicted",
                 "difference"],
        rows=[[req.n, numeric, pred.log_ratio,
               abs(numeric - pred.log_ratio)]])


@app.post("/op-asymptotics", response_model=TableResponse)
def op_asymptotics(req: AsymptoticsRequest):
    from .op_engine import eval_monic_pair
    pred = orthopoly_predictions(req.n, req.t1, req.t2, req.omega1,
                                 req.omega2)
    spec = JumpWeightSpec(s1=edge_coordinate(req.n, req.t1),
                          s2=edge_coordinate(req.n, req.t2),
                          omega1=req.omega1, omega2=req.omega2)
    table = compute_recurrence(spec, req.n + 1)
    n = req.n
    r1 = eval_monic_pair(table, n, spec.s1)
    r2 = eval_monic_pair(table, n, spec.s2)
    log_gamma_num = float(table.log_gamma[n - 1])
    rows = [
        ["alpha", float(table.alpha[n]), pred.alpha,
         abs(float(table.alpha[n]) - pred.alpha)],
        ["beta", math.sqrt(float(table.beta2[n])), pred.beta,
         abs(math.sqrt(float(table.beta2[n])) - pred.beta)],
        ["gamma_ratio", math.exp(log_gamma_num - pred.log_gamma_leading),
         pred.gamma_correction,
         abs(math.exp(log_gamma_num - pred.log_gamma_leading)
             - pred.gamma_correction)],
        ["log_abs_pn_s1", math.log(abs(r1.pn)) + r1.log_scale,
         pred.log_abs_pn_s1,
         abs(math.exp(math.log(abs(r1.pn)) + r1.log_scale
                      - pred.log_abs_pn_s1) - 1.0)],
        ["log_abs_pn_s2", math.log(abs(r2.pn)) + r2.log_scale,
         pred.log_abs_pn_s2,
         abs(math.exp(math.log(abs(r2.pn)) + r2.log_scale
                      - pred.log_abs_pn_s2) - 1.0)],
    ]
    return TableResponse(meta=_meta("op-asymptotics", req),
                         columns=["quantity", "numeric", "predicted",
                                  "deviation"],
                         rows=rows)


@app.post("/mc-gap", response_model=TableResponse)
def mc_gap(req: McGapRequest):
    est = mc_gap_probability(req.n, req.s1, req.s2, req.n_samples, req.seed,
                             req.n_streams)
    return TableResponse(
        meta=_meta("mc-gap", req),
        columns=["n", "s1", "s2", "p", "estimate", "stderr", "n_samples",
                 "seed"],
        rows=[[req.n, req.s1, req.s2, "nan", est.estimate, est.stderr,
               est.n_samples, est.seed]])


@app.post("/mc-conditional", response_model=TableResponse)
def mc_conditional(req: McConditionalRequest):
    est = mc_conditional_distribution(req.n, req.x, req.y, req.p,
                                      req.n_samples, req.seed, req.n_streams)
    return TableResponse(
        meta=_meta("mc-conditional", req, n_effective=est.n_effective),
        columns=["n", "s1", "s2", "p", "estimate", "stderr", "n_samples",
                 "seed"],
        rows=[[req.n, req.y, req.x, req.p, est.estimate, est.stderr,
               est.n_samples, est.seed]])


@app.post("/fredholm-oracle", response_model=TableResponse)
def fredholm_oracle(req: FredholmRequest):
    value = fredholm_airy_discontinuous(req.t1, req.t2, req.omega1,
                                        req.omega2, req.m_nodes)
    return TableResponse(
        meta=_meta("fredholm-oracle", req),
        columns=["t1", "t2", "omega1", "omega2", "m_nodes", "value"],
        rows=[[req.t1, req.t2, req.omega1, req.omega2, req.m_nodes, value]])
